//! Batch front end for the spin-system toolkit: parse a JSON scenario or
//! mirror flags, dispatch to simulate / dims / check / spectrum, and write
//! CSV/JSON outputs plus a run manifest.

pub mod checks;
pub mod dispatch;
pub mod outputs;
pub mod scenario;

pub use dispatch::{dispatch, DispatchError};
pub use scenario::{parse_scenario, Scenario, ScenarioError};
