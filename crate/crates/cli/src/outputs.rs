//! Output files: trajectory CSV, JSON reports, and the run manifest.
//!
//! CSV columns follow the fixed contract: `t`, all state coordinates with
//! real and imaginary parts interleaved, `c1_abs`, `c2_abs`,
//! `reality_residual`, then one column per audited observable carrying the
//! complex modulus |O(t)| (the conservation JSON holds the full drift
//! data). JSON reports serialize structs with declaration-ordered keys, so
//! repeated runs with the same seed are byte-identical.

use serde::Serialize;
use spinhiggs_core::flow::{DriftEntry, IsospectralEntry, SystemState, Trajectory};
use spinhiggs_core::models::{
    CM_COUPLING, GAUDIN_H1_COEFF, GAUDIN_H2_COEFF, LAX_AXIS_PHI, LAX_AXIS_SIGN, TRACE_CONST_COEFF,
    TRACE_WP_COEFF,
};
use std::fmt::Write as _;
use std::io;
use std::path::Path;

/// Column names for one phase-space site with an optional prefix.
fn site_columns(prefix: &str) -> Vec<String> {
    ["p0", "p1", "p3", "q0", "q1", "q3"]
        .iter()
        .map(|c| format!("{prefix}{c}"))
        .collect()
}

/// Coordinate column names of a state, matching `SystemState::pack` order.
pub fn state_columns(state: &SystemState) -> Vec<String> {
    match state {
        SystemState::Top(_) => site_columns(""),
        SystemState::Cm(_) => {
            let mut cols = vec!["v".to_string(), "u".to_string()];
            cols.extend(site_columns(""));
            cols
        }
        SystemState::Gaudin(g) => {
            let mut cols = Vec::new();
            for a in 0..g.n_sites() {
                cols.extend(site_columns(&format!("site{a}_")));
            }
            cols
        }
    }
}

/// Renders a trajectory to CSV text.
pub fn trajectory_csv(traj: &Trajectory) -> String {
    let mut out = String::new();
    let coord_cols = state_columns(&traj.states[0]);
    out.push('t');
    for c in &coord_cols {
        let _ = write!(out, ",{c}_re,{c}_im");
    }
    out.push_str(",c1_abs,c2_abs,reality_residual");
    for name in &traj.observable_names {
        let _ = write!(out, ",{name}");
    }
    out.push('\n');
    for (k, t) in traj.times.iter().enumerate() {
        let _ = write!(out, "{t}");
        for z in traj.states[k].pack() {
            let _ = write!(out, ",{},{}", z.re, z.im);
        }
        let rec = &traj.audit[k];
        let _ = write!(
            out,
            ",{},{},{}",
            rec.c1_abs, rec.c2_abs, rec.reality_residual
        );
        for obs in &rec.observables {
            let _ = write!(out, ",{}", obs.norm());
        }
        out.push('\n');
    }
    out
}

pub fn write_trajectory_csv(path: &Path, traj: &Trajectory) -> io::Result<()> {
    std::fs::write(path, trajectory_csv(traj))
}

/// Complex scalar as a `[re, im]` pair in JSON.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct JsonComplex(pub f64, pub f64);

impl From<spinhiggs_core::Complex> for JsonComplex {
    fn from(z: spinhiggs_core::Complex) -> Self {
        JsonComplex(z.re, z.im)
    }
}

#[derive(Debug, Serialize)]
pub struct DriftJson {
    pub name: String,
    pub initial: JsonComplex,
    pub max_abs_drift: f64,
    pub max_rel_drift: f64,
}

impl From<&DriftEntry> for DriftJson {
    fn from(e: &DriftEntry) -> Self {
        DriftJson {
            name: e.name.clone(),
            initial: e.initial.into(),
            max_abs_drift: e.max_abs_drift,
            max_rel_drift: e.max_rel_drift,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct IsospectralJson {
    pub z: JsonComplex,
    pub tr_sq_rel_drift: f64,
    pub det_rel_drift: f64,
}

impl From<&IsospectralEntry> for IsospectralJson {
    fn from(e: &IsospectralEntry) -> Self {
        IsospectralJson {
            z: e.z.into(),
            tr_sq_rel_drift: e.tr_sq_rel_drift,
            det_rel_drift: e.det_rel_drift,
        }
    }
}

/// Conservation report written next to a trajectory.
#[derive(Debug, Serialize)]
pub struct ConservationJson {
    pub steps: usize,
    pub max_c1_abs: f64,
    pub max_c2_abs: f64,
    pub max_reality_residual: f64,
    pub observables: Vec<DriftJson>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub isospectral: Vec<IsospectralJson>,
}

/// The calibration constants recorded with every run.
#[derive(Debug, Serialize)]
pub struct CalibrationJson {
    /// Twisted-function index carried by each Pauli axis of the top Lax.
    pub lax_axis_phi: [usize; 3],
    pub lax_axis_sign: [f64; 3],
    /// Half-periods carried by the axes, as formulas in τ.
    pub lax_axis_half_period: [&'static str; 3],
    /// The σ₂ coefficient carries this factor relative to X₂.
    pub x2_factor: &'static str,
    /// ½ tr L² = trace_wp_coeff·H₂·℘(z) + trace_const_coeff·H₀.
    pub trace_wp_coeff: f64,
    pub trace_const_coeff: f64,
    /// H₀ = ½v² + cm_coupling·X₊X₋·℘(2u).
    pub cm_coupling: f64,
    /// ½ tr L² = Σ_a [gaudin_h2_coeff·H₂^a/(z−x_a)² + gaudin_h1_coeff·H₁^a/(z−x_a)].
    pub gaudin_h2_coeff: f64,
    pub gaudin_h1_coeff: f64,
}

impl CalibrationJson {
    pub fn current() -> Self {
        CalibrationJson {
            lax_axis_phi: LAX_AXIS_PHI,
            lax_axis_sign: LAX_AXIS_SIGN,
            lax_axis_half_period: ["tau/2", "(1+tau)/2", "1/2"],
            x2_factor: "i",
            trace_wp_coeff: TRACE_WP_COEFF,
            trace_const_coeff: TRACE_CONST_COEFF,
            cm_coupling: CM_COUPLING,
            gaudin_h2_coeff: GAUDIN_H2_COEFF,
            gaudin_h1_coeff: GAUDIN_H1_COEFF,
        }
    }
}

/// Run manifest: seed, step size, calibration constants, code version.
#[derive(Debug, Serialize)]
pub struct ManifestJson {
    pub version: &'static str,
    pub action: String,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_end: Option<f64>,
    pub calibration: CalibrationJson,
}

impl ManifestJson {
    pub fn new(action: &str, seed: u64, dt: Option<f64>, t_end: Option<f64>) -> Self {
        ManifestJson {
            version: env!("CARGO_PKG_VERSION"),
            action: action.to_string(),
            seed,
            dt,
            t_end,
            calibration: CalibrationJson::current(),
        }
    }
}

/// Pretty-printed JSON with a trailing newline.
pub fn to_json_string<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable report");
    s.push('\n');
    s
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> io::Result<()> {
    std::fs::write(path, to_json_string(value))
}
