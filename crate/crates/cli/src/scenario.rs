//! Scenario configuration: JSON parsing, defaults, and validation.
//!
//! A scenario selects one of the four actions (simulate, dims, check,
//! spectrum) plus its model, parameters, initial state, integrator options
//! and output paths. Flags on the command line mirror these fields; a
//! `--config FILE` supplies the same structure as JSON.

use serde::Deserialize;
use spinhiggs_core::elliptic::EllipticCurve;
use spinhiggs_core::flow::IntegratorOptions;
use spinhiggs_core::lie::GroupType;
use spinhiggs_core::models::CmVariant;
use spinhiggs_core::symplectic::RealityClass;
use spinhiggs_core::{cx, Complex};
use std::fmt;

/// Validation failure, carrying the offending field path.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioError {
    pub field: String,
    pub message: String,
}

impl ScenarioError {
    pub fn new(field: &str, message: impl Into<String>) -> Self {
        ScenarioError {
            field: field.into(),
            message: message.into(),
        }
    }
}

impl fmt::Display for ScenarioError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}

impl std::error::Error for ScenarioError {}

/// A JSON number or `[re, im]` pair.
#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(untagged)]
pub enum NumOrPair {
    Real(f64),
    Pair([f64; 2]),
}

impl NumOrPair {
    pub fn to_complex(self) -> Complex {
        match self {
            NumOrPair::Real(re) => cx(re, 0.0),
            NumOrPair::Pair([re, im]) => cx(re, im),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveCfg {
    pub tau_re: f64,
    pub tau_im: f64,
    #[serde(default)]
    pub trunc_tol: Option<f64>,
    #[serde(default)]
    pub max_terms: Option<usize>,
}

#[derive(Debug, Clone, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct ParamsCfg {
    /// Top/spectrum inertia coefficients.
    #[serde(default)]
    pub j: Option<Vec<NumOrPair>>,
    /// Use the curve-matched inertia instead of explicit values.
    #[serde(default)]
    pub j_from_curve: Option<bool>,
    /// CM variant: "V", "III" or "IV".
    #[serde(default)]
    pub variant: Option<String>,
    /// Gaudin marked points.
    #[serde(default)]
    pub marks: Option<Vec<NumOrPair>>,
    /// Gaudin flow selector.
    #[serde(default)]
    pub site: Option<usize>,
    #[serde(default)]
    pub hamiltonian: Option<String>,
    /// Spin of the quantum top (half-integers allowed).
    #[serde(default)]
    pub l: Option<f64>,
    /// Group types for the dims action, e.g. ["A1", "E8"].
    #[serde(default)]
    pub types: Option<Vec<String>>,
    #[serde(default)]
    pub genus: Option<u64>,
    #[serde(default)]
    pub marked: Option<u64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SiteCfg {
    pub p: [NumOrPair; 3],
    pub q: [NumOrPair; 3],
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum InitialCfg {
    /// "random:<seed>"
    Random(String),
    Explicit(ExplicitInitial),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExplicitInitial {
    #[serde(default)]
    pub p: Option<[NumOrPair; 3]>,
    #[serde(default)]
    pub q: Option<[NumOrPair; 3]>,
    #[serde(default)]
    pub v: Option<NumOrPair>,
    #[serde(default)]
    pub u: Option<NumOrPair>,
    #[serde(default)]
    pub spin: Option<SiteCfg>,
    #[serde(default)]
    pub sites: Option<Vec<SiteCfg>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntegratorCfg {
    #[serde(default)]
    pub dt: Option<f64>,
    #[serde(default)]
    pub t_end: Option<f64>,
    #[serde(default)]
    pub project_every: Option<usize>,
    #[serde(default)]
    pub tol: Option<f64>,
}

#[derive(Debug, Clone, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct OutputsCfg {
    #[serde(default)]
    pub trajectory_csv: Option<String>,
    #[serde(default)]
    pub report_json: Option<String>,
    #[serde(default)]
    pub manifest_json: Option<String>,
}

/// Raw scenario as deserialized; `validate` turns it into a [`Scenario`].
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioCfg {
    pub action: String,
    #[serde(default)]
    pub model: Option<String>,
    #[serde(default)]
    pub class: Option<String>,
    #[serde(default)]
    pub curve: Option<CurveCfg>,
    #[serde(default)]
    pub params: Option<ParamsCfg>,
    #[serde(default)]
    pub initial: Option<InitialCfg>,
    #[serde(default)]
    pub integrator: Option<IntegratorCfg>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub outputs: Option<OutputsCfg>,
}

/// The four batch actions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Action {
    Simulate,
    Dims,
    Check,
    Spectrum,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelKind {
    Top,
    Cm,
    Gaudin,
}

/// Fully validated scenario with defaults applied.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub action: Action,
    pub model: ModelKind,
    pub class: RealityClass,
    pub curve: Option<EllipticCurve>,
    pub j: Option<[Complex; 3]>,
    pub j_from_curve: bool,
    pub variant: CmVariant,
    pub marks: Vec<Complex>,
    pub site: usize,
    pub hamiltonian: String,
    pub two_l: u32,
    pub group_types: Vec<GroupType>,
    pub genus: u64,
    pub marked: u64,
    pub initial: Option<InitialCfg>,
    pub integrator: IntegratorOptions,
    pub seed: u64,
    pub outputs: OutputsCfg,
}

/// Parses and validates a JSON scenario, applying the documented defaults
/// (dt = 1e-3, t_end = 10, tol = 1e-10, project_every = 10, seed = 0).
/// The environment variable `SPINHIGGS_SEED` overrides the configured seed.
pub fn parse_scenario(text: &str) -> Result<Scenario, ScenarioError> {
    let cfg: ScenarioCfg = serde_json::from_str(text)
        .map_err(|e| ScenarioError::new("<config>", format!("invalid JSON: {e}")))?;
    validate(cfg)
}

pub fn validate(cfg: ScenarioCfg) -> Result<Scenario, ScenarioError> {
    let action = match cfg.action.as_str() {
        "simulate" => Action::Simulate,
        "dims" => Action::Dims,
        "check" => Action::Check,
        "spectrum" => Action::Spectrum,
        other => {
            return Err(ScenarioError::new(
                "action",
                format!("unknown action '{other}' (expected simulate|dims|check|spectrum)"),
            ))
        }
    };

    let model = match cfg.model.as_deref() {
        None | Some("top") => ModelKind::Top,
        Some("cm") => ModelKind::Cm,
        Some("gaudin") => ModelKind::Gaudin,
        Some(other) => {
            return Err(ScenarioError::new(
                "model",
                format!("unknown model '{other}' (expected top|cm|gaudin)"),
            ))
        }
    };

    let class = match cfg.class.as_deref() {
        None | Some("complex_v") => RealityClass::ComplexV,
        Some("type_iii") => RealityClass::TypeIII,
        Some("type_iv") => RealityClass::TypeIV,
        Some(other) => {
            return Err(ScenarioError::new(
                "class",
                format!("unknown class '{other}' (expected complex_v|type_iii|type_iv)"),
            ))
        }
    };

    let curve = match &cfg.curve {
        None => None,
        Some(c) => {
            if !(c.tau_im > 0.0) {
                return Err(ScenarioError::new("curve.tau_im", "must be positive"));
            }
            let tol = c.trunc_tol.unwrap_or(EllipticCurve::DEFAULT_TRUNC_TOL);
            let max_terms = c.max_terms.unwrap_or(EllipticCurve::DEFAULT_MAX_TERMS);
            Some(
                EllipticCurve::with_policy(cx(c.tau_re, c.tau_im), tol, max_terms)
                    .map_err(|e| ScenarioError::new("curve", format!("{e}")))?,
            )
        }
    };

    let params = cfg.params.unwrap_or_default();

    let j = match &params.j {
        None => None,
        Some(v) => {
            if v.len() != 3 {
                return Err(ScenarioError::new("params.j", "need exactly 3 entries"));
            }
            Some([
                v[0].to_complex(),
                v[1].to_complex(),
                v[2].to_complex(),
            ])
        }
    };

    let variant = match params.variant.as_deref() {
        None | Some("V") | Some("v") => CmVariant::V,
        Some("III") | Some("iii") => CmVariant::Iii,
        Some("IV") | Some("iv") => CmVariant::Iv,
        Some(other) => {
            return Err(ScenarioError::new(
                "params.variant",
                format!("unknown variant '{other}' (expected V|III|IV)"),
            ))
        }
    };

    let marks: Vec<Complex> = params
        .marks
        .as_ref()
        .map(|m| m.iter().map(|v| v.to_complex()).collect())
        .unwrap_or_default();
    for a in 0..marks.len() {
        for b in (a + 1)..marks.len() {
            if (marks[a] - marks[b]).norm() < spinhiggs_core::models::MARK_SEPARATION {
                return Err(ScenarioError::new(
                    "params.marks",
                    format!("marked points {a} and {b} coincide"),
                ));
            }
        }
    }

    let hamiltonian = params.hamiltonian.clone().unwrap_or_else(|| "h1".into());
    if hamiltonian != "h1" && hamiltonian != "h2" {
        return Err(ScenarioError::new(
            "params.hamiltonian",
            "expected 'h1' or 'h2'",
        ));
    }

    let two_l = match params.l {
        None => 2,
        Some(l) => {
            let doubled = l * 2.0;
            if l < 0.0 || (doubled - doubled.round()).abs() > 1e-9 {
                return Err(ScenarioError::new(
                    "params.l",
                    "must be a non-negative half-integer",
                ));
            }
            doubled.round() as u32
        }
    };

    let group_types = match &params.types {
        None => vec![GroupType::parse("A1").unwrap()],
        Some(list) => {
            let mut out = Vec::with_capacity(list.len());
            for t in list {
                out.push(GroupType::parse(t).ok_or_else(|| {
                    ScenarioError::new("params.types", format!("unknown group type '{t}'"))
                })?);
            }
            out
        }
    };

    let defaults = IntegratorOptions::default();
    let integrator = match &cfg.integrator {
        None => defaults,
        Some(ic) => IntegratorOptions {
            dt: ic.dt.unwrap_or(defaults.dt),
            t_end: ic.t_end.unwrap_or(defaults.t_end),
            project_every: ic.project_every.unwrap_or(defaults.project_every),
            tol: ic.tol.unwrap_or(defaults.tol),
        },
    };
    integrator
        .validate()
        .map_err(|e| ScenarioError::new("integrator", format!("{e}")))?;

    let mut seed = cfg.seed.unwrap_or(0);
    if let Ok(env_seed) = std::env::var("SPINHIGGS_SEED") {
        seed = env_seed
            .parse()
            .map_err(|_| ScenarioError::new("SPINHIGGS_SEED", "must be an unsigned integer"))?;
    }

    // action-specific requirements
    match action {
        Action::Simulate => {
            if model == ModelKind::Top && curve.is_none() && params.j.is_none() {
                return Err(ScenarioError::new(
                    "params.j",
                    "top simulation needs explicit inertia or a curve",
                ));
            }
            if model == ModelKind::Cm && variant == CmVariant::V && curve.is_none() {
                return Err(ScenarioError::new(
                    "curve",
                    "elliptic CM variant requires a curve",
                ));
            }
            if model == ModelKind::Gaudin && marks.len() < 2 {
                return Err(ScenarioError::new(
                    "params.marks",
                    "gaudin simulation needs at least two marked points",
                ));
            }
        }
        Action::Spectrum => {
            if j.is_none() && !params.j_from_curve.unwrap_or(false) {
                return Err(ScenarioError::new(
                    "params.j",
                    "spectrum needs inertia coefficients",
                ));
            }
        }
        Action::Dims | Action::Check => {}
    }

    Ok(Scenario {
        action,
        model,
        class,
        curve,
        j,
        j_from_curve: params.j_from_curve.unwrap_or(false),
        variant,
        marks,
        site: params.site.unwrap_or(0),
        hamiltonian,
        two_l,
        group_types,
        genus: params.genus.unwrap_or(1),
        marked: params.marked.unwrap_or(1),
        initial: cfg.initial,
        integrator,
        seed,
        outputs: cfg.outputs.unwrap_or_default(),
    })
}
