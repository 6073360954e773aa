//! Action dispatch: turns a validated scenario into model runs and output
//! files.

use std::fmt;
use std::path::{Path, PathBuf};

use serde::Serialize;
use spinhiggs_core::flow::{
    conservation_report, integrate, isospectral_check, sample_cm_state, sample_gaudin_state,
    sample_onshell_moderate, AuditObservable, ModelSpec, SystemState,
};
use spinhiggs_core::lie::{center_admissible, count_report, dim_report};
use spinhiggs_core::models::{
    cm_energy, gaudin_hamiltonians, quantum_top_spectrum, top_energy, CmState, GaudinHamKind,
    GaudinState, TopParams,
};
use spinhiggs_core::rng::Rng;
use spinhiggs_core::symplectic::{casimir, collective_spin, PhasePoint};
use spinhiggs_core::{cx, Complex};

use crate::checks::{run_checks, summary_lines};
use crate::outputs::{
    to_json_string, write_json, write_trajectory_csv, ConservationJson, JsonComplex, ManifestJson,
};
use crate::scenario::{
    Action, ExplicitInitial, InitialCfg, ModelKind, NumOrPair, Scenario, ScenarioError,
};

/// Dispatch failure with its process exit code.
#[derive(Debug)]
pub enum DispatchError {
    /// Exit code 1.
    Validation(ScenarioError),
    /// Exit code 2.
    Numerical(String),
    Io(std::io::Error),
}

impl fmt::Display for DispatchError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DispatchError::Validation(e) => write!(f, "validation error: {e}"),
            DispatchError::Numerical(msg) => write!(f, "numerical failure: {msg}"),
            DispatchError::Io(e) => write!(f, "io error: {e}"),
        }
    }
}

impl std::error::Error for DispatchError {}

impl DispatchError {
    pub fn exit_code(&self) -> i32 {
        match self {
            DispatchError::Validation(_) => 1,
            DispatchError::Numerical(_) => 2,
            DispatchError::Io(_) => 2,
        }
    }
}

impl From<std::io::Error> for DispatchError {
    fn from(e: std::io::Error) -> Self {
        DispatchError::Io(e)
    }
}

impl From<ScenarioError> for DispatchError {
    fn from(e: ScenarioError) -> Self {
        DispatchError::Validation(e)
    }
}

fn numerical(e: impl fmt::Display) -> DispatchError {
    DispatchError::Numerical(format!("{e}"))
}

fn out_path(out_dir: &Path, configured: &Option<String>, default: &str) -> PathBuf {
    match configured {
        Some(p) => out_dir.join(p),
        None => out_dir.join(default),
    }
}

/// Runs a validated scenario; returns the process exit code.
pub fn dispatch(s: &Scenario, out_dir: &Path) -> Result<i32, DispatchError> {
    std::fs::create_dir_all(out_dir)?;
    match s.action {
        Action::Dims => run_dims(s, out_dir),
        Action::Spectrum => run_spectrum(s, out_dir),
        Action::Check => run_check(s, out_dir),
        Action::Simulate => run_simulate(s, out_dir),
    }
}

#[derive(Serialize)]
struct DimsGroupJson {
    group: String,
    orders: Vec<u64>,
    dim_g: u64,
    dim_c: u64,
    dim_u: u64,
    dim_uc: u64,
    dim_x_i: u64,
    dim_x_ii: u64,
    dim_x_iii: u64,
    dim_x_iv: u64,
    dim_x_v: u64,
    dim_fl: u64,
    orbit_dim: u64,
    genus: u64,
    marked: u64,
    dim_bun_par: i64,
    dim_bun_0: i64,
    dim_bun_i_ii: i64,
    dim_bun_v: i64,
    dim_m_v: i64,
    dim_m_i_ii: i64,
    n_j: Vec<i64>,
    n_g: i64,
    n_g_r: i64,
    deficiency: i64,
    center: String,
    admissible_classes: Vec<String>,
}

#[derive(Serialize)]
struct DimsJson {
    genus: u64,
    marked: u64,
    groups: Vec<DimsGroupJson>,
}

fn run_dims(s: &Scenario, out_dir: &Path) -> Result<i32, DispatchError> {
    let mut groups = Vec::new();
    for gt in &s.group_types {
        let dims = dim_report(*gt).map_err(numerical)?;
        let counts = count_report(*gt, s.genus, s.marked).map_err(numerical)?;
        let center = center_admissible(*gt);
        groups.push(DimsGroupJson {
            group: gt.label(),
            orders: dims.orders.clone(),
            dim_g: dims.dim_g,
            dim_c: dims.dim_c,
            dim_u: dims.dim_u,
            dim_uc: dims.dim_uc,
            dim_x_i: dims.dim_x_i,
            dim_x_ii: dims.dim_x_ii,
            dim_x_iii: dims.dim_x_iii,
            dim_x_iv: dims.dim_x_iv,
            dim_x_v: dims.dim_x_v,
            dim_fl: dims.dim_fl,
            orbit_dim: dims.orbit_dim,
            genus: s.genus,
            marked: s.marked,
            dim_bun_par: counts.dim_bun_par,
            dim_bun_0: counts.dim_bun_0,
            dim_bun_i_ii: counts.dim_bun_i_ii,
            dim_bun_v: counts.dim_bun_v,
            dim_m_v: counts.dim_m_v,
            dim_m_i_ii: counts.dim_m_i_ii,
            n_j: counts.n_j.clone(),
            n_g: counts.n_g,
            n_g_r: counts.n_g_r,
            deficiency: counts.deficiency,
            center: format!("{}", center.center),
            admissible_classes: center.admissible,
        });
    }
    let report = DimsJson {
        genus: s.genus,
        marked: s.marked,
        groups,
    };
    let path = out_path(out_dir, &s.outputs.report_json, "dims.json");
    write_json(&path, &report)?;
    println!("{}", to_json_string(&report).trim_end());
    write_manifest(s, out_dir, None)?;
    Ok(0)
}

#[derive(Serialize)]
struct SpectrumJson {
    two_l: u32,
    l: f64,
    dim: usize,
    hermitian: bool,
    inertia: [JsonComplex; 3],
    eigenvalues: Vec<JsonComplex>,
}

fn run_spectrum(s: &Scenario, out_dir: &Path) -> Result<i32, DispatchError> {
    let params = spectrum_params(s)?;
    let spec = quantum_top_spectrum(s.two_l, &params).map_err(numerical)?;
    let report = SpectrumJson {
        two_l: s.two_l,
        l: s.two_l as f64 / 2.0,
        dim: spec.dim,
        hermitian: spec.hermitian,
        inertia: [params.j1.into(), params.j2.into(), params.j3.into()],
        eigenvalues: spec.eigenvalues.iter().map(|&z| z.into()).collect(),
    };
    let path = out_path(out_dir, &s.outputs.report_json, "spectrum.json");
    write_json(&path, &report)?;
    println!("{}", to_json_string(&report).trim_end());
    write_manifest(s, out_dir, None)?;
    Ok(0)
}

fn spectrum_params(s: &Scenario) -> Result<TopParams, DispatchError> {
    if s.j_from_curve {
        let curve = s.curve.as_ref().ok_or_else(|| {
            DispatchError::Validation(ScenarioError::new(
                "curve",
                "j_from_curve requires a curve",
            ))
        })?;
        return TopParams::from_curve(curve).map_err(numerical);
    }
    let j = s.j.ok_or_else(|| {
        DispatchError::Validation(ScenarioError::new("params.j", "missing inertia"))
    })?;
    Ok(TopParams::new(j[0], j[1], j[2]))
}

fn run_check(s: &Scenario, out_dir: &Path) -> Result<i32, DispatchError> {
    let report = run_checks(s.seed);
    for line in summary_lines(&report) {
        println!("{line}");
    }
    let path = out_path(out_dir, &s.outputs.report_json, "check_report.json");
    write_json(&path, &report)?;
    write_manifest(s, out_dir, None)?;
    if report.all_passed {
        println!("all criteria passed (seed {})", s.seed);
        Ok(0)
    } else {
        println!("FAILURES present (seed {})", s.seed);
        Ok(2)
    }
}

fn write_manifest(s: &Scenario, out_dir: &Path, dt: Option<(f64, f64)>) -> Result<(), DispatchError> {
    let action = match s.action {
        Action::Simulate => "simulate",
        Action::Dims => "dims",
        Action::Check => "check",
        Action::Spectrum => "spectrum",
    };
    let manifest = ManifestJson::new(
        action,
        s.seed,
        dt.map(|x| x.0),
        dt.map(|x| x.1),
    );
    let path = out_path(out_dir, &s.outputs.manifest_json, "manifest.json");
    write_json(&path, &manifest)?;
    Ok(())
}

fn to_complex3(v: &[NumOrPair; 3]) -> [Complex; 3] {
    [v[0].to_complex(), v[1].to_complex(), v[2].to_complex()]
}

fn site_from_cfg(
    cfg: &crate::scenario::SiteCfg,
    class: spinhiggs_core::symplectic::RealityClass,
) -> PhasePoint {
    PhasePoint::new(class, to_complex3(&cfg.p), to_complex3(&cfg.q))
}

/// Builds the initial state: explicit coordinates or `random:<seed>`.
fn initial_state(s: &Scenario) -> Result<SystemState, DispatchError> {
    let seed = match &s.initial {
        Some(InitialCfg::Random(tag)) => {
            let rest = tag.strip_prefix("random:").ok_or_else(|| {
                DispatchError::Validation(ScenarioError::new(
                    "initial",
                    "expected 'random:<seed>' or an explicit state",
                ))
            })?;
            Some(rest.parse::<u64>().map_err(|_| {
                DispatchError::Validation(ScenarioError::new("initial", "bad random seed"))
            })?)
        }
        None => Some(s.seed),
        Some(InitialCfg::Explicit(_)) => None,
    };

    let state = if let Some(seed) = seed {
        let mut rng = Rng::new(seed);
        match s.model {
            ModelKind::Top => SystemState::Top(sample_onshell_moderate(s.class, &mut rng)),
            ModelKind::Cm => SystemState::Cm(sample_cm_state(s.class, &mut rng)),
            ModelKind::Gaudin => SystemState::Gaudin(sample_gaudin_state(
                s.marks.len(),
                &s.marks,
                s.class,
                &mut rng,
            )),
        }
    } else {
        let Some(InitialCfg::Explicit(init)) = &s.initial else {
            unreachable!()
        };
        explicit_state(s, init)?
    };

    if state.constraint_norm() > 1e-8 {
        return Err(DispatchError::Validation(ScenarioError::new(
            "initial",
            format!(
                "state violates the constraints by {:.3e} (max allowed 1e-8)",
                state.constraint_norm()
            ),
        )));
    }
    Ok(state)
}

fn explicit_state(s: &Scenario, init: &ExplicitInitial) -> Result<SystemState, DispatchError> {
    let bad = |field: &str, msg: &str| {
        Err(DispatchError::Validation(ScenarioError::new(field, msg)))
    };
    match s.model {
        ModelKind::Top => match (&init.p, &init.q) {
            (Some(p), Some(q)) => Ok(SystemState::Top(PhasePoint::new(
                s.class,
                to_complex3(p),
                to_complex3(q),
            ))),
            _ => bad("initial", "top state needs p and q"),
        },
        ModelKind::Cm => match (&init.v, &init.u, &init.spin) {
            (Some(v), Some(u), Some(spin)) => Ok(SystemState::Cm(CmState::new(
                v.to_complex(),
                u.to_complex(),
                site_from_cfg(spin, s.class),
            ))),
            _ => bad("initial", "cm state needs v, u and spin"),
        },
        ModelKind::Gaudin => match &init.sites {
            Some(sites) => {
                if sites.len() != s.marks.len() {
                    return bad("initial.sites", "need one site per marked point");
                }
                let sites = sites.iter().map(|c| site_from_cfg(c, s.class)).collect();
                let state = GaudinState::new(sites, s.marks.clone(), s.class)
                    .map_err(numerical)?;
                Ok(SystemState::Gaudin(state))
            }
            None => bad("initial", "gaudin state needs sites"),
        },
    }
}

fn model_spec(s: &Scenario) -> Result<ModelSpec, DispatchError> {
    Ok(match s.model {
        ModelKind::Top => {
            let params = if let Some(j) = s.j {
                TopParams::new(j[0], j[1], j[2])
            } else {
                let curve = s.curve.as_ref().expect("validated");
                TopParams::from_curve(curve).map_err(numerical)?
            };
            ModelSpec::Top {
                params,
                curve: s.curve,
            }
        }
        ModelKind::Cm => ModelSpec::Cm {
            variant: s.variant,
            curve: s.curve,
        },
        ModelKind::Gaudin => ModelSpec::Gaudin {
            site: s.site,
            which: if s.hamiltonian == "h2" {
                GaudinHamKind::H2
            } else {
                GaudinHamKind::H1
            },
        },
    })
}

fn observables(s: &Scenario, spec: &ModelSpec) -> Vec<AuditObservable> {
    match (s.model, spec) {
        (ModelKind::Top, ModelSpec::Top { params, .. }) => {
            let params = *params;
            vec![
                AuditObservable::new(
                    "h2",
                    Box::new(|st: &SystemState| match st {
                        SystemState::Top(pt) => casimir(&collective_spin(pt)) * 0.5,
                        _ => cx(0.0, 0.0),
                    }),
                ),
                AuditObservable::new(
                    "h0",
                    Box::new(move |st: &SystemState| match st {
                        SystemState::Top(pt) => top_energy(&collective_spin(pt), &params),
                        _ => cx(0.0, 0.0),
                    }),
                ),
            ]
        }
        (ModelKind::Cm, ModelSpec::Cm { variant, curve }) => {
            let variant = *variant;
            let curve = *curve;
            vec![
                AuditObservable::new(
                    "coupling",
                    Box::new(|st: &SystemState| match st {
                        SystemState::Cm(cm) => {
                            let x = collective_spin(&cm.spin);
                            x.x1 * x.x1 - x.x2 * x.x2
                        }
                        _ => cx(0.0, 0.0),
                    }),
                ),
                AuditObservable::new(
                    "h0",
                    Box::new(move |st: &SystemState| match st {
                        SystemState::Cm(cm) => cm_energy(cm, curve.as_ref(), variant)
                            .map(|(_, h0)| h0)
                            .unwrap_or(cx(f64::NAN, 0.0)),
                        _ => cx(0.0, 0.0),
                    }),
                ),
            ]
        }
        (ModelKind::Gaudin, _) => {
            let mut obs: Vec<AuditObservable> = Vec::new();
            for a in 0..s.marks.len() {
                obs.push(AuditObservable::new(
                    &format!("h2_site{a}"),
                    Box::new(move |st: &SystemState| match st {
                        SystemState::Gaudin(g) => gaudin_hamiltonians(g)
                            .map(|(h2, _)| h2[a])
                            .unwrap_or(cx(f64::NAN, 0.0)),
                        _ => cx(0.0, 0.0),
                    }),
                ));
                obs.push(AuditObservable::new(
                    &format!("h1_site{a}"),
                    Box::new(move |st: &SystemState| match st {
                        SystemState::Gaudin(g) => gaudin_hamiltonians(g)
                            .map(|(_, h1)| h1[a])
                            .unwrap_or(cx(f64::NAN, 0.0)),
                        _ => cx(0.0, 0.0),
                    }),
                ));
            }
            // the global moment monitored under the diagonal reduction
            for (alpha, name) in [(1usize, "global_x1"), (2, "global_x2"), (3, "global_x3")] {
                obs.push(AuditObservable::new(
                    name,
                    Box::new(move |st: &SystemState| match st {
                        SystemState::Gaudin(g) => {
                            let x = g.global_spin();
                            [x.x1, x.x2, x.x3][alpha - 1]
                        }
                        _ => cx(0.0, 0.0),
                    }),
                ));
            }
            obs
        }
        _ => Vec::new(),
    }
}

fn lax_samples(s: &Scenario) -> Vec<Complex> {
    match s.model {
        ModelKind::Gaudin => {
            // keep clear of the marks
            let far = s
                .marks
                .iter()
                .map(|m| m.norm())
                .fold(0.0, f64::max);
            vec![
                cx(far + 0.9, 1.1),
                cx(far + 1.7, -0.6),
                cx(-far - 1.3, 0.8),
            ]
        }
        _ => vec![cx(0.31, 0.17), cx(0.13, -0.21), cx(0.42, 0.08)],
    }
}

fn run_simulate(s: &Scenario, out_dir: &Path) -> Result<i32, DispatchError> {
    let spec = model_spec(s)?;
    let initial = initial_state(s)?;
    let obs = observables(s, &spec);
    let traj = integrate(&spec, &initial, &s.integrator, &obs).map_err(numerical)?;

    let csv_path = out_path(out_dir, &s.outputs.trajectory_csv, "trajectory.csv");
    write_trajectory_csv(&csv_path, &traj)?;

    let drift = conservation_report(&traj);
    let iso = if matches!(spec, ModelSpec::Top { curve: None, .. })
        || matches!(spec, ModelSpec::Cm { curve: None, .. })
    {
        Vec::new()
    } else {
        isospectral_check(&spec, &traj, &lax_samples(s)).map_err(numerical)?
    };
    let report = ConservationJson {
        steps: traj.len() - 1,
        max_c1_abs: traj.audit.iter().map(|r| r.c1_abs).fold(0.0, f64::max),
        max_c2_abs: traj.audit.iter().map(|r| r.c2_abs).fold(0.0, f64::max),
        max_reality_residual: traj
            .audit
            .iter()
            .map(|r| r.reality_residual)
            .fold(0.0, f64::max),
        observables: drift.iter().map(|d| d.into()).collect(),
        isospectral: iso.iter().map(|e| e.into()).collect(),
    };
    let json_path = out_path(out_dir, &s.outputs.report_json, "conservation.json");
    write_json(&json_path, &report)?;
    println!("{}", to_json_string(&report).trim_end());
    write_manifest(s, out_dir, Some((s.integrator.dt, s.integrator.t_end)))?;
    Ok(0)
}
