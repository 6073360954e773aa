//! Time integration with constraint projection, plus the numerical
//! auditors: conservation reports, bracket-commutativity scans, and Lax
//! isospectrality checks.
//!
//! The integrator is classical RK4. The model fields are exactly tangent
//! to the constraints analytically, so the optional projection only
//! corrects discretization drift. Scan points and random initial states
//! are drawn through the seeded generator in [`crate::rng`], so every
//! report is reproducible bit-for-bit for a fixed seed.

use alloc::boxed::Box;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::elliptic::EllipticCurve;
use crate::models::{
    cm_lax, cm_vector_field, gaudin_lax, gaudin_vector_field, top_lax, top_vector_field,
    CmState, CmVariant, GaudinHamKind, GaudinState, LaxSample, ModelError, TopParams,
};
use crate::rng::Rng;
use crate::symplectic::{
    collective_spin, constraints, conjugate_partner_iii, conjugate_partner_iv, dirac_bracket,
    project_onshell, reality_residual, Observable, PhasePoint, RealityClass, SymplecticError,
};
use crate::{cx, Complex};

#[derive(Debug, Clone, PartialEq)]
pub enum FlowError {
    Model(ModelError),
    BadOptions(&'static str),
    /// Initial state violates the constraints beyond `tol`.
    BadInitialState(f64),
}

impl fmt::Display for FlowError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FlowError::Model(e) => write!(f, "{e}"),
            FlowError::BadOptions(msg) => write!(f, "invalid integrator options: {msg}"),
            FlowError::BadInitialState(c) => {
                write!(f, "initial state off-shell by {c:.3e}")
            }
        }
    }
}

impl core::error::Error for FlowError {}

impl From<ModelError> for FlowError {
    fn from(e: ModelError) -> Self {
        FlowError::Model(e)
    }
}

impl From<SymplecticError> for FlowError {
    fn from(e: SymplecticError) -> Self {
        FlowError::Model(ModelError::Symplectic(e))
    }
}

/// Step size, horizon, projection cadence (0 = never) and constraint
/// tolerance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorOptions {
    pub dt: f64,
    pub t_end: f64,
    pub project_every: usize,
    pub tol: f64,
}

impl Default for IntegratorOptions {
    fn default() -> Self {
        IntegratorOptions {
            dt: 1e-3,
            t_end: 10.0,
            project_every: 10,
            tol: 1e-10,
        }
    }
}

impl IntegratorOptions {
    pub fn validate(&self) -> Result<(), FlowError> {
        if !(self.dt > 0.0) || !(self.t_end > 0.0) || self.dt > self.t_end {
            return Err(FlowError::BadOptions("need 0 < dt <= t_end"));
        }
        if !(self.tol > 0.0 && self.tol <= 1e-4) {
            return Err(FlowError::BadOptions("tol must lie in (0, 1e-4]"));
        }
        Ok(())
    }
}

/// Full state of whichever model is being integrated.
#[derive(Debug, Clone, PartialEq)]
pub enum SystemState {
    Top(PhasePoint),
    Cm(CmState),
    Gaudin(GaudinState),
}

impl SystemState {
    /// Flat coordinate vector (ordering fixed per model; see `unpack`).
    pub fn pack(&self) -> Vec<Complex> {
        match self {
            SystemState::Top(pt) => pt.coords().to_vec(),
            SystemState::Cm(s) => {
                let mut v = Vec::with_capacity(8);
                v.push(s.v);
                v.push(s.u);
                v.extend_from_slice(&s.spin.coords());
                v
            }
            SystemState::Gaudin(g) => {
                let mut v = Vec::with_capacity(6 * g.n_sites());
                for site in &g.sites {
                    v.extend_from_slice(&site.coords());
                }
                v
            }
        }
    }

    /// Rebuild a state of the same shape from a flat vector.
    pub fn unpack(&self, data: &[Complex]) -> SystemState {
        match self {
            SystemState::Top(pt) => {
                let mut c = [cx(0.0, 0.0); 6];
                c.copy_from_slice(data);
                SystemState::Top(PhasePoint::from_coords(pt.class, c))
            }
            SystemState::Cm(s) => {
                let mut c = [cx(0.0, 0.0); 6];
                c.copy_from_slice(&data[2..8]);
                SystemState::Cm(CmState::new(
                    data[0],
                    data[1],
                    PhasePoint::from_coords(s.spin.class, c),
                ))
            }
            SystemState::Gaudin(g) => {
                let mut sites = Vec::with_capacity(g.n_sites());
                for (k, site) in g.sites.iter().enumerate() {
                    let mut c = [cx(0.0, 0.0); 6];
                    c.copy_from_slice(&data[6 * k..6 * k + 6]);
                    sites.push(PhasePoint::from_coords(site.class, c));
                }
                SystemState::Gaudin(GaudinState {
                    sites,
                    marks: g.marks.clone(),
                    class: g.class,
                })
            }
        }
    }

    /// Max constraint violation across the state's sites.
    pub fn constraint_norm(&self) -> f64 {
        match self {
            SystemState::Top(pt) => {
                let (c1, c2) = constraints(pt);
                c1.norm().max(c2.norm())
            }
            SystemState::Cm(s) => {
                let (c1, c2) = constraints(&s.spin);
                c1.norm().max(c2.norm())
            }
            SystemState::Gaudin(g) => g.constraint_norm(),
        }
    }

    /// Constraint values, maxed componentwise across sites.
    pub fn constraint_abs(&self) -> (f64, f64) {
        match self {
            SystemState::Top(pt) => {
                let (c1, c2) = constraints(pt);
                (c1.norm(), c2.norm())
            }
            SystemState::Cm(s) => {
                let (c1, c2) = constraints(&s.spin);
                (c1.norm(), c2.norm())
            }
            SystemState::Gaudin(g) => {
                let mut m1 = 0.0_f64;
                let mut m2 = 0.0_f64;
                for site in &g.sites {
                    let (c1, c2) = constraints(site);
                    m1 = m1.max(c1.norm());
                    m2 = m2.max(c2.norm());
                }
                (m1, m2)
            }
        }
    }

    /// Deviation from the reality pattern of the state's class.
    pub fn reality_residual(&self) -> f64 {
        match self {
            SystemState::Top(pt) => reality_residual(pt),
            SystemState::Cm(s) => {
                let mut m = reality_residual(&s.spin);
                if s.spin.class != RealityClass::ComplexV {
                    m = m.max(s.v.im.abs()).max(s.u.im.abs());
                }
                m
            }
            SystemState::Gaudin(g) => crate::models::gaudin_reality_residual(g)
                .unwrap_or(f64::INFINITY),
        }
    }

    /// Projects every site back to the constraint surface.
    pub fn project(&self, tol: f64) -> Result<SystemState, SymplecticError> {
        Ok(match self {
            SystemState::Top(pt) => SystemState::Top(project_onshell(pt, tol)?),
            SystemState::Cm(s) => {
                let spin = project_onshell(&s.spin, tol)?;
                SystemState::Cm(CmState::new(s.v, s.u, spin))
            }
            SystemState::Gaudin(g) => {
                let mut sites = Vec::with_capacity(g.n_sites());
                for site in &g.sites {
                    sites.push(project_onshell(site, tol)?);
                }
                SystemState::Gaudin(GaudinState {
                    sites,
                    marks: g.marks.clone(),
                    class: g.class,
                })
            }
        })
    }
}

/// Which model (and parameters) generates the flow.
#[derive(Debug, Clone)]
pub enum ModelSpec {
    Top {
        params: TopParams,
        /// Needed only for Lax evaluations.
        curve: Option<EllipticCurve>,
    },
    Cm {
        variant: CmVariant,
        curve: Option<EllipticCurve>,
    },
    Gaudin {
        site: usize,
        which: GaudinHamKind,
    },
}

impl ModelSpec {
    /// Model vector field as a flat rate vector aligned with
    /// [`SystemState::pack`].
    pub fn rhs(&self, state: &SystemState) -> Result<Vec<Complex>, ModelError> {
        match (self, state) {
            (ModelSpec::Top { params, .. }, SystemState::Top(pt)) => {
                Ok(top_vector_field(pt, params)?.to_vec())
            }
            (ModelSpec::Cm { variant, curve }, SystemState::Cm(s)) => {
                let t = cm_vector_field(s, curve.as_ref(), *variant)?;
                let mut v = Vec::with_capacity(8);
                v.push(t.v_dot);
                v.push(t.u_dot);
                v.extend_from_slice(&t.spin_dot);
                Ok(v)
            }
            (ModelSpec::Gaudin { site, which }, SystemState::Gaudin(g)) => {
                let rates = gaudin_vector_field(g, *site, *which)?;
                let mut v = Vec::with_capacity(6 * rates.len());
                for r in rates {
                    v.extend_from_slice(&r);
                }
                Ok(v)
            }
            _ => Err(ModelError::BadState("state does not match model spec")),
        }
    }

    /// Lax matrix of the model at a spectral point.
    pub fn lax(&self, state: &SystemState, z: Complex) -> Result<LaxSample, ModelError> {
        match (self, state) {
            (ModelSpec::Top { curve, .. }, SystemState::Top(pt)) => {
                let curve = curve
                    .as_ref()
                    .ok_or(ModelError::BadState("top Lax requires a curve"))?;
                top_lax(&collective_spin(pt), z, curve)
            }
            (ModelSpec::Cm { curve, .. }, SystemState::Cm(s)) => {
                let curve = curve
                    .as_ref()
                    .ok_or(ModelError::BadState("CM Lax requires a curve"))?;
                cm_lax(s, z, curve)
            }
            (ModelSpec::Gaudin { .. }, SystemState::Gaudin(g)) => gaudin_lax(g, z),
            _ => Err(ModelError::BadState("state does not match model spec")),
        }
    }
}

/// A named scalar to track along a trajectory.
pub struct AuditObservable {
    pub name: String,
    pub func: Box<dyn Fn(&SystemState) -> Complex>,
}

impl AuditObservable {
    pub fn new(name: &str, func: Box<dyn Fn(&SystemState) -> Complex>) -> Self {
        AuditObservable {
            name: String::from(name),
            func,
        }
    }
}

/// Per-step audit record.
#[derive(Debug, Clone, PartialEq)]
pub struct AuditRecord {
    pub c1_abs: f64,
    pub c2_abs: f64,
    pub reality_residual: f64,
    pub observables: Vec<Complex>,
}

/// Integration output: strictly increasing times, matching states, and the
/// per-step audit.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<SystemState>,
    pub observable_names: Vec<String>,
    pub audit: Vec<AuditRecord>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last_state(&self) -> &SystemState {
        self.states.last().expect("non-empty trajectory")
    }
}

/// Classical RK4 with optional post-step projection every `project_every`
/// steps. The audit (constraints, reality, observables) is filled at every
/// step including t = 0.
pub fn integrate(
    spec: &ModelSpec,
    initial: &SystemState,
    opts: &IntegratorOptions,
    observables: &[AuditObservable],
) -> Result<Trajectory, FlowError> {
    opts.validate()?;
    if initial.constraint_norm() > opts.tol.max(1e-8) {
        return Err(FlowError::BadInitialState(initial.constraint_norm()));
    }
    let n_steps = libm_round(opts.t_end / opts.dt) as usize;
    let mut times = Vec::with_capacity(n_steps + 1);
    let mut states = Vec::with_capacity(n_steps + 1);
    let mut audit = Vec::with_capacity(n_steps + 1);

    let record = |state: &SystemState, audit: &mut Vec<AuditRecord>| {
        let (c1, c2) = state.constraint_abs();
        audit.push(AuditRecord {
            c1_abs: c1,
            c2_abs: c2,
            reality_residual: state.reality_residual(),
            observables: observables.iter().map(|o| (o.func)(state)).collect(),
        });
    };

    let mut current = initial.clone();
    times.push(0.0);
    record(&current, &mut audit);
    states.push(current.clone());

    for step in 1..=n_steps {
        let y = current.pack();
        let k1 = spec.rhs(&current)?;
        let y2 = axpy(&y, &k1, opts.dt / 2.0);
        let k2 = spec.rhs(&current.unpack(&y2))?;
        let y3 = axpy(&y, &k2, opts.dt / 2.0);
        let k3 = spec.rhs(&current.unpack(&y3))?;
        let y4 = axpy(&y, &k3, opts.dt);
        let k4 = spec.rhs(&current.unpack(&y4))?;
        let mut next = y;
        for i in 0..next.len() {
            next[i] += (k1[i] + k2[i] * 2.0 + k3[i] * 2.0 + k4[i]) * (opts.dt / 6.0);
        }
        current = current.unpack(&next);
        if opts.project_every > 0 && step % opts.project_every == 0 {
            current = current.project(opts.tol)?;
        }
        times.push(step as f64 * opts.dt);
        record(&current, &mut audit);
        states.push(current.clone());
    }

    Ok(Trajectory {
        times,
        states,
        observable_names: observables.iter().map(|o| o.name.clone()).collect(),
        audit,
    })
}

fn libm_round(x: f64) -> f64 {
    num_traits::Float::round(x)
}

fn axpy(y: &[Complex], k: &[Complex], a: f64) -> Vec<Complex> {
    y.iter().zip(k.iter()).map(|(yi, ki)| yi + ki * a).collect()
}

/// Drift summary of one audited observable.
#[derive(Debug, Clone, PartialEq)]
pub struct DriftEntry {
    pub name: String,
    pub initial: Complex,
    pub max_abs_drift: f64,
    pub max_rel_drift: f64,
}

/// Max absolute and relative drift of every audited observable.
pub fn conservation_report(traj: &Trajectory) -> Vec<DriftEntry> {
    let mut entries = Vec::new();
    for (k, name) in traj.observable_names.iter().enumerate() {
        let initial = traj.audit[0].observables[k];
        let mut max_abs: f64 = 0.0;
        for rec in &traj.audit {
            max_abs = max_abs.max((rec.observables[k] - initial).norm());
        }
        let scale = initial.norm().max(1e-300);
        entries.push(DriftEntry {
            name: name.clone(),
            initial,
            max_abs_drift: max_abs,
            max_rel_drift: max_abs / scale,
        });
    }
    entries
}

/// Max |{f, g}_D| over seeded random on-shell points of a reality class.
pub fn commutativity_scan<F, G>(
    f: &F,
    g: &G,
    class: RealityClass,
    n_points: usize,
    seed: u64,
) -> Result<f64, SymplecticError>
where
    F: Observable + ?Sized,
    G: Observable + ?Sized,
{
    let mut rng = Rng::new(seed);
    let mut max = 0.0_f64;
    for _ in 0..n_points {
        let pt = sample_onshell(class, &mut rng);
        let b = dirac_bracket(f, g, &pt)?;
        max = max.max(b.norm());
    }
    Ok(max)
}

/// Max |{f, g}| over seeded random Gaudin states (canonical bracket over
/// all site coordinates, central finite differences).
pub fn gaudin_commutativity_scan<F, G>(
    f: &F,
    g: &G,
    marks: &[Complex],
    class: RealityClass,
    n_points: usize,
    seed: u64,
) -> f64
where
    F: Fn(&GaudinState) -> Complex,
    G: Fn(&GaudinState) -> Complex,
{
    let mut rng = Rng::new(seed);
    let mut max = 0.0_f64;
    for _ in 0..n_points {
        let state = sample_gaudin_state(marks.len(), marks, class, &mut rng);
        max = max.max(gaudin_canonical_bracket(f, g, &state).norm());
    }
    max
}

/// Canonical bracket of two chain observables by central differences at
/// step [`crate::symplectic::FD_STEP`].
pub fn gaudin_canonical_bracket<F, G>(f: &F, g: &G, state: &GaudinState) -> Complex
where
    F: Fn(&GaudinState) -> Complex,
    G: Fn(&GaudinState) -> Complex,
{
    let n = state.n_sites();
    let h = crate::symplectic::FD_STEP;
    let diff = |func: &dyn Fn(&GaudinState) -> Complex, a: usize, k: usize| {
        let mut hi = state.clone();
        let mut lo = state.clone();
        let mut chi = hi.sites[a].coords();
        let mut clo = lo.sites[a].coords();
        chi[k] += h;
        clo[k] -= h;
        hi.sites[a] = PhasePoint::from_coords(state.sites[a].class, chi);
        lo.sites[a] = PhasePoint::from_coords(state.sites[a].class, clo);
        (func(&hi) - func(&lo)) / (2.0 * h)
    };
    let mut sum = cx(0.0, 0.0);
    for a in 0..n {
        for k in 0..3 {
            sum += diff(f, a, k) * diff(g, a, k + 3) - diff(f, a, k + 3) * diff(g, a, k);
        }
    }
    sum
}

/// Spectral drift of tr L²(z) and det L(z) along a trajectory at one
/// sample point.
#[derive(Debug, Clone, PartialEq)]
pub struct IsospectralEntry {
    pub z: Complex,
    pub tr_sq_rel_drift: f64,
    pub det_rel_drift: f64,
}

/// Isospectrality audit: for each z, the relative drift of the spectral
/// invariants along the trajectory.
pub fn isospectral_check(
    spec: &ModelSpec,
    traj: &Trajectory,
    z_samples: &[Complex],
) -> Result<Vec<IsospectralEntry>, ModelError> {
    let mut out = Vec::with_capacity(z_samples.len());
    for &z in z_samples {
        let first = spec.lax(&traj.states[0], z)?;
        let tr0 = first.half_trace_sq();
        let det0 = first.det();
        let mut tr_drift = 0.0_f64;
        let mut det_drift = 0.0_f64;
        for state in traj.states.iter().skip(1) {
            let sample = spec.lax(state, z)?;
            tr_drift = tr_drift.max((sample.half_trace_sq() - tr0).norm());
            det_drift = det_drift.max((sample.det() - det0).norm());
        }
        out.push(IsospectralEntry {
            z,
            tr_sq_rel_drift: tr_drift / tr0.norm().max(1e-300),
            det_rel_drift: det_drift / det0.norm().max(1e-300),
        });
    }
    Ok(out)
}

/// Least-squares slope of log(y) against log(x): the observed convergence
/// order of an integrator across step sizes.
pub fn fit_log_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let lx: Vec<f64> = xs.iter().map(|x| num_traits::Float::ln(*x)).collect();
    let ly: Vec<f64> = ys.iter().map(|y| num_traits::Float::ln(*y)).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let mut num = 0.0;
    let mut den = 0.0;
    for (x, y) in lx.iter().zip(ly.iter()) {
        num += (x - mx) * (y - my);
        den += (x - mx) * (x - mx);
    }
    num / den
}

/// Random on-shell phase point of a reality class: q uniform on the
/// class's c₁-surface (sphere for III, hyperboloid patch |s| ≤ 2 for IV,
/// complexified for the complex class), p in a ball of radius 2 with the
/// c₂ component projected out, then Newton-polished.
pub fn sample_onshell(class: RealityClass, rng: &mut Rng) -> PhasePoint {
    sample_onshell_scaled(class, rng, 2.0, 2.0)
}

/// Tamer variant for trajectory initial data: hyperboloid patch |s| ≤ 1 and
/// p-ball radius 0.7 keep the flow speed small enough that RK4 at the
/// default step resolves it to the audited tolerances.
pub fn sample_onshell_moderate(class: RealityClass, rng: &mut Rng) -> PhasePoint {
    sample_onshell_scaled(class, rng, 1.0, 0.7)
}

fn sample_onshell_scaled(
    class: RealityClass,
    rng: &mut Rng,
    patch: f64,
    p_radius: f64,
) -> PhasePoint {
    let r2 = p_radius * p_radius;
    let (q, p) = match class {
        RealityClass::ComplexV => {
            let zeta = rng.complex_box(-0.35 * patch, 0.35 * patch);
            let omega = rng.complex_box(-0.7, 0.7);
            let q = [
                zeta.cosh(),
                zeta.sinh() * omega.cos(),
                zeta.sinh() * omega.sin(),
            ];
            let p = loop {
                let p = [
                    rng.complex_box(-p_radius, p_radius),
                    rng.complex_box(-p_radius, p_radius),
                    rng.complex_box(-p_radius, p_radius),
                ];
                if p.iter().map(|v| v.norm_sqr()).sum::<f64>() <= r2 {
                    break p;
                }
            };
            (q, p)
        }
        RealityClass::TypeIII => {
            let s = rng.on_sphere();
            let q = [cx(s[0], 0.0), cx(0.0, s[1]), cx(0.0, s[2])];
            let p = loop {
                let v = [
                    rng.range(-p_radius, p_radius),
                    rng.range(-p_radius, p_radius),
                    rng.range(-p_radius, p_radius),
                ];
                if v.iter().map(|x| x * x).sum::<f64>() <= r2 {
                    break [cx(v[0], 0.0), cx(0.0, v[1]), cx(0.0, v[2])];
                }
            };
            (q, p)
        }
        RealityClass::TypeIV => {
            let s = rng.range(-patch, patch);
            let phi = rng.range(0.0, core::f64::consts::TAU);
            let (sh, ch) = (num_traits::Float::sinh(s), num_traits::Float::cosh(s));
            let q = [
                cx(ch, 0.0),
                cx(sh * num_traits::Float::cos(phi), 0.0),
                cx(sh * num_traits::Float::sin(phi), 0.0),
            ];
            let p = loop {
                let v = [
                    rng.range(-p_radius, p_radius),
                    rng.range(-p_radius, p_radius),
                    rng.range(-p_radius, p_radius),
                ];
                if v.iter().map(|x| x * x).sum::<f64>() <= r2 {
                    break [cx(v[0], 0.0), cx(v[1], 0.0), cx(v[2], 0.0)];
                }
            };
            (q, p)
        }
    };
    // project out c₂ along q̃ = (q₀, −q₁, −q₃): q·q̃ = 1 + c₁ = 1 on the
    // parametrized surface, so the correction never degenerates
    let mut p = p;
    let q_tilde = [q[0], -q[1], -q[2]];
    let pairing = q[0] * q_tilde[0] + q[1] * q_tilde[1] + q[2] * q_tilde[2];
    let qp = q[0] * p[0] + q[1] * p[1] + q[2] * p[2];
    for k in 0..3 {
        p[k] -= qp / pairing * q_tilde[k];
    }
    let pt = PhasePoint::new(class, p, q);
    project_onshell(&pt, 1e-13).expect("sampler produces projectable points")
}

/// Random CM state: an on-shell spin with the additional X₃ = 0 moment
/// projected out, plus (v, u) drawn away from the potential poles. The
/// spin amplitude is kept small: the internal (p, q) motion grows
/// exponentially at a rate set by |X|·|℘(2u)|, and a small coupling keeps
/// multi-second trajectories resolvable.
pub fn sample_cm_state(class: RealityClass, rng: &mut Rng) -> CmState {
    let mut spin = sample_onshell_scaled(class, rng, 0.8, 0.25);
    // kill X₃ along w = (q₃, 0, q₀) — which leaves c₂ = q·p... not quite
    // invariant — then restore c₂ along q̃, which does not touch X₃ at all
    // (q₀q̃₃ + q₃q̃₀ = 0). A couple of sweeps settle both to rounding.
    for _ in 0..4 {
        let (q0, q1, q3) = (spin.q0, spin.q1, spin.q3);
        let x3 = collective_spin(&spin).x3;
        let w_pair = q0 * q0 + q3 * q3;
        if w_pair.norm() < 1e-10 {
            spin = sample_onshell_scaled(class, rng, 0.8, 0.25);
            continue;
        }
        let gamma = -x3 / w_pair;
        spin.p0 += gamma * q3;
        spin.p3 += gamma * q0;
        let (c1, c2) = constraints(&spin);
        let beta = -c2 / (c1 + 1.0);
        spin.p0 += beta * q0;
        spin.p1 -= beta * q1;
        spin.p3 -= beta * q3;
        if collective_spin(&spin).x3.norm() < 1e-12 && constraints(&spin).1.norm() < 1e-12 {
            break;
        }
    }
    let spin = project_onshell(&spin, 1e-13).expect("CM spin projectable");
    // keep 2u well inside the cell, away from the potential poles
    let (v, u) = match class {
        RealityClass::ComplexV => (
            rng.complex_box(-0.5, 0.5),
            cx(rng.range(0.2, 0.3), rng.range(-0.08, 0.08)),
        ),
        _ => (
            cx(rng.range(-0.5, 0.5), 0.0),
            cx(rng.range(0.2, 0.3), 0.0),
        ),
    };
    CmState::new(v, u, spin)
}

/// Random Gaudin state over given marks: real marks carry sites in the
/// chain's class, conjugate mark pairs carry a free site plus its
/// conjugate partner.
pub fn sample_gaudin_state(
    n: usize,
    marks: &[Complex],
    class: RealityClass,
    rng: &mut Rng,
) -> GaudinState {
    assert_eq!(n, marks.len());
    let mut sites = Vec::with_capacity(n);
    if class == RealityClass::ComplexV {
        for _ in 0..n {
            sites.push(sample_onshell(class, rng));
        }
    } else {
        let mut k = 0;
        while k < n {
            if marks[k].im.abs() < crate::models::MARK_SEPARATION {
                sites.push(sample_onshell(class, rng));
                k += 1;
            } else {
                assert!(
                    k + 1 < n && (marks[k + 1] - marks[k].conj()).norm() < 1e-12,
                    "complex marks must come in consecutive conjugate pairs"
                );
                let free = sample_onshell(RealityClass::ComplexV, rng);
                let partner = match class {
                    RealityClass::TypeIII => conjugate_partner_iii(&free),
                    _ => conjugate_partner_iv(&free),
                };
                sites.push(free);
                sites.push(partner);
                k += 2;
            }
        }
    }
    GaudinState::new(sites, marks.to_vec(), class).expect("valid sampled chain")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symplectic::{casimir, CasimirObs, SpinComponent};
    use crate::models::{top_energy, TopEnergyObs};

    fn c(re: f64) -> Complex {
        cx(re, 0.0)
    }

    fn top_spec(j1: f64, j2: f64, j3: f64) -> ModelSpec {
        ModelSpec::Top {
            params: TopParams::new(c(j1), c(j2), c(j3)),
            curve: None,
        }
    }

    #[test]
    fn samplers_land_on_shell() {
        let mut rng = Rng::new(401);
        for class in [
            RealityClass::ComplexV,
            RealityClass::TypeIII,
            RealityClass::TypeIV,
        ] {
            for _ in 0..50 {
                let pt = sample_onshell(class, &mut rng);
                assert!(crate::symplectic::constraint_norm(&pt) < 1e-12);
                assert!(reality_residual(&pt) < 1e-12, "class {class:?}");
            }
        }
    }

    #[test]
    fn type_iii_samples_live_on_the_unit_sphere() {
        let mut rng = Rng::new(403);
        for _ in 0..100 {
            let pt = sample_onshell(RealityClass::TypeIII, &mut rng);
            let r = pt.q0.norm_sqr() + pt.q1.norm_sqr() + pt.q3.norm_sqr();
            assert!((r - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn cm_sampler_kills_x3() {
        let mut rng = Rng::new(407);
        for class in [
            RealityClass::ComplexV,
            RealityClass::TypeIII,
            RealityClass::TypeIV,
        ] {
            for _ in 0..20 {
                let s = sample_cm_state(class, &mut rng);
                assert!(s.x3_residual() < 1e-11, "class {class:?}");
                assert!(crate::symplectic::constraint_norm(&s.spin) < 1e-12);
            }
        }
    }

    #[test]
    fn zero_inertia_top_is_static() {
        let mut rng = Rng::new(409);
        let pt = sample_onshell(RealityClass::ComplexV, &mut rng);
        let spec = top_spec(0.0, 0.0, 0.0);
        let opts = IntegratorOptions {
            dt: 1e-2,
            t_end: 1.0,
            project_every: 0,
            tol: 1e-10,
        };
        let traj = integrate(&spec, &SystemState::Top(pt), &opts, &[]).unwrap();
        let drift = traj.last_state().pack();
        let start = traj.states[0].pack();
        for (a, b) in drift.iter().zip(start.iter()) {
            assert!((a - b).norm() <= 1e-14);
        }
    }

    #[test]
    fn top_trajectory_conserves_energies_and_constraints() {
        let mut rng = Rng::new(411);
        let pt = sample_onshell_moderate(RealityClass::ComplexV, &mut rng);
        let params = TopParams::new(c(0.9), c(-0.4), c(1.6));
        let spec = ModelSpec::Top {
            params,
            curve: None,
        };
        let observables = [
            AuditObservable::new(
                "h2",
                Box::new(|s: &SystemState| match s {
                    SystemState::Top(pt) => casimir(&collective_spin(pt)) * 0.5,
                    _ => unreachable!(),
                }),
            ),
            AuditObservable::new(
                "h0",
                Box::new(move |s: &SystemState| match s {
                    SystemState::Top(pt) => top_energy(&collective_spin(pt), &params),
                    _ => unreachable!(),
                }),
            ),
        ];
        let opts = IntegratorOptions {
            dt: 1e-3,
            t_end: 10.0,
            project_every: 10,
            tol: 1e-12,
        };
        let traj = integrate(&spec, &SystemState::Top(pt), &opts, &observables).unwrap();
        let report = conservation_report(&traj);
        for entry in &report {
            assert!(
                entry.max_rel_drift <= 1e-8,
                "{}: rel drift {}",
                entry.name,
                entry.max_rel_drift
            );
        }
        for rec in &traj.audit {
            assert!(rec.c1_abs <= 1e-9 && rec.c2_abs <= 1e-9);
        }
    }

    #[test]
    fn rk4_energy_drift_shrinks_sixteen_fold() {
        let mut rng = Rng::new(413);
        let pt = sample_onshell_moderate(RealityClass::ComplexV, &mut rng);
        let params = TopParams::new(c(1.5), c(0.3), c(-0.9));
        let spec = ModelSpec::Top {
            params,
            curve: None,
        };
        let h0 = |s: &SystemState| match s {
            SystemState::Top(pt) => top_energy(&collective_spin(pt), &params),
            _ => unreachable!(),
        };
        let drift_at = |dt: f64| {
            let opts = IntegratorOptions {
                dt,
                t_end: 2.0,
                project_every: 0,
                tol: 1e-4,
            };
            let traj = integrate(&spec, &SystemState::Top(pt), &opts, &[]).unwrap();
            let initial = h0(&traj.states[0]);
            traj.states
                .iter()
                .map(|s| (h0(s) - initial).norm())
                .fold(0.0, f64::max)
        };
        let coarse = drift_at(4e-3);
        let fine = drift_at(2e-3);
        let ratio = coarse / fine;
        assert!(
            (12.0..=20.0).contains(&ratio),
            "drift ratio {ratio} (coarse {coarse:.3e}, fine {fine:.3e})"
        );
    }

    #[test]
    fn rk4_is_fourth_order() {
        let mut rng = Rng::new(417);
        let pt = sample_onshell_moderate(RealityClass::ComplexV, &mut rng);
        let spec = top_spec(1.5, 0.3, -0.9);
        let reference = {
            let opts = IntegratorOptions {
                dt: 5e-5,
                t_end: 1.0,
                project_every: 0,
                tol: 1e-4,
            };
            integrate(&spec, &SystemState::Top(pt), &opts, &[])
                .unwrap()
                .last_state()
                .pack()
        };
        let mut errors = Vec::new();
        let dts = [4e-3, 2e-3, 1e-3];
        for dt in dts {
            let opts = IntegratorOptions {
                dt,
                t_end: 1.0,
                project_every: 0,
                tol: 1e-4,
            };
            let end = integrate(&spec, &SystemState::Top(pt), &opts, &[])
                .unwrap()
                .last_state()
                .pack();
            let err: f64 = end
                .iter()
                .zip(reference.iter())
                .map(|(a, b)| (a - b).norm())
                .fold(0.0, f64::max);
            errors.push(err);
        }
        let order = fit_log_slope(&dts, &errors);
        assert!(
            (3.6..=4.4).contains(&order),
            "fitted order {order}, errors {errors:?}"
        );
    }

    #[test]
    fn projection_is_idempotent_on_projected_states() {
        let mut rng = Rng::new(419);
        let pt = sample_onshell(RealityClass::TypeIV, &mut rng);
        let state = SystemState::Top(pt);
        let once = state.project(1e-12).unwrap();
        let twice = once.project(1e-12).unwrap();
        let a = once.pack();
        let b = twice.pack();
        for (x, y) in a.iter().zip(b.iter()) {
            assert!((x - y).norm() <= 1e-13);
        }
    }

    #[test]
    fn commutativity_scan_basics() {
        // {f, f} = 0 identically
        let max = commutativity_scan(
            &SpinComponent(1),
            &SpinComponent(1),
            RealityClass::ComplexV,
            20,
            7,
        )
        .unwrap();
        assert_eq!(max, 0.0);
        // {H2, H̃0} ≈ 0: the integrability pairing
        let params = TopParams::new(c(1.1), c(0.6), c(-0.8));
        let max = commutativity_scan(
            &CasimirObs,
            &TopEnergyObs(params),
            RealityClass::ComplexV,
            200,
            7,
        )
        .unwrap();
        assert!(max <= 1e-8, "max |{{H2, H0}}| = {max}");
    }

    #[test]
    fn scan_is_reproducible_for_fixed_seed() {
        let params = TopParams::new(c(1.1), c(0.6), c(-0.8));
        let a = commutativity_scan(
            &CasimirObs,
            &TopEnergyObs(params),
            RealityClass::TypeIII,
            50,
            99,
        )
        .unwrap();
        let b = commutativity_scan(
            &CasimirObs,
            &TopEnergyObs(params),
            RealityClass::TypeIII,
            50,
            99,
        )
        .unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn isospectral_drift_small_along_top_flow() {
        let curve = EllipticCurve::new(cx(0.0, 1.0)).unwrap();
        let mut rng = Rng::new(421);
        let pt = sample_onshell_moderate(RealityClass::ComplexV, &mut rng);
        let spec = ModelSpec::Top {
            params: TopParams::from_curve(&curve).unwrap(),
            curve: Some(curve),
        };
        let opts = IntegratorOptions {
            dt: 1e-3,
            t_end: 2.0,
            project_every: 10,
            tol: 1e-12,
        };
        let traj = integrate(&spec, &SystemState::Top(pt), &opts, &[]).unwrap();
        let zs = [cx(0.31, 0.17), cx(0.13, -0.21), cx(0.42, 0.08)];
        let report = isospectral_check(&spec, &traj, &zs).unwrap();
        for entry in &report {
            assert!(
                entry.tr_sq_rel_drift <= 1e-7,
                "tr² drift {} at z {}",
                entry.tr_sq_rel_drift,
                entry.z
            );
            assert!(entry.det_rel_drift <= 1e-7);
        }
    }

    #[test]
    fn constant_state_has_zero_drift() {
        let mut rng = Rng::new(423);
        let pt = sample_onshell(RealityClass::ComplexV, &mut rng);
        let spec = top_spec(0.0, 0.0, 0.0);
        let opts = IntegratorOptions {
            dt: 1e-2,
            t_end: 0.5,
            project_every: 0,
            tol: 1e-8,
        };
        let observables = [AuditObservable::new(
            "casimir",
            Box::new(|s: &SystemState| match s {
                SystemState::Top(pt) => casimir(&collective_spin(pt)),
                _ => unreachable!(),
            }),
        )];
        let traj = integrate(&spec, &SystemState::Top(pt), &opts, &observables).unwrap();
        let report = conservation_report(&traj);
        assert_eq!(report[0].max_abs_drift, 0.0);
    }

    #[test]
    fn cm_trajectory_moves_coordinates_but_not_coupling() {
        let curve = EllipticCurve::new(cx(0.0, 1.0)).unwrap();
        let mut rng = Rng::new(427);
        let state = sample_cm_state(RealityClass::ComplexV, &mut rng);
        let spec = ModelSpec::Cm {
            variant: CmVariant::V,
            curve: Some(curve),
        };
        let coupling = |s: &SystemState| match s {
            SystemState::Cm(cm) => {
                let x = collective_spin(&cm.spin);
                x.x1 * x.x1 - x.x2 * x.x2
            }
            _ => unreachable!(),
        };
        let observables = [AuditObservable::new("coupling", Box::new(coupling))];
        // per-step projection keeps the constraint error from feeding the
        // spin components of the hyperbolically growing internal motion
        let opts = IntegratorOptions {
            dt: 1e-3,
            t_end: 5.0,
            project_every: 1,
            tol: 1e-12,
        };
        let traj = integrate(&spec, &SystemState::Cm(state), &opts, &observables).unwrap();
        let report = conservation_report(&traj);
        assert!(report[0].max_rel_drift <= 1e-8, "coupling drifted");
        // internal coordinates genuinely move
        let start = traj.states[0].pack();
        let end = traj.last_state().pack();
        let max_move = start[2..]
            .iter()
            .zip(end[2..].iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        assert!(max_move >= 1e-3, "spin coordinates moved only {max_move:.3e}");
    }

    #[test]
    fn reality_preserved_along_real_top_flows() {
        let mut rng = Rng::new(431);
        for class in [RealityClass::TypeIII, RealityClass::TypeIV] {
            let pt = sample_onshell_moderate(class, &mut rng);
            let spec = top_spec(1.2, 0.5, -0.7);
            let opts = IntegratorOptions {
                dt: 1e-3,
                t_end: 2.0,
                project_every: 10,
                tol: 1e-12,
            };
            let traj = integrate(&spec, &SystemState::Top(pt), &opts, &[]).unwrap();
            for rec in &traj.audit {
                assert!(rec.reality_residual <= 1e-9, "class {class:?}");
            }
        }
    }

    #[test]
    fn bad_options_are_rejected() {
        let mut rng = Rng::new(433);
        let pt = sample_onshell(RealityClass::ComplexV, &mut rng);
        let spec = top_spec(1.0, 1.0, 1.0);
        let opts = IntegratorOptions {
            dt: 2.0,
            t_end: 1.0,
            project_every: 0,
            tol: 1e-10,
        };
        assert!(matches!(
            integrate(&spec, &SystemState::Top(pt), &opts, &[]),
            Err(FlowError::BadOptions(_))
        ));
        let opts = IntegratorOptions {
            dt: 1e-3,
            t_end: 1.0,
            project_every: 0,
            tol: 1e-3,
        };
        assert!(matches!(
            integrate(&spec, &SystemState::Top(pt), &opts, &[]),
            Err(FlowError::BadOptions(_))
        ));
    }
}
