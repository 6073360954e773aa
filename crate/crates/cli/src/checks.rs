//! The invariant suite behind `spinhiggs check`: every module property and
//! acceptance criterion runs through here, so CI and users exercise the
//! same code path. All sampling is seeded; the emitted report is
//! byte-identical across runs with the same seed.

use serde::Serialize;
use spinhiggs_core::elliptic::EllipticCurve;
use spinhiggs_core::flow::{
    commutativity_scan, conservation_report, fit_log_slope, gaudin_commutativity_scan, integrate,
    isospectral_check, sample_cm_state, sample_gaudin_state, sample_onshell,
    sample_onshell_moderate, AuditObservable, IntegratorOptions, ModelSpec, SystemState,
};
use spinhiggs_core::lie::{all_types_up_to, center_admissible, count_report, dim_report, GroupType};
use spinhiggs_core::models::{
    cm_energy, cm_lax, cm_twist, gaudin_hamiltonians, gaudin_lax, gaudin_vector_field,
    quantum_top_spectrum, top_energy, top_lax, CmVariant, GaudinHamKind, TopEnergyObs, TopParams,
    GAUDIN_H1_COEFF, GAUDIN_H2_COEFF, TRACE_CONST_COEFF, TRACE_WP_COEFF,
};
use spinhiggs_core::rng::Rng;
use spinhiggs_core::symplectic::{
    canonical_bracket, collective_spin, dirac_bracket, dirac_bracket_unchecked, spin_matrix,
    Constraint, Coord, Observable, PhasePoint, RealityClass, SpinComponent,
};
use spinhiggs_core::{cx, Complex};

/// One measured quantity with its gate.
#[derive(Debug, Clone, Serialize)]
pub struct CheckItem {
    pub label: String,
    pub value: f64,
    pub threshold: f64,
    /// "<=" for residual bounds, ">=" for quantities that must stay large.
    pub cmp: &'static str,
    pub passed: bool,
}

impl CheckItem {
    fn le(label: impl Into<String>, value: f64, threshold: f64) -> Self {
        CheckItem {
            label: label.into(),
            value,
            threshold,
            cmp: "<=",
            passed: value <= threshold,
        }
    }

    fn ge(label: impl Into<String>, value: f64, threshold: f64) -> Self {
        CheckItem {
            label: label.into(),
            value,
            threshold,
            cmp: ">=",
            passed: value >= threshold,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CriterionResult {
    pub id: u32,
    pub name: String,
    pub passed: bool,
    pub items: Vec<CheckItem>,
}

impl CriterionResult {
    fn new(id: u32, name: &str, items: Vec<CheckItem>) -> Self {
        CriterionResult {
            id,
            name: name.to_string(),
            passed: items.iter().all(|i| i.passed),
            items,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckReport {
    pub version: &'static str,
    pub seed: u64,
    pub all_passed: bool,
    pub criteria: Vec<CriterionResult>,
}

/// Runs the full suite at a seed.
pub fn run_checks(seed: u64) -> CheckReport {
    let criteria = vec![
        c1_dimension_ledger(),
        c2_elliptic_identities(seed),
        c3_bracket_algebra(seed),
        c4_top_integrability(seed),
        c5_top_lax(seed),
        c6_cm_extension(seed),
        c7_gaudin(seed),
        c8_reality(seed),
        c9_quantum_top(),
    ];
    CheckReport {
        version: env!("CARGO_PKG_VERSION"),
        seed,
        all_passed: criteria.iter().all(|c| c.passed),
        criteria,
    }
}

fn c(re: f64) -> Complex {
    cx(re, 0.0)
}

/// Criterion 1: the integer dimension/count ledger, exact.
pub fn c1_dimension_ledger() -> CriterionResult {
    let mut items = Vec::new();
    let a1 = GroupType::parse("A1").unwrap();

    let dims = dim_report(a1).unwrap();
    items.push(CheckItem::le(
        "dim X_V(SL2) == 2",
        (dims.dim_x_v as f64 - 2.0).abs(),
        0.0,
    ));

    let counts = count_report(a1, 1, 1).unwrap();
    items.push(CheckItem::le(
        "dim M_V(torus, one mark) == 4",
        (counts.dim_m_v - 4).unsigned_abs() as f64,
        0.0,
    ));

    for n in [2u64, 3, 4] {
        let counts = count_report(a1, 0, n).unwrap();
        let want = 2 * (2 * n as i64 - 3);
        items.push(CheckItem::le(
            format!("dim M_V(sphere, {n} marks) == 2(2n-3)"),
            (counts.dim_m_v - want).unsigned_abs() as f64,
            0.0,
        ));
    }

    // identity sweep over every type: dimension and count formulas must
    // close exactly (the constructors already self-verify; count failures)
    let mut violations = 0u64;
    for gt in all_types_up_to(9) {
        let l = gt.rank() as i64;
        match dim_report(gt) {
            Ok(d) => {
                if d.dim_x_v != d.dim_fl + l as u64
                    || 2 * d.dim_x_iii != d.dim_x_i + l as u64
                    || d.dim_g != d.dim_c
                {
                    violations += 1;
                }
            }
            Err(_) => violations += 1,
        }
        for genus in [0u64, 1, 2, 3] {
            for marks in [0u64, 1, 3] {
                match count_report(gt, genus, marks) {
                    Ok(r) => {
                        let sum_d: i64 = r.n_j.len() as i64; // rank
                        debug_assert_eq!(sum_d, l);
                        if r.dim_m_v != 2 * r.dim_bun_v
                            || r.dim_m_i_ii - 2 * r.n_g_r != 2 * r.deficiency
                        {
                            violations += 1;
                        }
                        if marks == 0 && genus >= 2 && 2 * r.n_g != r.dim_m_v {
                            violations += 1;
                        }
                    }
                    Err(_) => violations += 1,
                }
            }
        }
        // the admissibility ledger must exist for every type
        let _ = center_admissible(gt);
    }
    items.push(CheckItem::le(
        "identity sweep violations over all types",
        violations as f64,
        0.0,
    ));

    CriterionResult::new(1, "dimension ledger", items)
}

/// Criterion 2: elliptic identities at 100 random points per curve.
pub fn c2_elliptic_identities(seed: u64) -> CriterionResult {
    let mut items = Vec::new();
    let taus = [cx(0.0, 1.0), cx(0.2, 0.8), cx(0.5, 1.3)];
    for tau in taus {
        let curve = EllipticCurve::new(tau).unwrap();
        let mut rng = Rng::new(seed ^ 0xe111);
        let mut qp1 = 0.0_f64;
        let mut qptau = 0.0_f64;
        let mut residue = 0.0_f64;
        let mut wp_rel = 0.0_f64;
        let mut phi_sq = 0.0_f64;
        let e = curve.half_period_wp().unwrap();
        for _ in 0..100 {
            let u = rng.complex_box(0.08, 0.42);
            let z = rng.complex_box(0.08, 0.42);
            let base = curve.kronecker_phi(u, z).unwrap();
            // quasi-periodicities
            let p1 = curve.kronecker_phi(u, z + 1.0).unwrap();
            qp1 = qp1.max((p1 - base).norm() / base.norm());
            let ptau = curve.kronecker_phi(u, z + tau).unwrap();
            let factor = (cx(0.0, -2.0 * core::f64::consts::PI) * u).exp();
            qptau = qptau.max((ptau - factor * base).norm() / (factor * base).norm());
            // simple pole: contour residue at 0 equals 1
            let mut res = cx(0.0, 0.0);
            let m = 32;
            for k in 0..m {
                let ang = core::f64::consts::TAU * k as f64 / m as f64;
                let zk = cx(0.05 * ang.cos(), 0.05 * ang.sin());
                res += curve.kronecker_phi(u, zk).unwrap() * zk;
            }
            res /= m as f64;
            residue = residue.max((res - 1.0).norm());
            // ℘ factorization
            let lhs = base * curve.kronecker_phi(-u, z).unwrap();
            let rhs = curve.wp(z).unwrap() - curve.wp(u).unwrap();
            wp_rel = wp_rel.max((lhs - rhs).norm() / rhs.norm().max(1.0));
            // ϕ_α² = ℘ − ℘(ω_α)
            let wp_z = curve.wp(z).unwrap();
            for (alpha, ea) in [(1usize, e.e1), (2, e.e2), (3, e.e3)] {
                let v = curve.phi_alpha(alpha, z).unwrap();
                let rhs = wp_z - ea;
                phi_sq = phi_sq.max((v * v - rhs).norm() / rhs.norm().max(1.0));
            }
        }
        let tag = format!("tau={:.1}+{:.1}i", tau.re, tau.im);
        items.push(CheckItem::le(format!("{tag}: phi 1-periodicity"), qp1, 1e-9));
        items.push(CheckItem::le(
            format!("{tag}: phi tau-quasi-periodicity"),
            qptau,
            1e-9,
        ));
        items.push(CheckItem::le(
            format!("{tag}: phi residue at 0"),
            residue,
            1e-9,
        ));
        items.push(CheckItem::le(
            format!("{tag}: phi(u)phi(-u) = wp(z)-wp(u)"),
            wp_rel,
            1e-9,
        ));
        items.push(CheckItem::le(
            format!("{tag}: phi_alpha^2 = wp - wp(omega)"),
            phi_sq,
            1e-9,
        ));
    }
    CriterionResult::new(2, "elliptic identities", items)
}

/// Spin component evaluated through explicit central differences.
struct FdObservable {
    alpha: usize,
    step: f64,
}

impl Observable for FdObservable {
    fn eval(&self, pt: &PhasePoint) -> spinhiggs_core::Complex {
        let x = collective_spin(pt);
        [x.x1, x.x2, x.x3][self.alpha - 1]
    }

    fn grad(&self, pt: &PhasePoint) -> [spinhiggs_core::Complex; 6] {
        let mut out = [cx(0.0, 0.0); 6];
        let base = pt.coords();
        for (k, slot) in out.iter_mut().enumerate() {
            let mut hi = base;
            let mut lo = base;
            hi[k] += self.step;
            lo[k] -= self.step;
            let f_hi = self.eval(&PhasePoint::from_coords(pt.class, hi));
            let f_lo = self.eval(&PhasePoint::from_coords(pt.class, lo));
            *slot = (f_hi - f_lo) / (2.0 * self.step);
        }
        out
    }
}

/// Criterion 3: bracket algebra at 1000 seeded points per reality class.
pub fn c3_bracket_algebra(seed: u64) -> CriterionResult {
    let mut items = Vec::new();
    for class in [
        RealityClass::ComplexV,
        RealityClass::TypeIII,
        RealityClass::TypeIV,
    ] {
        let mut rng = Rng::new(seed ^ 0xb3ac);
        let mut xc = 0.0_f64;
        let mut golden = 0.0_f64;
        let mut closure = 0.0_f64;
        let mut cc = 0.0_f64;
        let mut jacobi = 0.0_f64;
        // finite-difference spin observables for the closure check. The
        // components are quadratic, so central differences carry no
        // truncation error at any step; 1e-4 keeps the rounding noise of
        // the wide |s| ≤ 2 scan patch under the 1e-8 gate.
        let fd_x1 = FdObservable { alpha: 1, step: 1e-4 };
        let fd_x2 = FdObservable { alpha: 2, step: 1e-4 };
        let fd_x3 = FdObservable { alpha: 3, step: 1e-4 };
        for k in 0..1000 {
            let pt = sample_onshell(class, &mut rng);
            // exact commutation with the constraints
            for alpha in 1..=3usize {
                for i in 1..=2usize {
                    let b = canonical_bracket(&SpinComponent(alpha), &Constraint(i), &pt);
                    xc = xc.max(b.norm());
                }
            }
            // Dirac golden table
            let (q0, q1, q3) = (pt.q0, pt.q1, pt.q3);
            let table = [
                (0usize, 3usize, c(1.0) - q0 * q0),
                (0, 4, -q0 * q1),
                (0, 5, -q0 * q3),
                (1, 3, q0 * q1),
                (1, 4, c(1.0) + q1 * q1),
                (1, 5, q1 * q3),
                (2, 3, q0 * q3),
                (2, 4, q1 * q3),
                (2, 5, c(1.0) + q3 * q3),
            ];
            for (i, j, want) in table {
                let got = dirac_bracket(&Coord(i), &Coord(j), &pt).unwrap();
                golden = golden.max((got - want).norm());
            }
            // sl(2) closure under finite-difference gradients
            let x = collective_spin(&pt);
            let b12 = dirac_bracket(&fd_x1, &fd_x2, &pt).unwrap();
            let b23 = dirac_bracket(&fd_x2, &fd_x3, &pt).unwrap();
            let b31 = dirac_bracket(&fd_x3, &fd_x1, &pt).unwrap();
            closure = closure
                .max((b12 + x.x3).norm())
                .max((b23 + x.x1).norm())
                .max((b31 - x.x2).norm());
            // {c1, c2} = −2 on-shell
            let g = canonical_bracket(&Constraint(1), &Constraint(2), &pt);
            cc = cc.max((g + 2.0).norm());
            // Dirac–Jacobi on a rotating coordinate triple
            let triples = [(0usize, 3usize, 4usize), (1, 2, 5), (0, 1, 3), (2, 3, 5)];
            let (i, j, kk) = triples[k % triples.len()];
            let bij =
                move |pt: &PhasePoint| dirac_bracket_unchecked(&Coord(i), &Coord(j), pt).unwrap();
            let bjk =
                move |pt: &PhasePoint| dirac_bracket_unchecked(&Coord(j), &Coord(kk), pt).unwrap();
            let bki =
                move |pt: &PhasePoint| dirac_bracket_unchecked(&Coord(kk), &Coord(i), pt).unwrap();
            let t1 = dirac_bracket_unchecked(&bjk, &Coord(i), &pt).unwrap();
            let t2 = dirac_bracket_unchecked(&bki, &Coord(j), &pt).unwrap();
            let t3 = dirac_bracket_unchecked(&bij, &Coord(kk), &pt).unwrap();
            jacobi = jacobi.max((t1 + t2 + t3).norm());
        }
        let tag = class.label();
        items.push(CheckItem::le(format!("{tag}: {{X,c}} exact"), xc, 1e-12));
        items.push(CheckItem::le(
            format!("{tag}: Dirac golden table"),
            golden,
            1e-10,
        ));
        items.push(CheckItem::le(
            format!("{tag}: sl(2) closure (FD)"),
            closure,
            1e-8,
        ));
        items.push(CheckItem::le(format!("{tag}: {{c1,c2}}+2"), cc, 1e-10));
        items.push(CheckItem::le(
            format!("{tag}: Dirac-Jacobi"),
            jacobi,
            1e-6,
        ));
    }
    CriterionResult::new(3, "bracket algebra", items)
}

fn top_observables(params: TopParams) -> Vec<AuditObservable> {
    vec![
        AuditObservable::new(
            "h2",
            Box::new(|s: &SystemState| match s {
                SystemState::Top(pt) => {
                    spinhiggs_core::symplectic::casimir(&collective_spin(pt)) * 0.5
                }
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
    ]
}

/// Criterion 4: integrability of the extended top.
pub fn c4_top_integrability(seed: u64) -> CriterionResult {
    let mut items = Vec::new();
    let mut rng = Rng::new(seed ^ 0x70b1);
    let params = TopParams::new(
        c(rng.range(0.4, 1.6)),
        c(rng.range(0.4, 1.6)),
        c(rng.range(0.4, 1.6)),
    );

    // {H2, H̃0}_D over 1000 points
    let h2 = TopEnergyObs(TopParams::isotropic(c(1.0)));
    let h0 = TopEnergyObs(params);
    let max_bracket =
        commutativity_scan(&h2, &h0, RealityClass::ComplexV, 1000, seed ^ 0x70b2).unwrap();
    items.push(CheckItem::le("max |{H2, H0}_D|", max_bracket, 1e-8));

    // conservation along a 10-second trajectory. The compact type III
    // class is used: complexified top orbits are meromorphic in time with
    // movable poles, so a ten-second horizon is not seed-safe there.
    let pt = sample_onshell_moderate(RealityClass::TypeIII, &mut rng);
    let spec = ModelSpec::Top {
        params,
        curve: None,
    };
    let opts = IntegratorOptions {
        dt: 1e-3,
        t_end: 10.0,
        project_every: 10,
        tol: 1e-12,
    };
    let traj = integrate(&spec, &SystemState::Top(pt), &opts, &top_observables(params)).unwrap();
    for entry in conservation_report(&traj) {
        items.push(CheckItem::le(
            format!("trajectory rel drift of {}", entry.name),
            entry.max_rel_drift,
            1e-8,
        ));
    }
    let cmax = traj
        .audit
        .iter()
        .map(|r| r.c1_abs.max(r.c2_abs))
        .fold(0.0, f64::max);
    items.push(CheckItem::le("trajectory max |c_i|", cmax, 1e-9));

    // convergence order against a fine-step reference. Both the state and
    // the inertia are fixed here: the step errors must sit well above the
    // rounding floor for the log-log fit to see the asymptotic slope, which
    // a slow randomly-drawn state cannot guarantee.
    let order_params = TopParams::new(c(1.5), c(0.3), c(-0.9));
    let order_spec = ModelSpec::Top {
        params: order_params,
        curve: None,
    };
    let order_pt = {
        let s = 0.5_f64;
        let q = [c(s.cosh()), c(s.sinh()), c(0.0)];
        // q·p = 0 by construction
        let p = [
            c(s.sinh() * 0.9),
            c(-s.cosh() * 0.9),
            c(0.7),
        ];
        spinhiggs_core::symplectic::PhasePoint::new(RealityClass::ComplexV, p, q)
    };
    let reference = {
        let opts = IntegratorOptions {
            dt: 5e-5,
            t_end: 1.0,
            project_every: 0,
            tol: 1e-4,
        };
        integrate(&order_spec, &SystemState::Top(order_pt), &opts, &[])
            .unwrap()
            .last_state()
            .pack()
    };
    let dts = [4e-3, 2e-3, 1e-3];
    let mut errors = Vec::new();
    for dt in dts {
        let opts = IntegratorOptions {
            dt,
            t_end: 1.0,
            project_every: 0,
            tol: 1e-4,
        };
        let end = integrate(&order_spec, &SystemState::Top(order_pt), &opts, &[])
            .unwrap()
            .last_state()
            .pack();
        errors.push(
            end.iter()
                .zip(reference.iter())
                .map(|(a, b)| (a - b).norm())
                .fold(0.0, f64::max),
        );
    }
    let order = fit_log_slope(&dts, &errors);
    items.push(CheckItem::le("fitted RK4 order deviation |p-4|", (order - 4.0).abs(), 0.4));

    CriterionResult::new(4, "top integrability", items)
}

/// Criterion 5: top Lax consistency after calibration.
pub fn c5_top_lax(seed: u64) -> CriterionResult {
    let mut items = Vec::new();
    let mut rng = Rng::new(seed ^ 0x1a3c);
    for tau in [cx(0.0, 1.0), cx(0.2, 0.8)] {
        let curve = EllipticCurve::new(tau).unwrap();
        let params = TopParams::from_curve(&curve).unwrap();
        let x = collective_spin(&sample_onshell(RealityClass::ComplexV, &mut rng));
        let tag = format!("tau={:.1}+{:.1}i", tau.re, tau.im);

        // residue
        let z0 = cx(1e-4, 0.0);
        let l0 = top_lax(&x, z0, &curve).unwrap().l;
        let res_dev = (l0.scale(z0) - spin_matrix(&x)).norm_inf();
        items.push(CheckItem::le(format!("{tag}: |z L(z) - X| at z=1e-4"), res_dev, 1e-3));

        // quasi-periodicities
        let mut qp = 0.0_f64;
        for _ in 0..5 {
            let z = rng.complex_box(0.1, 0.4);
            let l = top_lax(&x, z, &curve).unwrap().l;
            let scale = l.norm_inf();
            let l1 = top_lax(&x, z + 1.0, &curve).unwrap().l;
            let s3 = spinhiggs_core::mat2::sigma3();
            qp = qp.max((l1 - s3 * l * s3).norm_inf() / scale);
            let ltau = top_lax(&x, z + tau, &curve).unwrap().l;
            let s1 = spinhiggs_core::mat2::sigma1();
            qp = qp.max((ltau - s1 * l * s1).norm_inf() / scale);
        }
        items.push(CheckItem::le(format!("{tag}: quasi-periodicities"), qp, 1e-9));

        // affine trace identity with the recorded coefficients
        let h2 = top_energy(&x, &TopParams::isotropic(c(1.0)));
        let h0 = top_energy(&x, &params);
        let mut fit_dev = 0.0_f64;
        for _ in 0..5 {
            let z = rng.complex_box(0.1, 0.4);
            let t = top_lax(&x, z, &curve).unwrap().half_trace_sq();
            let wp = curve.wp(z).unwrap();
            let predicted = wp * h2 * TRACE_WP_COEFF + h0 * TRACE_CONST_COEFF;
            fit_dev = fit_dev.max((t - predicted).norm() / predicted.norm().max(1.0));
        }
        items.push(CheckItem::le(
            format!("{tag}: trace = 2 H2 wp + 2 H0"),
            fit_dev,
            1e-9,
        ));
    }

    // isospectral drift along a trajectory on the square curve; the compact
    // type III class keeps the large curve-matched inertia values bounded
    let curve = EllipticCurve::new(cx(0.0, 1.0)).unwrap();
    let params = TopParams::from_curve(&curve).unwrap();
    let pt = sample_onshell_moderate(RealityClass::TypeIII, &mut rng);
    let spec = ModelSpec::Top {
        params,
        curve: Some(curve),
    };
    let opts = IntegratorOptions {
        dt: 1e-3,
        t_end: 10.0,
        project_every: 10,
        tol: 1e-12,
    };
    let traj = integrate(&spec, &SystemState::Top(pt), &opts, &[]).unwrap();
    let zs = [cx(0.31, 0.17), cx(0.13, -0.21), cx(0.42, 0.08)];
    let report = isospectral_check(&spec, &traj, &zs).unwrap();
    let max_drift = report
        .iter()
        .map(|e| e.tr_sq_rel_drift.max(e.det_rel_drift))
        .fold(0.0, f64::max);
    items.push(CheckItem::le("isospectral drift along flow", max_drift, 1e-7));

    CriterionResult::new(5, "top Lax consistency", items)
}

/// Criterion 6: CM extension — conserved coupling with moving internals.
pub fn c6_cm_extension(seed: u64) -> CriterionResult {
    let mut items = Vec::new();
    let curve = EllipticCurve::new(cx(0.0, 1.0)).unwrap();
    let mut rng = Rng::new(seed ^ 0xc300);

    // elliptic variant trajectory. The position is parked at the
    // stationary half-period u = 1/4 (℘′(1/2) = 0) with v = 0 and a small
    // spin amplitude: the internal (p, q) motion then runs at a bounded
    // rate for every seed while the coupling stays conserved.
    let mut state = sample_cm_state(RealityClass::ComplexV, &mut rng);
    {
        let x = collective_spin(&state.spin);
        let amp = x.x1.norm().max(x.x2.norm()).max(1e-3);
        let scale = (0.1 / amp).min(1.0);
        state.spin.p0 *= scale;
        state.spin.p1 *= scale;
        state.spin.p3 *= scale;
        state.v = c(0.0);
        state.u = c(0.25);
    }
    let spec = ModelSpec::Cm {
        variant: CmVariant::V,
        curve: Some(curve),
    };
    let coupling_of = |s: &SystemState| match s {
        SystemState::Cm(cm) => {
            let x = collective_spin(&cm.spin);
            x.x1 * x.x1 - x.x2 * x.x2
        }
        _ => unreachable!(),
    };
    let observables = vec![AuditObservable::new("coupling", Box::new(coupling_of))];
    let opts = IntegratorOptions {
        dt: 1e-3,
        t_end: 5.0,
        project_every: 1,
        tol: 1e-12,
    };
    let traj = integrate(&spec, &SystemState::Cm(state), &opts, &observables).unwrap();
    let drift = &conservation_report(&traj)[0];
    items.push(CheckItem::le(
        "X+X- rel drift (elliptic)",
        drift.max_rel_drift,
        1e-8,
    ));
    let start = traj.states[0].pack();
    let end = traj.last_state().pack();
    let max_move = start[2..]
        .iter()
        .zip(end[2..].iter())
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    items.push(CheckItem::ge("internal (p,q) displacement", max_move, 1e-3));

    // twisted quasi-periodicity of the Lax
    let state = sample_cm_state(RealityClass::ComplexV, &mut rng);
    let mut qp = 0.0_f64;
    for _ in 0..5 {
        let z = rng.complex_box(0.1, 0.4);
        let l = cm_lax(&state, z, &curve).unwrap().l;
        let l1 = cm_lax(&state, z + 1.0, &curve).unwrap().l;
        let scale = l.norm_inf();
        qp = qp.max((l1 - l).norm_inf() / scale);
        let ltau = cm_lax(&state, z + curve.tau(), &curve).unwrap().l;
        let q = cm_twist(state.u);
        let conj = q * l * q.inverse().unwrap();
        qp = qp.max((ltau - conj).norm_inf() / scale);
    }
    items.push(CheckItem::le("twisted quasi-periodicity", qp, 1e-9));

    // hyperbolic and trigonometric variants conserve their H0. The real
    // couplings are attractive for type III (X₊X₋ ≤ 0 on su(2) spins), so
    // the run uses an outgoing escape orbit there; type IV draws a
    // positive coupling, confined between the repulsive sin⁻² walls.
    for (variant, label) in [(CmVariant::Iii, "III"), (CmVariant::Iv, "IV")] {
        let class = match variant {
            CmVariant::Iii => RealityClass::TypeIII,
            _ => RealityClass::TypeIV,
        };
        let state = stable_real_cm_state(class, variant, &mut rng);
        let spec = ModelSpec::Cm {
            variant,
            curve: None,
        };
        let h0_of = move |s: &SystemState| match s {
            SystemState::Cm(cm) => cm_energy(cm, None, variant).unwrap().1,
            _ => unreachable!(),
        };
        let observables = vec![AuditObservable::new("h0", Box::new(h0_of))];
        let opts = IntegratorOptions {
            dt: 1e-3,
            t_end: 5.0,
            project_every: 1,
            tol: 1e-12,
        };
        let traj = integrate(&spec, &SystemState::Cm(state), &opts, &observables).unwrap();
        let drift = &conservation_report(&traj)[0];
        items.push(CheckItem::le(
            format!("H0 rel drift (variant {label})"),
            drift.max_rel_drift,
            1e-8,
        ));
    }

    CriterionResult::new(6, "Calogero-Moser extension", items)
}

/// A CM state whose real-variant orbit stays regular over the audit
/// horizon: the spin momenta are rescaled until |X₊X₋| ≤ 0.1 (scaling p
/// preserves c₁, c₂ = 0 and X₃ = 0), type IV rejects non-positive
/// couplings, and (v, u) is an outgoing start clear of the potential pole.
fn stable_real_cm_state(
    class: RealityClass,
    variant: CmVariant,
    rng: &mut Rng,
) -> spinhiggs_core::models::CmState {
    loop {
        let mut state = sample_cm_state(class, rng);
        let x = collective_spin(&state.spin);
        let g = x.x1 * x.x1 - x.x2 * x.x2;
        if g.norm() < 1e-4 {
            continue;
        }
        let scale = (0.08 / g.norm()).min(1.0).sqrt();
        state.spin.p0 *= scale;
        state.spin.p1 *= scale;
        state.spin.p3 *= scale;
        let g = g * scale * scale;
        if variant == CmVariant::Iv && g.re < 0.02 {
            continue;
        }
        state.v = c(0.8);
        state.u = c(0.35);
        return state;
    }
}

/// Small dense complex linear solve (Gaussian elimination, partial pivot).
fn solve_complex(a: &mut [Complex], b: &mut [Complex], n: usize) {
    for col in 0..n {
        let mut pivot = col;
        for r in (col + 1)..n {
            if a[r * n + col].norm() > a[pivot * n + col].norm() {
                pivot = r;
            }
        }
        if pivot != col {
            for k in 0..n {
                a.swap(col * n + k, pivot * n + k);
            }
            b.swap(col, pivot);
        }
        let inv = cx(1.0, 0.0) / a[col * n + col];
        for r in 0..n {
            if r == col {
                continue;
            }
            let f = a[r * n + col] * inv;
            for k in col..n {
                let v = a[col * n + k];
                a[r * n + k] -= f * v;
            }
            let bv = b[col];
            b[r] -= f * bv;
        }
    }
    for r in 0..n {
        b[r] /= a[r * n + r];
    }
}

/// Criterion 7: Gaudin brackets, commuting charges and trace extraction.
pub fn c7_gaudin(seed: u64) -> CriterionResult {
    let mut items = Vec::new();
    let marks2 = [c(-0.4), c(0.9)];
    let marks3 = [c(-0.4), c(0.9), c(2.1)];

    // bracket relations (5.34) at seeded states
    let mut rng = Rng::new(seed ^ 0x6a0d);
    let mut closure = 0.0_f64;
    let mut cross = 0.0_f64;
    for _ in 0..50 {
        let state = sample_gaudin_state(2, &marks2, RealityClass::ComplexV, &mut rng);
        let spins = spinhiggs_core::models::gaudin_spins(&state);
        let comp = |a: usize, alpha: usize| {
            move |s: &spinhiggs_core::models::GaudinState| {
                let x = collective_spin(&s.sites[a]);
                [x.x1, x.x2, x.x3][alpha - 1]
            }
        };
        let b = spinhiggs_core::flow::gaudin_canonical_bracket(&comp(0, 1), &comp(0, 2), &state);
        closure = closure.max((b + spins[0].x3).norm());
        let b = spinhiggs_core::flow::gaudin_canonical_bracket(&comp(1, 2), &comp(1, 3), &state);
        closure = closure.max((b + spins[1].x1).norm());
        let b = spinhiggs_core::flow::gaudin_canonical_bracket(&comp(0, 3), &comp(0, 1), &state);
        closure = closure.max((b - spins[0].x2).norm());
        let b = spinhiggs_core::flow::gaudin_canonical_bracket(&comp(0, 1), &comp(1, 2), &state);
        cross = cross.max(b.norm());
    }
    items.push(CheckItem::le("site sl(2) closure (FD)", closure, 1e-8));
    items.push(CheckItem::le("cross-site brackets vanish", cross, 1e-8));

    // {H1^a, H1^b} over 200 seeded states, n = 3
    let h1 = |a: usize| {
        move |s: &spinhiggs_core::models::GaudinState| gaudin_hamiltonians(s).unwrap().1[a]
    };
    let max_h1 = gaudin_commutativity_scan(
        &h1(0),
        &h1(1),
        &marks3,
        RealityClass::ComplexV,
        200,
        seed ^ 0x6a0e,
    );
    items.push(CheckItem::le("max |{H1_1, H1_2}| (n=3)", max_h1, 1e-7));

    // n = 2: the linear charges cancel exactly
    let mut rng2 = Rng::new(seed ^ 0x6a0f);
    let state = sample_gaudin_state(2, &marks2, RealityClass::ComplexV, &mut rng2);
    let (_, h1v) = gaudin_hamiltonians(&state).unwrap();
    items.push(CheckItem::le(
        "H1_1 + H1_2 == 0 (n=2, exact)",
        (h1v[0] + h1v[1]).norm(),
        0.0,
    ));

    // partial-fraction extraction from ½ tr L² against the Hamiltonians
    let state = sample_gaudin_state(3, &marks3, RealityClass::ComplexV, &mut rng2);
    let (h2v, h1v) = gaudin_hamiltonians(&state).unwrap();
    let mut a_mat = vec![cx(0.0, 0.0); 36];
    let mut b_vec = vec![cx(0.0, 0.0); 6];
    for row in 0..6 {
        let z = cx(0.3 + 0.7 * row as f64, 1.1 + 0.4 * (row as f64 * 1.7).sin());
        for (col, xa) in marks3.iter().enumerate() {
            let d = z - xa;
            a_mat[row * 6 + col] = cx(1.0, 0.0) / (d * d);
            a_mat[row * 6 + col + 3] = cx(1.0, 0.0) / d;
        }
        b_vec[row] = gaudin_lax(&state, z).unwrap().half_trace_sq();
    }
    solve_complex(&mut a_mat, &mut b_vec, 6);
    let mut extract_dev = 0.0_f64;
    for a in 0..3 {
        let want_a = h2v[a] * GAUDIN_H2_COEFF;
        let want_b = h1v[a] * GAUDIN_H1_COEFF;
        extract_dev = extract_dev
            .max((b_vec[a] - want_a).norm() / want_a.norm().max(1.0))
            .max((b_vec[a + 3] - want_b).norm() / want_b.norm().max(1.0));
    }
    items.push(CheckItem::le(
        "partial fractions vs (2 H2, -2 H1)",
        extract_dev,
        1e-8,
    ));

    // global spin conserved along every H1 flow
    let mut global = 0.0_f64;
    for _ in 0..5 {
        let state = sample_gaudin_state(3, &marks3, RealityClass::ComplexV, &mut rng2);
        for a in 0..3 {
            let rates = gaudin_vector_field(&state, a, GaudinHamKind::H1).unwrap();
            for alpha in 1..=3usize {
                let mut rate = cx(0.0, 0.0);
                for (b, site_rate) in rates.iter().enumerate() {
                    let grad = SpinComponent(alpha).grad(&state.sites[b]);
                    for k in 0..6 {
                        rate += grad[k] * site_rate[k];
                    }
                }
                global = global.max(rate.norm());
            }
        }
    }
    items.push(CheckItem::le("global spin rate along H1 flows", global, 1e-9));

    CriterionResult::new(7, "Gaudin chain", items)
}

/// Criterion 8: reality classes along flows and in the Lax coefficients.
pub fn c8_reality(seed: u64) -> CriterionResult {
    let mut items = Vec::new();
    let mut rng = Rng::new(seed ^ 0x8ea1);

    for (class, label) in [
        (RealityClass::TypeIII, "III"),
        (RealityClass::TypeIV, "IV"),
    ] {
        let mut pt = sample_onshell_moderate(class, &mut rng);
        // the type IV top lives on a noncompact orbit and even the compact
        // case carries unbounded fiber momenta; a small spin keeps the
        // growth resolvable over the ten-second horizon at every seed
        let x_norm = {
            let x = collective_spin(&pt);
            x.x1.norm().max(x.x2.norm()).max(x.x3.norm())
        };
        if x_norm > 0.1 {
            let scale = 0.1 / x_norm;
            pt.p0 *= scale;
            pt.p1 *= scale;
            pt.p3 *= scale;
        }
        let params = TopParams::new(c(1.2), c(0.5), c(-0.7));
        let spec = ModelSpec::Top {
            params,
            curve: None,
        };
        let opts = IntegratorOptions {
            dt: 1e-3,
            t_end: 10.0,
            project_every: 10,
            tol: 1e-12,
        };
        let traj = integrate(&spec, &SystemState::Top(pt), &opts, &[]).unwrap();
        let max_res = traj
            .audit
            .iter()
            .map(|r| r.reality_residual)
            .fold(0.0, f64::max);
        items.push(CheckItem::le(
            format!("type {label} flow reality residual"),
            max_res,
            1e-9,
        ));
        if class == RealityClass::TypeIII {
            // configuration stays on the unit sphere
            let mut sphere = 0.0_f64;
            for state in &traj.states {
                if let SystemState::Top(pt) = state {
                    let r = pt.q0.norm_sqr() + pt.q1.norm_sqr() + pt.q3.norm_sqr();
                    sphere = sphere.max((r - 1.0).abs());
                }
            }
            for _ in 0..200 {
                let pt = sample_onshell(RealityClass::TypeIII, &mut rng);
                let r = pt.q0.norm_sqr() + pt.q1.norm_sqr() + pt.q3.norm_sqr();
                sphere = sphere.max((r - 1.0).abs());
            }
            items.push(CheckItem::le(
                "type III q on unit sphere",
                sphere,
                1e-10,
            ));
        }
    }

    // real Lax coefficient patterns on the fixed circle of the involution
    let curve = EllipticCurve::new(cx(0.0, 1.0)).unwrap();
    let xs = [c(0.23), c(0.57), c(0.81)];
    let mut anti_herm = 0.0_f64;
    let mut real_dev = 0.0_f64;
    for _ in 0..20 {
        let pt3 = sample_onshell(RealityClass::TypeIII, &mut rng);
        let x3 = collective_spin(&pt3);
        let pt4 = sample_onshell(RealityClass::TypeIV, &mut rng);
        let x4 = collective_spin(&pt4);
        for &x in &xs {
            let l = top_lax(&x3, x, &curve).unwrap().l;
            anti_herm = anti_herm.max((l + l.dagger()).norm_inf() / l.norm_inf().max(1.0));
            let l = top_lax(&x4, x, &curve).unwrap().l;
            let mut imag = 0.0_f64;
            for e in l.entries() {
                imag = imag.max(e.im.abs());
            }
            real_dev = real_dev.max(imag / l.norm_inf().max(1.0));
        }
    }
    items.push(CheckItem::le(
        "type III Lax anti-Hermitian on real axis",
        anti_herm,
        1e-9,
    ));
    items.push(CheckItem::le(
        "type IV Lax real on real axis",
        real_dev,
        1e-9,
    ));

    CriterionResult::new(8, "reality classes", items)
}

/// Criterion 9: quantum top spectra against closed forms.
pub fn c9_quantum_top() -> CriterionResult {
    let mut items = Vec::new();
    // isotropic inertia: single eigenvalue J l(l+1) with multiplicity 2l+1
    let j = 0.95;
    let mut iso_dev = 0.0_f64;
    let mut mult_bad = 0u32;
    for two_l in 1..=20u32 {
        let l = two_l as f64 / 2.0;
        let spec = quantum_top_spectrum(two_l, &TopParams::isotropic(c(j))).unwrap();
        if spec.eigenvalues.len() != two_l as usize + 1 {
            mult_bad += 1;
        }
        let want = j * l * (l + 1.0);
        for ev in &spec.eigenvalues {
            iso_dev = iso_dev.max((ev - c(want)).norm());
        }
    }
    items.push(CheckItem::le("isotropic spectrum |e - J l(l+1)|", iso_dev, 1e-12));
    items.push(CheckItem::le(
        "multiplicity 2l+1 failures",
        mult_bad as f64,
        0.0,
    ));

    // spin-1 anisotropic spectrum equals the pairwise sums
    let (j1, j2, j3) = (0.6, 1.9, -0.7);
    let spec = quantum_top_spectrum(2, &TopParams::new(c(j1), c(j2), c(j3))).unwrap();
    let mut want = [j1 + j2, j2 + j3, j3 + j1];
    want.sort_unstable_by(|a, b| a.partial_cmp(b).unwrap());
    let mut aniso_dev = 0.0_f64;
    for (ev, w) in spec.eigenvalues.iter().zip(want.iter()) {
        aniso_dev = aniso_dev.max((ev - c(*w)).norm());
    }
    items.push(CheckItem::le(
        "spin-1 spectrum vs pair sums",
        aniso_dev,
        1e-12,
    ));

    // half-spin degeneracy
    let spec = quantum_top_spectrum(1, &TopParams::new(c(j1), c(j2), c(j3))).unwrap();
    let want = (j1 + j2 + j3) / 4.0;
    let mut half_dev = 0.0_f64;
    for ev in &spec.eigenvalues {
        half_dev = half_dev.max((ev - c(want)).norm());
    }
    items.push(CheckItem::le("spin-1/2 doublet value", half_dev, 1e-12));

    // quantum/classical consistency: scaled spectrum inside the classical
    // range of Σ J_a n_a² on the sphere, 5% tolerance at l = 20
    let params = TopParams::new(c(1.0), c(2.0), c(3.0));
    let spec = quantum_top_spectrum(40, &params).unwrap();
    let scale = 20.0 * 21.0;
    let lo = spec.eigenvalues.first().unwrap().re / scale;
    let hi = spec.eigenvalues.last().unwrap().re / scale;
    let margin = 0.05 * (3.0 - 1.0);
    items.push(CheckItem::ge("scaled qm floor vs classical min", lo, 1.0 - margin));
    items.push(CheckItem::le("scaled qm ceiling vs classical max", hi, 3.0 + margin));

    CriterionResult::new(9, "quantum top", items)
}

/// One console line per criterion.
pub fn summary_lines(report: &CheckReport) -> Vec<String> {
    let mut lines = Vec::new();
    for cr in &report.criteria {
        let status = if cr.passed { "PASS" } else { "FAIL" };
        let worst = cr
            .items
            .iter()
            .filter(|i| i.cmp == "<=")
            .map(|i| i.value)
            .fold(0.0, f64::max);
        lines.push(format!(
            "[{status}] criterion {}: {} (worst residual {:.3e})",
            cr.id, cr.name, worst
        ));
    }
    lines
}
