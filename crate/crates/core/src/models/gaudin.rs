//! The extended rational SL(2) Gaudin chain on the punctured sphere.
//!
//! Each marked point x_a carries a full constrained phase space; the Lax
//! matrix is the sum of simple poles L(z) = Σ_a X_a/(z − x_a). Unlike the
//! orbit Gaudin model, the quadratic site invariants H₂^a are not Casimir
//! functions of the (p, q) chart, which doubles the integral count.

use alloc::vec::Vec;

use super::{LaxSample, ModelError};
use crate::mat2::Mat2;
use crate::symplectic::{
    collective_spin, constraint_norm, spin_matrix, PhasePoint, RealityClass, SpinComponent,
    SpinVector, Observable,
};
use crate::{cx, Complex};

/// Minimum allowed separation between marked points.
pub const MARK_SEPARATION: f64 = 1e-9;

/// Signs of the invariant pairing (A, B) = A₁B₁ − A₂B₂ + A₃B₃.
const PAIRING_SIGN: [f64; 3] = [1.0, -1.0, 1.0];

/// Chain state: one phase-space site per marked point.
#[derive(Debug, Clone, PartialEq)]
pub struct GaudinState {
    pub sites: Vec<PhasePoint>,
    pub marks: Vec<Complex>,
    pub class: RealityClass,
}

impl GaudinState {
    pub fn new(
        sites: Vec<PhasePoint>,
        marks: Vec<Complex>,
        class: RealityClass,
    ) -> Result<Self, ModelError> {
        if sites.len() != marks.len() || sites.is_empty() {
            return Err(ModelError::BadState(
                "need one site per marked point, at least one",
            ));
        }
        for a in 0..marks.len() {
            for b in (a + 1)..marks.len() {
                if (marks[a] - marks[b]).norm() < MARK_SEPARATION {
                    return Err(ModelError::CoincidentMarks);
                }
            }
        }
        Ok(GaudinState {
            sites,
            marks,
            class,
        })
    }

    pub fn n_sites(&self) -> usize {
        self.sites.len()
    }

    /// Max constraint violation across sites.
    pub fn constraint_norm(&self) -> f64 {
        self.sites
            .iter()
            .map(constraint_norm)
            .fold(0.0, f64::max)
    }

    /// Total spin Σ_a X_a (the global moment monitored under reduction).
    pub fn global_spin(&self) -> SpinVector {
        let mut x = SpinVector::new(cx(0.0, 0.0), cx(0.0, 0.0), cx(0.0, 0.0));
        for site in &self.sites {
            let s = collective_spin(site);
            x.x1 += s.x1;
            x.x2 += s.x2;
            x.x3 += s.x3;
        }
        x
    }
}

/// Per-site collective spins.
pub fn gaudin_spins(state: &GaudinState) -> Vec<SpinVector> {
    state.sites.iter().map(collective_spin).collect()
}

/// Invariant pairing (A, B) = A₁B₁ − A₂B₂ + A₃B₃ (the ½tr convention on
/// spin matrices, matching the Casimir).
pub fn spin_pairing(a: &SpinVector, b: &SpinVector) -> Complex {
    a.x1 * b.x1 - a.x2 * b.x2 + a.x3 * b.x3
}

/// The Gaudin invariants: H₂^a = (X_a, X_a) and
/// H₁^a = Σ_{b≠a} (X_a, X_b)/(x_b − x_a).
pub fn gaudin_hamiltonians(
    state: &GaudinState,
) -> Result<(Vec<Complex>, Vec<Complex>), ModelError> {
    let spins = gaudin_spins(state);
    let n = spins.len();
    let mut h2 = Vec::with_capacity(n);
    let mut h1 = Vec::with_capacity(n);
    for a in 0..n {
        h2.push(spin_pairing(&spins[a], &spins[a]));
        let mut sum = cx(0.0, 0.0);
        for b in 0..n {
            if b == a {
                continue;
            }
            let dx = state.marks[b] - state.marks[a];
            sum += spin_pairing(&spins[a], &spins[b]) / dx;
        }
        h1.push(sum);
    }
    Ok((h2, h1))
}

/// L(z) = Σ_a spin_matrix(X_a)/(z − x_a).
pub fn gaudin_lax(state: &GaudinState, z: Complex) -> Result<LaxSample, ModelError> {
    let mut l = Mat2::zero();
    for (site, mark) in state.sites.iter().zip(state.marks.iter()) {
        let d = z - mark;
        if d.norm() < MARK_SEPARATION {
            return Err(ModelError::EvalAtMark);
        }
        l = l + spin_matrix(&collective_spin(site)).scale(cx(1.0, 0.0) / d);
    }
    Ok(LaxSample { z, l })
}

/// Which Hamiltonian generates the flow.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GaudinHamKind {
    H2,
    H1,
}

/// Canonical flow of H₂^a or H₁^a on every site, as analytic rates in
/// coordinate order (ṗ₀, ṗ₁, ṗ₃, q̇₀, q̇₁, q̇₃) per site. The H₂^a flow
/// moves only site a; the H₁^a flow couples all sites through the pairing.
pub fn gaudin_vector_field(
    state: &GaudinState,
    a: usize,
    which: GaudinHamKind,
) -> Result<Vec<[Complex; 6]>, ModelError> {
    let n = state.n_sites();
    if a >= n {
        return Err(ModelError::BadSite(a));
    }
    let spins = gaudin_spins(state);
    let mut rates = alloc::vec![[cx(0.0, 0.0); 6]; n];

    // site-local spin gradients: grads[c][alpha-1][k]
    let grads: Vec<[[Complex; 6]; 3]> = state
        .sites
        .iter()
        .map(|site| {
            [
                SpinComponent(1).grad(site),
                SpinComponent(2).grad(site),
                SpinComponent(3).grad(site),
            ]
        })
        .collect();

    // ∂H/∂coords of site c, then canonical (q̇ = ∂H/∂p, ṗ = −∂H/∂q)
    let mut apply = |c: usize, weight: Complex, partner: &SpinVector| {
        let mut grad_h = [cx(0.0, 0.0); 6];
        for alpha in 0..3 {
            let x_other = [partner.x1, partner.x2, partner.x3][alpha];
            for k in 0..6 {
                grad_h[k] += grads[c][alpha][k] * x_other * PAIRING_SIGN[alpha] * weight;
            }
        }
        for k in 0..3 {
            rates[c][k + 3] += grad_h[k]; // q̇
            rates[c][k] -= grad_h[k + 3]; // ṗ
        }
    };

    match which {
        GaudinHamKind::H2 => {
            // H₂^a = (X_a, X_a): gradient weight 2 on the site itself
            apply(a, cx(2.0, 0.0), &spins[a]);
        }
        GaudinHamKind::H1 => {
            for b in 0..n {
                if b == a {
                    continue;
                }
                let w = cx(1.0, 0.0) / (state.marks[b] - state.marks[a]);
                // (X_a, X_b)/(x_b−x_a) contributes to both sites
                apply(a, w, &spins[b]);
                apply(b, w, &spins[a]);
            }
        }
    }
    Ok(rates)
}

/// Deviation of the residues from the reality structure dictated by the
/// mark configuration: real marks carry sites with the class's single-site
/// pattern (anti-Hermitian spin matrix for III, real for IV); a conjugate
/// mark pair (a, a+1) with x_{a+1} = x̄_a carries sites with
/// X_{a+1} = −X_a† (III) or X_{a+1} = X̄_a (IV). Complex class: 0.
pub fn gaudin_reality_residual(state: &GaudinState) -> Result<f64, ModelError> {
    if state.class == RealityClass::ComplexV {
        return Ok(0.0);
    }
    let mut residual = 0.0_f64;
    let n = state.n_sites();
    let mut k = 0;
    while k < n {
        let x = state.marks[k];
        let m = spin_matrix(&collective_spin(&state.sites[k]));
        if x.im.abs() < MARK_SEPARATION {
            let dev = match state.class {
                RealityClass::TypeIII => (m + m.dagger()).norm_inf(),
                RealityClass::TypeIV => (m - m.conj()).norm_inf(),
                RealityClass::ComplexV => 0.0,
            };
            residual = residual.max(dev);
            k += 1;
        } else {
            if k + 1 >= n || (state.marks[k + 1] - x.conj()).norm() >= MARK_SEPARATION {
                return Err(ModelError::BadState(
                    "complex marks must come in consecutive conjugate pairs",
                ));
            }
            let m2 = spin_matrix(&collective_spin(&state.sites[k + 1]));
            let dev = match state.class {
                RealityClass::TypeIII => (m2 + m.dagger()).norm_inf(),
                RealityClass::TypeIV => (m2 - m.conj()).norm_inf(),
                RealityClass::ComplexV => 0.0,
            };
            residual = residual.max(dev);
            k += 2;
        }
    }
    Ok(residual)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flow::{sample_gaudin_state, sample_onshell};
    use crate::rng::Rng;
    use crate::symplectic::FD_STEP;

    fn c(re: f64) -> Complex {
        cx(re, 0.0)
    }

    fn real_marks(n: usize) -> Vec<Complex> {
        (0..n).map(|k| c(k as f64 * 1.3 - 0.4)).collect()
    }

    /// Canonical bracket of two chain observables by central differences
    /// over all site coordinates.
    fn chain_bracket<F, G>(f: &F, g: &G, state: &GaudinState) -> Complex
    where
        F: Fn(&GaudinState) -> Complex,
        G: Fn(&GaudinState) -> Complex,
    {
        let n = state.n_sites();
        let mut sum = cx(0.0, 0.0);
        let diff = |h: &dyn Fn(&GaudinState) -> Complex, a: usize, k: usize| {
            let mut hi = state.clone();
            let mut lo = state.clone();
            let mut chi = hi.sites[a].coords();
            let mut clo = lo.sites[a].coords();
            chi[k] += FD_STEP;
            clo[k] -= FD_STEP;
            hi.sites[a] = PhasePoint::from_coords(state.class, chi);
            lo.sites[a] = PhasePoint::from_coords(state.class, clo);
            (h(&hi) - h(&lo)) / (2.0 * FD_STEP)
        };
        for a in 0..n {
            for k in 0..3 {
                sum += diff(f, a, k) * diff(g, a, k + 3) - diff(f, a, k + 3) * diff(g, a, k);
            }
        }
        sum
    }

    #[test]
    fn per_site_spin_values() {
        let site = PhasePoint::new(
            RealityClass::ComplexV,
            [c(0.0), c(0.5), c(-0.7)],
            [c(1.0), c(0.0), c(0.0)],
        );
        let other = PhasePoint::new(
            RealityClass::ComplexV,
            [c(0.0), c(0.0), c(0.0)],
            [c(1.0), c(0.0), c(0.0)],
        );
        let state =
            GaudinState::new(alloc::vec![site, other], real_marks(2), RealityClass::ComplexV)
                .unwrap();
        let spins = gaudin_spins(&state);
        assert_eq!(spins.len(), 2);
        assert_eq!(spins[0].x1, c(0.5));
        assert_eq!(spins[0].x2, c(0.0));
        assert_eq!(spins[0].x3, c(-0.7));
    }

    #[test]
    fn coincident_marks_rejected() {
        let site = PhasePoint::new(
            RealityClass::ComplexV,
            [c(0.0), c(0.0), c(0.0)],
            [c(1.0), c(0.0), c(0.0)],
        );
        let r = GaudinState::new(
            alloc::vec![site, site],
            alloc::vec![c(0.0), c(0.0)],
            RealityClass::ComplexV,
        );
        assert!(matches!(r, Err(ModelError::CoincidentMarks)));
    }

    #[test]
    fn two_site_linear_hamiltonians_cancel() {
        let mut rng = Rng::new(301);
        let state = sample_gaudin_state(2, &real_marks(2), RealityClass::ComplexV, &mut rng);
        let (_, h1) = gaudin_hamiltonians(&state).unwrap();
        assert!((h1[0] + h1[1]).norm() < 1e-13);
    }

    #[test]
    fn quadratic_hamiltonian_is_site_casimir() {
        let mut rng = Rng::new(303);
        let state = sample_gaudin_state(3, &real_marks(3), RealityClass::ComplexV, &mut rng);
        let (h2, _) = gaudin_hamiltonians(&state).unwrap();
        for (site, h) in state.sites.iter().zip(h2.iter()) {
            let cas = crate::symplectic::casimir(&collective_spin(site));
            assert!((h - cas).norm() < 1e-13);
        }
    }

    #[test]
    fn site_brackets_close_with_kronecker_delta() {
        // {X_α^a, X_β^b} = δ^{ab} c_{αβγ} X_γ by finite differences
        let mut rng = Rng::new(307);
        let state = sample_gaudin_state(2, &real_marks(2), RealityClass::ComplexV, &mut rng);
        let spins = gaudin_spins(&state);
        let comp = |a: usize, alpha: usize| {
            move |s: &GaudinState| {
                let x = collective_spin(&s.sites[a]);
                [x.x1, x.x2, x.x3][alpha - 1]
            }
        };
        // same site: sl(2) structure constants
        let b = chain_bracket(&comp(0, 1), &comp(0, 2), &state);
        assert!((b + spins[0].x3).norm() < 1e-8);
        let b = chain_bracket(&comp(1, 2), &comp(1, 3), &state);
        assert!((b + spins[1].x1).norm() < 1e-8);
        let b = chain_bracket(&comp(0, 3), &comp(0, 1), &state);
        assert!((b - spins[0].x2).norm() < 1e-8);
        // cross-site brackets vanish
        for alpha in 1..=3 {
            for beta in 1..=3 {
                let b = chain_bracket(&comp(0, alpha), &comp(1, beta), &state);
                assert!(b.norm() < 1e-9, "cross ({alpha},{beta}): {b}");
            }
        }
    }

    #[test]
    fn lax_single_site_shape() {
        let mut rng = Rng::new(311);
        let site = sample_onshell(RealityClass::ComplexV, &mut rng);
        let state =
            GaudinState::new(alloc::vec![site], alloc::vec![c(0.3)], RealityClass::ComplexV)
                .unwrap();
        let x = collective_spin(&site);
        let z = cx(1.7, 0.4);
        let sample = gaudin_lax(&state, z).unwrap();
        let d = z - c(0.3);
        let want = spin_matrix(&x).scale(cx(1.0, 0.0) / d);
        assert!((sample.l - want).norm_inf() < 1e-14);
        // ½tr L² = casimir/(z−x)²
        let cas = crate::symplectic::casimir(&x);
        assert!(
            (sample.half_trace_sq() - cas / (d * d)).norm()
                <= 1e-12 * (cas / (d * d)).norm().max(1.0)
        );
    }

    #[test]
    fn lax_residues_by_contour_shift() {
        let mut rng = Rng::new(313);
        let state = sample_gaudin_state(3, &real_marks(3), RealityClass::ComplexV, &mut rng);
        let spins = gaudin_spins(&state);
        for a in 0..3 {
            let z = state.marks[a] + 1e-4;
            let l = gaudin_lax(&state, z).unwrap().l;
            let res = l.scale(z - state.marks[a]);
            let want = spin_matrix(&spins[a]);
            assert!(
                (res - want).norm_inf() <= 1e-3 * want.norm_inf().max(1.0),
                "site {a}"
            );
        }
    }

    #[test]
    fn lax_far_field_is_total_spin() {
        let mut rng = Rng::new(317);
        let state = sample_gaudin_state(3, &real_marks(3), RealityClass::ComplexV, &mut rng);
        let z = cx(1e6, 0.0);
        let l = gaudin_lax(&state, z).unwrap().l;
        let total = spin_matrix(&state.global_spin());
        assert!((l.scale(z) - total).norm_inf() <= 1e-4 * total.norm_inf().max(1.0));
    }

    #[test]
    fn lax_at_mark_errors() {
        let mut rng = Rng::new(319);
        let state = sample_gaudin_state(2, &real_marks(2), RealityClass::ComplexV, &mut rng);
        assert!(matches!(
            gaudin_lax(&state, state.marks[1]),
            Err(ModelError::EvalAtMark)
        ));
    }

    #[test]
    fn h2_flow_localized_to_its_site() {
        let mut rng = Rng::new(323);
        let state = sample_gaudin_state(3, &real_marks(3), RealityClass::ComplexV, &mut rng);
        let rates = gaudin_vector_field(&state, 1, GaudinHamKind::H2).unwrap();
        for (b, rate) in rates.iter().enumerate() {
            let max = rate.iter().map(|v| v.norm()).fold(0.0, f64::max);
            if b == 1 {
                assert!(max > 1e-3, "flow should move its own site");
            } else {
                assert_eq!(max, 0.0, "site {b} must be frozen");
            }
        }
    }

    #[test]
    fn flows_match_finite_difference_oracle() {
        let mut rng = Rng::new(329);
        let state = sample_gaudin_state(3, &real_marks(3), RealityClass::ComplexV, &mut rng);
        for (a, which) in [(0usize, GaudinHamKind::H2), (0, GaudinHamKind::H1), (2, GaudinHamKind::H1)] {
            let rates = gaudin_vector_field(&state, a, which).unwrap();
            let ham = |s: &GaudinState| {
                let (h2, h1) = gaudin_hamiltonians(s).unwrap();
                match which {
                    GaudinHamKind::H2 => h2[a],
                    GaudinHamKind::H1 => h1[a],
                }
            };
            for b in 0..3 {
                for k in 0..6 {
                    // canonical flow via FD of the Hamiltonian
                    let mut hi = state.clone();
                    let mut lo = state.clone();
                    let mut chi = hi.sites[b].coords();
                    let mut clo = lo.sites[b].coords();
                    chi[k] += FD_STEP;
                    clo[k] -= FD_STEP;
                    hi.sites[b] = PhasePoint::from_coords(state.class, chi);
                    lo.sites[b] = PhasePoint::from_coords(state.class, clo);
                    let d = (ham(&hi) - ham(&lo)) / (2.0 * FD_STEP);
                    // q̇_j = ∂H/∂p_j ↔ rates[b][k+3] for k<3; ṗ_j = −∂H/∂q_j
                    let got = if k < 3 { rates[b][k + 3] } else { -rates[b][k - 3] };
                    assert!(
                        (got - d).norm() < 1e-7,
                        "site {b} coord {k}: field {got} vs fd {d}"
                    );
                }
            }
        }
    }

    #[test]
    fn global_spin_conserved_along_h1_flows() {
        let mut rng = Rng::new(331);
        let state = sample_gaudin_state(3, &real_marks(3), RealityClass::ComplexV, &mut rng);
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
                assert!(rate.norm() < 1e-9, "dΣX{alpha}/dt along H1^{a}: {rate}");
            }
        }
    }

    #[test]
    fn reality_residual_structures() {
        let mut rng = Rng::new(337);
        // real marks, type III sites
        let state = sample_gaudin_state(2, &real_marks(2), RealityClass::TypeIII, &mut rng);
        assert!(gaudin_reality_residual(&state).unwrap() < 1e-10);
        // conjugate pair marks
        let marks = alloc::vec![cx(0.4, 0.8), cx(0.4, -0.8)];
        let state = sample_gaudin_state(2, &marks, RealityClass::TypeIII, &mut rng);
        assert!(gaudin_reality_residual(&state).unwrap() < 1e-10);
        let state = sample_gaudin_state(2, &marks, RealityClass::TypeIV, &mut rng);
        assert!(gaudin_reality_residual(&state).unwrap() < 1e-10);
        // unpaired complex mark is rejected
        let site = sample_onshell(RealityClass::TypeIV, &mut rng);
        let bad = GaudinState::new(
            alloc::vec![site],
            alloc::vec![cx(0.0, 1.0)],
            RealityClass::TypeIV,
        )
        .unwrap();
        assert!(gaudin_reality_residual(&bad).is_err());
    }
}
