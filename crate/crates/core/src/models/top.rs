//! The spin-extended SL(2) Euler–Arnold top and its quantum counterpart.

use alloc::vec;
use alloc::vec::Vec;

use super::{LaxSample, ModelError, LAX_AXIS_PHI, LAX_AXIS_SIGN};
use crate::elliptic::EllipticCurve;
use crate::linalg::{eigvals_complex, eigvals_symmetric};
use crate::mat2::{sigma1, sigma2, sigma3};
use crate::symplectic::{
    collective_spin, constraints, Observable, PhasePoint, SpinComponent, SpinVector,
};
use crate::{cx, Complex};

/// Inertia coefficients of the top Hamiltonian ½(J₁X₁² − J₂X₂² + J₃X₃²).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TopParams {
    pub j1: Complex,
    pub j2: Complex,
    pub j3: Complex,
}

impl TopParams {
    pub fn new(j1: Complex, j2: Complex, j3: Complex) -> Self {
        TopParams { j1, j2, j3 }
    }

    pub fn isotropic(j: Complex) -> Self {
        TopParams::new(j, j, j)
    }

    /// Curve-matched coefficients J = (−℘(τ/2), −℘((1+τ)/2), −℘(1/2)):
    /// the α-th coefficient is −℘ at the half-period carried by axis α of
    /// the calibrated Lax, which closes ½trL² = 2H₂℘ + 2H₀ exactly. On the
    /// square lattice τ = i these coincide numerically with
    /// (℘(1/2), ℘((1+τ)/2), ℘(τ/2)).
    pub fn from_curve(curve: &EllipticCurve) -> Result<Self, ModelError> {
        let e = curve.half_period_wp()?;
        Ok(TopParams::new(-e.e3, -e.e2, -e.e1))
    }

    pub fn as_array(&self) -> [Complex; 3] {
        [self.j1, self.j2, self.j3]
    }

    pub fn is_real(&self) -> bool {
        self.j1.im.abs() < 1e-14 && self.j2.im.abs() < 1e-14 && self.j3.im.abs() < 1e-14
    }
}

/// H̃₀(J) = ½(J₁X₁² − J₂X₂² + J₃X₃²); J = (1,1,1) gives H₂ (half-Casimir).
pub fn top_energy(x: &SpinVector, params: &TopParams) -> Complex {
    (params.j1 * x.x1 * x.x1 - params.j2 * x.x2 * x.x2 + params.j3 * x.x3 * x.x3) * 0.5
}

/// The top Hamiltonian as a bracket observable with analytic gradient.
#[derive(Debug, Clone, Copy)]
pub struct TopEnergyObs(pub TopParams);

impl Observable for TopEnergyObs {
    fn eval(&self, pt: &PhasePoint) -> Complex {
        top_energy(&collective_spin(pt), &self.0)
    }

    fn grad(&self, pt: &PhasePoint) -> [Complex; 6] {
        let x = collective_spin(pt);
        let g1 = SpinComponent(1).grad(pt);
        let g2 = SpinComponent(2).grad(pt);
        let g3 = SpinComponent(3).grad(pt);
        let mut out = [cx(0.0, 0.0); 6];
        for k in 0..6 {
            out[k] =
                self.0.j1 * x.x1 * g1[k] - self.0.j2 * x.x2 * g2[k] + self.0.j3 * x.x3 * g3[k];
        }
        out
    }
}

/// Equations of motion of H̃₀ under the Dirac structure, in closed form.
/// Returns rates in coordinate order (ṗ₀, ṗ₁, ṗ₃, q̇₀, q̇₁, q̇₃). The field
/// is exactly tangent to both constraints.
pub fn top_vector_field(pt: &PhasePoint, params: &TopParams) -> Result<[Complex; 6], ModelError> {
    let (c1, c2) = constraints(pt);
    let gate = super::FIELD_GATE * crate::symplectic::constraint_scale(pt);
    if c1.norm() > gate || c2.norm() > gate {
        return Err(ModelError::Symplectic(
            crate::symplectic::SymplecticError::OffShell {
                c1: c1.norm(),
                c2: c2.norm(),
            },
        ));
    }
    let x = collective_spin(pt);
    let (j1, j2, j3) = (params.j1, params.j2, params.j3);
    let a1 = j1 * x.x1;
    let a2 = j2 * x.x2;
    let a3 = j3 * x.x3;
    Ok([
        -a1 * pt.p1 - a3 * pt.p3,
        -a1 * pt.p0 - a2 * pt.p3,
        -a3 * pt.p0 + a2 * pt.p1,
        a1 * pt.q1 + a3 * pt.q3,
        a1 * pt.q0 - a2 * pt.q3,
        a2 * pt.q1 + a3 * pt.q0,
    ])
}

/// Euler–Arnold form of the same flow on the spin coordinates:
/// Ẋ₁ = (J₃−J₂)X₂X₃, Ẋ₂ = (J₃−J₁)X₁X₃, Ẋ₃ = (J₂−J₁)X₁X₂.
pub fn top_spin_rhs(x: &SpinVector, params: &TopParams) -> SpinVector {
    SpinVector {
        x1: (params.j3 - params.j2) * x.x2 * x.x3,
        x2: (params.j3 - params.j1) * x.x1 * x.x3,
        x3: (params.j2 - params.j1) * x.x1 * x.x2,
    }
}

/// Calibrated top Lax matrix (see module docs for the constant table):
/// L(z) = X₁·ϕ̃₁(z)σ₁ + iX₂·ϕ̃₂(z)σ₂ + X₃·ϕ̃₃(z)σ₃ with residue
/// spin_matrix(X) at z = 0 and the twisted-bundle quasi-periodicities.
pub fn top_lax(x: &SpinVector, z: Complex, curve: &EllipticCurve) -> Result<LaxSample, ModelError> {
    let f1 = curve.phi_alpha(LAX_AXIS_PHI[0], z)? * LAX_AXIS_SIGN[0];
    let f2 = curve.phi_alpha(LAX_AXIS_PHI[1], z)? * LAX_AXIS_SIGN[1];
    let f3 = curve.phi_alpha(LAX_AXIS_PHI[2], z)? * LAX_AXIS_SIGN[2];
    let i = cx(0.0, 1.0);
    let l = sigma1().scale(x.x1 * f1) + sigma2().scale(i * x.x2 * f2) + sigma3().scale(x.x3 * f3);
    Ok(LaxSample { z, l })
}

/// Spectrum of J₁S₁² + J₂S₂² + J₃S₃² on the spin-l representation,
/// `two_l` = 2l. Real J gives a real symmetric operator solved by Jacobi
/// rotations; complex J is flagged non-Hermitian and solved by complex QR.
#[derive(Debug, Clone, PartialEq)]
pub struct TopSpectrum {
    pub two_l: u32,
    pub dim: usize,
    pub hermitian: bool,
    /// Sorted ascending by real part (exactly real in the Hermitian case).
    pub eigenvalues: Vec<Complex>,
}

pub fn quantum_top_spectrum(two_l: u32, params: &TopParams) -> Result<TopSpectrum, ModelError> {
    let dim = two_l as usize + 1;
    let l = two_l as f64 / 2.0;
    // ladder operators in the basis m = l, l−1, …, −l
    let m_of = |k: usize| l - k as f64;
    let mut s_plus = vec![0.0_f64; dim * dim];
    let mut s_minus = vec![0.0_f64; dim * dim];
    for k in 0..dim {
        let m = m_of(k);
        if k >= 1 {
            s_plus[(k - 1) * dim + k] = num_traits::Float::sqrt(l * (l + 1.0) - m * (m + 1.0));
        }
        if k + 1 < dim {
            s_minus[(k + 1) * dim + k] = num_traits::Float::sqrt(l * (l + 1.0) - m * (m - 1.0));
        }
    }
    let mut sx = vec![0.0_f64; dim * dim];
    let mut a = vec![0.0_f64; dim * dim]; // S₊ − S₋, real antisymmetric
    for k in 0..dim * dim {
        sx[k] = 0.5 * (s_plus[k] + s_minus[k]);
        a[k] = s_plus[k] - s_minus[k];
    }
    let sx2 = matmul(&sx, &sx, dim);
    // S_y = −iA/2 so S_y² = −A²/4, real symmetric
    let a2 = matmul(&a, &a, dim);
    let sy2: Vec<f64> = a2.iter().map(|v| -v / 4.0).collect();
    let mut sz2 = vec![0.0_f64; dim * dim];
    for k in 0..dim {
        sz2[k * dim + k] = m_of(k) * m_of(k);
    }

    if params.is_real() {
        let mut h = vec![0.0_f64; dim * dim];
        for k in 0..dim * dim {
            h[k] = params.j1.re * sx2[k] + params.j2.re * sy2[k] + params.j3.re * sz2[k];
        }
        let vals = eigvals_symmetric(&h, dim)?;
        Ok(TopSpectrum {
            two_l,
            dim,
            hermitian: true,
            eigenvalues: vals.into_iter().map(|v| cx(v, 0.0)).collect(),
        })
    } else {
        let mut h = vec![cx(0.0, 0.0); dim * dim];
        for k in 0..dim * dim {
            h[k] = params.j1 * sx2[k] + params.j2 * sy2[k] + params.j3 * sz2[k];
        }
        let mut vals = eigvals_complex(&h, dim)?;
        vals.sort_unstable_by(|x, y| {
            x.re.partial_cmp(&y.re)
                .unwrap()
                .then(x.im.partial_cmp(&y.im).unwrap())
        });
        Ok(TopSpectrum {
            two_l,
            dim,
            hermitian: false,
            eigenvalues: vals,
        })
    }
}

fn matmul(a: &[f64], b: &[f64], n: usize) -> Vec<f64> {
    let mut out = vec![0.0_f64; n * n];
    for r in 0..n {
        for k in 0..n {
            let ark = a[r * n + k];
            if ark == 0.0 {
                continue;
            }
            for c in 0..n {
                out[r * n + c] += ark * b[k * n + c];
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flow::sample_onshell;
    use crate::rng::Rng;
    use crate::symplectic::{
        casimir, dirac_bracket, spin_matrix, Constraint, Coord, RealityClass,
    };

    fn c(re: f64) -> Complex {
        cx(re, 0.0)
    }

    #[test]
    fn isotropic_energy_is_half_casimir() {
        let mut rng = Rng::new(101);
        for _ in 0..20 {
            let x = SpinVector::new(
                rng.complex_box(-1.0, 1.0),
                rng.complex_box(-1.0, 1.0),
                rng.complex_box(-1.0, 1.0),
            );
            let h = top_energy(&x, &TopParams::isotropic(c(1.0)));
            assert!((h - casimir(&x) * 0.5).norm() < 1e-14);
        }
    }

    #[test]
    fn energy_axis_value() {
        let x = SpinVector::new(c(1.0), c(0.0), c(0.0));
        let p = TopParams::new(c(0.7), c(2.0), c(-1.0));
        assert_eq!(top_energy(&x, &p), c(0.35));
    }

    #[test]
    fn curve_energy_matches_lattice_sum_oracle() {
        // At τ = i the curve-matched J equal the printed half-period values
        // (℘(1/2), ℘((1+τ)/2), ℘(τ/2)); recompute the energy term-by-term
        // with the independent lattice-sum ℘.
        let curve = EllipticCurve::new(cx(0.0, 1.0)).unwrap();
        let params = TopParams::from_curve(&curve).unwrap();
        let lattice_wp = |z: Complex| {
            let mut sum = cx(1.0, 0.0) / (z * z);
            for m in -120i64..=120 {
                for n in -120i64..=120 {
                    if m == 0 && n == 0 {
                        continue;
                    }
                    let w = cx(m as f64, n as f64);
                    let d = z - w;
                    sum += cx(1.0, 0.0) / (d * d) - cx(1.0, 0.0) / (w * w);
                }
            }
            sum
        };
        let e1 = lattice_wp(cx(0.5, 0.0));
        let e2 = lattice_wp(cx(0.5, 0.5));
        let e3 = lattice_wp(cx(0.0, 0.5));
        let x = SpinVector::new(c(0.7), c(-0.4), c(1.1));
        let h = top_energy(&x, &params);
        let oracle = (e1 * x.x1 * x.x1 - e2 * x.x2 * x.x2 + e3 * x.x3 * x.x3) * 0.5;
        assert!(
            (h - oracle).norm() <= 1e-4 * oracle.norm().max(1.0),
            "impl {h} vs lattice oracle {oracle}"
        );
    }

    #[test]
    fn vector_field_vanishes_at_zero_momentum() {
        let pt = PhasePoint::new(
            RealityClass::ComplexV,
            [c(0.0), c(0.0), c(0.0)],
            [c(1.0), c(0.0), c(0.0)],
        );
        let f = top_vector_field(&pt, &TopParams::new(c(1.0), c(2.0), c(3.0))).unwrap();
        for v in f {
            assert_eq!(v, c(0.0));
        }
    }

    #[test]
    fn vector_field_matches_dirac_flow_oracle() {
        let mut rng = Rng::new(103);
        let params = TopParams::new(cx(0.9, 0.1), cx(-0.5, 0.2), cx(1.7, 0.0));
        let h = TopEnergyObs(params);
        for _ in 0..25 {
            let pt = sample_onshell(RealityClass::ComplexV, &mut rng);
            let field = top_vector_field(&pt, &params).unwrap();
            for k in 0..6 {
                let rate = dirac_bracket(&h, &Coord(k), &pt).unwrap();
                assert!(
                    (rate - field[k]).norm() < 1e-8,
                    "coord {k}: dirac {rate} vs field {}",
                    field[k]
                );
            }
        }
    }

    #[test]
    fn vector_field_is_constraint_tangent() {
        let mut rng = Rng::new(107);
        let params = TopParams::new(c(1.3), c(0.4), c(-0.8));
        for _ in 0..25 {
            let pt = sample_onshell(RealityClass::ComplexV, &mut rng);
            let field = top_vector_field(&pt, &params).unwrap();
            for i in 1..=2usize {
                let grad = Constraint(i).grad(&pt);
                let mut dot = cx(0.0, 0.0);
                for k in 0..6 {
                    dot += grad[k] * field[k];
                }
                assert!(dot.norm() < 1e-12, "c{i} drift rate {dot}");
            }
        }
    }

    #[test]
    fn spin_rhs_fixed_points() {
        let params = TopParams::new(c(1.0), c(2.0), c(3.0));
        let r = top_spin_rhs(&SpinVector::new(c(1.0), c(0.0), c(0.0)), &params);
        assert_eq!(r.x1, c(0.0));
        assert_eq!(r.x2, c(0.0));
        assert_eq!(r.x3, c(0.0));
        let iso = TopParams::isotropic(c(0.8));
        let r = top_spin_rhs(&SpinVector::new(c(0.3), c(-0.7), c(0.5)), &iso);
        assert!(r.x1.norm() + r.x2.norm() + r.x3.norm() < 1e-15);
    }

    #[test]
    fn spin_rhs_matches_chain_rule_oracle() {
        let mut rng = Rng::new(109);
        let params = TopParams::new(cx(0.6, -0.1), cx(1.1, 0.3), cx(-0.4, 0.0));
        for _ in 0..25 {
            let pt = sample_onshell(RealityClass::ComplexV, &mut rng);
            let field = top_vector_field(&pt, &params).unwrap();
            let x = collective_spin(&pt);
            let want = top_spin_rhs(&x, &params);
            for (alpha, w) in [(1usize, want.x1), (2, want.x2), (3, want.x3)] {
                let grad = SpinComponent(alpha).grad(&pt);
                let mut rate = cx(0.0, 0.0);
                for k in 0..6 {
                    rate += grad[k] * field[k];
                }
                assert!((rate - w).norm() < 1e-8, "alpha {alpha}");
            }
        }
    }

    #[test]
    fn lax_residue_is_spin_matrix() {
        let curve = EllipticCurve::new(cx(0.0, 1.0)).unwrap();
        let x = SpinVector::new(cx(0.7, 0.1), cx(-0.4, 0.3), cx(1.1, -0.2));
        let z = cx(1e-4, 0.0);
        let sample = top_lax(&x, z, &curve).unwrap();
        let diff = sample.l.scale(z) - spin_matrix(&x);
        assert!(diff.norm_inf() <= 1e-3, "residue deviation {}", diff.norm_inf());
    }

    #[test]
    fn lax_quasi_periodicities() {
        for tau in [cx(0.0, 1.0), cx(0.2, 0.8)] {
            let curve = EllipticCurve::new(tau).unwrap();
            let x = SpinVector::new(cx(0.7, 0.1), cx(-0.4, 0.3), cx(1.1, -0.2));
            let z = cx(0.31, 0.13);
            let l = top_lax(&x, z, &curve).unwrap().l;
            let scale = l.norm_inf();

            let l1 = top_lax(&x, z + 1.0, &curve).unwrap().l;
            let conj1 = sigma3() * l * sigma3();
            assert!((l1 - conj1).norm_inf() <= 1e-9 * scale);

            let ltau = top_lax(&x, z + tau, &curve).unwrap().l;
            let conj_tau = sigma1() * l * sigma1();
            assert!((ltau - conj_tau).norm_inf() <= 1e-9 * scale);
        }
    }

    #[test]
    fn lax_trace_is_affine_in_wp() {
        // ½tr L²(z) = 2H₂℘(z) + 2H₀ with the curve-matched inertia.
        let curve = EllipticCurve::new(cx(0.2, 0.8)).unwrap();
        let params = TopParams::from_curve(&curve).unwrap();
        let x = SpinVector::new(cx(0.7, 0.1), cx(-0.4, 0.3), cx(1.1, -0.2));
        let h2 = top_energy(&x, &TopParams::isotropic(c(1.0)));
        let h0 = top_energy(&x, &params);
        let samples = [
            cx(0.23, 0.11),
            cx(0.41, -0.08),
            cx(0.17, 0.29),
            cx(0.36, 0.21),
            cx(0.29, -0.17),
        ];
        for z in samples {
            let t = top_lax(&x, z, &curve).unwrap().half_trace_sq();
            let wp = curve.wp(z).unwrap();
            let predicted = wp * h2 * 2.0 + h0 * 2.0;
            assert!(
                (t - predicted).norm() <= 1e-9 * predicted.norm().max(1.0),
                "z {z}: {t} vs {predicted}"
            );
        }
    }

    #[test]
    fn quantum_isotropic_spectrum() {
        for two_l in [1u32, 2, 3, 4, 7, 10, 20] {
            let l = two_l as f64 / 2.0;
            let j = 0.85;
            let spec = quantum_top_spectrum(two_l, &TopParams::isotropic(c(j))).unwrap();
            assert!(spec.hermitian);
            assert_eq!(spec.eigenvalues.len(), two_l as usize + 1);
            let want = j * l * (l + 1.0);
            for ev in &spec.eigenvalues {
                assert!((ev - c(want)).norm() < 1e-12, "l={l}: {ev} vs {want}");
            }
        }
    }

    #[test]
    fn quantum_half_spin() {
        let p = TopParams::new(c(0.9), c(1.7), c(-0.3));
        let spec = quantum_top_spectrum(1, &p).unwrap();
        let want = (0.9 + 1.7 - 0.3) / 4.0;
        assert_eq!(spec.eigenvalues.len(), 2);
        for ev in &spec.eigenvalues {
            assert!((ev - c(want)).norm() < 1e-13);
        }
    }

    #[test]
    fn quantum_spin_one_matches_pair_sums() {
        // closed-form oracle checked through elementary symmetric functions
        let (j1, j2, j3) = (0.6, 1.9, -0.7);
        let spec = quantum_top_spectrum(2, &TopParams::new(c(j1), c(j2), c(j3))).unwrap();
        let mut want = [j1 + j2, j2 + j3, j3 + j1];
        want.sort_unstable_by(|a, b| a.partial_cmp(b).unwrap());
        let got: Vec<f64> = spec.eigenvalues.iter().map(|z| z.re).collect();
        for (g, w) in got.iter().zip(want.iter()) {
            assert!((g - w).abs() < 1e-12, "{g} vs {w}");
        }
        // symmetric-function cross-check of the oracle itself
        let sum: f64 = want.iter().sum();
        assert!((sum - 2.0 * (j1 + j2 + j3)).abs() < 1e-13);
    }

    #[test]
    fn quantum_complex_inertia_flagged() {
        let spec = quantum_top_spectrum(2, &TopParams::new(cx(1.0, 0.5), c(2.0), c(0.3))).unwrap();
        assert!(!spec.hermitian);
        assert_eq!(spec.eigenvalues.len(), 3);
        // trace is preserved by the eigensolver
        let tr: Complex = spec.eigenvalues.iter().sum();
        // tr H = Σ J_a tr S_a² = l(l+1)(2l+1)/3 Σ J_a = 2 Σ J_a for l = 1
        let want = (cx(1.0, 0.5) + 2.0 + 0.3) * 2.0;
        assert!((tr - want).norm() < 1e-10);
    }
}
