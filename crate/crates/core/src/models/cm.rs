//! The spin-extended two-body Calogero–Moser system and its hyperbolic and
//! trigonometric degenerations.
//!
//! Besides the canonical pair (v, u) the coupling carries internal phase
//! space: X₊X₋ = X₁² − X₂² replaces the constant, with the collective spin
//! constrained to X₃ = 0. The coupling value is conserved while the
//! underlying (p, q) keep moving, driven by the potential.

use super::{e2pi, LaxSample, ModelError, CM_COUPLING};
use crate::elliptic::EllipticCurve;
use crate::mat2::{e12, e21, sigma3, Mat2};
use crate::symplectic::{
    collective_spin, constraints, Observable, PhasePoint, SpinComponent, SymplecticError,
};
use crate::{cx, Complex};

/// Which real form of the potential the system runs on: the elliptic
/// complex system (V) or the printed sinh²/sin² degenerations (III/IV).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CmVariant {
    V,
    Iii,
    Iv,
}

impl CmVariant {
    pub fn label(&self) -> &'static str {
        match self {
            CmVariant::V => "V",
            CmVariant::Iii => "III",
            CmVariant::Iv => "IV",
        }
    }
}

/// Calogero–Moser state: canonical pair (v, u) plus the spin sector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CmState {
    pub v: Complex,
    pub u: Complex,
    pub spin: PhasePoint,
}

impl CmState {
    pub fn new(v: Complex, u: Complex, spin: PhasePoint) -> Self {
        CmState { v, u, spin }
    }

    /// X₃ must vanish on a valid CM state (the diagonal moment constraint).
    pub fn x3_residual(&self) -> f64 {
        collective_spin(&self.spin).x3.norm()
    }

    fn check(&self) -> Result<(), ModelError> {
        let (c1, c2) = constraints(&self.spin);
        let gate = super::FIELD_GATE * crate::symplectic::constraint_scale(&self.spin);
        if c1.norm() > gate || c2.norm() > gate {
            return Err(ModelError::Symplectic(SymplecticError::OffShell {
                c1: c1.norm(),
                c2: c2.norm(),
            }));
        }
        if self.x3_residual() > gate {
            return Err(ModelError::BadState("CM spin must satisfy X3 = 0"));
        }
        Ok(())
    }
}

/// Potential factor multiplying X₊X₋ in H₀, and its u-derivative.
fn potential(
    u: Complex,
    curve: Option<&EllipticCurve>,
    variant: CmVariant,
) -> Result<(Complex, Complex), ModelError> {
    match variant {
        CmVariant::V => {
            let curve = curve.ok_or(ModelError::BadState("elliptic variant requires a curve"))?;
            let wp = curve.wp(u * 2.0)?;
            let wp_d = curve.wp_prime(u * 2.0)?;
            Ok((wp * CM_COUPLING, wp_d * (2.0 * CM_COUPLING)))
        }
        CmVariant::Iii => {
            let s = (u * 2.0).sinh();
            if s.norm() < 1e-10 {
                return Err(ModelError::PotentialPole);
            }
            let c = (u * 2.0).cosh();
            let w = cx(1.0, 0.0) / (s * s);
            Ok((w, -c * 4.0 / (s * s * s)))
        }
        CmVariant::Iv => {
            let s = (u * 2.0).sin();
            if s.norm() < 1e-10 {
                return Err(ModelError::PotentialPole);
            }
            let c = (u * 2.0).cos();
            let w = cx(1.0, 0.0) / (s * s);
            Ok((w, -c * 4.0 / (s * s * s)))
        }
    }
}

/// The two conserved energies: H₂ = ½X₊X₋ and the variant's H₀
/// (½v² + CM_COUPLING·X₊X₋℘(2u) for V; ½v² + X₊X₋/sinh²(2u) and
/// ½v² + X₊X₋/sin²(2u) for III/IV).
pub fn cm_energy(
    state: &CmState,
    curve: Option<&EllipticCurve>,
    variant: CmVariant,
) -> Result<(Complex, Complex), ModelError> {
    let x = collective_spin(&state.spin);
    let coupling = x.x1 * x.x1 - x.x2 * x.x2; // X₊X₋
    let h2 = coupling * 0.5;
    let (w, _) = potential(state.u, curve, variant)?;
    let h0 = state.v * state.v * 0.5 + coupling * w;
    Ok((h2, h0))
}

/// Twisted Lax matrix L(z) = vσ₃ + X₊e(2u)φ(2u,z)E₂₁ + X₋e(−2u)φ(−2u,z)E₁₂,
/// satisfying L(z+1) = L(z) and L(z+τ) = Q(u)L(z)Q(u)⁻¹ with
/// Q(u) = diag(e(u), e(−u)).
pub fn cm_lax(
    state: &CmState,
    z: Complex,
    curve: &EllipticCurve,
) -> Result<LaxSample, ModelError> {
    let x = collective_spin(&state.spin);
    let x_plus = x.x1 + x.x2;
    let x_minus = x.x1 - x.x2;
    let two_u = state.u * 2.0;
    let phi_p = curve.kronecker_phi(two_u, z)?;
    let phi_m = curve.kronecker_phi(-two_u, z)?;
    let l = sigma3().scale(state.v)
        + e21().scale(x_plus * e2pi(two_u) * phi_p)
        + e12().scale(x_minus * e2pi(-two_u) * phi_m);
    Ok(LaxSample { z, l })
}

/// Diagonal twist of the τ-cycle for the trivial-bundle Lax.
pub fn cm_twist(u: Complex) -> Mat2 {
    Mat2::diag(e2pi(u), e2pi(-u))
}

/// Rates of a CM state under the H₀ flow.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CmTangent {
    pub v_dot: Complex,
    pub u_dot: Complex,
    /// Spin rates in coordinate order (ṗ₀, ṗ₁, ṗ₃, q̇₀, q̇₁, q̇₃).
    pub spin_dot: [Complex; 6],
}

/// Hamiltonian flow of H₀: u̇ = v, v̇ = −X₊X₋·W′(u), and the spin sector
/// follows the bracket flow of the coupling X₊X₋ scaled by the potential
/// factor W(u). The flow conserves X₊X₋ and X₃ identically.
pub fn cm_vector_field(
    state: &CmState,
    curve: Option<&EllipticCurve>,
    variant: CmVariant,
) -> Result<CmTangent, ModelError> {
    state.check()?;
    let x = collective_spin(&state.spin);
    let coupling = x.x1 * x.x1 - x.x2 * x.x2;
    let (w, w_d) = potential(state.u, curve, variant)?;
    let g1 = SpinComponent(1).grad(&state.spin);
    let g2 = SpinComponent(2).grad(&state.spin);
    // ∇(X₊X₋) = 2X₁∇X₁ − 2X₂∇X₂
    let mut grad = [cx(0.0, 0.0); 6];
    for k in 0..6 {
        grad[k] = x.x1 * g1[k] * 2.0 - x.x2 * g2[k] * 2.0;
    }
    let mut spin_dot = [cx(0.0, 0.0); 6];
    for k in 0..3 {
        spin_dot[k + 3] = w * grad[k]; // q̇ = W ∂g/∂p
        spin_dot[k] = -w * grad[k + 3]; // ṗ = −W ∂g/∂q
    }
    Ok(CmTangent {
        v_dot: -coupling * w_d,
        u_dot: state.v,
        spin_dot,
    })
}
