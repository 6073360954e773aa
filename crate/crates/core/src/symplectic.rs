//! The constrained Darboux phase space and its Dirac brackets.
//!
//! Upstairs the coordinates (p₀, p₁, p₃, q₀, q₁, q₃) are canonical,
//! `{p_j, q_k} = δ_jk`. Two second-class constraints
//!
//! ```text
//! c₁ = q₀² − q₁² − q₃² − 1,    c₂ = q₀p₀ + q₁p₁ + q₃p₃
//! ```
//!
//! cut out the cotangent bundle of the space of unimodular symmetric
//! matrices. The Dirac bracket corrects the canonical one by the constraint
//! matrix `C_ij = {c_i, c_j}` (equal to −2 on-shell for the (1,2) entry):
//!
//! ```text
//! {f,g}_D = {f,g} − Σ_ij {f,c_i} (C⁻¹)_ij {c_j,g}.
//! ```
//!
//! The collective spin X(p,q) intertwines these coordinates with the
//! Lie–Poisson sl(2) structure: {X₁,X₂} = −X₃, {X₂,X₃} = −X₁,
//! {X₃,X₁} = X₂, with Casimir X₁² − X₂² + X₃². The components of X commute
//! with both constraints identically, so Dirac and canonical brackets agree
//! on functions of X alone.
//!
//! Reality classes are stored as patterns on complex coordinates rather
//! than separate real charts; class preservation is then a testable
//! invariant of every flow.

use core::fmt;

use crate::mat2::{sigma1, sigma2, sigma3, Mat2};
use crate::{cx, Complex};

/// Finite-difference step for observable gradients without analytic ones.
pub const FD_STEP: f64 = 1e-6;

/// Default on-shell gate for Dirac-bracket evaluation.
pub const ONSHELL_TOL: f64 = 1e-8;

/// Errors from phase-space operations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SymplecticError {
    /// Point violates the constraints beyond the allowed tolerance.
    OffShell { c1: f64, c2: f64 },
    /// Constraint values too large for the projection basin.
    OutsideBasin { c1: f64, c2: f64 },
    /// ‖q‖ ≈ 0: no usable Newton direction.
    DegenerateDirection,
    /// Projection did not reach tolerance within the iteration cap.
    NoConvergence { iterations: usize },
    /// |det C| below threshold in the Dirac correction.
    SingularConstraintMatrix,
    /// Singular group element where an inverse is required.
    SingularMatrix,
    /// ζ must be symmetric traceless.
    BadZeta,
}

impl fmt::Display for SymplecticError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SymplecticError::OffShell { c1, c2 } => {
                write!(f, "point off-shell: |c1|={c1:.3e}, |c2|={c2:.3e}")
            }
            SymplecticError::OutsideBasin { c1, c2 } => {
                write!(
                    f,
                    "constraints outside projection basin: |c1|={c1:.3e}, |c2|={c2:.3e}"
                )
            }
            SymplecticError::DegenerateDirection => write!(f, "degenerate direction: ‖q‖ ≈ 0"),
            SymplecticError::NoConvergence { iterations } => {
                write!(f, "projection failed to converge in {iterations} iterations")
            }
            SymplecticError::SingularConstraintMatrix => {
                write!(f, "constraint matrix numerically singular")
            }
            SymplecticError::SingularMatrix => write!(f, "singular matrix"),
            SymplecticError::BadZeta => write!(f, "zeta must be symmetric and traceless"),
        }
    }
}

impl core::error::Error for SymplecticError {}

/// Reality class of a phase point.
///
/// `ComplexV`: all six coordinates complex. `TypeIII`: (p₀, q₀) real and the
/// (1, 3) pairs purely imaginary. `TypeIV`: all six coordinates real.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RealityClass {
    ComplexV,
    TypeIII,
    TypeIV,
}

impl RealityClass {
    pub fn label(&self) -> &'static str {
        match self {
            RealityClass::ComplexV => "complex_v",
            RealityClass::TypeIII => "type_iii",
            RealityClass::TypeIV => "type_iv",
        }
    }
}

/// A point of the six-dimensional Darboux chart with its reality tag.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhasePoint {
    pub p0: Complex,
    pub p1: Complex,
    pub p3: Complex,
    pub q0: Complex,
    pub q1: Complex,
    pub q3: Complex,
    pub class: RealityClass,
}

impl PhasePoint {
    pub fn new(class: RealityClass, p: [Complex; 3], q: [Complex; 3]) -> Self {
        PhasePoint {
            p0: p[0],
            p1: p[1],
            p3: p[2],
            q0: q[0],
            q1: q[1],
            q3: q[2],
            class,
        }
    }

    /// Coordinates in bracket order (p₀, p₁, p₃, q₀, q₁, q₃).
    pub fn coords(&self) -> [Complex; 6] {
        [self.p0, self.p1, self.p3, self.q0, self.q1, self.q3]
    }

    pub fn from_coords(class: RealityClass, c: [Complex; 6]) -> Self {
        PhasePoint {
            p0: c[0],
            p1: c[1],
            p3: c[2],
            q0: c[3],
            q1: c[4],
            q3: c[5],
            class,
        }
    }

    pub fn p(&self) -> [Complex; 3] {
        [self.p0, self.p1, self.p3]
    }

    pub fn q(&self) -> [Complex; 3] {
        [self.q0, self.q1, self.q3]
    }

    /// Max entrywise distance between two points.
    pub fn distance(&self, other: &PhasePoint) -> f64 {
        let a = self.coords();
        let b = other.coords();
        let mut m = 0.0_f64;
        for k in 0..6 {
            m = m.max((a[k] - b[k]).norm());
        }
        m
    }
}

/// Collective spin components of a point, X₁ = q₀p₁ + q₁p₀ and its cyclic
/// partners. The matrix form carries i·X₂ on σ₂, so where a reality
/// statement says "the σ₂ coefficient is imaginary" the component X₂ here
/// is real.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinVector {
    pub x1: Complex,
    pub x2: Complex,
    pub x3: Complex,
}

impl SpinVector {
    pub fn new(x1: Complex, x2: Complex, x3: Complex) -> Self {
        SpinVector { x1, x2, x3 }
    }

    /// Deviation from the class's spin reality pattern. TypeIII: X₁, X₃
    /// purely imaginary and X₂ real (anti-Hermitian spin matrix); TypeIV:
    /// all components real (real spin matrix).
    pub fn reality_residual(&self, class: RealityClass) -> f64 {
        match class {
            RealityClass::ComplexV => 0.0,
            RealityClass::TypeIII => {
                let mut m: f64 = self.x1.re.abs();
                m = m.max(self.x2.im.abs());
                m = m.max(self.x3.re.abs());
                m
            }
            RealityClass::TypeIV => {
                let mut m: f64 = self.x1.im.abs();
                m = m.max(self.x2.im.abs());
                m = m.max(self.x3.im.abs());
                m
            }
        }
    }
}

/// Gauge-invariant matrix data of a decomposed group element: P and Q
/// symmetric, X = PQ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatrixPair {
    pub p: Mat2,
    pub q: Mat2,
    pub x: Mat2,
}

/// Constraint values (c₁, c₂) at a point.
pub fn constraints(pt: &PhasePoint) -> (Complex, Complex) {
    let c1 = pt.q0 * pt.q0 - pt.q1 * pt.q1 - pt.q3 * pt.q3 - 1.0;
    let c2 = pt.q0 * pt.p0 + pt.q1 * pt.p1 + pt.q3 * pt.p3;
    (c1, c2)
}

/// Natural magnitude of the two quadratic constraint forms at a point:
/// tolerances on c₁ and c₂ are measured relative to this.
pub fn constraint_scale(pt: &PhasePoint) -> f64 {
    let q_sq = pt.q0.norm_sqr() + pt.q1.norm_sqr() + pt.q3.norm_sqr();
    let p_sq = pt.p0.norm_sqr() + pt.p1.norm_sqr() + pt.p3.norm_sqr();
    q_sq.max(num_traits::Float::sqrt(q_sq * p_sq)).max(1.0)
}

/// Max constraint magnitude at a point.
pub fn constraint_norm(pt: &PhasePoint) -> f64 {
    let (c1, c2) = constraints(pt);
    c1.norm().max(c2.norm())
}

/// Allowed constraint magnitude at the entry of [`project_onshell`].
pub const PROJECTION_BASIN: f64 = 1e-1;

/// Newton projection back to the constraint surface. Each sweep first
/// rescales q radially, q ← q/√(1+c₁), which solves c₁ = 0 outright, then
/// removes c₂ along the class-compatible direction q̃ = (q₀, −q₁, −q₃),
/// whose pairing q·q̃ = 1 + c₁ never degenerates near the surface (the
/// naive direction q has q·q = 0 on a whole circle of the type III
/// sphere). Both moves preserve the reality pattern: the coefficients are
/// real whenever the constraints are.
///
/// The tolerance is applied relative to the coordinate scale: c₁ and c₂
/// are quadratic forms, so their floating-point floor grows with |q|², and
/// demanding less would spin forever on large-amplitude states.
pub fn project_onshell(pt: &PhasePoint, tol: f64) -> Result<PhasePoint, SymplecticError> {
    let q_mag = pt.q0.norm_sqr() + pt.q1.norm_sqr() + pt.q3.norm_sqr();
    if q_mag < 1e-12 {
        return Err(SymplecticError::DegenerateDirection);
    }
    let (c1, c2) = constraints(pt);
    if c1.norm() > PROJECTION_BASIN || c2.norm() > PROJECTION_BASIN {
        return Err(SymplecticError::OutsideBasin {
            c1: c1.norm(),
            c2: c2.norm(),
        });
    }
    let mut out = *pt;
    const MAX_ITER: usize = 50;
    for _ in 0..MAX_ITER {
        let (c1, c2) = constraints(&out);
        let scale = constraint_scale(&out);
        if c1.norm() <= tol * scale && c2.norm() <= tol * scale {
            return Ok(out);
        }
        // radial rescale: (1+c₁) → 1
        let one_plus = c1 + 1.0;
        if one_plus.norm() < 1e-12 {
            return Err(SymplecticError::DegenerateDirection);
        }
        let factor = cx(1.0, 0.0) / one_plus.sqrt();
        out.q0 *= factor;
        out.q1 *= factor;
        out.q3 *= factor;
        // c₂ removal along q̃, exactly linear with unit pairing on-shell
        let (c1b, c2b) = constraints(&out);
        let beta = -c2b / (c1b + 1.0);
        out.p0 += beta * out.q0;
        out.p1 -= beta * out.q1;
        out.p3 -= beta * out.q3;
        let _ = c2;
    }
    Err(SymplecticError::NoConvergence {
        iterations: MAX_ITER,
    })
}

/// Collective spin map: X₁ = q₀p₁ + q₁p₀, X₂ = q₃p₁ − q₁p₃,
/// X₃ = q₀p₃ + q₃p₀. The scalar X₀ = q·p equals c₂ and is omitted.
pub fn collective_spin(pt: &PhasePoint) -> SpinVector {
    SpinVector {
        x1: pt.q0 * pt.p1 + pt.q1 * pt.p0,
        x2: pt.q3 * pt.p1 - pt.q1 * pt.p3,
        x3: pt.q0 * pt.p3 + pt.q3 * pt.p0,
    }
}

/// Casimir of the Lie–Poisson algebra: X₁² − X₂² + X₃².
pub fn casimir(x: &SpinVector) -> Complex {
    x.x1 * x.x1 - x.x2 * x.x2 + x.x3 * x.x3
}

/// Traceless spin matrix X₁σ₁ + iX₂σ₂ + X₃σ₃ = [[X₃, X₊], [X₋, −X₃]].
pub fn spin_matrix(x: &SpinVector) -> Mat2 {
    let i = cx(0.0, 1.0);
    sigma1().scale(x.x1) + sigma2().scale(i * x.x2) + sigma3().scale(x.x3)
}

/// Builds the symmetric pair P = g⁻¹ζ(gᵀ)⁻¹, Q = gᵀg and X = PQ = g⁻¹ζg.
pub fn pq_decompose(g: &Mat2, zeta: &Mat2) -> Result<MatrixPair, SymplecticError> {
    if (zeta.b - zeta.c).norm() > 1e-12 * zeta.norm_inf().max(1.0)
        || zeta.trace().norm() > 1e-12 * zeta.norm_inf().max(1.0)
    {
        return Err(SymplecticError::BadZeta);
    }
    let g_inv = g.inverse().ok_or(SymplecticError::SingularMatrix)?;
    let gt_inv = g
        .transpose()
        .inverse()
        .ok_or(SymplecticError::SingularMatrix)?;
    let p = g_inv * *zeta * gt_inv;
    let q = g.transpose() * *g;
    let x = p * q;
    Ok(MatrixPair { p, q, x })
}

/// Coadjoint moment S = g⁻¹ · diag(ν, −ν) · g.
pub fn coadjoint_moment(nu: Complex, g: &Mat2) -> Result<Mat2, SymplecticError> {
    let g_inv = g.inverse().ok_or(SymplecticError::SingularMatrix)?;
    Ok(g_inv * Mat2::diag(nu, -nu) * *g)
}

/// Max deviation of the coordinates from the class's reality pattern.
pub fn reality_residual(pt: &PhasePoint) -> f64 {
    match pt.class {
        RealityClass::ComplexV => 0.0,
        RealityClass::TypeIII => {
            let mut m: f64 = pt.p0.im.abs().max(pt.q0.im.abs());
            for v in [pt.p1, pt.q1, pt.p3, pt.q3] {
                m = m.max(v.re.abs());
            }
            m
        }
        RealityClass::TypeIV => {
            let mut m = 0.0_f64;
            for v in pt.coords() {
                m = m.max(v.im.abs());
            }
            m
        }
    }
}

/// Conjugate-partner map for a site attached to the mirror marked point,
/// type III pairing: the partner's spin matrix is −(dagger) of the
/// original, the anti-Hermitian matching of residues. Realized on
/// coordinates as q′ = (q̄₀, −q̄₁, −q̄₃), p′ = (p̄₀, −p̄₁, −p̄₃); constraints
/// map to their conjugates.
pub fn conjugate_partner_iii(pt: &PhasePoint) -> PhasePoint {
    PhasePoint {
        p0: pt.p0.conj(),
        p1: -pt.p1.conj(),
        p3: -pt.p3.conj(),
        q0: pt.q0.conj(),
        q1: -pt.q1.conj(),
        q3: -pt.q3.conj(),
        class: pt.class,
    }
}

/// Type IV pairing: the partner's spin matrix is the entrywise conjugate
/// of the original. Realized as q′ = q̄, p′ = p̄.
pub fn conjugate_partner_iv(pt: &PhasePoint) -> PhasePoint {
    PhasePoint {
        p0: pt.p0.conj(),
        p1: pt.p1.conj(),
        p3: pt.p3.conj(),
        q0: pt.q0.conj(),
        q1: pt.q1.conj(),
        q3: pt.q3.conj(),
        class: pt.class,
    }
}

/// An observable on the phase space, with an optional analytic gradient;
/// without one, a central finite difference at step [`FD_STEP`] is used.
/// Gradient order matches [`PhasePoint::coords`].
pub trait Observable {
    fn eval(&self, pt: &PhasePoint) -> Complex;

    fn grad(&self, pt: &PhasePoint) -> [Complex; 6] {
        let mut out = [cx(0.0, 0.0); 6];
        let base = pt.coords();
        for (k, slot) in out.iter_mut().enumerate() {
            let mut hi = base;
            let mut lo = base;
            hi[k] += FD_STEP;
            lo[k] -= FD_STEP;
            let f_hi = self.eval(&PhasePoint::from_coords(pt.class, hi));
            let f_lo = self.eval(&PhasePoint::from_coords(pt.class, lo));
            *slot = (f_hi - f_lo) / (2.0 * FD_STEP);
        }
        out
    }
}

impl<F: Fn(&PhasePoint) -> Complex> Observable for F {
    fn eval(&self, pt: &PhasePoint) -> Complex {
        self(pt)
    }
}

/// Coordinate function, index in bracket order (p₀, p₁, p₃, q₀, q₁, q₃).
#[derive(Debug, Clone, Copy)]
pub struct Coord(pub usize);

impl Observable for Coord {
    fn eval(&self, pt: &PhasePoint) -> Complex {
        pt.coords()[self.0]
    }

    fn grad(&self, _pt: &PhasePoint) -> [Complex; 6] {
        let mut g = [cx(0.0, 0.0); 6];
        g[self.0] = cx(1.0, 0.0);
        g
    }
}

/// Spin component X_α as an observable with analytic gradient.
#[derive(Debug, Clone, Copy)]
pub struct SpinComponent(pub usize);

impl Observable for SpinComponent {
    fn eval(&self, pt: &PhasePoint) -> Complex {
        let x = collective_spin(pt);
        match self.0 {
            1 => x.x1,
            2 => x.x2,
            _ => x.x3,
        }
    }

    fn grad(&self, pt: &PhasePoint) -> [Complex; 6] {
        let z = cx(0.0, 0.0);
        match self.0 {
            1 => [pt.q1, pt.q0, z, pt.p1, pt.p0, z],
            2 => [z, pt.q3, -pt.q1, z, -pt.p3, pt.p1],
            _ => [pt.q3, z, pt.q0, pt.p3, z, pt.p0],
        }
    }
}

/// Constraint c_i as an observable with analytic gradient, i ∈ {1, 2}.
#[derive(Debug, Clone, Copy)]
pub struct Constraint(pub usize);

impl Observable for Constraint {
    fn eval(&self, pt: &PhasePoint) -> Complex {
        let (c1, c2) = constraints(pt);
        if self.0 == 1 {
            c1
        } else {
            c2
        }
    }

    fn grad(&self, pt: &PhasePoint) -> [Complex; 6] {
        let z = cx(0.0, 0.0);
        if self.0 == 1 {
            [z, z, z, pt.q0 * 2.0, -pt.q1 * 2.0, -pt.q3 * 2.0]
        } else {
            [pt.q0, pt.q1, pt.q3, pt.p0, pt.p1, pt.p3]
        }
    }
}

/// Casimir as an observable with analytic gradient.
#[derive(Debug, Clone, Copy)]
pub struct CasimirObs;

impl Observable for CasimirObs {
    fn eval(&self, pt: &PhasePoint) -> Complex {
        casimir(&collective_spin(pt))
    }

    fn grad(&self, pt: &PhasePoint) -> [Complex; 6] {
        let x = collective_spin(pt);
        let g1 = SpinComponent(1).grad(pt);
        let g2 = SpinComponent(2).grad(pt);
        let g3 = SpinComponent(3).grad(pt);
        let mut out = [cx(0.0, 0.0); 6];
        for k in 0..6 {
            out[k] = x.x1 * g1[k] * 2.0 - x.x2 * g2[k] * 2.0 + x.x3 * g3[k] * 2.0;
        }
        out
    }
}

/// Canonical bracket {f, g} = Σ_j (∂f/∂p_j ∂g/∂q_j − ∂f/∂q_j ∂g/∂p_j).
pub fn canonical_bracket<F, G>(f: &F, g: &G, pt: &PhasePoint) -> Complex
where
    F: Observable + ?Sized,
    G: Observable + ?Sized,
{
    let gf = f.grad(pt);
    let gg = g.grad(pt);
    let mut sum = cx(0.0, 0.0);
    for k in 0..3 {
        sum += gf[k] * gg[k + 3] - gf[k + 3] * gg[k];
    }
    sum
}

/// Dirac bracket without the on-shell gate. The constraint matrix is built
/// from the actual bracket values at the point, so the formula stays smooth
/// in a neighborhood of the surface.
pub fn dirac_bracket_unchecked<F, G>(
    f: &F,
    g: &G,
    pt: &PhasePoint,
) -> Result<Complex, SymplecticError>
where
    F: Observable + ?Sized,
    G: Observable + ?Sized,
{
    let c1 = Constraint(1);
    let c2 = Constraint(2);
    // C = [[0, γ], [−γ, 0]] with γ = {c₁,c₂}; det C = γ².
    let gamma = canonical_bracket(&c1, &c2, pt);
    if (gamma * gamma).norm() < 1e-12 {
        return Err(SymplecticError::SingularConstraintMatrix);
    }
    let fg = canonical_bracket(f, g, pt);
    let f_c1 = canonical_bracket(f, &c1, pt);
    let f_c2 = canonical_bracket(f, &c2, pt);
    let c1_g = canonical_bracket(&c1, g, pt);
    let c2_g = canonical_bracket(&c2, g, pt);
    // {f,g} − Σ {f,c_i}(C⁻¹)_ij{c_j,g} with C⁻¹ = [[0, −1/γ], [1/γ, 0]]
    Ok(fg + (f_c1 * c2_g - f_c2 * c1_g) / gamma)
}

/// Dirac bracket of two observables at an on-shell point (gate
/// [`ONSHELL_TOL`]).
pub fn dirac_bracket<F, G>(f: &F, g: &G, pt: &PhasePoint) -> Result<Complex, SymplecticError>
where
    F: Observable + ?Sized,
    G: Observable + ?Sized,
{
    let (c1, c2) = constraints(pt);
    if c1.norm() > ONSHELL_TOL || c2.norm() > ONSHELL_TOL {
        return Err(SymplecticError::OffShell {
            c1: c1.norm(),
            c2: c2.norm(),
        });
    }
    dirac_bracket_unchecked(f, g, pt)
}
