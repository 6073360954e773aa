//! Theta-function machinery on the elliptic curve ℂ/(ℤ + τℤ).
//!
//! Everything is built from one series,
//!
//! ```text
//! ϑ(z|τ) = q^{1/8} Σ_{n∈ℤ} (−1)^n exp(πi(n(n+1)τ + 2nz)),   q = exp(2πiτ),
//! ```
//!
//! a translate of the odd Jacobi theta. Derived objects:
//!
//! - Kronecker function `φ(u,z) = ϑ(u+z)ϑ′(0) / (ϑ(u)ϑ(z))`, 1-periodic in z
//!   with `φ(u,z+τ) = e^{−2πiu} φ(u,z)`, and a simple pole `1/z` at 0;
//! - Weierstrass ℘ as `−(log ϑ)″` plus a per-curve additive constant fixed by
//!   the Laurent normalization `℘(z) = 1/z² + O(z²)`;
//! - the three twisted functions ϕ₁, ϕ₂, ϕ₃ attached to the half-periods,
//!   with `ϕ_α(z)² = ℘(z) − ℘(ω_α)`.
//!
//! Series are summed in symmetric pairs `n = k, −k−1` until the pair
//! magnitude drops below `trunc_tol` relative to the running scale, capped
//! at `max_terms`.

use core::f64::consts::PI;
use core::fmt;

use crate::{cx, Complex};

/// Errors from elliptic evaluations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EllipticError {
    /// τ must lie in the upper half plane.
    TauNotInUpperHalfPlane,
    /// trunc_tol must lie in (0, 1e-6].
    BadTruncationTolerance,
    /// max_terms must be at least 16.
    BadMaxTerms,
    /// The series did not converge within `max_terms` terms.
    Truncation { terms: usize },
    /// Evaluation at (or numerically too close to) a lattice point.
    Pole,
    /// ϕ index outside {1, 2, 3}.
    BadAlpha(usize),
}

impl fmt::Display for EllipticError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EllipticError::TauNotInUpperHalfPlane => write!(f, "Im(tau) must be positive"),
            EllipticError::BadTruncationTolerance => {
                write!(f, "trunc_tol must lie in (0, 1e-6]")
            }
            EllipticError::BadMaxTerms => write!(f, "max_terms must be at least 16"),
            EllipticError::Truncation { terms } => {
                write!(f, "theta series did not converge within {terms} terms")
            }
            EllipticError::Pole => write!(f, "evaluation at a lattice point (theta below guard)"),
            EllipticError::BadAlpha(a) => write!(f, "phi index {a} outside 1..=3"),
        }
    }
}

impl core::error::Error for EllipticError {}

/// ℘ at the three half-periods: `e1 = ℘(1/2)`, `e2 = ℘((1+τ)/2)`, `e3 = ℘(τ/2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HalfPeriodValues {
    pub e1: Complex,
    pub e2: Complex,
    pub e3: Complex,
}

/// The elliptic curve Σ_τ = ℂ/(ℤ + τℤ) together with the series-truncation
/// policy and the per-curve constants cached at construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EllipticCurve {
    tau: Complex,
    trunc_tol: f64,
    max_terms: usize,
    /// ϑ′(0), cached: normalizes the Kronecker function and the pole guard.
    theta_d0: Complex,
    /// Additive constant making ℘(z) = 1/z² + O(z²) near 0.
    wp_const: Complex,
}

impl EllipticCurve {
    pub const DEFAULT_TRUNC_TOL: f64 = 1e-13;
    pub const DEFAULT_MAX_TERMS: usize = 200;

    /// Curve with the default truncation policy.
    pub fn new(tau: Complex) -> Result<Self, EllipticError> {
        Self::with_policy(tau, Self::DEFAULT_TRUNC_TOL, Self::DEFAULT_MAX_TERMS)
    }

    /// Curve with an explicit truncation policy.
    pub fn with_policy(
        tau: Complex,
        trunc_tol: f64,
        max_terms: usize,
    ) -> Result<Self, EllipticError> {
        if !(tau.im > 0.0) {
            return Err(EllipticError::TauNotInUpperHalfPlane);
        }
        if !(trunc_tol > 0.0 && trunc_tol <= 1e-6) {
            return Err(EllipticError::BadTruncationTolerance);
        }
        if max_terms < 16 {
            return Err(EllipticError::BadMaxTerms);
        }
        let mut curve = EllipticCurve {
            tau,
            trunc_tol,
            max_terms,
            theta_d0: cx(0.0, 0.0),
            wp_const: cx(0.0, 0.0),
        };
        curve.theta_d0 = curve.theta_series(cx(0.0, 0.0), 1)?;
        curve.wp_const = curve.laurent_constant()?;
        Ok(curve)
    }

    pub fn tau(&self) -> Complex {
        self.tau
    }

    pub fn trunc_tol(&self) -> f64 {
        self.trunc_tol
    }

    pub fn max_terms(&self) -> usize {
        self.max_terms
    }

    /// Cached ϑ′(0).
    pub fn theta_d0(&self) -> Complex {
        self.theta_d0
    }

    /// Cached additive ℘ constant (Laurent normalization).
    pub fn wp_const(&self) -> Complex {
        self.wp_const
    }

    /// The three half-periods (1/2, (1+τ)/2, τ/2).
    pub fn half_periods(&self) -> [Complex; 3] {
        [
            cx(0.5, 0.0),
            (cx(1.0, 0.0) + self.tau) * 0.5,
            self.tau * 0.5,
        ]
    }

    /// d^order/dz^order of the theta series, term-wise differentiated.
    fn theta_series(&self, z: Complex, order: u32) -> Result<Complex, EllipticError> {
        let i = cx(0.0, 1.0);
        let q8 = (i * PI * self.tau / 4.0).exp();
        let mut sum = cx(0.0, 0.0);
        let mut peak = 0.0_f64;
        let mut terms = 0usize;
        let mut quiet_pairs = 0usize;
        let mut k = 0i64;
        loop {
            let mut pair_mag = 0.0_f64;
            for n in [k, -k - 1] {
                let nf = n as f64;
                let expo = i * PI * (self.tau * (nf * nf + nf) + z * (2.0 * nf));
                let mut term = (expo).exp();
                if n.rem_euclid(2) == 1 {
                    term = -term;
                }
                if order > 0 {
                    let factor = i * (2.0 * PI * nf);
                    for _ in 0..order {
                        term *= factor;
                    }
                }
                sum += term;
                let mag = term.norm();
                pair_mag += mag;
                if mag > peak {
                    peak = mag;
                }
                terms += 1;
            }
            let scale = if sum.norm() > peak { sum.norm() } else { peak };
            if k >= 1 && pair_mag <= self.trunc_tol * scale {
                quiet_pairs += 1;
                if quiet_pairs >= 2 {
                    return Ok(sum * q8);
                }
            } else {
                quiet_pairs = 0;
            }
            if terms >= self.max_terms {
                return Err(EllipticError::Truncation { terms });
            }
            k += 1;
        }
    }

    fn guard(&self) -> f64 {
        1e-10 * self.theta_d0.norm()
    }

    /// ϑ(z): entire, 1-periodic, vanishing on the lattice.
    pub fn theta(&self, z: Complex) -> Result<Complex, EllipticError> {
        self.theta_series(z, 0)
    }

    /// ϑ′(z).
    pub fn theta_d(&self, z: Complex) -> Result<Complex, EllipticError> {
        self.theta_series(z, 1)
    }

    /// Kronecker function φ(u,z) = ϑ(u+z)ϑ′(0) / (ϑ(u)ϑ(z)).
    pub fn kronecker_phi(&self, u: Complex, z: Complex) -> Result<Complex, EllipticError> {
        let tu = self.theta(u)?;
        let tz = self.theta(z)?;
        let g = self.guard();
        if tu.norm() < g || tz.norm() < g {
            return Err(EllipticError::Pole);
        }
        let tuz = self.theta(u + z)?;
        Ok(tuz * self.theta_d0 / (tu * tz))
    }

    /// −(log ϑ)″(z), the un-normalized ℘.
    fn neg_log_theta_dd(&self, z: Complex) -> Result<Complex, EllipticError> {
        let t = self.theta(z)?;
        if t.norm() < self.guard() {
            return Err(EllipticError::Pole);
        }
        let t1 = self.theta_series(z, 1)?;
        let t2 = self.theta_series(z, 2)?;
        Ok(-(t2 * t - t1 * t1) / (t * t))
    }

    /// Richardson extrapolation of `−(logϑ)″(z) − 1/z²` down z = 0.1·2^{−k},
    /// k = 0..4. The limit is the negated additive constant; the expansion is
    /// even in z, so the extrapolation runs in z² with ratio 4.
    fn laurent_constant(&self) -> Result<Complex, EllipticError> {
        const DEPTH: usize = 5;
        let mut table = [[cx(0.0, 0.0); DEPTH]; DEPTH];
        for (k, row) in table.iter_mut().enumerate() {
            let zk = cx(0.1 * libm::exp2(-(k as f64)), 0.0);
            row[0] = self.neg_log_theta_dd(zk)? - cx(1.0, 0.0) / (zk * zk);
        }
        for j in 1..DEPTH {
            let w = libm::exp2(2.0 * j as f64); // 4^j
            for k in j..DEPTH {
                table[k][j] = (table[k][j - 1] * w - table[k - 1][j - 1]) / (w - 1.0);
            }
        }
        Ok(-table[DEPTH - 1][DEPTH - 1])
    }

    /// Weierstrass ℘ with Laurent normalization ℘(z) = 1/z² + O(z²).
    pub fn wp(&self, z: Complex) -> Result<Complex, EllipticError> {
        Ok(self.neg_log_theta_dd(z)? + self.wp_const)
    }

    /// ℘′(z) = −(log ϑ)‴(z).
    pub fn wp_prime(&self, z: Complex) -> Result<Complex, EllipticError> {
        let t = self.theta(z)?;
        if t.norm() < self.guard() {
            return Err(EllipticError::Pole);
        }
        let t1 = self.theta_series(z, 1)?;
        let t2 = self.theta_series(z, 2)?;
        let t3 = self.theta_series(z, 3)?;
        let num = t3 * t * t - t2 * t1 * t * 3.0 + t1 * t1 * t1 * 2.0;
        Ok(-num / (t * t * t))
    }

    /// ℘ at the three half-periods.
    pub fn half_period_wp(&self) -> Result<HalfPeriodValues, EllipticError> {
        let [w1, w2, w3] = self.half_periods();
        Ok(HalfPeriodValues {
            e1: self.wp(w1)?,
            e2: self.wp(w2)?,
            e3: self.wp(w3)?,
        })
    }

    /// Twisted functions attached to the half-periods:
    /// ϕ₁(z) = φ(1/2, z), ϕ₂(z) = e^{πiz} φ((1+τ)/2, z),
    /// ϕ₃(z) = e^{πiz} φ(τ/2, z). All calibration phases are +1; the Lax
    /// assembly in `models` permutes which ϕ rides on which Pauli axis (see
    /// `models::calibration`).
    pub fn phi_alpha(&self, alpha: usize, z: Complex) -> Result<Complex, EllipticError> {
        let [w1, w2, w3] = self.half_periods();
        let i = cx(0.0, 1.0);
        match alpha {
            1 => self.kronecker_phi(w1, z),
            2 => Ok((i * PI * z).exp() * self.kronecker_phi(w2, z)?),
            3 => Ok((i * PI * z).exp() * self.kronecker_phi(w3, z)?),
            a => Err(EllipticError::BadAlpha(a)),
        }
    }
}

// libm is reached through num-traits' "libm" feature; exp2 is pulled in
// here directly for the extrapolation grid.
mod libm {
    pub fn exp2(x: f64) -> f64 {
        num_traits::Float::exp2(x)
    }
}
