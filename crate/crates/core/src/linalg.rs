//! Small dense eigenvalue solvers.
//!
//! Two routines sized for the spin-representation matrices (dimension
//! 2l+1 ≤ a few dozen): cyclic Jacobi for real symmetric matrices, and a
//! Hessenberg + Wilkinson-shifted QR iteration for general complex
//! matrices. The Jacobi path is the accurate default for Hermitian
//! problems; the QR path covers non-Hermitian operators.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_traits::Float;

use crate::{cx, Complex};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EigenError {
    /// Iteration cap reached before deflation completed.
    NoConvergence,
    /// Matrix is empty or not square.
    BadShape,
}

impl fmt::Display for EigenError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EigenError::NoConvergence => write!(f, "eigenvalue iteration failed to converge"),
            EigenError::BadShape => write!(f, "matrix must be square and non-empty"),
        }
    }
}

impl core::error::Error for EigenError {}

/// Eigenvalues of a real symmetric matrix (row-major, n×n) by cyclic
/// Jacobi rotations; returned ascending.
pub fn eigvals_symmetric(a: &[f64], n: usize) -> Result<Vec<f64>, EigenError> {
    if n == 0 || a.len() != n * n {
        return Err(EigenError::BadShape);
    }
    let mut m = a.to_vec();
    let idx = |r: usize, c: usize| r * n + c;
    const MAX_SWEEPS: usize = 100;
    for _ in 0..MAX_SWEEPS {
        let mut off = 0.0;
        for r in 0..n {
            for c in (r + 1)..n {
                off += m[idx(r, c)] * m[idx(r, c)];
            }
        }
        if off.sqrt() < 1e-300_f64.max(1e-15 * frobenius(&m)) {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[idx(p, q)];
                if apq.abs() < 1e-300 {
                    continue;
                }
                let app = m[idx(p, p)];
                let aqq = m[idx(q, q)];
                let theta = (aqq - app) / (2.0 * apq);
                let t = if theta >= 0.0 {
                    1.0 / (theta + (1.0 + theta * theta).sqrt())
                } else {
                    1.0 / (theta - (1.0 + theta * theta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = m[idx(k, p)];
                    let akq = m[idx(k, q)];
                    m[idx(k, p)] = c * akp - s * akq;
                    m[idx(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = m[idx(p, k)];
                    let aqk = m[idx(q, k)];
                    m[idx(p, k)] = c * apk - s * aqk;
                    m[idx(q, k)] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut vals: Vec<f64> = (0..n).map(|k| m[idx(k, k)]).collect();
    vals.sort_unstable_by(|x, y| x.partial_cmp(y).unwrap());
    Ok(vals)
}

fn frobenius(m: &[f64]) -> f64 {
    m.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Eigenvalues of a general complex matrix (row-major, n×n) by Hessenberg
/// reduction and Wilkinson-shifted QR; unsorted.
pub fn eigvals_complex(a: &[Complex], n: usize) -> Result<Vec<Complex>, EigenError> {
    if n == 0 || a.len() != n * n {
        return Err(EigenError::BadShape);
    }
    let mut h = a.to_vec();
    hessenberg(&mut h, n);
    let mut eigs = vec![cx(0.0, 0.0); n];
    let mut hi = n; // active block is 0..hi
    let mut iters = 0usize;
    let max_iters = 60 * n.max(4);
    while hi > 0 {
        if hi == 1 {
            eigs[0] = h[0];
            break;
        }
        // deflate converged subdiagonal entries at the block tail
        let m = hi - 1;
        let sub = h[m * n + (m - 1)].norm();
        let scale = h[(m - 1) * n + (m - 1)].norm() + h[m * n + m].norm();
        if sub <= 1e-14 * scale.max(1e-300) {
            eigs[m] = h[m * n + m];
            hi -= 1;
            continue;
        }
        if iters >= max_iters {
            return Err(EigenError::NoConvergence);
        }
        iters += 1;
        let mu = wilkinson_shift(&h, n, hi);
        qr_step(&mut h, n, hi, mu);
    }
    Ok(eigs)
}

/// In-place Householder reduction to upper Hessenberg form.
fn hessenberg(h: &mut [Complex], n: usize) {
    for k in 0..n.saturating_sub(2) {
        // x = h[k+1.., k]
        let mut norm2 = 0.0;
        for r in (k + 1)..n {
            norm2 += h[r * n + k].norm_sqr();
        }
        if norm2 <= 1e-300 {
            continue;
        }
        let x0 = h[(k + 1) * n + k];
        let alpha = if x0.norm() > 0.0 {
            -(x0 / x0.norm()) * norm2.sqrt()
        } else {
            cx(-norm2.sqrt(), 0.0)
        };
        // v = x − α e₁
        let mut v = vec![cx(0.0, 0.0); n - k - 1];
        for (i, slot) in v.iter_mut().enumerate() {
            *slot = h[(k + 1 + i) * n + k];
        }
        v[0] -= alpha;
        let vnorm2: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        if vnorm2 <= 1e-300 {
            continue;
        }
        // rows: H := (I − 2vv†/v†v) H
        for c in 0..n {
            let mut dot = cx(0.0, 0.0);
            for (i, vi) in v.iter().enumerate() {
                dot += vi.conj() * h[(k + 1 + i) * n + c];
            }
            let f = dot * (2.0 / vnorm2);
            for (i, vi) in v.iter().enumerate() {
                h[(k + 1 + i) * n + c] -= *vi * f;
            }
        }
        // columns: H := H (I − 2vv†/v†v)
        for r in 0..n {
            let mut dot = cx(0.0, 0.0);
            for (i, vi) in v.iter().enumerate() {
                dot += h[r * n + (k + 1 + i)] * *vi;
            }
            let f = dot * (2.0 / vnorm2);
            for (i, vi) in v.iter().enumerate() {
                h[r * n + (k + 1 + i)] -= f * vi.conj();
            }
        }
    }
}

/// Shift from the trailing 2×2 block: the eigenvalue closest to the corner.
fn wilkinson_shift(h: &[Complex], n: usize, hi: usize) -> Complex {
    let m = hi - 1;
    let a = h[(m - 1) * n + (m - 1)];
    let b = h[(m - 1) * n + m];
    let c = h[m * n + (m - 1)];
    let d = h[m * n + m];
    let tr_half = (a + d) * 0.5;
    let disc = ((a - d) * 0.5 * ((a - d) * 0.5) + b * c).sqrt();
    let l1 = tr_half + disc;
    let l2 = tr_half - disc;
    if (l1 - d).norm() < (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

/// One explicit-shift QR sweep on the active Hessenberg block 0..hi.
fn qr_step(h: &mut [Complex], n: usize, hi: usize, mu: Complex) {
    for k in 0..hi {
        h[k * n + k] -= mu;
    }
    // QR by Givens rotations, stored for the RQ pass
    let mut rot = Vec::with_capacity(hi - 1);
    for k in 0..(hi - 1) {
        let a = h[k * n + k];
        let b = h[(k + 1) * n + k];
        let rho = (a.norm_sqr() + b.norm_sqr()).sqrt();
        let (g11, g12, g21, g22);
        if rho <= 1e-300 {
            (g11, g12, g21, g22) = (cx(1.0, 0.0), cx(0.0, 0.0), cx(0.0, 0.0), cx(1.0, 0.0));
        } else {
            g11 = a.conj() / rho;
            g12 = b.conj() / rho;
            g21 = -b / rho;
            g22 = a / rho;
        }
        for c in k..hi {
            let top = h[k * n + c];
            let bot = h[(k + 1) * n + c];
            h[k * n + c] = g11 * top + g12 * bot;
            h[(k + 1) * n + c] = g21 * top + g22 * bot;
        }
        rot.push((g11, g12, g21, g22));
    }
    // R Q: multiply by the adjoints from the right
    for (k, (g11, g12, g21, g22)) in rot.iter().enumerate() {
        for r in 0..(k + 2).min(hi) {
            let left = h[r * n + k];
            let right = h[r * n + k + 1];
            h[r * n + k] = left * g11.conj() + right * g12.conj();
            h[r * n + k + 1] = left * g21.conj() + right * g22.conj();
        }
    }
    for k in 0..hi {
        h[k * n + k] += mu;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Rng;

    #[test]
    fn symmetric_diag() {
        let a = [3.0, 0.0, 0.0, 0.0, -1.0, 0.0, 0.0, 0.0, 2.0];
        let v = eigvals_symmetric(&a, 3).unwrap();
        assert!((v[0] + 1.0).abs() < 1e-14);
        assert!((v[1] - 2.0).abs() < 1e-14);
        assert!((v[2] - 3.0).abs() < 1e-14);
    }

    #[test]
    fn symmetric_2x2_closed_form() {
        let a = [2.0, 1.0, 1.0, 2.0];
        let v = eigvals_symmetric(&a, 2).unwrap();
        assert!((v[0] - 1.0).abs() < 1e-14);
        assert!((v[1] - 3.0).abs() < 1e-14);
    }

    #[test]
    fn symmetric_matches_char_poly_3x3() {
        let mut rng = Rng::new(71);
        for _ in 0..20 {
            let (a, b, c) = (rng.range(-1.0, 1.0), rng.range(-1.0, 1.0), rng.range(-1.0, 1.0));
            let (d, e, f) = (rng.range(-1.0, 1.0), rng.range(-1.0, 1.0), rng.range(-1.0, 1.0));
            let m = [a, d, e, d, b, f, e, f, c];
            let v = eigvals_symmetric(&m, 3).unwrap();
            // traces of powers identify the spectrum
            let tr1: f64 = a + b + c;
            let tr2: f64 = m
                .chunks(3)
                .enumerate()
                .map(|(i, row)| {
                    (0..3).map(|j| row[j] * m[j * 3 + i]).sum::<f64>()
                })
                .sum();
            assert!((v.iter().sum::<f64>() - tr1).abs() < 1e-12);
            assert!((v.iter().map(|x| x * x).sum::<f64>() - tr2).abs() < 1e-11);
        }
    }

    #[test]
    fn complex_triangular() {
        let z = cx(0.0, 0.0);
        let a = [cx(1.0, 2.0), cx(0.5, 0.0), z, cx(-3.0, 1.0)];
        let mut v = eigvals_complex(&a, 2).unwrap();
        v.sort_by(|x, y| x.re.partial_cmp(&y.re).unwrap());
        assert!((v[0] - cx(-3.0, 1.0)).norm() < 1e-12);
        assert!((v[1] - cx(1.0, 2.0)).norm() < 1e-12);
    }

    #[test]
    fn complex_matches_symmetric_on_real_input() {
        let mut rng = Rng::new(73);
        for n in [3usize, 5, 9] {
            let mut m = vec![0.0; n * n];
            for r in 0..n {
                for c in r..n {
                    let v = rng.range(-1.0, 1.0);
                    m[r * n + c] = v;
                    m[c * n + r] = v;
                }
            }
            let sym = eigvals_symmetric(&m, n).unwrap();
            let mc: Vec<Complex> = m.iter().map(|&x| cx(x, 0.0)).collect();
            let mut qr: Vec<f64> = eigvals_complex(&mc, n)
                .unwrap()
                .iter()
                .map(|z| {
                    assert!(z.im.abs() < 1e-9, "imag leak {z}");
                    z.re
                })
                .collect();
            qr.sort_unstable_by(|x, y| x.partial_cmp(y).unwrap());
            for (a, b) in sym.iter().zip(qr.iter()) {
                assert!((a - b).abs() < 1e-9, "{a} vs {b}");
            }
        }
    }

    #[test]
    fn complex_2x2_closed_form() {
        let mut rng = Rng::new(79);
        for _ in 0..30 {
            let a = rng.complex_box(-1.0, 1.0);
            let b = rng.complex_box(-1.0, 1.0);
            let c = rng.complex_box(-1.0, 1.0);
            let d = rng.complex_box(-1.0, 1.0);
            let m = [a, b, c, d];
            let v = eigvals_complex(&m, 2).unwrap();
            let tr = a + d;
            let det = a * d - b * c;
            // spectrum determined by trace and determinant
            assert!((v[0] + v[1] - tr).norm() < 1e-11);
            assert!((v[0] * v[1] - det).norm() < 1e-11);
        }
    }

    #[test]
    fn bad_shape() {
        assert_eq!(eigvals_symmetric(&[1.0, 2.0], 2), Err(EigenError::BadShape));
        assert_eq!(eigvals_complex(&[], 0), Err(EigenError::BadShape));
    }
}
