//! Cyclic Jacobi diagonalization of Hermitian matrices.
//!
//! Each rotation first removes the phase of `h_pq` and then applies the
//! classical real Jacobi rotation, so the iteration works on the complex
//! matrix directly. Exact zeros are never rotated, which keeps block-sparse
//! operators (partial transposes of isotropic-type states are mostly
//! 2x2 and 4x4 blocks after permutation) cheap at the 900x900 scale.

use super::{ComplexMatrix, C64, ONE, ZERO};
use crate::error::{Error, Result};

/// Default Hermiticity tolerance, `max |H - H^dagger|`.
pub const DEFAULT_HERMITIAN_TOL: f64 = 1e-10;

const MAX_SWEEPS: usize = 100;
const OFF_TARGET: f64 = 1e-15;
const SKIP: f64 = 1e-19;

/// Eigen-decomposition of a Hermitian matrix.
///
/// `eigenvalues` are ascending; column `k` of `eigenvectors` belongs to
/// `eigenvalues[k]`.
#[derive(Clone, Debug)]
pub struct HermEigen {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: ComplexMatrix,
}

impl HermEigen {
    /// `V diag(f(λ)) V^dagger`
    pub fn reconstruct_with(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let n = self.eigenvalues.len();
        let v = &self.eigenvectors;
        let fl: Vec<f64> = self.eigenvalues.iter().map(|&l| f(l)).collect();
        let mut out = ComplexMatrix::zeros(n, n);
        for k in 0..n {
            if fl[k] == 0.0 {
                continue;
            }
            for i in 0..n {
                let vik = v[(i, k)] * fl[k];
                if vik == ZERO {
                    continue;
                }
                for j in 0..n {
                    out[(i, j)] += vik * v[(j, k)].conj();
                }
            }
        }
        out
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.reconstruct_with(|l| l)
    }

    pub fn vector(&self, k: usize) -> Vec<C64> {
        self.eigenvectors.column(k)
    }
}

/// Full eigendecomposition. `tol` bounds the admissible asymmetry.
pub fn eig_hermitian(h: &ComplexMatrix, tol: f64) -> Result<HermEigen> {
    let (vals, vecs) = jacobi(h, tol, true)?;
    let vecs = vecs.expect("vectors requested");
    let n = vals.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]));
    let eigenvalues = order.iter().map(|&k| vals[k]).collect();
    let eigenvectors = ComplexMatrix::from_fn(n, n, |i, j| vecs[i * n + order[j]]);
    Ok(HermEigen { eigenvalues, eigenvectors })
}

/// Eigenvalues only, ascending. Skips eigenvector accumulation.
pub fn eigvals_hermitian(h: &ComplexMatrix, tol: f64) -> Result<Vec<f64>> {
    let (mut vals, _) = jacobi(h, tol, false)?;
    vals.sort_by(f64::total_cmp);
    Ok(vals)
}

/// Smallest eigenvalue, with the Hermiticity tolerance scaled to the
/// matrix: `DEFAULT_HERMITIAN_TOL · max(1, max|h_ij|)`.
pub fn min_eigenvalue(h: &ComplexMatrix) -> Result<f64> {
    let tol = DEFAULT_HERMITIAN_TOL * h.max_abs().max(1.0);
    Ok(eigvals_hermitian(h, tol)?.first().copied().unwrap_or(0.0))
}

fn jacobi(h: &ComplexMatrix, tol: f64, want_vectors: bool) -> Result<(Vec<f64>, Option<Vec<C64>>)> {
    let n = h.require_square()?;
    let asym = h.hermiticity_error();
    if asym > tol {
        return Err(Error::NotHermitian { asymmetry: asym, tol });
    }
    let mut a = h.hermitian_part().into_data();
    for i in 0..n {
        a[i * n + i] = C64::new(a[i * n + i].re, 0.0);
    }
    let mut v = want_vectors.then(|| {
        let mut v = vec![ZERO; n * n];
        for i in 0..n {
            v[i * n + i] = ONE;
        }
        v
    });

    let frob = a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if frob == 0.0 || n < 2 {
        return Ok(((0..n).map(|i| a[i * n + i].re).collect(), v));
    }
    let target = OFF_TARGET * frob;
    let skip = SKIP * frob;

    let off_norm = |a: &[C64]| -> f64 {
        let mut s = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                s += a[p * n + q].norm_sqr();
            }
        }
        (2.0 * s).sqrt()
    };

    let mut sweeps = 0;
    loop {
        let off = off_norm(&a);
        if off <= target {
            break;
        }
        if sweeps == MAX_SWEEPS {
            return Err(Error::NoConvergence { sweeps, off_norm: off });
        }
        sweeps += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                let g = apq.norm();
                if g <= skip {
                    continue;
                }
                let app = a[p * n + p].re;
                let aqq = a[q * n + q].re;
                let theta = (aqq - app) / (2.0 * g);
                let t =
                    if theta.abs() > 1e150 { 0.5 / theta } else { theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt()) };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                // e^{-i phi} with phi = arg(h_pq)
                let ph = apq.conj() / g;
                let sph = ph * s;
                let cph = ph * c;

                for r in 0..n {
                    if r == p || r == q {
                        continue;
                    }
                    let arp = a[r * n + p];
                    let arq = a[r * n + q];
                    let nrp = arp * c - sph * arq;
                    let nrq = arp * s + cph * arq;
                    a[r * n + p] = nrp;
                    a[r * n + q] = nrq;
                    a[p * n + r] = nrp.conj();
                    a[q * n + r] = nrq.conj();
                }
                a[p * n + p] = C64::new(app - t * g, 0.0);
                a[q * n + q] = C64::new(aqq + t * g, 0.0);
                a[p * n + q] = ZERO;
                a[q * n + p] = ZERO;

                if let Some(v) = v.as_mut() {
                    for r in 0..n {
                        let vrp = v[r * n + p];
                        let vrq = v[r * n + q];
                        v[r * n + p] = vrp * c - sph * vrq;
                        v[r * n + q] = vrp * s + cph * vrq;
                    }
                }
            }
        }
    }
    Ok(((0..n).map(|i| a[i * n + i].re).collect(), v))
}
