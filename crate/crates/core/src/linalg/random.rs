//! Seeded pseudo-random test inputs: Gaussian vectors, Haar unitaries,
//! Hermitian matrices with prescribed spectra.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::{inner, ComplexMatrix, C64};

/// Deterministic generator used throughout the crate.
pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Standard complex Gaussian (unit variance per real component).
pub fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

pub fn gaussian_vector<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<C64> {
    (0..n).map(|_| gaussian(rng)).collect()
}

/// Haar-distributed unitary: Gram-Schmidt on Gaussian columns.
pub fn random_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexMatrix {
    let mut cols: Vec<Vec<C64>> = Vec::with_capacity(n);
    while cols.len() < n {
        let mut v = gaussian_vector(n, rng);
        for _ in 0..2 {
            for u in &cols {
                let c = inner(u, &v);
                for (x, y) in v.iter_mut().zip(u) {
                    *x -= c * y;
                }
            }
        }
        let nv = super::norm(&v);
        if nv > 1e-8 {
            cols.push(v.iter().map(|z| z / nv).collect());
        }
    }
    ComplexMatrix::from_columns(&cols)
}

/// `(G + G^dagger)/2` for a Gaussian `G`.
pub fn random_hermitian<R: Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexMatrix {
    let g = ComplexMatrix::from_fn(n, n, |_, _| gaussian(rng));
    g.hermitian_part()
}

/// `U diag(spectrum) U^dagger` with Haar `U`.
pub fn random_hermitian_with_spectrum<R: Rng + ?Sized>(spectrum: &[f64], rng: &mut R) -> ComplexMatrix {
    let u = random_unitary(spectrum.len(), rng);
    let d = ComplexMatrix::from_real_diag(spectrum);
    (&(&u * &d) * &u.adjoint()).hermitian_part()
}

/// Wishart-type PSD matrix `G G^dagger` normalized to unit trace.
pub fn random_density<R: Rng + ?Sized>(n: usize, rank: usize, rng: &mut R) -> ComplexMatrix {
    let g = ComplexMatrix::from_fn(n, rank, |_, _| gaussian(rng));
    let w = &g * &g.adjoint();
    let t = w.trace().re;
    w.scale(1.0 / t).hermitian_part()
}
