//! Product vectors inside a two-dimensional subspace of `C^{da} ⊗ C^{db}`.
//!
//! `a·v1 + b·v2`, reshaped to a `da×db` matrix, is a product vector iff all
//! of its 2×2 minors vanish. Each minor is a homogeneous quadratic in
//! `(a, b)`, so the solutions are the common roots on the projective line:
//! at most two, or every point when all minors vanish identically.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, inner, norm, normalized, ComplexMatrix, C64, ZERO};

/// Residual allowed for a candidate to count as a product vector.
pub const PRODUCT_TOL: f64 = 1e-8;
/// Candidates closer than this (`1 - |⟨u|v⟩|`) are the same ray.
pub const DEDUPE_TOL: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProductVector {
    /// Normalized `a ⊗ b` as found in the span.
    pub vector: Vec<C64>,
    pub left: Vec<C64>,
    pub right: Vec<C64>,
    /// `‖vector - left ⊗ right‖`
    pub residual: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ProductVectorSet {
    Finite {
        vectors: Vec<ProductVector>,
    },
    /// Every vector of the span is a product; all share `factor` on `side`.
    Infinite {
        side: Side,
        factor: Vec<C64>,
        spanning: [ProductVector; 2],
    },
}

impl ProductVectorSet {
    pub fn count(&self) -> Option<usize> {
        match self {
            Self::Finite { vectors } => Some(vectors.len()),
            Self::Infinite { .. } => None,
        }
    }
}

/// Best product approximation of `v` (leading Schmidt pair), normalized.
pub(crate) fn factor(v: &[C64], da: usize, db: usize) -> Result<ProductVector> {
    let v = normalized(v);
    let m = ComplexMatrix::new(da, db, v.clone())?;
    let gram = (&m * &m.adjoint()).hermitian_part();
    let e = linalg::eig_hermitian(&gram, 1e-10)?;
    let mut left = e.vector(da - 1);
    linalg::fix_phase(&mut left);
    // right = (left† M)ᵀ, so that left ⊗ right is the projection of v
    let right: Vec<C64> = (0..db).map(|b| (0..da).map(|a| left[a].conj() * m[(a, b)]).sum()).collect();
    let prod = linalg::kron_vec(&left, &right);
    let residual = norm(&v.iter().zip(&prod).map(|(x, y)| x - y).collect::<Vec<_>>());
    let right = normalized(&right);
    Ok(ProductVector { vector: v, left, right, residual })
}

fn minors(v1: &[C64], v2: &[C64], da: usize, db: usize) -> Vec<[C64; 3]> {
    let at = |v: &[C64], i: usize, j: usize| v[i * db + j];
    let mut out = Vec::new();
    for i in 0..da {
        for k in (i + 1)..da {
            for j in 0..db {
                for l in (j + 1)..db {
                    // det [[a p + b q, a r + b s], [a t + b u, a w + b x]]
                    let (p, q) = (at(v1, i, j), at(v2, i, j));
                    let (r, s) = (at(v1, i, l), at(v2, i, l));
                    let (t, u) = (at(v1, k, j), at(v2, k, j));
                    let (w, x) = (at(v1, k, l), at(v2, k, l));
                    let c_aa = p * w - r * t;
                    let c_ab = p * x + q * w - r * u - s * t;
                    let c_bb = q * x - s * u;
                    out.push([c_aa, c_ab, c_bb]);
                }
            }
        }
    }
    out
}

/// Roots `(a, b)` of `c0 a² + c1 ab + c2 b²` on the projective line.
fn projective_roots(c: [C64; 3]) -> Vec<(C64, C64)> {
    let [c0, c1, c2] = c;
    let scale = c0.norm().max(c1.norm()).max(c2.norm());
    let one = C64::new(1.0, 0.0);
    if c0.norm().max(c2.norm()) <= 1e-12 * scale {
        return vec![(one, ZERO), (ZERO, one)];
    }
    // solve in the affine chart whose leading coefficient is larger
    let b_chart = c2.norm() >= c0.norm();
    let (lead, tail) = if b_chart { (c2, c0) } else { (c0, c2) };
    // lead z² + c1 z + tail = 0
    let disc = (c1 * c1 - lead * tail * 4.0).sqrt();
    let q = if (c1.conj() * disc).re >= 0.0 { -(c1 + disc) * 0.5 } else { -(c1 - disc) * 0.5 };
    let zs = if q.norm() > 0.0 { vec![q / lead, tail / q] } else { vec![ZERO] };
    zs.into_iter().map(|z| if b_chart { (one, z) } else { (z, one) }).collect()
}

fn same_ray(u: &[C64], v: &[C64]) -> bool {
    1.0 - inner(u, v).norm() <= DEDUPE_TOL
}

/// All product vectors (up to scale) in `span{v1, v2}` on `C^{da} ⊗ C^{db}`.
pub fn product_vectors_in_span(v1: &[C64], v2: &[C64], da: usize, db: usize) -> Result<ProductVectorSet> {
    if v1.len() != da * db || v2.len() != da * db {
        return Err(Error::DimensionMismatch(format!("vectors must have length {}", da * db)));
    }
    let (n1, n2) = (norm(v1), norm(v2));
    if n1 == 0.0 || n2 == 0.0 {
        return Err(Error::DegenerateSpan);
    }
    let (u1, u2) = (normalized(v1), normalized(v2));
    if 1.0 - inner(&u1, &u2).norm_sqr() <= 1e-12 {
        return Err(Error::DegenerateSpan);
    }
    let quads = minors(&u1, &u2, da, db);
    let size = |c: &[C64; 3]| c.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let biggest = quads.iter().max_by(|x, y| size(x).total_cmp(&size(y)));

    let Some(&best) = biggest.filter(|c| size(c) > 1e-12) else {
        // every combination is a product: find the shared factor
        let f1 = factor(&u1, da, db)?;
        let f2 = factor(&u2, da, db)?;
        let side = if same_ray(&f1.left, &f2.left) { Side::Left } else { Side::Right };
        let factor = if side == Side::Left { f1.left.clone() } else { f1.right.clone() };
        return Ok(ProductVectorSet::Infinite { side, factor, spanning: [f1, f2] });
    };

    let mut vectors: Vec<ProductVector> = Vec::new();
    for (a, b) in projective_roots(best) {
        let v: Vec<C64> = u1.iter().zip(&u2).map(|(x, y)| a * x + b * y).collect();
        if norm(&v) == 0.0 {
            continue;
        }
        let p = factor(&v, da, db)?;
        if p.residual > PRODUCT_TOL {
            continue;
        }
        if vectors.iter().any(|q| same_ray(&q.vector, &p.vector)) {
            continue;
        }
        vectors.push(p);
    }
    Ok(ProductVectorSet::Finite { vectors })
}

/// Square case `C^m ⊗ C^m`.
pub fn product_vectors_in_2dim_subspace(v1: &[C64], v2: &[C64]) -> Result<ProductVectorSet> {
    let m = (v1.len() as f64).sqrt().round() as usize;
    if m * m != v1.len() {
        return Err(Error::DimensionMismatch(format!("length {} is not a square", v1.len())));
    }
    product_vectors_in_span(v1, v2, m, m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::random;
    use crate::states::{schmidt_rank, PartyDims, PureState};
    use proptest::prelude::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn basis(i: usize, n: usize) -> Vec<C64> {
        let mut v = vec![ZERO; n];
        v[i] = c(1.0);
        v
    }

    #[test]
    fn computational_pair() {
        let set = product_vectors_in_2dim_subspace(&basis(0, 4), &basis(3, 4)).unwrap();
        let ProductVectorSet::Finite { vectors } = set else { panic!("expected finite") };
        assert_eq!(vectors.len(), 2);
        assert!(vectors.iter().any(|p| same_ray(&p.vector, &basis(0, 4))));
        assert!(vectors.iter().any(|p| same_ray(&p.vector, &basis(3, 4))));
    }

    #[test]
    fn common_left_factor() {
        let set = product_vectors_in_2dim_subspace(&basis(0, 4), &basis(1, 4)).unwrap();
        let ProductVectorSet::Infinite { side, factor, .. } = set else { panic!("expected infinite") };
        assert_eq!(side, Side::Left);
        assert!(same_ray(&factor, &basis(0, 2)));
    }

    #[test]
    fn bell_pair_span() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let phi = vec![c(s), ZERO, ZERO, c(s)];
        let psi = vec![ZERO, c(s), c(s), ZERO];
        let set = product_vectors_in_2dim_subspace(&phi, &psi).unwrap();
        let ProductVectorSet::Finite { vectors } = set else { panic!("expected finite") };
        assert_eq!(vectors.len(), 2);
        for p in &vectors {
            let st = PureState::new(p.vector.clone(), PartyDims::new(vec![2, 2]).unwrap()).unwrap();
            assert_eq!(schmidt_rank(&st, &[0], 1e-8).unwrap(), 1);
        }
    }

    #[test]
    fn dependent_vectors() {
        let v = basis(1, 4);
        let w: Vec<C64> = v.iter().map(|z| z * C64::new(0.0, 2.0)).collect();
        assert_eq!(product_vectors_in_2dim_subspace(&v, &w).unwrap_err(), Error::DegenerateSpan);
    }

    #[test]
    fn root_at_infinity() {
        // span{|0⟩(|0⟩+|1⟩) + |11⟩, |11⟩}: the second vector alone is product
        let v1 = vec![c(1.0), c(1.0), ZERO, c(1.0)];
        let v2 = basis(3, 4);
        let ProductVectorSet::Finite { vectors } = product_vectors_in_2dim_subspace(&v1, &v2).unwrap() else {
            panic!("expected finite")
        };
        assert!(vectors.iter().any(|p| same_ray(&p.vector, &v2)));
        for p in &vectors {
            assert!(p.residual <= PRODUCT_TOL);
        }
    }

    #[test]
    fn qutrit_span_with_planted_products() {
        let mut r = random::rng(8);
        for _ in 0..20 {
            let a1 = random::gaussian_vector(3, &mut r);
            let b1 = random::gaussian_vector(3, &mut r);
            let a2 = random::gaussian_vector(3, &mut r);
            let b2 = random::gaussian_vector(3, &mut r);
            let e1 = linalg::kron_vec(&a1, &b1);
            let e2 = linalg::kron_vec(&a2, &b2);
            // mix so neither spanning vector is itself a product
            let v1: Vec<C64> = e1.iter().zip(&e2).map(|(x, y)| x + y).collect();
            let v2: Vec<C64> = e1.iter().zip(&e2).map(|(x, y)| x - y * C64::new(0.3, 0.7)).collect();
            let ProductVectorSet::Finite { vectors } = product_vectors_in_2dim_subspace(&v1, &v2).unwrap() else {
                panic!("expected finite")
            };
            assert_eq!(vectors.len(), 2);
            let (n1, n2) = (normalized(&e1), normalized(&e2));
            assert!(vectors.iter().any(|p| same_ray(&p.vector, &n1)));
            assert!(vectors.iter().any(|p| same_ray(&p.vector, &n2)));
        }
    }

    proptest! {
        #[test]
        fn invariant_under_change_of_spanning_vectors(seed in 0u64..500, re in -2.0f64..2.0, im in -2.0f64..2.0) {
            let mut r = random::rng(seed);
            let v1 = random::gaussian_vector(4, &mut r);
            let v2 = random::gaussian_vector(4, &mut r);
            let k = C64::new(re, im);
            prop_assume!(k.norm() > 0.1);
            // same span, different basis and scale
            let w1: Vec<C64> = v1.iter().zip(&v2).map(|(x, y)| x * k + y).collect();
            let w2: Vec<C64> = v2.iter().map(|y| y * C64::new(0.0, 3.0)).collect();
            let a = product_vectors_in_2dim_subspace(&v1, &v2).unwrap();
            let b = product_vectors_in_2dim_subspace(&w1, &w2).unwrap();
            let (ProductVectorSet::Finite { vectors: a }, ProductVectorSet::Finite { vectors: b }) = (a, b) else {
                return Err(TestCaseError::fail("generic span must have finitely many products"));
            };
            prop_assert_eq!(a.len(), b.len());
            for p in &a {
                prop_assert!(b.iter().any(|q| same_ray(&p.vector, &q.vector)));
                prop_assert!(p.residual <= PRODUCT_TOL);
            }
        }
    }
}
