//! Certificates that a mixed state of rank `≥ m² - 2` on `C^m ⊗ C^m` cannot
//! be converted to a pure entangled state by SPPT maps.
//!
//! `B ⪰ 0` with `tr ρB = 0` lives on `ker ρ` (dimension ≤ 2) and must be a
//! separable combination of product projectors there. The support of `A^Γ`
//! is confined to that of `B^Γ`, which pins `A` to a subspace of `ker ρ`,
//! so `tr ρA = 0`.

mod product;

pub use product::{
    product_vectors_in_2dim_subspace, product_vectors_in_span, ProductVector, ProductVectorSet, Side, DEDUPE_TOL, PRODUCT_TOL,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, eig_hermitian, inner, kron_vec, norm, ComplexMatrix, C64, ZERO};
use crate::states::DensityMatrix;

/// Eigenvalues below `RANK_TOL · tr ρ` count as zero.
pub const RANK_TOL: f64 = 1e-9;
/// Largest `tr ρ Π_A` accepted as "A misses the range of ρ".
pub const SUPPORT_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Conclusion {
    ImpossibleByStructure,
    Inconclusive,
}

/// The form `B` is forced into.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "snake_case")]
pub enum BStructure {
    Zero,
    RankOneProduct {
        left: Vec<C64>,
        right: Vec<C64>,
    },
    /// `y|11⟩⟨11| + z|ef⟩⟨ef|` after the local change of basis `U_A ⊗ U_B`,
    /// with `|e⟩ = cos u|1⟩ + sin u|2⟩`, `|f⟩ = cos v|1⟩ + sin v|2⟩`.
    TwoProduct {
        u_a: ComplexMatrix,
        u_b: ComplexMatrix,
        u: f64,
        v: f64,
        y: f64,
        z: f64,
    },
}

impl BStructure {
    /// The representative `B` in the original basis (zero matrix for `Zero`).
    pub fn operator(&self, m: usize) -> ComplexMatrix {
        match self {
            BStructure::Zero => ComplexMatrix::zeros(m * m, m * m),
            BStructure::RankOneProduct { left, right } => ComplexMatrix::projector(&kron_vec(left, right)),
            BStructure::TwoProduct { u_a, u_b, .. } => {
                let local = self.local_form(m);
                let u = u_a.kron(u_b);
                &(&u * &local) * &u.adjoint()
            }
        }
    }

    /// `B` in the rotated local basis; real, so `B^Γ = B` there.
    pub fn local_form(&self, m: usize) -> ComplexMatrix {
        match self {
            BStructure::TwoProduct { u, v, y, z, .. } => {
                let mut e = vec![ZERO; m];
                let mut f = vec![ZERO; m];
                e[0] = C64::new(u.cos(), 0.0);
                e[1] = C64::new(u.sin(), 0.0);
                f[0] = C64::new(v.cos(), 0.0);
                f[1] = C64::new(v.sin(), 0.0);
                let mut one = vec![ZERO; m * m];
                one[0] = C64::new(1.0, 0.0);
                &ComplexMatrix::projector(&one).scale(*y) + &ComplexMatrix::projector(&kron_vec(&e, &f)).scale(*z)
            }
            _ => self.operator(m),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ImpossibilityCertificate {
    pub m: usize,
    pub rank: usize,
    pub kernel_dim: usize,
    pub kernel_basis: Vec<Vec<C64>>,
    pub product_vectors_in_kernel: Vec<ProductVector>,
    /// Set when every kernel vector is a product, sharing a factor on this side.
    pub product_family: Option<Side>,
    pub b_structure: BStructure,
    /// Orthonormal basis of the subspace `A` is confined to.
    pub admissible_a_support: Vec<Vec<C64>>,
    pub trace_rho_on_a_support: f64,
    pub conclusion: Conclusion,
    pub reason: String,
}

fn orthonormalize(vs: &[Vec<C64>]) -> Vec<Vec<C64>> {
    let mut out: Vec<Vec<C64>> = Vec::new();
    for v in vs {
        let mut w = v.clone();
        for _ in 0..2 {
            for u in &out {
                let c = inner(u, &w);
                for (wi, ui) in w.iter_mut().zip(u) {
                    *wi -= c * ui;
                }
            }
        }
        let n = norm(&w);
        if n > 1e-10 {
            out.push(w.into_iter().map(|z| z / n).collect());
        }
    }
    out
}

/// Unitary whose first two columns are `x1` and the unit vector along the
/// part of `x2` orthogonal to `x1`; the rest completes the basis.
fn local_frame(x1: &[C64], x2: &[C64]) -> ComplexMatrix {
    let m = x1.len();
    let mut seeds = vec![x1.to_vec(), x2.to_vec()];
    for k in 0..m {
        let mut e = vec![ZERO; m];
        e[k] = C64::new(1.0, 0.0);
        seeds.push(e);
    }
    let cols = orthonormalize(&seeds);
    ComplexMatrix::from_columns(&cols[..m])
}

/// Rephases `x2` so that `⟨x1|x2⟩ ≥ 0` and returns the angle between them.
fn align(x1: &[C64], x2: &mut [C64]) -> f64 {
    let c = inner(x1, x2);
    if c.norm() > 1e-15 {
        let ph = c.conj() / c.norm();
        for z in x2.iter_mut() {
            *z *= ph;
        }
    }
    c.norm().clamp(0.0, 1.0).acos()
}

fn two_product(l1: &[C64], r1: &[C64], l2: &[C64], r2: &[C64]) -> BStructure {
    let (mut l2, mut r2) = (l2.to_vec(), r2.to_vec());
    let u = align(l1, &mut l2);
    let v = align(r1, &mut r2);
    BStructure::TwoProduct { u_a: local_frame(l1, &l2), u_b: local_frame(r1, &r2), u, v, y: 1.0, z: 1.0 }
}

fn support_trace(rho: &ComplexMatrix, basis: &[Vec<C64>]) -> Result<f64> {
    let mut t = 0.0;
    for w in basis {
        t += rho.sandwich(w, w)?.re;
    }
    Ok(t)
}

/// Runs the case analysis on `ker ρ`. Requires `rank ρ ≥ m² - 2`.
pub fn theorem3_certificate(rho: &DensityMatrix) -> Result<ImpossibilityCertificate> {
    let dims = rho.parties().dims();
    if dims.len() != 2 || dims[0] != dims[1] {
        return Err(Error::DimensionMismatch(format!("rho must live on C^m (x) C^m, got dims {dims:?}")));
    }
    let m = dims[0];
    let n = m * m;
    let op = rho.op();
    let e = eig_hermitian(op, 1e-10)?;
    let thr = RANK_TOL * op.trace().re;
    let kernel_basis: Vec<Vec<C64>> = (0..n).filter(|&k| e.eigenvalues[k] <= thr).map(|k| e.vector(k)).collect();
    let kernel_dim = kernel_basis.len();
    let rank = n - kernel_dim;
    let required = n.saturating_sub(2);
    if rank < required {
        return Err(Error::HypothesisNotMet { rank, required });
    }

    let mut products = Vec::new();
    let mut family = None;
    let (b_structure, support, reason): (BStructure, Vec<Vec<C64>>, String) = match kernel_dim {
        0 => (BStructure::Zero, vec![], "full rank: B = 0, hence A^T_A = 0 and A = 0".into()),
        1 => {
            let p = product::factor(&kernel_basis[0], m, m)?;
            if p.residual > PRODUCT_TOL {
                (BStructure::Zero, vec![], "kernel vector is entangled: the separable B must vanish, so A = 0".into())
            } else {
                let s = vec![p.vector.clone()];
                let b = BStructure::RankOneProduct { left: p.left.clone(), right: p.right.clone() };
                products.push(p);
                (b, s, "B is a product projector; A is confined to the same kernel vector".into())
            }
        }
        _ => match product_vectors_in_2dim_subspace(&kernel_basis[0], &kernel_basis[1])? {
            ProductVectorSet::Infinite { side, spanning, .. } => {
                family = Some(side);
                let [f1, f2] = spanning;
                let (l1, r1, mut l2, mut r2) = (f1.left.clone(), f1.right.clone(), f2.left.clone(), f2.right.clone());
                // keep the shared factor, orthogonalize the varying one
                match side {
                    Side::Left => {
                        l2 = l1.clone();
                        r2 = orthonormalize(&[r1.clone(), r2])[1].clone();
                    }
                    Side::Right => {
                        r2 = r1.clone();
                        l2 = orthonormalize(&[l1.clone(), l2])[1].clone();
                    }
                }
                let b = two_product(&l1, &r1, &l2, &r2);
                let s = orthonormalize(&[kron_vec(&l1, &r1), kron_vec(&l2, &r2), kron_vec(&l1, &r2), kron_vec(&l2, &r1)]);
                products.extend([f1, f2]);
                (b, s, "sin u sin v = 0: A is spanned by kernel vectors of rho".into())
            }
            ProductVectorSet::Finite { vectors } => match vectors.len() {
                2 => {
                    let (p1, p2) = (&vectors[0], &vectors[1]);
                    let b = two_product(&p1.left, &p1.right, &p2.left, &p2.right);
                    let s = orthonormalize(&[p1.vector.clone(), p2.vector.clone()]);
                    products.extend(vectors);
                    (b, s, "sin u sin v != 0: A^T_A is separable on a span with two product vectors, so A lies in supp B".into())
                }
                1 if m == 2 => {
                    let p = vectors.into_iter().next().expect("one vector");
                    let s = vec![p.vector.clone()];
                    let b = BStructure::RankOneProduct { left: p.left.clone(), right: p.right.clone() };
                    products.push(p);
                    (b, s, "one product vector in the kernel: B is a product projector".into())
                }
                0 if m == 2 => (BStructure::Zero, vec![], "no product vector in the kernel: B = 0, so A = 0".into()),
                k => {
                    products.extend(vectors);
                    return Ok(ImpossibilityCertificate {
                        m,
                        rank,
                        kernel_dim,
                        kernel_basis,
                        product_vectors_in_kernel: products,
                        product_family: None,
                        b_structure: BStructure::Zero,
                        admissible_a_support: vec![],
                        trace_rho_on_a_support: 0.0,
                        conclusion: Conclusion::Inconclusive,
                        reason: format!("kernel of dimension 2 with {k} product vector(s) for m = {m}"),
                    });
                }
            },
        },
    };

    let trace_rho_on_a_support = support_trace(op, &support)?;
    let (conclusion, reason) = if trace_rho_on_a_support <= SUPPORT_TOL {
        (Conclusion::ImpossibleByStructure, reason)
    } else {
        (Conclusion::Inconclusive, format!("{reason}; but tr(rho P_A) = {trace_rho_on_a_support:.3e}"))
    };
    Ok(ImpossibilityCertificate {
        m,
        rank,
        kernel_dim,
        kernel_basis,
        product_vectors_in_kernel: products,
        product_family: family,
        b_structure,
        admissible_a_support: support,
        trace_rho_on_a_support,
        conclusion,
        reason,
    })
}

impl ImpossibilityCertificate {
    /// Re-checks the certificate's claims against `rho`: product vectors lie
    /// in the kernel and factor, the representative `B` is PSD, invariant
    /// under partial transpose in its local basis and has `tr ρB = 0`.
    pub fn verify(&self, rho: &DensityMatrix) -> Result<bool> {
        let op = rho.op();
        let tol = PRODUCT_TOL;
        for p in &self.product_vectors_in_kernel {
            if p.residual > tol || op.sandwich(&p.vector, &p.vector)?.re > tol {
                return Ok(false);
            }
        }
        let m = self.m;
        let b = self.b_structure.operator(m);
        if linalg::min_eigenvalue(&b)? < -tol || op.trace_product(&b)?.re.abs() > tol {
            return Ok(false);
        }
        let local = self.b_structure.local_form(m);
        let lt = crate::ppt::partial_transpose_dims(&local, &[m, m], &[0])?;
        if lt.max_abs_diff(&local) > tol {
            return Ok(false);
        }
        Ok(self.conclusion == Conclusion::Inconclusive || self.trace_rho_on_a_support <= SUPPORT_TOL)
    }
}
