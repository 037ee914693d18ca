//! Partial transposition, partial trace, PPT tests and the two twirling
//! projections (`U⊗U*` and `U⊗U`).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, ComplexMatrix, C64, ZERO};
use crate::states::PartyDims;
use crate::tensor::{digits, strides};

/// Default PPT slack, relative to `max(1, tr ρ)`.
pub const DEFAULT_PPT_TOL: f64 = 1e-9;

fn check_op(op: &ComplexMatrix, dims: &[usize]) -> Result<usize> {
    let total: usize = dims.iter().product();
    if op.rows() != total || op.cols() != total {
        return Err(Error::DimensionMismatch(format!("{}x{} operator for dims {dims:?}", op.rows(), op.cols())));
    }
    Ok(total)
}

fn check_subset(dims: &[usize], subset: &[usize]) -> Result<()> {
    if let Some(&k) = subset.iter().find(|&&k| k >= dims.len()) {
        return Err(Error::DimensionMismatch(format!("subsystem {k} out of range for dims {dims:?}")));
    }
    Ok(())
}

/// Partial transpose over the subsystems in `subset`, for raw subsystem
/// dimensions. `subset` may be empty (identity) or everything (full
/// transpose).
pub fn partial_transpose_dims(op: &ComplexMatrix, dims: &[usize], subset: &[usize]) -> Result<ComplexMatrix> {
    let total = check_op(op, dims)?;
    check_subset(dims, subset)?;
    let st = strides(dims);
    let digs: Vec<Vec<usize>> = (0..total).map(|i| digits(i, dims)).collect();
    // the index change contributed by moving digit k from one side to the other
    let mut out = ComplexMatrix::zeros(total, total);
    for i in 0..total {
        for j in 0..total {
            let z = op[(i, j)];
            if z == ZERO {
                continue;
            }
            let (mut ni, mut nj) = (i, j);
            for &k in subset {
                let (a, b) = (digs[i][k], digs[j][k]);
                if a != b {
                    ni = ni + b * st[k] - a * st[k];
                    nj = nj + a * st[k] - b * st[k];
                }
            }
            out[(ni, nj)] = z;
        }
    }
    Ok(out)
}

/// Partial transpose with respect to the parties in `subset`.
pub fn partial_transpose(op: &ComplexMatrix, parties: &PartyDims, subset: &[usize]) -> Result<ComplexMatrix> {
    partial_transpose_dims(op, parties.dims(), subset)
}

/// Traces out the subsystems in `traced`; the result acts on the remaining
/// subsystems in their original order.
pub fn partial_trace_dims(op: &ComplexMatrix, dims: &[usize], traced: &[usize]) -> Result<ComplexMatrix> {
    check_op(op, dims)?;
    check_subset(dims, traced)?;
    let kept: Vec<usize> = (0..dims.len()).filter(|k| !traced.contains(k)).collect();
    let kept_dims: Vec<usize> = kept.iter().map(|&k| dims[k]).collect();
    let tr_dims: Vec<usize> = (0..dims.len()).filter(|k| traced.contains(k)).map(|k| dims[k]).collect();
    let nk: usize = kept_dims.iter().product();
    let nt: usize = tr_dims.iter().product();
    let st = strides(dims);
    let kept_idx: Vec<usize> = (0..nk).map(|i| digits(i, &kept_dims).iter().zip(&kept).map(|(d, &k)| d * st[k]).sum()).collect();
    let tr_axes: Vec<usize> = (0..dims.len()).filter(|k| traced.contains(k)).collect();
    let tr_idx: Vec<usize> = (0..nt).map(|t| digits(t, &tr_dims).iter().zip(&tr_axes).map(|(d, &k)| d * st[k]).sum()).collect();
    let mut out = ComplexMatrix::zeros(nk, nk);
    for &t in &tr_idx {
        for (a, &ka) in kept_idx.iter().enumerate() {
            for (b, &kb) in kept_idx.iter().enumerate() {
                out[(a, b)] += op[(ka + t, kb + t)];
            }
        }
    }
    Ok(out)
}

/// Traces out the parties in `traced`.
pub fn partial_trace(op: &ComplexMatrix, parties: &PartyDims, traced: &[usize]) -> Result<ComplexMatrix> {
    partial_trace_dims(op, parties.dims(), traced)
}

/// Outcome of a PPT test.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PptReport {
    pub ppt: bool,
    pub min_eigenvalue: f64,
    /// Pass threshold, `-tol · max(1, tr ρ)`.
    pub threshold: f64,
}

pub(crate) fn ppt_report(op: &ComplexMatrix, dims: &[usize], subset: &[usize], tol: f64) -> Result<PptReport> {
    let pt = partial_transpose_dims(op, dims, subset)?;
    let min_eigenvalue = linalg::min_eigenvalue(&pt)?;
    let threshold = -tol * op.trace().re.max(1.0);
    Ok(PptReport { ppt: min_eigenvalue >= threshold, min_eigenvalue, threshold })
}

/// `min λ(op^{T_subset}) ≥ -tol · max(1, tr op)`.
pub fn is_ppt(op: &ComplexMatrix, parties: &PartyDims, subset: &[usize], tol: f64) -> Result<PptReport> {
    ppt_report(op, parties.dims(), subset, tol)
}

/// Sum of the moduli of the negative eigenvalues of the partial transpose.
pub fn negativity(op: &ComplexMatrix, parties: &PartyDims, subset: &[usize]) -> Result<f64> {
    let pt = partial_transpose(op, parties, subset)?;
    let tol = linalg::DEFAULT_HERMITIAN_TOL * pt.max_abs().max(1.0);
    let vals = linalg::eigvals_hermitian(&pt, tol)?;
    Ok(vals.iter().filter(|&&l| l < 0.0).map(|l| -l).sum())
}

/// `P⁺_d` as a `d²×d²` matrix.
pub fn max_entangled_projector(d: usize) -> ComplexMatrix {
    let mut p = ComplexMatrix::zeros(d * d, d * d);
    let v = 1.0 / d as f64;
    for i in 0..d {
        for j in 0..d {
            p[(i * d + i, j * d + j)] = C64::new(v, 0.0);
        }
    }
    p
}

/// The swap operator `F|ij⟩ = |ji⟩` on `C^d ⊗ C^d`.
pub fn swap_operator(d: usize) -> ComplexMatrix {
    let mut f = ComplexMatrix::zeros(d * d, d * d);
    for i in 0..d {
        for j in 0..d {
            f[(j * d + i, i * d + j)] = C64::new(1.0, 0.0);
        }
    }
    f
}

fn check_twirl(x: &ComplexMatrix, d: usize) -> Result<()> {
    if d == 0 || x.rows() != d * d || x.cols() != d * d {
        return Err(Error::DimensionMismatch(format!("twirl over d={d} needs a {0}x{0} operator", d * d)));
    }
    Ok(())
}

/// `U⊗U*` twirl: `tr(X P⁺)·P⁺ + tr(X(I-P⁺))·(I-P⁺)/(d²-1)`.
pub fn twirl_uu_star(x: &ComplexMatrix, d: usize) -> Result<ComplexMatrix> {
    check_twirl(x, d)?;
    let p = max_entangled_projector(d);
    let tp = x.trace_product(&p)?;
    if d == 1 {
        return Ok(p.scale_c(tp));
    }
    let rest = x.trace() - tp;
    let q = &ComplexMatrix::identity(d * d) - &p;
    let dd = (d * d - 1) as f64;
    Ok(&p.scale_c(tp) + &q.scale_c(rest / dd))
}

/// `U⊗U` twirl: projection onto `span{I, F}` matching `tr X` and `tr XF`.
pub fn twirl_uu(x: &ComplexMatrix, d: usize) -> Result<ComplexMatrix> {
    check_twirl(x, d)?;
    let f = swap_operator(d);
    if d == 1 {
        return Ok(ComplexMatrix::identity(1).scale_c(x.trace()));
    }
    let tx = x.trace();
    let txf = x.trace_product(&f)?;
    let df = d as f64;
    let dd = df * df - 1.0;
    let a = (tx - txf / df) / dd;
    let b = (txf - tx / df) / dd;
    Ok(&ComplexMatrix::identity(d * d).scale_c(a) + &f.scale_c(b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::kron;
    use crate::linalg::random::{self, rng};
    use crate::states::{max_entangled, random_pure};

    fn two(d: usize) -> PartyDims {
        PartyDims::new(vec![d, d]).unwrap()
    }

    #[test]
    fn product_operator_transpose() {
        let mut r = rng(4);
        let a = random::random_hermitian(2, &mut r);
        let b = random::random_hermitian(3, &mut r);
        let ab = kron(&a, &b);
        let pt = partial_transpose(&ab, &PartyDims::new(vec![2, 3]).unwrap(), &[0]).unwrap();
        assert!(pt.max_abs_diff(&kron(&a.transpose(), &b)) < 1e-15);
        let pt1 = partial_transpose(&ab, &PartyDims::new(vec![2, 3]).unwrap(), &[1]).unwrap();
        assert!(pt1.max_abs_diff(&kron(&a, &b.transpose())) < 1e-15);
    }

    #[test]
    fn bell_state_partial_transpose_is_half_swap() {
        let p = max_entangled(2).projector();
        let pt = partial_transpose(&p, &two(2), &[0]).unwrap();
        assert!(pt.max_abs_diff(&swap_operator(2).scale(0.5)) < 1e-15);
        let lmin = linalg::min_eigenvalue(&pt).unwrap();
        assert!((lmin + 0.5).abs() < 1e-14);
    }

    #[test]
    fn involution_is_exact() {
        let mut r = rng(8);
        let x = ComplexMatrix::from_fn(6, 6, |_, _| random::gaussian(&mut r));
        let parties = PartyDims::new(vec![2, 3]).unwrap();
        let twice = partial_transpose(&partial_transpose(&x, &parties, &[0]).unwrap(), &parties, &[0]).unwrap();
        assert_eq!(twice, x);
    }

    #[test]
    fn ppt_tests() {
        let mixed = ComplexMatrix::identity(4).scale(0.25);
        assert!(is_ppt(&mixed, &two(2), &[0], DEFAULT_PPT_TOL).unwrap().ppt);
        let rep = is_ppt(&max_entangled(2).projector(), &two(2), &[0], DEFAULT_PPT_TOL).unwrap();
        assert!(!rep.ppt);
        assert!((rep.min_eigenvalue + 0.5).abs() < 1e-14);
        assert!(matches!(is_ppt(&mixed, &two(3), &[0], 1e-9), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn negativity_values() {
        let diag = ComplexMatrix::from_real_diag(&[0.1, 0.2, 0.3, 0.4]);
        assert!(negativity(&diag, &two(2), &[0]).unwrap().abs() < 1e-15);
        for d in 2..=5 {
            let n = negativity(&max_entangled(d).projector(), &two(d), &[0]).unwrap();
            // d(d-1)/2 eigenvalues equal to -1/d
            assert!((n - (d as f64 - 1.0) / 2.0).abs() < 1e-12, "d={d}: {n}");
        }
    }

    #[test]
    fn partial_trace_basics() {
        let mut r = rng(12);
        let a = random::random_hermitian(2, &mut r);
        let b = random::random_hermitian(3, &mut r);
        let parties = PartyDims::new(vec![2, 3]).unwrap();
        let tr_b = partial_trace(&kron(&a, &b), &parties, &[1]).unwrap();
        assert!(tr_b.max_abs_diff(&a.scale_c(b.trace())) < 1e-14);
        for d in 2..=4 {
            let red = partial_trace(&max_entangled(d).projector(), &two(d), &[0]).unwrap();
            assert!(red.max_abs_diff(&ComplexMatrix::identity(d).scale(1.0 / d as f64)) < 1e-14);
        }
    }

    #[test]
    fn partial_trace_order_independent() {
        let parties = PartyDims::new(vec![2, 3, 2]).unwrap();
        let rho = random_pure(&parties, 31).projector();
        let t0_then_1 = partial_trace_dims(&partial_trace(&rho, &parties, &[0]).unwrap(), &[3, 2], &[0]).unwrap();
        let t1_then_0 = partial_trace_dims(&partial_trace(&rho, &parties, &[1]).unwrap(), &[2, 2], &[0]).unwrap();
        let both = partial_trace(&rho, &parties, &[0, 1]).unwrap();
        assert!(t0_then_1.max_abs_diff(&t1_then_0) < 1e-12);
        assert!(t0_then_1.max_abs_diff(&both) < 1e-12);
        assert!((both.trace() - rho.trace()).norm() < 1e-12);
    }

    #[test]
    fn twirl_fixed_points() {
        for d in 2..=4 {
            let p = max_entangled_projector(d);
            assert!(twirl_uu_star(&p, d).unwrap().max_abs_diff(&p) < 1e-14);
            let id = ComplexMatrix::identity(d * d);
            assert!(twirl_uu_star(&id, d).unwrap().max_abs_diff(&id) < 1e-14);
            assert!(twirl_uu(&id, d).unwrap().max_abs_diff(&id) < 1e-14);
            let f = swap_operator(d);
            assert!(twirl_uu(&f, d).unwrap().max_abs_diff(&f) < 1e-14);
        }
        assert!(twirl_uu_star(&ComplexMatrix::identity(3), 2).is_err());
        assert!(twirl_uu(&ComplexMatrix::identity(3), 2).is_err());
    }

    #[test]
    fn twirl_matches_monte_carlo_average() {
        let d = 2;
        let mut r = rng(99);
        let x = random::random_density(d * d, d * d, &mut r);
        let exact = twirl_uu_star(&x, d).unwrap();
        let samples = 10_000;
        let mut acc = ComplexMatrix::zeros(d * d, d * d);
        for _ in 0..samples {
            let u = random::random_unitary(d, &mut r);
            let uu = kron(&u, &u.conj());
            acc = &acc + &(&(&uu * &x) * &uu.adjoint());
        }
        let mc = acc.scale(1.0 / samples as f64);
        let err = mc.max_abs_diff(&exact);
        assert!(err <= 0.02 * exact.max_abs(), "Monte-Carlo deviation {err}");
    }

    #[test]
    fn twirl_output_commutes_with_group_action() {
        let d = 3;
        let mut r = rng(100);
        let x = random::random_density(d * d, 4, &mut r);
        let t = twirl_uu_star(&x, d).unwrap();
        for _ in 0..5 {
            let u = random::random_unitary(d, &mut r);
            let uu = kron(&u, &u.conj());
            let conj = &(&uu * &t) * &uu.adjoint();
            assert!(conj.max_abs_diff(&t) < 1e-12);
        }
    }
}
