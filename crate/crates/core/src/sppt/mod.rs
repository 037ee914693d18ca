//! Twirled stochastic PPT maps
//!
//! `S(X) = tr(XA)·P⁺_d + tr(XB)·(I - P⁺_d)/(d² - 1)` maps operators on
//! `C^m ⊗ C^m` to operators on `C^d ⊗ C^d`. `S` is stochastic-PPT exactly
//! when `A, B ⪰ 0`, `A + B ⪯ I` and
//! `B^Γ/(d-1) ⪰ A^Γ ⪰ -B^Γ/(d+1)`, where `Γ` transposes the first factor.
//! [`lemma1_check`] tests these inequalities directly; [`choi`] and
//! [`choi_ppt_condition`] test the same properties through the Choi
//! operator of the map, as an independent route.

mod feasibility;
mod lp;

pub use feasibility::{lemma2_feasibility_search, lemma2_feasibility_search_with, FeasibilityOutcome, SearchOptions};
pub use lp::{isotropic_lp, lemma3_optimum, LpConstraint, LpSolution};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, ComplexMatrix, C64};
use crate::ppt::{max_entangled_projector, partial_trace_dims, partial_transpose_dims};
use crate::tensor::permute_subsystems;

/// `A = αP⁺_m + β(I - P⁺_m)`, `B = γP⁺_m + δ(I - P⁺_m)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IsotropicParams {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub delta: f64,
}

impl IsotropicParams {
    pub fn operators(&self, m: usize) -> (ComplexMatrix, ComplexMatrix) {
        let p = max_entangled_projector(m);
        let q = &ComplexMatrix::identity(m * m) - &p;
        let a = &p.scale(self.alpha) + &q.scale(self.beta);
        let b = &p.scale(self.gamma) + &q.scale(self.delta);
        (a, b)
    }

    /// The optimal `P⁺_m → P⁺_d` parameters: `α = min(1, (m-1)/(d-1))`,
    /// `β = γ = 0`, `δ = 1`.
    pub fn lemma3_optimal(m: usize, d: usize) -> Self {
        Self { alpha: lemma3_optimum(m, d), beta: 0.0, gamma: 0.0, delta: 1.0 }
    }
}

/// The map `X ↦ tr(XA)·P⁺_d + tr(XB)·(I - P⁺_d)/(d² - 1)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TwirledSpptMap {
    a: ComplexMatrix,
    b: ComplexMatrix,
    m: usize,
    d: usize,
}

/// One named inequality `X ⪰ 0` with its smallest eigenvalue.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Margin {
    pub condition: String,
    pub min_eigenvalue: f64,
}

/// Per-condition report of [`lemma1_check`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Lemma1Report {
    /// `A ⪰ 0`, `B ⪰ 0`, `I - A - B ⪰ 0`, `B^Γ/(d-1) - A^Γ ⪰ 0`,
    /// `A^Γ + B^Γ/(d+1) ⪰ 0`, in that order.
    pub margins: Vec<Margin>,
    pub tol: f64,
    pub pass: bool,
}

impl Lemma1Report {
    /// Both complete-positivity conditions (`A, B ⪰ 0`).
    pub fn cp_pass(&self) -> bool {
        self.margins[..2].iter().all(|m| m.min_eigenvalue >= -self.tol)
    }

    /// The partial-transpose pair.
    pub fn ppt_pass(&self) -> bool {
        self.margins[3..].iter().all(|m| m.min_eigenvalue >= -self.tol)
    }

    pub fn worst(&self) -> f64 {
        self.margins.iter().map(|m| m.min_eigenvalue).fold(f64::INFINITY, f64::min)
    }
}

fn check_dims(a: &ComplexMatrix, b: &ComplexMatrix, m: usize, d: usize) -> Result<()> {
    let n = m * m;
    if m == 0 || a.rows() != n || a.cols() != n || b.rows() != n || b.cols() != n {
        return Err(Error::DimensionMismatch(format!("A and B must be {n}x{n} for m={m}")));
    }
    if d < 2 {
        return Err(Error::InvalidArgument(format!("output dimension d={d} must be at least 2")));
    }
    Ok(())
}

fn herm_min(x: &ComplexMatrix) -> Result<f64> {
    let tol = 1e-9 * x.max_abs().max(1.0);
    let vals = linalg::eigvals_hermitian(x, tol)?;
    Ok(vals.first().copied().unwrap_or(0.0))
}

/// The five closed-form SPPT conditions on `(A, B)`; pass iff every margin
/// is at least `-tol`.
pub fn lemma1_check(a: &ComplexMatrix, b: &ComplexMatrix, m: usize, d: usize, tol: f64) -> Result<Lemma1Report> {
    check_dims(a, b, m, d)?;
    let dims = [m, m];
    let at = partial_transpose_dims(a, &dims, &[0])?;
    let bt = partial_transpose_dims(b, &dims, &[0])?;
    let df = d as f64;
    let conds: [(&str, ComplexMatrix); 5] = [
        ("A >= 0", a.clone()),
        ("B >= 0", b.clone()),
        ("I - A - B >= 0", &(&ComplexMatrix::identity(m * m) - a) - b),
        ("B^T_A/(d-1) - A^T_A >= 0", &bt.scale(1.0 / (df - 1.0)) - &at),
        ("A^T_A + B^T_A/(d+1) >= 0", &at + &bt.scale(1.0 / (df + 1.0))),
    ];
    let mut margins = Vec::with_capacity(5);
    for (name, x) in conds {
        margins.push(Margin { condition: name.to_string(), min_eigenvalue: herm_min(&x)? });
    }
    let pass = margins.iter().all(|m| m.min_eigenvalue >= -tol);
    Ok(Lemma1Report { margins, tol, pass })
}

impl TwirledSpptMap {
    /// Validated constructor: fails with `NotSppt` unless every condition of
    /// [`lemma1_check`] holds within `tol`.
    pub fn new(a: ComplexMatrix, b: ComplexMatrix, m: usize, d: usize, tol: f64) -> Result<Self> {
        let report = lemma1_check(&a, &b, m, d, tol)?;
        if !report.pass {
            let bad: Vec<String> = report
                .margins
                .iter()
                .filter(|c| c.min_eigenvalue < -tol)
                .map(|c| format!("{} (margin {:.3e})", c.condition, c.min_eigenvalue))
                .collect();
            return Err(Error::NotSppt(bad.join(", ")));
        }
        Ok(Self { a, b, m, d })
    }

    /// Shape checks only, for probing arbitrary `(A, B)`.
    pub fn new_unchecked(a: ComplexMatrix, b: ComplexMatrix, m: usize, d: usize) -> Result<Self> {
        check_dims(&a, &b, m, d)?;
        Ok(Self { a, b, m, d })
    }

    pub fn from_isotropic(params: IsotropicParams, m: usize, d: usize, tol: f64) -> Result<Self> {
        let (a, b) = params.operators(m);
        Self::new(a, b, m, d, tol)
    }

    /// Highest-probability map taking `P⁺_m` to `P⁺_d`.
    pub fn lemma3_optimal(m: usize, d: usize) -> Self {
        let (a, b) = IsotropicParams::lemma3_optimal(m, d).operators(m);
        Self { a, b, m, d }
    }

    pub fn a(&self) -> &ComplexMatrix {
        &self.a
    }

    pub fn b(&self) -> &ComplexMatrix {
        &self.b
    }

    pub fn input_dim(&self) -> usize {
        self.m
    }

    pub fn output_dim(&self) -> usize {
        self.d
    }

    /// `S(X)`; unnormalized, `tr S(X) = tr X(A + B)` is the success
    /// probability.
    pub fn apply(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        let n = self.m * self.m;
        if x.rows() != n || x.cols() != n {
            return Err(Error::DimensionMismatch(format!("input must be {n}x{n}")));
        }
        let ta = x.trace_product(&self.a)?;
        let tb = x.trace_product(&self.b)?;
        Ok(self.output(ta, tb))
    }

    fn output(&self, ta: C64, tb: C64) -> ComplexMatrix {
        let d = self.d;
        let p = max_entangled_projector(d);
        let q = &ComplexMatrix::identity(d * d) - &p;
        &p.scale_c(ta) + &q.scale_c(tb / (d * d - 1) as f64)
    }

    /// `(S ⊗ id)(Y)` for `Y` on `(input pair) ⊗ (reference pair)`, both
    /// `m×m`. The output lives on `(d×d output pair) ⊗ (reference pair)`.
    pub fn apply_extended(&self, y: &ComplexMatrix) -> Result<ComplexMatrix> {
        let (m, d) = (self.m, self.d);
        let n = m * m;
        if y.rows() != n * n || y.cols() != n * n {
            return Err(Error::DimensionMismatch(format!("extended input must be {0}x{0}", n * n)));
        }
        let id = ComplexMatrix::identity(n);
        let dims = [n, n];
        // tr_1[(A ⊗ I) Y] and tr_1[(B ⊗ I) Y]
        let ra = partial_trace_dims(&(&self.a.kron(&id) * y), &dims, &[0])?;
        let rb = partial_trace_dims(&(&self.b.kron(&id) * y), &dims, &[0])?;
        let p = max_entangled_projector(d);
        let q = &ComplexMatrix::identity(d * d) - &p;
        Ok(&p.kron(&ra) + &q.scale(1.0 / (d * d - 1) as f64).kron(&rb))
    }

    /// Choi operator `(S_{A1B1} ⊗ id_{A2B2})(P⁺_{A1A2} ⊗ P⁺_{B1B2})`, laid out
    /// as `A1 B1 (d, d) ⊗ A2 B2 (m, m)`. Positive iff `S` is completely
    /// positive.
    pub fn choi(&self) -> Result<ComplexMatrix> {
        self.apply_extended(&choi_input(self.m)?)
    }
}

/// `P⁺_{A1A2} ⊗ P⁺_{B1B2}` reordered to `A1 B1 A2 B2`.
fn choi_input(m: usize) -> Result<ComplexMatrix> {
    let p = max_entangled_projector(m);
    // built as A1 A2 B1 B2
    permute_subsystems(&p.kron(&p), &[m, m, m, m], &[0, 2, 1, 3])
}

/// Smallest eigenvalue of the Choi operator.
pub fn choi_min_eigenvalue(s: &TwirledSpptMap) -> Result<f64> {
    herm_min(&s.choi()?)
}

/// Result of [`choi_ppt_condition`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChoiPptReport {
    pub min_eigenvalue: f64,
    pub tol: f64,
    pub pass: bool,
}

/// `[(S⊗id)((P⁺⊗P⁺)^{T_A})]^{T_A} ⪰ 0`, i.e. `Γ∘S∘Γ` is completely
/// positive. `T_A` transposes party A's subsystems `A1` and `A2`.
pub fn choi_ppt_condition(s: &TwirledSpptMap, tol: f64) -> Result<ChoiPptReport> {
    let m = s.m;
    let input = partial_transpose_dims(&choi_input(m)?, &[m, m, m, m], &[0, 2])?;
    let out = s.apply_extended(&input)?;
    let out_t = partial_transpose_dims(&out, &[s.d, s.d, m, m], &[0, 2])?;
    let min_eigenvalue = herm_min(&out_t)?;
    Ok(ChoiPptReport { min_eigenvalue, tol, pass: min_eigenvalue >= -tol })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::random::{self, rng};
    use crate::ppt::twirl_uu_star;
    use crate::protocol::build_e1;

    const TOL: f64 = 1e-9;

    #[test]
    fn apply_substitution() {
        let m = 2;
        let p = max_entangled_projector(m);
        let s = TwirledSpptMap::new(p.clone(), ComplexMatrix::zeros(4, 4), m, 3, TOL).unwrap_err();
        assert!(matches!(s, Error::NotSppt(_)));
        let s = TwirledSpptMap::new_unchecked(p.clone(), ComplexMatrix::zeros(4, 4), m, 3).unwrap();
        let out = s.apply(&p).unwrap();
        assert!(out.max_abs_diff(&max_entangled_projector(3)) < 1e-14);
        assert!((out.trace().re - 1.0).abs() < 1e-14);
    }

    #[test]
    fn optimal_map_on_bell_state() {
        let s = TwirledSpptMap::lemma3_optimal(2, 3);
        let out = s.apply(&max_entangled_projector(2)).unwrap();
        assert!(out.max_abs_diff(&max_entangled_projector(3).scale(0.5)) < 1e-14);
        assert!((out.trace().re - 0.5).abs() < 1e-14);
    }

    #[test]
    fn trace_is_probability() {
        let mut r = rng(21);
        for _ in 0..10 {
            let a = random::random_hermitian(4, &mut r);
            let b = random::random_hermitian(4, &mut r);
            let x = random::random_density(4, 4, &mut r);
            let s = TwirledSpptMap::new_unchecked(a.clone(), b.clone(), 2, 3).unwrap();
            let lhs = s.apply(&x).unwrap().trace();
            let rhs = x.trace_product(&(&a + &b)).unwrap();
            assert!((lhs - rhs).norm() < 1e-12);
        }
    }

    #[test]
    fn lemma1_examples() {
        let z = ComplexMatrix::zeros(4, 4);
        assert!(lemma1_check(&z, &z, 2, 3, TOL).unwrap().pass);

        let (a, b) = IsotropicParams::lemma3_optimal(2, 3).operators(2);
        let rep = lemma1_check(&a, &b, 2, 3, TOL).unwrap();
        assert!(rep.pass);
        assert!(rep.margins.iter().all(|m| m.min_eigenvalue >= -1e-14), "{rep:?}");

        let rep = lemma1_check(&max_entangled_projector(2), &z, 2, 3, TOL).unwrap();
        assert!(!rep.pass);
        assert!((rep.margins[4].min_eigenvalue + 0.5).abs() < 1e-14);
        assert!(rep.cp_pass());
        assert!(!rep.ppt_pass());
    }

    #[test]
    fn lemma1_rejects_bad_dims() {
        let z = ComplexMatrix::zeros(4, 4);
        assert!(lemma1_check(&z, &ComplexMatrix::zeros(9, 9), 2, 3, TOL).is_err());
        assert!(lemma1_check(&z, &z, 2, 1, TOL).is_err());
    }

    #[test]
    fn choi_of_zero_map() {
        let z = ComplexMatrix::zeros(4, 4);
        let s = TwirledSpptMap::new_unchecked(z.clone(), z, 2, 3).unwrap();
        assert_eq!(s.choi().unwrap().max_abs(), 0.0);
    }

    #[test]
    fn choi_closed_form() {
        // (S⊗id)(P⁺⊗P⁺) = (1/m²)[P⁺_d ⊗ Aᵀ + (I-P⁺_d)/(d²-1) ⊗ Bᵀ]
        let mut r = rng(5);
        let (m, d) = (2, 3);
        let a = random::random_hermitian(4, &mut r);
        let b = random::random_hermitian(4, &mut r);
        let s = TwirledSpptMap::new_unchecked(a.clone(), b.clone(), m, d).unwrap();
        let p = max_entangled_projector(d);
        let q = &ComplexMatrix::identity(d * d) - &p;
        let want = (&p.kron(&a.transpose()) + &q.scale(1.0 / 8.0).kron(&b.transpose())).scale(0.25);
        assert!(s.choi().unwrap().max_abs_diff(&want) < 1e-14);
    }

    #[test]
    fn choi_of_optimal_map_is_e1() {
        let s = TwirledSpptMap::lemma3_optimal(2, 3);
        let e1 = build_e1(2, 3).unwrap();
        // e1 is stored party-major (A1 A2 B1 B2); the Choi layout is A1 B1 A2 B2
        let e1_slot = permute_subsystems(e1.op(), &[3, 2, 3, 2], &[0, 2, 1, 3]).unwrap();
        assert!(s.choi().unwrap().max_abs_diff(&e1_slot) < 1e-10);
    }

    #[test]
    fn choi_ppt_examples() {
        assert!(choi_ppt_condition(&TwirledSpptMap::lemma3_optimal(2, 3), TOL).unwrap().pass);
        let s = TwirledSpptMap::new_unchecked(max_entangled_projector(2), ComplexMatrix::zeros(4, 4), 2, 3).unwrap();
        assert!(!choi_ppt_condition(&s, TOL).unwrap().pass);
    }

    #[test]
    fn choi_psd_agrees_with_closed_form() {
        let mut r = rng(77);
        for trial in 0..50 {
            let a = random::random_hermitian(4, &mut r);
            let b = random::random_hermitian(4, &mut r);
            // shift so roughly half the samples are PSD
            let shift = if trial % 2 == 0 { 3.0 } else { 0.5 };
            let a = &a + &ComplexMatrix::identity(4).scale(shift);
            let b = &b + &ComplexMatrix::identity(4).scale(shift);
            let s = TwirledSpptMap::new_unchecked(a.clone(), b.clone(), 2, 3).unwrap();
            let closed = lemma1_check(&a, &b, 2, 3, TOL).unwrap().cp_pass();
            let choi = choi_min_eigenvalue(&s).unwrap() >= -TOL;
            assert_eq!(closed, choi, "trial {trial}");
        }
    }

    #[test]
    fn twirl_closure() {
        // feasible (A, B) stay feasible after the U⊗U* twirl
        let mut r = rng(13);
        let (m, d) = (2, 3);
        let (a0, b0) = IsotropicParams { alpha: 0.1, beta: 0.1, gamma: 0.0, delta: 0.7 }.operators(m);
        let mut checked = 0;
        for _ in 0..40 {
            let a = &a0 + &random::random_hermitian(4, &mut r).scale(0.005);
            let b = &b0 + &random::random_hermitian(4, &mut r).scale(0.005);
            if !lemma1_check(&a, &b, m, d, 0.0).unwrap().pass {
                continue;
            }
            checked += 1;
            let ta = twirl_uu_star(&a, m).unwrap();
            let tb = twirl_uu_star(&b, m).unwrap();
            assert!(lemma1_check(&ta, &tb, m, d, 1e-12).unwrap().pass);
            let rho = max_entangled_projector(m);
            assert!((rho.trace_product(&ta).unwrap() - rho.trace_product(&a).unwrap()).norm() < 1e-12);
            assert!((rho.trace_product(&tb).unwrap() - rho.trace_product(&b).unwrap()).norm() < 1e-12);
        }
        assert!(checked > 5);
    }

    #[test]
    fn probability_in_unit_interval() {
        let mut r = rng(3);
        for (m, d) in [(2, 3), (3, 2), (2, 5)] {
            let s = TwirledSpptMap::lemma3_optimal(m, d);
            for _ in 0..10 {
                let x = random::random_density(m * m, 3, &mut r);
                let p = s.apply(&x).unwrap().trace().re;
                assert!((-1e-12..=1.0 + 1e-12).contains(&p));
            }
        }
    }
}
