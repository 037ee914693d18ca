//! Heuristic search for `(A, B)` certifying `ρ → P⁺_d`.
//!
//! Dykstra's alternating projections over the constraint sets
//! `A ⪰ 0`, `B ⪰ 0`, `I - A - B ⪰ 0`, the two partial-transpose
//! inequalities, and the affine pair `tr ρA = p`, `tr ρB = 0`. When `ρ` is
//! `U ⊗ U*` invariant the twirled subspace is added as one more set.
//! `Feasible` results are re-verified by [`lemma1_check`]; `NoCertificate`
//! proves nothing.

use serde::{Deserialize, Serialize};

use super::{lemma1_check, Lemma1Report};
use crate::error::{Error, Result};
use crate::linalg::{eig_hermitian, ComplexMatrix};
use crate::ppt::{partial_transpose_dims, twirl_uu_star};
use crate::states::DensityMatrix;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchOptions {
    /// Maximum number of full projection cycles.
    pub max_cycles: usize,
    /// Acceptance tolerance for the final `lemma1_check` and trace
    /// constraints.
    pub tol: f64,
    /// Cycles between progress checks.
    pub window: usize,
    /// Minimum relative decrease of the violation per window.
    pub min_progress: f64,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self { max_cycles: 20_000, tol: 1e-7, window: 200, min_progress: 0.01 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "outcome")]
pub enum FeasibilityOutcome {
    Feasible { a: ComplexMatrix, b: ComplexMatrix, trace_rho_a: f64, trace_rho_b: f64, report: Lemma1Report, cycles: usize },
    NoCertificate { cycles: usize, violation: f64 },
}

impl FeasibilityOutcome {
    pub fn is_feasible(&self) -> bool {
        matches!(self, Self::Feasible { .. })
    }
}

#[derive(Clone)]
struct Pair {
    a: ComplexMatrix,
    b: ComplexMatrix,
}

impl Pair {
    fn add(&self, o: &Pair) -> Pair {
        Pair { a: &self.a + &o.a, b: &self.b + &o.b }
    }

    fn sub(&self, o: &Pair) -> Pair {
        Pair { a: &self.a - &o.a, b: &self.b - &o.b }
    }
}

enum Set {
    /// `ka·Γ(A) + kb·Γ(B) + c0 ⪰ 0`, with `Γ` the optional partial transpose.
    Lmi {
        ka: f64,
        kb: f64,
        c0: Option<ComplexMatrix>,
        transposed: bool,
    },
    Traces,
    Twirl,
}

struct Problem {
    m: usize,
    rho: ComplexMatrix,
    rho_norm2: f64,
    p: f64,
    sets: Vec<Set>,
}

fn psd_part(x: &ComplexMatrix) -> Result<ComplexMatrix> {
    let h = x.hermitian_part();
    let e = eig_hermitian(&h, 1e-8 * h.max_abs().max(1.0))?;
    Ok(e.reconstruct_with(|l| l.max(0.0)))
}

impl Problem {
    fn gamma(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        partial_transpose_dims(x, &[self.m, self.m], &[0])
    }

    fn project(&self, set: &Set, y: &Pair) -> Result<Pair> {
        match set {
            Set::Lmi { ka, kb, c0, transposed } => {
                let (ya, yb) = if *transposed { (self.gamma(&y.a)?, self.gamma(&y.b)?) } else { (y.a.clone(), y.b.clone()) };
                let mut x = &ya.scale(*ka) + &yb.scale(*kb);
                if let Some(c) = c0 {
                    x = &x + c;
                }
                let mut delta = &psd_part(&x)? - &x;
                if *transposed {
                    delta = self.gamma(&delta)?;
                }
                let w = ka * ka + kb * kb;
                Ok(Pair { a: &y.a + &delta.scale(ka / w), b: &y.b + &delta.scale(kb / w) })
            }
            Set::Traces => {
                let ta = self.rho.trace_product(&y.a)?.re;
                let tb = self.rho.trace_product(&y.b)?.re;
                Ok(Pair {
                    a: &y.a + &self.rho.scale((self.p - ta) / self.rho_norm2),
                    b: &y.b - &self.rho.scale(tb / self.rho_norm2),
                })
            }
            Set::Twirl => Ok(Pair { a: twirl_uu_star(&y.a, self.m)?, b: twirl_uu_star(&y.b, self.m)? }),
        }
    }

    fn traces(&self, x: &Pair) -> Result<(f64, f64)> {
        Ok((self.rho.trace_product(&x.a)?.re, self.rho.trace_product(&x.b)?.re))
    }

    fn violation(&self, x: &Pair, d: usize) -> Result<f64> {
        let rep = lemma1_check(&x.a.hermitian_part(), &x.b.hermitian_part(), self.m, d, 0.0)?;
        let (ta, tb) = self.traces(x)?;
        Ok((-rep.worst()).max(0.0).max((ta - self.p).abs()).max(tb.abs()))
    }
}

/// Searches with [`SearchOptions::default`] and a cycle budget.
pub fn lemma2_feasibility_search(rho: &DensityMatrix, d: usize, p_target: f64, budget: usize) -> Result<FeasibilityOutcome> {
    let opts = SearchOptions { max_cycles: budget, ..SearchOptions::default() };
    lemma2_feasibility_search_with(rho, d, p_target, &opts)
}

pub fn lemma2_feasibility_search_with(
    rho: &DensityMatrix,
    d: usize,
    p_target: f64,
    opts: &SearchOptions,
) -> Result<FeasibilityOutcome> {
    let dims = rho.parties().dims();
    if dims.len() != 2 || dims[0] != dims[1] {
        return Err(Error::DimensionMismatch(format!("rho must live on C^m (x) C^m, got dims {dims:?}")));
    }
    if d < 2 {
        return Err(Error::InvalidArgument(format!("output dimension d={d} must be at least 2")));
    }
    if !(p_target > 0.0 && p_target <= 1.0) {
        return Err(Error::InvalidArgument(format!("p_target={p_target} must lie in (0, 1]")));
    }
    let m = dims[0];
    let n = m * m;
    let id = ComplexMatrix::identity(n);
    let df = d as f64;
    let rho_op = rho.op().hermitian_part();
    let mut sets = vec![
        Set::Lmi { ka: 1.0, kb: 0.0, c0: None, transposed: false },
        Set::Lmi { ka: 0.0, kb: 1.0, c0: None, transposed: false },
        Set::Lmi { ka: -1.0, kb: -1.0, c0: Some(id), transposed: false },
        Set::Lmi { ka: -1.0, kb: 1.0 / (df - 1.0), c0: None, transposed: true },
        Set::Lmi { ka: 1.0, kb: 1.0 / (df + 1.0), c0: None, transposed: true },
        Set::Traces,
    ];
    if twirl_uu_star(&rho_op, m)?.max_abs_diff(&rho_op) < 1e-10 {
        sets.push(Set::Twirl);
    }
    let rho_norm2 = rho_op.frobenius_norm().powi(2);
    let problem = Problem { m, rho: rho_op, rho_norm2, p: p_target, sets };

    let zero = Pair { a: ComplexMatrix::zeros(n, n), b: ComplexMatrix::zeros(n, n) };
    let mut x = zero.clone();
    let mut increments = vec![zero; problem.sets.len()];
    let mut last_check = f64::INFINITY;
    let mut violation = f64::INFINITY;
    let mut cycles = 0;

    while cycles < opts.max_cycles {
        for (set, inc) in problem.sets.iter().zip(increments.iter_mut()) {
            let y = x.add(inc);
            let next = problem.project(set, &y)?;
            *inc = y.sub(&next);
            x = next;
        }
        cycles += 1;
        if cycles % opts.window == 0 || cycles == opts.max_cycles {
            violation = problem.violation(&x, d)?;
            if violation <= 0.1 * opts.tol {
                break;
            }
            if violation > last_check * (1.0 - opts.min_progress) {
                break;
            }
            last_check = violation;
        }
    }

    let a = x.a.hermitian_part();
    let b = x.b.hermitian_part();
    let report = lemma1_check(&a, &b, m, d, opts.tol)?;
    let (ta, tb) = problem.traces(&Pair { a: a.clone(), b: b.clone() })?;
    if report.pass && (ta - p_target).abs() <= opts.tol && tb.abs() <= opts.tol {
        Ok(FeasibilityOutcome::Feasible { a, b, trace_rho_a: ta, trace_rho_b: tb, report, cycles })
    } else {
        Ok(FeasibilityOutcome::NoCertificate { cycles, violation })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ppt::max_entangled_projector;
    use crate::states::{max_entangled, PartyDims};

    fn bell() -> DensityMatrix {
        DensityMatrix::from_pure(&max_entangled(2))
    }

    #[test]
    fn finds_lemma3_map() {
        let out = lemma2_feasibility_search(&bell(), 3, 0.5, 20_000).unwrap();
        let FeasibilityOutcome::Feasible { a, b, trace_rho_a, .. } = out else {
            panic!("expected Feasible, got {out:?}");
        };
        assert!((trace_rho_a - 0.5).abs() < 1e-7);
        // twirled solution is the unique isotropic optimum (0.5, 0, 0, 1)
        let p = max_entangled_projector(2);
        let q = &ComplexMatrix::identity(4) - &p;
        let alpha = p.trace_product(&a).unwrap().re;
        let beta = q.trace_product(&a).unwrap().re / 3.0;
        let delta = q.trace_product(&b).unwrap().re / 3.0;
        assert!((alpha - 0.5).abs() < 1e-6 && beta.abs() < 1e-6 && (delta - 1.0).abs() < 1e-6);
    }

    #[test]
    fn refuses_above_optimum() {
        let out = lemma2_feasibility_search(&bell(), 3, 0.6, 20_000).unwrap();
        assert!(!out.is_feasible());
    }

    #[test]
    fn maximally_mixed_has_no_certificate() {
        let rho = DensityMatrix::new(ComplexMatrix::identity(4).scale(0.25), PartyDims::new(vec![2, 2]).unwrap()).unwrap();
        for p in [0.5, 0.1] {
            assert!(!lemma2_feasibility_search(&rho, 2, p, 5_000).unwrap().is_feasible());
        }
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(lemma2_feasibility_search(&bell(), 3, 0.0, 10).is_err());
        assert!(lemma2_feasibility_search(&bell(), 1, 0.5, 10).is_err());
    }
}
