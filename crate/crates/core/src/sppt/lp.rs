//! Exact linear program over isotropic `(A, B)` with `γ = 0`.
//!
//! Three variables `(α, β, δ)`, nine half-spaces. Every vertex is the
//! solution of three tight constraints, so enumerating all triples with
//! exact rational arithmetic finds the optimum with no rounding.

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use super::IsotropicParams;
use crate::error::{Error, Result};

type Q = Ratio<i128>;

/// One constraint `c·(α, β, δ) ≥ rhs` and its slack at the optimum.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LpConstraint {
    pub name: String,
    pub coeffs: [f64; 3],
    pub rhs: f64,
    pub slack: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LpSolution {
    pub m: usize,
    pub d: usize,
    /// Optimal `α`, which is also the optimal `P⁺_m → P⁺_d` probability.
    pub alpha: f64,
    /// `α` as an exact fraction `"p/q"`.
    pub alpha_exact: String,
    pub params: IsotropicParams,
    pub constraints: Vec<LpConstraint>,
}

/// Closed-form optimum: `(m-1)/(d-1)` for `d > m`, else 1.
pub fn lemma3_optimum(m: usize, d: usize) -> f64 {
    if d > m {
        (m - 1) as f64 / (d - 1) as f64
    } else {
        1.0
    }
}

fn q(n: i128) -> Q {
    Q::from_integer(n)
}

fn constraints(m: usize, d: usize) -> Vec<(&'static str, [Q; 3], Q)> {
    let (m, d) = (m as i128, d as i128);
    vec![
        ("1 - alpha >= 0", [q(-1), q(0), q(0)], q(-1)),
        ("alpha >= 0", [q(1), q(0), q(0)], q(0)),
        ("beta >= 0", [q(0), q(1), q(0)], q(0)),
        ("delta >= 0", [q(0), q(0), q(1)], q(0)),
        ("1 - beta - delta >= 0", [q(0), q(-1), q(-1)], q(-1)),
        ("(d+1)a + (d+1)(m-1)b + (m-1)c >= 0", [q(d + 1), q((d + 1) * (m - 1)), q(m - 1)], q(0)),
        ("-(d+1)a + (d+1)(m+1)b + (m+1)c >= 0", [q(-(d + 1)), q((d + 1) * (m + 1)), q(m + 1)], q(0)),
        ("-(d-1)a - (d-1)(m-1)b + (m-1)c >= 0", [q(-(d - 1)), q(-(d - 1) * (m - 1)), q(m - 1)], q(0)),
        ("(d-1)a - (d-1)(m+1)b + (m+1)c >= 0", [q(d - 1), q(-(d - 1) * (m + 1)), q(m + 1)], q(0)),
    ]
}

fn det3(r: [[Q; 3]; 3]) -> Q {
    r[0][0] * (r[1][1] * r[2][2] - r[1][2] * r[2][1]) - r[0][1] * (r[1][0] * r[2][2] - r[1][2] * r[2][0])
        + r[0][2] * (r[1][0] * r[2][1] - r[1][1] * r[2][0])
}

fn solve3(rows: [[Q; 3]; 3], rhs: [Q; 3]) -> Option<[Q; 3]> {
    let det = det3(rows);
    if det == q(0) {
        return None;
    }
    let mut x = [q(0); 3];
    for (k, xk) in x.iter_mut().enumerate() {
        let mut r = rows;
        for i in 0..3 {
            r[i][k] = rhs[i];
        }
        *xk = det3(r) / det;
    }
    Some(x)
}

fn to_f64(x: Q) -> f64 {
    *x.numer() as f64 / *x.denom() as f64
}

/// Maximizes `α` over the isotropic constraint polytope. Among optimal
/// vertices the one with smallest `β`, then largest `δ`, is reported.
pub fn isotropic_lp(m: usize, d: usize) -> Result<LpSolution> {
    if m < 2 || d < 2 {
        return Err(Error::InvalidArgument(format!("need m, d >= 2, got m={m}, d={d}")));
    }
    let cons = constraints(m, d);
    let slack = |x: &[Q; 3], c: &[Q; 3], rhs: Q| c[0] * x[0] + c[1] * x[1] + c[2] * x[2] - rhs;
    let mut best: Option<[Q; 3]> = None;
    let n = cons.len();
    for i in 0..n {
        for j in (i + 1)..n {
            for k in (j + 1)..n {
                let rows = [cons[i].1, cons[j].1, cons[k].1];
                let Some(x) = solve3(rows, [cons[i].2, cons[j].2, cons[k].2]) else {
                    continue;
                };
                if cons.iter().any(|(_, c, r)| slack(&x, c, *r) < q(0)) {
                    continue;
                }
                let better = match best {
                    None => true,
                    Some(b) => (x[0], -x[1], x[2]) > (b[0], -b[1], b[2]),
                };
                if better {
                    best = Some(x);
                }
            }
        }
    }
    let x = best.ok_or(Error::Infeasible)?;
    let constraints = cons
        .iter()
        .map(|(name, c, r)| LpConstraint {
            name: name.to_string(),
            coeffs: [to_f64(c[0]), to_f64(c[1]), to_f64(c[2])],
            rhs: to_f64(*r),
            slack: to_f64(slack(&x, c, *r)),
        })
        .collect();
    Ok(LpSolution {
        m,
        d,
        alpha: to_f64(x[0]),
        alpha_exact: format!("{}/{}", x[0].numer(), x[0].denom()),
        params: IsotropicParams { alpha: to_f64(x[0]), beta: to_f64(x[1]), gamma: 0.0, delta: to_f64(x[2]) },
        constraints,
    })
}
