//! Largest `x` keeping `E(x)` PPT across a cut.
//!
//! With `λ` ranging over the spectrum of `|φ⟩⟨φ|^Γ` and `μ` over that of
//! `|ψ*⟩⟨ψ*|^Γ`, the spectrum of `E(x)^Γ` is `(x+1)λμ - λ - μ + 1`. Only
//! `λμ < 0` can go negative, giving `x ≤ (1-λ)(1-μ)/|λμ|`. A pure state's
//! partial transpose has eigenvalues `p_i` and `±√(p_i p_j)` (`i < j`).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::states::{bipartitions, schmidt, PureState, DEFAULT_SCHMIDT_TOL};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CutBound {
    pub cut: Vec<usize>,
    /// `min[(1-p₁)/p₁·(1+√(q₁q₂))/√(q₁q₂), (1+√(p₁p₂))/√(p₁p₂)·(1-q₁)/q₁]`
    pub x_tight: f64,
    /// `(1-p₁)(1-q₁)/(p₁q₁)`
    pub x_safe: f64,
    /// Minimum over every pair of Schmidt weights of both states.
    pub x_full_pairs: f64,
    pub p1: f64,
    pub p2: f64,
    pub q1: f64,
    pub q2: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum XMode {
    Safe,
    Tight,
}

impl std::str::FromStr for XMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "safe" => Ok(Self::Safe),
            "tight" => Ok(Self::Tight),
            _ => Err(Error::InvalidArgument(format!("unknown x mode {s:?} (expected safe or tight)"))),
        }
    }
}

fn weights(state: &PureState, cut: &[usize]) -> Result<Vec<f64>> {
    let s = schmidt(state, cut)?;
    if s.rank(DEFAULT_SCHMIDT_TOL) < 2 {
        return Err(Error::NotGenuinelyEntangled { cut: s.cut });
    }
    Ok(s.coeffs_squared.into_iter().filter(|&p| p > DEFAULT_SCHMIDT_TOL).collect())
}

/// Nonzero partial-transpose eigenvalues of a pure state with Schmidt
/// weights `w`, split into positive and negative parts.
fn pt_spectrum(w: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let mut pos: Vec<f64> = w.to_vec();
    let mut neg = Vec::new();
    for i in 0..w.len() {
        for j in (i + 1)..w.len() {
            let s = (w[i] * w[j]).sqrt();
            pos.push(s);
            neg.push(-s);
        }
    }
    (pos, neg)
}

fn full_pairs(p: &[f64], q: &[f64]) -> f64 {
    let (p_pos, p_neg) = pt_spectrum(p);
    let (q_pos, q_neg) = pt_spectrum(q);
    let bound = |l: f64, u: f64| (1.0 - l) * (1.0 - u) / (l * u).abs();
    let mut best = f64::INFINITY;
    for &l in &q_neg {
        for &u in &p_pos {
            best = best.min(bound(l, u));
        }
    }
    for &l in &q_pos {
        for &u in &p_neg {
            best = best.min(bound(l, u));
        }
    }
    best
}

/// PPT bound of `E(x)` across `cut`; `p` are the Schmidt weights of `ψ`
/// (equal to those of `ψ*`), `q` those of `φ`.
pub fn ppt_bound_cut(psi: &PureState, phi: &PureState, cut: &[usize]) -> Result<CutBound> {
    if psi.parties().parties() != phi.parties().parties() {
        return Err(Error::DimensionMismatch("psi and phi have different party counts".into()));
    }
    let p = weights(psi, cut)?;
    let q = weights(phi, cut)?;
    let (p1, p2, q1, q2) = (p[0], p[1], q[0], q[1]);
    let sp = (p1 * p2).sqrt();
    let sq = (q1 * q2).sqrt();
    let x_tight = ((1.0 - p1) / p1 * (1.0 + sq) / sq).min((1.0 + sp) / sp * (1.0 - q1) / q1);
    let x_safe = (1.0 - p1) * (1.0 - q1) / (p1 * q1);
    let cut = psi.parties().validate_cut(cut)?;
    Ok(CutBound { cut, x_tight, x_safe, x_full_pairs: full_pairs(&p, &q), p1, p2, q1, q2 })
}

/// Bounds for every canonical bipartition.
pub fn cut_bounds(psi: &PureState, phi: &PureState) -> Result<Vec<CutBound>> {
    bipartitions(psi.parties().parties()).iter().map(|c| ppt_bound_cut(psi, phi, c)).collect()
}

/// `x₀ = min` of the per-cut bounds.
pub fn x0(psi: &PureState, phi: &PureState, mode: XMode) -> Result<f64> {
    let bounds = cut_bounds(psi, phi)?;
    Ok(bounds
        .iter()
        .map(|b| match mode {
            XMode::Safe => b.x_safe,
            XMode::Tight => b.x_tight,
        })
        .fold(f64::INFINITY, f64::min))
}
