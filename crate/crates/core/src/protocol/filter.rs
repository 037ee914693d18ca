//! One-outcome local filters between bipartite pure states.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, C64, ZERO};
use crate::states::{max_entangled, schmidt, PureState, DEFAULT_SCHMIDT_TOL};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SloccFilter {
    /// `F_A = Σ_i √(κ μ_i / λ_i) |e_i⟩⟨a_i|`
    pub op_a: ComplexMatrix,
    /// `V_B = Σ_i |f_i⟩⟨b_i|`, a partial isometry.
    pub op_b: ComplexMatrix,
    /// `κ = min_i λ_i / μ_i` over the target's support.
    pub probability: f64,
    pub output: PureState,
}

/// Filter `ψ = Σ √λ_i |a_i b_i⟩ → φ = Σ √μ_i |e_i f_i⟩` with a single
/// Kraus operator `F_A ⊗ V_B`. Both states are bipartite; the cut is `A:B`.
pub fn slocc_filter(psi: &PureState, target: &PureState) -> Result<SloccFilter> {
    if psi.parties().parties() != 2 || target.parties().parties() != 2 {
        return Err(Error::DimensionMismatch("slocc_filter needs bipartite states".into()));
    }
    let s = schmidt(psi, &[0])?;
    let t = schmidt(target, &[0])?;
    let r_src = s.rank(DEFAULT_SCHMIDT_TOL);
    let r_dst = t.rank(DEFAULT_SCHMIDT_TOL);
    if r_dst > r_src {
        return Err(Error::RankIncrease { source_rank: r_src, target: r_dst });
    }
    let lambda = &s.coeffs_squared;
    let mu = &t.coeffs_squared;
    let kappa = (0..r_dst).map(|i| lambda[i] / mu[i]).fold(f64::INFINITY, f64::min).min(1.0);

    let (da, db) = (psi.dims()[0], psi.dims()[1]);
    let (ea, eb) = (target.dims()[0], target.dims()[1]);
    let mut op_a = ComplexMatrix::zeros(ea, da);
    let mut op_b = ComplexMatrix::zeros(eb, db);
    for i in 0..r_dst {
        let g = (kappa * mu[i] / lambda[i]).sqrt();
        for row in 0..ea {
            for col in 0..da {
                op_a[(row, col)] += t.left_vectors[(row, i)] * s.left_vectors[(col, i)].conj() * g;
            }
        }
        for row in 0..eb {
            for col in 0..db {
                op_b[(row, col)] += t.right_vectors[(row, i)] * s.right_vectors[(col, i)].conj();
            }
        }
    }
    let (v, dims) = psi.apply_local(&[op_a.clone(), op_b.clone()])?;
    let probability = v.iter().map(C64::norm_sqr).sum::<f64>();
    if probability <= 0.0 {
        return Err(Error::InvalidState("filter annihilates the input".into()));
    }
    let output = PureState::normalize(v.into_iter().map(|z| if z.norm() < 1e-300 { ZERO } else { z }).collect(), dims)?;
    Ok(SloccFilter { op_a, op_b, probability, output })
}

/// Filter to `|φ⁺_r⟩`.
pub fn slocc_filter_to_max_entangled(psi: &PureState, r: usize) -> Result<SloccFilter> {
    slocc_filter(psi, &max_entangled(r))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weighted_to_bell() {
        let psi = PureState::schmidt_form(&[0.8, 0.2], 2, 2).unwrap();
        let f = slocc_filter_to_max_entangled(&psi, 2).unwrap();
        assert!((f.probability - 0.4).abs() < 1e-12);
        assert!(f.output.fidelity(&max_entangled(2)) >= 1.0 - 1e-9);
        // F_A†F_A ⪯ I
        let g = &f.op_a.adjoint() * &f.op_a;
        assert!(crate::linalg::min_eigenvalue(&(&ComplexMatrix::identity(2) - &g)).unwrap() >= -1e-12);
    }

    #[test]
    fn identity_on_bell() {
        let f = slocc_filter_to_max_entangled(&max_entangled(2), 2).unwrap();
        assert!((f.probability - 1.0).abs() < 1e-12);
    }

    #[test]
    fn refuses_rank_increase() {
        let err = slocc_filter_to_max_entangled(&max_entangled(2), 3).unwrap_err();
        assert_eq!(err, Error::RankIncrease { source_rank: 2, target: 3 });
    }

    #[test]
    fn rotated_bases_and_general_target() {
        let mut r = crate::linalg::random::rng(4);
        let ua = crate::linalg::random::random_unitary(3, &mut r);
        let ub = crate::linalg::random::random_unitary(3, &mut r);
        let base = PureState::schmidt_form(&[0.5, 0.3, 0.2], 3, 3).unwrap();
        let (v, dims) = base.apply_local(&[ua, ub]).unwrap();
        let psi = PureState::new(v, dims).unwrap();
        let target = PureState::schmidt_form(&[0.6, 0.4], 2, 2).unwrap();
        let f = slocc_filter(&psi, &target).unwrap();
        assert!(f.output.fidelity(&target) >= 1.0 - 1e-9);
        // κ = min(0.5/0.6, 0.3/0.4)
        assert!((f.probability - 0.75).abs() < 1e-10);
    }
}
