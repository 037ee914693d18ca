//! End-to-end conversion `ψ → φ`.
//!
//! Bipartite: filter to `P⁺_r`, run the `E⁽¹⁾(r, r')` protocol, filter to
//! `φ`. When `φ` has no larger Schmidt rank a single filter suffices.
//! Multipartite: one `E(x₀)` protocol run.

use serde::{Deserialize, Serialize};

use super::bounds::{x0, XMode};
use super::filter::{slocc_filter, slocc_filter_to_max_entangled};
use super::resource::{build_e1, build_ex, protocol_convert_bipartite, protocol_convert_multipartite};
use crate::error::{Error, Result};
use crate::linalg::eig_hermitian;
use crate::states::{bipartitions, schmidt_rank, DensityMatrix, PureState, DEFAULT_SCHMIDT_TOL};

/// Purity required before a protocol output is handed to the next stage.
const PURITY_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "stage", rename_all = "snake_case")]
pub enum Stage {
    Identity,
    Filter { from_rank: usize, to_rank: usize, probability: f64 },
    E1Protocol { m: usize, d: usize, probability: f64, resource_ppt: bool },
    ExProtocol { x: f64, probability: f64, resource_ppt: bool },
}

impl Stage {
    pub fn probability(&self) -> f64 {
        match self {
            Stage::Identity => 1.0,
            Stage::Filter { probability, .. } | Stage::E1Protocol { probability, .. } | Stage::ExProtocol { probability, .. } => {
                *probability
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConversionPlan {
    pub stages: Vec<Stage>,
    pub total_probability: f64,
    pub fidelity: f64,
    pub output: DensityMatrix,
}

fn dominant_vector(rho: &DensityMatrix) -> Result<PureState> {
    let e = eig_hermitian(rho.op(), 1e-10)?;
    let top = *e.eigenvalues.last().expect("nonempty");
    if top < 1.0 - PURITY_TOL {
        return Err(Error::InvalidState(format!("protocol output is not pure (largest eigenvalue {top})")));
    }
    PureState::normalize(e.vector(e.eigenvalues.len() - 1), rho.parties().clone())
}

fn finish(stages: Vec<Stage>, output: DensityMatrix, phi: &PureState) -> ConversionPlan {
    let total_probability = stages.iter().map(Stage::probability).product();
    let fidelity = output.fidelity(phi);
    ConversionPlan { stages, total_probability, fidelity, output }
}

/// Runs the conversion with `x₀` in tight mode for multipartite states.
pub fn convert_pipeline(psi: &PureState, phi: &PureState) -> Result<ConversionPlan> {
    convert_pipeline_with(psi, phi, XMode::Tight)
}

pub fn convert_pipeline_with(psi: &PureState, phi: &PureState, mode: XMode) -> Result<ConversionPlan> {
    let n = psi.parties().parties();
    if phi.parties().parties() != n || n < 2 {
        return Err(Error::DimensionMismatch(format!("conversion between {n}- and {}-party states", phi.parties().parties())));
    }
    let cuts = bipartitions(n);
    let ranks: Vec<usize> = cuts.iter().map(|c| schmidt_rank(psi, c, DEFAULT_SCHMIDT_TOL)).collect::<Result<_>>()?;
    if ranks.iter().all(|&r| r == 1) {
        return Err(Error::SeparableInput);
    }
    if psi.dims() == phi.dims() && psi.fidelity(phi) >= 1.0 - 1e-12 {
        return Ok(finish(vec![Stage::Identity], DensityMatrix::from_pure(phi), phi));
    }
    if n > 2 {
        let x = x0(psi, phi, mode)?;
        let resource = build_ex(psi, phi, x)?;
        let out = protocol_convert_multipartite(&resource, psi)?;
        let stage = Stage::ExProtocol { x, probability: out.success_probability, resource_ppt: resource.is_ppt_everywhere() };
        return Ok(finish(vec![stage], out.output, phi));
    }

    let r = ranks[0];
    let r2 = schmidt_rank(phi, &[0], DEFAULT_SCHMIDT_TOL)?;
    if r2 <= r {
        let f = slocc_filter(psi, phi)?;
        let stage = Stage::Filter { from_rank: r, to_rank: r2, probability: f.probability };
        return Ok(finish(vec![stage], DensityMatrix::from_pure(&f.output), phi));
    }
    let first = slocc_filter_to_max_entangled(psi, r)?;
    let resource = build_e1(r, r2)?;
    let mid = protocol_convert_bipartite(&resource, &first.output)?;
    let mid_state = dominant_vector(&mid.output)?;
    let last = slocc_filter(&mid_state, phi)?;
    let stages = vec![
        Stage::Filter { from_rank: r, to_rank: r, probability: first.probability },
        Stage::E1Protocol { m: r, d: r2, probability: mid.success_probability, resource_ppt: resource.is_ppt_everywhere() },
        Stage::Filter { from_rank: r2, to_rank: r2, probability: last.probability },
    ];
    Ok(finish(stages, DensityMatrix::from_pure(&last.output), phi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{ghz, w};

    #[test]
    fn rank_two_to_rank_three() {
        let psi = PureState::schmidt_form(&[0.7, 0.3], 2, 2).unwrap();
        let phi = PureState::schmidt_form(&[0.5, 0.3, 0.2], 3, 3).unwrap();
        let plan = convert_pipeline(&psi, &phi).unwrap();
        assert_eq!(plan.stages.len(), 3);
        assert!(plan.total_probability > 0.0);
        assert!(plan.fidelity >= 1.0 - 1e-8);
        // 0.6 · 1/28 · min(1/3 / 0.5, ...) = 0.6 · 1/28 · 2/3
        assert!((plan.total_probability - 0.6 / 28.0 * (2.0 / 3.0)).abs() < 1e-10);
    }

    #[test]
    fn product_input_refused() {
        let psi = PureState::basis(&[2, 2], &[0, 0]).unwrap();
        let phi = PureState::schmidt_form(&[0.5, 0.5], 2, 2).unwrap();
        assert_eq!(convert_pipeline(&psi, &phi).unwrap_err(), Error::SeparableInput);
    }

    #[test]
    fn identity_plan() {
        let psi = PureState::schmidt_form(&[0.7, 0.3], 2, 2).unwrap();
        let plan = convert_pipeline(&psi, &psi).unwrap();
        assert_eq!(plan.stages, vec![Stage::Identity]);
        assert_eq!(plan.total_probability, 1.0);
    }

    #[test]
    fn rank_decrease_is_plain_slocc() {
        let psi = PureState::schmidt_form(&[0.5, 0.3, 0.2], 3, 3).unwrap();
        let phi = PureState::schmidt_form(&[0.5, 0.5], 2, 2).unwrap();
        let plan = convert_pipeline(&psi, &phi).unwrap();
        assert_eq!(plan.stages.len(), 1);
        assert!((plan.total_probability - 0.6).abs() < 1e-10);
    }

    #[test]
    fn ghz_w_both_ways() {
        for (psi, phi) in [(w(), ghz()), (ghz(), w())] {
            let plan = convert_pipeline(&psi, &phi).unwrap();
            assert!(plan.fidelity >= 1.0 - 1e-9);
            assert!(plan.total_probability > 0.0);
            assert!(matches!(plan.stages[0], Stage::ExProtocol { resource_ppt: true, .. }));
        }
    }
}
