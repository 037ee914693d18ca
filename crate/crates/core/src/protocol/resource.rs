//! Resource states and the Bell post-selection protocol.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, C64, ZERO};
use crate::ppt::{max_entangled_projector, ppt_report};
use crate::states::{bipartitions, DensityMatrix, PartyDims, PureState};
use crate::tensor::permute_subsystems;

/// Relative tolerance for the stored PPT certificates: a cut passes when
/// its partial transpose has min eigenvalue `≥ -1e-10 · tr(op)`.
pub const CERTIFICATE_TOL: f64 = 1e-10;

/// Per-party slot pair: slot 1 carries the output, slot 2 is consumed by
/// the Bell measurement. Slots are stored party-major
/// (`A₁ A₂ B₁ B₂ ...`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SlotLayout {
    pub output_dims: Vec<usize>,
    pub input_dims: Vec<usize>,
}

impl SlotLayout {
    pub fn parties(&self) -> usize {
        self.output_dims.len()
    }

    /// Interleaved `[out_0, in_0, out_1, in_1, ...]`.
    pub fn slot_dims(&self) -> Vec<usize> {
        self.output_dims.iter().zip(&self.input_dims).flat_map(|(&o, &i)| [o, i]).collect()
    }

    /// Slot indices belonging to a set of parties.
    pub fn slots_of(&self, parties: &[usize]) -> Vec<usize> {
        parties.iter().flat_map(|&k| [2 * k, 2 * k + 1]).collect()
    }

    pub fn output_total(&self) -> usize {
        self.output_dims.iter().product()
    }

    pub fn input_total(&self) -> usize {
        self.input_dims.iter().product()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum ResourceKind {
    E1 { m: usize, d: usize },
    Ex { psi: PureState, phi: PureState, x: f64 },
}

/// Partial-transpose certificate for one bipartition.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CutCertificate {
    pub cut: Vec<usize>,
    pub min_eigenvalue: f64,
    pub ppt: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResourceState {
    op: ComplexMatrix,
    layout: SlotLayout,
    kind: ResourceKind,
    ppt_certificates: Vec<CutCertificate>,
}

impl ResourceState {
    fn certify(op: ComplexMatrix, layout: SlotLayout, kind: ResourceKind) -> Result<Self> {
        let dims = layout.slot_dims();
        let trace = op.trace().re;
        let mut ppt_certificates = Vec::new();
        for cut in bipartitions(layout.parties()) {
            let rep = ppt_report(&op, &dims, &layout.slots_of(&cut), 0.0)?;
            ppt_certificates.push(CutCertificate {
                cut,
                min_eigenvalue: rep.min_eigenvalue,
                ppt: rep.min_eigenvalue >= -CERTIFICATE_TOL * trace,
            });
        }
        Ok(Self { op, layout, kind, ppt_certificates })
    }

    pub fn op(&self) -> &ComplexMatrix {
        &self.op
    }

    pub fn layout(&self) -> &SlotLayout {
        &self.layout
    }

    pub fn kind(&self) -> &ResourceKind {
        &self.kind
    }

    pub fn ppt_certificates(&self) -> &[CutCertificate] {
        &self.ppt_certificates
    }

    pub fn trace(&self) -> f64 {
        self.op.trace().re
    }

    /// Every bipartition passes its certificate.
    pub fn is_ppt_everywhere(&self) -> bool {
        self.ppt_certificates.iter().all(|c| c.ppt)
    }

    /// `slot_layout`'s party-major dims grouped per party, `out_k · in_k`.
    pub fn party_dims(&self) -> PartyDims {
        let l = &self.layout;
        PartyDims::new(l.output_dims.iter().zip(&l.input_dims).map(|(o, i)| o * i).collect()).expect("dims ≥ 1")
    }

    /// The operator with all output slots first, then all input slots.
    pub fn tensor_order_op(&self) -> Result<ComplexMatrix> {
        let n = self.layout.parties();
        let order: Vec<usize> = (0..n).map(|k| 2 * k).chain((0..n).map(|k| 2 * k + 1)).collect();
        permute_subsystems(&self.op, &self.layout.slot_dims(), &order)
    }
}

/// `E⁽¹⁾ = (1/m²)[α P⁺_d ⊗ P⁺_m + (I - P⁺_d) ⊗ (I - P⁺_m)/(d² - 1)]` with
/// `α = min(1, (m-1)/(d-1))`; for `d ≥ m` this is
/// `[(m-1) P⁺_d ⊗ P⁺_m + (I - P⁺_d) ⊗ (I - P⁺_m)/(d+1)] / (m²(d-1))`.
pub fn build_e1(m: usize, d: usize) -> Result<ResourceState> {
    if m < 2 || d < 2 {
        return Err(Error::InvalidArgument(format!("need m, d >= 2, got m={m}, d={d}")));
    }
    let alpha = ((m - 1) as f64 / (d - 1) as f64).min(1.0);
    let pd = max_entangled_projector(d);
    let pm = max_entangled_projector(m);
    let qd = &ComplexMatrix::identity(d * d) - &pd;
    let qm = &ComplexMatrix::identity(m * m) - &pm;
    let op = (&pd.kron(&pm).scale(alpha) + &qd.kron(&qm).scale(1.0 / (d * d - 1) as f64)).scale(1.0 / (m * m) as f64);
    // built as A1 B1 A2 B2
    let op = permute_subsystems(&op, &[d, d, m, m], &[0, 2, 1, 3])?;
    let layout = SlotLayout { output_dims: vec![d, d], input_dims: vec![m, m] };
    ResourceState::certify(op, layout, ResourceKind::E1 { m, d })
}

/// `E(x) = x |φ⟩⟨φ| ⊗ (|ψ⟩⟨ψ|)ᵀ + (I - |φ⟩⟨φ|) ⊗ (I - (|ψ⟩⟨ψ|)ᵀ)`.
pub fn build_ex(psi: &PureState, phi: &PureState, x: f64) -> Result<ResourceState> {
    let n = psi.parties().parties();
    if phi.parties().parties() != n {
        return Err(Error::DimensionMismatch(format!("psi has {n} parties, phi has {}", phi.parties().parties())));
    }
    if !(x >= 0.0 && x.is_finite()) {
        return Err(Error::InvalidArgument(format!("x={x} must be finite and non-negative")));
    }
    let f = phi.projector();
    let p = psi.projector().transpose();
    let fc = &ComplexMatrix::identity(f.rows()) - &f;
    let pc = &ComplexMatrix::identity(p.rows()) - &p;
    let op = &f.kron(&p).scale(x) + &fc.kron(&pc);
    let dims: Vec<usize> = phi.dims().iter().chain(psi.dims()).copied().collect();
    let order: Vec<usize> = (0..n).flat_map(|k| [k, n + k]).collect();
    let op = permute_subsystems(&op, &dims, &order)?;
    let layout = SlotLayout { output_dims: phi.dims().to_vec(), input_dims: psi.dims().to_vec() };
    ResourceState::certify(op, layout, ResourceKind::Ex { psi: psi.clone(), phi: phi.clone(), x })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProtocolOutcome {
    pub output: DensityMatrix,
    /// Probability with the resource normalized to unit trace.
    pub success_probability: f64,
    /// Trace of the post-selected operator with the resource as built.
    pub unnormalized_weight: f64,
}

/// Unnormalized `tr_{23}[Π⁺_{23} (R ⊗ |in⟩⟨in|) Π⁺_{23}]`, where `Π⁺_{23}`
/// projects every party's measured pair onto `|φ⁺⟩`.
pub fn post_selected_operator(resource: &ResourceState, input: &PureState) -> Result<ComplexMatrix> {
    let l = resource.layout();
    if input.dims() != l.input_dims.as_slice() {
        return Err(Error::DimensionMismatch(format!(
            "input dims {:?} do not match resource input slots {:?}",
            input.dims(),
            l.input_dims
        )));
    }
    // ⟨φ⁺|b c⟩ = δ_bc/√i per party, so the contraction sandwiches the
    // input slots with the amplitudes of `input`.
    let r = resource.tensor_order_op()?;
    let (no, ni) = (l.output_total(), l.input_total());
    let amp = input.amplitudes();
    let mut out = ComplexMatrix::zeros(no, no);
    let scale = 1.0 / ni as f64;
    for a in 0..no {
        for a2 in 0..no {
            let mut acc = ZERO;
            for b in 0..ni {
                if amp[b] == ZERO {
                    continue;
                }
                let row = (a * ni + b) * (no * ni) + a2 * ni;
                let inner: C64 = r.data()[row..row + ni].iter().zip(amp).map(|(x, y)| x * y.conj()).sum();
                acc += amp[b] * inner;
            }
            out[(a, a2)] = acc * scale;
        }
    }
    Ok(out)
}

fn run(resource: &ResourceState, input: &PureState) -> Result<ProtocolOutcome> {
    let out = post_selected_operator(resource, input)?;
    let weight = out.trace().re;
    if weight <= 1e-300 {
        return Err(Error::InvalidState("post-selected outcome has zero probability".into()));
    }
    let parties = PartyDims::new(resource.layout().output_dims.clone())?;
    let output = DensityMatrix::from_unnormalized(&out, parties)?;
    Ok(ProtocolOutcome { output, success_probability: weight / resource.trace(), unnormalized_weight: weight })
}

/// Two-party protocol: Bell measurements on `A₂A₃` and `B₂B₃`.
pub fn protocol_convert_bipartite(resource: &ResourceState, input: &PureState) -> Result<ProtocolOutcome> {
    if resource.layout().parties() != 2 {
        return Err(Error::DimensionMismatch(format!("{}-party resource in bipartite protocol", resource.layout().parties())));
    }
    run(resource, input)
}

/// N-party protocol: one Bell measurement per party.
pub fn protocol_convert_multipartite(resource: &ResourceState, input: &PureState) -> Result<ProtocolOutcome> {
    run(resource, input)
}
