//! Pure states, density operators and Schmidt decompositions.
//!
//! Basis labels start at 0. Where the usual textbook labels start at 1
//! (`|1⟩, |2⟩` for a qubit), label `k` maps to index `k - 1` here, so
//! `(|111⟩ + |222⟩)/√2` is stored as `(|000⟩ + |111⟩)/√2`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, eig_hermitian, random, ComplexMatrix, C64, ZERO};
use crate::tensor::permute_vector;

pub const NORM_TOL: f64 = 1e-10;
pub const DEFAULT_SCHMIDT_TOL: f64 = 1e-8;
/// Coefficients below this carry no Schmidt vectors.
const VECTOR_CUTOFF: f64 = 1e-14;

/// Local dimensions, one per party.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct PartyDims(Vec<usize>);

impl TryFrom<Vec<usize>> for PartyDims {
    type Error = Error;

    fn try_from(v: Vec<usize>) -> Result<Self> {
        PartyDims::new(v)
    }
}

impl From<PartyDims> for Vec<usize> {
    fn from(p: PartyDims) -> Self {
        p.0
    }
}

impl PartyDims {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() || dims.contains(&0) {
            return Err(Error::InvalidArgument(format!("bad local dimensions {dims:?}")));
        }
        Ok(Self(dims))
    }

    pub fn dims(&self) -> &[usize] {
        &self.0
    }

    pub fn parties(&self) -> usize {
        self.0.len()
    }

    pub fn total(&self) -> usize {
        self.0.iter().product()
    }

    /// Product of the local dimensions of `subset`.
    pub fn dim_of(&self, subset: &[usize]) -> usize {
        subset.iter().map(|&k| self.0[k]).product()
    }

    /// Sorted, deduplicated nonempty proper subset, or `BadCut`.
    pub fn validate_cut(&self, cut: &[usize]) -> Result<Vec<usize>> {
        let n = self.parties();
        let mut c: Vec<usize> = cut.to_vec();
        c.sort_unstable();
        c.dedup();
        if c.is_empty() || c.len() >= n || c.iter().any(|&k| k >= n) {
            return Err(Error::BadCut { cut: cut.to_vec(), parties: n });
        }
        Ok(c)
    }

    pub fn complement(&self, subset: &[usize]) -> Vec<usize> {
        (0..self.parties()).filter(|k| !subset.contains(k)).collect()
    }
}

/// A cut and its complement describe the same bipartition; the canonical
/// representative is the side containing party 0.
pub fn canonical_cut(parties: usize, cut: &[usize]) -> Vec<usize> {
    if cut.contains(&0) {
        let mut c = cut.to_vec();
        c.sort_unstable();
        c.dedup();
        c
    } else {
        (0..parties).filter(|k| !cut.contains(k)).collect()
    }
}

/// All `2^{n-1} - 1` bipartitions of `n` parties, as canonical cuts.
pub fn bipartitions(parties: usize) -> Vec<Vec<usize>> {
    if parties < 2 {
        return Vec::new();
    }
    let rest = parties - 1;
    // bit k of mask decides whether party k+1 sits with party 0
    (0..(1usize << rest) - 1)
        .map(|mask| std::iter::once(0).chain((1..parties).filter(|k| mask >> (k - 1) & 1 == 1)).collect())
        .collect()
}

/// Normalized state vector tagged with its local dimensions.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PureStateJson", into = "PureStateJson")]
pub struct PureState {
    amplitudes: Vec<C64>,
    parties: PartyDims,
}

/// Wire format: `{"dims": [...], "amplitudes": [[re, im], ...]}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
struct PureStateJson {
    dims: Vec<usize>,
    amplitudes: Vec<[f64; 2]>,
}

impl TryFrom<PureStateJson> for PureState {
    type Error = Error;

    fn try_from(j: PureStateJson) -> Result<Self> {
        PureState::new(j.amplitudes.into_iter().map(|[re, im]| C64::new(re, im)).collect(), PartyDims::new(j.dims)?)
    }
}

impl From<PureState> for PureStateJson {
    fn from(s: PureState) -> Self {
        PureStateJson { dims: s.parties.0, amplitudes: s.amplitudes.iter().map(|z| [z.re, z.im]).collect() }
    }
}

impl PureState {
    /// Requires unit norm within [`NORM_TOL`].
    pub fn new(amplitudes: Vec<C64>, parties: PartyDims) -> Result<Self> {
        if amplitudes.len() != parties.total() {
            return Err(Error::DimensionMismatch(format!("{} amplitudes for dims {:?}", amplitudes.len(), parties.dims())));
        }
        if amplitudes.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidState("non-finite amplitude".into()));
        }
        let n = linalg::norm(&amplitudes);
        if (n - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidState(format!("norm {n} is not 1")));
        }
        Ok(Self { amplitudes, parties })
    }

    /// Normalizes first; fails only on a zero (or non-finite) vector.
    pub fn normalize(amplitudes: Vec<C64>, parties: PartyDims) -> Result<Self> {
        let n = linalg::norm(&amplitudes);
        if !n.is_finite() || n <= 1e-300 {
            return Err(Error::InvalidState("cannot normalize a zero vector".into()));
        }
        Self::new(amplitudes.iter().map(|z| z / n).collect(), parties)
    }

    /// Computational basis state `|i_0 i_1 ...⟩`.
    pub fn basis(dims: &[usize], labels: &[usize]) -> Result<Self> {
        let parties = PartyDims::new(dims.to_vec())?;
        if labels.len() != dims.len() || labels.iter().zip(dims).any(|(l, d)| l >= d) {
            return Err(Error::InvalidArgument(format!("labels {labels:?} for dims {dims:?}")));
        }
        let idx = labels.iter().zip(crate::tensor::strides(dims)).map(|(l, s)| l * s).sum::<usize>();
        let mut amps = vec![ZERO; parties.total()];
        amps[idx] = C64::new(1.0, 0.0);
        Self::new(amps, parties)
    }

    /// `Σ_i √w_i |ii⟩` on `C^{da} ⊗ C^{db}`; weights are normalized.
    pub fn schmidt_form(weights: &[f64], da: usize, db: usize) -> Result<Self> {
        if weights.len() > da.min(db) || weights.iter().any(|&w| w < 0.0 || !w.is_finite()) {
            return Err(Error::InvalidArgument(format!("weights {weights:?} for {da}x{db}")));
        }
        let mut amps = vec![ZERO; da * db];
        for (i, &w) in weights.iter().enumerate() {
            amps[i * db + i] = C64::new(w.sqrt(), 0.0);
        }
        Self::normalize(amps, PartyDims::new(vec![da, db])?)
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn parties(&self) -> &PartyDims {
        &self.parties
    }

    pub fn dims(&self) -> &[usize] {
        self.parties.dims()
    }

    /// `|ψ⟩⟨ψ|`
    pub fn projector(&self) -> ComplexMatrix {
        ComplexMatrix::projector(&self.amplitudes)
    }

    /// Entrywise complex conjugate `|ψ*⟩`, so `|ψ*⟩⟨ψ*| = (|ψ⟩⟨ψ|)^T`.
    pub fn conj(&self) -> Self {
        Self { amplitudes: self.amplitudes.iter().map(|z| z.conj()).collect(), parties: self.parties.clone() }
    }

    /// `<self|other>`
    pub fn overlap(&self, other: &PureState) -> C64 {
        linalg::inner(&self.amplitudes, &other.amplitudes)
    }

    /// `|<self|other>|^2`, or 0 for different dimensions.
    pub fn fidelity(&self, other: &PureState) -> f64 {
        if self.parties != other.parties {
            return 0.0;
        }
        self.overlap(other).norm_sqr()
    }

    /// Applies a local operator to each party (`ops[k]` maps `C^{d_k}` into
    /// `C^{d'_k}`) and returns the unnormalized vector with the new dims.
    pub fn apply_local(&self, ops: &[ComplexMatrix]) -> Result<(Vec<C64>, PartyDims)> {
        if ops.len() != self.parties.parties() {
            return Err(Error::DimensionMismatch(format!(
                "{} local operators for {} parties",
                ops.len(),
                self.parties.parties()
            )));
        }
        let mut full = ComplexMatrix::identity(1);
        for (op, &d) in ops.iter().zip(self.dims()) {
            if op.cols() != d {
                return Err(Error::DimensionMismatch(format!(
                    "local operator with {} columns on a dimension-{d} party",
                    op.cols()
                )));
            }
            full = full.kron(op);
        }
        let dims = PartyDims::new(ops.iter().map(|o| o.rows()).collect())?;
        Ok((full.mul_vec(&self.amplitudes)?, dims))
    }
}

/// `|φ⁺_d⟩ = Σ_i |ii⟩/√d` on `C^d ⊗ C^d`.
pub fn max_entangled(d: usize) -> PureState {
    let w = vec![1.0; d];
    PureState::schmidt_form(&w, d, d).expect("valid maximally entangled state")
}

/// `(|000⟩ + |111⟩)/√2`
pub fn ghz() -> PureState {
    let a = std::f64::consts::FRAC_1_SQRT_2;
    let mut amps = vec![ZERO; 8];
    amps[0] = C64::new(a, 0.0);
    amps[7] = C64::new(a, 0.0);
    PureState::new(amps, PartyDims(vec![2, 2, 2])).expect("normalized")
}

/// `(|001⟩ + |010⟩ + |100⟩)/√3`
pub fn w() -> PureState {
    let a = 1.0 / 3f64.sqrt();
    let mut amps = vec![ZERO; 8];
    for i in [1, 2, 4] {
        amps[i] = C64::new(a, 0.0);
    }
    PureState::new(amps, PartyDims(vec![2, 2, 2])).expect("normalized")
}

/// Normalized complex-Gaussian state; deterministic per seed.
pub fn random_pure(parties: &PartyDims, seed: u64) -> PureState {
    let mut r = random::rng(seed);
    let v = random::gaussian_vector(parties.total(), &mut r);
    PureState::normalize(v, parties.clone()).expect("gaussian vector is nonzero")
}

/// Density operator with unit trace.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityMatrix {
    op: ComplexMatrix,
    parties: PartyDims,
}

impl DensityMatrix {
    /// Checks Hermiticity (1e-10), positivity (min eigenvalue ≥ -1e-9) and
    /// unit trace (1e-10).
    pub fn new(op: ComplexMatrix, parties: PartyDims) -> Result<Self> {
        let n = op.require_square()?;
        if n != parties.total() {
            return Err(Error::DimensionMismatch(format!("{n}x{n} operator for dims {:?}", parties.dims())));
        }
        if !op.is_hermitian(1e-10) {
            return Err(Error::InvalidState(format!("not Hermitian (asymmetry {:.3e})", op.hermiticity_error())));
        }
        let tr = op.trace();
        if (tr.re - 1.0).abs() > 1e-10 || tr.im.abs() > 1e-10 {
            return Err(Error::InvalidState(format!("trace {tr} is not 1")));
        }
        let lmin = linalg::min_eigenvalue(&op)?;
        if lmin < -1e-9 {
            return Err(Error::InvalidState(format!("not positive (min eigenvalue {lmin:.3e})")));
        }
        Ok(Self { op: op.hermitian_part(), parties })
    }

    /// Divides by the trace, then validates.
    pub fn from_unnormalized(op: &ComplexMatrix, parties: PartyDims) -> Result<Self> {
        let tr = op.trace().re;
        if tr.is_nan() || tr <= 0.0 {
            return Err(Error::InvalidState(format!("trace {tr} is not positive")));
        }
        Self::new(op.scale(1.0 / tr), parties)
    }

    pub fn from_pure(psi: &PureState) -> Self {
        Self { op: psi.projector(), parties: psi.parties().clone() }
    }

    pub fn op(&self) -> &ComplexMatrix {
        &self.op
    }

    pub fn parties(&self) -> &PartyDims {
        &self.parties
    }

    /// `⟨ψ|ρ|ψ⟩`
    pub fn fidelity(&self, psi: &PureState) -> f64 {
        if psi.parties() != &self.parties {
            return 0.0;
        }
        self.op.sandwich(psi.amplitudes(), psi.amplitudes()).map(|z| z.re).unwrap_or(0.0)
    }

    /// Largest eigenvalue; 1 exactly for pure states.
    pub fn max_eigenvalue(&self) -> Result<f64> {
        let vals = linalg::eigvals_hermitian(&self.op, 1e-9)?;
        Ok(vals.last().copied().unwrap_or(0.0))
    }
}

/// Schmidt decomposition across a cut.
///
/// `coeffs_squared` is descending and has `min(dim cut, dim rest)` entries.
/// `left_vectors`/`right_vectors` hold one column per coefficient above
/// 1e-14; left vectors live on the cut parties (in ascending party order),
/// right vectors on the complement.
#[derive(Clone, Debug)]
pub struct SchmidtSpectrum {
    pub coeffs_squared: Vec<f64>,
    pub left_vectors: ComplexMatrix,
    pub right_vectors: ComplexMatrix,
    pub cut: Vec<usize>,
    pub parties: PartyDims,
}

impl SchmidtSpectrum {
    pub fn rank(&self, tol: f64) -> usize {
        self.coeffs_squared.iter().filter(|&&p| p > tol).count()
    }

    /// `Σ √p_i |i_cut⟩|i_rest⟩`, mapped back to the original party order.
    pub fn reconstruct(&self) -> Vec<C64> {
        let da = self.left_vectors.rows();
        let db = self.right_vectors.rows();
        let mut v = vec![ZERO; da * db];
        for k in 0..self.left_vectors.cols() {
            let s = self.coeffs_squared[k].sqrt();
            for a in 0..da {
                let la = self.left_vectors[(a, k)] * s;
                for b in 0..db {
                    v[a * db + b] += la * self.right_vectors[(b, k)];
                }
            }
        }
        let rest = self.parties.complement(&self.cut);
        let order: Vec<usize> = self.cut.iter().chain(&rest).copied().collect();
        let dims: Vec<usize> = order.iter().map(|&k| self.parties.dims()[k]).collect();
        // inverse permutation: position of original party k in `order`
        let mut inv = vec![0; order.len()];
        for (pos, &k) in order.iter().enumerate() {
            inv[k] = pos;
        }
        permute_vector(&v, &dims, &inv).expect("consistent dims")
    }
}

/// Matricizes `psi` as a `dim(cut) × dim(rest)` matrix.
pub(crate) fn matricize(psi: &PureState, cut: &[usize]) -> Result<(ComplexMatrix, Vec<usize>)> {
    let cut = psi.parties().validate_cut(cut)?;
    let rest = psi.parties().complement(&cut);
    let order: Vec<usize> = cut.iter().chain(&rest).copied().collect();
    let v = permute_vector(psi.amplitudes(), psi.dims(), &order)?;
    let da = psi.parties().dim_of(&cut);
    let db = psi.parties().dim_of(&rest);
    Ok((ComplexMatrix::new(da, db, v)?, cut))
}

/// Schmidt decomposition via the Gram matrix of the smaller side.
pub fn schmidt(psi: &PureState, cut: &[usize]) -> Result<SchmidtSpectrum> {
    let (m, cut) = matricize(psi, cut)?;
    let (da, db) = (m.rows(), m.cols());
    let left_side = da <= db;
    let gram = if left_side { &m * &m.adjoint() } else { &m.adjoint() * &m };
    let eig = eig_hermitian(&gram.hermitian_part(), 1e-10)?;
    let k = da.min(db);
    let mut coeffs = Vec::with_capacity(k);
    let mut lefts = Vec::new();
    let mut rights = Vec::new();
    for idx in (0..k).rev() {
        let p = eig.eigenvalues[idx].max(0.0);
        coeffs.push(p);
        if p <= VECTOR_CUTOFF {
            continue;
        }
        let s = p.sqrt();
        let u = eig.vector(idx);
        if left_side {
            let r: Vec<C64> = (0..db).map(|b| (0..da).map(|a| m[(a, b)] * u[a].conj()).sum::<C64>() / s).collect();
            lefts.push(u);
            rights.push(r);
        } else {
            let l: Vec<C64> = m.mul_vec(&u)?.into_iter().map(|z| z / s).collect();
            lefts.push(l);
            rights.push(u.iter().map(|z| z.conj()).collect());
        }
    }
    let left_vectors = if lefts.is_empty() { ComplexMatrix::zeros(da, 0) } else { ComplexMatrix::from_columns(&lefts) };
    let right_vectors = if rights.is_empty() { ComplexMatrix::zeros(db, 0) } else { ComplexMatrix::from_columns(&rights) };
    Ok(SchmidtSpectrum { coeffs_squared: coeffs, left_vectors, right_vectors, cut, parties: psi.parties().clone() })
}

/// Number of Schmidt coefficients (squared) above `tol`.
pub fn schmidt_rank(psi: &PureState, cut: &[usize], tol: f64) -> Result<usize> {
    Ok(schmidt(psi, cut)?.rank(tol))
}
