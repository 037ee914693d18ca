//! Numerical toolkit for bound-entanglement-assisted conversion of pure
//! entangled states.
//!
//! * [`linalg`]: dense complex matrices and a Jacobi Hermitian eigensolver.
//! * [`states`]: pure states, density operators, Schmidt decompositions.
//! * [`ppt`]: partial transpose/trace, PPT tests, negativity, twirling.
//! * [`sppt`]: twirled stochastic-PPT maps, their Choi operators, the
//!   isotropic linear program and a feasibility search for general inputs.
//! * [`protocol`]: PPT resource states and the Bell-measurement conversion
//!   protocol (bipartite and multipartite).
//! * [`impossibility`]: structural certificates that a high-rank mixed state
//!   cannot be converted into a pure entangled state.

pub mod error;
pub mod impossibility;
pub mod linalg;
pub mod ppt;
pub mod protocol;
pub mod sppt;
pub mod states;
pub mod tensor;

pub use error::{Error, Result};
