//! Structure-preserving flows on symplectic matrix pairs.
//!
//! A symplectic pair is a matrix pair `(M, L)` with `M J M^H = L J L^H`. This
//! crate implements the algebra and dynamics built on that structure:
//!
//! - [`linalg`]: dense complex kernels (exponential, logarithm, ordered QZ)
//!   and the structural predicates everything else relies on;
//! - [`pairs`]: pair classes `S_{S1,S2}`, the Hermitian-block parameterization,
//!   eigen-splitting into zero/infinite/finite spectra, Hamiltonian flow
//!   generators and the eps-perturbation that regularizes singular pairs;
//! - [`sda`]: the structure-preserving doubling algorithms SDA-1 (DARE) and
//!   SDA-2 (NME) plus the Cayley bridge from CAREs;
//! - [`flow`]: the continuous flow through a pair class, Riccati solutions via
//!   Radon's lemma, blow-up detection, and the doubling identity that places
//!   the SDA iterates on the flow at `t = 2^(k-1)`;
//! - [`hjcf`]: Hamiltonian Jordan canonical forms and their closed-form
//!   exponentials;
//! - [`asymptotics`]: limit, rate and periodic-orbit predictors for the flow
//!   and the induced convergence classification of the SDA.

pub mod asymptotics;
pub mod error;
pub mod flow;
pub mod hjcf;
pub mod linalg;
#[doc(hidden)]
pub mod oracles;
pub mod pairs;
pub mod sda;

pub use error::{Error, Result};
pub use linalg::{CMatrix, CVector, Tolerances};
