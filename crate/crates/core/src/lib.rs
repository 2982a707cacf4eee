//! Variational ground-state laboratory for random fermionic models.
//!
//! The pipeline: enumerate a particle-number sector ([`fock`]), draw a random
//! Hamiltonian ([`models`]), solve it exactly ([`eigensolver`]), train trial
//! wavefunctions on the exact overlap loss ([`ansatz`], [`training`]), measure
//! complexity diagnostics of exact and trained states ([`measures`]) and
//! analyse how the required parameter count scales ([`scaling`]). The
//! [`runner`] module ties everything into reproducible experiment sweeps.
//!
//! Numerical types are generic over [`Real`]; the aliases below fix `f64`.

pub mod ansatz;
pub mod error;
pub mod eigensolver;
pub mod fock;
pub mod measures;
pub mod models;
pub mod rng;
pub mod runner;
pub mod scaling;
pub mod scalar;
pub mod sparse;
pub mod training;

pub use error::{Error, Result};
pub use scalar::Real;

pub type Hamiltonian = models::HamiltonianMatrix<f64>;
pub type GroundState = eigensolver::GroundStateResult<f64>;
pub type Hfds = ansatz::HfdsState<f64>;
pub type Slater = ansatz::SlaterState<f64>;
pub type Gutzwiller = ansatz::GutzwillerState<f64>;
pub type State = measures::StateVector<f64>;
pub type Rdm = measures::OneRdm<f64>;
