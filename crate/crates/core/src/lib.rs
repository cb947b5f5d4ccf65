//! Entropic EPR-steering witnesses.
//!
//! The crate evaluates entropic steering inequalities on finite-dimensional
//! bipartite states and on two-mode Gaussian states:
//!
//! | Module | Contents |
//! |--------|----------|
//! | [`qmat`] | density matrices, partial trace, Werner states, Haar/Ginibre sampling |
//! | [`measure`] | projective bases, MUB sets, POVMs, joint distributions, Ω constants |
//! | [`infotheory`] | Shannon / conditional / mutual / von Neumann entropy, entanglement of formation |
//! | [`witness`] | conditional, mutual-information, and sum/difference steering witnesses |
//! | [`cvgauss`] | Gaussian covariance-matrix witnesses |
//! | [`montecarlo`] | seeded random surveys, basis optimization, threshold bisection |
//!
//! All entropies are in bits. A witness reports a signed violation; positive
//! means the measured statistics admit no local-hidden-state model for the
//! steered party.
//!
//! ```
//! use entrosteer::{measure, qmat, witness};
//!
//! let rho = qmat::werner_state(0.9).unwrap();
//! let paulis = measure::pauli_bases();
//! let report = witness::mub_conditional(&rho, &paulis, &paulis, witness::Steering::AtoB).unwrap();
//! assert!(report.violation > 0.0);
//! ```

pub mod cvgauss;
pub mod error;
pub mod infotheory;
pub mod measure;
pub mod montecarlo;
pub mod qmat;
pub mod witness;

pub use error::{Error, Result};
pub use num_complex::Complex64;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
