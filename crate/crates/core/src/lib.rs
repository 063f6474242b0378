//! Exact-diagonalization toolkit for transverse-field Ising networks of
//! superconducting flux qubits.
//!
//! The crate models an `n`-site spin network with Hamiltonian
//!
//! ```text
//! H = sum_i -(eps_i sz_i + delta_i sx_i) + sum_{(i,j)} J_ij sz_i sz_j
//! ```
//!
//! driven adiabatically from a transverse-field-dominated (paramagnetic)
//! regime into a frustrated Ising regime, and computes three transition
//! diagnostics along the sweep:
//!
//! - fidelity susceptibility of the instantaneous ground state
//!   ([`metrics::fidelity_susceptibility`]),
//! - the symmetric W-state entanglement witness on three-qubit blocks
//!   ([`observables::block_witness`]),
//! - a Kullback-Leibler sign measure on the distribution of the total
//!   magnetic moment ([`metrics::macro_measure`]).
//!
//! All core math is generic over the floating-point scalar via
//! [`num::Float`]; the `f64` aliases at the crate root are the intended
//! entry point for most users.
//!
//! Conventions (fixed once, used everywhere):
//!
//! - Computational basis states are indexed by the `n`-bit integer whose
//!   bit `i` (little-endian, site 0 = least significant) is 0 for spin-up
//!   and 1 for spin-down.
//! - `eps`, `delta`, `J` are frequencies in GHz. Time evolution converts
//!   GHz to angular frequency as `energy/hbar = 2*pi*f` in rad/ns.
//! - Eigenvectors are gauge fixed: the first amplitude with modulus above
//!   `1e-8` is real and positive.

pub mod dynamics;
pub mod eigen;
pub mod error;
pub mod metrics;
pub mod network;
pub mod num;
pub mod observables;
pub mod schedule;
pub mod sparse;
pub mod state;

pub use error::Error;
pub use network::{ControlParams, SpinNetwork, Topology};

/// Default scalar type.
pub type Real = f64;
/// Complex amplitude over the default scalar.
pub type Complex64 = num_complex::Complex<f64>;

/// Concrete aliases over the default scalar.
pub type SparseOperator = sparse::SparseOperator<f64>;
pub type StateVector = state::StateVector<f64>;
pub type EigenResult = eigen::EigenResult<f64>;
pub type ControlSchedule = schedule::ControlSchedule<f64>;
pub type Trajectory = dynamics::Trajectory<f64>;
pub type MomentHistogram = observables::MomentHistogram<f64>;
pub type WitnessValue = observables::WitnessValue<f64>;
pub type ChiTrace = metrics::ChiTrace<f64>;
pub type MacroTrace = metrics::MacroTrace<f64>;
pub type FitResult = metrics::FitResult<f64>;

/// Result alias used throughout the crate.
pub type Result<T, E = Error> = std::result::Result<T, E>;
