//! Single-excitation quantum state transfer along spin-1/2 chains.
//!
//! The crate builds the `N×N` excitation block of the XY or XXZ Hamiltonian
//! for weak-end-bond, end-Larmor-frequency, or custom chains, diagonalizes it
//! with two independent solvers, and evaluates end-to-end transfer amplitudes
//! in closed spectral form. For the nearest-neighbour XY chain the spectrum is
//! also available from the exact secular equations ([`analytic`]). The
//! [`search`] module tunes chain parameters for the shortest high-probability
//! transfer and enumerates exact perfect-transfer points of four-node chains.

pub mod analytic;
pub mod block;
pub mod chain;
pub mod config;
pub mod dynamics;
pub mod error;
pub mod experiments;
pub mod matrix;
pub mod output;
pub mod search;
pub mod spectral;

pub use block::{equivalent_xy_frequencies, ExcitationBlock, Interaction, Model};
pub use chain::{coupling_from_distance, ChainSpec};
pub use error::{Error, Result};
pub use matrix::Matrix;
pub use spectral::{eig_dense, eig_tridiagonal, Spectrum, SpectrumSource};
