//! Cooper-pair box coupled to two superconducting resonators.
//!
//! The crate covers four pieces of physics that share one parameter set:
//!
//! * [`qubit_model`]: charge-basis and two-level Hamiltonians of the box, the
//!   coupled qubit + two-resonator Hamiltonian and a dense Hermitian Jacobi
//!   eigensolver to diagonalize it.
//! * [`spectroscopy`]: synthetic one-tone and two-tone spectra plus the fits
//!   used to pull dispersive shifts, couplings and decoherence rates back out.
//! * [`drive`] and [`otto`]: the gate-charge drive waveform and the driven,
//!   dissipative qubit operated as a quantum Otto refrigerator.
//! * [`filter`]: ABCD two-port algebra and the LCL gate-line low-pass filter.
//!
//! [`io`] ties everything together: run configuration with unit-tagged
//! quantities, experiment presets, CSV tables and SVG plots.
//!
//! All energies are stored as `E/h` in Hz. Angular frequencies only appear
//! inside rate and ODE formulas.

// Validation is written as `!(x > 0.0)` so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod drive;
pub mod filter;
pub mod io;
pub mod otto;
pub mod qubit_model;
pub mod spectroscopy;
pub mod units;

pub use drive::{DriveProtocol, Waveform};
pub use qubit_model::{GateCharge, QubitParams, ResonatorParams};
