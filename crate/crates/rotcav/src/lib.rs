//! Single-excitation Hamiltonians of atoms and diatomic molecules coupled to
//! a uniformly rotating optical cavity: polariton spectra, dark-state
//! censuses, light-induced conical intersections and their seams, and
//! rotating-frame wavepacket propagation.
//!
//! Conventions: hbar = 1 throughout, so angular velocities enter as
//! energies; the cavity polarization defines the Z axis.

pub mod error;
pub mod hermitian;
pub mod eigen;
pub mod arrowhead;
pub mod atom_cavity;
pub mod analytic;
pub mod molecule;
pub mod dynamics;
pub mod config;
pub mod commands;

pub use error::{Result, RotcavError};
pub use hermitian::{BasisState, Channel, EnergyUnit, HermitianMatrix};
pub use eigen::{eigensolve_dense, eigenvalues_dense, matrix_exponential_unitary, EigenDecomposition};
