//! Variational quantum eigensolver toolkit.
//!
//! The crate covers the full pipeline for small molecular VQE studies:
//! phase-tracked Pauli string algebra with a GF(2) symplectic encoding
//! ([`pauli`]), ingestion of second-quantized molecular integrals and the
//! Jordan-Wigner mapping ([`fermion`]), Z2-symmetry qubit tapering
//! ([`tapering`]), statevector simulation of a hardware-efficient ansatz
//! under interchangeable entanglers ([`simulator`]), SPSA energy
//! minimization ([`spsa`]), a dense exact-diagonalization oracle
//! ([`solver`]) and the experiment driver tying them together
//! ([`experiment`]).
//!
//! Conventions fixed across the crate:
//! - qubit 1 is the leftmost tensor factor; basis indices are big-endian
//!   (qubit 1 is the most significant bit);
//! - qubit and fermionic mode indices are 1-based in public APIs;
//! - all energies are in Hartree.
//!
//! ```
//! use num_complex::Complex64;
//! use vqe_core::pauli::PauliSum;
//! use vqe_core::tapering;
//! use vqe_core::solver;
//!
//! // a 2-qubit Hamiltonian with one Z2 symmetry (ZZ)
//! let mut h = PauliSum::new(2);
//! h.add_str("ZZ", Complex64::new(0.5, 0.0)).unwrap();
//! h.add_str("XX", Complex64::new(-0.25, 0.0)).unwrap();
//!
//! let group = tapering::find_symmetries(&h).unwrap().unwrap();
//! let triple = tapering::build_taper_triple(&group).unwrap();
//! let (sector, tapered) = tapering::select_ground_sector(&h, &triple).unwrap();
//!
//! let full = solver::ground_energy(&h).unwrap().ground_energy;
//! let reduced = solver::ground_energy(&tapered.hamiltonian).unwrap().ground_energy;
//! assert_eq!(tapered.hamiltonian.qubits(), h.qubits() - sector.len());
//! assert!((full - reduced).abs() < 1e-12);
//! ```

pub mod experiment;
pub mod fermion;
pub mod pauli;
pub mod simulator;
pub mod solver;
pub mod spsa;
pub mod tapering;

pub use pauli::{Axis, PauliError, PauliSum, PauliTerm, Phase, SymplecticVector};
pub use simulator::{EntanglerKind, ParamVector, StateVector};
pub use solver::SpectrumResult;
pub use spsa::{SpsaConfig, SpsaTrace};
pub use tapering::{SymmetryGroup, TaperTriple, TaperedHamiltonian};
