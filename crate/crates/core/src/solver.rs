//! Dense ground-state oracle: exact spectrum of a [`PauliSum`] via a
//! Hermitian eigensolve, used for verification and for reporting
//! differences from the exact ground energy.

use nalgebra::DVector;
use num_complex::Complex64;
use thiserror::Error;

use crate::pauli::{PauliError, PauliSum};

/// Largest qubit count accepted by the dense eigensolve.
pub const SOLVER_QUBIT_LIMIT: usize = 12;

const HERMITIAN_TOLERANCE: f64 = 1e-10;
const RESIDUAL_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("dense eigensolve limited to {limit} qubits, got {m}")]
    TooManyQubits { m: usize, limit: usize },
    #[error("input is not Hermitian (max |Im coefficient| = {0:.3e})")]
    NotHermitian(f64),
    #[error("ground-pair residual {0:.3e} exceeds {RESIDUAL_TOLERANCE:.0e}")]
    Residual(f64),
    #[error(transparent)]
    Pauli(#[from] PauliError),
}

/// Exact spectrum of a Hamiltonian, eigenvalues sorted ascending.
#[derive(Debug, Clone)]
pub struct SpectrumResult {
    pub eigenvalues: Vec<f64>,
    pub ground_energy: f64,
    pub dimension: usize,
}

/// Diagonalize the dense form of `h` and return the full sorted
/// spectrum. The ground eigenpair is verified to satisfy
/// ||Hv - lambda v|| < 1e-8.
pub fn ground_energy(h: &PauliSum) -> Result<SpectrumResult, SolverError> {
    let m = h.qubits();
    if m > SOLVER_QUBIT_LIMIT {
        return Err(SolverError::TooManyQubits {
            m,
            limit: SOLVER_QUBIT_LIMIT,
        });
    }
    if !h.is_hermitian(HERMITIAN_TOLERANCE) {
        return Err(SolverError::NotHermitian(h.max_imag()));
    }
    let dense = h.to_dense()?;
    let eig = dense.clone().symmetric_eigen();

    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let eigenvalues: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let ground = eigenvalues[0];

    let v: DVector<Complex64> = eig.eigenvectors.column(order[0]).into();
    let residual = (&dense * &v - &v * Complex64::new(ground, 0.0)).norm();
    if residual >= RESIDUAL_TOLERANCE {
        return Err(SolverError::Residual(residual));
    }

    Ok(SpectrumResult {
        dimension: dense.nrows(),
        ground_energy: ground,
        eigenvalues,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use num_complex::Complex64;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn single_z_spectrum() {
        let mut h = PauliSum::new(1);
        h.add_str("Z", c(1.0)).unwrap();
        let res = ground_energy(&h).unwrap();
        assert_eq!(res.dimension, 2);
        assert_abs_diff_eq!(res.eigenvalues[0], -1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(res.eigenvalues[1], 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(res.ground_energy, -1.0, epsilon = 1e-12);
    }

    #[test]
    fn identity_has_constant_spectrum() {
        let mut h = PauliSum::new(2);
        h.add_str("II", c(3.25)).unwrap();
        let res = ground_energy(&h).unwrap();
        for e in &res.eigenvalues {
            assert_abs_diff_eq!(*e, 3.25, epsilon = 1e-12);
        }
    }

    #[test]
    fn constant_shift_moves_ground_energy() {
        let mut h = PauliSum::new(2);
        h.add_str("ZZ", c(1.0)).unwrap();
        h.add_str("XI", c(0.3)).unwrap();
        let base = ground_energy(&h).unwrap().ground_energy;
        let mut shifted = h.clone();
        shifted.add_str("II", c(0.7)).unwrap();
        let moved = ground_energy(&shifted).unwrap().ground_energy;
        assert_abs_diff_eq!(moved, base + 0.7, epsilon = 1e-10);
    }

    #[test]
    fn spectrum_invariant_under_qubit_relabeling() {
        let mut h = PauliSum::new(3);
        h.add_str("XYI", c(0.5)).unwrap();
        h.add_str("ZIZ", c(-0.25)).unwrap();
        h.add_str("IIX", c(0.125)).unwrap();
        // swap qubits 1 and 3
        let mut relabeled = PauliSum::new(3);
        relabeled.add_str("IYX", c(0.5)).unwrap();
        relabeled.add_str("ZIZ", c(-0.25)).unwrap();
        relabeled.add_str("XII", c(0.125)).unwrap();
        let a = ground_energy(&h).unwrap().eigenvalues;
        let b = ground_energy(&relabeled).unwrap().eigenvalues;
        for (x, y) in a.iter().zip(&b) {
            assert_abs_diff_eq!(*x, *y, epsilon = 1e-10);
        }
    }

    #[test]
    fn rejects_non_hermitian() {
        let mut h = PauliSum::new(1);
        h.add_str("X", Complex64::new(0.0, 1.0)).unwrap();
        assert!(matches!(ground_energy(&h), Err(SolverError::NotHermitian(_))));
    }

    #[test]
    fn rejects_large_m() {
        let h = PauliSum::new(13);
        assert!(matches!(
            ground_energy(&h),
            Err(SolverError::TooManyQubits { m: 13, limit: 12 })
        ));
    }

    #[test]
    fn scalar_hamiltonian_on_zero_qubits() {
        let mut h = PauliSum::new(0);
        h.add_str("", c(-1.5)).unwrap();
        let res = ground_energy(&h).unwrap();
        assert_eq!(res.dimension, 1);
        assert_abs_diff_eq!(res.ground_energy, -1.5, epsilon = 1e-14);
    }
}
