//! Second-quantized molecular data and the Jordan-Wigner mapping to
//! qubit operators.
//!
//! Integrals are ingested from JSON files; evaluating them from atomic
//! orbitals is out of scope here (fixtures are produced offline by
//! `tools/generate_integrals.py`). Spin orbitals are interleaved: odd
//! 1-based mode indices are spin-up, even are spin-down.

use std::fs;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::pauli::{PauliError, PauliSum};

const SYMMETRY_TOLERANCE: f64 = 1e-10;
const IMAG_RESIDUE_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Error)]
pub enum FermionError {
    #[error("failed to read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("failed to parse {path}: {source}")]
    Json {
        path: String,
        #[source]
        source: serde_json::Error,
    },
    #[error("n_spin_orbitals must be >= 1")]
    EmptyBasis,
    #[error("one-electron tensor has shape {0}x{1}, expected {2}x{2}")]
    OneBodyShape(usize, usize, usize),
    #[error("two-electron tensor is not {0}^4")]
    TwoBodyShape(usize),
    #[error("one-electron tensor not symmetric: |h[{p}][{q}] - h[{q}][{p}]| = {delta:.3e}")]
    NotSymmetric { p: usize, q: usize, delta: f64 },
    #[error("mode index {j} out of range 1..={m}")]
    ModeOutOfRange { j: usize, m: usize },
    #[error("qubit count {0} is odd; spin pairing needs an even count")]
    OddModeCount(usize),
    #[error(
        "assembled Hamiltonian is not Hermitian: max |Im coefficient| = {0:.3e} \
         (threshold {IMAG_RESIDUE_TOLERANCE:.0e})"
    )]
    NotHermitian(f64),
    #[error(transparent)]
    Pauli(#[from] PauliError),
}

/// Second-quantized molecular integrals in Hartree: the constant
/// nuclear repulsion, the one-electron tensor h_pq and the two-electron
/// tensor h_pqrs entering as
/// `V_nn + sum h_pq a+_p a_q + 1/2 sum h_pqrs a+_p a+_q a_r a_s`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MolecularIntegrals {
    pub n_spin_orbitals: usize,
    #[serde(rename = "V_nn")]
    pub v_nn: f64,
    pub h_pq: Vec<Vec<f64>>,
    pub h_pqrs: Vec<Vec<Vec<Vec<f64>>>>,
    #[serde(default)]
    pub metadata: serde_json::Value,
    #[serde(default)]
    pub reference_ground_energy: Option<f64>,
}

impl MolecularIntegrals {
    /// Check shapes and the h_pq = h_qp symmetry.
    pub fn validate(&self) -> Result<(), FermionError> {
        let m = self.n_spin_orbitals;
        if m == 0 {
            return Err(FermionError::EmptyBasis);
        }
        if self.h_pq.len() != m || self.h_pq.iter().any(|row| row.len() != m) {
            let cols = self.h_pq.first().map_or(0, Vec::len);
            return Err(FermionError::OneBodyShape(self.h_pq.len(), cols, m));
        }
        let two_ok = self.h_pqrs.len() == m
            && self.h_pqrs.iter().all(|a| {
                a.len() == m
                    && a.iter()
                        .all(|b| b.len() == m && b.iter().all(|c| c.len() == m))
            });
        if !two_ok {
            return Err(FermionError::TwoBodyShape(m));
        }
        for p in 0..m {
            for q in 0..p {
                let delta = (self.h_pq[p][q] - self.h_pq[q][p]).abs();
                if delta > SYMMETRY_TOLERANCE {
                    return Err(FermionError::NotSymmetric { p, q, delta });
                }
            }
        }
        Ok(())
    }
}

/// Load and validate a molecular-integrals JSON file.
pub fn load_integrals<P: AsRef<Path>>(path: P) -> Result<MolecularIntegrals, FermionError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| FermionError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let mi: MolecularIntegrals =
        serde_json::from_str(&text).map_err(|source| FermionError::Json {
            path: path.display().to_string(),
            source,
        })?;
    mi.validate()?;
    Ok(mi)
}

/// An ordered product of ladder operators with a real coefficient;
/// mode indices are 1-based and operators apply rightmost first.
#[derive(Debug, Clone, PartialEq)]
pub struct LadderTerm {
    pub factors: Vec<(usize, bool)>,
    pub coefficient: f64,
}

impl LadderTerm {
    pub fn new(factors: Vec<(usize, bool)>, coefficient: f64) -> Self {
        LadderTerm {
            factors,
            coefficient,
        }
    }

    /// Expand into a qubit operator via [`jw_ladder`].
    pub fn to_pauli_sum(&self, m: usize) -> Result<PauliSum, FermionError> {
        let mut acc = PauliSum::new(m);
        acc.add_str(&"I".repeat(m), Complex64::new(self.coefficient, 0.0))?;
        for &(mode, dagger) in &self.factors {
            let op = jw_ladder(mode, dagger, m)?;
            acc = acc.multiply(&op)?;
        }
        Ok(acc)
    }
}

/// Jordan-Wigner image of a single ladder operator:
/// `a_j = I^(j-1) (x) sigma+ (x) Z^(m-j)` with sigma+- = (X +- iY)/2;
/// the creation operator uses sigma-. Returns the 2-term [`PauliSum`].
pub fn jw_ladder(j: usize, dagger: bool, m: usize) -> Result<PauliSum, FermionError> {
    if j < 1 || j > m {
        return Err(FermionError::ModeOutOfRange { j, m });
    }
    let mut axes_x: Vec<char> = Vec::with_capacity(m);
    let mut axes_y: Vec<char> = Vec::with_capacity(m);
    for pos in 1..=m {
        let (cx, cy) = match pos.cmp(&j) {
            std::cmp::Ordering::Less => ('I', 'I'),
            std::cmp::Ordering::Equal => ('X', 'Y'),
            std::cmp::Ordering::Greater => ('Z', 'Z'),
        };
        axes_x.push(cx);
        axes_y.push(cy);
    }
    let y_coeff = if dagger {
        Complex64::new(0.0, -0.5)
    } else {
        Complex64::new(0.0, 0.5)
    };
    let mut sum = PauliSum::new(m);
    sum.add_str(&axes_x.into_iter().collect::<String>(), Complex64::new(0.5, 0.0))?;
    sum.add_str(&axes_y.into_iter().collect::<String>(), y_coeff)?;
    Ok(sum)
}

/// Assemble the qubit Hamiltonian
/// `V_nn I + sum h_pq a+_p a_q + 1/2 sum h_pqrs a+_p a+_q a_r a_s`
/// with every ladder product expanded through the Jordan-Wigner map.
/// Imaginary residues below 1e-10 are pruned; anything larger aborts.
pub fn build_qubit_hamiltonian(mi: &MolecularIntegrals) -> Result<PauliSum, FermionError> {
    mi.validate()?;
    let m = mi.n_spin_orbitals;
    let mut h = PauliSum::new(m);
    h.add_str(&"I".repeat(m), Complex64::new(mi.v_nn, 0.0))?;

    for p in 0..m {
        for q in 0..m {
            let coeff = mi.h_pq[p][q];
            if coeff.abs() < 1e-14 {
                continue;
            }
            let term = LadderTerm::new(vec![(p + 1, true), (q + 1, false)], coeff);
            h.add_sum(&term.to_pauli_sum(m)?)?;
        }
    }
    for p in 0..m {
        for q in 0..m {
            for r in 0..m {
                for s in 0..m {
                    let coeff = mi.h_pqrs[p][q][r][s];
                    if coeff.abs() < 1e-14 {
                        continue;
                    }
                    let term = LadderTerm::new(
                        vec![(p + 1, true), (q + 1, true), (r + 1, false), (s + 1, false)],
                        0.5 * coeff,
                    );
                    h.add_sum(&term.to_pauli_sum(m)?)?;
                }
            }
        }
    }

    if h.max_imag() >= IMAG_RESIDUE_TOLERANCE {
        return Err(FermionError::NotHermitian(h.max_imag()));
    }
    h.discard_small_imag(IMAG_RESIDUE_TOLERANCE);
    Ok(h)
}

/// The spin-up and spin-down number operators (N_up, N_down) as sums of
/// I/Z strings, with the interleaved spin convention (odd 1-based modes
/// are spin-up).
pub fn number_operators(m: usize) -> Result<(PauliSum, PauliSum), FermionError> {
    if m % 2 != 0 {
        return Err(FermionError::OddModeCount(m));
    }
    let build = |offset: usize| -> Result<PauliSum, FermionError> {
        let mut sum = PauliSum::new(m);
        for j in (offset..m).step_by(2) {
            // a+_j a_j = (I - Z_j) / 2
            sum.add_str(&"I".repeat(m), Complex64::new(0.5, 0.0))?;
            let mut axes = vec!['I'; m];
            axes[j] = 'Z';
            sum.add_str(
                &axes.into_iter().collect::<String>(),
                Complex64::new(-0.5, 0.0),
            )?;
        }
        Ok(sum)
    };
    Ok((build(0)?, build(1)?))
}
