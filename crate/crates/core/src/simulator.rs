//! Statevector simulation of the hardware-efficient ansatz: per-qubit
//! rotations, the five entanglers, trial-state preparation and exact
//! expectation values.
//!
//! Amplitudes are indexed big-endian: qubit 1 is the most significant
//! bit. All rotations use the uniform unitary convention
//! R_axis(phi) = cos(phi/2) I - i sin(phi/2) axis.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::pauli::{StringAction, Axis, PauliSum};

/// Largest qubit count a statevector may hold.
pub const STATE_QUBIT_LIMIT: usize = 24;

const NORM_TOLERANCE: f64 = 1e-10;
const EXPECTATION_IMAG_TOLERANCE: f64 = 1e-9;
const HERMITIAN_TOLERANCE: f64 = 1e-10;

const TAU: f64 = 2.0 * std::f64::consts::PI;

#[derive(Debug, Error)]
pub enum SimulatorError {
    #[error("qubit count {m} outside 1..={limit}")]
    QubitCountOutOfRange { m: usize, limit: usize },
    #[error("qubit index {q} out of range 1..={m}")]
    QubitOutOfRange { q: usize, m: usize },
    #[error("amplitude vector has length {got}, expected {expected}")]
    AmplitudeCount { got: usize, expected: usize },
    #[error("rotations are around X, Y or Z; got {0:?}")]
    InvalidRotationAxis(char),
    #[error("entanglers need at least 2 qubits, got {0}")]
    TooFewQubits(usize),
    #[error("parameter vector has length {got}, expected (3*{d}+2)*{m} = {expected}")]
    ParamLength {
        got: usize,
        d: usize,
        m: usize,
        expected: usize,
    },
    #[error("state has {state} qubits but operator has {operator}")]
    QubitMismatch { state: usize, operator: usize },
    #[error("expectation value needs a Hermitian operator (max |Im coefficient| = {0:.3e})")]
    NotHermitian(f64),
    #[error("expectation imaginary residue {0:.3e} exceeds {EXPECTATION_IMAG_TOLERANCE:.0e}")]
    ImagResidue(f64),
}

/// The fixed multi-qubit unitary applied between rotation layers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EntanglerKind {
    /// CNOT(q, q+1) for q = 1..m-1 in ascending order (m-1 gates).
    CnotChain,
    /// CNOT(i, j) for all i < j in ascending lexicographic order
    /// (m(m-1)/2 gates).
    CnotPairs,
    /// Qubit 1 controls an X on every other qubit.
    CmNot,
    /// Basis-state bit reversal with a uniform phase i
    /// (perfect state transfer down a qubit chain).
    #[serde(rename = "pst")]
    PstM,
    /// Swap of the last two qubits with phase i, controlled on the
    /// first m-2 qubits all being |1>.
    Iswap2,
}

impl EntanglerKind {
    pub const ALL: [EntanglerKind; 5] = [
        EntanglerKind::CnotChain,
        EntanglerKind::CnotPairs,
        EntanglerKind::CmNot,
        EntanglerKind::PstM,
        EntanglerKind::Iswap2,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            EntanglerKind::CnotChain => "cnot_chain",
            EntanglerKind::CnotPairs => "cnot_pairs",
            EntanglerKind::CmNot => "cm_not",
            EntanglerKind::PstM => "pst",
            EntanglerKind::Iswap2 => "iswap2",
        }
    }
}

impl std::str::FromStr for EntanglerKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "cnot_chain" => Ok(EntanglerKind::CnotChain),
            "cnot_pairs" => Ok(EntanglerKind::CnotPairs),
            "cm_not" => Ok(EntanglerKind::CmNot),
            "pst" => Ok(EntanglerKind::PstM),
            "iswap2" => Ok(EntanglerKind::Iswap2),
            other => Err(format!(
                "unknown entangler {other:?}; expected one of \
                 cnot_chain, cnot_pairs, cm_not, pst, iswap2"
            )),
        }
    }
}

/// Rotation angles for a depth-d preparation on m qubits, length
/// (3d+2)m, stored modulo 2 pi.
///
/// Layout is layer-major, qubit-minor, angles in application order:
/// layer 0 holds (theta_X, theta_Z) per qubit (the leading Z rotation
/// on the vacuum is omitted), layers 1..d hold (theta_Z, theta_X,
/// theta_Z) per qubit.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamVector {
    theta: Vec<f64>,
    m: usize,
    depth: usize,
}

/// Number of rotation angles for a depth-d, m-qubit preparation.
pub fn param_count(m: usize, d: usize) -> usize {
    (3 * d + 2) * m
}

impl ParamVector {
    pub fn new(theta: &[f64], m: usize, depth: usize) -> Result<Self, SimulatorError> {
        let expected = param_count(m, depth);
        if theta.len() != expected {
            return Err(SimulatorError::ParamLength {
                got: theta.len(),
                d: depth,
                m,
                expected,
            });
        }
        Ok(ParamVector {
            theta: theta.iter().map(|t| t.rem_euclid(TAU)).collect(),
            m,
            depth,
        })
    }

    pub fn angles(&self) -> &[f64] {
        &self.theta
    }

    pub fn qubits(&self) -> usize {
        self.m
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    /// Angles of qubit `q` (1-based) in layer `layer`, in application
    /// order: 2 angles for layer 0, otherwise 3.
    fn layer_angles(&self, layer: usize, q: usize) -> &[f64] {
        if layer == 0 {
            let base = (q - 1) * 2;
            &self.theta[base..base + 2]
        } else {
            let base = 2 * self.m + (layer - 1) * 3 * self.m + (q - 1) * 3;
            &self.theta[base..base + 3]
        }
    }
}

/// 2^m complex amplitudes of an m-qubit register.
#[derive(Debug, Clone)]
pub struct StateVector {
    amps: Vec<Complex64>,
    m: usize,
}

impl StateVector {
    /// The vacuum state |0...0>.
    pub fn vacuum(m: usize) -> Result<Self, SimulatorError> {
        if m < 1 || m > STATE_QUBIT_LIMIT {
            return Err(SimulatorError::QubitCountOutOfRange {
                m,
                limit: STATE_QUBIT_LIMIT,
            });
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << m];
        amps[0] = Complex64::new(1.0, 0.0);
        Ok(StateVector { amps, m })
    }

    /// Construct from explicit amplitudes (must have length 2^m).
    pub fn from_amplitudes(amps: Vec<Complex64>, m: usize) -> Result<Self, SimulatorError> {
        if m < 1 || m > STATE_QUBIT_LIMIT {
            return Err(SimulatorError::QubitCountOutOfRange {
                m,
                limit: STATE_QUBIT_LIMIT,
            });
        }
        if amps.len() != 1 << m {
            return Err(SimulatorError::AmplitudeCount {
                got: amps.len(),
                expected: 1 << m,
            });
        }
        Ok(StateVector { amps, m })
    }

    pub fn qubits(&self) -> usize {
        self.m
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm() - 1.0).abs() < NORM_TOLERANCE
    }

    fn check_qubit(&self, q: usize) -> Result<(), SimulatorError> {
        if q < 1 || q > self.m {
            return Err(SimulatorError::QubitOutOfRange { q, m: self.m });
        }
        Ok(())
    }

    /// Apply cos(phi/2) I - i sin(phi/2) sigma_axis to qubit `q`
    /// in place with stride arithmetic.
    pub fn apply_rotation(
        &mut self,
        q: usize,
        axis: Axis,
        phi: f64,
    ) -> Result<(), SimulatorError> {
        self.check_qubit(q)?;
        let c = (phi / 2.0).cos();
        let s = (phi / 2.0).sin();
        let bit = self.m - q;
        let mask = 1usize << bit;
        match axis {
            Axis::X => {
                for i in 0..self.amps.len() {
                    if i & mask == 0 {
                        let j = i | mask;
                        let (a0, a1) = (self.amps[i], self.amps[j]);
                        self.amps[i] = a0 * c - Complex64::new(0.0, s) * a1;
                        self.amps[j] = a1 * c - Complex64::new(0.0, s) * a0;
                    }
                }
            }
            Axis::Y => {
                for i in 0..self.amps.len() {
                    if i & mask == 0 {
                        let j = i | mask;
                        let (a0, a1) = (self.amps[i], self.amps[j]);
                        self.amps[i] = a0 * c - a1 * s;
                        self.amps[j] = a1 * c + a0 * s;
                    }
                }
            }
            Axis::Z => {
                let phase0 = Complex64::new(c, -s);
                let phase1 = Complex64::new(c, s);
                for (i, amp) in self.amps.iter_mut().enumerate() {
                    *amp *= if i & mask == 0 { phase0 } else { phase1 };
                }
            }
            Axis::I => return Err(SimulatorError::InvalidRotationAxis('I')),
        }
        Ok(())
    }

    fn apply_cnot(&mut self, control: usize, target: usize) {
        let cmask = 1usize << (self.m - control);
        let tmask = 1usize << (self.m - target);
        for i in 0..self.amps.len() {
            if i & cmask != 0 && i & tmask == 0 {
                self.amps.swap(i, i | tmask);
            }
        }
    }

    /// Apply one of the five entanglers across the whole register.
    pub fn apply_entangler(&mut self, kind: EntanglerKind) -> Result<(), SimulatorError> {
        let m = self.m;
        if m < 2 {
            return Err(SimulatorError::TooFewQubits(m));
        }
        match kind {
            EntanglerKind::CnotChain => {
                for q in 1..m {
                    self.apply_cnot(q, q + 1);
                }
            }
            EntanglerKind::CnotPairs => {
                for i in 1..m {
                    for j in (i + 1)..=m {
                        self.apply_cnot(i, j);
                    }
                }
            }
            EntanglerKind::CmNot => {
                // qubit 1 at |1> flips qubits 2..m
                let top = 1usize << (m - 1);
                let low_mask = top - 1;
                for i in top..self.amps.len() {
                    let j = i ^ low_mask;
                    if i < j {
                        self.amps.swap(i, j);
                    }
                }
            }
            EntanglerKind::PstM => {
                // |b_1..b_m> -> i |b_m..b_1>
                for i in 0..self.amps.len() {
                    let rev = reverse_bits(i, m);
                    if i < rev {
                        self.amps.swap(i, rev);
                    }
                }
                let phase = Complex64::new(0.0, 1.0);
                for amp in &mut self.amps {
                    *amp *= phase;
                }
            }
            EntanglerKind::Iswap2 => {
                // controls: qubits 1..m-2 all |1>; on the controlled
                // block, swap the last two bits and multiply by i
                let block = (self.amps.len() - 1) & !0b11;
                let phase = Complex64::new(0.0, 1.0);
                self.amps.swap(block | 0b01, block | 0b10);
                for b in 0..4 {
                    self.amps[block | b] *= phase;
                }
            }
        }
        Ok(())
    }
}

fn reverse_bits(index: usize, m: usize) -> usize {
    let mut out = 0usize;
    for b in 0..m {
        if index >> b & 1 == 1 {
            out |= 1 << (m - 1 - b);
        }
    }
    out
}

/// Prepare the trial state: rotation layer 0 on the vacuum, then d
/// repetitions of (entangler, rotation layer). Per-qubit rotations
/// within a layer act on disjoint qubits and are applied in ascending
/// qubit order.
pub fn prepare_trial_state(
    theta: &ParamVector,
    kind: EntanglerKind,
    m: usize,
) -> Result<StateVector, SimulatorError> {
    if theta.qubits() != m {
        return Err(SimulatorError::QubitMismatch {
            state: m,
            operator: theta.qubits(),
        });
    }
    let mut state = StateVector::vacuum(m)?;
    for q in 1..=m {
        let [tx, tz] = theta.layer_angles(0, q) else {
            unreachable!("layer 0 has two angles");
        };
        state.apply_rotation(q, Axis::X, *tx)?;
        state.apply_rotation(q, Axis::Z, *tz)?;
    }
    for layer in 1..=theta.depth() {
        state.apply_entangler(kind)?;
        for q in 1..=m {
            let [tz1, tx, tz2] = theta.layer_angles(layer, q) else {
                unreachable!("layers past 0 have three angles");
            };
            state.apply_rotation(q, Axis::Z, *tz1)?;
            state.apply_rotation(q, Axis::X, *tx)?;
            state.apply_rotation(q, Axis::Z, *tz2)?;
        }
    }
    Ok(state)
}

/// Exact expectation value sum_k h_k <psi|sigma^k|psi>, computed term
/// by term with in-place Pauli action (no dense matrix). The result
/// must be real; imaginary residue below 1e-9 is discarded.
pub fn expectation(state: &StateVector, h: &PauliSum) -> Result<f64, SimulatorError> {
    if state.qubits() != h.qubits() {
        return Err(SimulatorError::QubitMismatch {
            state: state.qubits(),
            operator: h.qubits(),
        });
    }
    if !h.is_hermitian(HERMITIAN_TOLERANCE) {
        return Err(SimulatorError::NotHermitian(h.max_imag()));
    }
    let amps = state.amplitudes();
    let mut total = Complex64::new(0.0, 0.0);
    for (axes, coeff) in h.iter() {
        let action = StringAction::new(axes);
        let mut term = Complex64::new(0.0, 0.0);
        for (col, amp) in amps.iter().enumerate() {
            let (row, factor) = action.act(col);
            term += amps[row].conj() * factor * amp;
        }
        total += coeff * term;
    }
    if total.im.abs() >= EXPECTATION_IMAG_TOLERANCE {
        return Err(SimulatorError::ImagResidue(total.im.abs()));
    }
    Ok(total.re)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use nalgebra::DMatrix;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha12Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// Dense matrix of an entangler, built column by column.
    fn entangler_matrix(kind: EntanglerKind, m: usize) -> DMatrix<Complex64> {
        let dim = 1usize << m;
        let mut mat = DMatrix::zeros(dim, dim);
        for col in 0..dim {
            let mut amps = vec![c(0.0, 0.0); dim];
            amps[col] = c(1.0, 0.0);
            let mut s = StateVector::from_amplitudes(amps, m).unwrap();
            s.apply_entangler(kind).unwrap();
            for (row, &a) in s.amplitudes().iter().enumerate() {
                mat[(row, col)] = a;
            }
        }
        mat
    }

    #[test]
    fn vacuum_states() {
        let s = StateVector::vacuum(1).unwrap();
        assert_eq!(s.amplitudes(), &[c(1.0, 0.0), c(0.0, 0.0)]);
        let s = StateVector::vacuum(2).unwrap();
        assert_eq!(s.amplitudes()[0], c(1.0, 0.0));
        assert!(s.amplitudes()[1..].iter().all(|a| a.norm() == 0.0));
        assert!(s.is_normalized());
        assert!(StateVector::vacuum(0).is_err());
        assert!(StateVector::vacuum(25).is_err());
    }

    #[test]
    fn x_pi_flips_vacuum_with_minus_i() {
        let mut s = StateVector::vacuum(1).unwrap();
        s.apply_rotation(1, Axis::X, std::f64::consts::PI).unwrap();
        assert!(s.amplitudes()[0].norm() < 1e-14);
        assert_abs_diff_eq!(s.amplitudes()[1].re, 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(s.amplitudes()[1].im, -1.0, epsilon = 1e-14);
    }

    #[test]
    fn zero_angle_is_identity() {
        for axis in [Axis::X, Axis::Y, Axis::Z] {
            let mut s = StateVector::vacuum(2).unwrap();
            s.apply_rotation(2, axis, 0.0).unwrap();
            assert_eq!(s.amplitudes()[0], c(1.0, 0.0));
        }
    }

    #[test]
    fn z_rotation_phases_match_matrix_oracle() {
        let inv = std::f64::consts::FRAC_1_SQRT_2;
        let mut s =
            StateVector::from_amplitudes(vec![c(inv, 0.0), c(inv, 0.0)], 1).unwrap();
        s.apply_rotation(1, Axis::Z, std::f64::consts::FRAC_PI_2)
            .unwrap();
        let expected0 = c(inv, 0.0) * Complex64::from_polar(1.0, -std::f64::consts::FRAC_PI_4);
        let expected1 = c(inv, 0.0) * Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_4);
        assert!((s.amplitudes()[0] - expected0).norm() < 1e-14);
        assert!((s.amplitudes()[1] - expected1).norm() < 1e-14);
    }

    #[test]
    fn rotation_rejects_identity_axis_and_bad_qubit() {
        let mut s = StateVector::vacuum(1).unwrap();
        assert!(matches!(
            s.apply_rotation(1, Axis::I, 0.1),
            Err(SimulatorError::InvalidRotationAxis('I'))
        ));
        assert!(matches!(
            s.apply_rotation(2, Axis::X, 0.1),
            Err(SimulatorError::QubitOutOfRange { q: 2, m: 1 })
        ));
    }

    #[test]
    fn pst_maps_01101_to_i_10110() {
        // |01101> is index 0b01101 = 13; |10110> is 0b10110 = 22
        let m = 5;
        let mut amps = vec![c(0.0, 0.0); 1 << m];
        amps[0b01101] = c(1.0, 0.0);
        let mut s = StateVector::from_amplitudes(amps, m).unwrap();
        s.apply_entangler(EntanglerKind::PstM).unwrap();
        assert_eq!(s.amplitudes()[0b10110], c(0.0, 1.0));
        assert!(s
            .amplitudes()
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != 0b10110)
            .all(|(_, a)| a.norm() == 0.0));
    }

    #[test]
    fn cnot_chain_cascades_from_first_qubit() {
        let m = 4;
        let mut amps = vec![c(0.0, 0.0); 1 << m];
        amps[0b1000] = c(1.0, 0.0);
        let mut s = StateVector::from_amplitudes(amps, m).unwrap();
        s.apply_entangler(EntanglerKind::CnotChain).unwrap();
        assert_eq!(s.amplitudes()[0b1111], c(1.0, 0.0));
    }

    #[test]
    fn cmnot_identity_when_control_off() {
        let m = 3;
        let mut amps = vec![c(0.0, 0.0); 1 << m];
        amps[0b011] = c(1.0, 0.0);
        let mut s = StateVector::from_amplitudes(amps, m).unwrap();
        s.apply_entangler(EntanglerKind::CmNot).unwrap();
        assert_eq!(s.amplitudes()[0b011], c(1.0, 0.0));
    }

    #[test]
    fn cmnot_flips_targets_when_control_on() {
        let m = 3;
        let mut amps = vec![c(0.0, 0.0); 1 << m];
        amps[0b101] = c(1.0, 0.0);
        let mut s = StateVector::from_amplitudes(amps, m).unwrap();
        s.apply_entangler(EntanglerKind::CmNot).unwrap();
        assert_eq!(s.amplitudes()[0b110], c(1.0, 0.0));
    }

    #[test]
    fn iswap2_swaps_last_two_with_phase_when_controls_on() {
        let m = 3;
        let mut amps = vec![c(0.0, 0.0); 1 << m];
        amps[0b101] = c(1.0, 0.0);
        let mut s = StateVector::from_amplitudes(amps, m).unwrap();
        s.apply_entangler(EntanglerKind::Iswap2).unwrap();
        assert_eq!(s.amplitudes()[0b110], c(0.0, 1.0));

        // control off: untouched
        let mut amps = vec![c(0.0, 0.0); 1 << m];
        amps[0b001] = c(1.0, 0.0);
        let mut s = StateVector::from_amplitudes(amps, m).unwrap();
        s.apply_entangler(EntanglerKind::Iswap2).unwrap();
        assert_eq!(s.amplitudes()[0b001], c(1.0, 0.0));
    }

    #[test]
    fn all_entanglers_are_unitary_m2_to_6() {
        for m in 2..=6 {
            for kind in EntanglerKind::ALL {
                let u = entangler_matrix(kind, m);
                let id = DMatrix::<Complex64>::identity(1 << m, 1 << m);
                let dev = (u.adjoint() * &u - id)
                    .iter()
                    .map(|e| e.norm())
                    .fold(0.0, f64::max);
                assert!(dev < 1e-12, "{} not unitary at m={m}: {dev}", kind.name());
            }
        }
    }

    #[test]
    fn cnot_pairs_gate_count_equivalent_dense() {
        // m=3: pairs = chain of (1,2),(1,3),(2,3); check against
        // explicit composition of CNOT matrices
        let m = 3;
        let u = entangler_matrix(EntanglerKind::CnotPairs, m);
        let mut expected = DMatrix::<Complex64>::identity(8, 8);
        for (ctl, tgt) in [(1usize, 2usize), (1, 3), (2, 3)] {
            let mut gate = DMatrix::<Complex64>::zeros(8, 8);
            for col in 0..8usize {
                let cbit = (col >> (m - ctl)) & 1;
                let row = if cbit == 1 { col ^ (1 << (m - tgt)) } else { col };
                gate[(row, col)] = c(1.0, 0.0);
            }
            expected = gate * expected;
        }
        assert!((u - expected).iter().all(|e| e.norm() < 1e-14));
    }

    #[test]
    fn param_vector_validates_length() {
        assert!(ParamVector::new(&[0.0; 10], 2, 1).is_ok());
        let err = ParamVector::new(&[0.0; 9], 2, 1).unwrap_err();
        assert!(matches!(
            err,
            SimulatorError::ParamLength {
                got: 9,
                expected: 10,
                ..
            }
        ));
    }

    #[test]
    fn param_vector_wraps_to_two_pi() {
        let p = ParamVector::new(&[-0.5, 7.0, 0.0, 1.0], 2, 0).unwrap();
        assert!(p.angles().iter().all(|&t| (0.0..TAU).contains(&t)));
        assert_abs_diff_eq!(p.angles()[0], TAU - 0.5, epsilon = 1e-12);
    }

    #[test]
    fn zero_params_prepare_vacuum() {
        let theta = ParamVector::new(&vec![0.0; param_count(2, 0)], 2, 0).unwrap();
        let s = prepare_trial_state(&theta, EntanglerKind::CnotChain, 2).unwrap();
        assert_eq!(s.amplitudes()[0], c(1.0, 0.0));

        let theta = ParamVector::new(&vec![0.0; param_count(2, 1)], 2, 1).unwrap();
        let s = prepare_trial_state(&theta, EntanglerKind::CnotChain, 2).unwrap();
        assert_eq!(s.amplitudes()[0], c(1.0, 0.0));
    }

    #[test]
    fn trial_state_matches_dense_unitary_product() {
        // straight-line dense evaluation of the preparation sequence
        let m = 2;
        let d = 2;
        let mut rng = ChaCha12Rng::seed_from_u64(11);
        let theta_raw: Vec<f64> = (0..param_count(m, d)).map(|_| rng.gen::<f64>() * TAU).collect();
        let theta = ParamVector::new(&theta_raw, m, d).unwrap();

        for kind in EntanglerKind::ALL {
            let state = prepare_trial_state(&theta, kind, m).unwrap();

            let dim = 1usize << m;
            let rot = |q: usize, axis: Axis, phi: f64| -> DMatrix<Complex64> {
                let mut single = DMatrix::<Complex64>::identity(2, 2)
                    * Complex64::new((phi / 2.0).cos(), 0.0);
                single += axis.matrix() * Complex64::new(0.0, -(phi / 2.0).sin());
                let mut full = DMatrix::<Complex64>::identity(1, 1);
                for pos in 1..=m {
                    let factor = if pos == q {
                        single.clone()
                    } else {
                        DMatrix::identity(2, 2)
                    };
                    full = full.kronecker(&factor);
                }
                full
            };

            let mut u = DMatrix::<Complex64>::identity(dim, dim);
            let angles = theta.angles();
            for q in 1..=m {
                let base = (q - 1) * 2;
                u = rot(q, Axis::X, angles[base]) * u;
                u = rot(q, Axis::Z, angles[base + 1]) * u;
            }
            for layer in 1..=d {
                u = entangler_matrix(kind, m) * u;
                for q in 1..=m {
                    let base = 2 * m + (layer - 1) * 3 * m + (q - 1) * 3;
                    u = rot(q, Axis::Z, angles[base]) * u;
                    u = rot(q, Axis::X, angles[base + 1]) * u;
                    u = rot(q, Axis::Z, angles[base + 2]) * u;
                }
            }
            let mut expected = vec![c(0.0, 0.0); dim];
            for row in 0..dim {
                expected[row] = u[(row, 0)];
            }
            for (a, e) in state.amplitudes().iter().zip(&expected) {
                assert!((a - e).norm() < 1e-10, "{} mismatch", kind.name());
            }
        }
    }

    #[test]
    fn expectation_on_computational_states() {
        let s = StateVector::vacuum(1).unwrap();
        let mut h = PauliSum::new(1);
        h.add_str("Z", c(1.0, 0.0)).unwrap();
        assert_abs_diff_eq!(expectation(&s, &h).unwrap(), 1.0, epsilon = 1e-14);

        let inv = std::f64::consts::FRAC_1_SQRT_2;
        let plus = StateVector::from_amplitudes(vec![c(inv, 0.0), c(inv, 0.0)], 1).unwrap();
        let mut hx = PauliSum::new(1);
        hx.add_str("X", c(1.0, 0.0)).unwrap();
        assert_abs_diff_eq!(expectation(&plus, &hx).unwrap(), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn expectation_matches_dense_oracle_on_random_state() {
        let m = 6;
        let mut rng = ChaCha12Rng::seed_from_u64(23);
        let mut amps: Vec<Complex64> = (0..1usize << m)
            .map(|_| c(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
            .collect();
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        for a in &mut amps {
            *a /= norm;
        }
        let s = StateVector::from_amplitudes(amps.clone(), m).unwrap();

        let mut h = PauliSum::new(m);
        for _ in 0..20 {
            let axes: String = (0..m)
                .map(|_| ['I', 'X', 'Y', 'Z'][rng.gen_range(0..4)])
                .collect();
            h.add_str(&axes, c(rng.gen::<f64>() - 0.5, 0.0)).unwrap();
        }
        let fast = expectation(&s, &h).unwrap();

        let dense = h.to_dense().unwrap();
        let v = nalgebra::DVector::from_vec(amps);
        let slow = (v.adjoint() * dense * &v)[(0, 0)];
        assert_abs_diff_eq!(fast, slow.re, epsilon = 1e-10);
    }

    #[test]
    fn expectation_rejects_non_hermitian() {
        let s = StateVector::vacuum(1).unwrap();
        let mut h = PauliSum::new(1);
        h.add_str("Z", c(0.0, 1.0)).unwrap();
        assert!(matches!(
            expectation(&s, &h),
            Err(SimulatorError::NotHermitian(_))
        ));
    }

    #[test]
    fn expectation_stays_within_spectrum_bounds() {
        let m = 3;
        let mut rng = ChaCha12Rng::seed_from_u64(5);
        let mut h = PauliSum::new(m);
        for _ in 0..10 {
            let axes: String = (0..m)
                .map(|_| ['I', 'X', 'Y', 'Z'][rng.gen_range(0..4)])
                .collect();
            h.add_str(&axes, c(rng.gen::<f64>() - 0.5, 0.0)).unwrap();
        }
        let spec = crate::solver::ground_energy(&h).unwrap();
        let (lo, hi) = (
            spec.eigenvalues[0],
            *spec.eigenvalues.last().unwrap(),
        );
        for seed in 0..5u64 {
            let mut rng = ChaCha12Rng::seed_from_u64(seed);
            let theta_raw: Vec<f64> =
                (0..param_count(m, 1)).map(|_| rng.gen::<f64>() * TAU).collect();
            let theta = ParamVector::new(&theta_raw, m, 1).unwrap();
            let s = prepare_trial_state(&theta, EntanglerKind::CnotChain, m).unwrap();
            let e = expectation(&s, &h).unwrap();
            assert!(e >= lo - 1e-9 && e <= hi + 1e-9);
        }
    }

    #[test]
    fn norm_preserved_across_deep_preparation() {
        let m = 8;
        let d = 6;
        let mut rng = ChaCha12Rng::seed_from_u64(99);
        let theta_raw: Vec<f64> =
            (0..param_count(m, d)).map(|_| rng.gen::<f64>() * TAU).collect();
        let theta = ParamVector::new(&theta_raw, m, d).unwrap();
        for kind in EntanglerKind::ALL {
            let s = prepare_trial_state(&theta, kind, m).unwrap();
            assert!((s.norm() - 1.0).abs() < 1e-8, "{}", kind.name());
        }
    }
}
