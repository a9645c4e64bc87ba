//! Phase-tracked Pauli string algebra, the GF(2) symplectic encoding and
//! dense-matrix conversion/decomposition.
//!
//! A Pauli string over m qubits is an ordered sequence of single-qubit
//! axes from {I, X, Y, Z} together with a phase in {+1, +i, -1, -i}.
//! Qubit 1 is the leftmost factor and the most significant bit of a
//! basis index; every module in the crate follows this convention.

use std::collections::BTreeMap;
use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Coefficients with magnitude below this are dropped from a [`PauliSum`].
pub const PRUNE_TOLERANCE: f64 = 1e-12;

/// Largest qubit count for which dense 2^m x 2^m conversion is allowed.
pub const DENSE_QUBIT_LIMIT: usize = 14;

#[derive(Debug, Error, PartialEq)]
pub enum PauliError {
    #[error("qubit count mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("dense form limited to {limit} qubits, got {m}")]
    TooManyQubits { m: usize, limit: usize },
    #[error("matrix dimension {0} is not 2^{1}")]
    DimensionMismatch(usize, usize),
    #[error("invalid axis character {0:?} (expected one of I, X, Y, Z)")]
    InvalidAxis(char),
    #[error("malformed Pauli sum entry: {0}")]
    Parse(String),
}

/// Single-qubit Pauli axis. The derived ordering (I < X < Y < Z) fixes
/// the canonical term order inside a [`PauliSum`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Axis {
    I,
    X,
    Y,
    Z,
}

impl Axis {
    pub fn from_char(c: char) -> Result<Self, PauliError> {
        match c {
            'I' => Ok(Axis::I),
            'X' => Ok(Axis::X),
            'Y' => Ok(Axis::Y),
            'Z' => Ok(Axis::Z),
            other => Err(PauliError::InvalidAxis(other)),
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Axis::I => 'I',
            Axis::X => 'X',
            Axis::Y => 'Y',
            Axis::Z => 'Z',
        }
    }

    /// The 2x2 matrix of this axis.
    pub fn matrix(self) -> DMatrix<Complex64> {
        let o = Complex64::new(0.0, 0.0);
        let l = Complex64::new(1.0, 0.0);
        let i = Complex64::new(0.0, 1.0);
        let entries = match self {
            Axis::I => [l, o, o, l],
            Axis::X => [o, l, l, o],
            Axis::Y => [o, -i, i, o],
            Axis::Z => [l, o, o, -l],
        };
        DMatrix::from_row_slice(2, 2, &entries)
    }
}

/// A phase from the cyclic group {+1, +i, -1, -i}, stored as the
/// exponent k in i^k.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Phase(u8);

impl Phase {
    pub const ONE: Phase = Phase(0);
    pub const PLUS_I: Phase = Phase(1);
    pub const MINUS_ONE: Phase = Phase(2);
    pub const MINUS_I: Phase = Phase(3);

    pub fn from_exponent(k: u8) -> Self {
        Phase(k % 4)
    }

    pub fn exponent(self) -> u8 {
        self.0
    }

    pub fn times(self, other: Phase) -> Phase {
        Phase((self.0 + other.0) % 4)
    }

    pub fn as_complex(self) -> Complex64 {
        match self.0 {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        }
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self.0 {
            0 => "+1",
            1 => "+i",
            2 => "-1",
            _ => "-i",
        };
        write!(f, "{s}")
    }
}

/// Single-qubit product table: left * right = (phase, axis).
fn axis_product(left: Axis, right: Axis) -> (Phase, Axis) {
    use Axis::*;
    match (left, right) {
        (I, a) => (Phase::ONE, a),
        (a, I) => (Phase::ONE, a),
        (a, b) if a == b => (Phase::ONE, I),
        (X, Y) => (Phase::PLUS_I, Z),
        (Y, X) => (Phase::MINUS_I, Z),
        (Y, Z) => (Phase::PLUS_I, X),
        (Z, Y) => (Phase::MINUS_I, X),
        (Z, X) => (Phase::PLUS_I, Y),
        (X, Z) => (Phase::MINUS_I, Y),
        _ => unreachable!(),
    }
}

/// A phased m-qubit Pauli string.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PauliTerm {
    phase: Phase,
    axes: Vec<Axis>,
}

impl PauliTerm {
    pub fn new(phase: Phase, axes: Vec<Axis>) -> Self {
        PauliTerm { phase, axes }
    }

    /// Parse an axes string such as `"IZXY"`; the phase is +1.
    pub fn parse(axes: &str) -> Result<Self, PauliError> {
        let axes = axes
            .chars()
            .map(Axis::from_char)
            .collect::<Result<Vec<_>, _>>()?;
        Ok(PauliTerm::new(Phase::ONE, axes))
    }

    pub fn identity(m: usize) -> Self {
        PauliTerm::new(Phase::ONE, vec![Axis::I; m])
    }

    /// The single-qubit operator `axis` on qubit `q` (1-based) of m qubits.
    pub fn single(m: usize, q: usize, axis: Axis) -> Self {
        assert!(q >= 1 && q <= m, "qubit index {q} out of 1..={m}");
        let mut axes = vec![Axis::I; m];
        axes[q - 1] = axis;
        PauliTerm::new(Phase::ONE, axes)
    }

    pub fn qubits(&self) -> usize {
        self.axes.len()
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    pub fn axes(&self) -> &[Axis] {
        &self.axes
    }

    /// Axis at qubit `q` (1-based).
    pub fn axis_at(&self, q: usize) -> Axis {
        self.axes[q - 1]
    }

    pub fn is_identity(&self) -> bool {
        self.axes.iter().all(|&a| a == Axis::I)
    }

    pub fn axes_string(&self) -> String {
        self.axes.iter().map(|a| a.as_char()).collect()
    }

    /// Exact group product with the phase tracked through the
    /// single-qubit table (e.g. X*Y = iZ, Y*X = -iZ).
    pub fn multiply(&self, other: &PauliTerm) -> Result<PauliTerm, PauliError> {
        if self.qubits() != other.qubits() {
            return Err(PauliError::LengthMismatch(self.qubits(), other.qubits()));
        }
        let mut phase = self.phase.times(other.phase);
        let axes = self
            .axes
            .iter()
            .zip(&other.axes)
            .map(|(&a, &b)| {
                let (ph, c) = axis_product(a, b);
                phase = phase.times(ph);
                c
            })
            .collect();
        Ok(PauliTerm { phase, axes })
    }

    /// Dense 2^m x 2^m matrix, big-endian basis indexing.
    pub fn to_dense(&self) -> Result<DMatrix<Complex64>, PauliError> {
        let m = self.qubits();
        check_dense_limit(m)?;
        let dim = 1usize << m;
        let mut mat = DMatrix::zeros(dim, dim);
        let ph = self.phase.as_complex();
        let action = StringAction::new(&self.axes);
        for col in 0..dim {
            let (row, amp) = action.act(col);
            mat[(row, col)] += ph * amp;
        }
        Ok(mat)
    }
}

impl fmt::Display for PauliTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.phase, self.axes_string())
    }
}

/// Precomputed bitmask form of a Pauli string's basis action
/// sigma |col> = amp |row>: the row is col XOR the X-support, the
/// amplitude is i^{#Y} times a sign from the parity of the set bits
/// under the Y/Z support. Qubit q occupies bit (m - q) of the index.
pub(crate) struct StringAction {
    x_mask: usize,
    yz_mask: usize,
    y_phase: Complex64,
}

impl StringAction {
    pub(crate) fn new(axes: &[Axis]) -> Self {
        let m = axes.len();
        let mut x_mask = 0usize;
        let mut yz_mask = 0usize;
        let mut n_y = 0u32;
        for (pos, &axis) in axes.iter().enumerate() {
            let bit = 1usize << (m - 1 - pos);
            match axis {
                Axis::I => {}
                Axis::X => x_mask |= bit,
                Axis::Y => {
                    x_mask |= bit;
                    yz_mask |= bit;
                    n_y += 1;
                }
                Axis::Z => yz_mask |= bit,
            }
        }
        let y_phase = match n_y % 4 {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        };
        StringAction {
            x_mask,
            yz_mask,
            y_phase,
        }
    }

    #[inline]
    pub(crate) fn act(&self, col: usize) -> (usize, Complex64) {
        let row = col ^ self.x_mask;
        let sign = if (col & self.yz_mask).count_ones() % 2 == 0 {
            1.0
        } else {
            -1.0
        };
        (row, self.y_phase * sign)
    }
}

fn check_dense_limit(m: usize) -> Result<(), PauliError> {
    if m > DENSE_QUBIT_LIMIT {
        return Err(PauliError::TooManyQubits {
            m,
            limit: DENSE_QUBIT_LIMIT,
        });
    }
    Ok(())
}

/// Length-2m binary vector (a_x | a_z) encoding a Pauli string for GF(2)
/// commutation arithmetic. Phases are deliberately not represented.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SymplecticVector {
    x: Vec<bool>,
    z: Vec<bool>,
}

impl SymplecticVector {
    pub fn new(x: Vec<bool>, z: Vec<bool>) -> Self {
        assert_eq!(x.len(), z.len(), "x and z halves must have equal length");
        SymplecticVector { x, z }
    }

    pub fn zero(m: usize) -> Self {
        SymplecticVector {
            x: vec![false; m],
            z: vec![false; m],
        }
    }

    pub fn qubits(&self) -> usize {
        self.x.len()
    }

    pub fn x_bits(&self) -> &[bool] {
        &self.x
    }

    pub fn z_bits(&self) -> &[bool] {
        &self.z
    }

    pub fn is_zero(&self) -> bool {
        !self.x.iter().chain(&self.z).any(|&b| b)
    }

    /// GF(2) addition, the phase-free product of the encoded operators.
    pub fn add(&self, other: &SymplecticVector) -> Result<SymplecticVector, PauliError> {
        if self.qubits() != other.qubits() {
            return Err(PauliError::LengthMismatch(self.qubits(), other.qubits()));
        }
        Ok(SymplecticVector {
            x: self.x.iter().zip(&other.x).map(|(a, b)| a ^ b).collect(),
            z: self.z.iter().zip(&other.z).map(|(a, b)| a ^ b).collect(),
        })
    }

    /// The flat (a_x | a_z) bit row of length 2m.
    pub fn as_row(&self) -> Vec<bool> {
        self.x.iter().chain(&self.z).copied().collect()
    }
}

impl fmt::Display for SymplecticVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let bits = |v: &[bool]| v.iter().map(|&b| if b { '1' } else { '0' }).collect::<String>();
        write!(f, "({}|{})", bits(&self.x), bits(&self.z))
    }
}

/// Encode a Pauli string as (a_x | a_z): X -> (1,0), Z -> (0,1),
/// Y -> (1,1), I -> (0,0) per position. The phase is discarded.
pub fn encode_symplectic(p: &PauliTerm) -> SymplecticVector {
    let x = p.axes.iter().map(|&a| matches!(a, Axis::X | Axis::Y)).collect();
    let z = p.axes.iter().map(|&a| matches!(a, Axis::Y | Axis::Z)).collect();
    SymplecticVector::new(x, z)
}

/// Decode (a_x | a_z) back to a Pauli string with phase +1. Positions
/// with both bits set decode to Y (the product X*Z equals Y only up to
/// phase; the convention here drops that phase).
pub fn decode_symplectic(v: &SymplecticVector) -> PauliTerm {
    let axes = v
        .x
        .iter()
        .zip(&v.z)
        .map(|(&x, &z)| match (x, z) {
            (false, false) => Axis::I,
            (true, false) => Axis::X,
            (false, true) => Axis::Z,
            (true, true) => Axis::Y,
        })
        .collect();
    PauliTerm::new(Phase::ONE, axes)
}

/// The GF(2) bilinear form a_x . b_z + a_z . b_x. Returns 0 iff the
/// encoded operators commute, 1 iff they anti-commute.
pub fn symplectic_product(a: &SymplecticVector, b: &SymplecticVector) -> Result<u8, PauliError> {
    if a.qubits() != b.qubits() {
        return Err(PauliError::LengthMismatch(a.qubits(), b.qubits()));
    }
    let mut acc = false;
    for i in 0..a.qubits() {
        acc ^= a.x[i] & b.z[i];
        acc ^= a.z[i] & b.x[i];
    }
    Ok(acc as u8)
}

/// A real/complex-weighted sum of phase-free Pauli strings over a fixed
/// qubit count; the universal Hamiltonian representation.
///
/// Terms are keyed by their axes and kept in canonical (lexicographic)
/// order, with coefficients below [`PRUNE_TOLERANCE`] pruned. A qubit
/// count of zero is permitted: the sum is then a scalar multiple of the
/// empty product, which arises when tapering removes every qubit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PauliSumJson", into = "PauliSumJson")]
pub struct PauliSum {
    m: usize,
    terms: BTreeMap<Vec<Axis>, Complex64>,
}

impl PauliSum {
    pub fn new(m: usize) -> Self {
        PauliSum {
            m,
            terms: BTreeMap::new(),
        }
    }

    /// Add `coeff` times the axes string (given as e.g. `"IZXY"`).
    pub fn add_str(&mut self, axes: &str, coeff: Complex64) -> Result<(), PauliError> {
        let term = PauliTerm::parse(axes)?;
        self.add_axes(term.axes, coeff)
    }

    /// Add a phased term; the phase folds into the stored coefficient.
    pub fn add_term(&mut self, term: &PauliTerm, coeff: Complex64) -> Result<(), PauliError> {
        self.add_axes(term.axes.clone(), coeff * term.phase.as_complex())
    }

    fn add_axes(&mut self, axes: Vec<Axis>, coeff: Complex64) -> Result<(), PauliError> {
        if axes.len() != self.m {
            return Err(PauliError::LengthMismatch(axes.len(), self.m));
        }
        let updated = self
            .terms
            .get(&axes)
            .copied()
            .unwrap_or(Complex64::new(0.0, 0.0))
            + coeff;
        if updated.norm() < PRUNE_TOLERANCE {
            self.terms.remove(&axes);
        } else {
            self.terms.insert(axes, updated);
        }
        Ok(())
    }

    pub fn qubits(&self) -> usize {
        self.m
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in canonical order.
    pub fn iter(&self) -> impl Iterator<Item = (&[Axis], Complex64)> {
        self.terms.iter().map(|(k, &v)| (k.as_slice(), v))
    }

    pub fn coefficient(&self, axes: &str) -> Result<Complex64, PauliError> {
        let term = PauliTerm::parse(axes)?;
        Ok(self
            .terms
            .get(term.axes())
            .copied()
            .unwrap_or(Complex64::new(0.0, 0.0)))
    }

    /// Drop every coefficient with magnitude below [`PRUNE_TOLERANCE`].
    pub fn prune(&mut self) {
        self.terms.retain(|_, c| c.norm() >= PRUNE_TOLERANCE);
    }

    /// True iff every coefficient is real to within `tol`.
    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.terms.values().all(|c| c.im.abs() <= tol)
    }

    /// Largest |Im| over the stored coefficients.
    pub fn max_imag(&self) -> f64 {
        self.terms
            .values()
            .map(|c| c.im.abs())
            .fold(0.0, f64::max)
    }

    /// Drop imaginary parts smaller than `tol` from every coefficient.
    pub fn discard_small_imag(&mut self, tol: f64) {
        for c in self.terms.values_mut() {
            if c.im.abs() < tol {
                c.im = 0.0;
            }
        }
        self.prune();
    }

    pub fn scaled(&self, factor: Complex64) -> PauliSum {
        let mut out = PauliSum::new(self.m);
        for (axes, c) in &self.terms {
            out.add_axes(axes.clone(), c * factor).expect("same m");
        }
        out
    }

    pub fn add_sum(&mut self, other: &PauliSum) -> Result<(), PauliError> {
        if self.m != other.m {
            return Err(PauliError::LengthMismatch(self.m, other.m));
        }
        for (axes, &c) in &other.terms {
            self.add_axes(axes.clone(), c)?;
        }
        Ok(())
    }

    /// Operator product, expanding term by term with exact phases.
    pub fn multiply(&self, other: &PauliSum) -> Result<PauliSum, PauliError> {
        if self.m != other.m {
            return Err(PauliError::LengthMismatch(self.m, other.m));
        }
        let mut out = PauliSum::new(self.m);
        for (a, &ca) in &self.terms {
            let ta = PauliTerm::new(Phase::ONE, a.clone());
            for (b, &cb) in &other.terms {
                let tb = PauliTerm::new(Phase::ONE, b.clone());
                let prod = ta.multiply(&tb)?;
                out.add_axes(prod.axes, ca * cb * prod.phase.as_complex())?;
            }
        }
        out.prune();
        Ok(out)
    }

    /// Dense 2^m x 2^m matrix with qubit 1 as the leftmost factor.
    pub fn to_dense(&self) -> Result<DMatrix<Complex64>, PauliError> {
        check_dense_limit(self.m)?;
        let dim = 1usize << self.m;
        let mut mat = DMatrix::zeros(dim, dim);
        for (axes, &coeff) in &self.terms {
            let action = StringAction::new(axes);
            for col in 0..dim {
                let (row, amp) = action.act(col);
                mat[(row, col)] += coeff * amp;
            }
        }
        Ok(mat)
    }

    /// Fourier decomposition over the Pauli basis with the Frobenius
    /// inner product: h_k = 2^{-m} tr(sigma^k H). The 2^{-m}
    /// normalization makes the reconstruction sum equal H exactly
    /// (tr(sigma^dag sigma) = 2^m, not 1). For Hermitian H this equals
    /// tr(H^dag sigma^k) / 2^m; the trace is taken in this orientation
    /// because the Frobenius form is antilinear in its first slot, and
    /// the other orientation would reconstruct H^dag instead of H on
    /// non-Hermitian input.
    pub fn decompose_dense(h: &DMatrix<Complex64>, m: usize) -> Result<PauliSum, PauliError> {
        check_dense_limit(m)?;
        let dim = 1usize << m;
        if h.nrows() != dim || h.ncols() != dim {
            return Err(PauliError::DimensionMismatch(h.nrows(), m));
        }
        let norm = 1.0 / dim as f64;
        let mut out = PauliSum::new(m);
        let mut axes = vec![Axis::I; m];
        for k in 0..4usize.pow(m as u32) {
            let mut code = k;
            for pos in (0..m).rev() {
                axes[pos] = match code & 3 {
                    0 => Axis::I,
                    1 => Axis::X,
                    2 => Axis::Y,
                    _ => Axis::Z,
                };
                code >>= 2;
            }
            // tr(sigma H) visits the single nonzero sigma entry per column.
            let action = StringAction::new(&axes);
            let mut tr = Complex64::new(0.0, 0.0);
            for col in 0..dim {
                let (row, amp) = action.act(col);
                tr += amp * h[(col, row)];
            }
            let coeff = tr * norm;
            if coeff.norm() >= PRUNE_TOLERANCE {
                out.add_axes(axes.clone(), coeff)?;
            }
        }
        Ok(out)
    }

    /// One term per line: `<re> <im> <axes>`.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for (axes, c) in &self.terms {
            let axes_str: String = axes.iter().map(|a| a.as_char()).collect();
            s.push_str(&format!("{} {} {}\n", c.re, c.im, axes_str));
        }
        s
    }

    pub fn from_text(text: &str) -> Result<PauliSum, PauliError> {
        let mut terms = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != 3 {
                return Err(PauliError::Parse(format!(
                    "line {}: expected `<re> <im> <axes>`, got {:?}",
                    lineno + 1,
                    line
                )));
            }
            let re: f64 = fields[0]
                .parse()
                .map_err(|e| PauliError::Parse(format!("line {}: {e}", lineno + 1)))?;
            let im: f64 = fields[1]
                .parse()
                .map_err(|e| PauliError::Parse(format!("line {}: {e}", lineno + 1)))?;
            terms.push((PauliTerm::parse(fields[2])?, Complex64::new(re, im)));
        }
        let m = match terms.first() {
            Some((t, _)) => t.qubits(),
            None => return Err(PauliError::Parse("no terms".into())),
        };
        let mut out = PauliSum::new(m);
        for (t, c) in terms {
            out.add_term(&t, c)?;
        }
        Ok(out)
    }
}

/// Wire form of a [`PauliSum`]:
/// `{ "m": 4, "terms": [{"re":0.5,"im":0.0,"axes":"IZXY"}] }`.
#[derive(Serialize, Deserialize)]
struct PauliSumJson {
    m: usize,
    terms: Vec<TermJson>,
}

#[derive(Serialize, Deserialize)]
struct TermJson {
    re: f64,
    im: f64,
    axes: String,
}

impl From<PauliSum> for PauliSumJson {
    fn from(p: PauliSum) -> Self {
        let terms = p
            .terms
            .iter()
            .map(|(axes, c)| TermJson {
                re: c.re,
                im: c.im,
                axes: axes.iter().map(|a| a.as_char()).collect(),
            })
            .collect();
        PauliSumJson { m: p.m, terms }
    }
}

impl TryFrom<PauliSumJson> for PauliSum {
    type Error = PauliError;

    fn try_from(j: PauliSumJson) -> Result<Self, Self::Error> {
        let mut out = PauliSum::new(j.m);
        for t in j.terms {
            out.add_str(&t.axes, Complex64::new(t.re, t.im))?;
        }
        Ok(out)
    }
}
