//! Z2-symmetry qubit tapering.
//!
//! The pipeline: encode the Hamiltonian terms as a GF(2) parity-check
//! matrix, compute its kernel, extract generators of a maximal abelian
//! subgroup, rearrange them into a (qubit, axis, generator) triple whose
//! single-qubit operators anti-commute with exactly one generator each,
//! conjugate the Hamiltonian by the induced unitary, and replace the
//! trailing qubits by their +-1 eigenvalue sectors.
//!
//! Generators are stored and manipulated purely symplectically; sector
//! signs enter only at the final replacement step. The dense
//! conjugation route below is the reference implementation.

use nalgebra::DMatrix;
use num_complex::Complex64;
use thiserror::Error;

use crate::pauli::{
    decode_symplectic, encode_symplectic, symplectic_product, Axis, PauliError, PauliSum,
    PauliTerm, SymplecticVector,
};
use crate::solver::{self, SolverError};

/// Largest qubit count for which the dense conjugation route runs.
pub const TAPER_QUBIT_LIMIT: usize = 12;

#[derive(Debug, Error)]
pub enum TaperError {
    #[error("empty Pauli sum")]
    EmptyHamiltonian,
    #[error("kernel basis vectors are not linearly independent")]
    DependentBasis,
    #[error("generators do not pairwise commute")]
    NonCommutingGenerators,
    #[error("generators are not linearly independent over GF(2)")]
    DependentGenerators,
    #[error("symmetry group has no generators")]
    EmptyGroup,
    #[error("generator {i} commutes with sigma^{rho}_{q}; transform needs anti-commutation")]
    TransformPrecondition { i: usize, q: usize, rho: char },
    #[error("generator index {i} out of range 1..={r}")]
    GeneratorOutOfRange { i: usize, r: usize },
    #[error("axis {0:?} is not admissible here (expected X or Z)")]
    BadAxis(char),
    #[error("constructed triple violates the anti-commutation predicate")]
    PredicateViolated,
    #[error("term {0} anti-commutes with generator {1}: not a symmetry")]
    NotASymmetry(String, String),
    #[error("transformed term {0} carries Y/Z on a tapered position")]
    ResidualOnTaperedQubit(String),
    #[error("sector has {got} signs, expected {expected}")]
    SectorLength { got: usize, expected: usize },
    #[error("sector entries must be +1 or -1")]
    SectorSign,
    #[error("dense tapering limited to {limit} qubits, got {m}")]
    TooManyQubits { m: usize, limit: usize },
    #[error(transparent)]
    Pauli(#[from] PauliError),
    #[error(transparent)]
    Solver(#[from] SolverError),
}

/// The block-swapped stack of term encodings: one row (a_z | a_x) per
/// distinct non-identity Pauli term of the Hamiltonian.
#[derive(Debug, Clone)]
pub struct ParityCheckMatrix {
    rows: Vec<Vec<bool>>,
    m: usize,
}

impl ParityCheckMatrix {
    pub fn qubits(&self) -> usize {
        self.m
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Vec<bool>] {
        &self.rows
    }
}

/// Build the parity-check matrix of a Hamiltonian. The identity term
/// contributes nothing and is skipped.
pub fn build_parity_check(h: &PauliSum) -> Result<ParityCheckMatrix, TaperError> {
    if h.is_empty() {
        return Err(TaperError::EmptyHamiltonian);
    }
    let m = h.qubits();
    let mut rows = Vec::new();
    for (axes, _) in h.iter() {
        if axes.iter().all(|&a| a == Axis::I) {
            continue;
        }
        let v = encode_symplectic(&PauliTerm::new(crate::pauli::Phase::ONE, axes.to_vec()));
        let mut row = Vec::with_capacity(2 * m);
        row.extend_from_slice(v.z_bits());
        row.extend_from_slice(v.x_bits());
        rows.push(row);
    }
    Ok(ParityCheckMatrix { rows, m })
}

/// GF(2) Gaussian elimination with deterministic leftmost-pivot order;
/// returns (row-echelon rows, pivot columns).
fn gf2_eliminate(mut rows: Vec<Vec<bool>>, width: usize) -> (Vec<Vec<bool>>, Vec<usize>) {
    let mut pivots = Vec::new();
    let mut rank = 0;
    for col in 0..width {
        let Some(pivot_row) = (rank..rows.len()).find(|&r| rows[r][col]) else {
            continue;
        };
        rows.swap(rank, pivot_row);
        let pivot = rows[rank].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != rank && row[col] {
                for (dst, &src) in row.iter_mut().zip(&pivot) {
                    *dst ^= src;
                }
            }
        }
        pivots.push(col);
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    rows.truncate(rank);
    (rows, pivots)
}

/// Kernel basis of the nullspace {v : rows . v = 0 over GF(2)} for a
/// matrix of the given width; deterministic free-column order.
fn gf2_kernel(rows: &[Vec<bool>], width: usize) -> Vec<Vec<bool>> {
    let (echelon, pivots) = gf2_eliminate(rows.to_vec(), width);
    let mut basis = Vec::new();
    for free in 0..width {
        if pivots.contains(&free) {
            continue;
        }
        let mut v = vec![false; width];
        v[free] = true;
        for (r, &pc) in pivots.iter().enumerate() {
            if echelon[r][free] {
                v[pc] = true;
            }
        }
        basis.push(v);
    }
    basis
}

fn gf2_rank(rows: &[Vec<bool>], width: usize) -> usize {
    gf2_eliminate(rows.to_vec(), width).0.len()
}

/// Basis of ker(E). Each returned vector is a symplectic encoding
/// (v_x | v_z) whose operator commutes with every Hamiltonian term.
pub fn kernel_basis(e: &ParityCheckMatrix) -> Vec<SymplecticVector> {
    let width = 2 * e.m;
    gf2_kernel(&e.rows, width)
        .into_iter()
        .map(|v| SymplecticVector::new(v[..e.m].to_vec(), v[e.m..].to_vec()))
        .collect()
}

/// An abelian group of phase-free Pauli operators given by independent
/// generators; -I is never generated because phases stay +1.
#[derive(Debug, Clone)]
pub struct SymmetryGroup {
    generators: Vec<PauliTerm>,
    m: usize,
}

impl SymmetryGroup {
    /// Validate commutation, independence and the r <= m bound.
    pub fn new(generators: Vec<PauliTerm>, m: usize) -> Result<Self, TaperError> {
        if generators.is_empty() {
            return Err(TaperError::EmptyGroup);
        }
        let encoded: Vec<SymplecticVector> =
            generators.iter().map(encode_symplectic).collect();
        for i in 0..encoded.len() {
            for j in (i + 1)..encoded.len() {
                if symplectic_product(&encoded[i], &encoded[j])? == 1 {
                    return Err(TaperError::NonCommutingGenerators);
                }
            }
        }
        let rows: Vec<Vec<bool>> = encoded.iter().map(|v| v.as_row()).collect();
        if gf2_rank(&rows, 2 * m) != generators.len() || generators.len() > m {
            return Err(TaperError::DependentGenerators);
        }
        Ok(SymmetryGroup { generators, m })
    }

    pub fn generators(&self) -> &[PauliTerm] {
        &self.generators
    }

    pub fn qubits(&self) -> usize {
        self.m
    }

    pub fn rank(&self) -> usize {
        self.generators.len()
    }
}

/// Generators of a maximal abelian subgroup of the group spanned by
/// `basis`, found by the grow-the-centralizer loop:
/// start from the center, then repeatedly adjoin the smallest element
/// (in the fixed enumeration order below) of the centralizer that is
/// not yet in the subgroup, until the centralizer equals the subgroup.
///
/// Enumeration order: a group element is a GF(2) combination of basis
/// vectors; combinations are ordered by the integer whose bit i is the
/// coefficient of `basis[i]`.
pub fn maximal_abelian_generators(
    basis: &[SymplecticVector],
) -> Result<SymmetryGroup, TaperError> {
    if basis.is_empty() {
        return Err(TaperError::EmptyGroup);
    }
    let m = basis[0].qubits();
    let d = basis.len();
    let rows: Vec<Vec<bool>> = basis.iter().map(|v| v.as_row()).collect();
    if gf2_rank(&rows, 2 * m) != d {
        return Err(TaperError::DependentBasis);
    }

    // Gram matrix of the symplectic form in basis coordinates.
    let mut gram = vec![vec![false; d]; d];
    for i in 0..d {
        for j in 0..d {
            gram[i][j] = symplectic_product(&basis[i], &basis[j])? == 1;
        }
    }
    let apply_gram = |c: &[bool]| -> Vec<bool> {
        (0..d)
            .map(|i| {
                c.iter()
                    .enumerate()
                    .fold(false, |acc, (j, &cj)| acc ^ (cj & gram[i][j]))
            })
            .collect()
    };

    // Subgroup A tracked as generator coefficient vectors plus an
    // echelon form for membership tests.
    let mut gens: Vec<Vec<bool>> = gf2_kernel(&gram, d); // the center
    let mut echelon = gf2_eliminate(gens.clone(), d).0;

    let in_span = |echelon: &[Vec<bool>], c: &[bool]| -> bool {
        let mut v = c.to_vec();
        for row in echelon {
            let lead = row.iter().position(|&b| b).expect("echelon rows nonzero");
            if v[lead] {
                for (dst, &src) in v.iter_mut().zip(row) {
                    *dst ^= src;
                }
            }
        }
        v.iter().all(|&b| !b)
    };

    loop {
        // Centralizer constraints: commute with every current generator.
        let constraints: Vec<Vec<bool>> = gens.iter().map(|g| apply_gram(g)).collect();
        let mut found = None;
        'scan: for t in 1u64..(1u64 << d) {
            let c: Vec<bool> = (0..d).map(|i| (t >> i) & 1 == 1).collect();
            for con in &constraints {
                let dot = c
                    .iter()
                    .zip(con)
                    .fold(false, |acc, (&a, &b)| acc ^ (a & b));
                if dot {
                    continue 'scan;
                }
            }
            if !in_span(&echelon, &c) {
                found = Some(c);
                break;
            }
        }
        match found {
            Some(c) => {
                gens.push(c);
                echelon = gf2_eliminate(gens.clone(), d).0;
            }
            None => break,
        }
    }

    let generators = gens
        .iter()
        .map(|c| {
            let mut acc = SymplecticVector::zero(m);
            for (i, &ci) in c.iter().enumerate() {
                if ci {
                    acc = acc.add(&basis[i])?;
                }
            }
            Ok(decode_symplectic(&acc))
        })
        .collect::<Result<Vec<_>, TaperError>>()?;
    SymmetryGroup::new(generators, m)
}

/// Search a Hamiltonian for its symmetry group: parity check, kernel,
/// maximal abelian subgroup. Returns `None` when the kernel is trivial.
pub fn find_symmetries(h: &PauliSum) -> Result<Option<SymmetryGroup>, TaperError> {
    let e = build_parity_check(h)?;
    let basis = kernel_basis(&e);
    if basis.is_empty() {
        return Ok(None);
    }
    maximal_abelian_generators(&basis).map(Some)
}

/// Replace the generator set by an equivalent one in which only
/// generator `i` (1-based) anti-commutes with the single-qubit operator
/// `rho` on qubit `q`: any other generator that anti-commutes is
/// multiplied by generator `i` (symplectic addition, phases ignored).
pub fn generator_transform(
    s: &SymmetryGroup,
    i: usize,
    q: usize,
    rho: Axis,
) -> Result<SymmetryGroup, TaperError> {
    if !matches!(rho, Axis::X | Axis::Z) {
        return Err(TaperError::BadAxis(rho.as_char()));
    }
    if i < 1 || i > s.rank() {
        return Err(TaperError::GeneratorOutOfRange { i, r: s.rank() });
    }
    let single = encode_symplectic(&PauliTerm::single(s.m, q, rho));
    let encoded: Vec<SymplecticVector> = s.generators.iter().map(encode_symplectic).collect();
    if symplectic_product(&encoded[i - 1], &single)? == 0 {
        return Err(TaperError::TransformPrecondition {
            i,
            q,
            rho: rho.as_char(),
        });
    }
    let pivot = encoded[i - 1].clone();
    let transformed = encoded
        .iter()
        .enumerate()
        .map(|(k, v)| {
            if k == i - 1 || symplectic_product(v, &single)? == 0 {
                Ok(decode_symplectic(v))
            } else {
                Ok(decode_symplectic(&v.add(&pivot)?))
            }
        })
        .collect::<Result<Vec<_>, TaperError>>()?;
    SymmetryGroup::new(transformed, s.m)
}

/// The (A_r, B_r, V_r) data: qubit indices q(i), axis labels rho(i) in
/// {X, Z} and the transformed generators tau_i, satisfying the
/// anti-commutation predicate checked by [`TaperTriple::predicate_holds`].
#[derive(Debug, Clone)]
pub struct TaperTriple {
    pub q: Vec<usize>,
    pub rho: Vec<Axis>,
    pub tau: Vec<PauliTerm>,
    m: usize,
}

impl TaperTriple {
    pub fn qubits(&self) -> usize {
        self.m
    }

    pub fn rank(&self) -> usize {
        self.q.len()
    }

    /// sigma^{rho(i)}_{q(i)} anti-commutes with tau_i and commutes with
    /// tau_j for j != i, verified exhaustively with symplectic products.
    pub fn predicate_holds(&self) -> bool {
        for (i, (&qi, &ri)) in self.q.iter().zip(&self.rho).enumerate() {
            let single = encode_symplectic(&PauliTerm::single(self.m, qi, ri));
            for (j, tau) in self.tau.iter().enumerate() {
                let bit = symplectic_product(&single, &encode_symplectic(tau))
                    .expect("equal qubit counts");
                if (bit == 1) != (i == j) {
                    return false;
                }
            }
        }
        true
    }
}

/// Build the triple by the constructive induction: at each step pick
/// the smallest qubit index not yet used on which the current generator
/// acts nontrivially, label it X when the generator carries Y or Z
/// there (Z when it carries X), and re-align the remaining generators
/// with [`generator_transform`].
pub fn build_taper_triple(s: &SymmetryGroup) -> Result<TaperTriple, TaperError> {
    let mut group = s.clone();
    let mut q = Vec::with_capacity(s.rank());
    let mut rho = Vec::with_capacity(s.rank());
    for n in 0..s.rank() {
        let tau = &group.generators[n];
        let j = (1..=s.m)
            .find(|&j| !q.contains(&j) && tau.axis_at(j) != Axis::I)
            .ok_or(TaperError::PredicateViolated)?;
        let label = match tau.axis_at(j) {
            Axis::X => Axis::Z,
            Axis::Y | Axis::Z => Axis::X,
            Axis::I => unreachable!(),
        };
        q.push(j);
        rho.push(label);
        group = generator_transform(&group, n + 1, j, label)?;
    }
    let triple = TaperTriple {
        q,
        rho,
        tau: group.generators,
        m: s.m,
    };
    if !triple.predicate_holds() {
        return Err(TaperError::PredicateViolated);
    }
    Ok(triple)
}

/// Dense unitary implementing a relabeling of qubits: bit at position
/// `p` (1-based) moves to position `perm[p-1]`.
fn qubit_permutation_unitary(perm: &[usize]) -> DMatrix<Complex64> {
    let m = perm.len();
    let dim = 1usize << m;
    let mut w = DMatrix::zeros(dim, dim);
    for col in 0..dim {
        let mut row = 0usize;
        for p in 1..=m {
            let bit = (col >> (m - p)) & 1;
            if bit == 1 {
                row |= 1 << (m - perm[p - 1]);
            }
        }
        w[(row, col)] = Complex64::new(1.0, 0.0);
    }
    w
}

/// The qubit relabeling used by [`build_unitary`]: transformed position
/// m-r+i is associated with original qubit q(i); the remaining qubits
/// keep their relative order in the leading block. `perm[p-1]` gives
/// the original qubit for transformed position p.
pub fn taper_permutation(t: &TaperTriple) -> Vec<usize> {
    let m = t.m;
    let r = t.rank();
    let mut perm = vec![0usize; m];
    for (i, &qi) in t.q.iter().enumerate() {
        perm[m - r + i] = qi;
    }
    let mut untapered: Vec<usize> = (1..=m).filter(|p| !t.q.contains(p)).collect();
    untapered.sort_unstable();
    for (slot, p) in untapered.into_iter().enumerate() {
        perm[slot] = p;
    }
    perm
}

/// Dense conjugating unitary built from per-generator factors
/// V_i = (sigma^{rho(i)}_{q(i)} + tau_i)/sqrt(2), a layer of Hadamards
/// on the Z-labeled qubits, and the relabeling W that moves qubit q(i)
/// into position m-r+i (tapered qubits form the trailing block):
///
/// ```text
/// U = V_1 ... V_r . (prod over rho(i)=Z of H_q(i)) . W
/// ```
///
/// For rho(i) = Z the adjacent pair V_i H_q(i) equals
/// 1/2 (Z_q(i) + tau_i)(Z_q(i) + X_q(i)). The Hadamard layer sits to
/// the right of all V factors rather than interleaved with them; the
/// interleaved product acquires spurious terms under conjugation
/// whenever some other generator carries Z on a Z-labeled qubit (e.g.
/// the group <XX, ZZ>), while this form satisfies
/// U sigma^x_{m-r+i} U^dag = tau_i for every predicate-satisfying
/// triple. The two coincide for all-Z-type generator sets.
pub fn build_unitary(t: &TaperTriple) -> Result<DMatrix<Complex64>, TaperError> {
    let m = t.m;
    if m > TAPER_QUBIT_LIMIT {
        return Err(TaperError::TooManyQubits {
            m,
            limit: TAPER_QUBIT_LIMIT,
        });
    }
    let inv_sqrt2 = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let mut u: DMatrix<Complex64> = DMatrix::identity(1usize << m, 1usize << m);
    for i in 0..t.rank() {
        let tau = t.tau[i].to_dense()?;
        let s_rho = PauliTerm::single(m, t.q[i], t.rho[i]).to_dense()?;
        u *= (s_rho + tau) * inv_sqrt2;
    }
    for i in 0..t.rank() {
        if t.rho[i] == Axis::Z {
            let sx = PauliTerm::single(m, t.q[i], Axis::X).to_dense()?;
            let sz = PauliTerm::single(m, t.q[i], Axis::Z).to_dense()?;
            u *= (sz + sx) * inv_sqrt2;
        }
    }
    let w = qubit_permutation_unitary(&taper_permutation(t));
    Ok(u * w)
}

/// A Hamiltonian with `r` qubits removed: the chosen +-1 sector, the
/// reduced operator on m-r qubits and the qubit relabeling that was
/// applied before the replacement.
#[derive(Debug, Clone)]
pub struct TaperedHamiltonian {
    pub sector: Vec<i8>,
    pub hamiltonian: PauliSum,
    pub permutation: Vec<usize>,
}

/// The sector-independent part of tapering: conjugate `h` by the
/// triple's unitary (dense route) and recover the Pauli form, after
/// checking that every term commutes with every generator. Every term
/// of the result carries only I or X on the trailing `r` positions.
fn conjugated_hamiltonian(h: &PauliSum, t: &TaperTriple) -> Result<PauliSum, TaperError> {
    let m = h.qubits();
    if m > TAPER_QUBIT_LIMIT {
        return Err(TaperError::TooManyQubits {
            m,
            limit: TAPER_QUBIT_LIMIT,
        });
    }
    for (axes, _) in h.iter() {
        let v = encode_symplectic(&PauliTerm::new(crate::pauli::Phase::ONE, axes.to_vec()));
        for tau in &t.tau {
            if symplectic_product(&v, &encode_symplectic(tau))? == 1 {
                let axes_str: String = axes.iter().map(|a| a.as_char()).collect();
                return Err(TaperError::NotASymmetry(axes_str, tau.axes_string()));
            }
        }
    }
    let u = build_unitary(t)?;
    let transformed = u.adjoint() * h.to_dense()? * &u;
    Ok(PauliSum::decompose_dense(&transformed, m)?)
}

/// Replace the trailing `r` positions of a conjugated Hamiltonian by
/// the sector signs, dropping those qubits.
fn replace_tapered_qubits(
    conjugated: &PauliSum,
    t: &TaperTriple,
    sector: &[i8],
) -> Result<TaperedHamiltonian, TaperError> {
    let r = t.rank();
    if sector.len() != r {
        return Err(TaperError::SectorLength {
            got: sector.len(),
            expected: r,
        });
    }
    if sector.iter().any(|&s| s != 1 && s != -1) {
        return Err(TaperError::SectorSign);
    }
    let kept = conjugated.qubits() - r;
    let mut reduced = PauliSum::new(kept);
    for (axes, coeff) in conjugated.iter() {
        let mut c = coeff;
        for (i, &axis) in axes[kept..].iter().enumerate() {
            match axis {
                Axis::I => {}
                Axis::X => c *= Complex64::new(sector[i] as f64, 0.0),
                Axis::Y | Axis::Z => {
                    let axes_str: String = axes.iter().map(|a| a.as_char()).collect();
                    return Err(TaperError::ResidualOnTaperedQubit(axes_str));
                }
            }
        }
        let head: String = axes[..kept].iter().map(|a| a.as_char()).collect();
        reduced.add_str(&head, c)?;
    }
    reduced.prune();
    Ok(TaperedHamiltonian {
        sector: sector.to_vec(),
        hamiltonian: reduced,
        permutation: taper_permutation(t),
    })
}

/// Conjugate `h` by the triple's unitary and replace the trailing `r`
/// qubits by the sector signs. Every term of `h` must commute with
/// every generator; the transformed terms must carry only I or X on the
/// tapered positions (anything else is an internal-consistency error).
pub fn taper(
    h: &PauliSum,
    t: &TaperTriple,
    sector: &[i8],
) -> Result<TaperedHamiltonian, TaperError> {
    let conjugated = conjugated_hamiltonian(h, t)?;
    replace_tapered_qubits(&conjugated, t, sector)
}

/// Enumerate all 2^r sectors in lexicographic order (+ before -),
/// exact-solve each tapered Hamiltonian and return the sector with the
/// minimal ground energy (ties go to the lexicographically smallest).
/// The dense conjugation runs once; only the sign replacement and the
/// eigensolve repeat per sector.
pub fn select_ground_sector(
    h: &PauliSum,
    t: &TaperTriple,
) -> Result<(Vec<i8>, TaperedHamiltonian), TaperError> {
    let r = t.rank();
    let conjugated = conjugated_hamiltonian(h, t)?;
    let mut best: Option<(f64, Vec<i8>, TaperedHamiltonian)> = None;
    for code in 0..(1usize << r) {
        let sector: Vec<i8> = (0..r)
            .map(|i| if (code >> (r - 1 - i)) & 1 == 0 { 1 } else { -1 })
            .collect();
        let tapered = replace_tapered_qubits(&conjugated, t, &sector)?;
        let energy = if tapered.hamiltonian.is_empty() {
            0.0
        } else {
            solver::ground_energy(&tapered.hamiltonian)?.ground_energy
        };
        if best.as_ref().is_none_or(|(e, _, _)| energy < *e) {
            best = Some((energy, sector, tapered));
        }
    }
    let (_, sector, tapered) = best.expect("at least one sector");
    Ok((sector, tapered))
}
