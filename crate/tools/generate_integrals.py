#!/usr/bin/env python3
"""Generate molecular-integral fixture files for the VQE toolkit.

Evaluates STO-3G one- and two-electron integrals with a small
McMurchie-Davidson engine, orthogonalizes the atomic orbitals
symmetrically (Lowdin, S^-1/2), expands to spin orbitals with the
interleaved convention (odd 1-based modes = spin up), and writes the
JSON schema consumed by `vqe-core`:

    { "n_spin_orbitals": m, "V_nn": x, "h_pq": [[...]],
      "h_pqrs": [[[[...]]]], "metadata": {...},
      "reference_ground_energy": e }

The reference ground energy is the minimum eigenvalue of the
second-quantized Hamiltonian over the whole Fock space, computed here
by direct ladder-operator action on occupation-number states (fermionic
signs, no qubit mapping) -- an oracle independent of the Rust code.

Run once to (re)build the files under fixtures/:

    python3 tools/generate_integrals.py

Requires numpy and scipy only.
"""

import json
import math
import os
import sys

import numpy as np
from scipy.special import hyp1f1

ANGSTROM_TO_BOHR = 1.0 / 0.52917721092

# ---------------------------------------------------------------------------
# STO-3G basis data (standard published exponents / contraction coefficients)
# ---------------------------------------------------------------------------

STO3G = {
    "H": [
        ("s", [3.42525091, 0.62391373, 0.16885540],
              [0.15432897, 0.53532814, 0.44463454]),
    ],
    "Li": [
        ("s", [16.1195750, 2.9362007, 0.7946505],
              [0.15432897, 0.53532814, 0.44463454]),
        ("s", [0.6362897, 0.1478601, 0.0480887],
              [-0.09996723, 0.39951283, 0.70011547]),
        ("p", [0.6362897, 0.1478601, 0.0480887],
              [0.15591627, 0.60768372, 0.39195739]),
    ],
}

CHARGES = {"H": 1, "Li": 3}


class Gaussian:
    """A contracted Cartesian Gaussian basis function."""

    def __init__(self, center, lmn, exps, coefs):
        self.center = np.asarray(center, dtype=float)
        self.lmn = tuple(lmn)
        self.exps = list(exps)
        self.coefs = list(coefs)
        self._normalize()

    def _normalize(self):
        l, m, n = self.lmn
        total = l + m + n
        # primitive norms
        fact = (dfact(2 * l - 1) * dfact(2 * m - 1) * dfact(2 * n - 1))
        self.norms = [
            (2.0 * a / math.pi) ** 0.75 * (4.0 * a) ** (total / 2.0) / math.sqrt(fact)
            for a in self.exps
        ]
        # contraction norm from the self-overlap of the contracted function
        pref = math.pi ** 1.5 * fact / 2.0 ** total
        s = 0.0
        for ia, a in enumerate(self.exps):
            for ib, b in enumerate(self.exps):
                s += (self.coefs[ia] * self.coefs[ib] * self.norms[ia] * self.norms[ib]
                      * pref / (a + b) ** (total + 1.5))
        scale = 1.0 / math.sqrt(s)
        self.coefs = [c * scale for c in self.coefs]


def dfact(n):
    return 1 if n <= 0 else n * dfact(n - 2)


# ---------------------------------------------------------------------------
# McMurchie-Davidson primitives
# ---------------------------------------------------------------------------

def hermite_e(i, j, t, qx, a, b):
    """Hermite expansion coefficient E_t^{ij} for a primitive pair."""
    p = a + b
    q = a * b / p
    if t < 0 or t > i + j:
        return 0.0
    if i == j == t == 0:
        return math.exp(-q * qx * qx)
    if j == 0:
        return (hermite_e(i - 1, j, t - 1, qx, a, b) / (2.0 * p)
                - q * qx / a * hermite_e(i - 1, j, t, qx, a, b)
                + (t + 1) * hermite_e(i - 1, j, t + 1, qx, a, b))
    return (hermite_e(i, j - 1, t - 1, qx, a, b) / (2.0 * p)
            + q * qx / b * hermite_e(i, j - 1, t, qx, a, b)
            + (t + 1) * hermite_e(i, j - 1, t + 1, qx, a, b))


def boys(n, x):
    return hyp1f1(n + 0.5, n + 1.5, -x) / (2.0 * n + 1.0)


def hermite_coulomb(t, u, v, n, p, pc):
    """Hermite Coulomb auxiliary integral R_{tuv}^n."""
    if t == u == v == 0:
        r2 = pc[0] * pc[0] + pc[1] * pc[1] + pc[2] * pc[2]
        return (-2.0 * p) ** n * boys(n, p * r2)
    if t > 0:
        val = 0.0
        if t > 1:
            val += (t - 1) * hermite_coulomb(t - 2, u, v, n + 1, p, pc)
        val += pc[0] * hermite_coulomb(t - 1, u, v, n + 1, p, pc)
        return val
    if u > 0:
        val = 0.0
        if u > 1:
            val += (u - 1) * hermite_coulomb(t, u - 2, v, n + 1, p, pc)
        val += pc[1] * hermite_coulomb(t, u - 1, v, n + 1, p, pc)
        return val
    val = 0.0
    if v > 1:
        val += (v - 1) * hermite_coulomb(t, u, v - 2, n + 1, p, pc)
    val += pc[2] * hermite_coulomb(t, u, v - 1, n + 1, p, pc)
    return val


def prim_overlap(a, lmn1, ca, b, lmn2, cb):
    p = a + b
    s = (math.pi / p) ** 1.5
    for k in range(3):
        s *= hermite_e(lmn1[k], lmn2[k], 0, ca[k] - cb[k], a, b)
    return s


def prim_kinetic(a, lmn1, ca, b, lmn2, cb):
    l2, m2, n2 = lmn2
    term0 = b * (2 * (l2 + m2 + n2) + 3) * prim_overlap(a, lmn1, ca, b, lmn2, cb)
    term1 = -2.0 * b * b * (
        prim_overlap(a, lmn1, ca, b, (l2 + 2, m2, n2), cb)
        + prim_overlap(a, lmn1, ca, b, (l2, m2 + 2, n2), cb)
        + prim_overlap(a, lmn1, ca, b, (l2, m2, n2 + 2), cb))
    term2 = -0.5 * (
        l2 * (l2 - 1) * prim_overlap(a, lmn1, ca, b, (l2 - 2, m2, n2), cb)
        + m2 * (m2 - 1) * prim_overlap(a, lmn1, ca, b, (l2, m2 - 2, n2), cb)
        + n2 * (n2 - 1) * prim_overlap(a, lmn1, ca, b, (l2, m2, n2 - 2), cb))
    return term0 + term1 + term2


def prim_nuclear(a, lmn1, ca, b, lmn2, cb, rc):
    p = a + b
    pcen = (a * ca + b * cb) / p
    pc = pcen - rc
    val = 0.0
    for t in range(lmn1[0] + lmn2[0] + 1):
        et = hermite_e(lmn1[0], lmn2[0], t, ca[0] - cb[0], a, b)
        for u in range(lmn1[1] + lmn2[1] + 1):
            eu = hermite_e(lmn1[1], lmn2[1], u, ca[1] - cb[1], a, b)
            for v in range(lmn1[2] + lmn2[2] + 1):
                ev = hermite_e(lmn1[2], lmn2[2], v, ca[2] - cb[2], a, b)
                val += et * eu * ev * hermite_coulomb(t, u, v, 0, p, pc)
    return 2.0 * math.pi / p * val


def prim_eri(a, lmn1, ca, b, lmn2, cb, c, lmn3, cc, d, lmn4, cd):
    p = a + b
    q = c + d
    alpha = p * q / (p + q)
    pcen = (a * ca + b * cb) / p
    qcen = (c * cc + d * cd) / q
    pq = pcen - qcen
    val = 0.0
    for t in range(lmn1[0] + lmn2[0] + 1):
        e1t = hermite_e(lmn1[0], lmn2[0], t, ca[0] - cb[0], a, b)
        for u in range(lmn1[1] + lmn2[1] + 1):
            e1u = hermite_e(lmn1[1], lmn2[1], u, ca[1] - cb[1], a, b)
            for v in range(lmn1[2] + lmn2[2] + 1):
                e1v = hermite_e(lmn1[2], lmn2[2], v, ca[2] - cb[2], a, b)
                for tau in range(lmn3[0] + lmn4[0] + 1):
                    e2t = hermite_e(lmn3[0], lmn4[0], tau, cc[0] - cd[0], c, d)
                    for nu in range(lmn3[1] + lmn4[1] + 1):
                        e2u = hermite_e(lmn3[1], lmn4[1], nu, cc[1] - cd[1], c, d)
                        for phi in range(lmn3[2] + lmn4[2] + 1):
                            e2v = hermite_e(lmn3[2], lmn4[2], phi, cc[2] - cd[2], c, d)
                            val += (e1t * e1u * e1v * e2t * e2u * e2v
                                    * (-1.0) ** (tau + nu + phi)
                                    * hermite_coulomb(t + tau, u + nu, v + phi,
                                                      0, alpha, pq))
    return val * 2.0 * math.pi ** 2.5 / (p * q * math.sqrt(p + q))


def contracted(fn, g1, g2, *rest):
    total = 0.0
    for a, ca, na in zip(g1.exps, g1.coefs, g1.norms):
        for b, cb, nb in zip(g2.exps, g2.coefs, g2.norms):
            total += ca * na * cb * nb * fn(a, g1.lmn, g1.center,
                                            b, g2.lmn, g2.center, *rest)
    return total


def contracted_eri(g1, g2, g3, g4):
    total = 0.0
    for a, c1, n1 in zip(g1.exps, g1.coefs, g1.norms):
        for b, c2, n2 in zip(g2.exps, g2.coefs, g2.norms):
            for c, c3, n3 in zip(g3.exps, g3.coefs, g3.norms):
                for d, c4, n4 in zip(g4.exps, g4.coefs, g4.norms):
                    total += (c1 * n1 * c2 * n2 * c3 * n3 * c4 * n4
                              * prim_eri(a, g1.lmn, g1.center, b, g2.lmn, g2.center,
                                         c, g3.lmn, g3.center, d, g4.lmn, g4.center))
    return total


# ---------------------------------------------------------------------------
# Molecule -> orthogonalized spatial integrals
# ---------------------------------------------------------------------------

def build_basis(atoms, keep_p=("x", "y", "z")):
    """Contracted functions for a list of (element, xyz-bohr) atoms.

    `keep_p` selects which p components to retain (the fixtures for a
    molecule aligned on the x axis keep only 'x').
    """
    fns = []
    labels = []
    pdir = {"x": (1, 0, 0), "y": (0, 1, 0), "z": (0, 0, 1)}
    for el, xyz in atoms:
        for ishell, (kind, exps, coefs) in enumerate(STO3G[el]):
            if kind == "s":
                fns.append(Gaussian(xyz, (0, 0, 0), exps, coefs))
                labels.append(f"{el} {ishell + 1}s")
            else:
                for comp in keep_p:
                    fns.append(Gaussian(xyz, pdir[comp], exps, coefs))
                    labels.append(f"{el} 2p{comp}")
    return fns, labels


def ao_integrals(atoms, basis):
    n = len(basis)
    smat = np.zeros((n, n))
    hcore = np.zeros((n, n))
    for i in range(n):
        for j in range(n):
            smat[i, j] = contracted(prim_overlap, basis[i], basis[j])
            hcore[i, j] = contracted(prim_kinetic, basis[i], basis[j])
            for el, xyz in atoms:
                hcore[i, j] -= CHARGES[el] * contracted(
                    prim_nuclear, basis[i], basis[j], np.asarray(xyz))
    eri = np.zeros((n, n, n, n))
    for i in range(n):
        for j in range(i + 1):
            for k in range(n):
                for l in range(k + 1):
                    if (i * (i + 1) // 2 + j) < (k * (k + 1) // 2 + l):
                        continue
                    v = contracted_eri(basis[i], basis[j], basis[k], basis[l])
                    for (p, q, r, s) in {(i, j, k, l), (j, i, k, l), (i, j, l, k),
                                         (j, i, l, k), (k, l, i, j), (l, k, i, j),
                                         (k, l, j, i), (l, k, j, i)}:
                        eri[p, q, r, s] = v
    return smat, hcore, eri


def nuclear_repulsion(atoms):
    v = 0.0
    for i, (el1, r1) in enumerate(atoms):
        for el2, r2 in atoms[i + 1:]:
            v += CHARGES[el1] * CHARGES[el2] / np.linalg.norm(np.asarray(r1) - np.asarray(r2))
    return v


def lowdin(smat):
    w, u = np.linalg.eigh(smat)
    return u @ np.diag(w ** -0.5) @ u.T


def orthogonalize(smat, hcore, eri):
    x = lowdin(smat)
    h = x.T @ hcore @ x
    g = np.einsum("pi,qj,pqrs,rk,sl->ijkl", x, x, eri, x, x, optimize=True)
    return h, g


def rhf_energy(hcore, eri, smat, n_elec, v_nn, iters=200):
    """Closed-shell SCF, for provenance logging only."""
    n = hcore.shape[0]
    x = lowdin(smat)
    f = hcore.copy()
    dm = np.zeros((n, n))
    e_old = 0.0
    for _ in range(iters):
        fo = x.T @ f @ x
        _, co = np.linalg.eigh(fo)
        c = x @ co
        cocc = c[:, : n_elec // 2]
        dm = 2.0 * cocc @ cocc.T
        j = np.einsum("pqrs,rs->pq", eri, dm)
        k = np.einsum("prqs,rs->pq", eri, dm)
        f = hcore + j - 0.5 * k
        e = 0.5 * np.sum(dm * (hcore + f)) + v_nn
        if abs(e - e_old) < 1e-12:
            break
        e_old = e
    return e


# ---------------------------------------------------------------------------
# Spin-orbital tensors and the Fock-space oracle
# ---------------------------------------------------------------------------

def spin_orbital_tensors(h_spatial, g_spatial):
    """Interleave spins: spatial k -> modes 2k (up) and 2k+1 (down), 0-based.

    Two-body tensor convention: coefficient of a+_p a+_q a_r a_s is
    (sp(p) sp(s) | sp(q) sp(r)) when the spins pair p with s and q with r.
    """
    n = h_spatial.shape[0]
    m = 2 * n
    hpq = np.zeros((m, m))
    hpqrs = np.zeros((m, m, m, m))
    for p in range(m):
        for q in range(m):
            if p % 2 == q % 2:
                hpq[p, q] = h_spatial[p // 2, q // 2]
    for p in range(m):
        for q in range(m):
            for r in range(m):
                for s in range(m):
                    if p % 2 == s % 2 and q % 2 == r % 2:
                        hpqrs[p, q, r, s] = g_spatial[p // 2, s // 2, q // 2, r // 2]
    return hpq, hpqrs


def apply_ladders(state_vec, ops, m):
    """Apply a string of (mode, dagger) ops, rightmost first, with signs."""
    vec = dict(state_vec)
    for mode, dag in reversed(ops):
        nxt = {}
        for occ, amp in vec.items():
            bit = (occ >> mode) & 1
            if dag == (bit == 1):
                continue  # annihilated
            sign = (-1) ** bin(occ & ((1 << mode) - 1)).count("1")
            nxt[occ ^ (1 << mode)] = nxt.get(occ ^ (1 << mode), 0.0) + sign * amp
        vec = nxt
        if not vec:
            break
    return vec


def fock_ground_energy(v_nn, hpq, hpqrs, tol=1e-12):
    """Dense Fock-space diagonalization via occupation-number ladder action."""
    m = hpq.shape[0]
    dim = 1 << m
    ham = np.zeros((dim, dim))
    one_terms = [(p, q, hpq[p, q]) for p in range(m) for q in range(m)
                 if abs(hpq[p, q]) > tol]
    two_terms = [(p, q, r, s, hpqrs[p, q, r, s])
                 for p in range(m) for q in range(m)
                 for r in range(m) for s in range(m)
                 if abs(hpqrs[p, q, r, s]) > tol]
    for col in range(dim):
        ham[col, col] += v_nn
        for p, q, c in one_terms:
            out = apply_ladders({col: 1.0}, [(p, True), (q, False)], m)
            for row, amp in out.items():
                ham[row, col] += c * amp
        for p, q, r, s, c in two_terms:
            out = apply_ladders(
                {col: 1.0}, [(p, True), (q, True), (r, False), (s, False)], m)
            for row, amp in out.items():
                ham[row, col] += 0.5 * c * amp
    evals = np.linalg.eigvalsh(ham)
    return float(evals[0])


# ---------------------------------------------------------------------------
# Fixture assembly
# ---------------------------------------------------------------------------

def make_fixture(name, atoms_angstrom, keep_p, n_elec, outdir, note):
    atoms = [(el, np.asarray(xyz) * ANGSTROM_TO_BOHR) for el, xyz in atoms_angstrom]
    basis, labels = build_basis(atoms, keep_p)
    smat, hcore, eri = ao_integrals(atoms, basis)
    v_nn = nuclear_repulsion(atoms)
    e_hf = rhf_energy(hcore, eri, smat, n_elec, v_nn)
    h_orth, g_orth = orthogonalize(smat, hcore, eri)
    hpq, hpqrs = spin_orbital_tensors(h_orth, g_orth)
    e_ref = fock_ground_energy(v_nn, hpq, hpqrs)
    m = hpq.shape[0]
    data = {
        "n_spin_orbitals": m,
        "V_nn": v_nn,
        "h_pq": hpq.tolist(),
        "h_pqrs": hpqrs.tolist(),
        "metadata": {
            "molecule": note,
            "geometry_angstrom": [[el, list(map(float, xyz))] for el, xyz in atoms_angstrom],
            "basis": "STO-3G, symmetrically orthogonalized atomic orbitals",
            "orbitals": labels,
            "spin_convention": "interleaved: odd 1-based modes spin-up, even spin-down",
            "n_electrons": n_elec,
            "scf_energy": e_hf,
            "generator": "tools/generate_integrals.py (McMurchie-Davidson, numpy/scipy)",
        },
        "reference_ground_energy": e_ref,
    }
    path = os.path.join(outdir, name)
    with open(path, "w") as fh:
        json.dump(data, fh, indent=1)
    print(f"{name}: m={m}  V_nn={v_nn:.8f}  E_HF={e_hf:.8f}  E_ref={e_ref:.10f}")
    return e_ref


def main():
    outdir = os.path.join(os.path.dirname(os.path.abspath(__file__)), "..", "fixtures")
    os.makedirs(outdir, exist_ok=True)

    # H2 separations: 0.392 A to 0.931 A in steps of 0.049 A (12 points,
    # includes the 0.735 A near-equilibrium point).
    for k in range(12):
        d = 0.392 + 0.049 * k
        make_fixture(
            f"h2_sto3g_d{d:.3f}.json",
            [("H", (0.0, 0.0, 0.0)), ("H", (d, 0.0, 0.0))],
            keep_p=(),
            n_elec=2,
            outdir=outdir,
            note=f"H2 at {d:.3f} A",
        )

    # LiH on the x axis: Li 1s/2s/2px + H 1s -> 8 spin orbitals.
    for d in (1.595,):
        make_fixture(
            f"lih_sto3g_d{d:.3f}.json",
            [("Li", (0.0, 0.0, 0.0)), ("H", (d, 0.0, 0.0))],
            keep_p=("x",),
            n_elec=4,
            outdir=outdir,
            note=f"LiH at {d:.3f} A (Li 1s,2s,2px + H 1s)",
        )


if __name__ == "__main__":
    sys.setrecursionlimit(10000)
    main()
