"""Regenerate the molecular fixture files under tests/fixtures.

Requires numpy and pyscf. Writes, per geometry:

  <mol>_<label>.fermion  spin-orbital integrals as "1B p q v" / "2B p q r s v" lines for
                         H = sum h_pq c+_p c_q + 1/2 sum h_pqrs c+_p c+_q c_r c_s
  <mol>_<label>.qubit    the same operator as a Pauli sum, obtained by building the
                         Fock-space matrix from occupation-number rules and projecting
                         onto every Pauli word (no Jordan-Wigner strings involved)

Spin orbital 2k is orbital k spin up, 2k+1 spin down. Qubit 0 is the leftmost
character of a word and the most significant bit of a basis index. The nuclear
repulsion constant is omitted from both files.
"""
import itertools
import sys
from pathlib import Path

import numpy as np
from pyscf import ao2mo, gto, scf

OUT = Path(sys.argv[1] if len(sys.argv) > 1 else "tests/fixtures")


def spin_orbital_integrals(atoms, basis):
    mol = gto.M(atom=atoms, basis=basis, unit="Angstrom", verbose=0)
    mf = scf.RHF(mol).run()
    c = mf.mo_coeff
    h1 = c.T @ mf.get_hcore() @ c
    norb = h1.shape[0]
    eri = ao2mo.restore(1, ao2mo.kernel(mol, c), norb)  # chemist (ij|kl)
    n = 2 * norb
    one = np.zeros((n, n))
    two = np.zeros((n, n, n, n))
    for p, q in itertools.product(range(n), repeat=2):
        if p % 2 == q % 2:
            one[p, q] = h1[p // 2, q // 2]
    # c+_p c+_q c_r c_s with physicist <pq|sr> = (ps|qr)
    for p, q, r, s in itertools.product(range(n), repeat=4):
        if p % 2 == s % 2 and q % 2 == r % 2:
            two[p, q, r, s] = eri[p // 2, s // 2, q // 2, r // 2]
    return one, two


def occupation(state, p, n):
    return (state >> (n - 1 - p)) & 1


def apply_annihilate(state, p, n):
    if not occupation(state, p, n):
        return None, 0
    sign = (-1) ** sum(occupation(state, j, n) for j in range(p))
    return state ^ (1 << (n - 1 - p)), sign


def apply_create(state, p, n):
    if occupation(state, p, n):
        return None, 0
    sign = (-1) ** sum(occupation(state, j, n) for j in range(p))
    return state ^ (1 << (n - 1 - p)), sign


def fock_matrix(one, two):
    n = one.shape[0]
    dim = 1 << n
    h = np.zeros((dim, dim))

    def apply_string(state, ops):
        sign = 1
        for kind, p in reversed(ops):
            state, s = (apply_create if kind == "+" else apply_annihilate)(state, p, n)
            if state is None:
                return None, 0
            sign *= s
        return state, sign

    for col in range(dim):
        for (p, q), v in np.ndenumerate(one):
            if v:
                row, s = apply_string(col, [("+", p), ("-", q)])
                if row is not None:
                    h[row, col] += v * s
        for (p, q, r, s_), v in np.ndenumerate(two):
            if v:
                row, s = apply_string(col, [("+", p), ("+", q), ("-", r), ("-", s_)])
                if row is not None:
                    h[row, col] += 0.5 * v * s
    return h


def pauli_decompose(h):
    dim = h.shape[0]
    n = int(np.log2(dim))
    basis = np.arange(dim)
    rows = []
    for word in itertools.product("IXYZ", repeat=n):
        flip = sum(1 << (n - 1 - q) for q, a in enumerate(word) if a in "XY")
        zmask = sum(1 << (n - 1 - q) for q, a in enumerate(word) if a in "YZ")
        ny = word.count("Y")
        # P|b> = i^ny (-1)^{popcount(b & zmask)} |b ^ flip>, so Tr(P h) = sum_b P[b^flip, b] h[b, b^flip]
        parity = np.array([bin(b & zmask).count("1") & 1 for b in basis])
        c = (1j**ny) * np.sum((-1.0) ** parity * h[basis, basis ^ flip]) / dim
        if abs(c) > 1e-12:
            assert abs(c.imag) < 1e-10, (word, c)
            rows.append(("".join(word), c.real))
    return rows


def write(mol, label, atoms, basis, with_qubit=True):
    one, two = spin_orbital_integrals(atoms, basis)
    n = one.shape[0]
    lines = [f"# {mol} {basis} R={label} A, {n} spin orbitals"]
    for (p, q), v in np.ndenumerate(one):
        if abs(v) > 1e-12:
            lines.append(f"1B {p} {q} {v:.17g}")
    for (p, q, r, s), v in np.ndenumerate(two):
        if abs(v) > 1e-12:
            lines.append(f"2B {p} {q} {r} {s} {v:.17g}")
    (OUT / f"{mol}_{label}.fermion").write_text("\n".join(lines) + "\n")
    if not with_qubit:
        return
    rows = pauli_decompose(fock_matrix(one, two))
    text = [f"# {mol} {basis} R={label} A, Pauli decomposition of the Fock-space matrix"]
    text += [f"{c:.17g} {w}" for w, c in rows]
    (OUT / f"{mol}_{label}.qubit").write_text("\n".join(text) + "\n")


if __name__ == "__main__":
    OUT.mkdir(parents=True, exist_ok=True)
    for r in ["0.50", "0.74", "1.00", "1.50", "2.00"]:
        write("h2", r, [("H", (0, 0, 0)), ("H", (0, 0, float(r)))], "sto-3g")
    for r in ["2.50", "3.00"]:
        write("he2", r, [("He", (0, 0, 0)), ("He", (0, 0, float(r)))], "6-31g")
