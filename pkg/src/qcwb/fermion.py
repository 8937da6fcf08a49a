"""Active-space integrals, FCIDUMP I/O and the Jordan-Wigner mapping.

Spin orbitals are spin-blocked: qubits ``0 .. n-1`` hold the alpha spin
orbitals of spatial orbitals ``0 .. n-1`` (ascending energy) and qubits
``n .. 2n-1`` the beta ones. With this layout the closed-shell (2/2)
reference reads ``0101``.
"""

from __future__ import annotations

import re
from collections import defaultdict
from dataclasses import dataclass
from itertools import product
from pathlib import Path

import numpy as np

from .operators import PauliSum, PauliTerm, masks_to_label, simplify

SYMMETRY_TOL = 1e-10


@dataclass(frozen=True)
class MolecularIntegrals:
    """One- and two-body integrals of an active space (Hartree).

    ``two_body[p, q, r, s]`` is the chemist-notation integral ``(pq|rs)``.
    """

    n_spatial: int
    n_electrons: int
    core_energy: float
    one_body: np.ndarray
    two_body: np.ndarray

    def __post_init__(self):
        n = self.n_spatial
        h = np.asarray(self.one_body, dtype=float)
        g = np.asarray(self.two_body, dtype=float)
        if h.shape != (n, n) or g.shape != (n, n, n, n):
            raise ValueError(f"integral shapes {h.shape}, {g.shape} do not match n_spatial={n}")
        if not 0 < self.n_electrons <= 2 * n:
            raise ValueError(f"n_electrons={self.n_electrons} outside (0, {2 * n}]")
        if not np.allclose(h, h.T, atol=SYMMETRY_TOL, rtol=0):
            raise ValueError("one-body integrals are not symmetric")
        for perm in ((1, 0, 2, 3), (0, 1, 3, 2), (2, 3, 0, 1)):
            if not np.allclose(g, g.transpose(perm), atol=SYMMETRY_TOL, rtol=0):
                raise ValueError("two-body integrals lack 8-fold symmetry")
        object.__setattr__(self, "one_body", h)
        object.__setattr__(self, "two_body", g)
        object.__setattr__(self, "core_energy", float(self.core_energy))

    @property
    def n_qubits(self) -> int:
        return 2 * self.n_spatial


@dataclass(frozen=True)
class OccupationState:
    """Occupation bitmask over spin orbitals; bit ``q`` is qubit ``q``."""

    bits: int
    n_qubits: int

    def __post_init__(self):
        if self.bits < 0 or self.bits >> self.n_qubits:
            raise ValueError(f"bits {self.bits:b} do not fit in {self.n_qubits} qubits")

    @property
    def n_particles(self) -> int:
        return self.bits.bit_count()

    def occupied(self) -> list[int]:
        return [q for q in range(self.n_qubits) if self.bits >> q & 1]

    def bitstring(self) -> str:
        return format(self.bits, f"0{self.n_qubits}b")

    def __str__(self):
        return self.bitstring()


def hf_state(n_electrons: int, n_spatial: int) -> OccupationState:
    """Aufbau filling: ``ceil(n/2)`` alpha and ``floor(n/2)`` beta orbitals."""
    if not 0 <= n_electrons <= 2 * n_spatial:
        raise ValueError(f"{n_electrons} electrons do not fit in {n_spatial} spatial orbitals")
    n_alpha = (n_electrons + 1) // 2
    n_beta = n_electrons // 2
    bits = (1 << n_alpha) - 1
    bits |= ((1 << n_beta) - 1) << n_spatial
    return OccupationState(bits, 2 * n_spatial)


# -- FCIDUMP -----------------------------------------------------------------

_HEADER_KEY = re.compile(r"(\w+)\s*=\s*([^,&/]*)")


class FcidumpError(ValueError):
    pass


def _symmetric_slots(p, q, r, s):
    return {(p, q, r, s), (q, p, r, s), (p, q, s, r), (q, p, s, r),
            (r, s, p, q), (s, r, p, q), (r, s, q, p), (s, r, q, p)}


def parse_fcidump(text: str, source: str = "<fcidump>") -> MolecularIntegrals:
    """Parse the FCIDUMP subset: ``NORB``/``NELEC`` header, then ``value p q r s`` lines.

    Indices are 1-based. ``value p q 0 0`` is a one-body element and
    ``value 0 0 0 0`` the core energy. Entries are mirrored into every
    symmetry-equivalent slot. Orbital-energy lines (``value p 0 0 0``) are
    accepted and ignored.
    """
    lines = text.splitlines()
    header = []
    body_start = None
    for i, line in enumerate(lines):
        header.append(line)
        if re.search(r"&END|^\s*/\s*$", line, flags=re.IGNORECASE):
            body_start = i + 1
            break
    if body_start is None:
        raise FcidumpError(f"{source}: missing &END terminating the header")
    fields = dict((k.upper(), v.strip()) for k, v in _HEADER_KEY.findall(" ".join(header)))
    try:
        norb = int(fields["NORB"])
        nelec = int(fields["NELEC"])
    except (KeyError, ValueError):
        raise FcidumpError(f"{source}: header must declare integer NORB and NELEC") from None

    h = np.zeros((norb, norb))
    g = np.zeros((norb,) * 4)
    h_set = np.zeros((norb, norb), dtype=bool)
    g_set = np.zeros((norb,) * 4, dtype=bool)
    core = 0.0
    core_seen = False

    def store(arr, mask, slots, value, lineno):
        for slot in slots:
            if mask[slot] and abs(arr[slot] - value) > SYMMETRY_TOL:
                raise FcidumpError(
                    f"{source}:{lineno}: conflicting duplicate entry at {tuple(i + 1 for i in slot)}")
            arr[slot] = value
            mask[slot] = True

    for lineno, line in enumerate(lines[body_start:], body_start + 1):
        parts = line.split()
        if not parts:
            continue
        if len(parts) != 5:
            raise FcidumpError(f"{source}:{lineno}: expected 'value p q r s', got {line.strip()!r}")
        try:
            value = float(parts[0].replace("D", "E").replace("d", "e"))
            p, q, r, s = (int(x) for x in parts[1:])
        except ValueError:
            raise FcidumpError(f"{source}:{lineno}: malformed line {line.strip()!r}") from None
        if any(not 0 <= i <= norb for i in (p, q, r, s)):
            raise FcidumpError(f"{source}:{lineno}: orbital index out of range 1..{norb}")
        if p == q == r == s == 0:
            if core_seen and abs(core - value) > SYMMETRY_TOL:
                raise FcidumpError(f"{source}:{lineno}: conflicting core energy")
            core, core_seen = value, True
        elif r == s == 0 and p and q:
            store(h, h_set, {(p - 1, q - 1), (q - 1, p - 1)}, value, lineno)
        elif q == r == s == 0:
            continue
        elif p and q and r and s:
            store(g, g_set, _symmetric_slots(p - 1, q - 1, r - 1, s - 1), value, lineno)
        else:
            raise FcidumpError(f"{source}:{lineno}: invalid index pattern {p} {q} {r} {s}")
    try:
        return MolecularIntegrals(norb, nelec, core, h, g)
    except ValueError as exc:
        raise FcidumpError(f"{source}: {exc}") from None


def read_fcidump(path: str | Path) -> MolecularIntegrals:
    path = Path(path)
    return parse_fcidump(path.read_text(), source=str(path))


def write_fcidump(mi: MolecularIntegrals, tol: float = 1e-15) -> str:
    """Serialize with one entry per symmetry class (``p>=q, r>=s, pq>=rs``)."""
    n = mi.n_spatial
    out = [f" &FCI NORB={n:d},NELEC={mi.n_electrons:d},MS2=0,",
           "  ORBSYM=" + "1," * n, "  ISYM=1,", " &END"]
    for p in range(n):
        for q in range(p + 1):
            for r in range(n):
                for s in range(r + 1):
                    if p * (p + 1) // 2 + q < r * (r + 1) // 2 + s:
                        continue
                    v = mi.two_body[p, q, r, s]
                    if abs(v) > tol:
                        out.append(f"{float(v)!r} {p + 1} {q + 1} {r + 1} {s + 1}")
    for p in range(n):
        for q in range(p + 1):
            v = mi.one_body[p, q]
            if abs(v) > tol:
                out.append(f"{float(v)!r} {p + 1} {q + 1} 0 0")
    out.append(f"{mi.core_energy!r} 0 0 0 0")
    return "\n".join(out) + "\n"


# -- Jordan-Wigner -------------------------------------------------------------
#
# Operators are accumulated as {(x, z): coeff} where the key denotes the
# ordered product X^x Z^z on every qubit. Then
#   (X^a Z^b)(X^c Z^d) = (-1)^popcount(b & c) X^(a^c) Z^(b^d)
# and at the end X Z = -i Y converts keys back to Pauli labels.

_Op = dict[tuple[int, int], complex]


def _ladder(p: int, dagger: bool) -> _Op:
    # a_p  = Z_<p (X_p + i Y_p)/2 = Z_<p (X_p - X_p Z_p)/2
    # a_p^ = Z_<p (X_p - i Y_p)/2 = Z_<p (X_p + X_p Z_p)/2
    tail = (1 << p) - 1
    x = 1 << p
    return {(x, tail): 0.5, (x, tail | x): 0.5 if dagger else -0.5}


def _multiply(a: _Op, b: _Op) -> _Op:
    out: _Op = defaultdict(complex)
    for (xa, za), ca in a.items():
        for (xb, zb), cb in b.items():
            sign = -1.0 if (za & xb).bit_count() & 1 else 1.0
            out[(xa ^ xb, za ^ zb)] += sign * ca * cb
    return out


def _to_pauli_sum(op: _Op, width: int, imag_tol: float = 1e-10) -> PauliSum:
    terms = []
    for (x, z), c in op.items():
        c = c * (-1j) ** ((x & z).bit_count() % 4)
        if abs(c.imag) > imag_tol:
            raise ValueError(f"non-Hermitian residue {c.imag:.3e} on {masks_to_label(x, z, width)}")
        terms.append(PauliTerm(masks_to_label(x, z, width), c.real))
    return simplify(PauliSum(width, terms))


def fermion_operator_to_pauli(monomials, width: int, imag_tol: float = 1e-10) -> PauliSum:
    """Map ``[(coeff, [(mode, dagger), ...]), ...]`` through JW and simplify.

    Each monomial is an ordered product of ladder operators, leftmost first.
    The result must be Hermitian (real Pauli coefficients).
    """
    acc: _Op = defaultdict(complex)
    ladders = {}
    for coeff, ops in monomials:
        prod: _Op = {(0, 0): complex(coeff)}
        for mode, dagger in ops:
            key = (mode, dagger)
            if key not in ladders:
                ladders[key] = _ladder(mode, dagger)
            prod = _multiply(prod, ladders[key])
        for k, v in prod.items():
            acc[k] += v
    return _to_pauli_sum(acc, width, imag_tol)


def spin_orbital(spatial: int, spin: int, n_spatial: int) -> int:
    """Qubit index of a spin orbital (spin 0 = alpha, 1 = beta)."""
    return spatial + spin * n_spatial


def jordan_wigner(mi: MolecularIntegrals) -> PauliSum:
    """Qubit Hamiltonian of ``mi`` with the core energy on the identity term.

    H = E_core + sum h_pq a+_p a_q + 1/2 sum (pq|rs) a+_p a+_r a_s a_q
    with spin summed over both indices pairs.
    """
    n = mi.n_spatial
    width = 2 * n
    monomials = [(mi.core_energy, [])]
    for p, q in product(range(n), repeat=2):
        v = mi.one_body[p, q]
        if v == 0.0:
            continue
        for spin in (0, 1):
            monomials.append((v, [(spin_orbital(p, spin, n), True),
                                  (spin_orbital(q, spin, n), False)]))
    for p, q, r, s in product(range(n), repeat=4):
        v = mi.two_body[p, q, r, s]
        if v == 0.0:
            continue
        for sig, tau in product((0, 1), repeat=2):
            P, Q = spin_orbital(p, sig, n), spin_orbital(q, sig, n)
            R, S = spin_orbital(r, tau, n), spin_orbital(s, tau, n)
            if P == R or Q == S:
                continue
            monomials.append((0.5 * v, [(P, True), (R, True), (S, False), (Q, False)]))
    return fermion_operator_to_pauli(monomials, width)


def jw_number_operator(n_qubits: int) -> PauliSum:
    """Total particle number ``sum_p (I - Z_p)/2``."""
    if n_qubits < 1:
        raise ValueError("n_qubits must be >= 1")
    terms = [PauliTerm("I" * n_qubits, 0.5 * n_qubits)]
    for p in range(n_qubits):
        terms.append(PauliTerm(masks_to_label(0, 1 << p, n_qubits), -0.5))
    return simplify(PauliSum(n_qubits, terms))


def jw_sz_operator(n_spatial: int) -> PauliSum:
    """``S_z = (N_alpha - N_beta)/2`` in the spin-blocked layout."""
    width = 2 * n_spatial
    terms = []
    for p in range(n_spatial):
        terms.append(PauliTerm(masks_to_label(0, 1 << p, width), -0.25))
        terms.append(PauliTerm(masks_to_label(0, 1 << (p + n_spatial), width), 0.25))
    return simplify(PauliSum(width, terms))


def random_integrals(n_spatial: int, n_electrons: int, rng: np.random.Generator,
                     scale: float = 0.5) -> MolecularIntegrals:
    """Random integrals with the real-orbital symmetries (not physical)."""
    h = rng.normal(scale=scale, size=(n_spatial, n_spatial))
    h = h + h.T
    g = rng.normal(scale=scale, size=(n_spatial,) * 4)
    g = (g + g.transpose(1, 0, 2, 3))
    g = (g + g.transpose(0, 1, 3, 2))
    g = (g + g.transpose(2, 3, 0, 1)) / 8
    return MolecularIntegrals(n_spatial, n_electrons, rng.normal(), h, g)
