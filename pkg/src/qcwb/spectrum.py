"""Exact dense diagonalization: the classical ground truth.

Every quantum-algorithm path in the package is checked against these
eigenvalues. Eigenvectors are reported in the occupation basis, listing
only the basis states whose amplitude magnitude reaches a threshold.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from .operators import DENSE_MATRIX_LIMIT, PauliSum

REPORT_THRESHOLD = 1e-3


def diagonalization_limit() -> int:
    return int(os.environ.get("QCWB_DIAG_LIMIT", DENSE_MATRIX_LIMIT))


@dataclass
class SpectrumReport:
    width: int
    eigenvalues: np.ndarray
    vectors: np.ndarray          # columns are phase-fixed eigenvectors
    threshold: float = REPORT_THRESHOLD

    def decomposition(self, k: int) -> list[tuple[str, complex]]:
        """Basis states of eigenvector ``k`` with ``|amplitude| >= threshold``,
        largest first (ties by bitstring)."""
        v = self.vectors[:, k]
        idx = np.nonzero(np.abs(v) >= self.threshold)[0]
        order = sorted(idx, key=lambda i: (-round(abs(v[i]), 12), i))
        return [(format(int(i), f"0{self.width}b"), complex(v[i])) for i in order]

    def as_dict(self) -> dict:
        def amp(a: complex):
            return a.real if abs(a.imag) < 1e-12 else [a.real, a.imag]
        return {
            "width": self.width,
            "threshold": self.threshold,
            "eigenvalues": [float(e) for e in self.eigenvalues],
            "eigenvectors": [
                [[bits, amp(a)] for bits, a in self.decomposition(k)]
                for k in range(len(self.eigenvalues))
            ],
        }


def fix_phases(vectors: np.ndarray) -> np.ndarray:
    """Rotate each column so its largest-magnitude entry is real positive.

    Near-ties in magnitude (within 1e-9) resolve to the lowest index, so
    the convention does not depend on rounding noise.
    """
    out = vectors.copy()
    mags = np.abs(out)
    for k in range(out.shape[1]):
        col = mags[:, k]
        i = int(np.nonzero(col >= col.max() - 1e-9)[0][0])
        out[:, k] *= np.conj(out[i, k]) / abs(out[i, k])
    return out


def _dense(h: PauliSum) -> np.ndarray:
    limit = diagonalization_limit()
    if h.width > limit:
        raise ValueError(f"width {h.width} exceeds the diagonalization limit {limit}")
    return h.to_matrix(limit=limit)


def diagonalize(h: PauliSum, threshold: float = REPORT_THRESHOLD) -> SpectrumReport:
    """Full Hermitian eigendecomposition, eigenvalues ascending."""
    w, v = np.linalg.eigh(_dense(h))
    return SpectrumReport(h.width, w, fix_phases(v), threshold)


def ground_state(h: PauliSum, n_particles: int | None = None) -> tuple[float, np.ndarray]:
    """Lowest eigenpair, optionally restricted to a fixed particle number.

    Restricting to a particle-number sector assumes ``h`` conserves the
    number of set bits (true for every Jordan-Wigner Hamiltonian).
    """
    if n_particles is None:
        rep = diagonalize(h)
        return float(rep.eigenvalues[0]), rep.vectors[:, 0]
    energies, vecs = sector_eigh(h, n_particles)
    return float(energies[0]), vecs[:, 0]


def sector_indices(width: int, n_particles: int) -> np.ndarray:
    idx = np.arange(1 << width)
    return idx[np.bitwise_count(idx) == n_particles]


def sector_eigh(h: PauliSum, n_particles: int) -> tuple[np.ndarray, np.ndarray]:
    """Eigenpairs within the ``n_particles`` sector, embedded back into the full space."""
    m = _dense(h)
    sel = sector_indices(h.width, n_particles)
    if sel.size == 0:
        raise ValueError(f"no basis states with {n_particles} particles on {h.width} qubits")
    w, v = np.linalg.eigh(m[np.ix_(sel, sel)])
    full = np.zeros((1 << h.width, len(w)), dtype=complex)
    full[sel] = v
    return w, fix_phases(full)


def sector_eigenvalues(h: PauliSum, n_particles: int) -> np.ndarray:
    return sector_eigh(h, n_particles)[0]


__all__ = [
    "SpectrumReport", "diagonalize", "ground_state", "sector_eigh", "sector_eigenvalues",
    "fix_phases", "REPORT_THRESHOLD",
]
