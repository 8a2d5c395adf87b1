"""Dense complex linear algebra with pinned conventions.

Thin layer over numpy/LAPACK that fixes the conventions the rest of the
package depends on: the inner product is conjugate-linear in the first
argument, eigensystems come back sorted by descending eigenvalue with
phase-fixed eigenvectors, and orthogonalization is classical Gram-Schmidt
over columns with a single re-orthogonalization pass.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    DimensionMismatchError,
    NoConvergenceError,
    NotHermitianError,
    RankDeficientError,
)

HERMITIAN_TOL = 1e-12
UNITARY_TOL = 1e-10
PIVOT_TOL = 1e-12


@dataclass(frozen=True)
class Eigensystem:
    """Eigenvalues (descending) and matching eigenvectors (columns)."""

    values: np.ndarray
    vectors: np.ndarray


def inner(u: np.ndarray, v: np.ndarray) -> complex:
    """<u|v>, conjugating u."""
    u = np.asarray(u)
    v = np.asarray(v)
    if u.shape != v.shape:
        raise DimensionMismatchError(f"shapes {u.shape} and {v.shape} differ")
    return complex(np.vdot(u, v))


def is_hermitian(m: np.ndarray, tol: float = HERMITIAN_TOL) -> bool:
    return bool(np.max(np.abs(m - m.conj().T)) <= tol)


def is_unitary(m: np.ndarray, tol: float = UNITARY_TOL) -> bool:
    d = m.shape[0]
    return bool(np.max(np.abs(m.conj().T @ m - np.eye(d))) <= tol)


def _first_significant(v: np.ndarray) -> int:
    """Index of the first component that is not numerically negligible.

    The cutoff is relative to the largest magnitude in the vector, so the
    choice is stable under small perturbations of genuinely zero entries.
    """
    mags = np.abs(v)
    return int(np.flatnonzero(mags > 1e-8 * mags.max())[0])


def fix_phase(v: np.ndarray) -> np.ndarray:
    """Rotate v so its first significant component is real and positive."""
    idx = _first_significant(v)
    pivot = v[idx]
    return v * (np.conj(pivot) / abs(pivot))


def eigh(h: np.ndarray) -> Eigensystem:
    """Hermitian eigendecomposition with deterministic ordering.

    Eigenvalues are returned in descending order; exact ties are broken by
    lexicographic comparison of the phase-fixed eigenvectors.  Each
    eigenvector is rotated so its first significant component is real
    positive.

    Raises
    ------
    NotHermitianError
        If max |h - h^dagger| exceeds 1e-12.
    NoConvergenceError
        If the underlying QR iteration fails.
    """
    h = np.asarray(h, dtype=complex)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise DimensionMismatchError(f"expected a square matrix, got {h.shape}")
    dev = float(np.max(np.abs(h - h.conj().T)))
    if dev > HERMITIAN_TOL:
        raise NotHermitianError(f"deviation from Hermitian {dev:.3e} > {HERMITIAN_TOL}")
    try:
        vals, vecs = np.linalg.eigh(h)
    except np.linalg.LinAlgError as exc:
        raise NoConvergenceError(str(exc)) from exc
    order = np.argsort(-vals, kind="stable")
    vals = vals[order]
    vecs = vecs[:, order]
    for j in range(vecs.shape[1]):
        vecs[:, j] = fix_phase(vecs[:, j])
    # Exact eigenvalue ties: order the tied vectors lexicographically.
    j = 0
    n = len(vals)
    while j < n - 1:
        j2 = j
        while j2 < n - 1 and vals[j2 + 1] == vals[j]:
            j2 += 1
        if j2 > j:
            block = sorted(
                range(j, j2 + 1),
                key=lambda c: tuple(zip(vecs[:, c].real, vecs[:, c].imag)),
            )
            vecs[:, j:j2 + 1] = vecs[:, block]
        j = j2 + 1
    return Eigensystem(values=vals, vectors=vecs)


def gram_schmidt(m: np.ndarray) -> np.ndarray:
    """Orthonormalize columns, left to right, classical Gram-Schmidt.

    A single re-orthogonalization pass keeps the result unitary to well
    below 1e-10 even for poorly conditioned inputs.  Output column j spans
    the same flag as input columns 0..j, and every column's first
    significant component is made real positive.

    Raises
    ------
    RankDeficientError
        If a pivot norm falls below 1e-12 times the input column norm.
    """
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2:
        raise DimensionMismatchError(f"expected a matrix, got shape {m.shape}")
    d, n = m.shape
    if n > d:
        raise RankDeficientError(f"{n} columns cannot be independent in dimension {d}")
    q = np.zeros((d, n), dtype=complex)
    for j in range(n):
        a = m[:, j]
        in_norm = float(np.linalg.norm(a))
        if in_norm == 0.0:
            raise RankDeficientError(f"column {j} is zero")
        v = a - q[:, :j] @ (q[:, :j].conj().T @ a)
        v = v - q[:, :j] @ (q[:, :j].conj().T @ v)  # second pass
        piv = float(np.linalg.norm(v))
        if piv < PIVOT_TOL * in_norm:
            raise RankDeficientError(
                f"column {j} numerically dependent (pivot {piv:.3e})"
            )
        q[:, j] = fix_phase(v / piv)
    return q
