"""Success probabilities for n -> 1 qudit random access codes.

Alice holds a word x in Z_d^n, encodes it in one qudit, and Bob measures in
basis y to guess digit x_y.  For a word x the best encoding is the top
eigenvector of the score operator

    P(x) = sum_i p_i |u^(i)_{x_i}><u^(i)_{x_i}|,

and the figure of merit averages its largest eigenvalue over all words
uniformly.  Two independent routes compute it: a general eigensolver route
(any bases, any n), and an analytic route for triplets of mutually
unbiased bases, where the largest eigenvalue is (1 + (2/sqrt d) cos(Phi/3))/3
with Phi the wrapped sum of the three overlap phases.

The eigensolver route never needs the d x d operator spectrum: the nonzero
eigenvalues of sum_i p_i |u_i><u_i| are those of the n x n matrix
sqrt(p_i p_j) <u_i|u_j>, which is what makes dimension-17 sweeps cheap.
The full d x d diagonalization is retained (word_optimum, method="full")
as the reference the analytic route is checked against.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    BudgetExceededError,
    DimensionMismatchError,
    NotUnbiasedError,
    VerificationError,
    WeightError,
)
from .linalg import eigh
from .mub import Basis

MAX_WORDS = 10 ** 8
WEIGHT_TOL = 1e-12
ANALYTIC_UNBIASED_TOL = 1e-8
_CHUNK = 1 << 16


def wrap_angle(phi):
    """Map angles to [-pi, pi).  Works on scalars and arrays."""
    out = np.mod(np.asarray(phi, dtype=float) + np.pi, 2.0 * np.pi) - np.pi
    out = np.where(out >= np.pi, out - 2.0 * np.pi, out)
    return float(out) if np.ndim(phi) == 0 else out


@dataclass(frozen=True)
class ScoreOperator:
    """The word's score operator plus the word and weights that built it."""

    matrix: np.ndarray
    word: tuple[int, ...]
    weights: tuple[float, ...]

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True)
class QracResult:
    """A success probability plus how it was obtained.

    per_word, when kept, is the array of per-word optima with shape (d,)*n
    indexed by the word digits.
    """

    value: float
    method: str
    dim: int
    n: int
    per_word: np.ndarray | None = None


def _matrices(bases) -> tuple[int, list[np.ndarray]]:
    mats = [b.matrix if isinstance(b, Basis) else np.asarray(b, dtype=complex)
            for b in bases]
    if not mats:
        raise DimensionMismatchError("no bases given")
    d = mats[0].shape[0]
    for m in mats:
        if m.shape != (d, d):
            raise DimensionMismatchError("bases of mixed dimension")
    return d, mats


def _check_word(word, n: int, d: int) -> tuple[int, ...]:
    w = tuple(int(x) for x in word)
    if len(w) != n:
        raise DimensionMismatchError(f"word length {len(w)} != number of bases {n}")
    if any(not 0 <= x < d for x in w):
        raise DimensionMismatchError(f"word {w} has digits outside 0..{d - 1}")
    return w


def _check_weights(weights, n: int) -> np.ndarray:
    if weights is None:
        return np.full(n, 1.0 / n)
    w = np.asarray(weights, dtype=float)
    if w.shape != (n,):
        raise WeightError(f"expected {n} weights, got shape {w.shape}")
    if np.any(w < 0):
        raise WeightError("weights must be non-negative")
    if abs(float(w.sum()) - 1.0) > WEIGHT_TOL:
        raise WeightError(f"weights sum to {w.sum()!r}, not 1")
    return w


# -- single-word operators -------------------------------------------------------

def score_operator(bases, word, weights=None, *, certify: bool = True) -> ScoreOperator:
    """Assemble P(x) = sum_i p_i |u^(i)_{x_i}><u^(i)_{x_i}|.

    With certify=True (default) the operator's invariants are checked:
    trace equals sum of weights, spectrum is non-negative, and at most n
    eigenvalues are nonzero.
    """
    d, mats = _matrices(bases)
    n = len(mats)
    w = _check_word(word, n, d)
    p = _check_weights(weights, n)
    cols = np.stack([mats[i][:, w[i]] for i in range(n)], axis=1)  # d x n
    m = (cols * p) @ cols.conj().T
    op = ScoreOperator(matrix=m, word=w, weights=tuple(float(x) for x in p))
    if certify:
        tr = float(np.trace(m).real)
        if abs(tr - float(p.sum())) > 1e-12:
            raise VerificationError(f"trace {tr} != weight sum {p.sum()}")
        vals = np.linalg.eigvalsh(m)
        if vals[0] < -1e-10:
            raise VerificationError(f"negative eigenvalue {vals[0]:.3e}")
        if d > n and vals[d - n - 1] > 1e-10:
            raise VerificationError("more than n nonzero eigenvalues")
    return op


def word_optimum(op: ScoreOperator) -> tuple[float, np.ndarray]:
    """Largest eigenvalue of the score operator and its eigenvector.

    This is the full d x d reference diagonalization; the vector's first
    significant component is real positive.
    """
    es = eigh(op.matrix)
    return float(es.values[0]), es.vectors[:, 0]


# -- reduced spectra -------------------------------------------------------------

def _lambda_max_unit_cubic(a, b, c):
    """Top eigenvalue of [[0,a,b],[a*,0,c],[b*,c*,0]], vectorized.

    Solves lambda^3 - c1 lambda - c0 = 0 by the trigonometric method; for
    Hermitian input all roots are real and the largest is 2m cos(theta/3).
    """
    c1 = np.abs(a) ** 2 + np.abs(b) ** 2 + np.abs(c) ** 2
    c0 = 2.0 * (a * c * np.conj(b)).real
    m = np.sqrt(c1 / 3.0)
    safe = m > 1e-150
    ratio = np.zeros_like(c0)
    np.divide(c0, 2.0 * m ** 3, out=ratio, where=safe)
    np.clip(ratio, -1.0, 1.0, out=ratio)
    lam = 2.0 * m * np.cos(np.arccos(ratio) / 3.0)
    return np.where(safe, lam, 0.0)


def _pair_tables(mats) -> dict[tuple[int, int], np.ndarray]:
    n = len(mats)
    return {
        (i, j): mats[i].conj().T @ mats[j]
        for i in range(n) for j in range(i + 1, n)
    }


def _top_values_reduced(tables, p, n, d, idx_chunk) -> np.ndarray:
    """Top eigenvalues for a chunk of words via the n x n reduced matrix."""
    digits = np.stack(np.unravel_index(idx_chunk, (d,) * n), axis=1)
    m = np.zeros((len(idx_chunk), n, n), dtype=complex)
    for i in range(n):
        m[:, i, i] = p[i]
    sp = np.sqrt(p)
    for (i, j), tab in tables.items():
        val = tab[digits[:, i], digits[:, j]] * (sp[i] * sp[j])
        m[:, i, j] = val
        m[:, j, i] = val.conj()
    return np.linalg.eigvalsh(m)[:, -1]


def max_success_probability(
    bases,
    weights=None,
    *,
    method: str = "reduced",
    keep_per_word: bool = False,
    max_words: int = MAX_WORDS,
) -> QracResult:
    """Average of the top score-operator eigenvalue over all d^n words.

    method="reduced" (default) diagonalizes the n x n reduced matrix per
    word (batched; a closed-form cubic when n == 3 with uniform weights).
    method="full" loops over words with the d x d diagonalization; it is
    the slow reference path.

    Raises BudgetExceededError when d^n exceeds max_words.
    """
    d, mats = _matrices(bases)
    n = len(mats)
    p = _check_weights(weights, n)
    total_words = d ** n
    if total_words > max_words:
        raise BudgetExceededError(f"d^n = {total_words} exceeds budget {max_words}")
    if method not in ("reduced", "full"):
        raise ValueError(f"unknown method {method!r}")

    if method == "full":
        per = np.empty(total_words)
        for widx, word in enumerate(itertools.product(range(d), repeat=n)):
            op = score_operator(mats, word, p, certify=False)
            per[widx], _ = word_optimum(op)
        value = float(per.mean())
        per_word = per.reshape((d,) * n) if keep_per_word else None
        return QracResult(value=value, method="eigensolver", dim=d, n=n,
                          per_word=per_word)

    uniform = bool(np.all(np.abs(p - 1.0 / n) <= WEIGHT_TOL))
    if n == 3 and uniform and total_words <= (1 << 24):
        tabs = _pair_tables(mats)
        g01, g02, g12 = tabs[(0, 1)], tabs[(0, 2)], tabs[(1, 2)]
        a = g01[:, :, None] * np.ones((1, 1, d))
        b = np.broadcast_to(g02[:, None, :], (d, d, d))
        c = np.broadcast_to(g12[None, :, :], (d, d, d))
        lam = (1.0 + _lambda_max_unit_cubic(a, b, c)) / 3.0
        value = float(lam.mean())
        return QracResult(value=value, method="eigensolver", dim=d, n=n,
                          per_word=lam if keep_per_word else None)

    tabs = _pair_tables(mats)
    keep = np.empty(total_words) if keep_per_word else None
    acc = 0.0
    for start in range(0, total_words, _CHUNK):
        idx = np.arange(start, min(start + _CHUNK, total_words))
        top = _top_values_reduced(tabs, p, n, d, idx)
        acc += float(top.sum())
        if keep is not None:
            keep[idx] = top
    value = acc / total_words
    per_word = keep.reshape((d,) * n) if keep_per_word else None
    return QracResult(value=value, method="eigensolver", dim=d, n=n,
                      per_word=per_word)


# -- analytic route for MUB triplets ----------------------------------------------

@dataclass(frozen=True)
class PhaseRecord:
    """Overlap phases of a word against a triplet of unbiased bases.

    raw is phi01 - phi02 + phi12 in (-3pi, 3pi]; phi is the same angle
    wrapped to [-pi, pi).
    """

    phi01: float
    phi02: float
    phi12: float
    raw: float
    phi: float


def _triplet_overlaps(triplet, word):
    d, mats = _matrices(triplet)
    if len(mats) != 3:
        raise DimensionMismatchError(f"need exactly 3 bases, got {len(mats)}")
    w = _check_word(word, 3, d)
    u0, u1, u2 = (mats[i][:, w[i]] for i in range(3))
    o01 = complex(np.vdot(u0, u1))
    o02 = complex(np.vdot(u0, u2))
    o12 = complex(np.vdot(u1, u2))
    inv = 1.0 / math.sqrt(d)
    worst = max(abs(abs(o) - inv) for o in (o01, o02, o12))
    if worst > ANALYTIC_UNBIASED_TOL:
        raise NotUnbiasedError(
            f"overlap magnitude off 1/sqrt(d) by {worst:.3e} for word {w}"
        )
    return d, mats, w, o01, o02, o12


def phase_record(triplet, word) -> PhaseRecord:
    """Overlap phases phi01, phi02, phi12 and the wrapped combination Phi."""
    _, _, _, o01, o02, o12 = _triplet_overlaps(triplet, word)
    p01 = float(np.angle(o01))
    p02 = float(np.angle(o02))
    p12 = float(np.angle(o12))
    raw = p01 - p02 + p12
    return PhaseRecord(phi01=p01, phi02=p02, phi12=p12, raw=raw,
                       phi=wrap_angle(raw))


def triplet_eigenvalues(d: int, phi: float) -> tuple[float, float, float]:
    """The three nonzero score eigenvalues for a MUB triplet word.

    Descending: the Phi/3 branch dominates because |Phi| < pi.
    """
    s = 2.0 / math.sqrt(d)
    return (
        (1.0 + s * math.cos(phi / 3.0)) / 3.0,
        (1.0 + s * math.cos(phi / 3.0 + 2.0 * math.pi / 3.0)) / 3.0,
        (1.0 + s * math.cos(phi / 3.0 - 2.0 * math.pi / 3.0)) / 3.0,
    )


def analytic_word_optimum(triplet, word) -> tuple[float, np.ndarray]:
    """Closed-form top eigenvalue and optimal state for one word.

    The state is |u0> + e^{i(Phi/3 - phi01)} |u1> + e^{i(-Phi/3 - phi02)} |u2>
    normalized, which the score operator maps to lam0 times itself.
    """
    d, mats, w, o01, o02, o12 = _triplet_overlaps(triplet, word)
    rec = PhaseRecord(
        phi01=float(np.angle(o01)), phi02=float(np.angle(o02)),
        phi12=float(np.angle(o12)),
        raw=float(np.angle(o01)) - float(np.angle(o02)) + float(np.angle(o12)),
        phi=0.0,
    )
    phi = wrap_angle(rec.raw)
    lam0 = triplet_eigenvalues(d, phi)[0]
    u0, u1, u2 = (mats[i][:, w[i]] for i in range(3))
    third = phi / 3.0
    psi = (
        u0
        + np.exp(1j * (third - rec.phi01)) * u1
        + np.exp(1j * (-third - rec.phi02)) * u2
    )
    norm = math.sqrt(3.0 + (6.0 / math.sqrt(d)) * math.cos(third))
    return lam0, psi / norm


def analytic_success_probability(triplet, *, keep_per_word: bool = False) -> QracResult:
    """Analytic average over all d^3 words for a MUB triplet.

    Vectorized: three overlap phase tables give Phi on the whole word grid
    at once.  Requires pairwise unbiasedness within 1e-8.
    """
    d, mats = _matrices(triplet)
    if len(mats) != 3:
        raise DimensionMismatchError(f"need exactly 3 bases, got {len(mats)}")
    tabs = _pair_tables(mats)
    inv = 1.0 / math.sqrt(d)
    for tab in tabs.values():
        worst = float(np.max(np.abs(np.abs(tab) - inv)))
        if worst > ANALYTIC_UNBIASED_TOL:
            raise NotUnbiasedError(f"bases not unbiased (deviation {worst:.3e})")
    value, lam = _analytic_from_tables(tabs[(0, 1)], tabs[(0, 2)], tabs[(1, 2)], d,
                                       keep_per_word)
    return QracResult(value=value, method="analytic", dim=d, n=3, per_word=lam)


def _analytic_from_tables(g01, g02, g12, d, keep_per_word=False):
    phi = (
        np.angle(g01)[:, :, None]
        - np.angle(g02)[:, None, :]
        + np.angle(g12)[None, :, :]
    )
    phi = wrap_angle(phi)
    lam = (1.0 + (2.0 / math.sqrt(d)) * np.cos(phi / 3.0)) / 3.0
    return float(lam.mean()), (lam if keep_per_word else None)


# -- classical baselines ------------------------------------------------------------

BRUTE_CASES = {(2, 2), (2, 3), (3, 2)}


def classical_baseline(n: int, d: int, mode: str = "identity") -> float:
    """Classical n -> 1 success probability.

    mode="identity": send the first digit, answer it for every question,
    worth (1/n)(1 + (n-1)/d).  mode="brute": exact optimum over all
    deterministic encodings Z_d^n -> Z_d with per-question decoders chosen
    optimally for each encoding; only (n, d) in {(2,2), (2,3), (3,2)} are
    within budget.
    """
    if n < 1 or d < 2:
        raise DimensionMismatchError(f"bad (n, d) = ({n}, {d})")
    if mode == "identity":
        return (1.0 + (n - 1) / d) / n
    if mode != "brute":
        raise ValueError(f"unknown mode {mode!r}")
    if (n, d) not in BRUTE_CASES:
        raise BudgetExceededError(
            f"brute force for (n, d) = ({n}, {d}) is out of budget"
        )
    words = list(itertools.product(range(d), repeat=n))
    best = 0
    for enc in itertools.product(range(d), repeat=len(words)):
        # counts[y][c][v]: words mapped to symbol c whose digit y equals v.
        counts = [[[0] * d for _ in range(d)] for _ in range(n)]
        for widx, x in enumerate(words):
            c = enc[widx]
            for y in range(n):
                counts[y][c][x[y]] += 1
        total = sum(max(counts[y][c]) for y in range(n) for c in range(d))
        if total > best:
            best = total
    return best / (n * d ** n)
