"""Complete sets of mutually unbiased bases in prime-power dimension.

For d = p^k the package builds the computational basis plus d further bases
indexed by field elements.  Odd characteristic uses quadratic phases
omega_p^tr(a j^2 + i j) over GF(p^k).  Characteristic 2 needs fourth roots
of unity: phases i^Tr((a + 2b) x) with Teichmuller representatives in the
Galois ring GR(4, k).  Every constructed set is certified unbiased before
it is returned; the certification, not the formula, is the contract.

Basis matrices hold the basis states as columns.  Sets round-trip through
a small JSON format (see save_bases).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DimensionMismatchError,
    NonUnitaryError,
    ParseError,
    UnbiasednessError,
)
from .gf import GaloisField, _poly_mul, _poly_rem, factor_prime_power
from .linalg import UNITARY_TOL, is_unitary

UNBIASED_TOL = 1e-10


@dataclass(frozen=True)
class Basis:
    """One orthonormal basis: unit columns of a d x d matrix plus a label."""

    matrix: np.ndarray
    label: str = ""

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise DimensionMismatchError(f"basis matrix must be square, got {m.shape}")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def state(self, i: int) -> np.ndarray:
        return self.matrix[:, i]


@dataclass(frozen=True)
class MubSet:
    """A certified family of pairwise mutually unbiased bases."""

    dim: int
    bases: tuple[Basis, ...]
    construction: str = "custom"
    max_deviation: float = field(default=0.0, compare=False)

    def __len__(self) -> int:
        return len(self.bases)

    def __getitem__(self, i: int) -> Basis:
        return self.bases[i]


def check_unbiased(a: Basis | np.ndarray, b: Basis | np.ndarray) -> float:
    """Worst deviation of |<a_i|b_j>| from 1/sqrt(d) over all state pairs."""
    ma = a.matrix if isinstance(a, Basis) else np.asarray(a)
    mb = b.matrix if isinstance(b, Basis) else np.asarray(b)
    if ma.shape != mb.shape:
        raise DimensionMismatchError(f"shapes {ma.shape} and {mb.shape} differ")
    d = ma.shape[0]
    overlaps = np.abs(ma.conj().T @ mb)
    return float(np.max(np.abs(overlaps - 1.0 / math.sqrt(d))))


def certify_mub_set(
    bases: list[Basis] | tuple[Basis, ...],
    construction: str = "custom",
    tol: float = UNBIASED_TOL,
) -> MubSet:
    """Build a MubSet after checking unitarity and pairwise unbiasedness.

    Raises NonUnitaryError or UnbiasednessError (reporting the worst pair)
    on failure.
    """
    if not bases:
        raise DimensionMismatchError("empty basis list")
    d = bases[0].dim
    for b in bases:
        if b.dim != d:
            raise DimensionMismatchError("bases of mixed dimension")
        if not is_unitary(b.matrix, UNITARY_TOL):
            raise NonUnitaryError(f"basis {b.label!r} is not unitary at {UNITARY_TOL}")
    worst = 0.0
    worst_pair = None
    for i in range(len(bases)):
        for j in range(i + 1, len(bases)):
            dev = check_unbiased(bases[i], bases[j])
            if dev > worst:
                worst, worst_pair = dev, (i, j)
    if worst > tol:
        raise UnbiasednessError(
            f"bases {worst_pair} deviate from unbiasedness by {worst:.3e} (tol {tol})"
        )
    return MubSet(dim=d, bases=tuple(bases), construction=construction,
                  max_deviation=worst)


# -- odd characteristic --------------------------------------------------------

def _quadratic_phase_bases(f: GaloisField) -> list[np.ndarray]:
    d = f.order
    els = [f.element(i) for i in range(d)]
    # tr_bilinear[i, j] = tr(e_i * e_j); squares[j] = index of e_j^2.
    tr_bilinear = np.empty((d, d), dtype=np.int64)
    for i in range(d):
        for j in range(i, d):
            t = f.trace(f.mul(els[i], els[j]))
            tr_bilinear[i, j] = t
            tr_bilinear[j, i] = t
    squares = np.array([f.index(f.mul(e, e)) for e in els])
    omega = np.exp(2j * np.pi / f.p)
    scale = 1.0 / math.sqrt(d)
    out = []
    for a in range(d):
        t2 = tr_bilinear[a, squares]           # tr(a * j^2) over rows j
        expo = (t2[:, None] + tr_bilinear.T) % f.p   # + tr(i * j), col i
        out.append(scale * omega ** expo)
    return out


# -- characteristic 2: Galois ring GR(4, k) -------------------------------------

def _hensel_lift(fmod: tuple[int, ...], k: int) -> list[int]:
    """Lift the binary modulus to a monic basic irreducible over Z_4.

    Uses the even/odd coefficient split: if f(x) = e(x^2) + x o(x^2) then
    h(y) = (-1)^k (e(y)^2 - y o(y)^2) reduces to f mod 2.
    """
    even = [fmod[i] for i in range(0, k + 1, 2)]
    odd = [fmod[i] for i in range(1, k + 1, 2)]
    e2 = _poly_mul(even, even, 4)
    o2 = _poly_mul(odd, odd, 4)
    yo2 = [0] + o2
    n = max(len(e2), len(yo2), k + 1)
    h = [( (e2[i] if i < len(e2) else 0) - (yo2[i] if i < len(yo2) else 0) ) % 4
         for i in range(n)]
    if k % 2 == 1:
        h = [(-c) % 4 for c in h]
    while h and h[-1] == 0:
        h.pop()
    assert len(h) == k + 1 and h[-1] == 1, "Hensel lift is not monic of degree k"
    assert tuple(c % 2 for c in h) == fmod, "Hensel lift does not reduce to modulus"
    return h


def _ring_bases(f: GaloisField) -> list[np.ndarray]:
    """Fourth-root-of-unity bases for d = 2^k from GR(4, k)."""
    d, k = f.order, f.k
    h = _hensel_lift(f.modulus, k)

    def rmul(a, b):
        r = _poly_rem(_poly_mul(list(a), list(b), 4), h, 4)
        return tuple(r) + (0,) * (k - len(r))

    def radd(a, b):
        return tuple((x + y) % 4 for x, y in zip(a, b))

    def rpow(a, e):
        out = (1,) + (0,) * (k - 1)
        base = a
        while e:
            if e & 1:
                out = rmul(out, base)
            base = rmul(base, base)
            e >>= 1
        return out

    # Teichmuller lift of each field element: t = a_hat^(2^k).
    lift = []
    for i in range(d):
        a_hat = f.element(i)  # 0/1 coefficients read in Z_4
        t = rpow(a_hat, d)
        assert tuple(c % 2 for c in t) == f.element(i), "lift lost its residue"
        lift.append(t)
    where = {t: i for i, t in enumerate(lift)}

    # Multiplication stays inside the Teichmuller set; record it by index.
    mul_idx = np.empty((d, d), dtype=np.int64)
    for i in range(d):
        for j in range(i, d):
            prod = rmul(lift[i], lift[j])
            idx = where[prod]
            mul_idx[i, j] = idx
            mul_idx[j, i] = idx

    # Ring trace of each Teichmuller element via Frobenius orbits downstairs.
    tr4 = np.empty(d, dtype=np.int64)
    for i in range(d):
        acc = (0,) * k
        a = f.element(i)
        for _ in range(k):
            acc = radd(acc, lift[f.index(a)])
            a = f.mul(a, a)
        assert not any(acc[1:]), "ring trace not scalar"
        tr4[i] = acc[0]

    tr_pair = tr4[mul_idx]          # tr_pair[u, v] = Tr(t_u t_v)
    scale = 1.0 / math.sqrt(d)
    out = []
    for a in range(d):
        # E[row x, col b] = Tr(t_a t_x) + 2 Tr(t_b t_x)  (mod 4)
        expo = (tr_pair[a, :][:, None] + 2 * tr_pair.T) % 4
        out.append(scale * (1j) ** expo)
    return out


# -- public construction ---------------------------------------------------------

def galois_mubs(d: int, tol: float = UNBIASED_TOL) -> MubSet:
    """Build and certify the d+1 standard bases for prime-power d.

    Basis 0 is computational.  Basis mu in 1..d is indexed by field element
    number mu-1 under the little-endian base-p enumeration; for prime d this
    makes basis 1 the Fourier basis (phase exponent i*j) and basis 2 the
    quadratic one (exponent i*j + j^2).

    Raises NotPrimePowerError for composite d with two prime factors, and
    UnbiasednessError if certification fails (it should not).
    """
    p, k = factor_prime_power(d)
    f = GaloisField(p, k)
    mats = _ring_bases(f) if p == 2 else _quadratic_phase_bases(f)
    construction = "galois"
    bases = [Basis(np.eye(d, dtype=complex), label=f"{construction}:0")]
    bases += [
        Basis(m, label=f"{construction}:{mu}") for mu, m in enumerate(mats, start=1)
    ]
    return certify_mub_set(bases, construction=construction, tol=tol)


# -- serialization ----------------------------------------------------------------

def save_bases(obj: MubSet | list[Basis], path: str) -> None:
    """Write bases as JSON: {"dim", "construction", "bases"}.

    bases[b][i][j] is amplitude j of state i of basis b, encoded as a
    [re, im] pair.  Floats keep full double precision (shortest decimal
    that round-trips bit for bit).
    """
    if isinstance(obj, MubSet):
        dim, construction, bases = obj.dim, obj.construction, obj.bases
    else:
        if not obj:
            raise DimensionMismatchError("nothing to save")
        dim, construction, bases = obj[0].dim, "custom", obj
    doc = {
        "dim": dim,
        "construction": construction,
        "bases": [
            [
                [[float(z.real), float(z.imag)] for z in b.matrix[:, i]]
                for i in range(dim)
            ]
            for b in bases
        ],
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh)
        fh.write("\n")


def load_bases(path: str) -> list[Basis]:
    """Read a basis-set file back as a list of Basis.

    Validates shape and unitarity of every basis (ParseError /
    NonUnitaryError); mutual unbiasedness is certify_mub_set's job.
    """
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON ({exc})") from exc
    if not isinstance(doc, dict):
        raise ParseError(f"{path}: top level must be an object")
    try:
        dim = int(doc["dim"])
        construction = str(doc.get("construction", "custom"))
        raw = doc["bases"]
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"{path}: missing or malformed keys") from exc
    if not isinstance(raw, list) or not raw:
        raise ParseError(f"{path}: 'bases' must be a non-empty list")
    out = []
    for bi, cols in enumerate(raw):
        try:
            m = np.empty((dim, dim), dtype=complex)
            if len(cols) != dim:
                raise ValueError("wrong column count")
            for i, col in enumerate(cols):
                if len(col) != dim:
                    raise ValueError("wrong row count")
                for j, pair in enumerate(col):
                    re, im = pair
                    m[j, i] = complex(float(re), float(im))
        except (TypeError, ValueError) as exc:
            raise ParseError(f"{path}: basis {bi} malformed ({exc})") from exc
        if not is_unitary(m, UNITARY_TOL):
            raise NonUnitaryError(f"{path}: basis {bi} is not unitary")
        out.append(Basis(m, label=f"{construction}:{bi}"))
    return out
