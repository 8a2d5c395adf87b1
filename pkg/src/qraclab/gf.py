"""Exact arithmetic in GF(p^k).

Elements are reduced coefficient vectors over Z_p (tuples of length k,
little-endian: index i holds the coefficient of x^i).  The modulus is the
first monic irreducible polynomial of degree k in base-p counting order of
its non-leading coefficients, so construction is deterministic across runs.
Integers 0..p^k-1 and elements correspond through base-p digits, little
endian; all tables elsewhere in the package rely on that enumeration.

Everything here is plain Python integers, so results are exact.
"""

from __future__ import annotations

from typing import Iterator, Sequence

from .errors import FieldOverflowError, NonPrimeError

MAX_ORDER = 2 ** 20

FieldElem = tuple[int, ...]


def is_prime(n: int) -> bool:
    """Trial-division primality test, adequate for characteristics <= 2^20."""
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


# -- polynomial helpers over Z_p (little-endian int lists) --------------------

def _trim(poly: list[int]) -> list[int]:
    while poly and poly[-1] == 0:
        poly.pop()
    return poly


def _poly_mul(a: Sequence[int], b: Sequence[int], p: int) -> list[int]:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] = (out[i + j] + ai * bj) % p
    return _trim(out)


def _poly_rem(a: Sequence[int], b: Sequence[int], p: int) -> list[int]:
    """Remainder of a mod b over Z_p.  b must be monic."""
    r = [c % p for c in a]
    _trim(r)
    db = len(b) - 1
    while len(r) - 1 >= db and r:
        shift = len(r) - 1 - db
        lead = r[-1]
        for i, bi in enumerate(b):
            r[shift + i] = (r[shift + i] - lead * bi) % p
        _trim(r)
    return r


def _poly_eval(poly: Sequence[int], x: int, p: int) -> int:
    acc = 0
    for c in reversed(poly):
        acc = (acc * x + c) % p
    return acc


def _is_irreducible(poly: Sequence[int], p: int) -> bool:
    """Brute-force irreducibility over Z_p.

    Degree 1 is always irreducible.  Above that: no root in Z_p (rules out
    linear factors), and no monic polynomial of degree 2..deg/2 divides it.
    """
    deg = len(poly) - 1
    if deg == 1:
        return True
    for x in range(p):
        if _poly_eval(poly, x, p) == 0:
            return False
    for dd in range(2, deg // 2 + 1):
        for m in range(p ** dd):
            g = _digits(m, p, dd) + [1]
            if not _poly_rem(poly, g, p):
                return False
    return True


def _digits(m: int, p: int, width: int) -> list[int]:
    out = []
    for _ in range(width):
        out.append(m % p)
        m //= p
    return out


def smallest_irreducible(p: int, k: int) -> tuple[int, ...]:
    """First monic irreducible of degree k over Z_p in base-p counting order.

    Candidates x^k, x^k + 1, x^k + 2, ..., i.e. the k non-leading
    coefficients enumerate as little-endian base-p digits of 0, 1, 2, ...
    For k = 1 this yields the polynomial x and arithmetic degenerates to
    plain integers mod p.
    """
    for m in range(p ** k):
        cand = _digits(m, p, k) + [1]
        if _is_irreducible(cand, p):
            return tuple(cand)
    raise AssertionError(f"no irreducible of degree {k} over Z_{p}")  # unreachable


# -- the field ----------------------------------------------------------------

class GaloisField:
    """GF(p^k) with elements as length-k coefficient tuples over Z_p.

    Parameters
    ----------
    p:
        Prime characteristic.
    k:
        Extension degree, k >= 1.  Order p^k must not exceed 2^20.
    modulus:
        Optional monic degree-k coefficient sequence (little-endian,
        length k+1).  Defaults to the canonical smallest irreducible.
    """

    def __init__(self, p: int, k: int = 1, modulus: Sequence[int] | None = None):
        if not is_prime(p):
            raise NonPrimeError(f"characteristic {p} is not prime")
        if k < 1:
            raise ValueError(f"extension degree must be >= 1, got {k}")
        order = p ** k
        if order > MAX_ORDER:
            raise FieldOverflowError(f"field order {order} exceeds {MAX_ORDER}")
        self.p = p
        self.k = k
        self.order = order
        if modulus is None:
            self.modulus: tuple[int, ...] = smallest_irreducible(p, k)
        else:
            mod = tuple(int(c) % p for c in modulus)
            if len(mod) != k + 1 or mod[-1] != 1:
                raise ValueError("modulus must be monic of degree k")
            if not _is_irreducible(mod, p):
                raise ValueError("modulus is reducible")
            self.modulus = mod
        self.zero: FieldElem = (0,) * k
        self.one: FieldElem = (1,) + (0,) * (k - 1)

    # enumeration ------------------------------------------------------------

    def element(self, i: int) -> FieldElem:
        """Element number i: base-p digits of i, little-endian."""
        if not 0 <= i < self.order:
            raise ValueError(f"element index {i} outside 0..{self.order - 1}")
        return tuple(_digits(i, self.p, self.k))

    def index(self, a: FieldElem) -> int:
        """Inverse of element(): read coefficients as base-p digits."""
        acc = 0
        for c in reversed(a):
            acc = acc * self.p + c
        return acc

    def elements(self) -> Iterator[FieldElem]:
        for i in range(self.order):
            yield self.element(i)

    # arithmetic ---------------------------------------------------------------

    def add(self, a: FieldElem, b: FieldElem) -> FieldElem:
        return tuple((x + y) % self.p for x, y in zip(a, b))

    def neg(self, a: FieldElem) -> FieldElem:
        return tuple((-x) % self.p for x in a)

    def sub(self, a: FieldElem, b: FieldElem) -> FieldElem:
        return tuple((x - y) % self.p for x, y in zip(a, b))

    def mul(self, a: FieldElem, b: FieldElem) -> FieldElem:
        prod = _poly_mul(a, b, self.p)
        rem = _poly_rem(prod, self.modulus, self.p)
        return tuple(rem) + (0,) * (self.k - len(rem))

    def pow(self, a: FieldElem, e: int) -> FieldElem:
        if e < 0:
            return self.pow(self.inv(a), -e)
        out = self.one
        base = a
        while e:
            if e & 1:
                out = self.mul(out, base)
            base = self.mul(base, base)
            e >>= 1
        return out

    def inv(self, a: FieldElem) -> FieldElem:
        """Multiplicative inverse, a^(p^k - 2).  Zero has none."""
        if a == self.zero:
            raise ZeroDivisionError("zero has no multiplicative inverse")
        return self.pow(a, self.order - 2)

    def trace(self, a: FieldElem) -> int:
        """Absolute trace sum_{i<k} a^(p^i), landing in the prime subfield.

        Returns the value as an integer in 0..p-1.
        """
        acc = self.zero
        cur = a
        for _ in range(self.k):
            acc = self.add(acc, cur)
            cur = self.pow(cur, self.p)
        # Frobenius orbit sums are fixed points of x -> x^p, hence scalars.
        if any(acc[1:]):
            raise AssertionError(f"trace of {a} not in prime subfield: {acc}")
        return acc[0]

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return f"GaloisField(p={self.p}, k={self.k}, modulus={self.modulus})"

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, GaloisField)
            and (self.p, self.k, self.modulus) == (other.p, other.k, other.modulus)
        )

    def __hash__(self) -> int:
        return hash((self.p, self.k, self.modulus))


def factor_prime_power(d: int) -> tuple[int, int]:
    """Write d as p^k with p prime, or raise.

    Returns (p, k).  Raises NotPrimePowerError for d that has more than one
    prime factor (or d < 2).
    """
    from .errors import NotPrimePowerError

    if d < 2:
        raise NotPrimePowerError(f"dimension {d} is not a prime power")
    p = d
    for f in range(2, d + 1):
        if f * f > d:
            break
        if d % f == 0:
            p = f
            break
    k = 0
    rem = d
    while rem % p == 0:
        rem //= p
        k += 1
    if rem != 1:
        raise NotPrimePowerError(f"dimension {d} is not a prime power")
    return p, k
