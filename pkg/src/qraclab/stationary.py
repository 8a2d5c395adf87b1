"""Stationary structure of the success ratio q over trial-state phases.

For a word against a triplet of unbiased bases, parametrize Alice's trial
state by two phases,

    |v(t1, t2)> = |c> + e^{i(t1 - phi01)} |e> + e^{i(t2 - phi02)} |f>,

and let q = 3 <P> - 2 where <P> is the Rayleigh quotient of the score
operator on |v>.  The ratio depends only on (t1, t2), the dimension and
the wrapped phase combination Phi, which gives a closed trigonometric
form q = num/den with den = <v|v>.  Both partial derivatives factor into
a sine prefactor times a one-variable bracket g over den^2, so the
stationary set consists of two slanted lines plus the horizontal line
t2 = gamma0 and the vertical line t1 = -gamma0, where gamma0 is any root
of g.  Along the horizontal line q is constant (q_m2); the three
intersections of the slanted lines carry the branch values of q, the
largest being q_m1, which is also the global maximum.

Degenerate points: den is a squared norm and vanishes exactly where the
three-state superposition collapses, which happens for realized words
only in dimensions 2 and 3 (the branch eigenvalue of the word hits zero).
q is a direction-dependent 0/0 limit there, still bounded by the operator
spectrum, so floating evaluations near such points are artifacts rather
than information.  Samples whose den falls below DEGENERATE_DEN_TOL are
excluded from the recorded statistics and counted; intersections there
are flagged and their gradient norm reported as nan, since q has no
gradient at a collapse point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .errors import RankDeficientError, RootNotFoundError, VerificationError
from .qrac import _triplet_overlaps, score_operator, wrap_angle

DUAL_PATH_TOL = 1e-12
ORDER_TOL = 1e-12
GRID_TOL = 1e-9
ROOT_XTOL = 1e-14
FD_STEP = 1e-5
# Squared-norm floor below which q's 0/0 ratio cannot be resolved in floats.
# Intersection norms of realized words are either exact zeros or above 0.4,
# so the cut is unambiguous there; along scan lines it trims only the few
# samples adjacent to a collapse point.
DEGENERATE_DEN_TOL = 1e-3
_SCAN_POINTS = 4096
_LINE_SAMPLES = 256
_GRID_SIDE = 512


# -- closed form and derivatives ---------------------------------------------------


def q_parts(theta1, theta2, phi: float, d: int):
    """Numerator and denominator of q; broadcasts over angle arrays."""
    t1 = np.asarray(theta1, dtype=float)
    t2 = np.asarray(theta2, dtype=float)
    rd = math.sqrt(d)
    num = -3.0 + 6.0 / d + (2.0 / d) * (
        np.cos(t1 - t2) + np.cos(t2 + phi) + np.cos(t1 - phi))
    den = 3.0 + (2.0 / rd) * (np.cos(t1) + np.cos(t2) + np.cos(t1 - t2 - phi))
    return num, den


def q_formula(theta1, theta2, phi: float, d: int):
    """q = num/den.  Callers guard degenerate points themselves."""
    num, den = q_parts(theta1, theta2, phi, d)
    return num / den


def stationary_line_equation(t, phi: float, d: int):
    """Bracket factor g whose roots are the gamma0 candidates.

    g(t + 2 pi) = -g(t), so g changes sign over any closed period and a
    root always exists in [-pi, pi).
    """
    t = np.asarray(t, dtype=float)
    rd = math.sqrt(d)
    d32 = d * rd
    return (np.cos((t - phi) / 2) * (6.0 / d + (4.0 / d32) * np.cos(t))
            + np.cos((t + phi) / 2)
            * (6.0 / rd - 12.0 / d32 - (4.0 / d32) * np.cos(t + phi)))


def q_gradient(theta1, theta2, phi: float, d: int):
    """Analytic (dq/dtheta1, dq/dtheta2).  Undefined where den vanishes."""
    t1 = np.asarray(theta1, dtype=float)
    t2 = np.asarray(theta2, dtype=float)
    _, den = q_parts(t1, t2, phi, d)
    g1 = -2.0 * np.sin((2 * t1 - t2 - phi) / 2) \
        * stationary_line_equation(t2, phi, d) / den ** 2
    g2 = 2.0 * np.sin((t1 - 2 * t2 - phi) / 2) \
        * stationary_line_equation(-t1, phi, d) / den ** 2
    return g1, g2


def q_value(triplet, word, theta1: float, theta2: float, *,
            check: bool = True) -> float:
    """q at one phase point, cross-checked against the Born rule.

    The closed form and the Rayleigh quotient of the score operator on the
    explicit trial state are independent routes; with check=True both are
    computed and must agree within DUAL_PATH_TOL.
    """
    d, mats, w, o01, o02, o12 = _triplet_overlaps(triplet, word)
    p01 = float(np.angle(o01))
    p02 = float(np.angle(o02))
    phi = wrap_angle(p01 - p02 + float(np.angle(o12)))
    num, den = q_parts(theta1, theta2, phi, d)
    if den <= DEGENERATE_DEN_TOL:
        raise RankDeficientError(
            f"trial state squared norm {float(den):.3e} at "
            f"({theta1:.6f}, {theta2:.6f}) is below {DEGENERATE_DEN_TOL}; "
            "q is a 0/0 ratio there")
    value = float(num) / float(den)
    if check:
        v = (mats[0][:, w[0]]
             + np.exp(1j * (theta1 - p01)) * mats[1][:, w[1]]
             + np.exp(1j * (theta2 - p02)) * mats[2][:, w[2]])
        op = score_operator(triplet, word, certify=False)
        mean = float(np.real(np.vdot(v, op.matrix @ v) / np.vdot(v, v)))
        born = 3.0 * mean - 2.0
        if abs(value - born) > DUAL_PATH_TOL:
            raise VerificationError(
                f"closed form {value!r} and Born rule {born!r} "
                f"differ by {abs(value - born):.3e}")
    return value


# -- stationary-line roots ----------------------------------------------------------


def gamma_roots(phi: float, d: int) -> tuple[float, ...]:
    """All sign-change roots of g on [-pi, pi), bracketed to ROOT_XTOL.

    Raises RootNotFoundError when the scan sees no sign change; the root is
    then reported missing rather than guessed.
    """
    ts = np.linspace(-math.pi, math.pi, _SCAN_POINTS + 1)
    vals = stationary_line_equation(ts, phi, d)
    roots: list[float] = []
    f = lambda t: float(stationary_line_equation(t, phi, d))
    for i in range(_SCAN_POINTS):
        a, b = float(vals[i]), float(vals[i + 1])
        if a == 0.0:
            roots.append(float(ts[i]))
        elif a * b < 0.0:
            roots.append(brentq(f, float(ts[i]), float(ts[i + 1]),
                                xtol=ROOT_XTOL, rtol=4 * np.finfo(float).eps))
    if not roots:
        raise RootNotFoundError(
            f"no sign change of the stationary-line equation on a "
            f"{_SCAN_POINTS}-point scan of [-pi, pi) (d={d}, phi={phi:.6f})")
    return tuple(roots)


# -- structure verifier --------------------------------------------------------------


@dataclass(frozen=True)
class StationaryReport:
    """Recorded stationary structure of q for one word.

    gradient_norms holds nan where degenerate marks a collapse point;
    line_variations and line_excluded have one entry per root, the counts
    being samples cut by the squared-norm guard.
    """

    word: tuple[int, ...]
    phi: float
    gamma0: float
    roots: tuple[float, ...]
    q_m1: float
    q_m2: float
    intersections: tuple[tuple[float, float], ...]
    gradient_norms: tuple[float, float, float]
    degenerate: tuple[bool, bool, bool]
    line_variations: tuple[float, ...]
    line_excluded: tuple[int, ...]
    grid_max: float
    grid_excluded: int


def verify_stationary_structure(triplet, word) -> StationaryReport:
    """Locate gamma0 and check the stationary structure of q.

    Records the finite-difference gradient norms at the three slant-line
    intersections and the max-min variation of q along theta2 = gamma0 for
    every root found.  Asserts q_m1 >= q_m2 - ORDER_TOL and that a 512x512
    grid maximum does not exceed q_m1 + GRID_TOL; violations raise
    VerificationError.
    """
    d, _, w, o01, o02, o12 = _triplet_overlaps(triplet, word)
    p01 = float(np.angle(o01))
    p02 = float(np.angle(o02))
    phi = wrap_angle(p01 - p02 + float(np.angle(o12)))
    rd = math.sqrt(d)

    roots = gamma_roots(phi, d)
    gamma0 = roots[0]
    q_m1 = -1.0 + (2.0 / rd) * math.cos(phi / 3)
    q_m2 = ((-3.0 + 6.0 / d + (2.0 / d) * math.cos(gamma0 + phi))
            / (3.0 + (2.0 / rd) * math.cos(gamma0)))

    # The three intersections of the slanted stationary lines sit on the
    # anti-diagonal t2 = -t1 at t1 = phi/3 + 2 pi k/3.
    points = []
    norms = []
    flags = []
    h = FD_STEP
    for k in (0, 1, -1):
        t1 = phi / 3 + 2.0 * math.pi * k / 3
        t2 = -t1
        points.append((wrap_angle(t1), wrap_angle(t2)))
        _, den = q_parts(t1, t2, phi, d)
        if den <= DEGENERATE_DEN_TOL:
            flags.append(True)
            norms.append(math.nan)
            continue
        flags.append(False)
        g1 = (q_formula(t1 + h, t2, phi, d)
              - q_formula(t1 - h, t2, phi, d)) / (2 * h)
        g2 = (q_formula(t1, t2 + h, phi, d)
              - q_formula(t1, t2 - h, phi, d)) / (2 * h)
        norms.append(float(np.hypot(g1, g2)))

    t1s = -math.pi + 2.0 * math.pi * np.arange(_LINE_SAMPLES) / _LINE_SAMPLES
    variations = []
    excluded = []
    for root in roots:
        num, den = q_parts(t1s, root, phi, d)
        ok = den > DEGENERATE_DEN_TOL
        if not np.any(ok):
            raise VerificationError(
                f"every sample along theta2 = {root:.6f} is degenerate")
        line = num[ok] / den[ok]
        variations.append(float(line.max() - line.min()))
        excluded.append(int(np.sum(~ok)))

    tg = -math.pi + 2.0 * math.pi * np.arange(_GRID_SIDE) / _GRID_SIDE
    num, den = q_parts(tg[:, None], tg[None, :], phi, d)
    okg = den > DEGENERATE_DEN_TOL
    grid_max = float((num[okg] / den[okg]).max())
    grid_excluded = int(np.sum(~okg))

    if q_m1 < q_m2 - ORDER_TOL:
        raise VerificationError(
            f"branch maximum {q_m1!r} fell below line value {q_m2!r}")
    if grid_max > q_m1 + GRID_TOL:
        raise VerificationError(
            f"grid maximum {grid_max!r} exceeds q_m1 = {q_m1!r}")

    return StationaryReport(
        word=w, phi=phi, gamma0=gamma0, roots=roots, q_m1=q_m1, q_m2=q_m2,
        intersections=tuple(points), gradient_norms=tuple(norms),
        degenerate=tuple(flags), line_variations=tuple(variations),
        line_excluded=tuple(excluded), grid_max=grid_max,
        grid_excluded=grid_excluded)
