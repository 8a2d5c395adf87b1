"""Scan all three-basis subsets of a MUB family and cluster their values.

For a family of d+1 unbiased bases each of the C(d+1, 3) subsets has an
analytic 3 -> 1 success probability.  Collecting the distinct values tells
whether the family splits into operationally inequivalent subsets: the
observed pattern is two clusters when d = 1 (mod 4) and one otherwise.
Clustering is plain single linkage on the sorted values; a gap-safety
ratio is logged so that a dimension whose clusters crowd the tolerance
flags itself instead of silently miscounting.
"""

from __future__ import annotations

import itertools
import json
import logging
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError, VerificationError
from .mub import MubSet
from .qrac import analytic_success_probability

DEFAULT_TOL = 1e-9
GAP_SAFETY = 1e3

log = logging.getLogger(__name__)

TripletId = tuple[int, int, int]


@dataclass(frozen=True)
class Cluster:
    """One group of numerically identical scan values."""

    value: float
    members: tuple[TripletId, ...]


@dataclass(frozen=True)
class ScanReport:
    """Clustered 3 -> 1 values of every three-basis subset of one family.

    entries are ordered by TripletId, clusters by ascending value;
    gap_ratio is the smallest between-cluster gap over tol (inf when a
    single cluster remains).
    """

    dim: int
    tol: float
    entries: tuple[tuple[TripletId, float], ...]
    clusters: tuple[Cluster, ...]
    n_clusters: int
    p_plus: float
    p_minus: float
    predicted_n: int
    agrees: bool
    gap_ratio: float


def predicted_clusters(d: int) -> int:
    """Expected number of distinct values: two when d = 1 (mod 4)."""
    return 2 if d % 4 == 1 else 1


def cluster_values(values, tol: float):
    """Single-linkage groups of a 1-D value list.

    Returns tuples of indices into values, ordered by ascending value; a
    gap larger than tol between sorted neighbours starts a new group.
    """
    if tol <= 0:
        raise ValidationError(f"clustering tolerance must be positive, got {tol!r}")
    vals = np.asarray(list(values), dtype=float)
    if vals.size == 0:
        return ()
    order = np.argsort(vals, kind="stable")
    groups = []
    current = [int(order[0])]
    for prev, nxt in zip(order, order[1:]):
        if vals[nxt] - vals[prev] > tol:
            groups.append(tuple(current))
            current = []
        current.append(int(nxt))
    groups.append(tuple(current))
    return tuple(groups)


def scan(mubs: MubSet, tol: float = DEFAULT_TOL) -> ScanReport:
    """Evaluate every three-basis subset of mubs and cluster the values."""
    d = mubs.dim
    ids = list(itertools.combinations(range(len(mubs.bases)), 3))
    values = [
        analytic_success_probability([mubs.bases[i] for i in t]).value
        for t in ids
    ]
    groups = cluster_values(values, tol)

    clusters = []
    for g in groups:
        vals = [values[i] for i in g]
        spread = max(vals) - min(vals)
        if spread > tol:
            raise VerificationError(
                f"cluster spread {spread:.3e} exceeds tol {tol:.3e} for d={d}; "
                "values chain across the tolerance")
        clusters.append(Cluster(value=float(np.mean(vals)),
                                members=tuple(ids[i] for i in g)))

    reps = [c.value for c in clusters]
    if len(reps) > 1:
        gap = min(b - a for a, b in zip(reps, reps[1:]))
        ratio = gap / tol
    else:
        ratio = float("inf")
    if ratio < GAP_SAFETY:
        log.warning("d=%d cluster gap only %.1f x tol; pattern count is fragile",
                    d, ratio)
    else:
        log.info("d=%d clusters=%d gap ratio %.3g x tol", d, len(reps), ratio)

    predicted = predicted_clusters(d)
    return ScanReport(
        dim=d, tol=tol,
        entries=tuple((t, float(v)) for t, v in zip(ids, values)),
        clusters=tuple(clusters),
        n_clusters=len(clusters),
        p_plus=reps[-1], p_minus=reps[0],
        predicted_n=predicted,
        agrees=len(clusters) == predicted,
        gap_ratio=float(ratio))


def check_pattern(report: ScanReport) -> bool:
    """True iff the observed cluster count matches the d mod 4 prediction."""
    return report.n_clusters == predicted_clusters(report.dim)


# -- serialization ---------------------------------------------------------------


def scan_to_csv(report: ScanReport) -> str:
    """One row per subset: mu1,mu2,mu3,P with 17 significant digits."""
    lines = ["mu1,mu2,mu3,P"]
    for (m1, m2, m3), value in report.entries:
        lines.append(f"{m1},{m2},{m3},{value:.17g}")
    return "\n".join(lines) + "\n"


def scan_to_json(report: ScanReport) -> str:
    """Full report as a JSON document with a trailing newline."""
    doc = {
        "dim": report.dim,
        "tol": report.tol,
        "entries": [{"triplet": list(t), "P": v} for t, v in report.entries],
        "clusters": [
            {"value": c.value, "members": [list(t) for t in c.members]}
            for c in report.clusters
        ],
        "N": report.n_clusters,
        "P_plus": report.p_plus,
        "P_minus": report.p_minus,
        "predicted_N": report.predicted_n,
        "agrees": report.agrees,
        # null rather than the non-JSON Infinity token for single-cluster scans
        "gap_ratio": report.gap_ratio if np.isfinite(report.gap_ratio) else None,
    }
    return json.dumps(doc, indent=2) + "\n"