"""Shot-noise Monte Carlo for the two 3 -> 1 scenarios of one dimension.

Simulates the finite-statistics experiment: Alice's word and Bob's
question are uniform, Alice sends the optimal encoding state, Bob
measures one basis of the triplet and succeeds when his outcome equals
the requested digit.  A fixed shot budget is spread over all (word,
question) settings by largest remainder, each setting draws multinomial
counts from the Born distribution, and the per-trial estimate is total
successes over total shots.

Two scenarios run side by side, one triplet from the top value cluster
and one from the bottom, so the report can state how many combined
standard deviations separate their estimates.  Analytic mode skips
sampling entirely and returns the closed-form average, which therefore
agrees bit for bit with the scan values.

Trials use independent Philox substreams keyed by (seed, scenario,
trial), so running trials in any order or in parallel cannot change the
numbers.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from itertools import product

import numpy as np

from .errors import SeedMissingError, ValidationError
from .mub import MubSet
from .oiscan import ScanReport, TripletId, scan
from .qrac import analytic_success_probability, analytic_word_optimum

MIN_TRIALS = 2

GENERATOR_NAME = f"numpy Philox4x64-10, numpy {np.__version__}"


# -- shot allocation ---------------------------------------------------------


def allocate_shots(total: int, settings: int) -> np.ndarray:
    """Spread `total` shots over `settings` slots by largest remainder.

    Every slot has the same quota total/settings, so all fractional
    remainders tie; the leftover shots go to the lowest slot indices.
    The returned counts sum to `total` exactly.
    """
    if total < 1:
        raise ValidationError(f"need at least one shot, got {total}")
    if settings < 1:
        raise ValidationError(f"need at least one setting, got {settings}")
    counts = np.full(settings, total // settings, dtype=np.int64)
    counts[: total % settings] += 1
    return counts


# -- report ------------------------------------------------------------------


@dataclass(frozen=True)
class ShotReport:
    """Per-scenario estimates and the combined-sigma separation.

    estimates hold one value per trial; exact is the closed-form value
    of the same triplet.  sigma_gap is (mean+ - mean-) over the root sum
    of squared trial deviations, inf when both deviations vanish but the
    means differ (analytic mode).
    """

    dim: int
    shots: int
    trials: int
    seed: int | None
    mode: str
    generator: str
    plus_subset: TripletId
    minus_subset: TripletId
    plus_exact: float
    minus_exact: float
    plus_estimates: tuple[float, ...]
    minus_estimates: tuple[float, ...]
    plus_mean: float
    plus_sd: float
    minus_mean: float
    minus_sd: float
    sigma_gap: float


# -- sampling ----------------------------------------------------------------


def _born_tables(triplet, d: int) -> np.ndarray:
    """probs[x0, x1, x2, y, i] = Born weight of outcome i when the word's
    optimal state meets basis y of the triplet."""
    mats = [np.asarray(b.matrix) for b in triplet]
    probs = np.empty((d, d, d, 3, d))
    for word in product(range(d), repeat=3):
        _, state = analytic_word_optimum(triplet, word)
        for y in range(3):
            amp = mats[y].conj().T @ state
            probs[word][y] = np.abs(amp) ** 2
    # clip tiny negative round-off and renormalize each distribution
    np.clip(probs, 0.0, None, out=probs)
    probs /= probs.sum(axis=-1, keepdims=True)
    return probs


def _trial_stream(seed: int, scenario: int, trial: int) -> np.random.Generator:
    key = np.array([seed, (scenario << 32) | trial], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def _sample_trial(probs: np.ndarray, counts: np.ndarray,
                  rng: np.random.Generator, d: int) -> float:
    successes = 0
    pos = 0
    for word in product(range(d), repeat=3):
        for y in range(3):
            n = int(counts[pos])
            pos += 1
            if n == 0:
                continue
            draw = rng.multinomial(n, probs[word][y])
            successes += int(draw[word[y]])
    return successes / counts.sum()


def _scenario_subsets(mubs: MubSet, scan_report: ScanReport | None):
    report = scan_report if scan_report is not None else scan(mubs)
    if report.dim != mubs.dim:
        raise ValidationError(
            f"scan dimension {report.dim} does not match bases {mubs.dim}")
    plus = report.clusters[-1].members[0]
    minus = report.clusters[0].members[0]
    return plus, minus


def shot_report(mubs: MubSet, shots: int, trials: int, seed: int | None,
                *, subsets: tuple[TripletId, TripletId] | None = None,
                mode: str = "sample",
                scan_report: ScanReport | None = None) -> ShotReport:
    """Run both scenarios and report means, deviations and the sigma gap.

    subsets overrides the scan-derived (plus, minus) triplet pair; mode
    "analytic" evaluates the infinite-shot expectation instead of
    sampling (seed unused, deviations zero).
    """
    if mode not in ("sample", "analytic"):
        raise ValidationError(f"unknown mode {mode!r}")
    d = mubs.dim
    if subsets is None:
        plus, minus = _scenario_subsets(mubs, scan_report)
    else:
        plus, minus = (tuple(sorted(int(i) for i in s)) for s in subsets)
    trip_plus = [mubs.bases[i] for i in plus]
    trip_minus = [mubs.bases[i] for i in minus]
    exact_plus = analytic_success_probability(trip_plus).value
    exact_minus = analytic_success_probability(trip_minus).value

    if mode == "analytic":
        est_plus = (exact_plus,) * max(trials, 1)
        est_minus = (exact_minus,) * max(trials, 1)
    else:
        if trials < MIN_TRIALS:
            raise ValidationError(
                f"sampling needs at least {MIN_TRIALS} trials for a "
                f"deviation estimate, got {trials}")
        if seed is None:
            raise SeedMissingError("sampling requires an explicit seed")
        if shots < 1:
            raise ValidationError(f"need at least one shot, got {shots}")
        counts = allocate_shots(shots, 3 * d ** 3)
        est = []
        for scenario, trip in enumerate((trip_plus, trip_minus)):
            probs = _born_tables(trip, d)
            est.append(tuple(
                _sample_trial(probs, counts, _trial_stream(seed, scenario, t), d)
                for t in range(trials)))
        est_plus, est_minus = est

    mean_p = float(np.mean(est_plus))
    mean_m = float(np.mean(est_minus))
    sd_p = float(np.std(est_plus, ddof=1)) if len(est_plus) > 1 else 0.0
    sd_m = float(np.std(est_minus, ddof=1)) if len(est_minus) > 1 else 0.0
    denom = math.hypot(sd_p, sd_m)
    diff = mean_p - mean_m
    if denom > 0.0:
        gap = diff / denom
    else:
        gap = 0.0 if diff == 0.0 else math.copysign(math.inf, diff)
    return ShotReport(
        dim=d, shots=shots, trials=trials,
        seed=None if mode == "analytic" else seed, mode=mode,
        generator=GENERATOR_NAME,
        plus_subset=plus, minus_subset=minus,
        plus_exact=exact_plus, minus_exact=exact_minus,
        plus_estimates=est_plus, minus_estimates=est_minus,
        plus_mean=mean_p, plus_sd=sd_p, minus_mean=mean_m, minus_sd=sd_m,
        sigma_gap=gap,
    )


# -- serialization -----------------------------------------------------------


def shots_to_csv(report: ShotReport) -> str:
    lines = ["scenario,subset,trial,P_hat"]
    for name, subset, ests in (
            ("plus", report.plus_subset, report.plus_estimates),
            ("minus", report.minus_subset, report.minus_estimates)):
        tag = " ".join(str(i) for i in subset)
        for t, v in enumerate(ests):
            lines.append(f"{name},{tag},{t},{v:.17g}")
    return "\n".join(lines) + "\n"


def shots_to_json(report: ShotReport) -> str:
    # inf has no JSON token, so an infinite gap serializes as null
    gap = report.sigma_gap if math.isfinite(report.sigma_gap) else None
    payload = {
        "dim": report.dim,
        "shots": report.shots,
        "trials": report.trials,
        "seed": report.seed,
        "mode": report.mode,
        "generator": report.generator,
        "scenarios": {
            "plus": {
                "subset": list(report.plus_subset),
                "exact": report.plus_exact,
                "estimates": list(report.plus_estimates),
                "mean": report.plus_mean,
                "sd": report.plus_sd,
            },
            "minus": {
                "subset": list(report.minus_subset),
                "exact": report.minus_exact,
                "estimates": list(report.minus_estimates),
                "mean": report.minus_mean,
                "sd": report.minus_sd,
            },
        },
        "sigma_gap": gap,
    }
    return json.dumps(payload, indent=2) + "\n"
