"""Numerical laboratory for n -> 1 quantum random access codes.

Builds complete families of mutually unbiased bases in prime-power
dimensions, evaluates maximum success probabilities by eigensolver and
closed-form routes, clusters the triplet values, sweeps perturbed bases
past the unperturbed optimum, and simulates finite measurement
statistics.
"""

from .errors import (BudgetExceededError, DimensionMismatchError,
                     NoConvergenceError, NonPrimeError, NonUnitaryError,
                     NotHermitianError, NotPrimePowerError, NotUnbiasedError,
                     NumericalError, ParseError, QraclabError,
                     RankDeficientError, RootNotFoundError, SeedMissingError,
                     UnbiasednessError, ValidationError, VerificationError,
                     WeightError)
from .gf import GaloisField, factor_prime_power, is_prime
from .linalg import Eigensystem, eigh, gram_schmidt, inner
from .mub import (Basis, MubSet, check_unbiased, galois_mubs, load_bases,
                  save_bases)
from .oiscan import (Cluster, ScanReport, check_pattern, cluster_values,
                     predicted_clusters, scan, scan_to_csv, scan_to_json)
from .perturb import (SweepCurve, SweepReport, SweepSpec, default_grid,
                      perturb_set, sweep, sweep_to_csv, sweep_to_json)
from .qrac import (PhaseRecord, QracResult, ScoreOperator,
                   analytic_success_probability, analytic_word_optimum,
                   classical_baseline, max_success_probability, phase_record,
                   score_operator, triplet_eigenvalues, word_optimum)
from .shots import ShotReport, allocate_shots, shot_report, shots_to_csv, \
    shots_to_json
from .stationary import (StationaryReport, gamma_roots, q_gradient, q_value,
                         stationary_line_equation, verify_stationary_structure)

__version__ = "0.1.0"

__all__ = [
    "Basis", "BudgetExceededError", "Cluster", "DimensionMismatchError",
    "Eigensystem", "GaloisField", "MubSet", "NoConvergenceError",
    "NonPrimeError", "NonUnitaryError", "NotHermitianError",
    "NotPrimePowerError", "NotUnbiasedError", "NumericalError", "ParseError",
    "PhaseRecord", "QracResult", "QraclabError", "RankDeficientError",
    "RootNotFoundError", "ScanReport", "ScoreOperator", "SeedMissingError",
    "ShotReport", "StationaryReport", "SweepCurve", "SweepReport",
    "SweepSpec", "UnbiasednessError", "ValidationError", "VerificationError",
    "WeightError", "allocate_shots", "analytic_success_probability",
    "analytic_word_optimum", "check_pattern", "check_unbiased",
    "classical_baseline", "cluster_values", "default_grid", "eigh",
    "factor_prime_power", "galois_mubs", "gamma_roots", "gram_schmidt",
    "inner", "is_prime", "load_bases", "max_success_probability",
    "perturb_set", "phase_record", "predicted_clusters", "q_gradient",
    "q_value", "save_bases", "scan", "scan_to_csv", "scan_to_json",
    "score_operator", "shot_report", "shots_to_csv", "shots_to_json",
    "stationary_line_equation", "sweep", "sweep_to_csv", "sweep_to_json",
    "triplet_eigenvalues", "verify_stationary_structure", "word_optimum",
]
