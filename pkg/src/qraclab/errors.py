"""Exception hierarchy shared across qraclab.

Three failure families matter to callers (and to the CLI exit codes):
validation of inputs, numerical breakdown, and blown compute budgets.
Everything derives from QraclabError so library users can catch broadly.
"""

from __future__ import annotations


class QraclabError(Exception):
    """Base class for all qraclab errors."""


# -- validation / usage -------------------------------------------------------

class ValidationError(QraclabError):
    """Bad input: wrong shapes, malformed files, out-of-domain parameters."""


class NonPrimeError(ValidationError):
    """Field characteristic is not prime."""


class FieldOverflowError(ValidationError):
    """Requested field order exceeds the supported bound."""


class NotPrimePowerError(ValidationError):
    """Dimension is not a prime power, so no Galois construction exists."""


class DimensionMismatchError(ValidationError):
    """Operands carry incompatible dimensions."""


class WeightError(ValidationError):
    """Request weights are negative or do not sum to one."""


class ParseError(ValidationError):
    """Basis-set file is malformed."""


class NonUnitaryError(ValidationError):
    """A loaded or supplied basis matrix is not unitary at tolerance."""


class NotUnbiasedError(ValidationError):
    """Supplied bases are not mutually unbiased at the required tolerance."""


class SeedMissingError(ValidationError):
    """A stochastic run was requested without an explicit seed."""


# -- numerical failure --------------------------------------------------------

class NumericalError(QraclabError):
    """Numerical routine failed or a certified invariant did not hold."""


class NotHermitianError(NumericalError):
    """Matrix handed to the Hermitian eigensolver is not Hermitian."""


class NoConvergenceError(NumericalError):
    """Eigensolver iteration cap exceeded; input is pathological."""


class RankDeficientError(NumericalError):
    """Orthogonalization hit a numerically dependent column."""


class UnbiasednessError(NumericalError):
    """Constructed basis set failed its own unbiasedness certification."""


class RootNotFoundError(NumericalError):
    """Bracketed root search found no sign change."""


class VerificationError(NumericalError):
    """A structural self-check (stationarity, spectra) failed."""


# -- budget -------------------------------------------------------------------

class BudgetExceededError(QraclabError):
    """Requested computation is beyond the configured budget."""
