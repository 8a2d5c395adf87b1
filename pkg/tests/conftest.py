"""Shared fixtures: construction is deterministic, so basis sets are
built once per session and reused everywhere."""

from functools import lru_cache

import pytest

from qraclab.mub import galois_mubs


@lru_cache(maxsize=None)
def _cached_mubs(d: int):
    return galois_mubs(d)


@pytest.fixture(scope="session")
def mubs():
    """Callable returning the cached complete basis set for a dimension."""
    return _cached_mubs
