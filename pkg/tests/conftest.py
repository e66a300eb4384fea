"""Shared fixtures: lazily built catalog codes, cached per session."""

from __future__ import annotations

from functools import lru_cache

import pytest

from gtreadout import binmat, construct

# keep pytest from trying to collect the TestVector dataclass
binmat.TestVector.__test__ = False

BUILD_SEED = 20260825


@lru_cache(maxsize=None)
def _build(n: int, d: int):
    desc = construct.catalog_descriptor(n, d)
    return construct.build_recipe(desc, n=n, seed=BUILD_SEED)


@pytest.fixture(scope="session")
def catalog_code():
    """Callable (n, d) -> BinaryCode for internally buildable catalog
    entries, built once per session."""
    return _build


@pytest.fixture(scope="session")
def internal_entries():
    """All (n, d) catalog keys whose recipe is internally buildable."""
    return sorted(k for k, (_, desc) in construct.TABLE1.items() if desc)
