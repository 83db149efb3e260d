"""Shared test fixtures for snrbound tests.

Provides the standard problems and a small Monte Carlo config so most tests
run in well under a second. Acceptance-scale runs are marked ``slow``.
"""

from __future__ import annotations

import pytest

from snrbound import events
from snrbound.models import Problem, SampleConfig


@pytest.fixture(autouse=True)
def _clear_events():
    """Every test starts with an empty event buffer."""
    events.clear()
    yield
    events.clear()


@pytest.fixture
def bounded() -> Problem:
    """(p, k, m) = (5, 20, 2): m <= sqrt(p), the envelope sits below the MLE."""
    return Problem(p=5, k=20, m=2.0)


@pytest.fixture
def crossing() -> Problem:
    """(p, k, m) = (5, 20, 3): m > sqrt(p), the MLE crosses the envelope."""
    return Problem(p=5, k=20, m=3.0)


@pytest.fixture
def small_p() -> Problem:
    return Problem(p=3, k=20, m=3.0)


@pytest.fixture
def small_cfg() -> SampleConfig:
    return SampleConfig(replicates=20_000, seed=7, chunk_size=5_000)
