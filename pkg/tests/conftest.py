"""Shared fixtures: deterministic synthetic market data."""

from __future__ import annotations

import pytest

from opentrend.synth import GenSpec, generate


@pytest.fixture
def grw_series():
    """A 260-day geometric random walk (fixed seed)."""
    return generate(GenSpec(kind="grw", days=260, seed=1234))


@pytest.fixture
def make_grw():
    """Factory for geometric-random-walk series of any length/seed."""

    def build(days: int, seed: int = 0, **params):
        return generate(GenSpec(kind="grw", days=days, seed=seed, params=params))

    return build
