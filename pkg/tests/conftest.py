"""Shared fixtures: fast search settings and the protocol test double."""

from __future__ import annotations

import sys
from pathlib import Path

import pytest

TESTS_DIR = Path(__file__).resolve().parent

# Make the oracle helpers importable as plain modules from any test file.
if str(TESTS_DIR) not in sys.path:
    sys.path.insert(0, str(TESTS_DIR))


@pytest.fixture
def fake_bridge_cmd():
    """Command prefix that launches the protocol test double."""

    def build(*flags: str) -> list[str]:
        return [sys.executable, "-u", str(TESTS_DIR / "fake_bridge.py"), *flags]

    return build


@pytest.fixture
def small_config():
    """A search configuration small enough for unit tests."""
    from equigen import SearchConfig

    def build(**overrides):
        params = dict(
            population_size=8,
            generations=3,
            images_per_individual=4,
            seed=11,
        )
        params.update(overrides)
        return SearchConfig(**params)

    return build
