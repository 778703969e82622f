"""Shared fixtures and small state constructors for the test suite."""

from __future__ import annotations

import numpy as np
import pytest

from discordkit import PureStateVector, QState
from discordkit.states import stream


def bell_vector() -> PureStateVector:
    return PureStateVector((2, 2), np.array([1.0, 0.0, 0.0, 1.0]) / np.sqrt(2.0))


def bell_state() -> QState:
    return bell_vector().to_density()


def ghz_vector() -> PureStateVector:
    amps = np.zeros(8)
    amps[0] = amps[7] = 1.0 / np.sqrt(2.0)
    return PureStateVector((2, 2, 2), amps)


def haar_unitary(g: np.random.Generator, n: int) -> np.ndarray:
    z = g.normal(size=(n, n)) + 1j * g.normal(size=(n, n))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


@pytest.fixture
def rng() -> np.random.Generator:
    return stream(20260810)
