"""Monochromatic transfer matrices for one emitter and for the interferometer.

A matrix acts on the channel vector ``[a, b]``: ``out = M @ in``.  One
emitter with ``lam = gamma / (2 delta)`` gives

    M(lam) = 1 / (1 - i lam) * [[1, i lam], [i lam, 1]]

and the interferometer is ``M2 @ SIGMA_X @ M1``, the swap sending the
forward output of the first emitter into the backward input of the second.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from .errors import InvalidInputError

__all__ = [
    "SIGMA_X",
    "LambdaParam",
    "TransferMatrix2",
    "emitter_matrix",
    "qmz_matrix",
    "output_probabilities",
]

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_X.setflags(write=False)

_UNITARY_TOL = 1e-9
_CHANNELS = {"a": 0, "b": 1}


@dataclass(frozen=True)
class LambdaParam:
    """Ratio ``gamma / (2 delta)``; ``resonant`` marks ``delta = 0``."""

    value: float = 0.0
    resonant: bool = False

    def __post_init__(self):
        if self.resonant:
            object.__setattr__(self, "value", math.inf)
        elif not math.isfinite(self.value):
            raise InvalidInputError("use LambdaParam.at_resonance() instead of an infinite lambda")

    @classmethod
    def at_resonance(cls) -> "LambdaParam":
        return cls(resonant=True)

    @classmethod
    def from_detuning(cls, gamma: float, delta: float) -> "LambdaParam":
        if not math.isfinite(gamma) or gamma <= 0:
            raise InvalidInputError(f"gamma must be > 0, got {gamma!r}")
        if not math.isfinite(delta):
            raise InvalidInputError(f"delta must be finite, got {delta!r}")
        if delta == 0:
            return cls.at_resonance()
        return cls(gamma / (2.0 * delta))


@dataclass(frozen=True, eq=False)
class TransferMatrix2:
    """2x2 complex matrix on the ``[a, b]`` channel vector."""

    entries: np.ndarray

    def __post_init__(self):
        m = np.array(self.entries, dtype=complex)
        if m.shape != (2, 2):
            raise InvalidInputError(f"transfer matrix must be 2x2, got shape {m.shape}")
        m.setflags(write=False)
        object.__setattr__(self, "entries", m)

    def __matmul__(self, other: "TransferMatrix2") -> "TransferMatrix2":
        return TransferMatrix2(self.entries @ other.entries)

    def unitarity_error(self) -> float:
        """Largest entrywise deviation of ``M^dagger M`` from the identity."""
        m = self.entries
        return float(np.max(np.abs(m.conj().T @ m - np.eye(2))))


def emitter_matrix(lam: LambdaParam) -> TransferMatrix2:
    """Transfer matrix of one emitter; the resonant limit is ``[[0, -1], [-1, 0]]``."""
    if lam.resonant:
        return TransferMatrix2([[0, -1], [-1, 0]])
    x = lam.value
    t = 1.0 / complex(1.0, -x)
    r = 1j * x * t
    return TransferMatrix2([[t, r], [r, t]])


def qmz_matrix(lambda1: LambdaParam, lambda2: LambdaParam) -> TransferMatrix2:
    return emitter_matrix(lambda2) @ TransferMatrix2(SIGMA_X) @ emitter_matrix(lambda1)


def output_probabilities(m: TransferMatrix2, channel: str = "a") -> Tuple[float, float]:
    """``(p_a, p_b)`` for a photon entering through ``channel``."""
    if channel not in _CHANNELS:
        raise InvalidInputError(f"input channel must be 'a' or 'b', got {channel!r}")
    err = m.unitarity_error()
    if err > _UNITARY_TOL:
        raise InvalidInputError(f"transfer matrix is not unitary (deviation {err:.3g})")
    column = m.entries[:, _CHANNELS[channel]]
    p_a, p_b = np.abs(column) ** 2
    return float(p_a), float(p_b)
