"""Closed-form photodetection probabilities for one and two emitters.

The two-emitter expressions contain poles that cancel in the physical
probability: ``B`` at ``linewidth = gamma1, delta1 = 0``, ``K1`` at
``linewidth = gamma2, delta2 = 0`` and ``K2`` for identical emitters
(``gamma2 = gamma1, delta2 = delta1``).  Near these points the sum of large
terms cancels to O(1), so all arithmetic runs in extended precision, and
exactly at a pole the probability is the average of two symmetric
neighbouring evaluations.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Tuple

import mpmath

from .errors import ConsistencyError, InvalidInputError

__all__ = [
    "ANALYTIC_TOL",
    "SINGULAR_EPS",
    "QmzParams",
    "AppendixConstants",
    "p1_reflect",
    "p1_transmit",
    "p1_reflect_factored",
    "single_probabilities",
    "appendix_constants",
    "p2_transmit",
    "qmz_probabilities",
]

ANALYTIC_TOL = 1e-9
# pole detection threshold, in units of gamma1
SINGULAR_EPS = 1e-7
_PERTURBATION = 10.0 * SINGULAR_EPS
_RANGE_SLACK = 1e-6

_mp = mpmath.MPContext()
_mp.dps = 40


def _check_rates(**rates: float) -> None:
    for name, value in rates.items():
        if not math.isfinite(value) or value <= 0:
            raise InvalidInputError(f"{name} must be > 0, got {value!r}")


def _check_finite(**values: float) -> None:
    for name, value in values.items():
        if not math.isfinite(value):
            raise InvalidInputError(f"{name} must be finite, got {value!r}")


@dataclass(frozen=True)
class QmzParams:
    """Rates defining the two-emitter interferometer and its input pulse."""

    gamma1: float = 1.0
    gamma2: float = 1.0
    delta1: float = 0.0
    delta2: float = 0.0
    linewidth: float = 0.001

    def __post_init__(self):
        for name in ("gamma1", "gamma2", "delta1", "delta2", "linewidth"):
            object.__setattr__(self, name, float(getattr(self, name)))
        _check_rates(gamma1=self.gamma1, gamma2=self.gamma2, linewidth=self.linewidth)
        _check_finite(delta1=self.delta1, delta2=self.delta2)


@dataclass(frozen=True)
class AppendixConstants:
    """Intermediate constants of the two-emitter probability.

    When ``perturbed`` is set the parameters sat on a pole and the constants
    belong to the neighbouring point ``delta1 + h, delta2 + 2h``.
    """

    b_const: complex
    k1: complex
    k2: complex
    lambda_sum: float
    mu: complex
    mu1: complex
    mu2: complex
    mu12: complex
    perturbed: bool = False
    perturbation: float = 0.0


def p1_reflect(gamma1: float, delta1: float, linewidth: float) -> float:
    """Probability that a single emitter reflects the pulse into channel ``b``.

    Uses the pole-free form ``g (g + D) / ((g + D)^2 + 4 d^2)``, algebraically
    identical to the product of a Lorentzian and the linewidth correction
    (the factor ``(g - D)^2 + 4 d^2`` cancels).  At ``D = g, d = 0`` it
    returns the limit 1/2.
    """
    _check_rates(gamma1=gamma1, linewidth=linewidth)
    _check_finite(delta1=delta1)
    width = gamma1 + linewidth
    return gamma1 * width / (width * width + 4.0 * delta1 * delta1)


def p1_transmit(gamma1: float, delta1: float, linewidth: float) -> float:
    return 1.0 - p1_reflect(gamma1, delta1, linewidth)


def p1_reflect_factored(gamma1: float, delta1: float, linewidth: float) -> float:
    """Literal two-factor form of the reflection probability.

    Undefined at ``linewidth = gamma1, delta1 = 0``; kept as an independent
    check of :func:`p1_reflect`.
    """
    g, d, w = gamma1, delta1, linewidth
    lorentz = g * g / ((g - w) ** 2 + (2 * d) ** 2)
    return lorentz * (1 + w / g - 4 * w * (g + w) / ((g + w) ** 2 + (2 * d) ** 2))


def single_probabilities(gamma1: float, delta1: float, linewidth: float) -> Tuple[float, float]:
    """``(p_a, p_b)`` after one emitter."""
    p_b = p1_reflect(gamma1, delta1, linewidth)
    return 1.0 - p_b, p_b


def _pole_denominators(g1, g2, d1, d2, w):
    return (
        complex((g1 - w) / 2, -d1),
        complex((g2 - w) / 2, -d2),
        complex((g2 - g1) / 2, -(d2 - d1)),
    )


def _evaluate(g1, g2, d1, d2, w):
    """Constants and ``p2_a`` in extended precision."""
    mp = _mp
    g1, g2, d1, d2, w = (mp.mpf(x) for x in (g1, g2, d1, d2, w))
    b = -g1 * mp.sqrt(w / 2) / mp.mpc((g1 - w) / 2, -d1)
    k1 = -(g2 / 2) * (mp.sqrt(2 * w) + 2 * b) / mp.mpc((g2 - w) / 2, -d2)
    k2 = g2 * b / mp.mpc((g2 - g1) / 2, -(d2 - d1))
    first = b + k1
    second = -b + k2
    third = -k1 - k2
    lam = abs(first) ** 2 / w + abs(second) ** 2 / g1 + abs(third) ** 2 / g2
    mu1 = mp.conj(first) * second / mp.mpc((w + g1) / 2, -d1)
    mu2 = mp.conj(first) * third / mp.mpc((w + g2) / 2, -d2)
    mu12 = mp.conj(second) * third / mp.mpc((g1 + g2) / 2, -(d2 - d1))
    mu = mu1 + mu2 + mu12
    p2a = (lam + 2 * mp.re(mu)) / 2
    return (b, k1, k2, lam, mu, mu1, mu2, mu12), p2a


def _pole_shift(p: QmzParams) -> float:
    eps = SINGULAR_EPS * p.gamma1
    dens = _pole_denominators(p.gamma1, p.gamma2, p.delta1, p.delta2, p.linewidth)
    if any(abs(den) < eps for den in dens):
        return _PERTURBATION * p.gamma1
    return 0.0


def _shifted(p: QmzParams, h: float):
    # moves delta1 by h and delta2 by 2h, which detunes all three poles at once
    return (p.gamma1, p.gamma2, p.delta1 + h, p.delta2 + 2 * h, p.linewidth)


def appendix_constants(p: QmzParams) -> AppendixConstants:
    """Constants ``B, K1, K2, Lambda, mu`` of the two-emitter probability."""
    h = _pole_shift(p)
    values, _ = _evaluate(*_shifted(p, h))
    b, k1, k2, lam, mu, mu1, mu2, mu12 = values
    return AppendixConstants(
        complex(b),
        complex(k1),
        complex(k2),
        float(lam),
        complex(mu),
        complex(mu1),
        complex(mu2),
        complex(mu12),
        perturbed=bool(h),
        perturbation=h,
    )


def p2_transmit(p: QmzParams) -> float:
    """Probability that the photon leaves the interferometer in channel ``a``.

    ``(Lambda + 2 Re mu) / 2``.  At a pole, the mean of the values at the
    symmetric shifts ``+-h`` is returned; the odd error term cancels.
    """
    h = _pole_shift(p)
    if h:
        value = (_evaluate(*_shifted(p, h))[1] + _evaluate(*_shifted(p, -h))[1]) / 2
    else:
        value = _evaluate(*_shifted(p, 0.0))[1]
    value = float(value)
    if not math.isfinite(value) or value < -_RANGE_SLACK or value > 1.0 + _RANGE_SLACK:
        raise ConsistencyError(f"p2_a={value!r} outside [0, 1] at {p}")
    if -ANALYTIC_TOL <= value < 0.0:
        return 0.0
    if 1.0 < value <= 1.0 + ANALYTIC_TOL:
        return 1.0
    if value < 0.0 or value > 1.0:
        warnings.warn(f"p2_a={value!r} slightly outside [0, 1] at {p}", RuntimeWarning, stacklevel=2)
    return value


def qmz_probabilities(p: QmzParams) -> Tuple[float, float]:
    """``(p_a, p_b)`` at the interferometer output."""
    p_a = p2_transmit(p)
    return p_a, 1.0 - p_a
