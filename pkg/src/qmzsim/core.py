"""Units, parameter types, spatial grids and the photodetection quadrature.

Everything is expressed in natural units: the group velocity is ``c = 1``,
the guided-mode density is ``rho = 1/(2 pi)`` and rates are usually quoted
in units of the first emitter's decay rate.  Envelopes are stored in the
frame rotating at the pulse carrier frequency, so carrier and transition
frequencies only appear through detunings ``delta = omega_L - omega_0``.

Grids are cell-centred around the emitter: ``z = 0`` sits half-way between
two nodes.  Step discontinuities of the fields (pulse fronts, emission
onsets) then always fall between nodes, which keeps the trapezoidal
quadrature second-order accurate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Optional

import numpy as np
import sympy

from .errors import InvalidInputError, ResolutionError

__all__ = [
    "SPEED_OF_LIGHT",
    "MODE_DENSITY",
    "SAMPLES_PER_SCALE",
    "LONG_TIME_FACTOR",
    "EmitterParams",
    "PulseParams",
    "Grid",
    "Envelope",
    "coupling",
    "emission_amplitude",
    "shortest_scale",
    "long_time",
    "check_resolution",
    "auto_grid",
    "detection_probability",
    "exponential_pulse_amplitude",
    "make_exponential_pulse",
    "check_probability",
]

SPEED_OF_LIGHT = 1.0
MODE_DENSITY = 1.0 / (2.0 * math.pi)

SAMPLES_PER_SCALE = 50
LONG_TIME_FACTOR = 12.0

# relative slack when comparing floats that should be integers or equal
_GRID_RTOL = 1e-9


def _natural_unit_closure():
    """Check symbolically that the chosen units collapse the prefactors."""
    gamma = sympy.symbols("Gamma", positive=True)
    c = sympy.Integer(1)
    rho = 1 / (2 * sympy.pi)
    detection_prefactor = 1 / (2 * sympy.pi * rho * c)
    beta_sq = gamma * sympy.pi * rho
    g_sq = gamma / (4 * sympy.pi * rho)
    assert sympy.simplify(detection_prefactor - 1) == 0
    assert sympy.simplify(beta_sq - gamma / 2) == 0
    assert sympy.simplify(g_sq - gamma / 2) == 0


_natural_unit_closure()


def coupling(gamma: float) -> float:
    """Emitter-field coupling ``g = sqrt(gamma / (4 pi rho))``."""
    return math.sqrt(gamma / (4.0 * math.pi * MODE_DENSITY))


def emission_amplitude(gamma: float) -> float:
    """Re-emission weight ``beta = sqrt(gamma pi rho)`` of the field solution."""
    return math.sqrt(gamma * math.pi * MODE_DENSITY)


def _finite(name: str, value: float) -> float:
    value = float(value)
    if not math.isfinite(value):
        raise InvalidInputError(f"{name} must be finite, got {value!r}")
    return value


def _positive(name: str, value: float) -> float:
    value = _finite(name, value)
    if value <= 0:
        raise InvalidInputError(f"{name} must be > 0, got {value!r}")
    return value


@dataclass(frozen=True)
class EmitterParams:
    """Decay rate into guided modes and detuning of one two-level emitter."""

    gamma: float
    delta: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "gamma", _positive("gamma", self.gamma))
        object.__setattr__(self, "delta", _finite("delta", self.delta))


@dataclass(frozen=True)
class PulseParams:
    """Spectral linewidth of the exponential single-photon pulse."""

    linewidth: float

    def __post_init__(self):
        object.__setattr__(self, "linewidth", _positive("linewidth", self.linewidth))


def shortest_scale(
    gamma: Optional[float] = None,
    delta: Optional[float] = None,
    linewidth: Optional[float] = None,
) -> float:
    """Shortest length (= time) scale set by the given rates."""
    scales = [math.inf]
    if gamma is not None:
        scales.append(1.0 / gamma)
        scales.append(1.0 / max(abs(delta or 0.0), gamma))
    elif delta:
        scales.append(1.0 / abs(delta))
    if linewidth is not None:
        scales.append(1.0 / linewidth)
    return min(scales) * SPEED_OF_LIGHT


def long_time(gammas: Iterable[float], linewidth: float, factor: float = 1.0) -> float:
    """Readout horizon after which the last emitter has returned to the ground state.

    Every scattering stage stretches the packet by its emitter's lifetime, so
    the lifetimes of a chain of emitters add up.
    """
    lifetimes = sum(1.0 / g for g in gammas)
    return factor * LONG_TIME_FACTOR * (lifetimes + 1.0 / linewidth)


@dataclass(frozen=True)
class Grid:
    """Uniform cell-centred spatial grid with a matching time horizon.

    Nodes are ``z_min + j * dz`` for ``j = 0 .. n_points - 1``.  The origin
    must lie exactly half-way between two nodes and ``t_final`` must be a
    whole number of steps ``dt = dz / c``; free propagation over one step is
    then an exact shift by one node.
    """

    z_min: float
    z_max: float
    n_points: int
    t_final: float

    def __post_init__(self):
        z_min = _finite("z_min", self.z_min)
        z_max = _finite("z_max", self.z_max)
        if not z_min < 0 < z_max:
            raise InvalidInputError(f"grid must satisfy z_min < 0 < z_max, got [{z_min}, {z_max}]")
        if int(self.n_points) != self.n_points or self.n_points < 2:
            raise InvalidInputError(f"n_points must be an integer >= 2, got {self.n_points!r}")
        object.__setattr__(self, "n_points", int(self.n_points))
        _positive("t_final", self.t_final)
        offset = -z_min / self.dz - 0.5
        if abs(offset - round(offset)) > 1e-6:
            raise InvalidInputError("z = 0 must fall half-way between two grid nodes")
        steps = self.t_final / self.dt
        if abs(steps - round(steps)) > 1e-6 * max(1.0, steps):
            raise InvalidInputError("t_final must be a whole number of time steps dt = dz/c")

    @classmethod
    def build(cls, dz: float, half_width: float, t_final: float) -> "Grid":
        """Symmetric grid with spacing ``dz`` whose outermost cells lie beyond ``half_width``.

        Each side holds ``ceil(half_width / dz) + 1`` nodes, so a packet
        front that has travelled ``half_width`` still sits between nodes.
        ``t_final`` is rounded up to a whole number of steps.
        """
        dz = _positive("dz", dz)
        half_width = _positive("half_width", half_width)
        n_side = math.ceil(half_width / dz - _GRID_RTOL) + 1
        steps = max(1, math.ceil(t_final / dz - _GRID_RTOL))
        edge = (n_side - 0.5) * dz
        return cls(-edge, edge, 2 * n_side, steps * dz)

    @property
    def dz(self) -> float:
        return (self.z_max - self.z_min) / (self.n_points - 1)

    @property
    def dt(self) -> float:
        return self.dz / SPEED_OF_LIGHT

    @property
    def n_steps(self) -> int:
        """Number of time steps between 0 and ``t_final``."""
        return int(round(self.t_final / self.dt))

    @property
    def n_negative(self) -> int:
        """Number of nodes on the ``z < 0`` side of the emitter."""
        return int(round(-self.z_min / self.dz + 0.5))

    @cached_property
    def z(self) -> np.ndarray:
        nodes = self.z_min + self.dz * np.arange(self.n_points)
        nodes.setflags(write=False)
        return nodes

    def times(self) -> np.ndarray:
        return self.dt * np.arange(self.n_steps + 1)


def check_resolution(grid: Grid, gamma=None, delta=None, linewidth=None) -> None:
    """Raise :class:`ResolutionError` unless ``grid`` resolves every given rate."""
    limit = shortest_scale(gamma, delta, linewidth) / SAMPLES_PER_SCALE
    if grid.dz > limit * (1.0 + _GRID_RTOL):
        raise ResolutionError(
            f"grid spacing dz={grid.dz:.6g} exceeds the resolution limit {limit:.6g} "
            f"(gamma={gamma}, delta={delta}, linewidth={linewidth}; "
            f"{SAMPLES_PER_SCALE} samples per shortest scale required)"
        )


def auto_grid(
    emitters: Iterable[EmitterParams],
    pulse: PulseParams,
    resolution_factor: float = 1.0,
    tfinal_factor: float = 1.0,
) -> Grid:
    """Smallest symmetric grid that resolves all emitters and the pulse.

    The half-width equals the readout horizon so every packet launched at
    ``t = 0`` stays on the grid until ``t_final``.
    """
    emitters = list(emitters)
    if not emitters:
        raise InvalidInputError("at least one emitter is required")
    resolution_factor = _positive("resolution_factor", resolution_factor)
    tfinal_factor = _positive("tfinal_factor", tfinal_factor)
    scale = min(shortest_scale(e.gamma, e.delta, pulse.linewidth) for e in emitters)
    dz = scale / (SAMPLES_PER_SCALE * resolution_factor)
    horizon = long_time((e.gamma for e in emitters), pulse.linewidth, tfinal_factor)
    return Grid.build(dz, horizon, horizon)


@dataclass(frozen=True, eq=False)
class Envelope:
    """Complex rotating-frame amplitudes of one channel sampled on a grid."""

    grid: Grid
    amps: np.ndarray = field(repr=False)

    def __post_init__(self):
        amps = np.asarray(self.amps, dtype=complex)
        if amps is self.amps and amps.flags.writeable:
            amps = amps.copy()
        if amps.ndim != 1 or amps.shape[0] != self.grid.n_points:
            raise InvalidInputError(
                f"envelope needs {self.grid.n_points} samples, got shape {amps.shape}"
            )
        # a single non-finite sample poisons the sum
        if not np.isfinite(amps.sum()):
            raise InvalidInputError("envelope amplitudes must be finite")
        amps.setflags(write=False)
        object.__setattr__(self, "amps", amps)

    @classmethod
    def zeros(cls, grid: Grid) -> "Envelope":
        return cls(grid, np.zeros(grid.n_points, dtype=complex))

    def norm(self) -> float:
        return detection_probability(self)


def detection_probability(env: Envelope) -> float:
    """Photodetection probability of one channel, ``int |phi|^2 dz``.

    The ``1/(2 pi rho c)`` prefactor is exactly one in natural units.
    Composite trapezoidal rule on the envelope's grid.
    """
    amps = np.asarray(env.amps)
    density = amps.real**2 + amps.imag**2
    prefactor = 1.0 / (2.0 * math.pi * MODE_DENSITY * SPEED_OF_LIGHT)
    value = prefactor * float(np.trapezoid(density, dx=env.grid.dz))
    if not math.isfinite(value):
        raise InvalidInputError("envelope amplitudes must be finite")
    return value


def exponential_pulse_amplitude(z, linewidth: float) -> np.ndarray:
    """Rotating-frame profile ``sqrt(D) * Theta(-z) * exp(D z / (2c))``.

    ``Theta(0)`` is taken as one, so ``z = 0`` returns the left limit.
    """
    z = np.asarray(z, dtype=float)
    rate = 0.5 * linewidth / SPEED_OF_LIGHT
    # N / sqrt(2 pi rho c) with N = sqrt(2 pi rho D)
    height = math.sqrt(linewidth / SPEED_OF_LIGHT)
    inside = z <= 0
    out = np.zeros(z.shape, dtype=complex)
    out[inside] = height * np.exp(rate * z[inside])
    return out


def make_exponential_pulse(pulse: PulseParams, grid: Grid) -> Envelope:
    """Sample the normalized exponential single-photon pulse on ``grid``."""
    check_resolution(grid, linewidth=pulse.linewidth)
    return Envelope(grid, exponential_pulse_amplitude(grid.z, pulse.linewidth))


def check_probability(value: float, tol: float, name: str = "probability") -> float:
    """Validate ``0 <= value <= 1 + tol`` (with the same slack below zero)."""
    value = float(value)
    if not math.isfinite(value) or value < -tol or value > 1.0 + tol:
        raise InvalidInputError(f"{name}={value!r} outside [0, 1] (tolerance {tol:g})")
    return value
