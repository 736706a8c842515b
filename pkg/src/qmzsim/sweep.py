"""Parameter sweeps over detunings or linewidth, and the figure presets."""

from __future__ import annotations

import itertools
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import analytic, dynamics, transfer
from .analytic import QmzParams
from .core import EmitterParams, PulseParams, auto_grid
from .errors import InvalidInputError, ResourceError

__all__ = [
    "METHODS",
    "SCAN_VARIABLES",
    "DEFAULT_MEMORY_BUDGET",
    "SweepSpec",
    "SweepRow",
    "Preset",
    "PRESETS",
    "evaluate_point",
    "scan_values",
    "run_sweep",
    "run_preset",
    "preset_names",
]

METHODS = ("analytic", "dynamics", "transfer")
SCAN_VARIABLES = ("delta1", "delta2", "delta_both", "linewidth")
DEFAULT_MEMORY_BUDGET = 2 * 1024**3


@dataclass(frozen=True)
class SweepSpec:
    method: str
    scan_variable: str
    start: float
    stop: float
    n_points: int
    spacing: str = "linear"
    fixed: QmzParams = field(default_factory=QmzParams)
    stage: str = "two"

    def __post_init__(self):
        if self.method not in METHODS + ("all",):
            raise InvalidInputError(f"method must be one of {METHODS + ('all',)}, got {self.method!r}")
        if self.scan_variable not in SCAN_VARIABLES:
            raise InvalidInputError(f"scan_variable must be one of {SCAN_VARIABLES}, got {self.scan_variable!r}")
        if self.stage not in ("one", "two"):
            raise InvalidInputError(f"stage must be 'one' or 'two', got {self.stage!r}")
        if self.spacing not in ("linear", "log"):
            raise InvalidInputError(f"spacing must be 'linear' or 'log', got {self.spacing!r}")
        if int(self.n_points) != self.n_points or self.n_points < 2:
            raise InvalidInputError(f"n_points must be an integer >= 2, got {self.n_points!r}")
        if self.spacing == "log" and not (self.start > 0 and self.stop > 0):
            raise InvalidInputError("log spacing requires a positive range")
        if self.scan_variable == "delta2" and self.stage != "two":
            raise InvalidInputError("scanning delta2 requires stage 'two'")
        if self.scan_variable == "linewidth" and not (self.start > 0 and self.stop > 0):
            raise InvalidInputError("linewidth range must be positive")

    @property
    def methods(self) -> Tuple[str, ...]:
        return METHODS if self.method == "all" else (self.method,)


@dataclass(frozen=True)
class SweepRow:
    scan_value: float
    p_a: Dict[str, float]
    p_b: Dict[str, float]
    max_discrepancy: Optional[float] = None


def scan_values(spec: SweepSpec) -> np.ndarray:
    if spec.spacing == "log":
        values = np.geomspace(spec.start, spec.stop, int(spec.n_points))
    else:
        values = np.linspace(spec.start, spec.stop, int(spec.n_points))
    return np.sort(values)


def _at(fixed: QmzParams, variable: str, value: float) -> QmzParams:
    if variable == "delta_both":
        return replace(fixed, delta1=value, delta2=value)
    return replace(fixed, **{variable: value})


def evaluate_point(
    method: str,
    params: QmzParams,
    stage: str = "two",
    resolution_factor: float = 1.0,
    tfinal_factor: float = 1.0,
    memory_budget: float = DEFAULT_MEMORY_BUDGET,
) -> Tuple[float, float]:
    """``(p_a, p_b)`` after ``stage`` by one method."""
    two = stage == "two"
    if method == "analytic":
        if two:
            return analytic.qmz_probabilities(params)
        return analytic.single_probabilities(params.gamma1, params.delta1, params.linewidth)
    if method == "transfer":
        lam1 = transfer.LambdaParam.from_detuning(params.gamma1, params.delta1)
        if two:
            lam2 = transfer.LambdaParam.from_detuning(params.gamma2, params.delta2)
            m = transfer.qmz_matrix(lam1, lam2)
        else:
            m = transfer.emitter_matrix(lam1)
        return transfer.output_probabilities(m, "a")
    if method == "dynamics":
        emitters = [EmitterParams(params.gamma1, params.delta1)]
        if two:
            emitters.append(EmitterParams(params.gamma2, params.delta2))
        pulse = PulseParams(params.linewidth)
        grid = auto_grid(emitters, pulse, resolution_factor, tfinal_factor)
        need = dynamics.estimate_bytes(grid)
        if need > memory_budget:
            raise ResourceError(
                f"dynamics grid at {params} needs ~{need / 2**20:.0f} MiB "
                f"({grid.n_points} points), above the {memory_budget / 2**20:.0f} MiB budget"
            )
        if two:
            result = dynamics.simulate_qmz(*emitters, pulse, resolution_factor, tfinal_factor)[1]
        else:
            result = dynamics.simulate_single(emitters[0], pulse, resolution_factor, tfinal_factor)
        return result.p_a, result.p_b
    raise InvalidInputError(f"unknown method {method!r}")


def _row(task) -> SweepRow:
    value, methods, params, stage, options = task
    p_a, p_b = {}, {}
    for method in methods:
        p_a[method], p_b[method] = evaluate_point(method, params, stage, **options)
    spread = None
    if len(methods) > 1:
        spread = max(
            max(abs(p_a[m] - p_a[n]), abs(p_b[m] - p_b[n]))
            for m, n in itertools.combinations(methods, 2)
        )
    return SweepRow(float(value), p_a, p_b, spread)


def run_sweep(
    spec: SweepSpec,
    workers: int = 1,
    resolution_factor: float = 1.0,
    tfinal_factor: float = 1.0,
    memory_budget: float = DEFAULT_MEMORY_BUDGET,
) -> List[SweepRow]:
    """Evaluate every requested method at every scan point, ordered by scan value.

    With ``workers > 1`` the points are farmed out to a process pool; the
    rows come back in scan order either way.
    """
    options = dict(
        resolution_factor=resolution_factor,
        tfinal_factor=tfinal_factor,
        memory_budget=memory_budget,
    )
    tasks = [
        (value, spec.methods, _at(spec.fixed, spec.scan_variable, float(value)), spec.stage, options)
        for value in scan_values(spec)
    ]
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_row, tasks))
    return [_row(task) for task in tasks]


@dataclass(frozen=True)
class Preset:
    """Curves of one figure: each curve is a labelled sweep."""

    name: str
    title: str
    curves: Tuple[Tuple[str, SweepSpec], ...]

    def with_method(self, method: str, n_points: Optional[int] = None) -> "Preset":
        curves = tuple(
            (label, replace(spec, method=method, n_points=n_points or spec.n_points))
            for label, spec in self.curves
        )
        return replace(self, curves=curves)


_MONO = 0.001
_DETUNING_RANGE = (-3.0, 3.0, 121, "linear")
_LINEWIDTH_RANGE = (0.01, 10.0, 41, "log")


def _spec(scan, rng, stage, **fixed) -> SweepSpec:
    start, stop, n, spacing = rng
    return SweepSpec("analytic", scan, start, stop, n, spacing, QmzParams(**fixed), stage)


PRESETS: Dict[str, Preset] = {
    "fig2a": Preset(
        "fig2a",
        "single emitter versus detuning, monochromatic pulse",
        (("single", _spec("delta1", _DETUNING_RANGE, "one", linewidth=_MONO)),),
    ),
    "fig2b": Preset(
        "fig2b",
        "single emitter versus linewidth",
        (
            ("resonant", _spec("linewidth", _LINEWIDTH_RANGE, "one", delta1=0.0)),
            ("off_resonant", _spec("linewidth", _LINEWIDTH_RANGE, "one", delta1=0.5)),
        ),
    ),
    "fig3": Preset(
        "fig3",
        "identical emitters versus common detuning, monochromatic pulse",
        (("identical", _spec("delta_both", _DETUNING_RANGE, "two", linewidth=_MONO)),),
    ),
    "fig4": Preset(
        "fig4",
        "second detuning scanned at delta1 = gamma1/2, monochromatic pulse",
        (("delta1_half", _spec("delta2", _DETUNING_RANGE, "two", delta1=0.5, linewidth=_MONO)),),
    ),
    "fig5": Preset(
        "fig5",
        "interferometer versus linewidth",
        (
            ("resonant", _spec("linewidth", _LINEWIDTH_RANGE, "two", delta1=0.0, delta2=0.0)),
            ("identical", _spec("linewidth", _LINEWIDTH_RANGE, "two", delta1=0.5, delta2=0.5)),
            ("different", _spec("linewidth", _LINEWIDTH_RANGE, "two", delta1=0.5, delta2=-0.5)),
        ),
    ),
}


def run_preset(
    name: str,
    method: str = "analytic",
    n_points: Optional[int] = None,
    **options,
) -> List[Tuple[str, SweepSpec, List[SweepRow]]]:
    """Run every curve of a figure preset; returns ``(label, spec, rows)`` triples."""
    if name not in PRESETS:
        raise InvalidInputError(f"unknown preset {name!r}; valid presets: {', '.join(PRESETS)}")
    preset = PRESETS[name].with_method(method, n_points)
    return [(label, spec, run_sweep(spec, **options)) for label, spec in preset.curves]


def preset_names() -> Sequence[str]:
    return tuple(PRESETS)
