"""Command-line front end: ``qmz-sim {single,qmz,sweep,figure,compare}``.

Exit status is 0 when results were produced, 2 for usage or validation
errors and 1 for internal-consistency failures.
"""

from __future__ import annotations

import argparse
import itertools
import logging
import sys
from typing import List, Optional, Sequence

from . import __version__, dynamics
from .analytic import QmzParams
from .core import EmitterParams, PulseParams
from .errors import InvalidInputError, QmzError, ResolutionError
from .report import Report
from .sweep import (
    DEFAULT_MEMORY_BUDGET,
    METHODS,
    PRESETS,
    SCAN_VARIABLES,
    SweepSpec,
    evaluate_point,
    run_preset,
    run_sweep,
)

log = logging.getLogger("qmzsim")

DEFAULT_LINEWIDTH = 0.001
_TRAJECTORY_POINTS = 2001


def _global_options(parser: argparse.ArgumentParser, suppress: bool) -> None:
    # sub-parsers use SUPPRESS so a flag given before the command is not reset
    default = (lambda value: argparse.SUPPRESS) if suppress else (lambda value: value)
    parser.add_argument("--format", choices=("csv", "json"), default=default("csv"))
    parser.add_argument("--out", metavar="PATH", default=default(None), help="output file (default: stdout)")
    parser.add_argument(
        "--resolution-factor",
        type=float,
        default=default(1.0),
        help="multiplies the default 50 grid samples per shortest scale",
    )
    parser.add_argument(
        "--tfinal-factor",
        type=float,
        default=default(1.0),
        help="multiplies the default readout horizon factor 12",
    )


def _method_option(parser, default="analytic"):
    parser.add_argument("--method", choices=METHODS + ("all",), default=default)


def _qmz_options(parser):
    parser.add_argument("--gamma1", type=float, default=1.0)
    parser.add_argument("--gamma2", type=float, default=1.0)
    parser.add_argument("--delta1", type=float, default=0.0)
    parser.add_argument("--delta2", type=float, default=0.0)
    parser.add_argument("--linewidth", type=float, default=None, help=f"pulse linewidth (default {DEFAULT_LINEWIDTH})")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qmz-sim",
        description="Single-photon scattering on waveguide emitters and the quantum Mach-Zehnder interferometer.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    _global_options(parser, suppress=False)
    commands = parser.add_subparsers(dest="command", required=True)

    single = commands.add_parser("single", help="one emitter")
    _global_options(single, suppress=True)
    single.add_argument("--gamma", type=float, default=1.0)
    single.add_argument("--delta", type=float, default=0.0)
    single.add_argument("--linewidth", type=float, default=None, help=f"pulse linewidth (default {DEFAULT_LINEWIDTH})")
    _method_option(single)
    single.add_argument("--trajectory", action="store_true", help="also emit |psi(t)|^2 (dynamics only)")

    qmz = commands.add_parser("qmz", help="two-emitter interferometer")
    _global_options(qmz, suppress=True)
    _qmz_options(qmz)
    _method_option(qmz)

    sweep = commands.add_parser("sweep", help="scan one parameter")
    _global_options(sweep, suppress=True)
    _qmz_options(sweep)
    _method_option(sweep)
    sweep.add_argument("--scan", choices=SCAN_VARIABLES, required=True)
    sweep.add_argument("--start", type=float, required=True)
    sweep.add_argument("--stop", type=float, required=True)
    sweep.add_argument("--points", type=int, default=61)
    sweep.add_argument("--spacing", choices=("linear", "log"), default="linear")
    sweep.add_argument("--stage", choices=("one", "two"), default="two")
    sweep.add_argument("--workers", type=int, default=1)
    sweep.add_argument("--memory-budget", type=float, default=DEFAULT_MEMORY_BUDGET / 2**20, help="MiB per dynamics run")

    figure = commands.add_parser("figure", help="data behind a figure preset")
    _global_options(figure, suppress=True)
    figure.add_argument("preset", help=f"one of: {', '.join(PRESETS)}")
    _method_option(figure)
    figure.add_argument("--points", type=int, default=None, help="override the preset's point count")
    figure.add_argument("--workers", type=int, default=1)
    figure.add_argument("--memory-budget", type=float, default=DEFAULT_MEMORY_BUDGET / 2**20, help="MiB per dynamics run")

    compare = commands.add_parser("compare", help="all three methods at one point")
    _global_options(compare, suppress=True)
    _qmz_options(compare)
    compare.add_argument("--stage", choices=("one", "two"), default="two")
    return parser


def _grid_options(args) -> dict:
    return dict(resolution_factor=args.resolution_factor, tfinal_factor=args.tfinal_factor)


def _grid_config(args, methods) -> dict:
    # grid overrides only matter to the dynamics method
    return _grid_options(args) if "dynamics" in methods else {}


def _methods(name: str) -> Sequence[str]:
    return METHODS if name == "all" else (name,)


def _linewidth(args, methods: Sequence[str]) -> float:
    if args.linewidth is not None and tuple(methods) == ("transfer",):
        print("warning: --linewidth is ignored by the transfer method (monochromatic)", file=sys.stderr)
    return DEFAULT_LINEWIDTH if args.linewidth is None else args.linewidth


def _spread(values: dict) -> Optional[float]:
    keys = list(values)
    if len(keys) < 2:
        return None
    return max(
        max(abs(a - b) for a, b in zip(values[m], values[n]))
        for m, n in itertools.combinations(keys, 2)
    )


def _single(args) -> Report:
    methods = _methods(args.method)
    linewidth = _linewidth(args, methods)
    emitter = EmitterParams(args.gamma, args.delta)
    pulse = PulseParams(linewidth)
    results, trajectory = {}, None
    for method in methods:
        if method == "dynamics":
            res = dynamics.simulate_single(emitter, pulse, **_grid_options(args))
            results[method] = (res.p_a, res.p_b)
            if args.trajectory:
                stride = max(1, len(res.trajectory.times) // (_TRAJECTORY_POINTS - 1))
                trajectory = {
                    "t": res.trajectory.times[::stride].tolist(),
                    "population": res.trajectory.population[::stride].tolist(),
                }
        else:
            params = QmzParams(gamma1=emitter.gamma, delta1=emitter.delta, linewidth=pulse.linewidth)
            results[method] = evaluate_point(method, params, "one")
    if args.trajectory and trajectory is None:
        print("warning: --trajectory needs the dynamics method; no trajectory emitted", file=sys.stderr)
    config = dict(command="single", gamma=emitter.gamma, delta=emitter.delta, linewidth=pulse.linewidth, method=args.method)
    config.update(_grid_config(args, methods))
    rows = [dict(method=m, p_a=pa, p_b=pb) for m, (pa, pb) in results.items()]
    spread = _spread(results)
    summary = {"max_discrepancy": spread} if spread is not None else None
    return Report(config, ["method", "p_a", "p_b"], rows, summary, trajectory)


def _qmz_params(args, methods) -> QmzParams:
    return QmzParams(args.gamma1, args.gamma2, args.delta1, args.delta2, _linewidth(args, methods))


def _stages(method: str, params: QmzParams, args):
    if method == "dynamics":
        e1 = EmitterParams(params.gamma1, params.delta1)
        e2 = EmitterParams(params.gamma2, params.delta2)
        s1, s2 = dynamics.simulate_qmz(e1, e2, PulseParams(params.linewidth), **_grid_options(args))
        return (s1.p_a, s1.p_b), (s2.p_a, s2.p_b)
    return evaluate_point(method, params, "one"), evaluate_point(method, params, "two")


def _qmz(args) -> Report:
    methods = _methods(args.method)
    params = _qmz_params(args, methods)
    stage1, stage2 = {}, {}
    for method in methods:
        stage1[method], stage2[method] = _stages(method, params, args)
    config = dict(command="qmz", **vars_of(params), method=args.method, **_grid_config(args, methods))
    rows = [
        dict(method=m, stage1_p_a=stage1[m][0], stage1_p_b=stage1[m][1], stage2_p_a=stage2[m][0], stage2_p_b=stage2[m][1])
        for m in methods
    ]
    summary = None
    if len(methods) > 1:
        summary = {"max_discrepancy": max(_spread(stage1), _spread(stage2))}
    columns = ["method", "stage1_p_a", "stage1_p_b", "stage2_p_a", "stage2_p_b"]
    return Report(config, columns, rows, summary)


def vars_of(params: QmzParams) -> dict:
    return dict(
        gamma1=params.gamma1,
        gamma2=params.gamma2,
        delta1=params.delta1,
        delta2=params.delta2,
        linewidth=params.linewidth,
    )


def _sweep_columns(methods) -> List[str]:
    columns = ["scan_value"]
    for m in methods:
        columns += [f"p_a_{m}", f"p_b_{m}"]
    if len(methods) > 1:
        columns.append("max_discrepancy")
    return columns


def _sweep_rows(rows, methods, curve: Optional[str] = None) -> List[dict]:
    out = []
    for row in rows:
        record = {"curve": curve} if curve is not None else {}
        record["scan_value"] = row.scan_value
        for m in methods:
            record[f"p_a_{m}"] = row.p_a[m]
            record[f"p_b_{m}"] = row.p_b[m]
        if row.max_discrepancy is not None:
            record["max_discrepancy"] = row.max_discrepancy
        out.append(record)
    return out


def _sweep_options(args) -> dict:
    options = _grid_options(args)
    options.update(workers=args.workers, memory_budget=args.memory_budget * 2**20)
    return options


def _sweep(args) -> Report:
    methods = _methods(args.method)
    fixed = _qmz_params(args, methods)
    spec = SweepSpec(args.method, args.scan, args.start, args.stop, args.points, args.spacing, fixed, args.stage)
    rows = run_sweep(spec, **_sweep_options(args))
    config = dict(
        command="sweep",
        method=spec.method,
        scan_variable=spec.scan_variable,
        start=spec.start,
        stop=spec.stop,
        n_points=spec.n_points,
        spacing=spec.spacing,
        stage=spec.stage,
        **vars_of(fixed),
        **_grid_config(args, methods),
    )
    return Report(config, _sweep_columns(methods), _sweep_rows(rows, methods))


def _figure(args) -> Report:
    if args.preset not in PRESETS:
        raise InvalidInputError(f"unknown preset {args.preset!r}; valid presets: {', '.join(PRESETS)}")
    preset = PRESETS[args.preset]
    methods = _methods(args.method)
    curves = run_preset(args.preset, args.method, args.points, **_sweep_options(args))
    config = dict(command="figure", preset=preset.name, title=preset.title, method=args.method)
    config.update(_grid_config(args, methods))
    rows: List[dict] = []
    for label, spec, curve_rows in curves:
        prefix = f"curve.{label}"
        config[f"{prefix}.stage"] = spec.stage
        config[f"{prefix}.scan_variable"] = spec.scan_variable
        config[f"{prefix}.range"] = f"{spec.start!r}:{spec.stop!r}:{spec.n_points}:{spec.spacing}"
        for key, value in vars_of(spec.fixed).items():
            if key == spec.scan_variable or (spec.scan_variable == "delta_both" and key in ("delta1", "delta2")):
                continue
            if spec.stage == "one" and key in ("gamma2", "delta2"):
                continue
            config[f"{prefix}.{key}"] = value
        rows += _sweep_rows(curve_rows, methods, label)
    return Report(config, ["curve"] + _sweep_columns(methods), rows)


def _compare(args) -> Report:
    params = QmzParams(args.gamma1, args.gamma2, args.delta1, args.delta2, args.linewidth or DEFAULT_LINEWIDTH)
    results = {}
    for method in METHODS:
        if method == "dynamics" and args.stage == "two":
            results[method] = _stages(method, params, args)[1]
        elif method == "dynamics":
            res = dynamics.simulate_single(
                EmitterParams(params.gamma1, params.delta1), PulseParams(params.linewidth), **_grid_options(args)
            )
            results[method] = (res.p_a, res.p_b)
        else:
            results[method] = evaluate_point(method, params, args.stage)
    rows = [dict(method=m, p_a=pa, p_b=pb) for m, (pa, pb) in results.items()]
    summary = {}
    for m, n in itertools.combinations(METHODS, 2):
        summary[f"{m}_vs_{n}"] = max(abs(a - b) for a, b in zip(results[m], results[n]))
    summary["max_discrepancy"] = _spread(results)
    config = dict(command="compare", stage=args.stage, **vars_of(params), **_grid_config(args, METHODS))
    return Report(config, ["method", "p_a", "p_b"], rows, summary)


_COMMANDS = {
    "single": _single,
    "qmz": _qmz,
    "sweep": _sweep,
    "figure": _figure,
    "compare": _compare,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        report = _COMMANDS[args.command](args)
    except (InvalidInputError, ResolutionError) as exc:
        print(f"qmz-sim: error: {exc}", file=sys.stderr)
        return 2
    except QmzError as exc:
        print(f"qmz-sim: internal error: {exc}", file=sys.stderr)
        return 1
    text = report.render(args.format)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
        log.info("wrote %s", args.out)
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
