"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run alone with ``pytest tests/test_acceptance.py -v -s`` or
``python3 tests/test_acceptance.py``.
"""

import math
import sys
import time

import numpy as np
import pytest

from qmzsim.analytic import QmzParams, p1_reflect, p2_transmit, qmz_probabilities, single_probabilities
from qmzsim.core import EmitterParams, Envelope, PulseParams, auto_grid, make_exponential_pulse
from qmzsim.dynamics import excitation_amplitude, population_history, simulate_qmz, simulate_single
from qmzsim.sweep import PRESETS, scan_values
from qmzsim.transfer import LambdaParam, emitter_matrix, output_probabilities, qmz_matrix

MONO = 0.001
_timings = []


@pytest.fixture
def verdict(capsys):
    def emit(label, ok, detail):
        with capsys.disabled():
            print(f"\n[{'PASS' if ok else 'FAIL'}] {label}: {detail}")
        assert ok, f"{label}: {detail}"

    return emit


def _single(gamma, delta, width):
    start = time.perf_counter()
    result = simulate_single(EmitterParams(gamma, delta), PulseParams(width))
    _timings.append(time.perf_counter() - start)
    return result


def _qmz(p):
    start = time.perf_counter()
    _, stage2 = simulate_qmz(EmitterParams(p.gamma1, p.delta1), EmitterParams(p.gamma2, p.delta2), PulseParams(p.linewidth))
    # two scattering runs per interferometer
    _timings.append((time.perf_counter() - start) / 2)
    return stage2


def closed_form_psi(t, gamma, delta, width):
    rate = 0.5 * gamma - 1j * delta
    return -math.sqrt(gamma * width / 2) * (np.exp(-width * t / 2) - np.exp(-rate * t)) / (rate - width / 2)


def test_c1_quantum_mirror(verdict):
    analytic = p1_reflect(1.0, 0.0, MONO)
    dyn = _single(1.0, 0.0, MONO).p_b
    transfer = output_probabilities(emitter_matrix(LambdaParam.at_resonance()))[1]
    ok = analytic >= 0.997 and dyn >= 0.997 and transfer == 1.0
    verdict("C1 quantum mirror", ok, f"p_b analytic={analytic:.6f} dynamics={dyn:.6f} transfer={transfer!r}")


def test_c2_balanced_conditions(verdict):
    worst = 0.0
    for delta, width in [(0.5, MONO), (-0.5, MONO), (0.0, 1.0)]:
        worst = max(
            worst,
            abs(single_probabilities(1.0, delta, width)[0] - 0.5),
            abs(_single(1.0, delta, width).p_a - 0.5),
        )
    verdict("C2 balanced conditions", worst <= 5e-3, f"max |p_a - 1/2| = {worst:.2e} (limit 5e-3)")


def test_c3_classical_equivalence(verdict):
    lowest = 1.0
    for d in (0.5, -0.5):
        p = QmzParams(1, 1, d, d, MONO)
        lowest = min(lowest, p2_transmit(p), _qmz(p).p_a)
    m = qmz_matrix(LambdaParam(1.0), LambdaParam(1.0))
    matrix_err = float(np.max(np.abs(m.entries + np.eye(2))))
    probs = output_probabilities(m)
    ok = lowest >= 0.995 and matrix_err <= 1e-15 and probs == (1.0, 0.0)
    verdict("C3 classical-MZ equivalence", ok, f"min p2_a={lowest:.6f}, |M2 sx M1 + I|={matrix_err:.1e}, transfer={probs}")


def test_c4_nonclassical_signature(verdict):
    p = QmzParams(1, 1, 0.5, -0.5, MONO)
    lowest = min(qmz_probabilities(p)[1], _qmz(p).p_b)
    m = qmz_matrix(LambdaParam(1.0), LambdaParam(-1.0))
    matrix_err = float(np.max(np.abs(m.entries - np.array([[0, 1], [1, 0]]))))
    probs = output_probabilities(m)
    ok = lowest >= 0.995 and matrix_err <= 1e-15 and probs == (0.0, 1.0)
    verdict("C4 nonclassical signature", ok, f"min p2_b={lowest:.6f}, |M2 sx M1 - sx|={matrix_err:.1e}, transfer={probs}")


def test_c5_resonant_splitting(verdict):
    p = QmzParams(1, 1, 0, 0, 1.0)
    values = (p2_transmit(p), _qmz(p).p_a)
    worst = max(abs(v - 0.5) for v in values)
    verdict("C5 resonant finite-linewidth splitting", worst <= 5e-3, f"p2_a analytic={values[0]:.6f} dynamics={values[1]:.6f}")


def test_c6_robust_different_emitters(verdict):
    spec = dict(PRESETS["fig5"].curves)["different"]
    widths = scan_values(spec)
    gaps = [abs(a - b) for a, b in (qmz_probabilities(QmzParams(1, 1, 0.5, -0.5, w)) for w in widths)]
    ok = len(widths) == 41 and min(gaps) > 0.1
    verdict("C6 robustness of different emitters", ok, f"min |p2_a - p2_b| over {len(widths)} linewidths = {min(gaps):.4f}")


def _stage_two_lattice():
    points = []
    for name, stride in (("fig3", 2), ("fig4", 2), ("fig5", 1)):
        for _, spec in PRESETS[name].curves:
            for value in scan_values(spec)[::stride]:
                if spec.scan_variable == "delta_both":
                    p = QmzParams(1, 1, value, value, spec.fixed.linewidth)
                elif spec.scan_variable == "delta2":
                    p = QmzParams(1, 1, spec.fixed.delta1, value, spec.fixed.linewidth)
                else:
                    p = QmzParams(1, 1, spec.fixed.delta1, spec.fixed.delta2, value)
                points.append(p)
    # exact poles: B and K1 at the resonant balanced point, K2 for identical emitters
    points += [QmzParams(1, 1, 0, 0, 1.0), QmzParams(1, 1, 0.3, 0.3, 0.01), QmzParams(1, 1, 0, 0.7, 1.0)]
    return points


def test_c7_cross_equivalence(verdict):
    worst1 = 0.0
    for gamma in (0.5, 1.0, 2.0):
        for delta in np.linspace(-2, 2, 10) * gamma:
            for width in np.geomspace(0.01, 5, 10) * gamma:
                dyn = _single(gamma, float(delta), float(width))
                ana = single_probabilities(gamma, float(delta), float(width))
                worst1 = max(worst1, abs(dyn.p_a - ana[0]), abs(dyn.p_b - ana[1]))
    lattice = _stage_two_lattice()
    worst2 = 0.0
    for p in lattice:
        dyn = _qmz(p)
        ana = qmz_probabilities(p)
        worst2 = max(worst2, abs(dyn.p_a - ana[0]), abs(dyn.p_b - ana[1]))
    slowest = max(_timings)
    ok = worst1 <= 1e-3 and worst2 <= 1e-3
    verdict(
        "C7 method cross-equivalence",
        ok,
        f"stage 1 (300 points) max diff {worst1:.2e}; stage 2 ({len(lattice)} points) max diff {worst2:.2e}; "
        f"slowest scattering run {slowest:.2f}s",
    )


def test_c8_conservation(verdict):
    rng = np.random.default_rng(8)
    worst_norm = 0.0
    for i in range(20):
        gamma = float(np.exp(rng.uniform(np.log(0.5), np.log(2))))
        emitter = EmitterParams(gamma, float(rng.uniform(-2, 2)))
        pulse = PulseParams(float(np.exp(rng.uniform(np.log(0.05), np.log(5)))))
        grid = auto_grid([emitter], pulse)
        shape = make_exponential_pulse(pulse, grid).amps
        if i % 2:
            # coherent superposition of both input channels
            share = rng.uniform(0, 1)
            in_a = Envelope(grid, math.sqrt(share) * shape)
            in_b = Envelope(grid, math.sqrt(1 - share) * np.exp(1j * rng.uniform(0, 2 * np.pi)) * shape[::-1])
        else:
            in_a, in_b = Envelope(grid, shape), Envelope.zeros(grid)
        _, pop, p_a, p_b = population_history(in_a, in_b, emitter, grid)
        worst_norm = max(worst_norm, float(np.max(np.abs(pop + p_a + p_b - 1))))

    worst_unitary = max(emitter_matrix(LambdaParam(float(x))).unitarity_error() for x in rng.uniform(-50, 50, 200))

    worst_sum = 0.0
    for gamma in (0.5, 1.0, 2.0):
        for d1 in np.arange(-3, 3.01, 0.5):
            for w in np.geomspace(0.01, 5, 6):
                worst_sum = max(worst_sum, abs(sum(single_probabilities(gamma, d1, w)) - 1))
                for d2 in np.arange(-3, 3.01, 0.5):
                    worst_sum = max(worst_sum, abs(sum(qmz_probabilities(QmzParams(1, gamma, d1, d2, w))) - 1))
    ok = worst_norm <= 1e-3 and worst_unitary <= 1e-12 and worst_sum <= 1e-9
    verdict(
        "C8 conservation",
        ok,
        f"norm history {worst_norm:.2e}, unitarity {worst_unitary:.1e}, analytic sums {worst_sum:.1e}",
    )


def test_c9_closed_form_psi(verdict):
    worst = 0.0
    for gamma, delta, width in [(1.0, 0.0, 0.2), (1.0, 0.5, 0.001), (2.0, -1.0, 0.7), (0.5, 1.5, 3.0)]:
        emitter, pulse = EmitterParams(gamma, delta), PulseParams(width)
        grid = auto_grid([emitter], pulse)
        traj = excitation_amplitude(make_exponential_pulse(pulse, grid), Envelope.zeros(grid), emitter, 0.0, grid)
        worst = max(worst, float(np.max(np.abs(traj.psi - closed_form_psi(traj.times, gamma, delta, width)))))

    emitter, pulse = EmitterParams(1.0), PulseParams(1.0)
    grid = auto_grid([emitter], pulse)
    traj = excitation_amplitude(make_exponential_pulse(pulse, grid), Envelope.zeros(grid), emitter, 0.0, grid)
    t = traj.times
    degenerate = float(np.max(np.abs(traj.population - 0.5 * t**2 * np.exp(-t))))
    peak = float(np.interp(2.0, t, traj.population))
    peak_err = abs(peak - 2 * math.exp(-2))
    ok = worst <= 1e-4 and degenerate <= 1e-4 and peak_err <= 1e-4
    verdict(
        "C9 closed-form psi oracle",
        ok,
        f"max |psi - oracle| {worst:.1e}, degenerate |psi|^2 {degenerate:.1e}, peak {peak:.6f} vs 2e^-2",
    )


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q"]))
