import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qmzsim.analytic import QmzParams, p1_reflect, p2_transmit
from qmzsim.errors import InvalidInputError
from qmzsim.transfer import (
    SIGMA_X,
    LambdaParam,
    TransferMatrix2,
    emitter_matrix,
    output_probabilities,
    qmz_matrix,
)

L = LambdaParam


def test_transparent_emitter():
    assert np.array_equal(emitter_matrix(L(0.0)).entries, np.eye(2))


def test_balanced_emitter():
    assert output_probabilities(emitter_matrix(L(1.0))) == pytest.approx((0.5, 0.5), abs=1e-15)
    assert output_probabilities(emitter_matrix(L(-1.0)), "b") == pytest.approx((0.5, 0.5), abs=1e-15)


def test_resonant_marker():
    m = emitter_matrix(L.at_resonance())
    assert np.array_equal(m.entries, [[0, -1], [-1, 0]])
    assert output_probabilities(m) == (0.0, 1.0)
    assert L.from_detuning(1.0, 0.0).resonant


def test_resonant_marker_is_the_limit():
    far = emitter_matrix(L(1e8)).entries
    assert np.max(np.abs(far - emitter_matrix(L.at_resonance()).entries)) < 1e-7


def test_infinite_lambda_rejected():
    with pytest.raises(InvalidInputError):
        L(float("inf"))
    with pytest.raises(InvalidInputError):
        L.from_detuning(0.0, 1.0)


def test_qmz_classical_equivalence():
    m = qmz_matrix(L(1.0), L(1.0)).entries
    assert np.max(np.abs(m + np.eye(2))) <= 1e-15
    assert output_probabilities(qmz_matrix(L(1.0), L(1.0))) == (1.0, 0.0)


def test_qmz_nonclassical_signature():
    m = qmz_matrix(L(1.0), L(-1.0)).entries
    assert np.max(np.abs(m - SIGMA_X)) <= 1e-15
    assert output_probabilities(qmz_matrix(L(1.0), L(-1.0))) == (0.0, 1.0)


def test_transparent_qmz_is_swap():
    assert np.array_equal(qmz_matrix(L(0.0), L(0.0)).entries, SIGMA_X)


def test_random_lambda_unitarity():
    rng = np.random.default_rng(20)
    for lam in rng.uniform(-50, 50, 200):
        assert emitter_matrix(L(lam)).unitarity_error() <= 1e-12


@settings(max_examples=100, deadline=None)
@given(st.floats(-50, 50), st.floats(-50, 50), st.sampled_from("ab"))
def test_probability_conservation(l1, l2, channel):
    p_a, p_b = output_probabilities(qmz_matrix(L(l1), L(l2)), channel)
    assert abs(p_a + p_b - 1) <= 1e-12


def test_non_unitary_rejected():
    with pytest.raises(InvalidInputError):
        output_probabilities(TransferMatrix2([[1, 0], [0, 0.5]]))
    with pytest.raises(InvalidInputError):
        output_probabilities(emitter_matrix(L(1.0)), "c")
    with pytest.raises(InvalidInputError):
        TransferMatrix2(np.eye(3))


def test_single_matches_analytic():
    for delta in np.linspace(-3, 3, 25):
        m = emitter_matrix(L.from_detuning(1.0, float(delta)))
        assert output_probabilities(m)[1] == pytest.approx(p1_reflect(1.0, float(delta), 1e-6), abs=1e-5)


def test_qmz_matches_analytic_monochromatic():
    detunings = [d for d in np.linspace(-3, 3, 31) if abs(d) >= 0.05]
    for d1 in detunings[::3]:
        for d2 in detunings:
            p = QmzParams(1.0, 1.0, float(d1), float(d2), 1e-6)
            m = qmz_matrix(L.from_detuning(1.0, float(d1)), L.from_detuning(1.0, float(d2)))
            assert abs(p2_transmit(p) - output_probabilities(m)[0]) <= 1e-3


@pytest.mark.parametrize("d2", [0.0, 0.5, -1.0])
def test_resonant_path_matches_analytic(d2):
    m = qmz_matrix(L.at_resonance(), L.from_detuning(1.0, d2))
    p = QmzParams(1.0, 1.0, 0.0, d2, 1e-6)
    assert output_probabilities(m)[0] == pytest.approx(p2_transmit(p), abs=1e-3)
