import math

import pytest

from dickemetrology import SimulationError, jz_tanh
from dickemetrology.protocol import estimate_delta_quasiadiabatic, single_shot_sign_posterior


@pytest.mark.parametrize("delta", [-3e-3, -1e-4, 0.0, 5e-4, 2e-3])
def test_estimator_inverts_the_tanh_law(delta: float):
    signal = jz_tanh(6, delta, 0.03)
    assert estimate_delta_quasiadiabatic(signal, 6, 0.03) == pytest.approx(delta, rel=1e-9, abs=1e-15)


@pytest.mark.parametrize("signal", [3.0, -3.0, 4.5])
def test_saturated_signal_is_rejected(signal: float):
    with pytest.raises(SimulationError):
        estimate_delta_quasiadiabatic(signal, 6, 0.03)


def test_estimator_needs_positive_gamma():
    with pytest.raises(SimulationError):
        estimate_delta_quasiadiabatic(0.1, 6, 0.0)


def test_posterior_closed_form():
    posterior = single_shot_sign_posterior(0.1, 0.02, 0.05, 10)
    expected = 1 - 0.05 / (2 * 0.1 * math.pi * 10) * math.exp(-2 * math.pi * 0.02 * 10 / 0.05)
    assert posterior.closed_form == pytest.approx(expected)
    assert 0 <= posterior.numeric_bayes <= 1
    assert posterior.numeric_bayes > 0.99
    assert posterior.discrepancy == pytest.approx(abs(posterior.closed_form - posterior.numeric_bayes))


def test_posterior_grows_with_the_threshold():
    values = [single_shot_sign_posterior(0.1, dc, 0.5, 4).numeric_bayes for dc in (0.001, 0.01, 0.05, 0.09)]
    assert all(b > a for a, b in zip(values, values[1:]))
    assert single_shot_sign_posterior(0.1, 0.2, 0.5, 4).numeric_bayes == pytest.approx(1.0)


def test_uninformative_readout():
    # A huge gamma makes the likelihood flat, so the posterior is the prior mass above -delta_c.
    posterior = single_shot_sign_posterior(0.1, 0.05, 1e6, 1)
    assert posterior.numeric_bayes == pytest.approx(0.75, rel=1e-6)


@pytest.mark.parametrize(
    "args", [(0.0, 0.01, 0.05, 10), (0.1, 0.0, 0.05, 10), (0.1, 0.01, 0.0, 10), (0.1, 0.01, 0.05, 0)]
)
def test_invalid_posterior_inputs(args):
    with pytest.raises(SimulationError):
        single_shot_sign_posterior(*args)
