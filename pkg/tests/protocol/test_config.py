import math
import warnings

import pytest

from dickemetrology import DickeParams, FockCutoffPolicy, SimulationError, SimulationErrorType
from dickemetrology.protocol import Engine, ProtocolConfig, measurement_time


def _config(**changes) -> ProtocolConfig:
    values = dict(params=DickeParams(n_atoms=4, omega=3.0, delta=1e-3), gamma=0.03)
    values.update(changes)
    return ProtocolConfig(**values)


def test_defaults():
    config = _config()
    assert config.switch_field == pytest.approx(2 / 3)
    assert config.tau2 == pytest.approx(4 / 0.03)
    assert config.delta_i > 0
    assert config.delta_i_source == "numeric"
    assert config.resolved_tau1 == pytest.approx(min(20 / config.delta_i, config.tau2))
    assert config.engine is Engine.FULL
    schedule = config.schedule
    assert schedule.omega_x_0 == 9.0
    assert schedule.omega_x_i == pytest.approx(2 / 3)
    assert schedule.gamma == pytest.approx(0.03)
    assert schedule.t_m == pytest.approx(config.metrology_time)


def test_explicit_switch_and_preparation():
    config = _config(omega_x_i=0.4, tau1=50.0)
    assert config.switch_field == 0.4
    assert config.resolved_tau1 == 50.0
    assert config.schedule.t_i == pytest.approx(50.0 * math.log(9.0 / 0.4))


@pytest.mark.parametrize(
    "changes",
    [
        {"gamma": 0.0},
        {"xi": 1.0},
        {"xi": 0.0},
        {"margin": 0.5},
        {"omega_x_i_fraction": 1.0},
        {"tau1": -1.0},
        {"omega_x_0": 1.0},
        {"omega_x_i": 2.0},
    ],
)
def test_invalid_config(changes):
    with pytest.raises(SimulationError) as exc_info:
        _config(**changes)
    assert exc_info.value.type is SimulationErrorType.INVALID_ARGUMENT


def test_with_parameter():
    config = _config()
    assert config.with_parameter("delta", -2e-3).params.delta == -2e-3
    assert config.with_parameter("gamma", 0.05).gamma == 0.05
    assert config.with_parameter("n_atoms", 6.0).params.n_atoms == 6
    with pytest.raises(SimulationError):
        config.with_parameter("n_atoms", 2.5)
    with pytest.raises(SimulationError) as exc_info:
        config.with_parameter("omega", 2.0)
    assert exc_info.value.type is SimulationErrorType.INVALID_ARGUMENT


def test_gap_falls_back_to_the_closed_form():
    config = _config(policy=FockCutoffPolicy(max_dim=10))
    assert config.delta_i_source == "perturbative"
    assert config.delta_i > 0
    assert math.isnan(config.next_gap)


def test_measurement_time():
    config = _config(params=DickeParams(n_atoms=4, omega=3.0, delta=1e-4))
    expected = math.log(config.delta_i / (0.1 * 4 * 1e-4)) / 0.03
    assert measurement_time(config) == pytest.approx(expected)
    with pytest.raises(SimulationError) as exc_info:
        measurement_time(_config(params=DickeParams(n_atoms=4, omega=3.0)))
    assert exc_info.value.type is SimulationErrorType.INVALID_ARGUMENT


def test_unbiased_metrology_time_uses_gamma():
    config = _config(params=DickeParams(n_atoms=4, omega=3.0))
    assert config.metrology_time == pytest.approx(math.log(config.delta_i / (0.1 * 0.03)) / 0.03)


def test_measurement_time_vanishes_when_the_final_gap_is_reached():
    delta_i = _config().delta_i
    delta = delta_i / (0.5 * 4)
    config = _config(params=DickeParams(n_atoms=4, omega=3.0, delta=delta), xi=0.5)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        assert measurement_time(config) == pytest.approx(0.0, abs=1e-9)


def test_measurement_time_scaling():
    base = _config(params=DickeParams(n_atoms=4, omega=3.0, delta=1e-4))
    doubled = _config(params=base.params, xi=0.2)
    assert measurement_time(base) - measurement_time(doubled) == pytest.approx(math.log(2) / 0.03)
    fields = [1e-5, 1e-4, 1e-3]
    times = [measurement_time(base.with_parameter("delta", d)) for d in fields]
    for (d1, t1), (d2, t2) in zip(zip(fields, times), zip(fields[1:], times[1:])):
        slope = (t2 - t1) / (math.log(d2) - math.log(d1))
        assert slope == pytest.approx(-1 / 0.03)
