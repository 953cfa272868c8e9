import math

import pytest

from dickemetrology import DickeParams, FockCutoffPolicy, jz_tanh
from dickemetrology.protocol import Engine, ProtocolConfig, check_conditions, run_protocol


def _config(delta: float = 0.0, **changes) -> ProtocolConfig:
    values = dict(params=DickeParams(n_atoms=4, omega=10.0, delta=delta), gamma=0.03)
    values.update(changes)
    return ProtocolConfig(**values)


def test_condition_ratios():
    config = _config()
    report = check_conditions(config)
    assert report.delta_i == config.delta_i
    assert report.next_gap_estimate == pytest.approx(0.4 * 0.75)
    assert report.nonadiabatic_estimate_ratio == pytest.approx(10.0)
    assert report.nonadiabatic_ratio == pytest.approx(config.next_gap / 0.03)
    assert report.preparation_ratio == pytest.approx(config.delta_i * config.resolved_tau1)
    assert report.bias_ratio == math.inf
    assert report.bias_ok


def test_fast_preparation_fails_the_conditions():
    report = check_conditions(_config(tau1=1e-3))
    assert not report.preparation_ok
    assert not report.passed
    text = report.to_text()
    assert "passed=False" in text
    assert [line for line in text.splitlines() if line.startswith("preparation_ratio=")][0].endswith(
        " warn"
    )


def test_strong_bias_fails_the_conditions():
    config = _config(delta=0.1)
    report = check_conditions(config)
    assert report.bias_ratio == pytest.approx(config.delta_i / 0.4)
    assert not report.bias_ok


def test_missing_next_gap_uses_the_estimate():
    report = check_conditions(_config(policy=FockCutoffPolicy(max_dim=10)))
    assert report.delta_i_source == "perturbative"
    assert math.isnan(report.nonadiabatic_ratio)
    assert report.nonadiabatic_ok == (report.nonadiabatic_estimate_ratio >= report.margin)


def test_report_text_is_key_value_lines():
    text = check_conditions(_config()).to_text()
    keys = [line.split("=", 1)[0] for line in text.splitlines()]
    assert keys == [
        "delta_i",
        "delta_i_source",
        "next_gap",
        "next_gap_estimate",
        "preparation_ratio",
        "bias_ratio",
        "nonadiabatic_ratio",
        "nonadiabatic_estimate_ratio",
        "margin",
        "passed",
    ]


def test_two_level_engine_without_bias():
    result = run_protocol(_config(), engine=Engine.DEMKOV)
    assert result.engine is Engine.DEMKOV
    assert result.final_jz == pytest.approx(0.0, abs=1e-12)
    assert result.final_population == pytest.approx(0.5)
    assert result.evolution is None
    assert math.isnan(result.leakage)


def test_two_level_engine_follows_the_tanh_law():
    config = _config(delta=1e-4, gamma=0.001)
    assert config.demkov_params.x > 10
    result = run_protocol(config, engine=Engine.DEMKOV)
    assert result.final_jz == pytest.approx(jz_tanh(4, 1e-4, 0.001), abs=0.05 * 4)
    assert result.final_jz < 0


def test_full_engine_without_bias():
    config = ProtocolConfig(params=DickeParams(n_atoms=2, omega=3.0), gamma=0.2)
    result = run_protocol(config, n_samples=11)
    assert result.engine is Engine.FULL
    assert abs(result.final_jz) <= 1e-3 * 2
    assert result.evolution is not None
    assert len(result.evolution.times) == 11
    assert result.evolution.times[-1] == pytest.approx(config.schedule.t_f)
    assert -1e-9 <= result.leakage <= 1
