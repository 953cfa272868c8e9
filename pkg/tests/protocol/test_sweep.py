import concurrent.futures
import math

import numpy as np
import pytest

from dickemetrology import DickeParams, SimulationError, SimulationErrorType, jz_tanh
from dickemetrology.protocol import Engine, ProtocolConfig, SignalCurve, sweep, to_seconds

GRID = [-2e-3, -1e-3, 0.0, 1e-3, 2e-3]


def _config() -> ProtocolConfig:
    return ProtocolConfig(params=DickeParams(n_atoms=4, omega=10.0), gamma=0.03)


def test_two_level_signal_is_odd_in_delta():
    curve = sweep(_config(), "delta", GRID, engines=(Engine.DEMKOV,))
    assert curve.errors == (None,) * 5
    np.testing.assert_allclose(curve.jz_demkov, -curve.jz_demkov[::-1], atol=1e-8)
    assert curve.jz_demkov[2] == pytest.approx(0.0, abs=1e-12)
    assert np.all(np.isnan(curve.jz_full))
    assert np.all(np.isnan(curve.leakage))
    np.testing.assert_allclose(curve.jz_tanh, [jz_tanh(4, d, 0.03) for d in GRID])


def test_sweep_over_atom_number():
    curve = sweep(_config(), "n_atoms", [2, 3, 4], engines=(Engine.DEMKOV,))
    assert curve.errors == (None, None, None)
    assert curve.grid.tolist() == [2.0, 3.0, 4.0]


def test_failed_points_are_recorded():
    curve = sweep(_config(), "gamma", [0.03, -1.0], engines=(Engine.DEMKOV,))
    assert curve.errors[0] is None
    assert curve.errors[1] is not None
    assert curve.errors[1].startswith("INVALID_ARGUMENT: ")
    assert math.isnan(curve.jz_demkov[1])
    assert math.isnan(curve.jz_tanh[1])


def test_executor_keeps_grid_order():
    sequential = sweep(_config(), "delta", GRID, engines=(Engine.DEMKOV,))
    with concurrent.futures.ThreadPoolExecutor(max_workers=3) as executor:
        parallel = sweep(_config(), "delta", GRID, engines=(Engine.DEMKOV,), executor=executor)
    np.testing.assert_array_equal(sequential.jz_demkov, parallel.jz_demkov)


def test_invalid_sweeps():
    with pytest.raises(SimulationError) as exc_info:
        sweep(_config(), "omega", GRID)
    assert exc_info.value.type is SimulationErrorType.INVALID_ARGUMENT
    with pytest.raises(SimulationError, match="empty sweep"):
        sweep(_config(), "delta", [])


def test_curve_table():
    curve = sweep(_config(), "delta", GRID[:2], engines=(Engine.DEMKOV,), series=("gamma", 0.03))
    table = curve.to_table()
    assert table.columns == ["gamma", "delta", "jz_numeric", "jz_demkov", "jz_tanh", "leakage", "error"]
    assert [row[0] for row in table.rows] == [0.03, 0.03]
    assert table.column("delta") == GRID[:2]


def test_curve_lengths_must_match():
    with pytest.raises(SimulationError):
        SignalCurve(
            parameter="delta",
            grid=np.zeros(2),
            engines=(Engine.DEMKOV,),
            jz_full=np.zeros(2),
            jz_demkov=np.zeros(3),
            jz_tanh=np.zeros(2),
            leakage=np.zeros(2),
            errors=(None, None),
        )


def test_unit_conversion():
    assert to_seconds(2 * math.pi * 30e3) == pytest.approx(1.0)
    assert to_seconds(1.0, g_hz=1.0) == pytest.approx(1 / (2 * math.pi))
