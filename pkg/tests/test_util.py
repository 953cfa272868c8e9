import concurrent.futures
import time

import numpy as np
import pytest

from dickemetrology import SimulationError, SimulationErrorType, build_grid
from dickemetrology._util import map_in_order, require_non_empty


def test_linear_grid_is_inclusive():
    grid = build_grid(-1.0, 1.0, 5)
    assert grid.tolist() == [-1.0, -0.5, 0.0, 0.5, 1.0]


def test_log_grid():
    grid = build_grid(1e-3, 1e-1, 3, "log")
    assert grid == pytest.approx([1e-3, 1e-2, 1e-1], rel=1e-12)
    negative = build_grid(-1e-1, -1e-3, 3, "log")
    assert negative == pytest.approx([-1e-1, -1e-2, -1e-3], rel=1e-12)


@pytest.mark.parametrize(
    "args",
    [
        (0.0, 1.0, 0, "linear"),
        (0.0, 1.0, 3, "log"),
        (-1.0, 1.0, 3, "log"),
        (0.0, 1.0, 3, "cubic"),
    ],
)
def test_invalid_grids(args):
    with pytest.raises(SimulationError) as exc_info:
        build_grid(*args)
    assert exc_info.value.type is SimulationErrorType.INVALID_ARGUMENT


def test_empty_grid_is_rejected():
    with pytest.raises(SimulationError, match="empty sweep"):
        require_non_empty(np.array([]))


def _slow_square(x: int) -> int:
    time.sleep(0.01 * (5 - x))
    return x * x


def test_map_in_order_keeps_submission_order():
    items = list(range(5))
    assert map_in_order(_slow_square, items) == [0, 1, 4, 9, 16]
    with concurrent.futures.ThreadPoolExecutor(max_workers=4) as executor:
        assert map_in_order(_slow_square, items, executor) == [0, 1, 4, 9, 16]
