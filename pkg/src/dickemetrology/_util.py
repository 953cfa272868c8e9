from __future__ import annotations

import concurrent.futures
import numbers
from collections.abc import Iterable, Sequence
from typing import Callable, Literal, Optional, TypeVar

import numpy as np
import numpy.typing as npt

from ._common import SimulationError, SimulationErrorType

T = TypeVar("T")
R = TypeVar("R")

Spacing = Literal["linear", "log"]


class _Executor:
    """
    An executor that runs work inline when no ``concurrent.futures`` executor is given.

    Results always come back in submission order, whatever the completion order.
    """

    def __init__(self, executor: Optional[concurrent.futures.Executor]):
        self._executor = executor

    def map(self, fn: Callable[[T], R], items: Iterable[T]) -> list[R]:
        if self._executor is None:
            return [fn(item) for item in items]
        return list(self._executor.map(fn, items))


def map_in_order(
    fn: Callable[[T], R],
    items: Iterable[T],
    executor: Optional[concurrent.futures.Executor] = None,
) -> list[R]:
    """Apply ``fn`` to every item, optionally on ``executor``, keeping item order."""
    return _Executor(executor).map(fn, items)


def build_grid(
    start: float, stop: float, points: int, spacing: Spacing = "linear"
) -> npt.NDArray[np.float64]:
    """
    An inclusive grid of ``points`` values between ``start`` and ``stop``.

    Logarithmic grids need both ends of the same sign and non-zero.
    """
    if points < 1:
        raise SimulationError(
            "empty sweep: the grid must have at least one point",
            type=SimulationErrorType.INVALID_ARGUMENT,
        )
    if spacing == "linear":
        return np.linspace(start, stop, points)
    if spacing == "log":
        if start == 0 or stop == 0 or (start < 0) != (stop < 0):
            raise SimulationError(
                f"log grid needs non-zero ends of equal sign, got [{start}, {stop}]",
                type=SimulationErrorType.INVALID_ARGUMENT,
            )
        sign = -1.0 if start < 0 else 1.0
        return sign * np.geomspace(abs(start), abs(stop), points)
    raise SimulationError(
        f"unknown grid spacing {spacing!r}; expected 'linear' or 'log'",
        type=SimulationErrorType.INVALID_ARGUMENT,
    )


def require_non_empty(grid: Sequence[float] | npt.NDArray[np.float64]) -> None:
    if len(grid) == 0:
        raise SimulationError(
            "empty sweep: the grid has no points",
            type=SimulationErrorType.INVALID_ARGUMENT,
        )


def require_count(name: str, value: object, minimum: int) -> None:
    """Raise ``INVALID_ARGUMENT`` unless ``value`` is an integer (not a bool) >= ``minimum``."""
    if isinstance(value, bool) or not isinstance(value, numbers.Integral):
        raise SimulationError(
            f"{name} must be an integer, got {value!r}",
            type=SimulationErrorType.INVALID_ARGUMENT,
        )
    if value < minimum:
        raise SimulationError(
            f"{name} must be at least {minimum}, got {value}",
            type=SimulationErrorType.INVALID_ARGUMENT,
        )
