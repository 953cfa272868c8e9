from __future__ import annotations

import concurrent.futures
import functools
import logging
import math
from collections.abc import Sequence
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np
import numpy.typing as npt

from .._common import SimulationError, SimulationErrorType
from .._demkov import jz_tanh
from .._serializer import Table
from .._util import map_in_order, require_non_empty
from ._config import SWEEP_PARAMETERS, Engine, ProtocolConfig
from ._core import run_protocol

logger = logging.getLogger(__name__)

G_HZ = 30e3
"""Coupling of a trapped-ion realisation, used only for unit conversion."""


def to_seconds(t: float, g_hz: float = G_HZ) -> float:
    """Convert a time in units of 1/g to seconds for ``g = 2 pi g_hz``."""
    return t / (2 * math.pi * g_hz)


@dataclass(frozen=True)
class _PointResult:
    jz: dict[str, float]
    leakage: float
    error: Optional[str]


@dataclass(frozen=True, eq=False)
class SignalCurve:
    """
    Final ``<Jz>`` along a sweep of one protocol parameter, per engine, with the tanh
    law alongside. Points that failed keep nan values and an error message.
    """

    parameter: str
    grid: npt.NDArray[np.float64]
    engines: tuple[Engine, ...]
    jz_full: npt.NDArray[np.float64]
    jz_demkov: npt.NDArray[np.float64]
    jz_tanh: npt.NDArray[np.float64]
    leakage: npt.NDArray[np.float64]
    errors: tuple[Optional[str], ...]
    series: Optional[tuple[str, float]] = None
    """Name and value of a parameter held fixed across a family of curves."""

    def __post_init__(self) -> None:
        n = len(self.grid)
        for name in ("jz_full", "jz_demkov", "jz_tanh", "leakage", "errors"):
            if len(getattr(self, name)) != n:
                raise SimulationError(
                    f"{name} has length {len(getattr(self, name))}, grid has {n}",
                    type=SimulationErrorType.INVALID_ARGUMENT,
                )

    def to_table(self) -> Table:
        columns = [self.parameter, "jz_numeric", "jz_demkov", "jz_tanh", "leakage", "error"]
        if self.series is not None:
            columns.insert(0, self.series[0])
        rows = []
        for i, value in enumerate(self.grid):
            row: list[Union[float, str, None]] = [
                float(value),
                float(self.jz_full[i]),
                float(self.jz_demkov[i]),
                float(self.jz_tanh[i]),
                float(self.leakage[i]),
                self.errors[i],
            ]
            if self.series is not None:
                row.insert(0, self.series[1])
            rows.append(row)
        return Table(columns=columns, rows=rows)


def _sweep_point(
    config: ProtocolConfig,
    parameter: str,
    engines: tuple[Engine, ...],
    n_samples: int,
    value: float,
) -> _PointResult:
    jz: dict[str, float] = {}
    leakage = math.nan
    try:
        point = config.with_parameter(parameter, value)
        for engine in engines:
            result = run_protocol(point, engine=engine, n_samples=n_samples)
            jz[engine.value] = result.final_jz
            if engine is Engine.FULL:
                leakage = result.leakage
    except SimulationError as err:
        logger.warning("sweep point %s=%g failed: %s", parameter, value, err)
        return _PointResult(jz=jz, leakage=leakage, error=f"{err.type.value}: {err}")
    logger.info("sweep point %s=%g done: %s", parameter, value, jz)
    return _PointResult(jz=jz, leakage=leakage, error=None)


def sweep(
    config: ProtocolConfig,
    parameter: str,
    grid: Sequence[float] | npt.NDArray[np.float64],
    *,
    engines: Sequence[Engine] = (Engine.FULL, Engine.DEMKOV),
    executor: Optional[concurrent.futures.Executor] = None,
    n_samples: int = 51,
    series: Optional[tuple[str, float]] = None,
) -> SignalCurve:
    """
    Run the protocol at every grid value of ``delta``, ``gamma`` or ``n_atoms``.

    Points run on ``executor`` when one is given and come back in grid order. A point
    that raises :py:class:`SimulationError` is recorded with its message and the sweep
    carries on.
    """
    if parameter not in SWEEP_PARAMETERS:
        raise SimulationError(
            f"unknown sweep parameter {parameter!r}; expected one of {SWEEP_PARAMETERS}",
            type=SimulationErrorType.INVALID_ARGUMENT,
        )
    require_non_empty(grid)
    values = np.asarray(grid, dtype=np.float64)
    engines = tuple(engines)
    points = map_in_order(
        functools.partial(_sweep_point, config, parameter, engines, n_samples),
        [float(v) for v in values],
        executor,
    )

    def tanh_at(value: float) -> float:
        try:
            point = config.with_parameter(parameter, value)
        except SimulationError:
            return math.nan
        return jz_tanh(point.params.n_atoms, point.params.delta, point.gamma)

    return SignalCurve(
        parameter=parameter,
        grid=values,
        engines=engines,
        jz_full=np.array([p.jz.get(Engine.FULL.value, math.nan) for p in points]),
        jz_demkov=np.array([p.jz.get(Engine.DEMKOV.value, math.nan) for p in points]),
        jz_tanh=np.array([tanh_at(float(v)) for v in values]),
        leakage=np.array([p.leakage for p in points]),
        errors=tuple(p.error for p in points),
        series=series,
    )
