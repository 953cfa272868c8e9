"""
Subcommands of the command-line front end.

Each command is a function from the resolved :py:class:`RunConfig` and a
:py:class:`CommandContext` to a :py:class:`Table`. The ``@command`` decorator registers it
under its public name; :py:func:`run_command` looks the name up, runs it, and writes the
table to ``<out>/<name>.csv`` behind a header that records the version, the command and
the full configuration.
"""

from __future__ import annotations

import concurrent.futures
import itertools
import logging
import math
import sys
import warnings
from collections.abc import Sequence
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional, TextIO, Union

import numpy as np

from .. import __version__
from .._common import RegimeWarning, SimulationError, SimulationErrorType
from .._demkov import (
    DemkovParams,
    amplitude_cplus,
    final_population,
    jz_tanh,
    two_level_ode_reference,
)
from .._dicke import DickeParams
from .._serializer import Content, CsvSerializer, Table, format_cell, write_atomic
from .._spectrum import gap_asymptotic, gap_numeric, gap_perturbative, spectrum_scan
from .._util import map_in_order
from ..protocol import Engine, check_conditions, run_protocol, sweep
from ._config import RunConfig

logger = logging.getLogger(__name__)


@dataclass
class CommandContext:
    engines: tuple[Engine, ...] = (Engine.FULL, Engine.DEMKOV)
    executor: Optional[concurrent.futures.Executor] = None
    stdout: TextIO = field(default_factory=lambda: sys.stdout)


CommandFn = Callable[[RunConfig, CommandContext], Table]


@dataclass(frozen=True)
class Command:
    name: str
    help: str
    fn: CommandFn


COMMANDS: dict[str, Command] = {}


def command(name: str, help: str) -> Callable[[CommandFn], CommandFn]:
    def decorator(fn: CommandFn) -> CommandFn:
        if name in COMMANDS:
            raise RuntimeError(f"command {name!r} registered twice")
        COMMANDS[name] = Command(name=name, help=help, fn=fn)
        return fn

    return decorator


def run_command(name: str, config: RunConfig, context: CommandContext) -> Path:
    """Run a registered command and write its CSV atomically; returns the CSV path."""
    try:
        cmd = COMMANDS[name]
    except KeyError:
        raise SimulationError(
            f"unknown command {name!r}", type=SimulationErrorType.INVALID_ARGUMENT
        ) from None
    table = cmd.fn(config, context)
    headers = {
        "dicke-metrology": __version__,
        "command": name,
        "config": config.to_json(),
    }
    content = CsvSerializer().serialize(table, headers)
    return write_atomic(Path(config.out) / f"{name}.csv", content)


def _write_conditions(config: RunConfig, text: str) -> None:
    write_atomic(Path(config.out) / "conditions.txt", Content(data=text.encode("utf-8")))


@command("spectrum", "lowest levels of H over a grid of transverse fields")
def cmd_spectrum(config: RunConfig, context: CommandContext) -> Table:
    scan = spectrum_scan(
        config.physics,
        config.spectrum_grid(),
        config.spectrum.levels,
        executor=context.executor,
    )
    return scan.to_table()


def _gap_row(point: tuple[int, float, float, float]) -> list[Union[int, float]]:
    n_atoms, omega, omega_x, coupling = point
    params = DickeParams(
        n_atoms=n_atoms, omega=omega, omega_x=omega_x, coupling=coupling
    )
    numeric, _ = gap_numeric(params)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RegimeWarning)
        perturbative = gap_perturbative(params)
        asymptotic = gap_asymptotic(params)
    rel_error = abs(numeric - perturbative) / numeric if numeric > 0 else math.nan
    return [
        n_atoms,
        omega,
        omega_x,
        numeric,
        perturbative,
        asymptotic,
        rel_error,
    ]


@command("gap", "numeric gap against the weak-coupling closed forms")
def cmd_gap(config: RunConfig, context: CommandContext) -> Table:
    section = config.gap
    omegas = section.omega if section.omega is not None else [config.physics.omega]
    points = [
        (int(n), float(w), float(wx), config.physics.coupling)
        for w, wx, n in itertools.product(omegas, section.omega_x, section.n_atoms)
    ]
    if not points:
        raise SimulationError(
            "empty sweep: the gap grid has no points",
            type=SimulationErrorType.INVALID_ARGUMENT,
        )
    rows = map_in_order(_gap_row, points, context.executor)
    columns = [
        "n_atoms",
        "omega",
        "omega_x",
        "gap_numeric",
        "gap_perturbative",
        "gap_asymptotic",
        "rel_error",
    ]
    return Table(columns=columns, rows=rows)


@command("evolve", "one full propagation of the protocol, sampled in time")
def cmd_evolve(config: RunConfig, context: CommandContext) -> Table:
    protocol = config.protocol_config(Engine.FULL)
    _write_conditions(config, check_conditions(protocol).to_text())
    result = run_protocol(protocol, n_samples=config.evolve.n_samples)
    assert result.evolution is not None
    return result.evolution.to_table()


def _demkov_row(point: tuple[float, float, float, float, int]) -> list[float]:
    x, bias, gamma, gamma_t_end, samples = point
    params = DemkovParams(delta_i=2 * x * gamma, gamma=gamma, n_atoms=1, delta=bias * gamma)
    t_end = gamma_t_end / gamma
    times = np.linspace(0.0, t_end, samples)
    reference = two_level_ode_reference(params, t_end, times=times)
    analytic = np.asarray(amplitude_cplus(params, times))
    diff = float(np.max(np.abs(analytic - reference.c_plus)))
    return [
        x,
        bias,
        final_population(params),
        float(reference.population_plus[-1]),
        0.5 - 0.5 * math.tanh(math.pi * bias / 2),
        diff,
    ]


@command("demkov", "closed-form two-level amplitudes against direct integration")
def cmd_demkov(config: RunConfig, context: CommandContext) -> Table:
    section = config.demkov
    points = [
        (float(x), float(b), section.gamma, section.gamma_t_end, section.points)
        for x, b in itertools.product(section.x, section.bias)
    ]
    if not points:
        raise SimulationError(
            "empty sweep: the demkov grid has no points",
            type=SimulationErrorType.INVALID_ARGUMENT,
        )
    rows = map_in_order(_demkov_row, points, context.executor)
    max_diff = max(r[-1] for r in rows)
    context.stdout.write(f"max_abs_diff={format_cell(max_diff)} points={len(rows)}\n")
    return Table(
        columns=[
            "x",
            "bias",
            "final_population",
            "ode_population",
            "tanh_population",
            "max_abs_diff",
        ],
        rows=rows,
    )


def _engine_columns(values: dict[Engine, float]) -> list[float]:
    return [values.get(Engine.FULL, math.nan), values.get(Engine.DEMKOV, math.nan)]


@command("protocol", "one run of the protocol with each selected engine")
def cmd_protocol(config: RunConfig, context: CommandContext) -> Table:
    protocol = config.protocol_config()
    report = check_conditions(protocol)
    _write_conditions(config, report.to_text())
    values: dict[Engine, float] = {}
    leakage = math.nan
    for engine in context.engines:
        result = run_protocol(protocol, engine=engine, n_samples=config.evolve.n_samples)
        values[engine] = result.final_jz
        if engine is Engine.FULL:
            leakage = result.leakage
    params = protocol.params
    return Table(
        columns=[
            "n_atoms",
            "delta",
            "gamma",
            "t_m",
            "jz_numeric",
            "jz_demkov",
            "jz_tanh",
            "leakage",
        ],
        rows=[
            [
                params.n_atoms,
                params.delta,
                protocol.gamma,
                protocol.metrology_time,
                *_engine_columns(values),
                jz_tanh(params.n_atoms, params.delta, protocol.gamma),
                leakage,
            ]
        ],
    )


@command("sweep", "final signal over a grid of delta, gamma or n_atoms")
def cmd_sweep(config: RunConfig, context: CommandContext) -> Table:
    protocol = config.protocol_config()
    _write_conditions(config, check_conditions(protocol).to_text())
    curve = sweep(
        protocol,
        config.sweep.parameter,
        config.sweep_grid(),
        engines=context.engines,
        executor=context.executor,
        n_samples=config.sweep.n_samples,
    )
    failed = sum(error is not None for error in curve.errors)
    if failed:
        logger.warning("%d of %d sweep points failed", failed, len(curve.grid))
    return curve.to_table()


def command_names() -> Sequence[str]:
    return list(COMMANDS)
