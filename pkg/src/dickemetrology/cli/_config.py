from __future__ import annotations

import dataclasses
import json
import types
import typing
from collections.abc import Mapping
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Literal, Optional, TypeVar, Union

from .._common import SimulationError, SimulationErrorType
from .._dicke import DickeParams
from .._spectrum import FockCutoffPolicy
from .._util import Spacing, build_grid
from ..protocol import SWEEP_PARAMETERS, Engine, ProtocolConfig

T = TypeVar("T")


@dataclass(frozen=True)
class ProtocolSection:
    gamma: float = 0.03
    omega_x_0: float = 9.0
    omega_x_i: Optional[float] = None
    omega_x_i_fraction: float = 0.5
    tau1: Optional[float] = None
    xi: float = 0.1
    margin: float = 10.0
    engine: str = "full"
    fock_cutoff: Optional[int] = None
    """Fixed Fock cutoff; the converged default when absent."""


@dataclass(frozen=True)
class SpectrumSection:
    omega_x_min: float = 0.0
    omega_x_max: float = 4.0
    points: int = 41
    spacing: Spacing = "linear"
    levels: int = 4


@dataclass(frozen=True)
class GapSection:
    """Rows are every combination of the three lists."""

    n_atoms: list[int] = field(default_factory=lambda: [1, 2, 4, 6, 8, 10])
    omega_x: list[float] = field(default_factory=lambda: [0.02, 0.03, 0.04])
    omega: Optional[list[float]] = None
    """Boson frequencies; the physics section's value when absent."""


@dataclass(frozen=True)
class DemkovSection:
    """Grid of ``x = delta_i / (2 gamma)`` and ``N d / gamma`` compared at fixed gamma."""

    x: list[float] = field(default_factory=lambda: [0.5, 2.0, 10.0, 30.0])
    bias: list[float] = field(default_factory=lambda: [-10.0, -1.0, 0.0, 1.0, 10.0])
    gamma: float = 1.0
    gamma_t_end: float = 12.0
    points: int = 25


@dataclass(frozen=True)
class SweepSection:
    parameter: str = "delta"
    min: float = -0.02
    max: float = 0.02
    points: int = 11
    spacing: Spacing = "linear"
    n_samples: int = 51


@dataclass(frozen=True)
class EvolveSection:
    n_samples: int = 201


@dataclass(frozen=True)
class RunConfig:
    """
    Everything a CLI run needs, as read from one JSON document.

    Sections are ``physics`` (:py:class:`DickeParams`), ``protocol``, ``spectrum``,
    ``gap``, ``demkov``, ``sweep`` and ``evolve``; top-level ``out`` and ``workers`` sit
    beside them. Unknown keys anywhere are errors.
    """

    physics: DickeParams = field(
        default_factory=lambda: DickeParams(n_atoms=4, omega=3.0)
    )
    protocol: ProtocolSection = field(default_factory=ProtocolSection)
    spectrum: SpectrumSection = field(default_factory=SpectrumSection)
    gap: GapSection = field(default_factory=GapSection)
    demkov: DemkovSection = field(default_factory=DemkovSection)
    sweep: SweepSection = field(default_factory=SweepSection)
    evolve: EvolveSection = field(default_factory=EvolveSection)
    out: str = "out"
    workers: int = 1

    def __post_init__(self) -> None:
        if self.workers < 1:
            raise SimulationError(
                f"workers must be at least 1, got {self.workers}",
                type=SimulationErrorType.INVALID_ARGUMENT,
            )
        try:
            Engine(self.protocol.engine)
        except ValueError:
            raise SimulationError(
                f"protocol.engine must be 'full' or 'demkov', got {self.protocol.engine!r}",
                type=SimulationErrorType.INVALID_ARGUMENT,
            ) from None
        if self.sweep.parameter not in SWEEP_PARAMETERS:
            raise SimulationError(
                f"sweep.parameter must be one of {SWEEP_PARAMETERS}, got "
                f"{self.sweep.parameter!r}",
                type=SimulationErrorType.INVALID_ARGUMENT,
            )

    def protocol_config(self, engine: Optional[Engine] = None) -> ProtocolConfig:
        section = self.protocol
        policy = (
            FockCutoffPolicy()
            if section.fock_cutoff is None
            else FockCutoffPolicy(initial=section.fock_cutoff, auto_double=False)
        )
        return ProtocolConfig(
            params=self.physics,
            gamma=section.gamma,
            omega_x_0=section.omega_x_0,
            omega_x_i=section.omega_x_i,
            omega_x_i_fraction=section.omega_x_i_fraction,
            tau1=section.tau1,
            xi=section.xi,
            margin=section.margin,
            engine=engine or Engine(section.engine),
            policy=policy,
        )

    def spectrum_grid(self) -> list[float]:
        s = self.spectrum
        return [float(v) for v in build_grid(s.omega_x_min, s.omega_x_max, s.points, s.spacing)]

    def sweep_grid(self) -> list[float]:
        s = self.sweep
        return [float(v) for v in build_grid(s.min, s.max, s.points, s.spacing)]

    def to_json(self) -> str:
        """Canonical single-line JSON of the resolved configuration."""
        return json.dumps(dataclasses.asdict(self), sort_keys=True, separators=(",", ":"))

    def with_overrides(
        self, *, out: Optional[str] = None, workers: Optional[int] = None, engine: Optional[str] = None
    ) -> RunConfig:
        changes: dict[str, Any] = {}
        if out is not None:
            changes["out"] = out
        if workers is not None:
            changes["workers"] = workers
        if engine is not None:
            changes["protocol"] = dataclasses.replace(self.protocol, engine=engine)
        return dataclasses.replace(self, **changes)


def _matches(value: Any, hint: Any) -> bool:
    origin = typing.get_origin(hint)
    if hint is int:
        return isinstance(value, int) and not isinstance(value, bool)
    if hint is float:
        return isinstance(value, (int, float)) and not isinstance(value, bool)
    if hint is str:
        return isinstance(value, str)
    if origin is Union or origin is types.UnionType:
        return any(_matches(value, arg) for arg in typing.get_args(hint))
    if origin is list:
        (item,) = typing.get_args(hint)
        return isinstance(value, list) and all(_matches(v, item) for v in value)
    if origin is Literal:
        return value in typing.get_args(hint)
    if hint is type(None):
        return value is None
    return True


def _build(default: T, values: Any, path: str) -> T:
    if not isinstance(values, Mapping):
        raise SimulationError(
            f"{path} must be an object", type=SimulationErrorType.INVALID_ARGUMENT
        )
    hints = typing.get_type_hints(type(default))
    known = {f.name for f in dataclasses.fields(default)}  # type: ignore[arg-type]
    for key, value in values.items():
        if key not in known:
            raise SimulationError(
                f"unknown configuration key {path}.{key}",
                type=SimulationErrorType.INVALID_ARGUMENT,
            )
        if not _matches(value, hints[key]):
            raise SimulationError(
                f"{path}.{key} has the wrong type: {value!r}",
                type=SimulationErrorType.INVALID_ARGUMENT,
            )
    try:
        return dataclasses.replace(default, **values)  # type: ignore[type-var]
    except TypeError as err:
        raise SimulationError(
            f"invalid {path} section: {err}", type=SimulationErrorType.INVALID_ARGUMENT
        ) from err


_SECTIONS = ("physics", "protocol", "spectrum", "gap", "demkov", "sweep", "evolve")


def parse_config(document: Mapping[str, Any]) -> RunConfig:
    """Build a :py:class:`RunConfig` from decoded JSON, rejecting unknown keys."""
    defaults = RunConfig()
    changes: dict[str, Any] = {}
    for key, value in document.items():
        if key in _SECTIONS:
            changes[key] = _build(getattr(defaults, key), value, key)
        elif key in ("out", "workers"):
            if not _matches(value, typing.get_type_hints(RunConfig)[key]):
                raise SimulationError(
                    f"{key} has the wrong type: {value!r}",
                    type=SimulationErrorType.INVALID_ARGUMENT,
                )
            changes[key] = value
        else:
            raise SimulationError(
                f"unknown configuration key {key}",
                type=SimulationErrorType.INVALID_ARGUMENT,
            )
    return RunConfig(**changes)


def load_config(path: Union[str, Path, None]) -> RunConfig:
    """Read a JSON configuration file; ``None`` gives the defaults."""
    if path is None:
        return RunConfig()
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as err:
        raise SimulationError(
            f"cannot read configuration {path}: {err}", type=SimulationErrorType.IO
        ) from err
    try:
        document = json.loads(text)
    except json.JSONDecodeError as err:
        raise SimulationError(
            f"configuration {path} is not valid JSON: {err}",
            type=SimulationErrorType.INVALID_ARGUMENT,
        ) from err
    if not isinstance(document, Mapping):
        raise SimulationError(
            f"configuration {path} must be a JSON object",
            type=SimulationErrorType.INVALID_ARGUMENT,
        )
    return parse_config(document)
