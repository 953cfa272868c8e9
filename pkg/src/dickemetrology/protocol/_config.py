from __future__ import annotations

import dataclasses
import logging
import math
import warnings
from dataclasses import dataclass
from enum import Enum
from functools import cached_property
from typing import Optional, Union

from .._common import RegimeWarning, SimulationError, SimulationErrorType
from .._demkov import DemkovParams
from .._dicke import DickeParams
from .._dynamics import RampSchedule
from .._spectrum import FockCutoffPolicy, gap_numeric, gap_perturbative

logger = logging.getLogger(__name__)

PREPARATION_RATE_FACTOR = 20.0
"""Default ``tau1`` is this many inverse gaps at the switch."""


class Engine(Enum):
    """How the final Jz of a protocol run is obtained."""

    FULL = "full"
    """
    Integrate the Schrodinger equation of the full spin-boson system over both stages.
    """

    DEMKOV = "demkov"
    """
    Evaluate the closed-form two-level solution of the metrology stage.
    """


SWEEP_PARAMETERS = ("delta", "gamma", "n_atoms")


@dataclass(frozen=True)
class ProtocolConfig:
    """
    Inputs of one run of the two-stage protocol.

    The switch field defaults to ``omega_x_i_fraction`` of the critical field and
    ``tau1`` to ``min(20 / delta_i, N / gamma)``; explicit values override both.
    Everything derived (the gap at the switch, the ramp, the measurement time) is
    computed on first use and cached.

    Example:
        .. code-block:: python

            config = ProtocolConfig(
                params=DickeParams(n_atoms=4, omega=3.0, delta=2e-3),
                gamma=0.03,
            )
            config.schedule.t_f
    """

    params: DickeParams
    """Dicke parameters; ``omega_x`` is ignored, ``delta`` is the field being measured."""

    gamma: float
    """Decay rate of the gap in the metrology stage."""

    omega_x_0: float = 9.0
    """Transverse field at t = 0."""

    omega_x_i: Optional[float] = None
    """Transverse field at the switch; defaults to a fraction of the critical field."""

    omega_x_i_fraction: float = 0.5

    tau1: Optional[float] = None
    """Decay time of the preparation stage."""

    xi: float = 0.1
    """Ratio of the final gap to ``N |d|``."""

    margin: float = 10.0
    """Factor standing in for "much larger than" in the validity conditions."""

    engine: Engine = Engine.FULL

    policy: FockCutoffPolicy = FockCutoffPolicy()

    def __post_init__(self) -> None:
        if not self.gamma > 0:
            raise SimulationError(
                f"gamma must be positive, got {self.gamma}",
                type=SimulationErrorType.INVALID_ARGUMENT,
            )
        if not 0 < self.xi < 1:
            raise SimulationError(
                f"xi must lie in (0, 1), got {self.xi}",
                type=SimulationErrorType.INVALID_ARGUMENT,
            )
        if not self.margin >= 1:
            raise SimulationError(
                f"margin must be at least 1, got {self.margin}",
                type=SimulationErrorType.INVALID_ARGUMENT,
            )
        if not 0 < self.omega_x_i_fraction < 1:
            raise SimulationError(
                f"omega_x_i_fraction must lie in (0, 1), got {self.omega_x_i_fraction}",
                type=SimulationErrorType.INVALID_ARGUMENT,
            )
        if self.tau1 is not None and not self.tau1 > 0:
            raise SimulationError(
                f"tau1 must be positive, got {self.tau1}",
                type=SimulationErrorType.INVALID_ARGUMENT,
            )
        critical = self.params.critical_field
        if not self.omega_x_0 > critical:
            raise SimulationError(
                f"omega_x_0 = {self.omega_x_0} must exceed the critical field {critical}",
                type=SimulationErrorType.INVALID_ARGUMENT,
            )
        if not 0 < self.switch_field < critical:
            raise SimulationError(
                f"omega_x_i = {self.switch_field} must lie in (0, {critical})",
                type=SimulationErrorType.INVALID_ARGUMENT,
            )

    @property
    def switch_field(self) -> float:
        if self.omega_x_i is not None:
            return self.omega_x_i
        return self.omega_x_i_fraction * self.params.critical_field

    @cached_property
    def _switch_gaps(self) -> tuple[float, float, str]:
        at_switch = self.params.replace(omega_x=self.switch_field, delta=0.0)
        try:
            gap, next_gap = gap_numeric(at_switch, self.policy)
            return gap, next_gap, "numeric"
        except SimulationError as err:
            if err.type not in (
                SimulationErrorType.RESOURCE_EXHAUSTED,
                SimulationErrorType.NOT_CONVERGED,
            ):
                raise
            logger.warning("numeric gap unavailable (%s); using the closed form", err)
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", RegimeWarning)
                return gap_perturbative(at_switch), math.nan, "perturbative"

    @property
    def delta_i(self) -> float:
        """Gap of the ground-state pair at the switch field."""
        return self._switch_gaps[0]

    @property
    def next_gap(self) -> float:
        """Gap from the ground-state pair to the next level at the switch field."""
        return self._switch_gaps[1]

    @property
    def delta_i_source(self) -> str:
        return self._switch_gaps[2]

    @property
    def tau2(self) -> float:
        return self.params.n_atoms / self.gamma

    @property
    def resolved_tau1(self) -> float:
        if self.tau1 is not None:
            return self.tau1
        if self.delta_i > 0:
            return min(PREPARATION_RATE_FACTOR / self.delta_i, self.tau2)
        return self.tau2

    @cached_property
    def metrology_time(self) -> float:
        """
        ``(1/gamma) ln(delta_i / (xi N |d|))``; at d = 0 the bias ``N |d|`` is replaced
        by ``gamma``. A negative value is clamped to 0 with a :py:class:`RegimeWarning`.
        """
        bias = self.params.n_atoms * abs(self.params.delta)
        if bias == 0:
            bias = self.gamma
        if self.delta_i <= 0:
            return 0.0
        t_m = math.log(self.delta_i / (self.xi * bias)) / self.gamma
        if t_m < 0:
            warnings.warn(
                f"final gap xi N|d| exceeds the gap at the switch {self.delta_i:.3g}; "
                "the metrology stage is skipped",
                RegimeWarning,
                stacklevel=2,
            )
            return 0.0
        return t_m

    @cached_property
    def schedule(self) -> RampSchedule:
        return RampSchedule(
            omega_x_0=self.omega_x_0,
            omega_x_i=self.switch_field,
            tau1=self.resolved_tau1,
            tau2=self.tau2,
            t_m=self.metrology_time,
            n_atoms=self.params.n_atoms,
        )

    @property
    def demkov_params(self) -> DemkovParams:
        return DemkovParams(
            delta_i=self.delta_i,
            gamma=self.gamma,
            n_atoms=self.params.n_atoms,
            delta=self.params.delta,
        )

    def with_parameter(self, name: str, value: Union[float, int]) -> ProtocolConfig:
        """A copy with ``delta``, ``gamma`` or ``n_atoms`` replaced."""
        if name == "delta":
            return dataclasses.replace(self, params=self.params.replace(delta=float(value)))
        if name == "gamma":
            return dataclasses.replace(self, gamma=float(value))
        if name == "n_atoms":
            if float(value) != int(value):
                raise SimulationError(
                    f"n_atoms must be an integer, got {value}",
                    type=SimulationErrorType.INVALID_ARGUMENT,
                )
            return dataclasses.replace(
                self, params=self.params.replace(n_atoms=int(value))
            )
        raise SimulationError(
            f"unknown sweep parameter {name!r}; expected one of {SWEEP_PARAMETERS}",
            type=SimulationErrorType.INVALID_ARGUMENT,
        )
