from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Optional

from .._common import SimulationError, SimulationErrorType
from .._demkov import final_population
from .._dicke import noninteracting_ground
from .._dynamics import EvolutionResult, propagate
from .._spectrum import converged_basis
from ._config import Engine, ProtocolConfig

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ConditionReport:
    """
    The validity conditions of the protocol as ratios that should exceed ``margin``:

    - preparation: ``delta_i tau1`` (the first stage is slow on the scale of the gap)
    - bias: ``delta_i / (N |d|)`` (the pair starts as an even superposition)
    - nonadiabatic: ``next_gap / gamma`` (the metrology stage stays in the pair)
    """

    delta_i: float
    delta_i_source: str
    """``numeric``, or ``perturbative`` when the exact gap was out of reach."""

    next_gap: float
    """Numeric gap to the next level at the switch field (nan if unavailable)."""

    next_gap_estimate: float
    """``Wxc (1 - 1/N)``"""

    preparation_ratio: float
    bias_ratio: float
    nonadiabatic_ratio: float
    nonadiabatic_estimate_ratio: float
    margin: float

    @property
    def preparation_ok(self) -> bool:
        return self.preparation_ratio >= self.margin

    @property
    def bias_ok(self) -> bool:
        return self.bias_ratio >= self.margin

    @property
    def nonadiabatic_ok(self) -> bool:
        ratio = self.nonadiabatic_ratio
        if math.isnan(ratio):
            ratio = self.nonadiabatic_estimate_ratio
        return ratio >= self.margin

    @property
    def passed(self) -> bool:
        return self.preparation_ok and self.bias_ok and self.nonadiabatic_ok

    def to_text(self) -> str:
        """``key=value`` lines, one per quantity."""

        def flag(ok: bool) -> str:
            return "pass" if ok else "warn"

        lines = [
            f"delta_i={self.delta_i!r}",
            f"delta_i_source={self.delta_i_source}",
            f"next_gap={self.next_gap!r}",
            f"next_gap_estimate={self.next_gap_estimate!r}",
            f"preparation_ratio={self.preparation_ratio!r} {flag(self.preparation_ok)}",
            f"bias_ratio={self.bias_ratio!r} {flag(self.bias_ok)}",
            f"nonadiabatic_ratio={self.nonadiabatic_ratio!r} "
            f"{flag(self.nonadiabatic_ok)}",
            f"nonadiabatic_estimate_ratio={self.nonadiabatic_estimate_ratio!r}",
            f"margin={self.margin!r}",
            f"passed={self.passed}",
        ]
        return "\n".join(lines) + "\n"


def check_conditions(config: ProtocolConfig) -> ConditionReport:
    """Evaluate the validity conditions; a failing condition is reported, not raised."""
    n = config.params.n_atoms
    delta_i = config.delta_i
    bias = n * abs(config.params.delta)
    estimate = config.params.critical_field * (1 - 1 / n)
    report = ConditionReport(
        delta_i=delta_i,
        delta_i_source=config.delta_i_source,
        next_gap=config.next_gap,
        next_gap_estimate=estimate,
        preparation_ratio=delta_i * config.resolved_tau1,
        bias_ratio=math.inf if bias == 0 else delta_i / bias,
        nonadiabatic_ratio=config.next_gap / config.gamma,
        nonadiabatic_estimate_ratio=estimate / config.gamma,
        margin=config.margin,
    )
    if not report.passed:
        logger.warning("protocol conditions not met at margin %g: %s", config.margin, report)
    return report


def measurement_time(config: ProtocolConfig) -> float:
    """
    Duration ``t_m = (1/gamma) ln(delta_i / (xi N |d|))`` of the metrology stage.

    The single-shot error is of order ``gamma / N``, i.e. ``1 / (t_m N)`` up to
    logarithmic corrections.
    """
    if config.params.delta == 0:
        raise SimulationError(
            "the measurement time is undefined at delta = 0",
            type=SimulationErrorType.INVALID_ARGUMENT,
        )
    return config.metrology_time


@dataclass(frozen=True, eq=False)
class ProtocolResult:
    config: ProtocolConfig
    engine: Engine
    final_jz: float
    conditions: ConditionReport
    evolution: Optional[EvolutionResult] = None
    """Sampled trajectory of the full simulation."""

    final_population: Optional[float] = None
    """``|c_+|^2`` of the two-level solution."""

    @property
    def leakage(self) -> float:
        """Final population outside the ground-state pair; nan for the two-level engine."""
        if self.evolution is None:
            return math.nan
        return float(self.evolution.leakage[-1])


def run_protocol(
    config: ProtocolConfig,
    *,
    engine: Optional[Engine] = None,
    n_samples: int = 201,
) -> ProtocolResult:
    """
    Run the preparation and metrology stages and return the final ``<Jz>``.

    The full engine starts from every atom in ``|->_x`` with the boson in vacuum. The
    two-level engine returns ``N (|c_+|^2 - 1/2)`` from the closed-form solution.
    """
    engine = engine or config.engine
    conditions = check_conditions(config)
    n = config.params.n_atoms
    if engine is Engine.DEMKOV:
        population = final_population(config.demkov_params)
        return ProtocolResult(
            config=config,
            engine=engine,
            final_jz=n * (population - 0.5),
            conditions=conditions,
            final_population=population,
        )
    schedule = config.schedule
    smallest_field = float(schedule.omega_x(schedule.t_f))
    basis = converged_basis(config.params.replace(omega_x=smallest_field), config.policy)
    logger.debug("running %s over %s with %s", engine.value, basis, schedule)
    evolution = propagate(
        config.params,
        schedule,
        noninteracting_ground(basis),
        n_samples=n_samples,
    )
    return ProtocolResult(
        config=config,
        engine=engine,
        final_jz=evolution.final_jz,
        conditions=conditions,
        evolution=evolution,
    )
