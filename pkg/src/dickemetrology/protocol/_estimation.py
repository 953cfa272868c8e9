from __future__ import annotations

import math
from dataclasses import dataclass

import scipy.integrate

from .._common import SimulationError, SimulationErrorType


def estimate_delta_quasiadiabatic(signal: float, n_atoms: int, gamma: float) -> float:
    """
    Invert the tanh law: ``d = (2 gamma / (pi N)) atanh(-2 signal / N)``.

    A signal at or beyond ``+-N/2`` carries no information about the size of d and
    raises ``INVALID_ARGUMENT``.
    """
    if not gamma > 0:
        raise SimulationError(
            f"gamma must be positive, got {gamma}",
            type=SimulationErrorType.INVALID_ARGUMENT,
        )
    if abs(signal) >= n_atoms / 2:
        raise SimulationError(
            f"saturated signal {signal} (|Jz| must stay below N/2 = {n_atoms / 2})",
            type=SimulationErrorType.INVALID_ARGUMENT,
        )
    return 2 * gamma / (math.pi * n_atoms) * math.atanh(-2 * signal / n_atoms)


@dataclass(frozen=True)
class SignPosterior:
    """Probability that ``d > -delta_c`` given the outcome ``Jz = -N/2``."""

    closed_form: float
    """Limiting expression ``1 - (gamma / (2 Delta_c pi N)) e^(-2 pi delta_c N / gamma)``."""

    numeric_bayes: float
    """Bayes' rule with a flat prior on ``[-Delta_c, Delta_c]``, integrated numerically."""

    @property
    def discrepancy(self) -> float:
        return abs(self.closed_form - self.numeric_bayes)


def single_shot_sign_posterior(
    prior_bound: float, delta_c: float, gamma: float, n_atoms: int
) -> SignPosterior:
    """
    Posterior of the sign readout after one run of the fully adiabatic protocol.

    The likelihood of ``Jz = -N/2`` is the two-level population of ``|Psi_->``,
    ``1/2 + tanh(pi N d / (2 gamma)) / 2``. The closed form is returned unclipped so it
    can be compared with the numeric value outside the regime where it holds.
    """
    if not prior_bound > 0:
        raise SimulationError(
            f"prior bound must be positive, got {prior_bound}",
            type=SimulationErrorType.INVALID_ARGUMENT,
        )
    if not delta_c > 0:
        raise SimulationError(
            f"delta_c must be positive, got {delta_c}",
            type=SimulationErrorType.INVALID_ARGUMENT,
        )
    if not gamma > 0 or n_atoms < 1:
        raise SimulationError(
            f"need gamma > 0 and n_atoms >= 1, got {gamma} and {n_atoms}",
            type=SimulationErrorType.INVALID_ARGUMENT,
        )
    scale = math.pi * n_atoms / (2 * gamma)

    def likelihood(delta: float) -> float:
        return 0.5 + 0.5 * math.tanh(scale * delta)

    evidence, _ = scipy.integrate.quad(
        likelihood, -prior_bound, prior_bound, points=[0.0], limit=200
    )
    lower = max(-delta_c, -prior_bound)
    favourable, _ = scipy.integrate.quad(
        likelihood, lower, prior_bound, points=[0.0] if lower < 0 else None, limit=200
    )
    numeric = min(max(favourable / evidence, 0.0), 1.0)
    closed = 1 - gamma / (2 * prior_bound * math.pi * n_atoms) * math.exp(
        -2 * math.pi * delta_c * n_atoms / gamma
    )
    return SignPosterior(closed_form=closed, numeric_bayes=numeric)
