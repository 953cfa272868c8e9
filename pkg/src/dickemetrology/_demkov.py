"""
The exactly solvable two-level problem of the metrology stage: constant bias ``N d``
and a coupling that decays as ``Delta_i e^(-gamma t)``.

The amplitudes are Bessel functions of complex order ``nu = 1/2 - i N d / (2 gamma)``.
They are summed from their power series in :py:mod:`mpmath` at a working precision
that grows with ``x`` and with ``|Im nu|``, so the alternating series and the large
``cosh``/Bessel factors that cancel in the amplitudes keep double-precision accuracy.
"""

from __future__ import annotations

import cmath
import logging
import math
from dataclasses import dataclass
from typing import Optional, Union

import mpmath
import numpy as np
import numpy.typing as npt
import scipy.integrate

from ._common import SimulationError, SimulationErrorType
from ._util import require_count

logger = logging.getLogger(__name__)

MAX_SERIES_TERMS = 500
SERIES_RTOL = 1e-16
FINAL_POPULATION_RESIDUE_ATOL = 1e-8

_LANCZOS_G = 7
_LANCZOS_COEFFICIENTS = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)

TimeLike = Union[float, npt.ArrayLike]


@dataclass(frozen=True)
class DemkovParams:
    """
    Inputs of the two-level metrology stage. Time is measured from the stage switch.
    """

    delta_i: float
    """Gap of the ground-state pair when the metrology stage starts."""

    gamma: float
    """Decay rate of the gap."""

    n_atoms: int
    """Number of atoms N."""

    delta: float
    """Longitudinal field d; the two levels are biased by ``+-N d / 2``."""

    def __post_init__(self) -> None:
        if not self.delta_i >= 0:
            raise SimulationError(
                f"delta_i must be non-negative, got {self.delta_i}",
                type=SimulationErrorType.INVALID_ARGUMENT,
            )
        if not self.gamma > 0:
            raise SimulationError(
                f"gamma must be positive, got {self.gamma}",
                type=SimulationErrorType.INVALID_ARGUMENT,
            )
        require_count("n_atoms", self.n_atoms, 1)
        if not math.isfinite(self.delta):
            raise SimulationError(
                f"delta must be finite, got {self.delta}",
                type=SimulationErrorType.INVALID_ARGUMENT,
            )

    @property
    def x(self) -> float:
        """``Delta_i / (2 gamma)``"""
        return self.delta_i / (2 * self.gamma)

    @property
    def mu(self) -> float:
        """``N d / (2 gamma)``, minus the imaginary part of :py:attr:`nu`."""
        return self.n_atoms * self.delta / (2 * self.gamma)

    @property
    def nu(self) -> complex:
        return complex(0.5, -self.mu)


def complex_gamma(z: complex) -> complex:
    """
    Gamma function of a complex argument by the Lanczos approximation (g = 7), with the
    reflection formula for ``Re z < 1/2``.
    """
    z = complex(z)
    if z.imag == 0 and z.real <= 0 and z.real == math.floor(z.real):
        raise SimulationError(
            f"Gamma has a pole at {z.real:g}", type=SimulationErrorType.INVALID_ARGUMENT
        )
    if z.real < 0.5:
        return math.pi / (cmath.sin(math.pi * z) * complex_gamma(1 - z))
    z -= 1
    series = complex(_LANCZOS_COEFFICIENTS[0])
    for i, c in enumerate(_LANCZOS_COEFFICIENTS[1:], start=1):
        series += c / (z + i)
    t = z + _LANCZOS_G + 0.5
    return cmath.exp(
        0.5 * math.log(2 * math.pi) + (z + 0.5) * cmath.log(t) - t + cmath.log(series)
    )


def _working_digits(x: float, mu: float = 0.0) -> int:
    return 20 + math.ceil((x + math.pi * abs(mu)) / math.log(10))


def _bessel_series(nu: mpmath.mpc, x: mpmath.mpf) -> mpmath.mpc:
    # Caller sets the working precision.
    if nu.imag == 0 and nu.real < 0 and nu.real == mpmath.floor(nu.real):
        n = int(-nu.real)
        return (-1) ** n * _bessel_series(mpmath.mpc(n, 0), x)
    half = x / 2
    term = mpmath.power(half, nu) * mpmath.rgamma(nu + 1)
    total = term
    step = -(half**2)
    for k in range(1, MAX_SERIES_TERMS):
        term = term * step / (k * (nu + k))
        total += term
        if k > half and abs(term) < SERIES_RTOL * abs(total):
            logger.debug("J_%s(%s) converged after %d terms", nu, x, k + 1)
            return total
    raise SimulationError(
        f"Bessel series for order {complex(nu)} at x = {float(x)} did not converge in "
        f"{MAX_SERIES_TERMS} terms",
        type=SimulationErrorType.NOT_CONVERGED,
    )


def bessel_j_complex_order(nu: complex, x: float) -> complex:
    """
    ``J_nu(x)`` for complex order and real ``x > 0`` from the power series
    ``sum_k (-1)^k (x/2)^(nu + 2k) / (k! Gamma(nu + k + 1))``.

    Summation stops once a term is below 1e-16 of the partial sum; 500 terms without
    that raise ``NOT_CONVERGED``. ``(x/2)^nu`` takes the principal branch.
    """
    if not x > 0:
        raise SimulationError(
            f"Bessel argument must be positive, got {x}",
            type=SimulationErrorType.INVALID_ARGUMENT,
        )
    nu = complex(nu)
    with mpmath.workdps(_working_digits(x, nu.imag)):
        value = _bessel_series(mpmath.mpc(nu.real, nu.imag), mpmath.mpf(x))
        return complex(value)


def bessel_j_asymptotic(nu: complex, x: float) -> complex:
    """Large-argument form ``sqrt(2/(pi x)) cos(x - pi nu / 2 - pi / 4)``."""
    if not x > 0:
        raise SimulationError(
            f"Bessel argument must be positive, got {x}",
            type=SimulationErrorType.INVALID_ARGUMENT,
        )
    return math.sqrt(2 / (math.pi * x)) * cmath.cos(x - math.pi * complex(nu) / 2 - math.pi / 4)


class _Amplitudes:
    """Bessel combinations shared by both amplitudes, at one working precision."""

    def __init__(self, params: DemkovParams):
        self.params = params
        self.x = mpmath.mpf(params.x)
        self.nu = mpmath.mpc(0.5, -params.mu)
        self.cosh = mpmath.cosh(mpmath.pi * params.mu)
        j = self.bessel
        self.a1 = j(1 - self.nu, self.x) - 1j * j(-self.nu, self.x)
        self.a2 = j(self.nu - 1, self.x) + 1j * j(self.nu, self.x)

    @staticmethod
    def bessel(nu: mpmath.mpc, x: mpmath.mpf) -> mpmath.mpc:
        return _bessel_series(nu, x)

    def prefactor(self, t: float) -> mpmath.mpf:
        gamma = self.params.gamma
        return (
            mpmath.pi
            / (2 * mpmath.sqrt(2))
            * mpmath.exp(-gamma * t / 2)
            * self.x
            / self.cosh
        )

    def c_plus(self, t: float) -> mpmath.mpc:
        z = self.x * mpmath.exp(-self.params.gamma * t)
        return self.prefactor(t) * (
            self.a1 * self.bessel(self.nu, z) + self.a2 * self.bessel(-self.nu, z)
        )

    def c_minus(self, t: float) -> mpmath.mpc:
        z = self.x * mpmath.exp(-self.params.gamma * t)
        return (
            1j
            * self.prefactor(t)
            * (
                self.a2 * self.bessel(1 - self.nu, z)
                - self.a1 * self.bessel(self.nu - 1, z)
            )
        )


def _evaluate(
    params: DemkovParams, t: TimeLike, which: str
) -> Union[complex, npt.NDArray[np.complex128]]:
    times = np.asarray(t, dtype=np.float64)
    if np.any(times < 0):
        raise SimulationError(
            "times are measured from the stage switch and must be non-negative",
            type=SimulationErrorType.INVALID_ARGUMENT,
        )
    flat = times.ravel()
    if params.delta_i == 0:
        # Pure bias: only phases accumulate.
        half_bias = params.n_atoms * params.delta / 2
        if which == "plus":
            values = np.exp(-1j * half_bias * flat) / math.sqrt(2)
        else:
            values = -np.exp(1j * half_bias * flat) / math.sqrt(2)
    else:
        with mpmath.workdps(_working_digits(params.x, params.mu)):
            amplitudes = _Amplitudes(params)
            fn = amplitudes.c_plus if which == "plus" else amplitudes.c_minus
            values = np.array([complex(fn(float(s))) for s in flat], dtype=np.complex128)
    if times.ndim == 0:
        return complex(values[0])
    return values.reshape(times.shape)


def amplitude_cplus(
    params: DemkovParams, t: TimeLike
) -> Union[complex, npt.NDArray[np.complex128]]:
    """
    ``c_+(t)`` for the initial condition ``c_+(0) = 1/sqrt(2)``, ``c_-(0) = -1/sqrt(2)``.

    ``t`` may be a scalar or an array; the result has the same shape.
    """
    return _evaluate(params, t, "plus")


def amplitude_cminus(
    params: DemkovParams, t: TimeLike
) -> Union[complex, npt.NDArray[np.complex128]]:
    """
    ``c_-(t) = i K (a_2 J_(1-nu)(z) - a_1 J_(nu-1)(z))`` with ``z = x e^(-gamma t)`` and
    ``K`` the prefactor of :py:func:`amplitude_cplus`.
    """
    return _evaluate(params, t, "minus")


def final_population(params: DemkovParams) -> float:
    """
    ``|c_+|^2`` once the coupling has decayed away:
    ``1/2 + i (pi/4)(x / cosh(pi mu)) (J_nu(x) J_-nu(x) - J_(nu-1)(x) J_(1-nu)(x))``.

    The expression is formally complex; an imaginary part above 1e-8 raises
    ``NUMERICAL``. The result is clipped to ``[0, 1]``.
    """
    if params.delta_i == 0:
        return 0.5
    with mpmath.workdps(_working_digits(params.x, params.mu)):
        x = mpmath.mpf(params.x)
        nu = mpmath.mpc(0.5, -params.mu)
        j = _bessel_series
        bracket = j(nu, x) * j(-nu, x) - j(nu - 1, x) * j(1 - nu, x)
        value = complex(
            0.5
            + 1j * mpmath.pi / 4 * x / mpmath.cosh(mpmath.pi * params.mu) * bracket
        )
    if abs(value.imag) > FINAL_POPULATION_RESIDUE_ATOL:
        raise SimulationError(
            f"final population has imaginary residue {value.imag!r}",
            type=SimulationErrorType.NUMERICAL,
        )
    return min(max(value.real, 0.0), 1.0)


def _tanh_argument(n_atoms: int, delta: float, gamma: float) -> float:
    if not gamma > 0:
        raise SimulationError(
            f"gamma must be positive, got {gamma}",
            type=SimulationErrorType.INVALID_ARGUMENT,
        )
    return math.pi * n_atoms * delta / (2 * gamma)


def jz_tanh(n_atoms: int, delta: float, gamma: float) -> float:
    """The large-x signal ``-(N/2) tanh(pi N d / (2 gamma))``."""
    return -0.5 * n_atoms * math.tanh(_tanh_argument(n_atoms, delta, gamma))


def jz_tanh_slope(n_atoms: int, delta: float, gamma: float) -> float:
    """``d jz_tanh / d delta``"""
    arg = _tanh_argument(n_atoms, delta, gamma)
    return -0.5 * n_atoms * (math.pi * n_atoms / (2 * gamma)) / math.cosh(arg) ** 2


def signal_variance(n_atoms: int, delta: float, gamma: float) -> float:
    """
    Variance ``N^2 / (4 cosh^2(pi N d / (2 gamma)))`` of Jz after the stage; its square
    root is the projection noise.
    """
    arg = _tanh_argument(n_atoms, delta, gamma)
    return n_atoms**2 / (4 * math.cosh(arg) ** 2)


def uncertainty_deltabar(n_atoms: int, delta: float, gamma: float) -> float:
    """
    Error propagation ``(2 gamma / (pi N)) cosh(pi N d / (2 gamma))``, smallest at d = 0.
    """
    arg = _tanh_argument(n_atoms, delta, gamma)
    return 2 * gamma / (math.pi * n_atoms) * math.cosh(arg)


@dataclass(frozen=True, eq=False)
class TwoLevelTrajectory:
    times: npt.NDArray[np.float64]
    c_plus: npt.NDArray[np.complex128]
    c_minus: npt.NDArray[np.complex128]

    @property
    def population_plus(self) -> npt.NDArray[np.float64]:
        return np.abs(self.c_plus) ** 2


def two_level_ode_reference(
    params: DemkovParams,
    t_end: float,
    *,
    times: Optional[npt.ArrayLike] = None,
    rtol: float = 1e-12,
    atol: float = 1e-14,
) -> TwoLevelTrajectory:
    """
    Direct integration of
    ``i c+' = (N d / 2) c+ + (Delta(t) / 2) c-``,
    ``i c-' = -(N d / 2) c- + (Delta(t) / 2) c+`` with ``Delta(t) = Delta_i e^(-gamma t)``
    from ``(1/sqrt(2), -1/sqrt(2))``.
    """
    if not t_end >= 0:
        raise SimulationError(
            f"t_end must be non-negative, got {t_end}",
            type=SimulationErrorType.INVALID_ARGUMENT,
        )
    samples = (
        np.linspace(0.0, t_end, 201)
        if times is None
        else np.asarray(times, dtype=np.float64)
    )
    half_bias = params.n_atoms * params.delta / 2

    def rhs(t: float, y: npt.NDArray[np.float64]) -> npt.NDArray[np.float64]:
        half_gap = 0.5 * params.delta_i * math.exp(-params.gamma * t)
        u, v = y[:2], y[2:]
        hu = np.array([half_bias * u[0] + half_gap * u[1], half_gap * u[0] - half_bias * u[1]])
        hv = np.array([half_bias * v[0] + half_gap * v[1], half_gap * v[0] - half_bias * v[1]])
        return np.concatenate([hv, -hu])

    y0 = np.array([1 / math.sqrt(2), -1 / math.sqrt(2), 0.0, 0.0])
    solution = scipy.integrate.solve_ivp(
        rhs,
        (0.0, t_end),
        y0,
        method="DOP853",
        t_eval=samples,
        rtol=rtol,
        atol=atol,
    )
    if not solution.success:
        raise SimulationError(
            f"two-level integration failed: {solution.message}",
            type=SimulationErrorType.INTEGRATION_FAILED,
        )
    c_plus = solution.y[0] + 1j * solution.y[2]
    c_minus = solution.y[1] + 1j * solution.y[3]
    drift = float(np.max(np.abs(np.abs(c_plus) ** 2 + np.abs(c_minus) ** 2 - 1)))
    if drift > 1e-10:
        raise SimulationError(
            f"two-level reference lost normalization by {drift:.3g}",
            type=SimulationErrorType.INTEGRATION_FAILED,
        )
    return TwoLevelTrajectory(times=solution.t, c_plus=c_plus, c_minus=c_minus)
