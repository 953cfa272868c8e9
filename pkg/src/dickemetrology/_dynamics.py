"""
Time evolution of the full spin-boson state under the two-stage exponential ramp of the
transverse field.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Sequence
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
import numpy.typing as npt
import scipy.integrate
import scipy.sparse

from ._common import SimulationError, SimulationErrorType
from ._dicke import DickeParams, _require_matching_atoms, critical_field, ground_pair
from ._hilbert import (
    StateVector,
    expectation,
    op_boson,
    op_jx,
    op_jz,
    op_parity,
)
from ._serializer import Table

logger = logging.getLogger(__name__)

TRUNCATION_POPULATION = 1e-6
"""Largest population tolerated on the highest retained Fock level."""

MAX_NORM_DRIFT = 1e-8
"""Largest tolerated deviation of the state norm from 1 at any sample."""

MIN_RTOL = 1e-13


@dataclass(frozen=True)
class RampSchedule:
    """
    ``Wx(t) = Wx(0) e^(-t/tau1)`` up to the switch time ``t_i``, then
    ``Wx(t) = Wx_i e^(-(t - t_i)/tau2)`` for a further ``t_m``.

    The switch time is fixed by continuity, ``t_i = tau1 ln(Wx(0)/Wx_i)``.
    """

    omega_x_0: float
    """Transverse field at t = 0, in the normal phase."""

    omega_x_i: float
    """Transverse field at the switch, in the superradiant phase."""

    tau1: float
    """Decay time of the preparation stage."""

    tau2: float
    """Decay time of the metrology stage."""

    t_m: float
    """Duration of the metrology stage."""

    n_atoms: int
    """Number of atoms; fixes ``gamma = N / tau2``."""

    def __post_init__(self) -> None:
        if not self.omega_x_0 > self.omega_x_i > 0:
            raise SimulationError(
                f"need omega_x_0 > omega_x_i > 0, got {self.omega_x_0} and "
                f"{self.omega_x_i}",
                type=SimulationErrorType.INVALID_ARGUMENT,
            )
        if not (self.tau1 > 0 and self.tau2 > 0):
            raise SimulationError(
                f"decay times must be positive, got tau1={self.tau1}, tau2={self.tau2}",
                type=SimulationErrorType.INVALID_ARGUMENT,
            )
        if not self.t_m >= 0:
            raise SimulationError(
                f"t_m must be non-negative, got {self.t_m}",
                type=SimulationErrorType.INVALID_ARGUMENT,
            )
        if self.n_atoms < 1:
            raise SimulationError(
                f"n_atoms must be at least 1, got {self.n_atoms}",
                type=SimulationErrorType.INVALID_ARGUMENT,
            )

    @property
    def t_i(self) -> float:
        return self.tau1 * math.log(self.omega_x_0 / self.omega_x_i)

    @property
    def gamma(self) -> float:
        """Decay rate of the gap in the metrology stage, ``N / tau2``."""
        return self.n_atoms / self.tau2

    @property
    def t_f(self) -> float:
        return self.t_i + self.t_m

    def omega_x(self, t: npt.ArrayLike) -> npt.NDArray[np.float64]:
        times = np.asarray(t, dtype=np.float64)
        return np.where(
            times <= self.t_i,
            self.omega_x_0 * np.exp(-times / self.tau1),
            self.omega_x_i * np.exp(-(times - self.t_i) / self.tau2),
        )

    def validate_against(self, params: DickeParams) -> None:
        """The ramp must start in the normal phase and switch inside the superradiant one."""
        if self.n_atoms != params.n_atoms:
            raise SimulationError(
                f"schedule has N={self.n_atoms} but parameters have N={params.n_atoms}",
                type=SimulationErrorType.BASIS_MISMATCH,
            )
        critical = critical_field(params)
        if not self.omega_x_0 > critical > self.omega_x_i:
            raise SimulationError(
                f"ramp must cross the critical field {critical}: "
                f"omega_x_0={self.omega_x_0}, omega_x_i={self.omega_x_i}",
                type=SimulationErrorType.INVALID_ARGUMENT,
            )


@dataclass(frozen=True)
class MultipletAmplitudes:
    c_plus: complex
    c_minus: complex

    @property
    def leakage(self) -> float:
        """Population outside the ground-state pair."""
        return 1.0 - abs(self.c_plus) ** 2 - abs(self.c_minus) ** 2


def project_onto_multiplet(
    state: StateVector, pair: tuple[StateVector, StateVector]
) -> MultipletAmplitudes:
    """``(<Psi_+|psi>, <Psi_-|psi>)``; the pair must be orthonormal."""
    plus, minus = pair
    cross = abs(plus.overlap(minus))
    if cross > 1e-8:
        raise SimulationError(
            f"multiplet states are not orthogonal (overlap {cross:.3g})",
            type=SimulationErrorType.INVALID_ARGUMENT,
        )
    return MultipletAmplitudes(plus.overlap(state), minus.overlap(state))


def measure_jz(state: StateVector) -> float:
    return float(expectation(op_jz(state.basis), state).real)


def measure_parity(state: StateVector) -> float:
    return float(expectation(op_parity(state.basis), state).real)


@dataclass(frozen=True, eq=False)
class EvolutionResult:
    """
    Observables sampled along one propagation.
    """

    params: DickeParams
    schedule: RampSchedule
    times: npt.NDArray[np.float64]
    jz: npt.NDArray[np.float64]
    parity: npt.NDArray[np.float64]
    norm: npt.NDArray[np.float64]
    c_plus: npt.NDArray[np.complex128]
    c_minus: npt.NDArray[np.complex128]
    final_state: StateVector
    nfev: int = 0
    """Right-hand-side evaluations spent by the integrator."""

    @property
    def leakage(self) -> npt.NDArray[np.float64]:
        return 1.0 - np.abs(self.c_plus) ** 2 - np.abs(self.c_minus) ** 2

    @property
    def final_jz(self) -> float:
        return float(self.jz[-1])

    def to_table(self) -> Table:
        columns = [
            "t",
            "re_c_plus",
            "im_c_plus",
            "re_c_minus",
            "im_c_minus",
            "jz",
            "parity",
            "norm",
            "leakage",
        ]
        leakage = self.leakage
        rows = [
            [
                float(self.times[i]),
                float(self.c_plus[i].real),
                float(self.c_plus[i].imag),
                float(self.c_minus[i].real),
                float(self.c_minus[i].imag),
                float(self.jz[i]),
                float(self.parity[i]),
                float(self.norm[i]),
                float(leakage[i]),
            ]
            for i in range(len(self.times))
        ]
        return Table(columns=columns, rows=rows)


def _static_and_drive(
    params: DickeParams, state: StateVector
) -> tuple[scipy.sparse.csr_matrix, scipy.sparse.csr_matrix]:
    basis = state.basis
    a, a_dag, number = op_boson(basis)
    jz = op_jz(basis)
    field = (a + a_dag).matrix @ jz.matrix
    static = (
        params.omega * number.matrix
        + (2 * params.coupling / math.sqrt(params.n_atoms)) * field
        + params.delta * jz.matrix
    ).real
    drive = op_jx(basis).matrix.real
    return scipy.sparse.csr_matrix(static), scipy.sparse.csr_matrix(drive)


def _integrate(
    rhs: Callable[[float, npt.NDArray[np.float64]], npt.NDArray[np.float64]],
    y0: npt.NDArray[np.float64],
    samples: npt.NDArray[np.float64],
    boundaries: Sequence[float],
    rtol: float,
    atol: float,
) -> tuple[npt.NDArray[np.float64], int]:
    """DOP853 over consecutive segments ending at ``boundaries``, recording ``samples``."""
    y = y0
    recorded = np.empty((samples.size, y0.size))
    filled = np.zeros(samples.size, dtype=bool)
    start, nfev = 0.0, 0
    for end in boundaries:
        mask = ~filled & (samples <= end)
        if end > start:
            evals = np.unique(np.append(samples[mask], end))
            solution = scipy.integrate.solve_ivp(
                rhs,
                (start, end),
                y,
                method="DOP853",
                t_eval=evals,
                rtol=rtol,
                atol=atol,
            )
            if not solution.success:
                raise SimulationError(
                    f"integration failed on [{start}, {end}]: {solution.message}",
                    type=SimulationErrorType.INTEGRATION_FAILED,
                )
            nfev += solution.nfev
            recorded[mask] = solution.y[:, np.searchsorted(evals, samples[mask])].T
            y = solution.y[:, -1]
        else:
            recorded[mask] = y
        filled |= mask
        start = end
    recorded[~filled] = y
    return recorded, nfev


def propagate(
    params: DickeParams,
    schedule: RampSchedule,
    psi0: StateVector,
    *,
    times: Optional[npt.ArrayLike] = None,
    n_samples: int = 201,
    rtol: float = 1e-10,
    atol: float = 1e-12,
    max_norm_drift: float = MAX_NORM_DRIFT,
) -> EvolutionResult:
    """
    Solve ``i d|psi>/dt = (H_D(Wx(t)) + d Jz)|psi>`` from ``psi0`` over ``[0, t_f]``.

    H is real symmetric, so the real and imaginary parts ``u, v`` of the state obey
    ``u' = H v`` and ``v' = -H u``; that real system is integrated with DOP853, restarted
    at ``t_i`` where the ramp has a kink. Sampled observables come from ``times`` or an
    even grid of ``n_samples`` points.

    If the norm drifts by more than ``max_norm_drift`` at any sample, the run is repeated
    with both tolerances divided by 100.

    Raises ``TRUNCATION`` if any sample puts more than 1e-6 population on the highest
    Fock level, and ``INTEGRATION_FAILED`` if the integrator gives up or the norm still
    drifts once ``rtol`` would fall below 1e-13.
    """
    _require_matching_atoms(psi0.basis, params)
    schedule.validate_against(params)
    basis = psi0.basis
    t_f = schedule.t_f
    samples = (
        np.linspace(0.0, t_f, n_samples)
        if times is None
        else np.sort(np.asarray(times, dtype=np.float64))
    )
    if samples.size == 0 or samples[0] < 0 or samples[-1] > t_f * (1 + 1e-12):
        raise SimulationError(
            f"sample times must lie in [0, {t_f}]",
            type=SimulationErrorType.INVALID_ARGUMENT,
        )
    static, drive = _static_and_drive(params, psi0)
    dim = basis.dim

    def rhs(t: float, y: npt.NDArray[np.float64]) -> npt.NDArray[np.float64]:
        u, v = y[:dim], y[dim:]
        omega_x = float(schedule.omega_x(t))
        hu = static @ u + omega_x * (drive @ u)
        hv = static @ v + omega_x * (drive @ v)
        return np.concatenate([hv, -hu])

    y0 = np.concatenate([psi0.amplitudes.real, psi0.amplitudes.imag])
    boundaries = [b for b in (schedule.t_i, t_f) if b > 0]
    recorded, nfev = _integrate(rhs, y0, samples, boundaries, rtol, atol)
    logger.debug(
        "propagated %s over [0, %.6g] in %d segments, rtol=%g, nfev=%d",
        basis,
        t_f,
        len(boundaries),
        rtol,
        nfev,
    )

    psi = recorded[:, :dim] + 1j * recorded[:, dim:]
    norm = np.linalg.norm(psi, axis=1)
    drift = float(np.max(np.abs(norm - 1)))
    if drift > max_norm_drift:
        tighter = rtol / 100
        if tighter < MIN_RTOL:
            raise SimulationError(
                f"norm drifted by {drift:.3g} at rtol={rtol:g}, above {max_norm_drift:g}",
                type=SimulationErrorType.INTEGRATION_FAILED,
            )
        logger.warning(
            "norm drifted by %.3g at rtol=%g; retrying at rtol=%g", drift, rtol, tighter
        )
        return propagate(
            params,
            schedule,
            psi0,
            times=samples,
            rtol=tighter,
            atol=atol / 100,
            max_norm_drift=max_norm_drift,
        )
    edge = np.sum(np.abs(psi.reshape(-1, basis.n_spin, basis.n_fock)[:, :, -1]) ** 2, axis=1)
    if float(np.max(edge)) > TRUNCATION_POPULATION:
        raise SimulationError(
            f"population {float(np.max(edge)):.3g} reached Fock level "
            f"{basis.fock_cutoff}; increase the cutoff",
            type=SimulationErrorType.TRUNCATION,
        )

    jz = op_jz(basis).matrix.real
    parity = op_parity(basis).matrix.real
    plus, minus = ground_pair(basis, params)
    return EvolutionResult(
        params=params,
        schedule=schedule,
        times=samples,
        jz=np.einsum("ti,ij,tj->t", psi.conj(), jz, psi).real,
        parity=np.einsum("ti,ij,tj->t", psi.conj(), parity, psi).real,
        norm=norm,
        c_plus=psi @ plus.amplitudes.conj(),
        c_minus=psi @ minus.amplitudes.conj(),
        final_state=StateVector.normalized(basis, psi[-1]),
        nfev=nfev,
    )
