"""
Low-lying spectra of the Dicke Hamiltonian, the splitting of the ground-state pair and
the closed-form weak-coupling estimates of that splitting.
"""

from __future__ import annotations

import concurrent.futures
import functools
import logging
import math
import warnings
from collections.abc import Sequence
from dataclasses import dataclass
from typing import Optional

import numpy as np
import numpy.typing as npt
import scipy.linalg
import scipy.special

from ._common import (
    DEFAULT_MAX_DIM,
    DEGENERACY_THRESHOLD,
    RegimeWarning,
    SimulationError,
    SimulationErrorType,
)
from ._dicke import (
    DickeParams,
    _require_matching_atoms,
    build_h,
    build_hd,
    critical_field,
    displaced_fock_state,
    ground_pair,
)
from ._hilbert import (
    HermitianOperator,
    SpinBosonBasis,
    StateVector,
    _boson_annihilation,
    build_basis,
    expectation,
    op_boson,
    op_jx,
    op_parity,
)
from ._serializer import Table
from ._util import map_in_order, require_non_empty

logger = logging.getLogger(__name__)

SPLITTING_REFINE_THRESHOLD = 1e-6
"""Dense-solver gaps below this (units of g) are recomputed by :py:func:`tunneling_splitting`."""

RESIDUAL_RTOL = 1e-8


@dataclass(frozen=True, eq=False)
class SpectrumResult:
    """
    The k lowest eigenpairs of a Hamiltonian, ascending in energy.
    """

    energies: npt.NDArray[np.float64]
    states: tuple[StateVector, ...]
    parities: npt.NDArray[np.float64]
    """``<Pi>`` of each eigenvector."""

    degenerate: npt.NDArray[np.bool_]
    """True where a level lies within 1e-8 of a neighbour."""

    params: Optional[DickeParams] = None

    @property
    def gap(self) -> float:
        """``E_1 - E_0``, or nan when fewer than two levels were computed."""
        if len(self.energies) < 2:
            return math.nan
        return max(float(self.energies[1] - self.energies[0]), 0.0)

    @property
    def next_gap(self) -> float:
        """``E_2 - E_1``, or nan when fewer than three levels were computed."""
        if len(self.energies) < 3:
            return math.nan
        return max(float(self.energies[2] - self.energies[1]), 0.0)


def eigen_lowest(
    hamiltonian: HermitianOperator, k: int, *, params: Optional[DickeParams] = None
) -> SpectrumResult:
    """
    The ``k`` lowest eigenpairs of a dense Hermitian matrix.

    Each pair satisfies ``|Hv - Ev| <= 1e-8 max|H|``; a larger residual raises
    ``NUMERICAL``.
    """
    if not isinstance(hamiltonian, HermitianOperator) or not hamiltonian.is_hermitian():
        raise SimulationError(
            "eigen_lowest needs a Hermitian operator",
            type=SimulationErrorType.NUMERICAL,
        )
    basis = hamiltonian.basis
    if not 1 <= k <= basis.dim:
        raise SimulationError(
            f"k must be in 1..{basis.dim}, got {k}",
            type=SimulationErrorType.INVALID_ARGUMENT,
        )
    matrix = hamiltonian.matrix
    if not np.any(matrix.imag):
        matrix = matrix.real
    energies, vectors = scipy.linalg.eigh(matrix, subset_by_index=[0, k - 1])

    scale = max(float(np.max(np.abs(matrix))), 1.0)
    residuals = np.linalg.norm(matrix @ vectors - vectors * energies, axis=0)
    worst = float(np.max(residuals))
    if worst > RESIDUAL_RTOL * scale:
        raise SimulationError(
            f"eigen-residual {worst:.3g} exceeds {RESIDUAL_RTOL * scale:.3g}",
            type=SimulationErrorType.NUMERICAL,
        )

    states = tuple(StateVector.normalized(basis, vectors[:, i]) for i in range(k))
    parity = op_parity(basis)
    parities = np.array([expectation(parity, s) for s in states], dtype=np.float64)
    spacing = np.diff(energies)
    close = spacing < DEGENERACY_THRESHOLD
    degenerate = np.zeros(k, dtype=bool)
    degenerate[:-1] |= close
    degenerate[1:] |= close
    return SpectrumResult(
        energies=np.asarray(energies, dtype=np.float64),
        states=states,
        parities=parities,
        degenerate=degenerate,
        params=params,
    )


@dataclass(frozen=True)
class FockCutoffPolicy:
    """
    How the boson ladder is truncated.

    Without an explicit ``initial`` cutoff the start is :py:func:`default_fock_cutoff`;
    with ``auto_double`` the cutoff doubles until the two lowest eigenvalues move by less
    than ``tol`` (units of g).
    """

    initial: Optional[int] = None
    auto_double: bool = True
    tol: float = 1e-8
    max_dim: int = DEFAULT_MAX_DIM

    def __post_init__(self) -> None:
        if self.initial is not None and self.initial < 0:
            raise SimulationError(
                f"initial Fock cutoff must be non-negative, got {self.initial}",
                type=SimulationErrorType.INVALID_ARGUMENT,
            )
        if not self.tol > 0:
            raise SimulationError(
                f"cutoff tolerance must be positive, got {self.tol}",
                type=SimulationErrorType.INVALID_ARGUMENT,
            )


def default_fock_cutoff(params: DickeParams) -> int:
    """``ceil(8 N (g/w)^2) + 20``: twice the largest ground-state displacement plus margin."""
    return math.ceil(8 * params.n_atoms * (params.coupling / params.omega) ** 2) + 20


def _lowest_two(basis: SpinBosonBasis, params: DickeParams) -> npt.NDArray[np.float64]:
    matrix = build_h(basis, params).real_matrix()
    top = min(1, basis.dim - 1)
    return scipy.linalg.eigh(matrix, eigvals_only=True, subset_by_index=[0, top])


@functools.lru_cache(maxsize=256)
def converged_basis(
    params: DickeParams, policy: FockCutoffPolicy = FockCutoffPolicy()
) -> SpinBosonBasis:
    """
    The smallest basis on the doubling ladder whose two lowest eigenvalues of H do not
    move when the cutoff is doubled.

    Raises ``NOT_CONVERGED`` when the next doubling would exceed ``policy.max_dim``.
    """
    n_max = policy.initial if policy.initial is not None else default_fock_cutoff(params)
    basis = build_basis(params.n_atoms, n_max, max_dim=policy.max_dim)
    if not policy.auto_double:
        return basis
    threshold = policy.tol * (params.coupling if params.coupling > 0 else 1.0)
    lowest = _lowest_two(basis, params)
    while True:
        doubled = max(2 * n_max, 1)
        if (params.n_atoms + 1) * (doubled + 1) > policy.max_dim:
            raise SimulationError(
                f"Fock cutoff did not converge below dimension {policy.max_dim} "
                f"(last n_max = {n_max})",
                type=SimulationErrorType.NOT_CONVERGED,
            )
        candidate = build_basis(params.n_atoms, doubled, max_dim=policy.max_dim)
        refined = _lowest_two(candidate, params)
        change = float(np.max(np.abs(refined - lowest)))
        logger.debug(
            "cutoff %d -> %d moved lowest levels by %.3g", n_max, doubled, change
        )
        if change <= threshold:
            return basis
        n_max, basis, lowest = doubled, candidate, refined


def tunneling_splitting(basis: SpinBosonBasis, params: DickeParams) -> float:
    """
    The splitting of the ground-state pair of H_D, computed without subtracting two
    nearly equal eigenvalues.

    Each parity sector of H_D is a block-tridiagonal chain over ``m >= 0`` (the ``m`` and
    ``-m`` blocks folded together). Eliminating the chain from its centre outwards gives
    self energies that differ between sectors only by a term that shrinks by one factor
    of Wx per step; that difference is carried directly, and its expectation in the
    folded top block of the sector ground state is the splitting. Exact within the
    truncated space up to corrections of relative order gap/next_gap.
    """
    _require_matching_atoms(basis, params)
    if params.omega_x == 0:
        return 0.0
    n_atoms, n_fock = params.n_atoms, basis.n_fock
    j = basis.j
    a = _boson_annihilation(n_fock)
    quadrature = a + a.T
    number = np.arange(n_fock, dtype=np.float64)
    boson_parity = (-1.0) ** np.arange(n_fock)
    field_scale = 2 * params.coupling / math.sqrt(n_atoms)
    eye = np.eye(n_fock)

    def block(m: float) -> npt.NDArray[np.float64]:
        return np.diag(params.omega * number) + field_scale * m * quadrature

    def hop(m: float) -> float:
        # <m + 1| Wx Jx |m>
        return params.omega_x * 0.5 * math.sqrt(j * (j + 1) - m * (m + 1))

    odd = n_atoms % 2 == 1
    upper = [0.5 + k for k in range((n_atoms + 1) // 2)] if odd else [
        float(k) for k in range(1, n_atoms // 2 + 1)
    ]

    # Even-parity sector Hamiltonian in the folded basis.
    diagonals: list[npt.NDArray[np.float64]] = []
    couplings: list[npt.NDArray[np.float64]] = []
    if odd:
        diagonals.append(block(0.5) + hop(-0.5) * np.diag(boson_parity))
    else:
        centre = np.flatnonzero(boson_parity > 0)
        diagonals.append(np.diag(params.omega * number[centre]))
        couplings.append(math.sqrt(2) * hop(0.0) * eye[:, centre])
        diagonals.append(block(1.0))
    for m in upper[:-1]:
        couplings.append(hop(m) * eye)
        diagonals.append(block(m + 1))
    sector = scipy.linalg.block_diag(*diagonals)
    offsets = np.cumsum([0] + [d.shape[0] for d in diagonals])
    for k, coupling in enumerate(couplings):
        rows = slice(offsets[k + 1], offsets[k + 2])
        cols = slice(offsets[k], offsets[k + 1])
        sector[rows, cols] = coupling
        sector[cols, rows] = coupling.T
    energies, vectors = scipy.linalg.eigh(sector, subset_by_index=[0, 0])
    energy = float(energies[0])
    top = vectors[-n_fock:, 0]

    # Self energies of both sectors and their difference, centre outwards.
    if odd:
        edge = hop(-0.5) * np.diag(boson_parity)
        sigma_even, sigma_odd = edge, -edge
        difference = 2 * edge
    else:
        weight = 2 * hop(0.0) ** 2
        resolvent = 1.0 / (energy - params.omega * number)
        sigma_even = weight * np.diag(resolvent * (boson_parity > 0))
        sigma_odd = weight * np.diag(resolvent * (boson_parity < 0))
        difference = weight * np.diag(resolvent * boson_parity)
    for m in upper[:-1]:
        green_even = np.linalg.inv(energy * eye - block(m) - sigma_even)
        green_odd = np.linalg.inv(energy * eye - block(m) - sigma_odd)
        t2 = hop(m) ** 2
        difference = t2 * green_even @ difference @ green_odd
        sigma_even, sigma_odd = t2 * green_even, t2 * green_odd
    splitting = abs(float(top @ difference @ top))
    logger.debug("tunneling splitting for %s: %.6g", params, splitting)
    return splitting


def _refined_gap(
    basis: SpinBosonBasis, params: DickeParams, spectrum: SpectrumResult
) -> float:
    gap = spectrum.gap
    if (
        not math.isnan(gap)
        and params.coupling > 0
        and gap < SPLITTING_REFINE_THRESHOLD * params.coupling
    ):
        return tunneling_splitting(basis, params)
    return gap


def gap_numeric(
    params: DickeParams, policy: FockCutoffPolicy = FockCutoffPolicy()
) -> tuple[float, float]:
    """
    ``(gap, next_gap)`` of H_D at a converged Fock cutoff.

    Gaps below 1e-6 g are beyond the dense solver and come from
    :py:func:`tunneling_splitting`. The longitudinal field of ``params`` is ignored.
    """
    params = params.replace(delta=0.0)
    basis = converged_basis(params, policy)
    spectrum = eigen_lowest(build_hd(basis, params), min(3, basis.dim), params=params)
    return _refined_gap(basis, params, spectrum), spectrum.next_gap


def _log_prefactor(params: DickeParams) -> float:
    n = params.n_atoms
    return (
        math.log(2)
        - 2 * (params.coupling / params.omega) ** 2
        + (n + 1) * math.log(n)
        - n * math.log(2)
        - float(scipy.special.gammaln(n + 1))
    )


def _require_coupling(params: DickeParams) -> None:
    if params.coupling <= 0:
        raise SimulationError(
            "the closed-form gap needs a non-zero coupling",
            type=SimulationErrorType.INVALID_ARGUMENT,
        )


def gap_perturbative(params: DickeParams) -> float:
    """
    Weak-coupling splitting
    ``2 e^(-2(g/w)^2) N^(N+1) / (2^N N!) Wx (Wx/Wxc)^(N-1)``, evaluated in log space.
    """
    _require_coupling(params)
    if params.omega_x == 0:
        return 0.0
    critical = critical_field(params)
    if params.omega_x >= critical:
        warnings.warn(
            f"Wx = {params.omega_x} is not below the critical field {critical}",
            RegimeWarning,
            stacklevel=2,
        )
    if params.coupling / params.omega > 0.5:
        warnings.warn(
            f"g/w = {params.coupling / params.omega:.3g} is outside the weak-coupling "
            "regime of the closed-form gap",
            RegimeWarning,
            stacklevel=2,
        )
    log_gap = (
        _log_prefactor(params)
        + math.log(params.omega_x)
        + (params.n_atoms - 1) * math.log(params.omega_x / critical)
    )
    return math.exp(log_gap)


def gap_asymptotic(params: DickeParams) -> float:
    """
    Large-N (Stirling) form of :py:func:`gap_perturbative`.
    """
    _require_coupling(params)
    if params.omega_x == 0:
        return 0.0
    n = params.n_atoms
    ratio = critical_field(params) / params.omega_x
    log_gap = (
        math.log(params.omega_x)
        + 0.5 * math.log(2 / math.pi)
        - 2 * (params.coupling / params.omega) ** 2
        + math.log(ratio)
        + 0.5 * math.log(n)
        - n * (math.log(2 * ratio) - 1)
    )
    return math.exp(log_gap)


def scaling_function_estimate(params: DickeParams, gap: float) -> float:
    """
    ``gap / (Wx (Wx/Wxc)^(N-1))``, the numeric estimate of the prefactor f_N(g/w).
    """
    _require_coupling(params)
    if params.omega_x <= 0:
        raise SimulationError(
            "the scaling function needs Wx > 0", type=SimulationErrorType.INVALID_ARGUMENT
        )
    log_power = math.log(params.omega_x) + (params.n_atoms - 1) * math.log(
        params.omega_x / critical_field(params)
    )
    return gap * math.exp(-log_power)


@dataclass(frozen=True)
class EffectiveTwoLevel:
    """
    The Hamiltonian projected onto the ground-state pair,
    ``(delta_n / 2) sigma_x + (bias / 2) correction sigma_z`` in the basis
    ``(|Psi_+>, |Psi_->)``.
    """

    delta_n: float
    """Splitting of the pair."""

    bias: float
    """``N d``"""

    correction: float
    """Reduction of the bias by the admixture of ``|m| = N/2 - 1`` states."""

    def matrix(self) -> npt.NDArray[np.float64]:
        z = 0.5 * self.bias * self.correction
        x = 0.5 * self.delta_n
        return np.array([[z, x], [x, -z]])


def effective_two_level(
    params: DickeParams, spectrum: Optional[SpectrumResult] = None
) -> EffectiveTwoLevel:
    """
    The two-level model of the ground-state pair. The splitting is taken from
    ``spectrum`` when given, otherwise from :py:func:`gap_numeric`.
    """
    _require_coupling(params)
    critical = critical_field(params)
    if params.omega_x > critical / 2:
        warnings.warn(
            f"Wx = {params.omega_x} exceeds half the critical field {critical}; the "
            "two-level model is unreliable",
            RegimeWarning,
            stacklevel=2,
        )
    delta_n = spectrum.gap if spectrum is not None else gap_numeric(params)[0]
    n = params.n_atoms
    if n == 1:
        correction = 1.0
    else:
        correction = 1.0 - math.exp(-(4 / n) * (params.coupling / params.omega) ** 2) * (
            params.omega_x**2 / (2 * critical**2)
        ) * (1 - 1 / n) ** -2
    return EffectiveTwoLevel(
        delta_n=delta_n, bias=n * params.delta, correction=correction
    )


def projected_two_level(
    basis: SpinBosonBasis, params: DickeParams
) -> npt.NDArray[np.float64]:
    """
    H = H_D + d Jz restricted to the exact ground-state pair of H_D, written in the
    symmetrically orthonormalized projections of ``|Psi_+>`` and ``|Psi_->``.

    A direct check of :py:class:`EffectiveTwoLevel`: the off-diagonal element has
    magnitude gap/2 and the diagonal carries the corrected bias.
    """
    params_d = params.replace(delta=0.0)
    spectrum = eigen_lowest(build_hd(basis, params_d), 2)
    pair = np.column_stack([s.amplitudes for s in spectrum.states])
    plus, minus = ground_pair(basis, params)
    localized = np.column_stack([plus.amplitudes, minus.amplitudes])
    coefficients = pair.conj().T @ localized
    # Loewdin orthonormalization of the projected states.
    overlap = coefficients.conj().T @ coefficients
    w, v = np.linalg.eigh(overlap)
    coefficients = coefficients @ (v @ np.diag(w**-0.5) @ v.conj().T)
    vectors = pair @ coefficients
    hamiltonian = build_h(basis, params).matrix
    return (vectors.conj().T @ hamiltonian @ vectors).real


def perturbed_ground_amplitudes(
    basis: SpinBosonBasis, params: DickeParams, sign: int
) -> npt.NDArray[np.complex128]:
    """
    The unnormalized first-order corrected ground state
    ``|Psi_s> - eps |Phi_{0, s(N/2 - 1)}>`` with
    ``eps = e^(-(2/N)(g/w)^2) (Wx / 2Wxc) sqrt(N) / (1 - 1/N)``.

    The minus sign is that of first-order perturbation theory with positive Jx matrix
    elements. Diagnostic only.
    """
    if sign not in (1, -1):
        raise SimulationError(
            f"sign must be +1 or -1, got {sign}", type=SimulationErrorType.INVALID_ARGUMENT
        )
    _require_coupling(params)
    plus, minus = ground_pair(basis, params)
    ground = plus if sign > 0 else minus
    n = params.n_atoms
    if n == 1:
        return np.array(ground.amplitudes)
    eps = (
        math.exp(-(2 / n) * (params.coupling / params.omega) ** 2)
        * (params.omega_x / (2 * critical_field(params)))
        * math.sqrt(n)
        / (1 - 1 / n)
    )
    admixed = displaced_fock_state(basis, params, 0, sign * (basis.j - 1))
    return ground.amplitudes - eps * admixed.amplitudes


def boson_order_parameter(
    params: DickeParams, policy: FockCutoffPolicy = FockCutoffPolicy()
) -> float:
    """
    ``Re <a>`` in the ground state of H = H_D + d Jz.

    Zero by parity at d = 0. Deep in the superradiant phase a small d > 0 selects
    ``|Psi_->`` and the value approaches ``+sqrt(N) g/w``; d < 0 gives the opposite sign.
    """
    basis = converged_basis(params, policy)
    ground = eigen_lowest(build_h(basis, params), 1).states[0]
    a, _, _ = op_boson(basis)
    return complex(expectation(a, ground)).real


@dataclass(frozen=True, eq=False)
class SpectrumScan:
    """
    Low-lying levels of H on a grid of transverse fields.
    """

    params: DickeParams
    basis: SpinBosonBasis
    omega_x: npt.NDArray[np.float64]
    energies: npt.NDArray[np.float64]
    """Shape ``(len(omega_x), k)``."""

    parities: npt.NDArray[np.float64]
    gaps: npt.NDArray[np.float64]
    next_gaps: npt.NDArray[np.float64]

    def to_table(self) -> Table:
        k = self.energies.shape[1]
        columns = (
            ["omega_x"]
            + [f"E{i}" for i in range(k)]
            + ["gap", "next_gap"]
            + [f"parity{i}" for i in range(k)]
        )
        rows = [
            [float(self.omega_x[p])]
            + [float(e) for e in self.energies[p]]
            + [float(self.gaps[p]), float(self.next_gaps[p])]
            + [float(x) for x in self.parities[p]]
            for p in range(len(self.omega_x))
        ]
        return Table(columns=columns, rows=rows)


def _scan_point(
    basis: SpinBosonBasis, params: DickeParams, levels: int
) -> tuple[npt.NDArray[np.float64], npt.NDArray[np.float64], float, float]:
    spectrum = eigen_lowest(build_h(basis, params), levels, params=params)
    if params.delta == 0:
        gap = _refined_gap(basis, params, spectrum)
    else:
        gap = spectrum.gap
    logger.debug("scanned Wx = %g", params.omega_x)
    return spectrum.energies, spectrum.parities, gap, spectrum.next_gap


def spectrum_scan(
    params: DickeParams,
    omega_x_grid: Sequence[float] | npt.NDArray[np.float64],
    levels: int,
    *,
    policy: FockCutoffPolicy = FockCutoffPolicy(),
    executor: Optional[concurrent.futures.Executor] = None,
) -> SpectrumScan:
    """
    The ``levels`` lowest eigenvalues of H at every transverse field in the grid.

    One basis, converged at the smallest field where the displacement is largest, is
    shared by every point.
    """
    require_non_empty(omega_x_grid)
    grid = np.asarray(omega_x_grid, dtype=np.float64)
    basis = converged_basis(params.replace(omega_x=float(np.min(grid))), policy)
    if levels > basis.dim:
        raise SimulationError(
            f"requested {levels} levels from a space of dimension {basis.dim}",
            type=SimulationErrorType.INVALID_ARGUMENT,
        )
    logger.debug("spectrum scan over %d points with %s", len(grid), basis)
    points = map_in_order(
        functools.partial(_scan_point_at, basis, params, levels),
        [float(w) for w in grid],
        executor,
    )
    return SpectrumScan(
        params=params,
        basis=basis,
        omega_x=grid,
        energies=np.array([p[0] for p in points]),
        parities=np.array([p[1] for p in points]),
        gaps=np.array([p[2] for p in points]),
        next_gaps=np.array([p[3] for p in points]),
    )


def _scan_point_at(
    basis: SpinBosonBasis, params: DickeParams, levels: int, omega_x: float
) -> tuple[npt.NDArray[np.float64], npt.NDArray[np.float64], float, float]:
    return _scan_point(basis, params.replace(omega_x=omega_x), levels)


def ground_pair_overlap(
    basis: SpinBosonBasis, params: DickeParams, power: int
) -> complex:
    """``<Psi_+| Jx^power |Psi_->``, which vanishes for every power below N."""
    plus, minus = ground_pair(basis, params)
    jx = op_jx(basis).matrix
    vector = np.array(minus.amplitudes)
    for _ in range(power):
        vector = jx @ vector
    return complex(np.vdot(plus.amplitudes, vector))
