"""
The Dicke Hamiltonian, its symmetry-breaking term, and the closed-form eigensystem at
zero transverse field.

All energies are in units of the coupling g and all times in 1/g.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from typing import Any

import numpy as np
import scipy.special

from ._common import SimulationError, SimulationErrorType
from ._hilbert import (
    HermitianOperator,
    SpinBosonBasis,
    StateVector,
    _boson_displacement,
    op_boson,
    op_jx,
    op_jz,
)
from ._util import require_count


@dataclass(frozen=True)
class DickeParams:
    """
    Physical parameters of ``H = w a_dag a + Wx Jx + (2g/sqrt(N))(a_dag + a) Jz + d Jz``.
    """

    n_atoms: int
    """Number of atoms N."""

    omega: float
    """Boson frequency w."""

    omega_x: float = 0.0
    """Transverse field Wx."""

    delta: float = 0.0
    """Longitudinal symmetry-breaking field d."""

    coupling: float = 1.0
    """
    Spin-boson coupling g. It is the energy unit and stays 1 except for the
    non-interacting limit g = 0.
    """

    def __post_init__(self) -> None:
        require_count("n_atoms", self.n_atoms, 1)
        if not self.omega > 0:
            raise SimulationError(
                f"omega must be positive, got {self.omega}",
                type=SimulationErrorType.INVALID_ARGUMENT,
            )
        if not self.omega_x >= 0:
            raise SimulationError(
                f"omega_x must be non-negative, got {self.omega_x}",
                type=SimulationErrorType.INVALID_ARGUMENT,
            )
        if not self.coupling >= 0:
            raise SimulationError(
                f"coupling must be non-negative, got {self.coupling}",
                type=SimulationErrorType.INVALID_ARGUMENT,
            )
        if not math.isfinite(self.delta):
            raise SimulationError(
                f"delta must be finite, got {self.delta}",
                type=SimulationErrorType.INVALID_ARGUMENT,
            )

    def replace(self, **changes: Any) -> DickeParams:
        return dataclasses.replace(self, **changes)

    @property
    def critical_field(self) -> float:
        return critical_field(self)


def critical_field(params: DickeParams) -> float:
    """The transverse field 4g^2/w of the superradiant transition."""
    return 4 * params.coupling**2 / params.omega


def _require_matching_atoms(basis: SpinBosonBasis, params: DickeParams) -> None:
    if basis.n_atoms != params.n_atoms:
        raise SimulationError(
            f"basis has N={basis.n_atoms} but parameters have N={params.n_atoms}",
            type=SimulationErrorType.BASIS_MISMATCH,
        )


def build_hd(basis: SpinBosonBasis, params: DickeParams) -> HermitianOperator:
    """``H_D = w a_dag a + Wx Jx + (2g/sqrt(N))(a_dag + a) Jz``; commutes with parity."""
    _require_matching_atoms(basis, params)
    a, a_dag, number = op_boson(basis)
    jz = op_jz(basis)
    field = (a + a_dag).matrix @ jz.matrix
    matrix = (
        params.omega * number.matrix
        + params.omega_x * op_jx(basis).matrix
        + (2 * params.coupling / math.sqrt(params.n_atoms)) * field
    )
    return HermitianOperator(basis, matrix)


def build_h(basis: SpinBosonBasis, params: DickeParams) -> HermitianOperator:
    """``H = H_D + d Jz``"""
    hd = build_hd(basis, params)
    if params.delta == 0:
        return hd
    return HermitianOperator(basis, hd.matrix + params.delta * op_jz(basis).matrix)


def zero_field_energy(params: DickeParams, n: int, m: float) -> float:
    """Energy ``n w - (g^2 N / w)(2m/N)^2`` of the displaced Fock state at Wx = 0."""
    n_atoms = params.n_atoms
    return n * params.omega - (params.coupling**2 * n_atoms / params.omega) * (
        2 * m / n_atoms
    ) ** 2


def zero_field_displacement(params: DickeParams, m: float) -> float:
    """Coherent amplitude ``-(2g / (w sqrt(N))) m`` of the m sector at Wx = 0."""
    return -2 * params.coupling * m / (params.omega * math.sqrt(params.n_atoms))


def displaced_fock_state(
    basis: SpinBosonBasis, params: DickeParams, n: int, m: float
) -> StateVector:
    """
    ``|Phi_{n,m}> = D(-(2g / (w sqrt(N))) m) |N/2, m>|n>``, the eigenstate of H_D at
    Wx = 0 with energy :py:func:`zero_field_energy`.
    """
    _require_matching_atoms(basis, params)
    m_index = basis.m_index_of(m)
    if not 0 <= n <= basis.fock_cutoff:
        raise SimulationError(
            f"Fock level n={n} is outside 0..{basis.fock_cutoff}",
            type=SimulationErrorType.INVALID_ARGUMENT,
        )
    alpha = zero_field_displacement(params, m)
    if alpha**2 > basis.fock_cutoff / 4:
        raise SimulationError(
            f"displacement |alpha|^2 = {alpha**2:.4g} for m={m} is not truncation-safe "
            f"for n_max = {basis.fock_cutoff}",
            type=SimulationErrorType.TRUNCATION,
        )
    boson = np.zeros(basis.n_fock, dtype=np.complex128)
    boson[n] = 1.0
    if alpha != 0:
        boson = _boson_displacement(basis.n_fock, alpha) @ boson
    grid = np.zeros((basis.n_spin, basis.n_fock), dtype=np.complex128)
    grid[m_index] = boson
    return StateVector.normalized(basis, grid.ravel())


def ground_pair(
    basis: SpinBosonBasis, params: DickeParams
) -> tuple[StateVector, StateVector]:
    """
    The two degenerate ground states at Wx = 0,
    ``|Psi_+-> = D(-+ sqrt(N) g / w) |N/2, +-N/2>|0>``, returned as ``(plus, minus)``.

    The transverse field of ``params`` is ignored.
    """
    j = basis.j
    return (
        displaced_fock_state(basis, params, 0, j),
        displaced_fock_state(basis, params, 0, -j),
    )


def noninteracting_ground(basis: SpinBosonBasis) -> StateVector:
    """
    Every atom in ``|->_x`` and the boson in vacuum: the J_x eigenstate with eigenvalue
    -N/2.

    Amplitudes are ``2^(-N/2) (-1)^k sqrt(C(N, k))`` on ``|N/2, k - N/2>|0>``, so the first
    amplitude is real and positive.
    """
    n_atoms = basis.n_atoms
    k = np.arange(n_atoms + 1)
    log_weights = 0.5 * (
        scipy.special.gammaln(n_atoms + 1)
        - scipy.special.gammaln(k + 1)
        - scipy.special.gammaln(n_atoms - k + 1)
        - n_atoms * math.log(2)
    )
    grid = np.zeros((basis.n_spin, basis.n_fock), dtype=np.complex128)
    grid[:, 0] = (-1.0) ** k * np.exp(log_weights)
    return StateVector.normalized(basis, grid.ravel())

