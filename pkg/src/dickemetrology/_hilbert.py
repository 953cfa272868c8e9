"""
Basis construction and operator algebra for N collective spins (j = N/2) coupled to one
truncated bosonic mode.

States are indexed m-major: the flat index of ``|j, m>|n>`` is
``m_index * (n_max + 1) + n`` with ``m_index = m + j`` running over ``0..N``. Every matrix
is therefore ``kron(spin_factor, boson_factor)``.
"""

from __future__ import annotations

import functools
import logging
from dataclasses import dataclass
from typing import Union

import numpy as np
import numpy.typing as npt
import scipy.linalg
from typing_extensions import Self

from ._common import (
    DEFAULT_MAX_DIM,
    HERMITIAN_ATOL,
    IMAGINARY_RESIDUE_ATOL,
    NORM_ATOL,
    SimulationError,
    SimulationErrorType,
)
from ._util import require_count

logger = logging.getLogger(__name__)

ComplexArray = npt.NDArray[np.complex128]
RealArray = npt.NDArray[np.float64]


@dataclass(frozen=True)
class SpinBosonBasis:
    """
    The product space of the symmetric spin irrep j = N/2 and Fock states 0..n_max.
    """

    n_atoms: int
    """Number of two-level atoms N."""

    fock_cutoff: int
    """Highest retained Fock level n_max."""

    def __post_init__(self) -> None:
        require_count("n_atoms", self.n_atoms, 1)
        require_count("fock_cutoff", self.fock_cutoff, 0)

    @property
    def j(self) -> float:
        """Total angular momentum N/2."""
        return self.n_atoms / 2

    @property
    def n_spin(self) -> int:
        return self.n_atoms + 1

    @property
    def n_fock(self) -> int:
        return self.fock_cutoff + 1

    @property
    def dim(self) -> int:
        return self.n_spin * self.n_fock

    def index(self, m_index: int, n: int) -> int:
        """Flat index of ``|j, m_index - j>|n>``."""
        if not 0 <= m_index < self.n_spin or not 0 <= n < self.n_fock:
            raise SimulationError(
                f"(m_index={m_index}, n={n}) is outside the basis "
                f"(N={self.n_atoms}, n_max={self.fock_cutoff})",
                type=SimulationErrorType.INVALID_ARGUMENT,
            )
        return m_index * self.n_fock + n

    def unflatten(self, flat: int) -> tuple[int, int]:
        """Inverse of :py:meth:`index`."""
        if not 0 <= flat < self.dim:
            raise SimulationError(
                f"flat index {flat} is outside 0..{self.dim - 1}",
                type=SimulationErrorType.INVALID_ARGUMENT,
            )
        m_index, n = divmod(flat, self.n_fock)
        return m_index, n

    def m_index_of(self, m: float) -> int:
        """Position of the spin projection m in the m-major ordering."""
        shifted = m + self.j
        m_index = int(round(shifted))
        if abs(shifted - m_index) > 1e-9 or not 0 <= m_index < self.n_spin:
            raise SimulationError(
                f"m={m} is not a projection of j={self.j}",
                type=SimulationErrorType.INVALID_ARGUMENT,
            )
        return m_index

    def m_values(self) -> RealArray:
        """Spin projections m = -j..j in basis order."""
        return np.arange(self.n_spin, dtype=np.float64) - self.j


def build_basis(
    n_atoms: int, fock_cutoff: int, *, max_dim: int = DEFAULT_MAX_DIM
) -> SpinBosonBasis:
    """
    Build the spin-boson basis, refusing requests above the memory cap.

    Example:
        .. code-block:: python

            basis = build_basis(4, 20)
            assert basis.dim == 105
    """
    basis = SpinBosonBasis(n_atoms=n_atoms, fock_cutoff=fock_cutoff)
    if basis.dim > max_dim:
        raise SimulationError(
            f"dimension {basis.dim} for N={n_atoms}, n_max={fock_cutoff} exceeds the "
            f"memory cap {max_dim}",
            type=SimulationErrorType.RESOURCE_EXHAUSTED,
        )
    logger.debug("built basis N=%d n_max=%d dim=%d", n_atoms, fock_cutoff, basis.dim)
    return basis


def _require_same_basis(a: SpinBosonBasis, b: SpinBosonBasis) -> None:
    if a != b:
        raise SimulationError(
            f"basis mismatch: {a} vs {b}", type=SimulationErrorType.BASIS_MISMATCH
        )


@dataclass(frozen=True, eq=False)
class Operator:
    """
    A dense complex matrix acting on a :py:class:`SpinBosonBasis`.

    The matrix is copied on construction and made read-only.
    """

    basis: SpinBosonBasis
    matrix: ComplexArray

    def __post_init__(self) -> None:
        matrix = np.array(self.matrix, dtype=np.complex128)
        if matrix.shape != (self.basis.dim, self.basis.dim):
            raise SimulationError(
                f"operator shape {matrix.shape} does not match basis dimension "
                f"{self.basis.dim}",
                type=SimulationErrorType.BASIS_MISMATCH,
            )
        matrix.setflags(write=False)
        object.__setattr__(self, "matrix", matrix)

    def is_hermitian(self, atol: float = HERMITIAN_ATOL) -> bool:
        return bool(np.allclose(self.matrix, self.matrix.conj().T, rtol=0.0, atol=atol))

    def as_hermitian(self) -> HermitianOperator:
        return HermitianOperator(self.basis, self.matrix)

    def dagger(self) -> Operator:
        return _wrap(self.basis, self.matrix.conj().T, hermitian=False)

    def _hermitian_result(self, other: object) -> bool:
        return isinstance(self, HermitianOperator) and isinstance(
            other, HermitianOperator
        )

    def __add__(self, other: Operator) -> Operator:
        _require_same_basis(self.basis, other.basis)
        return _wrap(
            self.basis,
            self.matrix + other.matrix,
            hermitian=self._hermitian_result(other),
        )

    def __sub__(self, other: Operator) -> Operator:
        _require_same_basis(self.basis, other.basis)
        return _wrap(
            self.basis,
            self.matrix - other.matrix,
            hermitian=self._hermitian_result(other),
        )

    def __mul__(self, scalar: Union[float, complex]) -> Operator:
        real = isinstance(scalar, (int, float)) or complex(scalar).imag == 0
        return _wrap(
            self.basis,
            complex(scalar) * self.matrix,
            hermitian=isinstance(self, HermitianOperator) and real,
        )

    __rmul__ = __mul__

    def __matmul__(self, other: Operator) -> Operator:
        _require_same_basis(self.basis, other.basis)
        return _wrap(self.basis, self.matrix @ other.matrix, hermitian=False)


@dataclass(frozen=True, eq=False)
class HermitianOperator(Operator):
    """An :py:class:`Operator` whose matrix equals its conjugate transpose."""

    def __post_init__(self) -> None:
        super().__post_init__()
        if not self.is_hermitian():
            deviation = float(np.max(np.abs(self.matrix - self.matrix.conj().T)))
            raise SimulationError(
                f"matrix is not Hermitian (max deviation {deviation:.3g})",
                type=SimulationErrorType.INVALID_ARGUMENT,
            )

    def real_matrix(self) -> RealArray:
        """The matrix as a real array; fails if any entry has an imaginary part."""
        if np.any(self.matrix.imag != 0.0):
            raise SimulationError(
                "operator has complex matrix elements",
                type=SimulationErrorType.NUMERICAL,
            )
        return np.ascontiguousarray(self.matrix.real)


def _wrap(basis: SpinBosonBasis, matrix: ComplexArray, *, hermitian: bool) -> Operator:
    if hermitian:
        # Symmetrize away rounding from arithmetic on Hermitian operands.
        return HermitianOperator(basis, (matrix + matrix.conj().T) / 2)
    return Operator(basis, matrix)


@dataclass(frozen=True, eq=False)
class StateVector:
    """
    A normalized complex amplitude vector over a :py:class:`SpinBosonBasis`.
    """

    basis: SpinBosonBasis
    amplitudes: ComplexArray

    def __post_init__(self) -> None:
        amplitudes = np.array(self.amplitudes, dtype=np.complex128)
        if amplitudes.shape != (self.basis.dim,):
            raise SimulationError(
                f"state length {amplitudes.shape} does not match basis dimension "
                f"{self.basis.dim}",
                type=SimulationErrorType.BASIS_MISMATCH,
            )
        norm = float(np.linalg.norm(amplitudes))
        if abs(norm - 1.0) > NORM_ATOL:
            raise SimulationError(
                f"state is not normalized (norm {norm!r})",
                type=SimulationErrorType.INVALID_ARGUMENT,
            )
        amplitudes.setflags(write=False)
        object.__setattr__(self, "amplitudes", amplitudes)

    @classmethod
    def normalized(cls, basis: SpinBosonBasis, amplitudes: npt.ArrayLike) -> Self:
        """Build a state from amplitudes of any non-zero norm."""
        values = np.asarray(amplitudes, dtype=np.complex128)
        norm = float(np.linalg.norm(values))
        if norm == 0.0:
            raise SimulationError(
                "cannot normalize the zero vector",
                type=SimulationErrorType.INVALID_ARGUMENT,
            )
        return cls(basis, values / norm)

    def overlap(self, other: StateVector) -> complex:
        """``<self|other>``"""
        _require_same_basis(self.basis, other.basis)
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def as_grid(self) -> ComplexArray:
        """Amplitudes reshaped to ``(N + 1, n_max + 1)``, rows indexed by m_index."""
        return self.amplitudes.reshape(self.basis.n_spin, self.basis.n_fock)

    def fock_populations(self) -> RealArray:
        """Population of each Fock level, summed over the spin factor."""
        return np.sum(np.abs(self.as_grid()) ** 2, axis=0)


# Matrix factors. Spin factors are indexed by m_index, boson factors by n.


def _spin_raising(n_atoms: int) -> RealArray:
    j = n_atoms / 2
    m = np.arange(n_atoms, dtype=np.float64) - j
    return np.diag(np.sqrt(j * (j + 1) - m * (m + 1)), k=-1)


def _spin_jz(n_atoms: int) -> RealArray:
    return np.diag(np.arange(n_atoms + 1, dtype=np.float64) - n_atoms / 2)


def _spin_flip(n_atoms: int) -> RealArray:
    return np.fliplr(np.eye(n_atoms + 1))


def _boson_annihilation(n_fock: int) -> RealArray:
    return np.diag(np.sqrt(np.arange(1, n_fock, dtype=np.float64)), k=1)


def _boson_parity(n_fock: int) -> RealArray:
    return np.diag((-1.0) ** np.arange(n_fock))


def _boson_displacement(n_fock: int, alpha: complex) -> ComplexArray:
    a = _boson_annihilation(n_fock)
    # K = -i (alpha a^dag - alpha* a) is Hermitian and D = exp(iK).
    generator = -1j * (alpha * a.T - np.conj(alpha) * a)
    w, v = scipy.linalg.eigh(generator)
    return (v * np.exp(1j * w)) @ v.conj().T


def _lift_spin(basis: SpinBosonBasis, factor: npt.ArrayLike) -> ComplexArray:
    return np.kron(factor, np.eye(basis.n_fock)).astype(np.complex128)


def _lift_boson(basis: SpinBosonBasis, factor: npt.ArrayLike) -> ComplexArray:
    return np.kron(np.eye(basis.n_spin), factor).astype(np.complex128)


@functools.lru_cache(maxsize=64)
def identity(basis: SpinBosonBasis) -> HermitianOperator:
    return HermitianOperator(basis, np.eye(basis.dim))


@functools.lru_cache(maxsize=64)
def op_jplus(basis: SpinBosonBasis) -> Operator:
    """J_+ with elements sqrt(j(j+1) - m(m+1)) from m to m+1."""
    return Operator(basis, _lift_spin(basis, _spin_raising(basis.n_atoms)))


@functools.lru_cache(maxsize=64)
def op_jminus(basis: SpinBosonBasis) -> Operator:
    return Operator(basis, _lift_spin(basis, _spin_raising(basis.n_atoms).T))


@functools.lru_cache(maxsize=64)
def op_jz(basis: SpinBosonBasis) -> HermitianOperator:
    return HermitianOperator(basis, _lift_spin(basis, _spin_jz(basis.n_atoms)))


@functools.lru_cache(maxsize=64)
def op_jx(basis: SpinBosonBasis) -> HermitianOperator:
    """J_x = (J_+ + J_-)/2"""
    raising = _spin_raising(basis.n_atoms)
    return HermitianOperator(basis, _lift_spin(basis, (raising + raising.T) / 2))


@functools.lru_cache(maxsize=64)
def op_jy(basis: SpinBosonBasis) -> HermitianOperator:
    """J_y = (J_+ - J_-)/2i"""
    raising = _spin_raising(basis.n_atoms)
    return HermitianOperator(basis, _lift_spin(basis, (raising - raising.T) / 2j))


@functools.lru_cache(maxsize=64)
def op_boson(basis: SpinBosonBasis) -> tuple[Operator, Operator, HermitianOperator]:
    """
    The ladder operators ``(a, a_dag, a_dag a)`` truncated at n_max.

    ``a_dag |n_max> = 0`` so ``[a, a_dag]`` equals the identity except in the n = n_max
    diagonal entry of every spin block, where it is ``-n_max``.
    """
    a = _boson_annihilation(basis.n_fock)
    number = np.diag(np.arange(basis.n_fock, dtype=np.float64))
    return (
        Operator(basis, _lift_boson(basis, a)),
        Operator(basis, _lift_boson(basis, a.T)),
        HermitianOperator(basis, _lift_boson(basis, number)),
    )


@functools.lru_cache(maxsize=64)
def op_parity(basis: SpinBosonBasis) -> HermitianOperator:
    """
    The parity ``Pi = Pi_s (x) (-1)^(a_dag a)``.

    ``Pi_s`` is sigma_x on every atom restricted to the symmetric irrep, which maps
    ``|j, m>`` to ``|j, -m>`` with phase +1. Hence
    ``Pi |j, m>|n> = (-1)^n |j, -m>|n>``; it differs from ``exp(i pi J_x)`` by the global
    phase ``i^N``.
    """
    return HermitianOperator(
        basis,
        np.kron(_spin_flip(basis.n_atoms), _boson_parity(basis.n_fock)).astype(
            np.complex128
        ),
    )


def displacement_operator(basis: SpinBosonBasis, alpha: complex) -> Operator:
    """
    The displacement ``D(alpha) = exp(alpha a_dag - alpha* a)`` acting on the boson factor.

    The truncated generator is exponentiated through its eigendecomposition, so the result
    is exactly unitary on the truncated space and accurate on levels well below n_max.
    Requires ``|alpha|^2 <= n_max / 4``.
    """
    alpha = complex(alpha)
    if abs(alpha) ** 2 > basis.fock_cutoff / 4:
        raise SimulationError(
            f"displacement |alpha|^2 = {abs(alpha) ** 2:.4g} is not truncation-safe for "
            f"n_max = {basis.fock_cutoff} (limit n_max/4)",
            type=SimulationErrorType.TRUNCATION,
        )
    if alpha == 0:
        return identity(basis)
    return Operator(basis, _lift_boson(basis, _boson_displacement(basis.n_fock, alpha)))


def basis_state(basis: SpinBosonBasis, m: float, n: int) -> StateVector:
    """The product state ``|j, m>|n>``."""
    amplitudes = np.zeros(basis.dim, dtype=np.complex128)
    amplitudes[basis.index(basis.m_index_of(m), n)] = 1.0
    return StateVector(basis, amplitudes)


def commutator(a: Operator, b: Operator) -> Operator:
    return (a @ b) - (b @ a)


def expectation(op: Operator, state: StateVector) -> Union[float, complex]:
    """
    ``<psi|O|psi>``. Hermitian operators return a float after checking that the
    imaginary part is below 1e-10.
    """
    _require_same_basis(op.basis, state.basis)
    value = complex(np.vdot(state.amplitudes, op.matrix @ state.amplitudes))
    if isinstance(op, HermitianOperator):
        if abs(value.imag) > IMAGINARY_RESIDUE_ATOL * max(1.0, abs(value.real)):
            raise SimulationError(
                f"expectation of a Hermitian operator has imaginary part {value.imag!r}",
                type=SimulationErrorType.NUMERICAL,
            )
        return value.real
    return value


def apply(op: Operator, state: StateVector, *, normalize: bool = False) -> StateVector:
    """
    ``O|psi>`` as a new state.

    Without ``normalize`` the operator must preserve the norm (a unitary, or a state
    inside an invariant subspace); otherwise the result is rescaled to unit norm.
    """
    _require_same_basis(op.basis, state.basis)
    amplitudes = op.matrix @ state.amplitudes
    if normalize:
        return StateVector.normalized(state.basis, amplitudes)
    return StateVector(state.basis, amplitudes)
