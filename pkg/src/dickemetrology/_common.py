from __future__ import annotations

from enum import Enum

HERMITIAN_ATOL = 1e-12
"""Entrywise tolerance for an operator to count as Hermitian."""

NORM_ATOL = 1e-10
"""Tolerance on the L2 norm of a constructed state vector."""

IMAGINARY_RESIDUE_ATOL = 1e-10
"""Largest imaginary part dropped from the expectation value of a Hermitian operator."""

DEGENERACY_THRESHOLD = 1e-8
"""Energy difference (units of g) below which two levels are reported as degenerate."""

DEFAULT_MAX_DIM = 4096
"""Memory cap on the spin-boson product dimension."""


class SimulationError(Exception):
    """
    An error raised by a simulation step.

    The error type says what went wrong; callers that need a process exit status use
    :py:attr:`exit_code` rather than inspecting the message.

    Example:
        .. code-block:: python

            from dickemetrology import SimulationError, SimulationErrorType

            raise SimulationError(
                "fock_cutoff must be non-negative, got -1",
                type=SimulationErrorType.INVALID_ARGUMENT,
            )
    """

    def __init__(self, message: str, *, type: SimulationErrorType):
        """
        Initialize a new SimulationError.

        :param message: A descriptive message for the error.

        :param type: The :py:class:`SimulationErrorType` of the error.
        """
        super().__init__(message)
        self._type = type

    @property
    def type(self) -> SimulationErrorType:
        """
        The type of simulation error.
        """
        return self._type

    @property
    def exit_code(self) -> int:
        """
        Process exit status for this error: 2 for I/O failures, 1 for everything else.
        """
        if self._type is SimulationErrorType.IO:
            return 2
        return 1


class SimulationErrorType(Enum):
    """Simulation error types."""

    INVALID_ARGUMENT = "INVALID_ARGUMENT"
    """
    A precondition on the inputs does not hold.
    """

    BASIS_MISMATCH = "BASIS_MISMATCH"
    """
    Operators, states or parameters were built over different bases.
    """

    RESOURCE_EXHAUSTED = "RESOURCE_EXHAUSTED"
    """
    The requested Hilbert space is larger than the configured memory cap.
    """

    TRUNCATION = "TRUNCATION"
    """
    The Fock cutoff is too small for the request: a displacement is not truncation-safe,
    or a propagated state put more than 1e-6 population on the highest Fock level.
    """

    NOT_CONVERGED = "NOT_CONVERGED"
    """
    An iterative procedure (cutoff doubling, a special-function series) hit its cap.
    """

    INTEGRATION_FAILED = "INTEGRATION_FAILED"
    """
    The adaptive integrator gave up, typically through step-size underflow.
    """

    NUMERICAL = "NUMERICAL"
    """
    A numerical consistency check failed: a non-Hermitian eigensolver input, a large
    eigen-residual, or an imaginary residue on a quantity that must be real.
    """

    IO = "IO"
    """
    A configuration file could not be read or an output could not be written.
    """


class RegimeWarning(UserWarning):
    """
    A formula or model was evaluated outside the regime in which it is accurate.
    """
