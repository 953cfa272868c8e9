import math

import numpy as np

from dickemetrology import (
    DickeParams,
    EvolutionResult,
    RampSchedule,
    SpinBosonBasis,
    StateVector,
    build_basis,
    noninteracting_ground,
    propagate,
)


def small_basis(n_atoms: int = 4, fock_cutoff: int = 12) -> SpinBosonBasis:
    return build_basis(n_atoms, fock_cutoff)


def deep_params(
    n_atoms: int = 4, omega: float = 4.0, omega_x: float = 0.1, delta: float = 0.0
) -> DickeParams:
    """Parameters well inside the superradiant phase (critical field 4/omega)."""
    return DickeParams(n_atoms=n_atoms, omega=omega, omega_x=omega_x, delta=delta)


def rng(seed: int = 1234) -> np.random.Generator:
    return np.random.default_rng(seed)


def random_state(basis: SpinBosonBasis, seed: int = 0) -> StateVector:
    generator = rng(seed)
    v = generator.normal(size=basis.dim) + 1j * generator.normal(size=basis.dim)
    return StateVector(basis, v / np.linalg.norm(v))


def log_slope(xs: list[float], ys: list[float]) -> float:
    """Least-squares slope of log(y) against log(x)."""
    slope, _ = np.polyfit([math.log(x) for x in xs], [math.log(y) for y in ys], 1)
    return float(slope)


def small_ramp(
    delta: float = 0.0,
    rtol: float = 1e-10,
    n_samples: int = 21,
    max_norm_drift: float = 1e-8,
) -> EvolutionResult:
    """One cheap full propagation: two atoms, w = 3, ramp from 3 to 2/3."""
    params = DickeParams(n_atoms=2, omega=3.0, delta=delta)
    schedule = RampSchedule(
        omega_x_0=3.0, omega_x_i=2 / 3, tau1=5.0, tau2=10.0, t_m=10.0, n_atoms=2
    )
    basis = build_basis(2, 22)
    return propagate(
        params,
        schedule,
        noninteracting_ground(basis),
        n_samples=n_samples,
        rtol=rtol,
        atol=rtol * 1e-2,
        max_norm_drift=max_norm_drift,
    )
