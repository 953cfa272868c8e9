import math

import numpy as np
import pytest
import scipy.linalg

from dickemetrology import (
    DickeParams,
    SimulationError,
    SimulationErrorType,
    build_basis,
    build_h,
    build_hd,
    commutator,
    critical_field,
    displaced_fock_state,
    expectation,
    ground_pair,
    noninteracting_ground,
    op_boson,
    op_jx,
    op_jy,
    op_jz,
    op_parity,
    zero_field_displacement,
    zero_field_energy,
)
from tests.helpers import small_basis


@pytest.mark.parametrize("omega, expected", [(4.0, 1.0), (3.0, 4 / 3), (10.0, 0.4)])
def test_critical_field(omega: float, expected: float):
    params = DickeParams(n_atoms=4, omega=omega)
    assert critical_field(params) == pytest.approx(expected)
    assert params.critical_field == pytest.approx(expected)


@pytest.mark.parametrize(
    "kwargs",
    [
        {"n_atoms": 0, "omega": 1.0},
        {"n_atoms": 4.5, "omega": 1.0},
        {"n_atoms": True, "omega": 1.0},
        {"n_atoms": 2, "omega": 0.0},
        {"n_atoms": 2, "omega": 1.0, "omega_x": -0.1},
        {"n_atoms": 2, "omega": 1.0, "coupling": -1.0},
        {"n_atoms": 2, "omega": 1.0, "delta": math.inf},
    ],
)
def test_invalid_params(kwargs):
    with pytest.raises(SimulationError) as exc_info:
        DickeParams(**kwargs)
    assert exc_info.value.type is SimulationErrorType.INVALID_ARGUMENT


def test_symmetries_of_hd():
    basis = build_basis(4, 10)
    params = DickeParams(n_atoms=4, omega=3.0, omega_x=9.0)
    hd = build_hd(basis, params)
    assert np.max(np.abs(commutator(hd, op_parity(basis)).matrix)) < 1e-10
    jx, jy, jz = op_jx(basis), op_jy(basis), op_jz(basis)
    total_spin = jx @ jx + jy @ jy + jz @ jz
    assert np.max(np.abs(commutator(hd, total_spin).matrix)) < 1e-10


def test_parity_reverses_the_bias():
    basis = build_basis(3, 6)
    params = DickeParams(n_atoms=3, omega=2.0, omega_x=0.5, delta=0.07)
    parity = op_parity(basis)
    flipped = parity @ build_h(basis, params) @ parity
    np.testing.assert_allclose(
        flipped.matrix, build_h(basis, params.replace(delta=-0.07)).matrix, atol=1e-12
    )


def test_h_without_bias_is_hd():
    basis = small_basis(2, 4)
    params = DickeParams(n_atoms=2, omega=1.0, omega_x=0.3)
    np.testing.assert_array_equal(build_h(basis, params).matrix, build_hd(basis, params).matrix)


def test_basis_and_params_must_agree():
    with pytest.raises(SimulationError) as exc_info:
        build_hd(build_basis(3, 4), DickeParams(n_atoms=4, omega=1.0))
    assert exc_info.value.type is SimulationErrorType.BASIS_MISMATCH


def test_noninteracting_spectrum():
    basis = build_basis(2, 3)
    params = DickeParams(n_atoms=2, omega=1.5, coupling=0.0, delta=0.2)
    energies = scipy.linalg.eigvalsh(build_h(basis, params).matrix)
    expected = sorted(n * 1.5 + m * 0.2 for n in range(4) for m in (-1, 0, 1))
    np.testing.assert_allclose(energies, expected, atol=1e-12)


def test_zero_field_energy_and_displacement():
    params = DickeParams(n_atoms=4, omega=3.0)
    assert zero_field_energy(params, 0, 2) == pytest.approx(-4 / 3)
    assert zero_field_energy(params, 1, 1) == pytest.approx(3 - 1 / 3)
    assert zero_field_displacement(params, 1) == pytest.approx(-1 / 3)
    assert zero_field_displacement(params, -2) == pytest.approx(2 / 3)


@pytest.mark.parametrize("n, m", [(0, 2), (1, 1), (3, -1), (0, 0)])
def test_displaced_fock_states_are_eigenstates(n: int, m: float):
    basis = build_basis(4, 24)
    params = DickeParams(n_atoms=4, omega=3.0)
    state = displaced_fock_state(basis, params, n, m)
    hd = build_hd(basis, params)
    residual = hd.matrix @ state.amplitudes - zero_field_energy(params, n, m) * state.amplitudes
    assert np.linalg.norm(residual) < 1e-6


def test_displaced_fock_states_are_orthonormal():
    basis = build_basis(2, 24)
    params = DickeParams(n_atoms=2, omega=2.0)
    states = [displaced_fock_state(basis, params, n, m) for n in range(3) for m in (-1, 0, 1)]
    gram = np.array([[s.overlap(t) for t in states] for s in states])
    np.testing.assert_allclose(gram, np.eye(len(states)), atol=1e-8)


def test_displaced_fock_state_rejects_unsafe_cutoff():
    with pytest.raises(SimulationError) as exc_info:
        displaced_fock_state(build_basis(4, 2), DickeParams(n_atoms=4, omega=1.0), 0, 2)
    assert exc_info.value.type is SimulationErrorType.TRUNCATION
    with pytest.raises(SimulationError) as exc_info:
        displaced_fock_state(build_basis(4, 2), DickeParams(n_atoms=4, omega=4.0), 3, 0)
    assert exc_info.value.type is SimulationErrorType.INVALID_ARGUMENT


def test_ground_pair():
    basis = build_basis(4, 20)
    params = DickeParams(n_atoms=4, omega=3.0)
    plus, minus = ground_pair(basis, params)
    a, _, _ = op_boson(basis)
    assert expectation(a, plus) == pytest.approx(-2 / 3, abs=1e-8)
    assert expectation(a, minus) == pytest.approx(2 / 3, abs=1e-8)
    assert expectation(op_jz(basis), plus) == pytest.approx(2.0)
    assert expectation(op_jz(basis), minus) == pytest.approx(-2.0)
    assert abs(plus.overlap(minus)) < 1e-12
    mirrored = op_parity(basis).matrix @ plus.amplitudes
    np.testing.assert_allclose(mirrored, minus.amplitudes, atol=1e-10)


def test_single_atom_ground_energy():
    basis = build_basis(1, 30)
    params = DickeParams(n_atoms=1, omega=3.0)
    energies = scipy.linalg.eigvalsh(build_hd(basis, params).matrix)
    assert energies[0] == pytest.approx(-1 / 3, abs=1e-10)
    assert energies[1] == pytest.approx(-1 / 3, abs=1e-10)


@pytest.mark.parametrize("n_atoms", [1, 2, 5, 8])
def test_noninteracting_ground(n_atoms: int):
    basis = build_basis(n_atoms, 3)
    state = noninteracting_ground(basis)
    assert expectation(op_jx(basis), state) == pytest.approx(-n_atoms / 2)
    assert expectation(op_jz(basis), state) == pytest.approx(0.0, abs=1e-12)
    _, _, number = op_boson(basis)
    assert expectation(number, state) == pytest.approx(0.0)
    assert expectation(op_parity(basis), state) == pytest.approx((-1) ** n_atoms)
    assert state.amplitudes[0].real > 0
