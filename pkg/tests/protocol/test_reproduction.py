"""
Full-simulation reproductions of the protocol's signal curves. Each run integrates the
spin-boson system over both ramp stages, so these take minutes; run with ``-m slow``.
"""

import numpy as np
import pytest

from dickemetrology import DickeParams, jz_tanh
from dickemetrology.protocol import (
    Engine,
    ProtocolConfig,
    check_conditions,
    estimate_delta_quasiadiabatic,
    run_protocol,
    sweep,
)

pytestmark = pytest.mark.slow


@pytest.mark.parametrize("gamma", [0.02, 0.03, 0.04])
def test_full_and_two_level_engines_agree(gamma: float):
    config = ProtocolConfig(params=DickeParams(n_atoms=4, omega=3.0), gamma=gamma)
    grid = np.linspace(-5 * gamma / 4, 5 * gamma / 4, 9)
    curve = sweep(config, "delta", grid, n_samples=11)
    assert curve.errors == (None,) * 9
    assert np.max(np.abs(curve.jz_full - curve.jz_demkov)) <= 0.05 * 4
    # the wide grid reaches the saturated tails on both sides
    assert curve.jz_full[0] >= 0.75 * 2
    assert curve.jz_full[-1] <= -0.75 * 2


def test_signal_follows_tanh_with_atom_number():
    config = ProtocolConfig(params=DickeParams(n_atoms=2, omega=10.0, delta=2e-3), gamma=0.03)
    atoms = list(range(2, 9))
    curve = sweep(config, "n_atoms", atoms, engines=(Engine.FULL,), n_samples=11)
    assert curve.errors == (None,) * len(atoms)
    assert np.all(curve.jz_full < 0)
    assert np.all(np.diff(np.abs(curve.jz_full)) > 0)
    for n_atoms, jz in zip(atoms, curve.jz_full):
        assert abs(jz - jz_tanh(n_atoms, 2e-3, 0.03)) <= 0.05 * n_atoms


def test_signal_decays_with_gamma():
    config = ProtocolConfig(params=DickeParams(n_atoms=4, omega=10.0, delta=2e-3), gamma=0.03)
    curve = sweep(config, "gamma", [0.005, 0.02, 0.08, 0.3], engines=(Engine.FULL,), n_samples=11)
    magnitude = np.abs(curve.jz_full)
    assert magnitude[0] >= 0.8 * 2
    assert magnitude[-1] <= 0.3 * 2
    assert np.all(np.diff(magnitude) <= 0.05 * 4)


@pytest.mark.parametrize("n_atoms", [4, 6, 8])
def test_plateau_and_collapse_across_gamma(n_atoms: int):
    delta = 2e-3
    config = ProtocolConfig(
        params=DickeParams(n_atoms=n_atoms, omega=10.0, delta=delta), gamma=0.03
    )
    slow_decay = n_atoms * delta / 3
    fast_decay = 20 * n_atoms * delta
    curve = sweep(
        config,
        "gamma",
        [slow_decay / 2, slow_decay, fast_decay, 2 * fast_decay],
        engines=(Engine.DEMKOV,),
    )
    assert curve.errors == (None,) * 4
    half = n_atoms / 2
    # plateau at -(N/2) sign(delta)
    assert np.all(np.abs(curve.jz_demkov[:2] + half) <= 0.05 * half)
    assert np.all(np.abs(curve.jz_demkov[2:]) <= 0.1 * half)


def test_estimate_from_the_full_signal():
    config = ProtocolConfig(params=DickeParams(n_atoms=6, omega=10.0, delta=1e-3), gamma=0.03)
    signal = run_protocol(config, n_samples=11).final_jz
    assert estimate_delta_quasiadiabatic(signal, 6, 0.03) == pytest.approx(1e-3, rel=0.15)


def test_leakage_is_small_when_the_conditions_hold():
    config = ProtocolConfig(params=DickeParams(n_atoms=4, omega=3.0, delta=3e-3), gamma=0.03)
    report = check_conditions(config)
    assert report.passed, report.to_text()
    result = run_protocol(config, n_samples=11)
    assert result.leakage <= 0.05
    assert abs(result.final_jz - run_protocol(config, engine=Engine.DEMKOV).final_jz) <= 0.05 * 4
