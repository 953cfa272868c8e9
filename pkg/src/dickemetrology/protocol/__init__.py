"""
The two-stage metrology protocol.

A transverse field ramps the Dicke model from its normal phase into the superradiant
phase (preparation), then keeps decaying while a small longitudinal field biases the
ground-state pair (metrology). The final ``<Jz>`` encodes the field. This package builds
the ramp from a few inputs, checks the conditions under which the two-level picture
holds, runs the protocol with the full simulation or the closed-form two-level solution,
and inverts the signal.
"""

from __future__ import annotations

from ._config import SWEEP_PARAMETERS, Engine, ProtocolConfig
from ._core import (
    ConditionReport,
    ProtocolResult,
    check_conditions,
    measurement_time,
    run_protocol,
)
from ._estimation import (
    SignPosterior,
    estimate_delta_quasiadiabatic,
    single_shot_sign_posterior,
)
from ._sweep import SignalCurve, sweep, to_seconds

__all__ = [
    "check_conditions",
    "ConditionReport",
    "Engine",
    "estimate_delta_quasiadiabatic",
    "measurement_time",
    "ProtocolConfig",
    "ProtocolResult",
    "run_protocol",
    "SignalCurve",
    "SignPosterior",
    "single_shot_sign_posterior",
    "sweep",
    "SWEEP_PARAMETERS",
    "to_seconds",
]
