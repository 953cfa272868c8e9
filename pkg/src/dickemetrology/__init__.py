"""
dickemetrology simulates adiabatic quantum metrology with the Dicke model.

N two-level atoms couple collectively to one bosonic mode. Lowering a transverse field
takes the system from its normal phase into the superradiant phase, whose two
symmetry-broken ground states are split by a gap that closes exponentially in N. A weak
longitudinal field biases that pair, and the final collective spin projection measures
it with Heisenberg scaling.

The package provides the truncated spin-boson Hilbert space, exact low-lying spectra
and gaps with their weak-coupling closed forms, full Schrodinger evolution under the
ramp, the closed-form two-level solution of the metrology stage, and
(:py:mod:`dickemetrology.protocol`) the protocol itself. Energies are in units of the
coupling g and times in 1/g.
"""

from __future__ import annotations

from . import protocol
from ._common import (
    RegimeWarning,
    SimulationError,
    SimulationErrorType,
)
from ._demkov import (
    DemkovParams,
    TwoLevelTrajectory,
    amplitude_cminus,
    amplitude_cplus,
    bessel_j_asymptotic,
    bessel_j_complex_order,
    complex_gamma,
    final_population,
    jz_tanh,
    jz_tanh_slope,
    signal_variance,
    two_level_ode_reference,
    uncertainty_deltabar,
)
from ._dicke import (
    DickeParams,
    build_h,
    build_hd,
    critical_field,
    displaced_fock_state,
    ground_pair,
    noninteracting_ground,
    zero_field_displacement,
    zero_field_energy,
)
from ._dynamics import (
    EvolutionResult,
    MultipletAmplitudes,
    RampSchedule,
    measure_jz,
    measure_parity,
    project_onto_multiplet,
    propagate,
)
from ._hilbert import (
    HermitianOperator,
    Operator,
    SpinBosonBasis,
    StateVector,
    apply,
    basis_state,
    build_basis,
    commutator,
    displacement_operator,
    expectation,
    identity,
    op_boson,
    op_jminus,
    op_jplus,
    op_jx,
    op_jy,
    op_jz,
    op_parity,
)
from ._serializer import Content, CsvSerializer, Serializer, Table, write_atomic
from ._spectrum import (
    EffectiveTwoLevel,
    FockCutoffPolicy,
    SpectrumResult,
    SpectrumScan,
    boson_order_parameter,
    converged_basis,
    default_fock_cutoff,
    effective_two_level,
    eigen_lowest,
    gap_asymptotic,
    gap_numeric,
    gap_perturbative,
    ground_pair_overlap,
    perturbed_ground_amplitudes,
    projected_two_level,
    scaling_function_estimate,
    spectrum_scan,
    tunneling_splitting,
)
from ._util import build_grid

__version__ = "0.1.0"

__all__ = [
    "amplitude_cminus",
    "amplitude_cplus",
    "apply",
    "basis_state",
    "bessel_j_asymptotic",
    "bessel_j_complex_order",
    "boson_order_parameter",
    "build_basis",
    "build_grid",
    "build_h",
    "build_hd",
    "commutator",
    "complex_gamma",
    "Content",
    "converged_basis",
    "critical_field",
    "CsvSerializer",
    "default_fock_cutoff",
    "DemkovParams",
    "DickeParams",
    "displaced_fock_state",
    "displacement_operator",
    "effective_two_level",
    "EffectiveTwoLevel",
    "eigen_lowest",
    "EvolutionResult",
    "expectation",
    "final_population",
    "FockCutoffPolicy",
    "gap_asymptotic",
    "gap_numeric",
    "gap_perturbative",
    "ground_pair",
    "ground_pair_overlap",
    "HermitianOperator",
    "identity",
    "jz_tanh",
    "jz_tanh_slope",
    "measure_jz",
    "measure_parity",
    "MultipletAmplitudes",
    "noninteracting_ground",
    "op_boson",
    "op_jminus",
    "op_jplus",
    "op_jx",
    "op_jy",
    "op_jz",
    "op_parity",
    "Operator",
    "perturbed_ground_amplitudes",
    "project_onto_multiplet",
    "projected_two_level",
    "propagate",
    "protocol",
    "RampSchedule",
    "RegimeWarning",
    "scaling_function_estimate",
    "Serializer",
    "signal_variance",
    "SimulationError",
    "SimulationErrorType",
    "SpectrumResult",
    "SpectrumScan",
    "spectrum_scan",
    "SpinBosonBasis",
    "StateVector",
    "Table",
    "tunneling_splitting",
    "two_level_ode_reference",
    "TwoLevelTrajectory",
    "uncertainty_deltabar",
    "write_atomic",
    "zero_field_displacement",
    "zero_field_energy",
]
