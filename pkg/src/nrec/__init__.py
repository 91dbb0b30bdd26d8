"""Exact dynamics, constructions, chain analysis and basin censuses for
single-neuron recurrence equations with memory."""

__version__ = "0.1.0"

from .core import (  # noqa: F401
    CycleSummary,
    NeuronEquation,
    StateWindow,
    canonical_cycle_key,
    detect_cycle,
    evaluate_potential,
    simulate,
    step,
)
from .construct import (  # noqa: F401
    ConstructionParams,
    admissible_periods,
    build_coef1,
    build_coef3,
    build_z,
    canonical_initial,
    derive_params,
    interleave,
    interleaved_initial,
)
from .chains import (  # noqa: F401
    ChainWitness,
    PeriodicBinarySequence,
    attractor_chain_profile,
    common_spike,
    divides_iff_shift,
    find_complete_chains,
    minimal_common_spike,
    set_period,
    verify_common_spike,
)
from .census import (  # noqa: F401
    BasinCensus,
    SweepReport,
    bifurcation_sweep,
    classic_check,
    full_census,
    perwindow_census,
    sampled_census,
    verify_attainment,
    verify_composition_law,
    verify_period_support,
)
