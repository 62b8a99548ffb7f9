"""Stochastic localization laboratory: simulation, lemma checkers, bounds."""

from ._klslab import (
    AtomicMeasure,
    Density,
    Halfspace,
    IsoperimetryEstimate,
    KlslabError,
    OptimalEll,
    PathRecord,
    PathResult,
    RecursionSequences,
    SimulateOptions,
    TensorMode,
    TimeConstants,
    TwoSidedCheck,
    check_moment_inequality,
    check_tensor_swap,
    check_trace_inequality,
    conductance_proxy,
    halfspace_isoperimetry,
    kls_original_bound,
    lee_vempala_bound,
    main_theorem_bound,
    optimal_ell,
    recursion_sequences,
    sample_atomic,
    simulate_path,
    three_tensor,
    time_constants,
)

__all__ = [
    "AtomicMeasure",
    "Density",
    "Halfspace",
    "IsoperimetryEstimate",
    "KlslabError",
    "OptimalEll",
    "PathRecord",
    "PathResult",
    "RecursionSequences",
    "SimulateOptions",
    "TensorMode",
    "TimeConstants",
    "TwoSidedCheck",
    "check_moment_inequality",
    "check_tensor_swap",
    "check_trace_inequality",
    "conductance_proxy",
    "halfspace_isoperimetry",
    "kls_original_bound",
    "lee_vempala_bound",
    "main_theorem_bound",
    "optimal_ell",
    "recursion_sequences",
    "sample_atomic",
    "simulate_path",
    "three_tensor",
    "time_constants",
]
