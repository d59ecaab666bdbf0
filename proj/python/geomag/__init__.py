from ._geomag import (
    AccuracyError,
    ArgumentError,
    ConditioningError,
    ConfigError,
    DomainError,
    Error,
    EvaluationError,
    InsufficientPropagationError,
    InvariantError,
    ThresholdError,
    WrapAroundError,
    ab_loop,
    classical_tan_theta,
    deflection_angle,
    dipolar_spectrum,
    effective_length,
    ferroslab,
    flux_functional,
    model1d_reflection,
    run_acceptance,
    slab_bo,
    slab_coupled,
    tdse_run,
)

__all__ = [name for name in dir() if not name.startswith("_")]
