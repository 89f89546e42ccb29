"""Slow-light Stark frequency shifter: ensembles, linear oracle, Maxwell-Bloch solver."""

from ._slowshift import (
    SlowshiftError,
    MediumParameters,
    PulseSpec,
    IonEnsemble,
    frequency_shifter,
    hole,
    flat,
    linear_transfer,
    group_delay_at,
    intensity_loss_at,
    passband_center,
    propagate,
    spectrum,
    instantaneous_frequency,
    eq1_velocity,
    eq4_velocity,
    eq5_loss,
    list_scenarios,
    builtin_config,
    resolve_config,
    run_scenario,
)

__all__ = [
    "SlowshiftError",
    "MediumParameters",
    "PulseSpec",
    "IonEnsemble",
    "frequency_shifter",
    "hole",
    "flat",
    "linear_transfer",
    "group_delay_at",
    "intensity_loss_at",
    "passband_center",
    "propagate",
    "spectrum",
    "instantaneous_frequency",
    "eq1_velocity",
    "eq4_velocity",
    "eq5_loss",
    "list_scenarios",
    "builtin_config",
    "resolve_config",
    "run_scenario",
]
