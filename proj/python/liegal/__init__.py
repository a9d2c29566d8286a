"""Controllability certification and control synthesis for bilinear
Schrodinger systems with discrete drift spectrum."""

from ._liegal import (
    AveragingConstant,
    BoundKind,
    Model,
    PulseTrain,
    System,
    __version__,
    check_condition,
    convexify_pulses,
    leakage,
    modulus_distance,
    simulate_control,
    spectral_gaps,
    synthesize_transfer,
    truncate,
    varpi,
)

__all__ = [
    "AveragingConstant",
    "BoundKind",
    "Model",
    "PulseTrain",
    "System",
    "__version__",
    "check_condition",
    "convexify_pulses",
    "leakage",
    "modulus_distance",
    "simulate_control",
    "spectral_gaps",
    "synthesize_transfer",
    "truncate",
    "varpi",
]
