"""Exact simulator and experiment workbench for a dual-rail ballistic-electron Bell test."""

from .bell import (
    AngleSettings,
    CalibrationFit,
    ChshResult,
    OptimizerConfig,
    aspect_network,
    calibrate_alpha,
    chsh_max,
    chsh_value,
    correlation_analytic,
    correlation_simulated,
    five_gate_network,
    prepare_bell,
    singlet_correlation,
    violation_interval,
)
from .qcore import (
    GateMatrix,
    MeasurementDirection,
    RejectedInput,
    StateVector,
    apply_gate,
    controlled_phase,
    expectation_pair,
    hadamard,
    measurement_unitary,
    phase_shift,
    sample_outcome,
)
from .sampler import (
    EstimateWithError,
    ShotPlan,
    calibration_dataset,
    estimate_chsh,
    estimate_correlation,
)

__all__ = [
    "AngleSettings",
    "CalibrationFit",
    "ChshResult",
    "EstimateWithError",
    "GateMatrix",
    "MeasurementDirection",
    "OptimizerConfig",
    "RejectedInput",
    "ShotPlan",
    "StateVector",
    "apply_gate",
    "aspect_network",
    "calibrate_alpha",
    "calibration_dataset",
    "chsh_max",
    "chsh_value",
    "controlled_phase",
    "correlation_analytic",
    "correlation_simulated",
    "estimate_chsh",
    "estimate_correlation",
    "expectation_pair",
    "five_gate_network",
    "hadamard",
    "measurement_unitary",
    "phase_shift",
    "prepare_bell",
    "sample_outcome",
    "singlet_correlation",
    "violation_interval",
]

__version__ = "0.1.0"
