"""Vibration-induced contrast loss in perfect-crystal neutron interferometry.

Closed-form phase models for three- and four-blade layouts under sinusoidal
crystal vibrations, a random-phase contrast engine, and a brute-force
kinematic tracer that certifies the closed forms.
"""

from .core import (
    CONSTANTS,
    Axis,
    BeamParameters,
    ConfigError,
    Geometry,
    Layout,
    PhysicalConstants,
    QuadratureError,
    VibrationSpec,
    crystal_velocity,
    make_beam,
    reflect_off_moving_wall,
)
from .phase_models import (
    PhaseModelInput,
    PhaseSample,
    ROTATION_CONVENTIONS,
    dphi_theta_four,
    dphi_theta_three,
    dphi_x,
    dphi_y_four,
    dphi_y_four_approx,
    dphi_y_three,
    dphi_y_three_approx,
    dphi_z,
    phase_function,
)
from .contrast import (
    AveragingConfig,
    ContrastCurve,
    SweepSpec,
    build_input,
    contrast_phasor,
    contrast_scan,
    mean_intensity,
    sweep,
)
from .oracle import TraceResult, PathSegment, trace, trace_x

__version__ = "0.1.0"

__all__ = [
    "CONSTANTS",
    "Axis",
    "BeamParameters",
    "ConfigError",
    "Geometry",
    "Layout",
    "PhysicalConstants",
    "QuadratureError",
    "VibrationSpec",
    "crystal_velocity",
    "make_beam",
    "reflect_off_moving_wall",
    "PhaseModelInput",
    "PhaseSample",
    "ROTATION_CONVENTIONS",
    "dphi_y_three",
    "dphi_y_three_approx",
    "dphi_y_four",
    "dphi_y_four_approx",
    "dphi_x",
    "dphi_theta_three",
    "dphi_theta_four",
    "dphi_z",
    "phase_function",
    "AveragingConfig",
    "ContrastCurve",
    "SweepSpec",
    "build_input",
    "contrast_phasor",
    "contrast_scan",
    "mean_intensity",
    "sweep",
    "TraceResult",
    "PathSegment",
    "trace",
    "trace_x",
    "__version__",
]
