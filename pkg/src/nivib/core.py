"""Beam kinematics, interferometer geometry, and the moving-wall bounce rule.

Everything here is an immutable value type or a pure function; the phase
models, contrast engine, and path tracer are all built on top of it.

Coordinate conventions: x runs along the blade normal (beam propagation),
y runs parallel to the diffracting planes, z is vertical. A neutron enters
with velocity (v_x, v_y) and every diffraction event acts only on v_y.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

__all__ = [
    "ConfigError",
    "QuadratureError",
    "PhysicalConstants",
    "CONSTANTS",
    "BeamParameters",
    "make_beam",
    "Axis",
    "Layout",
    "Geometry",
    "VibrationSpec",
    "crystal_velocity",
    "reflect_off_moving_wall",
]


class ConfigError(ValueError):
    """Invalid physical parameters or run configuration."""


class QuadratureError(RuntimeError):
    """Phase averaging failed to converge under node doubling."""


@dataclass(frozen=True)
class PhysicalConstants:
    """Neutron mass and reduced Planck constant (CODATA 2018)."""

    neutron_mass: float = 1.67492749804e-27  # kg
    hbar: float = 1.054571817e-34  # J*s
    mass_over_hbar: float = field(init=False)  # s/m^2, precomputed

    def __post_init__(self):
        if not (self.neutron_mass > 0.0 and self.hbar > 0.0):
            raise ConfigError("constants must be positive")
        object.__setattr__(self, "mass_over_hbar", self.neutron_mass / self.hbar)


CONSTANTS = PhysicalConstants()


@dataclass(frozen=True)
class BeamParameters:
    """Monochromatic beam decomposed along the blade normal and the planes.

    v_x is the component perpendicular to the blades, v_y the component
    parallel to the diffracting planes; v_x stays positive so the neutron
    always advances through the device.
    """

    speed: float  # |v|, m/s
    bragg_angle: float  # rad, between velocity and the diffracting planes
    v_x: float  # m/s
    v_y: float  # m/s
    wavelength: float  # m, informational (de Broglie)


def make_beam(speed: float, bragg_angle: float,
              constants: PhysicalConstants = CONSTANTS) -> BeamParameters:
    """Build BeamParameters from speed and Bragg angle.

    Requires speed > 0 and 0 < angle < pi/2 so that both velocity
    components are positive and finite.
    """
    if not (math.isfinite(speed) and speed > 0.0):
        raise ConfigError(f"beam speed must be positive and finite, got {speed!r}")
    if not (math.isfinite(bragg_angle) and 0.0 < bragg_angle < math.pi / 2):
        raise ConfigError(f"bragg angle must lie in (0, pi/2), got {bragg_angle!r}")
    v_x = speed * math.cos(bragg_angle)
    v_y = speed * math.sin(bragg_angle)
    wavelength = 2.0 * math.pi / (constants.mass_over_hbar * speed)
    return BeamParameters(speed, bragg_angle, v_x, v_y, wavelength)


class Axis(enum.Enum):
    """Vibration axis of the crystal block."""

    Y = "y"  # transverse, parallel to the diffracting planes
    X = "x"  # longitudinal, along the blade normal
    THETA_Z = "theta"  # rotation about z through the center of mass
    Z = "z"  # vertical; leaves every path length unchanged


class Layout(enum.Enum):
    """Blade count of the monolithic interferometer."""

    THREE_BLADE = 3
    FOUR_BLADE = 4


@dataclass(frozen=True)
class Geometry:
    """Blade layout with half-separation L.

    The three-blade device places blades at x = {0, 2L, 4L}; the four-blade
    variant at {0, L, 3L, 4L}, so the two paths cross unmixed at the 2L
    midpoint. Either way the traversal spans 4L, i.e. four transit units
    tau = L / v_x.
    """

    layout: Layout
    half_separation: float  # L, m

    def __post_init__(self):
        if not (math.isfinite(self.half_separation) and self.half_separation > 0.0):
            raise ConfigError(f"half separation must be positive, got {self.half_separation!r}")

    @property
    def blade_positions(self) -> tuple[float, ...]:
        L = self.half_separation
        if self.layout is Layout.THREE_BLADE:
            return (0.0, 2.0 * L, 4.0 * L)
        return (0.0, L, 3.0 * L, 4.0 * L)

    @property
    def crossing_steps(self) -> tuple[float, ...]:
        """Blade crossing times in units of tau."""
        if self.layout is Layout.THREE_BLADE:
            return (0.0, 2.0, 4.0)
        return (0.0, 1.0, 3.0, 4.0)

    @property
    def segment_steps(self) -> tuple[float, ...]:
        """Flight durations between consecutive blades, in units of tau."""
        if self.layout is Layout.THREE_BLADE:
            return (2.0, 2.0)
        return (1.0, 2.0, 1.0)

    def tau(self, beam: BeamParameters) -> float:
        """Unit transit time L / v_x."""
        return self.half_separation / beam.v_x

    def total_time(self, beam: BeamParameters) -> float:
        return 4.0 * self.tau(beam)


@dataclass(frozen=True)
class VibrationSpec:
    """Sinusoidal oscillation of the crystal about its center of mass.

    displacement(t) = amplitude * sin(omega*t + phase); the wall velocity is
    its exact time derivative. The amplitude is meters for translations and
    radians for the rotational axis. `phase` is the oscillation phase seen
    by a neutron entering at t = 0; it is the random variable the contrast
    engine averages over, canonically drawn from [0, 2*pi).
    """

    axis: Axis
    amplitude: float  # m, or rad for Axis.THETA_Z
    omega: float  # rad/s
    phase: float = 0.0  # rad

    def __post_init__(self):
        if not (math.isfinite(self.amplitude) and self.amplitude >= 0.0):
            raise ConfigError(f"vibration amplitude must be >= 0, got {self.amplitude!r}")
        if not (math.isfinite(self.omega) and self.omega >= 0.0):
            raise ConfigError(f"vibration omega must be >= 0, got {self.omega!r}")
        if not math.isfinite(self.phase):
            raise ConfigError("vibration phase must be finite")

    def displacement(self, t):
        import numpy as np

        return self.amplitude * np.sin(self.omega * t + self.phase)

    def velocity(self, t):
        import numpy as np

        return self.amplitude * self.omega * np.cos(self.omega * t + self.phase)


def crystal_velocity(spec: VibrationSpec, t):
    """Wall velocity amplitude*omega*cos(omega*t + phase) at time t."""
    return spec.velocity(t)


def reflect_off_moving_wall(velocity, wall_velocity_y: float):
    """Elastic bounce of a neutron off an infinitely heavy wall moving along y.

    Returns (v_x, -(v_y - 2*u)): boost into the wall frame, flip the y
    component, boost back. Transmission is the identity and needs no
    helper. Applying the bounce twice with the same wall velocity restores
    the incident v_y, which is the momentum echo exploited by the
    four-blade layout.
    """
    v_x, v_y = velocity
    return (v_x, -(v_y - 2.0 * wall_velocity_y))
