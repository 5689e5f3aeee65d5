"""Closed-form phase differences between the two interferometer paths.

Each model returns Delta Phi = Phi(path II) - Phi(path I) for one vibration
axis and blade layout, as a function of the oscillation phase seen at entry.
Path I transmits at the first blade, path II is the beam diffracted there.

All kernels are vectorized over the entry phase so the contrast engine can
evaluate them on large quadrature grids in one call.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .core import (
    CONSTANTS,
    Axis,
    BeamParameters,
    ConfigError,
    Geometry,
    Layout,
    PhysicalConstants,
    VibrationSpec,
)

__all__ = [
    "PhaseModelInput",
    "PhaseSample",
    "ROTATION_CONVENTIONS",
    "phase_function",
    "model_id",
    "dphi_y_three",
    "dphi_y_three_approx",
    "dphi_y_four",
    "dphi_y_four_approx",
    "dphi_x",
    "dphi_theta_three",
    "dphi_theta_four",
    "dphi_z",
]

# Rotational wall-velocity conventions. "velocity" takes the wall speed as
# the time derivative of the local displacement (amplitude*omega*cos) and
# keeps every bounce consistent with reflect_off_moving_wall. "alternate"
# reproduces a variant reading: the first-blade speed follows the angular
# displacement phase (sin instead of cos) in the three-blade model, and the
# four-blade chain starts from the unnegated incident v_y after the first
# bounce. Both are kept so either set of numbers can be regenerated.
ROTATION_CONVENTIONS = ("velocity", "alternate")


@dataclass(frozen=True)
class PhaseModelInput:
    """Bundle of constants, beam, geometry, and vibration for one model call."""

    constants: PhysicalConstants
    beam: BeamParameters
    geometry: Geometry
    vibration: VibrationSpec


@dataclass(frozen=True)
class PhaseSample:
    """One path-II-minus-path-I phase difference at a given entry phase."""

    delta_phi: float  # rad
    varphi: float  # rad, the entry phase it was evaluated at

    def __post_init__(self):
        if not (math.isfinite(self.delta_phi) and math.isfinite(self.varphi)):
            raise ConfigError("phase sample must be finite")


def _require(inp: PhaseModelInput, axis: Axis, layout: Layout | None):
    if inp.vibration.axis is not axis:
        raise ConfigError(
            f"model expects axis {axis.value!r}, got {inp.vibration.axis.value!r}")
    if layout is not None and inp.geometry.layout is not layout:
        raise ConfigError(
            f"model expects {layout.value}-blade layout, got {inp.geometry.layout.value}")


def _wall_velocity(inp: PhaseModelInput, t: float, varphi):
    """Crystal y-velocity amplitude*omega*cos(omega*t + varphi), vectorized."""
    vib = inp.vibration
    return vib.amplitude * vib.omega * np.cos(vib.omega * t + varphi)


# --- transverse (y) vibrations -------------------------------------------

def _kernel_y_three(inp: PhaseModelInput, varphi):
    # Two bounces per path, blades 2L apart, all moving with the same u(t);
    # the entire difference reduces to the wall-velocity change over the
    # first flight, scaled by the (v_y - u) momentum mismatch at entry.
    beam, geo = inp.beam, inp.geometry
    tau = geo.tau(beam)
    u0 = _wall_velocity(inp, 0.0, varphi)
    u2 = _wall_velocity(inp, 2.0 * tau, varphi)
    return 16.0 * inp.constants.mass_over_hbar * tau * (beam.v_y - u0) * (u2 - u0)


def _kernel_y_three_approx(inp: PhaseModelInput, varphi):
    # Slow-vibration limit of the three-blade model: the velocity change
    # over 2*tau replaced by the centered derivative at t = tau. Valid for
    # omega*tau << 1.
    beam, geo = inp.beam, inp.geometry
    vib = inp.vibration
    tau = geo.tau(beam)
    u0 = _wall_velocity(inp, 0.0, varphi)
    dudt = -vib.amplitude * vib.omega**2 * np.sin(vib.omega * tau + varphi)
    return 16.0 * inp.constants.mass_over_hbar * tau**2 * (beam.v_y - u0) * 2.0 * dudt


def _kernel_y_four(inp: PhaseModelInput, varphi):
    # Three bounces per path; the (2, -3, 1) weights annihilate both the
    # constant and the linear part of u(t), which is the echo that makes
    # this layout robust at low frequency.
    beam, geo = inp.beam, inp.geometry
    tau = geo.tau(beam)
    u0 = _wall_velocity(inp, 0.0, varphi)
    u1 = _wall_velocity(inp, tau, varphi)
    u3 = _wall_velocity(inp, 3.0 * tau, varphi)
    return 8.0 * inp.constants.mass_over_hbar * tau * (u0 - beam.v_y) * (2.0 * u0 - 3.0 * u1 + u3)


def _kernel_y_four_approx(inp: PhaseModelInput, varphi):
    # Slow-vibration limit of the four-blade model. The kick stencil
    # 2u(0) - 3u(tau) + u(3*tau) equals -2*tau*[u'(tau/2) - u'(2*tau)] to
    # second order, i.e. +3*tau^2 * u''(5*tau/4); the second derivative
    # form keeps that sign so the limit agrees with the exact model.
    beam, geo = inp.beam, inp.geometry
    vib = inp.vibration
    tau = geo.tau(beam)
    u0 = _wall_velocity(inp, 0.0, varphi)
    d2udt2 = -vib.amplitude * vib.omega**3 * np.cos(vib.omega * 1.25 * tau + varphi)
    return -16.0 * inp.constants.mass_over_hbar * tau**3 * (beam.v_y - u0) * 1.5 * d2udt2


# --- longitudinal (x) vibrations ------------------------------------------

def _kernel_x(inp: PhaseModelInput, varphi):
    # Longitudinal motion leaves the momentum untouched but displaces the
    # recombination point: the paths meet a distance delta_x past the final
    # blade, adding a path-length difference 2*delta_x*tan(a)*sin(a).
    beam, geo = inp.beam, inp.geometry
    vib = inp.vibration
    tau = geo.tau(beam)
    d = lambda t: vib.amplitude * np.sin(vib.omega * t + varphi)
    if geo.layout is Layout.THREE_BLADE:
        delta_x = d(4.0 * tau) - 2.0 * d(2.0 * tau) + d(0.0)
    else:
        delta_x = d(4.0 * tau) - 4.0 * d(tau) + 3.0 * d(0.0)
    alpha = beam.bragg_angle
    delta_l = 2.0 * delta_x * math.tan(alpha) * math.sin(alpha)
    return inp.constants.mass_over_hbar * beam.speed * delta_l


# --- rotations about z -----------------------------------------------------

def _first_blade_speed(inp: PhaseModelInput, varphi, convention: str):
    """y-speed of the entry blade, lever arm 2L about the center of mass."""
    vib = inp.vibration
    trig = np.sin(varphi) if convention == "alternate" else np.cos(varphi)
    return 2.0 * inp.geometry.half_separation * vib.amplitude * vib.omega * trig


def _kernel_theta_three(inp: PhaseModelInput, varphi, convention="velocity"):
    # Only the entry blade kicks the diffracted beam: the middle-blade
    # crossing points move along the beam axis (center of rotation sits on
    # the middle blade), so that bounce is a plain sign flip for both paths.
    beam, geo = inp.beam, inp.geometry
    tau = geo.tau(beam)
    u1 = _first_blade_speed(inp, varphi, convention)
    return 16.0 * inp.constants.mass_over_hbar * tau * u1 * (u1 - beam.v_y)


def _kernel_theta_four(inp: PhaseModelInput, varphi, convention="velocity"):
    # Inner blades sit a lever arm W = sqrt(L^2 + (v_y*tau)^2) from the
    # center of rotation and swing in antiphase. Path I transmits at entry
    # and bounces at t = tau and 3*tau; path II bounces at t = 0 as well.
    # Segment phases are (m/hbar)(v_x^2 + v_y_seg^2) * dt with dt in
    # {tau, 2*tau, tau}; v_x^2 cancels in the difference, and the remaining
    # squares are expanded into (sum)*(difference) pairs so the base v_y
    # drops out analytically instead of by floating-point cancellation.
    beam, geo = inp.beam, inp.geometry
    vib = inp.vibration
    tau = geo.tau(beam)
    L = geo.half_separation
    lever_inner = math.hypot(L, beam.v_y * tau)
    theta_dot = lambda t: vib.amplitude * vib.omega * np.cos(vib.omega * t + varphi)

    u1 = 2.0 * L * theta_dot(0.0)
    u2 = lever_inner * theta_dot(tau)
    u3 = -lever_inner * theta_dot(3.0 * tau)

    # Kick accumulations on top of +/- v_y; sign pattern of path I is
    # (+, -, +) and path II carries the opposite base sign in the
    # "velocity" convention (same sign in the "alternate" one).
    a0 = np.zeros_like(u1)
    a1 = 2.0 * u2
    a2 = -2.0 * u2 + 2.0 * u3
    b0 = 2.0 * u1
    b1 = -2.0 * u1 + 2.0 * u2
    b2 = 2.0 * u1 - 2.0 * u2 + 2.0 * u3

    vy = beam.v_y
    total = np.zeros_like(u1)
    for weight, sign, a, b in ((1.0, 1.0, a0, b0), (2.0, -1.0, a1, b1), (1.0, 1.0, a2, b2)):
        if convention == "alternate":
            diff, summ = b - a, 2.0 * sign * vy + a + b
        else:
            diff, summ = -2.0 * sign * vy + (b - a), a + b
        total = total + weight * diff * summ
    return inp.constants.mass_over_hbar * tau * total


# --- vertical (z) vibrations ----------------------------------------------

def _kernel_z(inp: PhaseModelInput, varphi):
    # The vertical velocity component is zero and no path length depends on
    # z motion, so the phase difference vanishes identically.
    return np.zeros_like(np.asarray(varphi, dtype=float))


# --- dispatch ---------------------------------------------------------------

_EXACT_KERNELS = {
    (Axis.Y, Layout.THREE_BLADE): _kernel_y_three,
    (Axis.Y, Layout.FOUR_BLADE): _kernel_y_four,
    (Axis.X, Layout.THREE_BLADE): _kernel_x,
    (Axis.X, Layout.FOUR_BLADE): _kernel_x,
    (Axis.THETA_Z, Layout.THREE_BLADE): _kernel_theta_three,
    (Axis.THETA_Z, Layout.FOUR_BLADE): _kernel_theta_four,
    (Axis.Z, Layout.THREE_BLADE): _kernel_z,
    (Axis.Z, Layout.FOUR_BLADE): _kernel_z,
}


def model_id(axis: Axis, layout: Layout) -> str:
    return f"{axis.value}{layout.value}"


def phase_function(inp: PhaseModelInput, convention: str = "velocity") -> Callable:
    """Vectorized Delta Phi(varphi) for the input's axis and layout."""
    if convention not in ROTATION_CONVENTIONS:
        raise ConfigError(f"unknown rotation convention {convention!r}")
    kernel = _EXACT_KERNELS[(inp.vibration.axis, inp.geometry.layout)]
    if inp.vibration.axis is Axis.THETA_Z:
        return lambda varphi: kernel(inp, varphi, convention)
    return lambda varphi: kernel(inp, varphi)


def _sample(inp: PhaseModelInput, value) -> PhaseSample:
    return PhaseSample(delta_phi=float(value), varphi=inp.vibration.phase)


def dphi_y_three(inp: PhaseModelInput) -> PhaseSample:
    """Transverse-vibration phase difference, three blades, at the input phase."""
    _require(inp, Axis.Y, Layout.THREE_BLADE)
    return _sample(inp, _kernel_y_three(inp, inp.vibration.phase))


def dphi_y_three_approx(inp: PhaseModelInput) -> PhaseSample:
    """Slow-vibration (omega*tau << 1) form of the three-blade y model."""
    _require(inp, Axis.Y, Layout.THREE_BLADE)
    return _sample(inp, _kernel_y_three_approx(inp, inp.vibration.phase))


def dphi_y_four(inp: PhaseModelInput) -> PhaseSample:
    """Transverse-vibration phase difference, four blades, at the input phase."""
    _require(inp, Axis.Y, Layout.FOUR_BLADE)
    return _sample(inp, _kernel_y_four(inp, inp.vibration.phase))


def dphi_y_four_approx(inp: PhaseModelInput) -> PhaseSample:
    """Slow-vibration (omega*tau << 1) form of the four-blade y model."""
    _require(inp, Axis.Y, Layout.FOUR_BLADE)
    return _sample(inp, _kernel_y_four_approx(inp, inp.vibration.phase))


def dphi_x(inp: PhaseModelInput) -> PhaseSample:
    """Longitudinal-vibration phase difference for either layout."""
    _require(inp, Axis.X, None)
    return _sample(inp, _kernel_x(inp, inp.vibration.phase))


def dphi_theta_three(inp: PhaseModelInput, convention: str = "velocity") -> PhaseSample:
    """Rotational-vibration phase difference, three blades."""
    _require(inp, Axis.THETA_Z, Layout.THREE_BLADE)
    if convention not in ROTATION_CONVENTIONS:
        raise ConfigError(f"unknown rotation convention {convention!r}")
    return _sample(inp, _kernel_theta_three(inp, inp.vibration.phase, convention))


def dphi_theta_four(inp: PhaseModelInput, convention: str = "velocity") -> PhaseSample:
    """Rotational-vibration phase difference, four blades."""
    _require(inp, Axis.THETA_Z, Layout.FOUR_BLADE)
    if convention not in ROTATION_CONVENTIONS:
        raise ConfigError(f"unknown rotation convention {convention!r}")
    return _sample(inp, _kernel_theta_four(inp, inp.vibration.phase, convention))


def dphi_z(inp: PhaseModelInput) -> PhaseSample:
    """Vertical vibrations: identically zero for both layouts."""
    _require(inp, Axis.Z, None)
    return _sample(inp, 0.0)
