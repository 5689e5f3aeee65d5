"""Brute-force kinematic tracer used to certify the closed-form models.

The tracer walks a neutron blade by blade, applying the moving-wall bounce
at every reflection and accumulating (m/hbar)|v|^2 dt per segment. Nothing
here knows the closed forms: the only shared ingredients are the bounce
rule and the crystal velocity evaluation from the core module.

Numerics: each path's absolute phase is ~1e9 rad while the path difference
can be below 1e-10 rad, so a naive subtraction is hopeless in double
precision. The walker therefore carries v_y in split form, base sign times
v_y plus the accumulated wall kicks, and assembles the difference from
paired per-segment terms in extended precision; the base v_x^2 and v_y^2
contributions cancel algebraically instead of numerically.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import brentq

from .core import Axis, ConfigError, Layout
from .phase_models import PhaseModelInput

__all__ = [
    "PathSegment",
    "TraceResult",
    "trace",
    "trace_x",
    "GoldenRecord",
    "golden_records",
    "write_golden",
    "read_golden",
]

TRACE_MODES = ("nominal", "event")


@dataclass(frozen=True)
class PathSegment:
    """Straight flight between consecutive blade crossings."""

    start_time: float  # s
    end_time: float  # s
    velocity: tuple[float, float]  # (v_x, v_y), m/s
    accumulated_phase: float  # (m/hbar) |v|^2 (end - start), rad

    def __post_init__(self):
        if not self.end_time > self.start_time:
            raise ConfigError("segment must have positive duration")


@dataclass(frozen=True)
class TraceResult:
    """Both traced paths plus their phase difference Phi(II) - Phi(I)."""

    path_i: tuple[PathSegment, ...]
    path_ii: tuple[PathSegment, ...]
    delta_phi: float  # rad
    mode: str  # "nominal" or "event"
    recombination_gap: float  # transverse (or longitudinal) mismatch at exit


class _SplitState:
    """v_y tracked as sign * v_base + kick so tiny kicks survive intact."""

    __slots__ = ("sign", "kick")

    def __init__(self):
        self.sign = 1.0
        self.kick = 0.0

    def bounce(self, wall_velocity: float):
        # same algebra as reflect_off_moving_wall, applied to the split parts
        self.sign = -self.sign
        self.kick = -self.kick + 2.0 * wall_velocity

    def compose(self, v_base: float) -> float:
        return self.sign * v_base + self.kick


def _wall_functions(inp: PhaseModelInput) -> list[Callable[[float], float]]:
    """Per-blade y-velocity of the crystal at the path crossing points."""
    vib = inp.vibration
    geo = inp.geometry
    zero = lambda t: 0.0
    if vib.axis is Axis.Z:
        return [zero] * len(geo.blade_positions)
    if vib.axis is Axis.Y:
        u = lambda t: vib.amplitude * vib.omega * math.cos(vib.omega * t + vib.phase)
        return [u] * len(geo.blade_positions)
    if vib.axis is Axis.THETA_Z:
        L = geo.half_separation
        theta_dot = lambda t: vib.amplitude * vib.omega * math.cos(vib.omega * t + vib.phase)
        if geo.layout is Layout.THREE_BLADE:
            # Center of rotation sits on the middle blade: its crossing
            # points move along the beam axis only, so no y kick there.
            return [lambda t: 2.0 * L * theta_dot(t), zero, zero]
        lever = math.hypot(L, inp.beam.v_y * geo.tau(inp.beam))
        return [
            lambda t: 2.0 * L * theta_dot(t),
            lambda t: lever * theta_dot(t),
            lambda t: -lever * theta_dot(t),  # inner blades swing in antiphase
            zero,
        ]
    raise ConfigError(f"trace does not handle axis {vib.axis.value!r}; use trace_x")


def _plane_position(inp: PhaseModelInput, blade_index: int) -> Callable[[float, float], float]:
    """Blade-plane x coordinate as a function of (time, neutron y)."""
    geo = inp.geometry
    vib = inp.vibration
    x_b = geo.blade_positions[blade_index]
    if vib.axis is not Axis.THETA_Z:
        return lambda t, y: x_b
    x_c = 2.0 * geo.half_separation  # center of mass and rotation
    def plane(t: float, y: float) -> float:
        theta = vib.amplitude * math.sin(vib.omega * t + vib.phase)
        return x_c + (x_b - x_c) / math.cos(theta) - y * math.tan(theta)
    return plane


def _solve_crossing(g: Callable[[float], float], t_guess: float, half_width: float,
                    context: str = "") -> float:
    """Bracketed root of g around t_guess; g is monotone near the crossing.

    brentq is run to the 1e-15 s tolerance and the root is then polished
    with two secant steps: a raw 1e-15 s timing error would feed the
    (m/hbar)|v|^2 dt bookkeeping with ~1e-2 rad of noise, swamping the
    small path differences the tracer exists to certify.
    """
    width = max(half_width, 1e-18)
    root = None
    for _ in range(60):
        lo, hi = t_guess - width, t_guess + width
        if g(lo) * g(hi) <= 0.0:
            root = brentq(g, lo, hi, xtol=1e-15, maxiter=50)
            break
        width *= 4.0
    if root is None:
        raise ConfigError(
            f"crossing solver failed for {context or 'blade'}: no sign change in "
            f"[{t_guess - width!r}, {t_guess + width!r}]")
    h = max(abs(root) * 1e-8, 1e-12)
    for _ in range(2):
        slope = (g(root + h) - g(root - h)) / (2.0 * h)
        if slope == 0.0:
            break
        root -= g(root) / slope
    return root


def _walk(inp: PhaseModelInput, reflect_first: bool, mode: str):
    """March one path through the blades; returns split-form segment data."""
    beam, geo = inp.beam, inp.geometry
    vib = inp.vibration
    tau = geo.tau(beam)
    walls = _wall_functions(inp)
    n = len(geo.blade_positions)
    nominal_times = [s * tau for s in geo.crossing_steps]

    state = _SplitState()
    t, y = 0.0, 0.0
    # Entry defines t = 0 at the first blade, wherever its plane sits then.
    x = _plane_position(inp, 0)(0.0, 0.0) if mode == "event" else 0.0
    if reflect_first:
        state.bounce(walls[0](0.0))

    # Plane-motion bound along x, for bracketing event-resolved crossings.
    if vib.axis is Axis.THETA_Z:
        reach = 4.0 * geo.half_separation + 4.0 * beam.v_y * tau
        plane_bound = vib.amplitude * (reach + 2.0 * geo.half_separation * vib.amplitude)
    else:
        plane_bound = 0.0

    records = []  # (sign, kick, t_start, t_end, v_y_composed)
    for k in range(1, n):
        v_y = state.compose(beam.v_y)
        if mode == "nominal":
            t_cross = nominal_times[k]
        else:
            plane = _plane_position(inp, k)
            g = lambda tt: x + beam.v_x * (tt - t) - plane(tt, y + v_y * (tt - t))
            t_cross = _solve_crossing(g, nominal_times[k], 4.0 * plane_bound / beam.v_x + 1e-16,
                                       context=f"blade {k}")
        records.append((state.sign, state.kick, t, t_cross, v_y))
        y += v_y * (t_cross - t)
        if mode == "event":
            x = x + beam.v_x * (t_cross - t)
        else:
            x = geo.blade_positions[k]
        t = t_cross
        if k < n - 1:  # inner blades reflect on both paths; the last one recombines
            state.bounce(walls[k](t_cross))
    return records, y


def _assemble_delta_phi(records_i, records_ii, v_x: float, v_y: float, moh: float) -> float:
    """Phi(II) - Phi(I) from paired segments, accumulated in longdouble.

    Per segment pair the base (v_x^2 + v_y^2) part multiplies the duration
    difference only; the rest involves the small kick terms, so no
    large-against-large cancellation survives.
    """
    ld = np.longdouble
    vx2 = ld(v_x) * ld(v_x)
    vy = ld(v_y)
    base = vx2 + vy * vy
    total = ld(0.0)
    for (s1, w1, a1, b1, _), (s2, w2, a2, b2, _) in zip(records_i, records_ii):
        dt1 = ld(b1) - ld(a1)
        dt2 = ld(b2) - ld(a2)
        total += base * (dt2 - dt1)
        total += 2.0 * vy * (ld(s2) * ld(w2) * dt2 - ld(s1) * ld(w1) * dt1)
        total += ld(w2) * ld(w2) * dt2 - ld(w1) * ld(w1) * dt1
    return float(ld(moh) * total)


def _segments(records, v_x: float, v_y: float, moh: float) -> tuple[PathSegment, ...]:
    out = []
    for sign, kick, t0, t1, v_y_composed in records:
        phase = moh * (v_x**2 + v_y_composed**2) * (t1 - t0)
        out.append(PathSegment(t0, t1, (v_x, v_y_composed), phase))
    return tuple(out)


def trace(inp: PhaseModelInput, mode: str = "nominal") -> TraceResult:
    """Trace both paths for transverse, rotational, or vertical vibrations.

    Nominal mode evaluates blade motion at the unperturbed crossing times,
    matching the closed-form models' assumptions; event mode additionally
    solves for the true crossings against the displaced blade planes.
    Longitudinal vibrations are handled by trace_x.
    """
    if mode not in TRACE_MODES:
        raise ConfigError(f"unknown trace mode {mode!r}")
    if inp.vibration.axis not in (Axis.Y, Axis.THETA_Z, Axis.Z):
        raise ConfigError(f"trace does not handle axis {inp.vibration.axis.value!r}; use trace_x")
    beam = inp.beam
    moh = inp.constants.mass_over_hbar
    rec_i, y_i = _walk(inp, reflect_first=False, mode=mode)
    rec_ii, y_ii = _walk(inp, reflect_first=True, mode=mode)
    delta = _assemble_delta_phi(rec_i, rec_ii, beam.v_x, beam.v_y, moh)
    return TraceResult(
        path_i=_segments(rec_i, beam.v_x, beam.v_y, moh),
        path_ii=_segments(rec_ii, beam.v_x, beam.v_y, moh),
        delta_phi=delta,
        mode=mode,
        recombination_gap=y_ii - y_i,
    )


def trace_x(inp: PhaseModelInput, mode: str = "nominal") -> TraceResult:
    """Trace longitudinal vibrations: path-length shift at recombination.

    The momentum never changes; the crystal displacement sampled at the
    blade crossings displaces the recombination point by the layout's
    kick stencil, giving delta_l = 2 delta_x tan(a) sin(a) of extra path.
    """
    if mode not in TRACE_MODES:
        raise ConfigError(f"unknown trace mode {mode!r}")
    if inp.vibration.axis is not Axis.X:
        raise ConfigError("trace_x handles longitudinal vibrations only")
    beam, geo = inp.beam, inp.geometry
    vib = inp.vibration
    moh = inp.constants.mass_over_hbar
    tau = geo.tau(beam)
    disp = lambda t: vib.amplitude * math.sin(vib.omega * t + vib.phase)

    times = []
    x_start = disp(0.0) if mode == "event" else 0.0  # entry meets the displaced first plane
    for k, step in enumerate(geo.crossing_steps):
        t_nom = step * tau
        if mode == "nominal" or k == 0:
            times.append(t_nom)
        else:
            x_b = geo.blade_positions[k]
            g = lambda tt: x_start + beam.v_x * tt - x_b - disp(tt)
            times.append(_solve_crossing(g, t_nom, 4.0 * vib.amplitude / beam.v_x + 1e-16,
                                         context=f"blade {k}"))
    samples = [disp(t) for t in times]
    if geo.layout is Layout.THREE_BLADE:
        delta_x = samples[2] - 2.0 * samples[1] + samples[0]
    else:
        delta_x = samples[3] - 4.0 * samples[1] + 3.0 * samples[0]
    alpha = beam.bragg_angle
    delta = moh * beam.speed * 2.0 * delta_x * math.tan(alpha) * math.sin(alpha)

    # Momentum is untouched, so both paths fly the static zigzag.
    def static_records(reflect_first: bool):
        sign = -1.0 if reflect_first else 1.0
        recs = []
        for k in range(1, len(times)):
            recs.append((sign, 0.0, times[k - 1], times[k], sign * beam.v_y))
            if k < len(times) - 1:
                sign = -sign
        return recs

    rec_i = static_records(False)
    rec_ii = static_records(True)
    return TraceResult(
        path_i=_segments(rec_i, beam.v_x, beam.v_y, moh),
        path_ii=_segments(rec_ii, beam.v_x, beam.v_y, moh),
        delta_phi=delta,
        mode=mode,
        recombination_gap=delta_x,
    )


# --- golden records ---------------------------------------------------------

@dataclass(frozen=True)
class GoldenRecord:
    label: str
    digest: str
    delta_phi: float


def _digest(inp: PhaseModelInput, mode: str) -> str:
    beam, geo, vib = inp.beam, inp.geometry, inp.vibration
    key = "|".join([
        f"{vib.axis.value}{geo.layout.value}",
        repr(geo.half_separation), repr(beam.speed), repr(beam.bragg_angle),
        repr(vib.amplitude), repr(vib.omega), repr(vib.phase), mode,
    ])
    return hashlib.sha256(key.encode()).hexdigest()[:16]


def golden_trace(inp: PhaseModelInput, mode: str = "nominal") -> GoldenRecord:
    tracer = trace_x if inp.vibration.axis is Axis.X else trace
    result = tracer(inp, mode)
    vib, geo = inp.vibration, inp.geometry
    label = (f"{vib.axis.value}{geo.layout.value}"
             f":f={vib.omega / (2.0 * math.pi):.6g}:varphi={vib.phase:.6g}")
    return GoldenRecord(label, _digest(inp, mode), result.delta_phi)


def golden_records() -> list[GoldenRecord]:
    """Nominal-mode reference values at the default run parameters."""
    from .contrast import SweepSpec, build_input  # local import to avoid a cycle

    cases: list[tuple[Axis, Layout, float, float]] = []
    for layout in (Layout.THREE_BLADE, Layout.FOUR_BLADE):
        for f in (1.0, 10.0, 100.0):
            for phi in (0.0, math.pi / 4):
                cases.append((Axis.Y, layout, f, phi))
        for f in (1.0, 10.0):
            for phi in (0.0, math.pi / 4):
                cases.append((Axis.THETA_Z, layout, f, phi))
        cases.append((Axis.X, layout, 100.0, math.pi / 4))
    records = []
    for axis, layout, f, phi in cases:
        amplitude = 1e-6 if axis is Axis.THETA_Z else 1e-7
        spec = SweepSpec(axis=axis, layout=layout, amplitude=amplitude)
        records.append(golden_trace(build_input(spec, f, phi)))
    return records


def write_golden(path, records: Sequence[GoldenRecord]) -> None:
    lines = ["# label digest delta_phi_rad"]
    lines += [f"{r.label} {r.digest} {r.delta_phi:.17e}" for r in records]
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def read_golden(path) -> dict[str, GoldenRecord]:
    records = {}
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            label, digest, value = line.split()
            records[label] = GoldenRecord(label, digest, float(value))
    return records
