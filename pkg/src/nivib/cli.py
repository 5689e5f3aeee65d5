"""Command-line front end: sweeps, single-point diagnostics, figure data.

Subcommands:
  sweep           contrast vs frequency for one model, CSV + JSON sidecar
  single          one phase difference with closed-form/tracer cross-check
  reproduce-fig3  emit the three standard contrast panels (A: y, B: x, C: theta)
  golden          regenerate the tracer's reference-value file

Exit codes: 0 success, 2 configuration error, 3 numerical error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import asdict, dataclass, fields, replace
from pathlib import Path

import numpy as np

from . import __version__
from .contrast import AveragingConfig, ContrastCurve, SweepSpec, build_input, sweep
from .core import Axis, ConfigError, Layout, QuadratureError
from .oracle import golden_records, trace, trace_x, write_golden
from .phase_models import ROTATION_CONVENTIONS, phase_function

AXES = {"y": Axis.Y, "x": Axis.X, "theta": Axis.THETA_Z, "z": Axis.Z}
LAYOUTS = {3: Layout.THREE_BLADE, 4: Layout.FOUR_BLADE}

# Figure-panel frequency windows (Hz). Chosen so each panel spans the full
# decay of both layouts at the default parameters while staying below the
# frequencies where both contrasts sit in the oscillatory noise floor.
# The rotational panel uses a much lower band, as that axis bites earliest.
PANELS = {
    "A": {"axis": "y", "freq_min": 1.0, "freq_max": 200.0},
    "B": {"axis": "x", "freq_min": 1.0, "freq_max": 200.0},
    "C": {"axis": "theta", "freq_min": 0.1, "freq_max": 2.0},
}
POINTS_PER_DECADE = 200


@dataclass
class RunConfig:
    """Flat run description; every key can come from file or flag."""

    geometry: int = 3
    axis: str = "y"
    half_separation: float = 0.05  # m
    speed: float = 2000.0  # m/s
    bragg_angle: float = math.pi / 6  # rad
    amplitude: float | None = None  # m or rad; None picks the axis default
    freq_min: float = 1.0  # Hz
    freq_max: float = 200.0  # Hz
    n_points: int = 201
    grid: str = "log"
    n_phase: int = 1024
    n_chi: int = 256
    scheme: str = "trapezoid"
    tol: float = 1e-9
    rotation_convention: str = "velocity"
    workers: int = 1
    mc_samples: int | None = None
    seed: int | None = None
    output: str = "sweep.csv"

    def resolved(self) -> "RunConfig":
        cfg = self
        if cfg.amplitude is None:
            default = 1e-6 if cfg.axis == "theta" else 1e-7
            cfg = replace(cfg, amplitude=default)
        cfg.validate()
        return cfg

    def validate(self):
        if self.geometry not in LAYOUTS:
            raise ConfigError(f"geometry must be 3 or 4, got {self.geometry!r}")
        if self.axis not in AXES:
            raise ConfigError(f"axis must be one of {sorted(AXES)}, got {self.axis!r}")
        for name in ("half_separation", "speed"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0.0):
                raise ConfigError(f"{name} must be positive and finite, got {value!r}")
        if self.amplitude is None or not (math.isfinite(self.amplitude) and self.amplitude >= 0.0):
            raise ConfigError(f"amplitude must be >= 0 and finite, got {self.amplitude!r}")
        if not 0.0 < self.bragg_angle < math.pi / 2:
            raise ConfigError(f"bragg_angle must lie in (0, pi/2), got {self.bragg_angle!r}")
        if not (0.0 <= self.freq_min < self.freq_max):
            raise ConfigError(
                f"need 0 <= freq_min < freq_max, got {self.freq_min!r}:{self.freq_max!r}")
        if self.n_points < 2:
            raise ConfigError(f"n_points must be >= 2, got {self.n_points!r}")
        if self.grid not in ("log", "linear"):
            raise ConfigError(f"grid must be 'log' or 'linear', got {self.grid!r}")
        if self.grid == "log" and self.freq_min <= 0.0:
            raise ConfigError("log grid needs freq_min > 0")
        if self.rotation_convention not in ROTATION_CONVENTIONS:
            raise ConfigError(f"unknown rotation_convention {self.rotation_convention!r}")
        if self.workers < 1:
            raise ConfigError(f"workers must be >= 1, got {self.workers!r}")

    def averaging(self) -> AveragingConfig:
        return AveragingConfig(n_phase=self.n_phase, scheme=self.scheme, n_chi=self.n_chi,
                               tol=self.tol, mc_samples=self.mc_samples, seed=self.seed)

    def sweep_spec(self) -> SweepSpec:
        return SweepSpec(axis=AXES[self.axis], layout=LAYOUTS[self.geometry],
                         half_separation=self.half_separation, speed=self.speed,
                         bragg_angle=self.bragg_angle, amplitude=self.amplitude,
                         convention=self.rotation_convention)

    def frequencies(self) -> np.ndarray:
        if self.grid == "log":
            return np.geomspace(self.freq_min, self.freq_max, self.n_points)
        return np.linspace(self.freq_min, self.freq_max, self.n_points)


_FIELD_TYPES = {f.name: f.type for f in fields(RunConfig)}
_INT_KEYS = {"geometry", "n_points", "n_phase", "n_chi", "workers", "mc_samples", "seed"}
_FLOAT_KEYS = {"half_separation", "speed", "bragg_angle", "amplitude",
               "freq_min", "freq_max", "tol"}


def read_config_file(path: str) -> dict:
    """Flat key=value file; '#' starts a comment, blank lines ignored."""
    values: dict = {}
    try:
        text = Path(path).read_text()
    except OSError as err:
        raise ConfigError(f"cannot read config file {path!r}: {err}") from err
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key=value, got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in _FIELD_TYPES:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        try:
            if value.lower() == "none":
                values[key] = None
            elif key in _INT_KEYS:
                values[key] = int(value)
            elif key in _FLOAT_KEYS:
                values[key] = float(value)
            else:
                values[key] = value
        except ValueError as err:
            raise ConfigError(f"{path}:{lineno}: bad value for {key!r}: {value!r}") from err
    return values


def load_config(args: argparse.Namespace) -> RunConfig:
    """File values first, then flags override, then defaults fill in."""
    values = read_config_file(args.config) if getattr(args, "config", None) else {}
    for key in _FIELD_TYPES:
        flag_value = getattr(args, key, None)
        if flag_value is not None:
            values[key] = flag_value
    if getattr(args, "freq", None):
        try:
            lo, hi, n = args.freq.split(":")
            values["freq_min"], values["freq_max"], values["n_points"] = float(lo), float(hi), int(n)
        except ValueError as err:
            raise ConfigError(f"--freq expects MIN:MAX:N, got {args.freq!r}") from err
    try:
        cfg = RunConfig(**values)
    except TypeError as err:
        raise ConfigError(str(err)) from err
    return cfg.resolved()


def write_csv(path: Path, curve: ContrastCurve) -> None:
    rows = [f"{f:.17e},{c:.17e}" for f, c in curve.points]
    path.write_text("frequency_hz,contrast\n" + "\n".join(rows) + "\n")


def write_sidecar(path: Path, cfg: RunConfig, curve: ContrastCurve, extra: dict | None = None) -> None:
    payload = {
        "version": __version__,
        "model_id": curve.model_id,
        "run_config": asdict(cfg),
        "inputs": curve.inputs,
        "n_points": len(curve.frequencies_hz),
        "notes": "frequency grid and quadrature settings are artifact choices",
    }
    if extra:
        payload.update(extra)
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def config_from_sidecar(path: Path) -> RunConfig:
    payload = json.loads(path.read_text())
    return RunConfig(**payload["run_config"])


def cmd_sweep(args: argparse.Namespace) -> int:
    cfg = load_config(args)
    curve = sweep(cfg.sweep_spec(), cfg.frequencies(), cfg.averaging(), workers=cfg.workers)
    out = Path(cfg.output)
    write_csv(out, curve)
    write_sidecar(out.with_suffix(".json"), cfg, curve)
    print(f"wrote {out} ({len(curve.frequencies_hz)} points, model {curve.model_id})")
    return 0


def _relative_gap(a: float, b: float) -> float:
    return abs(a - b) / max(abs(a), abs(b), 1e-12)


def cmd_single(args: argparse.Namespace) -> int:
    cfg = load_config(args)
    spec = cfg.sweep_spec()
    inp = build_input(spec, args.frequency, args.varphi)
    closed = float(phase_function(inp, cfg.rotation_convention)(args.varphi))
    tracer = trace_x if spec.axis is Axis.X else trace
    nominal = tracer(inp, "nominal")
    event = tracer(inp, "event")
    print(f"model {spec.model_id}  f={args.frequency:g} Hz  varphi={args.varphi:g} rad")
    print(f"  closed form ({cfg.rotation_convention:>9s})  {closed:+.17e}")
    print(f"  trace nominal            {nominal.delta_phi:+.17e}   "
          f"rel gap {_relative_gap(closed, nominal.delta_phi):.3e}")
    print(f"  trace event              {event.delta_phi:+.17e}   "
          f"rel gap {_relative_gap(closed, event.delta_phi):.3e}")
    if spec.axis is Axis.THETA_Z:
        other = [c for c in ROTATION_CONVENTIONS if c != cfg.rotation_convention][0]
        alt = float(phase_function(inp, other)(args.varphi))
        print(f"  closed form ({other:>9s})  {alt:+.17e}")
    return 0


def cmd_reproduce_fig3(args: argparse.Namespace) -> int:
    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    manifest: dict = {"version": __version__, "panels": []}
    for panel, meta in PANELS.items():
        n = int(round(POINTS_PER_DECADE * math.log10(meta["freq_max"] / meta["freq_min"]))) + 1
        entry = {"panel": panel, "axis": meta["axis"], "log_frequency": True,
                 "contrast_axis": [0.0, 1.0], "csv": {},
                 "image": f"fig3{panel.lower()}.svg"}
        for geometry in (3, 4):
            cfg = RunConfig(geometry=geometry, axis=meta["axis"],
                            freq_min=meta["freq_min"], freq_max=meta["freq_max"],
                            n_points=n, workers=args.workers).resolved()
            curve = sweep(cfg.sweep_spec(), cfg.frequencies(), cfg.averaging(),
                          workers=cfg.workers)
            name = "three_blade" if geometry == 3 else "four_blade"
            csv_path = outdir / f"fig3{panel.lower()}_{name}.csv"
            write_csv(csv_path, curve)
            write_sidecar(csv_path.with_suffix(".json"), cfg, curve, {"panel": panel})
            entry["csv"][name] = csv_path.name
        manifest["panels"].append(entry)
        print(f"panel {panel}: {entry['csv']['three_blade']}, {entry['csv']['four_blade']}")
    (outdir / "fig3_manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    print(f"wrote {outdir / 'fig3_manifest.json'}")
    return 0


def cmd_golden(args: argparse.Namespace) -> int:
    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    path = outdir / "oracle_golden.txt"
    write_golden(path, golden_records())
    print(f"wrote {path}")
    return 0


def _add_config_flags(parser: argparse.ArgumentParser):
    parser.add_argument("--config", help="flat key=value config file; flags override")
    parser.add_argument("--geometry", type=int, choices=(3, 4))
    parser.add_argument("--axis", choices=sorted(AXES))
    parser.add_argument("--half-separation", dest="half_separation", type=float,
                        help="blade half separation L in meters")
    parser.add_argument("--speed", type=float, help="neutron speed in m/s")
    parser.add_argument("--bragg-angle", dest="bragg_angle", type=float,
                        help="Bragg angle in radians")
    parser.add_argument("--amplitude", type=float,
                        help="vibration amplitude (m, or rad for theta)")
    parser.add_argument("--freq", help="frequency grid shorthand MIN:MAX:N (Hz)")
    parser.add_argument("--freq-min", dest="freq_min", type=float)
    parser.add_argument("--freq-max", dest="freq_max", type=float)
    parser.add_argument("--n-points", dest="n_points", type=int)
    parser.add_argument("--grid", choices=("log", "linear"))
    parser.add_argument("--n-phase", dest="n_phase", type=int,
                        help="starting number of entry-phase quadrature nodes")
    parser.add_argument("--n-chi", dest="n_chi", type=int)
    parser.add_argument("--scheme", choices=("trapezoid", "midpoint"))
    parser.add_argument("--tol", type=float, help="quadrature doubling tolerance")
    parser.add_argument("--rotation-convention", dest="rotation_convention",
                        choices=ROTATION_CONVENTIONS)
    parser.add_argument("--workers", type=int)
    parser.add_argument("--mc-samples", dest="mc_samples", type=int,
                        help="validate with random phase sampling instead of quadrature")
    parser.add_argument("--seed", type=int)
    parser.add_argument("--output", help="CSV output path (sidecar JSON alongside)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nivib",
        description="Vibration-induced contrast loss in perfect-crystal neutron interferometers")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_sweep = sub.add_parser("sweep", help="contrast vs frequency to CSV")
    _add_config_flags(p_sweep)
    p_sweep.set_defaults(func=cmd_sweep)

    p_single = sub.add_parser("single", help="one phase difference with tracer cross-check")
    _add_config_flags(p_single)
    p_single.add_argument("--frequency", type=float, required=True, help="Hz")
    p_single.add_argument("--varphi", type=float, default=0.0, help="entry phase, rad")
    p_single.set_defaults(func=cmd_single)

    p_fig = sub.add_parser("reproduce-fig3", help="emit the three contrast panels")
    p_fig.add_argument("--outdir", default="fig3")
    p_fig.add_argument("--workers", type=int, default=1)
    p_fig.set_defaults(func=cmd_reproduce_fig3)

    p_gold = sub.add_parser("golden", help="regenerate tracer reference values")
    p_gold.add_argument("--outdir", default="tests/golden")
    p_gold.set_defaults(func=cmd_golden)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as err:
        print(f"config error: {err}", file=sys.stderr)
        return 2
    except QuadratureError as err:
        print(f"numerical error: {err}", file=sys.stderr)
        return 3


def entry_point():  # console script shim
    raise SystemExit(main())


if __name__ == "__main__":
    raise SystemExit(main())
