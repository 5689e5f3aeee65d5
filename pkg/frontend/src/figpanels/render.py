"""Render contrast-vs-frequency panels from simulator CSV files.

Strictly a presentation layer: the only inputs are the CSV curves
(`frequency_hz,contrast` rows) and the manifest that maps panels to files.
No numbers are computed here beyond axis transforms, and rendering the
same inputs twice produces identical bytes.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

plt.rcParams["svg.hashsalt"] = "figpanels"  # deterministic SVG ids

__all__ = ["PanelError", "PanelSpec", "load_manifest", "render_panels"]

AXIS_TITLES = {
    "y": "transverse (y) vibrations",
    "x": "longitudinal (x) vibrations",
    "theta": "rotational (theta) vibrations",
    "z": "vertical (z) vibrations",
}


class PanelError(ValueError):
    """Missing, unreadable, or mutually inconsistent panel inputs."""


@dataclass(frozen=True)
class PanelSpec:
    """One panel: two curves sharing a frequency grid, one output image."""

    panel: str  # "A", "B", or "C"
    csv_paths: dict  # curve label -> CSV path
    output: Path  # primary (vector) image path; a raster sibling is added
    title: str = ""
    x_label: str = "vibration frequency (Hz)"
    y_label: str = "contrast"
    log_frequency: bool = True
    contrast_axis: tuple = (0.0, 1.0)


@dataclass
class _Curve:
    label: str
    frequencies: list = field(default_factory=list)
    contrasts: list = field(default_factory=list)


def _read_curve(path: Path, label: str) -> _Curve:
    if not path.exists():
        raise PanelError(f"missing CSV file: {path}")
    curve = _Curve(label)
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != ["frequency_hz", "contrast"]:
            raise PanelError(f"unexpected CSV header in {path}: {header!r}")
        for row in reader:
            try:
                f, c = float(row[0]), float(row[1])
            except (ValueError, IndexError) as err:
                raise PanelError(f"bad row in {path}: {row!r}") from err
            curve.frequencies.append(f)
            curve.contrasts.append(c)
    if not curve.frequencies:
        raise PanelError(f"no data rows in {path}")
    return curve


def _load_panel(spec: PanelSpec) -> list[_Curve]:
    curves = [_read_curve(Path(path), label) for label, path in sorted(spec.csv_paths.items())]
    reference = curves[0]
    for other in curves[1:]:
        if other.frequencies != reference.frequencies:
            raise PanelError(
                f"panel {spec.panel}: frequency grids differ between "
                f"{spec.csv_paths[reference.label]} and {spec.csv_paths[other.label]}")
    return curves


_STYLES = {
    "three_blade": {"color": "tab:blue", "linestyle": "-"},
    "four_blade": {"color": "tab:red", "linestyle": "--"},
}


def _draw(spec: PanelSpec, curves: list[_Curve]) -> list[Path]:
    fig, ax = plt.subplots(figsize=(5.0, 3.6), constrained_layout=True)
    for curve in curves:
        style = _STYLES.get(curve.label, {})
        ax.plot(curve.frequencies, curve.contrasts,
                label=curve.label.replace("_", " "), linewidth=1.4, **style)
    if spec.log_frequency:
        ax.set_xscale("log")
    ax.set_ylim(*spec.contrast_axis)
    ax.set_xlabel(spec.x_label)
    ax.set_ylabel(spec.y_label)
    ax.set_title(f"{spec.panel}: {spec.title}" if spec.title else spec.panel)
    ax.legend(loc="lower left", frameon=False)
    ax.grid(True, which="both", alpha=0.25)

    outputs = []
    spec.output.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(spec.output, metadata={"Date": None})
    outputs.append(spec.output)
    raster = spec.output.with_suffix(".png")
    fig.savefig(raster, dpi=160)
    outputs.append(raster)
    plt.close(fig)
    return outputs


def render_panels(specs: list[PanelSpec]) -> list[Path]:
    """Render every panel, or nothing at all if any input is unusable.

    All CSVs are read and validated before the first image is written, so
    a broken panel cannot leave partial output behind.
    """
    loaded = [(spec, _load_panel(spec)) for spec in specs]
    outputs: list[Path] = []
    for spec, curves in loaded:
        outputs.extend(_draw(spec, curves))
    return outputs


def load_manifest(manifest_path: Path, outdir: Path | None = None) -> list[PanelSpec]:
    """Panel specs from the simulator's manifest file.

    CSV paths are resolved relative to the manifest; images land next to
    the CSVs unless outdir says otherwise.
    """
    manifest_path = Path(manifest_path)
    if not manifest_path.exists():
        raise PanelError(f"missing manifest file: {manifest_path}")
    try:
        payload = json.loads(manifest_path.read_text())
    except json.JSONDecodeError as err:
        raise PanelError(f"unparseable manifest {manifest_path}: {err}") from err
    base = manifest_path.parent
    image_dir = Path(outdir) if outdir is not None else base
    specs = []
    for entry in payload.get("panels", []):
        try:
            specs.append(PanelSpec(
                panel=entry["panel"],
                csv_paths={label: base / name for label, name in entry["csv"].items()},
                output=image_dir / entry["image"],
                title=AXIS_TITLES.get(entry.get("axis", ""), entry.get("axis", "")),
                log_frequency=bool(entry.get("log_frequency", True)),
                contrast_axis=tuple(entry.get("contrast_axis", (0.0, 1.0))),
            ))
        except KeyError as err:
            raise PanelError(f"manifest entry missing key {err}: {entry!r}") from err
    return specs
