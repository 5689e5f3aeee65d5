"""Command-line wrapper: render panels listed in a simulator manifest."""

from __future__ import annotations

import argparse
import sys

from .render import PanelError, load_manifest, render_panels


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="figpanels",
        description="Render contrast-vs-frequency panels from simulator CSVs")
    parser.add_argument("manifest", help="panel-to-CSV manifest (JSON)")
    parser.add_argument("--outdir", help="image directory (default: next to the CSVs)")
    args = parser.parse_args(argv)
    try:
        specs = load_manifest(args.manifest, args.outdir)
        outputs = render_panels(specs)
    except PanelError as err:
        print(f"panel error: {err}", file=sys.stderr)
        return 2
    for path in outputs:
        print(f"wrote {path}")
    return 0


def entry_point():
    raise SystemExit(main())


if __name__ == "__main__":
    raise SystemExit(main())
