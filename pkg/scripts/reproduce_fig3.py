#!/usr/bin/env python3
"""Produce the three contrast panels end to end: CSV data, then images.

Usage: python scripts/reproduce_fig3.py [outdir]

Data come from the simulator CLI; images are rendered by the figpanels
package when it is installed, and skipped otherwise.
"""

import sys
from pathlib import Path

from nivib.cli import main as nivib_main


def run(outdir: str) -> int:
    code = nivib_main(["reproduce-fig3", "--outdir", outdir])
    if code != 0:
        return code
    try:
        from figpanels.cli import main as figpanels_main
    except ImportError:
        print("figpanels not installed; CSV data written, images skipped")
        return 0
    return figpanels_main([str(Path(outdir) / "fig3_manifest.json")])


if __name__ == "__main__":
    sys.exit(run(sys.argv[1] if len(sys.argv) > 1 else "fig3"))
