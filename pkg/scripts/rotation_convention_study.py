#!/usr/bin/env python3
"""Compare the two rotational wall-velocity conventions side by side.

The default convention takes every blade's speed as the time derivative of
its local displacement and threads all bounces through the same reflection
rule; the alternate reading (displacement-phase entry kick, unnegated
diffracted start) is kept for reproducibility. Their three-blade contrast
curves coincide, because a quarter-period shift of the entry phase washes
out under averaging, while the four-blade curves differ sharply: only the
self-consistent chain lets the third blade undo the second blade's kick.

Usage: python scripts/rotation_convention_study.py
"""

import numpy as np

from nivib import Axis, Layout
from nivib.contrast import AveragingConfig, SweepSpec, sweep

CFG = AveragingConfig()
FREQS = np.geomspace(0.1, 2.0, 9)


def curve(layout, convention):
    spec = SweepSpec(axis=Axis.THETA_Z, layout=layout, amplitude=1e-6,
                     convention=convention)
    return sweep(spec, FREQS, CFG).contrasts


def main():
    rows = {
        "three-blade / velocity": curve(Layout.THREE_BLADE, "velocity"),
        "three-blade / alternate": curve(Layout.THREE_BLADE, "alternate"),
        "four-blade  / velocity": curve(Layout.FOUR_BLADE, "velocity"),
        "four-blade  / alternate": curve(Layout.FOUR_BLADE, "alternate"),
    }
    header = "frequency (Hz)".ljust(26) + "".join(f"{f:>9.3f}" for f in FREQS)
    print(header)
    print("-" * len(header))
    for name, contrasts in rows.items():
        print(name.ljust(26) + "".join(f"{c:>9.4f}" for c in contrasts))
    print()
    print("three-blade rows agree (entry-phase shift integrates out);")
    print("four-blade robustness only appears under the velocity convention.")


if __name__ == "__main__":
    main()
