"""Shared construction helpers for the test suite."""

import numpy as np

from nivib import Axis, Layout
from nivib.contrast import SweepSpec, build_input

# Default run parameters: L = 5 cm, v = 2000 m/s, Bragg angle 30 degrees,
# 0.1 um translational / 1 urad rotational amplitude.
DEFAULT_AMPLITUDES = {
    Axis.Y: 1e-7,
    Axis.X: 1e-7,
    Axis.Z: 1e-7,
    Axis.THETA_Z: 1e-6,
}


def model_input(axis, layout, frequency_hz, varphi=0.0, amplitude=None, **spec_kwargs):
    if amplitude is None:
        amplitude = DEFAULT_AMPLITUDES[axis]
    spec = SweepSpec(axis=axis, layout=layout, amplitude=amplitude, **spec_kwargs)
    return build_input(spec, frequency_hz, varphi)


def phi_grid(n=64):
    return 2.0 * np.pi * np.arange(n) / n


ALL_EXACT = [
    (Axis.Y, Layout.THREE_BLADE),
    (Axis.Y, Layout.FOUR_BLADE),
    (Axis.X, Layout.THREE_BLADE),
    (Axis.X, Layout.FOUR_BLADE),
    (Axis.THETA_Z, Layout.THREE_BLADE),
    (Axis.THETA_Z, Layout.FOUR_BLADE),
    (Axis.Z, Layout.THREE_BLADE),
    (Axis.Z, Layout.FOUR_BLADE),
]
