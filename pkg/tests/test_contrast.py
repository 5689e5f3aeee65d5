"""Phase averaging, contrast extraction, and sweeps.

The synthetic-model checks lean on the identity <cos(K sin phi)> = J0(K):
averaging a sinusoidal phase over its uniform random phase leaves the
zeroth Bessel function, so |J0(K)| is an exact external reference.
"""

import math

import numpy as np
import pytest

from nivib import Axis, ConfigError, Layout, QuadratureError
from nivib.contrast import (
    AveragingConfig,
    ContrastCurve,
    SweepSpec,
    build_input,
    contrast_phasor,
    contrast_scan,
    mean_intensity,
    sweep,
)
from nivib.phase_models import phase_function

from helpers import ALL_EXACT, model_input

J0_AT_1 = 0.76519768655796655  # zeroth Bessel function at unit argument

CFG = AveragingConfig()


def sine_model(k=1.0, delta=0.0):
    return lambda varphi: k * np.sin(varphi + delta)


class TestMeanIntensity:
    def test_constant_phase_peak(self):
        assert mean_intensity(lambda p: np.zeros_like(p), 0.0, CFG) == pytest.approx(2.0, abs=1e-15)

    def test_constant_phase_trough(self):
        assert mean_intensity(lambda p: np.zeros_like(p), math.pi, CFG) == pytest.approx(0.0, abs=1e-15)

    def test_bessel_identity(self):
        value = mean_intensity(sine_model(1.0), 0.0, CFG)
        assert value == pytest.approx(1.0 + J0_AT_1, abs=1e-12)

    def test_nonconvergence_is_reported(self):
        cfg = AveragingConfig(n_phase=16, max_doublings=2)
        with pytest.raises(QuadratureError):
            mean_intensity(sine_model(5e4), 0.0, cfg)

    def test_midpoint_scheme_agrees(self):
        mid = AveragingConfig(scheme="midpoint")
        a = mean_intensity(sine_model(1.0), 0.4, CFG)
        b = mean_intensity(sine_model(1.0), 0.4, mid)
        assert a == pytest.approx(b, abs=1e-12)


class TestContrast:
    def test_perfect_fringes(self):
        assert contrast_scan(lambda p: np.zeros_like(p), CFG) == pytest.approx(1.0, abs=1e-12)
        assert contrast_phasor(lambda p: np.zeros_like(p), CFG) == pytest.approx(1.0, abs=1e-15)

    def test_fully_dephased(self):
        # phase winding uniformly over a full turn kills the fringes
        assert contrast_scan(lambda p: p, CFG) == pytest.approx(0.0, abs=1e-9)
        assert contrast_phasor(lambda p: p, CFG) == pytest.approx(0.0, abs=1e-12)

    @pytest.mark.parametrize("delta", [0.0, 0.7, 3.9])
    def test_bessel_contrast(self, delta):
        assert contrast_scan(sine_model(1.0, delta), CFG) == pytest.approx(J0_AT_1, abs=1e-9)
        assert contrast_phasor(sine_model(1.0, delta), CFG) == pytest.approx(J0_AT_1, abs=1e-12)

    def test_constant_phasor_has_unit_modulus(self):
        assert contrast_phasor(lambda p: 0.3 + np.zeros_like(p), CFG) == pytest.approx(1.0, abs=1e-15)

    def test_global_phase_shift_invariance(self):
        base = contrast_phasor(sine_model(1.3), CFG)
        shifted = contrast_phasor(lambda p: 1.3 * np.sin(p) + 2.1, CFG)
        assert shifted == pytest.approx(base, abs=1e-12)

    def test_phase_origin_invariance(self):
        base = contrast_phasor(sine_model(1.3, 0.0), CFG)
        shifted = contrast_phasor(sine_model(1.3, 1.234), CFG)
        assert shifted == pytest.approx(base, abs=1e-9)

    def test_scan_matches_phasor_on_synthetic(self):
        for k in (0.3, 1.0, 2.405, 7.0):
            scan = contrast_scan(sine_model(k), CFG)
            phasor = contrast_phasor(sine_model(k), CFG)
            assert abs(scan - phasor) < 1e-6

    @pytest.mark.parametrize("axis,layout", ALL_EXACT)
    def test_scan_matches_phasor_on_models(self, axis, layout):
        for f in (1.0, 100.0):
            model = phase_function(model_input(axis, layout, f, 0.0))
            assert abs(contrast_scan(model, CFG) - contrast_phasor(model, CFG)) < 1e-6

    def test_doubling_stability_once_converged(self):
        model = phase_function(model_input(Axis.Y, Layout.THREE_BLADE, 100.0, 0.0))
        a = contrast_phasor(model, AveragingConfig(n_phase=1024))
        b = contrast_phasor(model, AveragingConfig(n_phase=2048))
        assert abs(a - b) < 1e-8

    def test_z_axis_full_contrast(self):
        for layout in (Layout.THREE_BLADE, Layout.FOUR_BLADE):
            model = phase_function(model_input(Axis.Z, layout, 500.0, 0.0, amplitude=1e-3))
            assert contrast_phasor(model, CFG) == 1.0
            assert contrast_scan(model, CFG) == pytest.approx(1.0, abs=1e-12)

    def test_monte_carlo_escape_hatch(self):
        cfg = AveragingConfig(mc_samples=200_000, seed=7)
        value = contrast_phasor(sine_model(1.0), cfg)
        assert value == pytest.approx(J0_AT_1, abs=0.02)
        again = contrast_phasor(sine_model(1.0), cfg)
        assert again == value  # seeded sampling is reproducible


class TestAveragingConfigValidation:
    @pytest.mark.parametrize("kwargs", [
        {"n_phase": 8}, {"n_chi": 4}, {"scheme": "simpson"},
        {"tol": 0.0}, {"tol": -1.0}, {"mc_samples": 3},
    ])
    def test_rejects(self, kwargs):
        with pytest.raises(ConfigError):
            AveragingConfig(**kwargs)


class TestSweep:
    def test_static_grid_point(self):
        spec = SweepSpec(axis=Axis.Y, layout=Layout.THREE_BLADE)
        curve = sweep(spec, [0.0], CFG)
        assert curve.points == ((0.0, 1.0),)

    def test_z_axis_sweep_is_flat(self):
        spec = SweepSpec(axis=Axis.Z, layout=Layout.THREE_BLADE)
        curve = sweep(spec, np.geomspace(1.0, 1000.0, 10), CFG)
        assert len(curve.points) == 10
        assert all(c == 1.0 for c in curve.contrasts)

    def test_workers_bitwise_identical(self):
        spec = SweepSpec(axis=Axis.Y, layout=Layout.FOUR_BLADE)
        freqs = np.geomspace(1.0, 200.0, 12)
        serial = sweep(spec, freqs, CFG, workers=1)
        parallel = sweep(spec, freqs, CFG, workers=3)
        assert serial.contrasts == parallel.contrasts

    def test_quadrature_failure_names_frequency(self):
        spec = SweepSpec(axis=Axis.Y, layout=Layout.THREE_BLADE, amplitude=1e-2)
        cfg = AveragingConfig(n_phase=16, max_doublings=1)
        with pytest.raises(QuadratureError, match="Hz"):
            sweep(spec, [500.0], cfg)

    def test_rejects_unsorted_grid(self):
        spec = SweepSpec(axis=Axis.Y, layout=Layout.THREE_BLADE)
        with pytest.raises(ConfigError):
            sweep(spec, [10.0, 5.0], CFG)

    def test_snapshot_records_parameters(self):
        spec = SweepSpec(axis=Axis.THETA_Z, layout=Layout.FOUR_BLADE, amplitude=1e-6)
        curve = sweep(spec, [1.0, 2.0], CFG)
        assert curve.model_id == "theta4"
        assert curve.inputs["amplitude"] == 1e-6
        assert curve.inputs["quadrature"]["n_phase"] == CFG.n_phase


class TestContrastCurve:
    def test_rejects_nonincreasing_frequencies(self):
        with pytest.raises(ConfigError):
            ContrastCurve((1.0, 1.0), (0.5, 0.5), "y3")

    def test_rejects_out_of_range_contrast(self):
        with pytest.raises(ConfigError):
            ContrastCurve((1.0, 2.0), (0.5, 1.5), "y3")

    def test_clamps_rounding_overshoot(self):
        curve = ContrastCurve((1.0,), (1.0 + 1e-12,), "y3")
        assert curve.contrasts == (1.0,)
