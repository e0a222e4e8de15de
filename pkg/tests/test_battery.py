"""
Unit tests for the test function batteries.
"""

import numpy as np
import pytest

from symtrunc.core.battery import (
    MIN_BATTERY_SIZE,
    TestFunctionFamily,
    boundary_distance,
    general_battery,
    make_battery,
    radial_battery,
    radial_spike_battery,
    spike_monotone_steps,
    spike_scales,
    spike_steps,
)
from symtrunc.core.domain import make_domain


class TestFamilies:
    """
    Test class for the sampled batteries.
    """

    def test_general_battery_size(self):
        battery = general_battery(seed=0, n_random=5)
        assert len(battery) >= MIN_BATTERY_SIZE
        assert "affine_x" in battery.names

    @pytest.mark.parametrize("shape", ["interval", "square", "disk", "beta_cusp", "s_john"])
    def test_members_are_finite(self, shape):
        domain = make_domain(shape, 16)
        for name, f in general_battery(seed=1, n_random=2).sample(domain):
            assert np.all(np.isfinite(f.values)), name

    def test_random_members_depend_on_seed(self, square_domain):
        first = dict(general_battery(seed=0, n_random=1).sample(square_domain))["fourier_0_0"]
        again = dict(general_battery(seed=0, n_random=1).sample(square_domain))["fourier_0_0"]
        other = dict(general_battery(seed=1, n_random=1).sample(square_domain))["fourier_1_0"]
        np.testing.assert_array_equal(first.values, again.values)
        assert not np.allclose(first.values, other.values)

    def test_radial_battery_has_median_zero(self, disk_domain):
        for name, f in radial_battery().sample(disk_domain):
            assert np.mean(f.values > 0) < 0.5, name

    def test_factory(self):
        assert make_battery("trivial").name == "trivial"
        assert len(make_battery("radial")) == 9
        with pytest.raises(ValueError, match="Unknown battery kind"):
            make_battery("smooth")

    def test_empty_family(self):
        with pytest.raises(ValueError):
            TestFunctionFamily("empty", {})

    def test_non_finite_member(self, interval_domain):
        family = TestFunctionFamily("bad", {"nan": lambda domain: np.full(domain.n_cells, np.nan)})
        with pytest.raises(ValueError, match="not finite"):
            family.sample(interval_domain)

    def test_boundary_distance(self, square_domain):
        distance = boundary_distance(square_domain)
        assert np.all(distance >= 0)
        assert np.max(distance) == pytest.approx(0.5, abs=1.0 / 16)
        assert np.min(distance) == pytest.approx(1.0 / 32)


class TestSpikes:
    """
    Test class for the spike batteries on (0, 1].
    """

    def test_scales(self):
        scales = spike_scales(0.5, k_max=4)
        np.testing.assert_allclose(scales, 0.5 * 2.0 ** -np.arange(5))

    def test_scales_stop_at_cell_measure(self):
        scales = spike_scales(0.5, cell_measure=1.0 / 1024)
        assert np.min(scales) >= 32.0 / 1024

    @pytest.mark.parametrize("sigma", [0.0, 1.5])
    def test_scales_reject_sigma(self, sigma):
        with pytest.raises(ValueError):
            spike_scales(sigma)

    def test_scales_unresolved(self):
        with pytest.raises(ValueError, match="no spike"):
            spike_scales(0.01, cell_measure=0.01)

    def test_spikes_are_normalized(self):
        for spike in spike_steps(spike_scales(1.0, k_max=5)):
            assert spike.integral() == pytest.approx(1.0)

    def test_monotone_spikes(self):
        steps = spike_monotone_steps(spike_scales(0.5, k_max=4))
        assert len(steps) == 9
        for step in steps:
            assert step.integral() == pytest.approx(1.0)
            assert np.all(np.diff(step.values) <= 0)

    def test_radial_spike_battery(self):
        members = radial_spike_battery(make_domain("disk", 64))
        assert members
        for name, f in members:
            assert np.all(f.values >= 0), name
