"""
Unit tests for the Hardy operator and the Maz'ya criterion.
"""

import logging
import math

import numpy as np
import pytest
from hypothesis import given, seed, settings
from hypothesis import strategies as st

from symtrunc.core.domain import mean_value, make_domain, rearrange_sampled
from symtrunc.core.hardy import (
    HardyParams,
    blowup_exponent,
    default_a_grid,
    fubini_gap,
    hardy_apply,
    hardy_l1_ratio,
    mazya_criterion_sup,
    mazya_values,
    predicted_exponent,
    radial_test_function,
    weighted_average_bound,
)
from symtrunc.core.spaces import RISpaceSpec
from symtrunc.core.stepfn import StepFunction


@st.composite
def nonnegative_steps(draw):
    k = draw(st.integers(min_value=1, max_value=6))
    raw = draw(st.lists(st.floats(min_value=0.05, max_value=1.0), min_size=k, max_size=k))
    values = draw(st.lists(st.floats(min_value=0.0, max_value=5.0), min_size=k, max_size=k))
    lengths = np.asarray(raw) / np.sum(raw)
    return StepFunction.from_lengths(lengths, values)


class TestHardyParams:
    """
    Test class for the exponent bookkeeping.
    """

    def test_derived_exponents(self):
        params = HardyParams(2, 1.5, 1.2)
        assert params.alpha == pytest.approx(0.25)
        assert params.r_exp == pytest.approx(2.4 / 1.3)
        assert params.inner_exponent == pytest.approx(4.5)

    def test_borderline_target_exponent(self):
        """
        A non-positive denominator switches to r = nt/((n-1)s).
        """
        assert HardyParams(2, 1.0, 2.0).r_exp == pytest.approx(4.0)

    def test_borderline_is_logged(self, caplog):
        with caplog.at_level(logging.INFO, logger="symtrunc.core.hardy"):
            params = HardyParams(2, 1.0, 2.0)
        assert "Borderline configuration n=2, s=1.0, t=2.0" in caplog.text
        assert params.alpha == pytest.approx(0.5)
        assert "r_exp=4.0" in repr(params)

    @pytest.mark.parametrize(
        "n, s, t, require",
        [(1, 1.5, 1.2, False), (2, 0.5, 1.2, False), (2, 1.5, 1.0, False), (2, 1.5, 3.0, True)],
    )
    def test_rejects_bad_exponents(self, n, s, t, require):
        with pytest.raises(ValueError):
            HardyParams(n, s, t, require_har=require)

    def test_to_dict(self):
        data = HardyParams(2, 2.0, 1.5).to_dict()
        assert data == {"n": 2, "s": 2.0, "t": 1.5, "alpha": 0.0, "r": 2.0}


class TestHardyApply:
    """
    Test class for t -> int_t^1 s^alpha g(s) ds/s.
    """

    def test_constant_input(self):
        h = hardy_apply(StepFunction.constant(1.0), 0.5)
        assert float(h(0.25)) == pytest.approx(1.0)
        assert float(h(1.0)) == pytest.approx(0.0)

    def test_zero_input(self):
        h = hardy_apply(StepFunction.constant(0.0), 0.5)
        assert np.all(h(np.linspace(0.01, 1.0, 11)) == 0.0)

    def test_continuity_at_breakpoints(self, sample_step):
        g = sample_step.abs()
        h = hardy_apply(g, 0.5)
        for b in g.breakpoints[1:-1]:
            assert float(h(b)) == pytest.approx(float(h(b + 1e-12)), abs=1e-9)

    def test_rejects_bad_input(self, sample_step):
        with pytest.raises(ValueError):
            hardy_apply(sample_step.abs(), 0.0)
        with pytest.raises(ValueError):
            hardy_apply(sample_step, 0.5)

    @seed(20240604)
    @settings(max_examples=60, deadline=None)
    @given(nonnegative_steps(), st.floats(min_value=0.1, max_value=2.0), st.floats(min_value=0.01, max_value=1.0))
    def test_fubini_identity(self, g, alpha, t):
        """
        h** - h equals the weighted average of g to 1e-8.
        """
        lhs, rhs = fubini_gap(g, alpha, t)
        assert abs(lhs - rhs) <= 1e-8 * max(1.0, abs(rhs))

    @seed(20240605)
    @settings(max_examples=60, deadline=None)
    @given(nonnegative_steps(), st.floats(min_value=0.1, max_value=2.0))
    def test_l1_ratio_at_most_one(self, g, alpha):
        assert hardy_l1_ratio(g, alpha) <= 1.0 + 1e-12

    @pytest.mark.parametrize("label", ["L1", "L2", "Linf", "L(2,1)"])
    def test_weighted_average_bound(self, sample_step, label):
        alpha = 0.5
        assert weighted_average_bound(sample_step, alpha, RISpaceSpec.parse(label)) <= 1.0 / alpha + 1e-8


class TestMazyaCriterion:
    """
    Test class for the boundedness criterion and its blow-up exponent.
    """

    def test_default_grid(self):
        grid = default_a_grid()
        assert grid[0] == 1.0
        assert grid[-1] <= 1e-8
        np.testing.assert_allclose(grid[1:] / grid[:-1], 0.8)

    @pytest.mark.parametrize(
        "n, s, t, expected",
        [(2, 1.5, 1.2, -1.0 / 24.0), (2, 2.0, 1.5, -1.0 / 6.0)],
    )
    def test_blowup_exponent(self, n, s, t, expected):
        """
        Fitted slopes match (n-1)(1-t)(s-1)/(nt) within 5%.
        """
        params = HardyParams(n, s, t)
        assert predicted_exponent(params) == pytest.approx(expected)
        criterion = mazya_criterion_sup(params)
        assert criterion.diverging
        assert blowup_exponent(params) == pytest.approx(expected, rel=0.05)

    def test_bounded_configuration(self):
        params = HardyParams(2, 1.0, 2.0)
        criterion = mazya_criterion_sup(params)
        assert not criterion.diverging
        assert not criterion.strong_divergence
        assert math.isfinite(criterion.sup_value)
        assert predicted_exponent(params) == 0.0
        with pytest.raises(ValueError, match="does not diverge"):
            blowup_exponent(params)

    def test_coarse_grid_cannot_judge(self):
        criterion = mazya_criterion_sup(HardyParams(2, 1.5, 1.2), np.array([1.0, 0.5, 0.1]))
        assert criterion.tail_slope is None
        assert not criterion.diverging

    def test_values_reject_bad_grid(self):
        with pytest.raises(ValueError):
            mazya_values(HardyParams(2, 1.5, 1.2), np.array([0.0, 0.5]))

    def test_to_dict(self):
        data = mazya_criterion_sup(HardyParams(2, 2.0, 1.5)).to_dict()
        assert set(data) == {"sup", "argmax_a", "diverging", "strong_divergence", "tail_slope"}
        assert data["diverging"] is True


class TestRadialTestFunction:
    """
    Test class for Hardy outputs transported onto a domain.
    """

    def test_radial_and_integral(self, square_domain):
        g = StepFunction.indicator(0.2)
        u = radial_test_function(g, square_domain)
        h = hardy_apply(g, 0.5)
        mirrored = square_domain.lookup(
            np.column_stack((15 - square_domain.lattice[:, 0], square_domain.lattice[:, 1]))
        )
        np.testing.assert_allclose(u.values, u.values[mirrored])
        assert mean_value(u) == pytest.approx(h.prefix(1.0), rel=0.05)

    def test_rejects_wide_support(self, square_domain):
        assert square_domain.inscribed_ball_measure < 1.0
        with pytest.raises(ValueError, match="inscribed ball"):
            radial_test_function(StepFunction.constant(1.0), square_domain)

    def test_interval(self):
        domain = make_domain("interval", 64)
        u = radial_test_function(StepFunction.indicator(0.5), domain)
        assert np.max(u.values) <= float(hardy_apply(StepFunction.indicator(0.5), 1.0)(1e-12)) + 1e-12

    @pytest.mark.slow
    def test_rearrangement_matches_hardy_output(self):
        """
        u* agrees with the Hardy output within 2% on the 128 x 128 disk.
        """
        disk = make_domain("disk", 128)
        sigma = disk.inscribed_ball_measure
        g = StepFunction([0.0, sigma / 4, sigma / 2, 1.0], [0.0, 1.0, 0.0])
        u_star = rearrange_sampled(radial_test_function(g, disk))
        h = hardy_apply(g, 0.5)
        t = np.linspace(1e-3, 0.999, 999)
        peak = float(h(1e-9))
        assert peak > 0
        assert np.max(np.abs(u_star(t) - h(t))) <= 0.02 * peak
