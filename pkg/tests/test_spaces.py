"""
Unit tests for rearrangement-invariant space descriptors.
"""

import math

import numpy as np
import pytest

from symtrunc.core.spaces import RISpaceSpec
from symtrunc.core.stepfn import StepFunction, maximal_average


class TestParse:
    """
    Test class for space labels.
    """

    @pytest.mark.parametrize(
        "label, family, p, q, flavor",
        [
            ("L1", "lebesgue", 1.0, 1.0, "classical"),
            ("L2.5", "lebesgue", 2.5, 2.5, "classical"),
            ("Linf", "sup", math.inf, math.inf, "classical"),
            ("L(2,inf)", "lorentz", 2.0, math.inf, "classical"),
            ("L(2, 1)", "lorentz", 2.0, 1.0, "classical"),
            ("Losc(inf,2)", "lorentz", math.inf, 2.0, "oscillation"),
        ],
    )
    def test_parse(self, label, family, p, q, flavor):
        space = RISpaceSpec.parse(label)
        assert space.family == family
        assert space.p == p
        assert space.q == q
        assert space.flavor == flavor

    @pytest.mark.parametrize("label", ["L1", "L2.5", "Linf", "L(2,inf)", "Losc(inf,2)"])
    def test_label_round_trip(self, label):
        assert RISpaceSpec.parse(RISpaceSpec.parse(label).label).label == label

    @pytest.mark.parametrize("label", ["M2", "L", "Lnone", "L(0.5,1)", "L(inf,2)", "L(2,x)", "L0.5"])
    def test_rejects_bad_labels(self, label):
        with pytest.raises(ValueError):
            RISpaceSpec.parse(label)

    def test_unknown_family(self):
        with pytest.raises(ValueError, match="Unknown space family"):
            RISpaceSpec("orlicz")

    def test_lebesgue_inf_is_sup(self):
        assert RISpaceSpec.lebesgue(math.inf) == RISpaceSpec.sup_norm()


class TestFundamentalFunction:
    """
    Test class for phi_X(s).
    """

    @pytest.mark.parametrize(
        "label, expected",
        [("L1", 0.25), ("L2", 0.5), ("Linf", 1.0), ("L(2,inf)", 0.5), ("L(2,1)", 1.0)],
    )
    def test_values_at_quarter(self, label, expected):
        assert RISpaceSpec.parse(label).fundamental_function(0.25) == pytest.approx(expected)

    def test_zero_and_clipping(self):
        space = RISpaceSpec.lebesgue(2.0)
        assert space.fundamental_function(0.0) == 0.0
        assert space.fundamental_function(3.0) == pytest.approx(1.0)


class TestNorm:
    """
    Test class for norms of the supported function types.
    """

    def test_step_norms(self, sample_step):
        assert RISpaceSpec.parse("L1").norm(sample_step) == pytest.approx(1.6)
        assert RISpaceSpec.parse("L2").norm(sample_step) == pytest.approx(2.0)
        assert RISpaceSpec.parse("Linf").norm(sample_step) == pytest.approx(3.0)

    def test_norms_are_rearrangement_invariant(self, sample_step):
        flipped = StepFunction([0.0, 0.3, 0.6, 0.9, 1.0], [0.0, -2.0, 3.0, 1.0])
        for label in ["L1", "L3", "Linf", "L(2,1)", "L(3,inf)", "Losc(inf,1)"]:
            space = RISpaceSpec.parse(label)
            assert space.norm(flipped) == pytest.approx(space.norm(sample_step))

    def test_power_curve_norms(self, sample_step):
        """
        Exact curve norms agree with the norm of the exact cell averages up
        to the averaging loss.
        """
        curve = maximal_average(sample_step)
        assert RISpaceSpec.parse("L1").norm(curve) == pytest.approx(curve.prefix(1.0))
        assert RISpaceSpec.parse("Linf").norm(curve) == pytest.approx(3.0)
        lorentz = RISpaceSpec.parse("L(1,1)").norm(curve)
        assert lorentz == pytest.approx(curve.prefix(1.0), rel=1e-8)

    def test_sampled_norms(self, interval_domain):
        f = interval_domain.sample(lambda x: x[:, 0])
        assert RISpaceSpec.parse("L1").norm(f) == pytest.approx(0.5)
        assert RISpaceSpec.parse("Linf").norm(f) == pytest.approx(63.0 / 64.0)

    def test_sampled_norm_with_weights(self, interval_domain):
        f = interval_domain.sample(lambda x: np.ones(len(x)))
        weights = np.linspace(1.0, 2.0, interval_domain.n_cells)
        weights /= weights.sum()
        assert RISpaceSpec.parse("L2").norm(f, weights) == pytest.approx(1.0)
