"""
Unit tests for the majorization module.
"""

import json
import logging
import math
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, seed, settings
from hypothesis import strategies as st

from symtrunc.core.majorize import (
    HypothesisConstants,
    IntervalFamily,
    audit,
    certificate_to_json,
    check_hypotheses,
    dd_bound,
    interval_bound_certificate,
    majorization_constant,
    random_family,
    random_pair,
    verify_certificate,
)
from symtrunc.core.stepfn import StepFunction


@pytest.fixture
def decreasing_h():
    return StepFunction([0.0, 0.2, 0.7, 1.0], [3.0, 1.0, 0.5])


class TestIntervalFamily:
    """
    Test class for interval families.
    """

    def test_properties(self, sample_interval_family):
        assert sample_interval_family.m == 2
        assert sample_interval_family.total_length == pytest.approx(0.79)
        np.testing.assert_allclose(sample_interval_family.log_ratios, [math.log(50.0), math.log(1.5)])

    @pytest.mark.parametrize(
        "pairs",
        [[(0.0, 0.5)], [(0.3, 0.2)], [(0.1, 0.5), (0.4, 0.9)], []],
    )
    def test_rejects_bad_families(self, pairs):
        with pytest.raises(ValueError):
            IntervalFamily.from_pairs(pairs)

    def test_touching_intervals_allowed(self):
        assert IntervalFamily.from_pairs([(0.1, 0.5), (0.5, 1.2)]).m == 2

    def test_dict_round_trip(self, sample_interval_family):
        family = IntervalFamily.from_dict(sample_interval_family.to_dict())
        np.testing.assert_array_equal(family.a, sample_interval_family.a)
        with pytest.raises(ValueError, match="intervals"):
            IntervalFamily.from_dict({"pairs": []})


class TestHypotheses:
    """
    Test class for the exact hypothesis and majorization constants.
    """

    def test_identical_functions(self, decreasing_h):
        constants = check_hypotheses(decreasing_h, decreasing_h)
        assert constants.C1 == pytest.approx(1.0)
        assert constants.C2 == pytest.approx(1.0)
        assert majorization_constant(decreasing_h, decreasing_h) == pytest.approx(1.0)

    def test_permutation_has_constant_one(self, decreasing_h):
        g = StepFunction([0.0, 0.3, 0.8, 1.0], [0.5, 1.0, 3.0])
        assert majorization_constant(g, decreasing_h) == pytest.approx(1.0)

    def test_vanishing_h(self):
        constants = check_hypotheses(StepFunction.constant(1.0), StepFunction.constant(0.0))
        assert not constants.finite
        assert majorization_constant(StepFunction.constant(1.0), StepFunction.constant(0.0)) == math.inf

    def test_rejects_negative(self, sample_step, decreasing_h):
        with pytest.raises(ValueError):
            check_hypotheses(sample_step, decreasing_h)

    @seed(20240606)
    @settings(max_examples=150, deadline=None)
    @given(st.integers(min_value=0, max_value=2**32 - 1))
    def test_constant_four(self, pair_seed):
        """
        int_0^t g* <= 4 max(C1, C2) int_0^t h* for random pairs.
        """
        g, h = random_pair(np.random.default_rng(pair_seed))
        constants = check_hypotheses(g, h)
        assert constants.finite
        if constants.constant > 0:
            assert majorization_constant(g, h) <= 4.0 * constants.constant * (1 + 1e-9)


class TestCertificate:
    """
    Test class for certificates and their independent checker.
    """

    def test_split_branch(self, decreasing_h, sample_interval_family):
        certificate = interval_bound_certificate(decreasing_h, decreasing_h, sample_interval_family)
        assert certificate.branch == "split_j0"
        assert certificate.j0 == 0
        assert certificate.c_split == pytest.approx(0.5 * math.exp(-(2.0 - math.log(1.5))), rel=1e-9)
        assert certificate.c_split == pytest.approx(0.1014, abs=1e-3)
        assert certificate.log_sum <= 2.0
        assert certificate.valid
        assert verify_certificate(certificate, decreasing_h, decreasing_h, sample_interval_family)

    def test_perturbed_split_fails(self, decreasing_h, sample_interval_family):
        """
        Moving c_split to 0.02 pushes the log-sum to about 3.62.
        """
        certificate = interval_bound_certificate(decreasing_h, decreasing_h, sample_interval_family)
        check = verify_certificate(
            replace(certificate, c_split=0.02), decreasing_h, decreasing_h, sample_interval_family
        )
        assert not check
        assert check.violated == "dd1"

    def test_direct_branch(self, decreasing_h):
        family = IntervalFamily.from_pairs([(0.5, 0.6)])
        certificate = interval_bound_certificate(decreasing_h, decreasing_h, family)
        assert certificate.branch == "direct_j1"
        assert [bound.name for bound in certificate.sub_bounds] == ["dd", "final_4c"]
        assert verify_certificate(certificate, decreasing_h, decreasing_h, family)

    @pytest.mark.parametrize(
        "changes, violated",
        [
            ({"branch": "direct_j1"}, "branch"),
            ({"branch": "other"}, "branch"),
            ({"c_split": 0.7}, "c_range"),
            ({"log_sum": 1.5}, "log_sum"),
            ({"constants": HypothesisConstants(0.5, 0.5)}, "hypotheses"),
        ],
    )
    def test_tampering_is_detected(self, decreasing_h, sample_interval_family, changes, violated):
        certificate = interval_bound_certificate(decreasing_h, decreasing_h, sample_interval_family)
        check = verify_certificate(replace(certificate, **changes), decreasing_h, decreasing_h, sample_interval_family)
        assert check.violated == violated

    def test_claimed_constants_too_small(self, decreasing_h, sample_interval_family):
        with pytest.raises(ValueError, match="hypotheses violated"):
            interval_bound_certificate(
                decreasing_h, decreasing_h, sample_interval_family, HypothesisConstants(0.5, 0.5)
            )

    def test_vanishing_h_has_no_certificate(self, sample_interval_family):
        with pytest.raises(ValueError):
            interval_bound_certificate(
                StepFunction.constant(1.0), StepFunction.constant(0.0), sample_interval_family
            )

    def test_json(self, decreasing_h, sample_interval_family):
        certificate = interval_bound_certificate(decreasing_h, decreasing_h, sample_interval_family)
        data = json.loads(certificate_to_json(certificate))
        assert data["branch"] == "split_j0"
        assert [bound["name"] for bound in data["sub_bounds"]] == ["head", "dd", "final_4c"]
        assert data["constants"] == {"C1": pytest.approx(1.0), "C2": pytest.approx(1.0)}


class TestTailBound:
    """
    Test class for the logarithmic tail estimate.
    """

    def test_holds_for_every_tail(self, decreasing_h, sample_interval_family):
        for j in range(sample_interval_family.m):
            lhs, rhs = dd_bound(decreasing_h, decreasing_h, sample_interval_family, j)
            assert lhs <= rhs

    def test_rejects_index(self, decreasing_h, sample_interval_family):
        with pytest.raises(ValueError):
            dd_bound(decreasing_h, decreasing_h, sample_interval_family, 2)


class TestAudit:
    """
    Test class for the randomized audit.
    """

    def test_generators(self):
        rng = np.random.default_rng(7)
        for _ in range(20):
            g, h = random_pair(rng)
            assert np.all(g.values >= 0) and np.all(h.values > 0)
            family = random_family(rng)
            assert np.all(family.a < family.b)

    def test_small_audit_passes(self):
        summary = audit(n_pairs=25, seed=3)
        assert summary["pass"]
        assert summary["failures"] == []
        assert summary["max_ratio"] <= 4.0
        assert summary["certificates_valid"] == summary["certificates"]
        assert sum(summary["branches"].values()) == summary["certificates"]

    def test_audit_is_reproducible(self):
        assert audit(n_pairs=5, seed=11, spaces=["L1"]) == audit(n_pairs=5, seed=11, spaces=["L1"])

    def test_memory_monitoring_leaves_summary_unchanged(self, caplog):
        with caplog.at_level(logging.DEBUG, logger="symtrunc.utils.progress"):
            monitored = audit(n_pairs=5, seed=11, spaces=["L1"], monitor_memory=True)
        assert monitored == audit(n_pairs=5, seed=11, spaces=["L1"])
        assert "majorization audit: memory max" in caplog.text

    def test_rejects_empty_audit(self):
        with pytest.raises(ValueError):
            audit(n_pairs=0)
