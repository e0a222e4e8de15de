"""
Unit tests for the domain module.
"""

import math

import numpy as np
import pytest

from symtrunc.core.domain import (
    SampledFunction,
    cell_frame,
    check_median_halving,
    check_splitting_identity,
    domain_from_dict,
    gradient_magnitude,
    layer_cake,
    make_domain,
    mazya_exponent,
    mean_value,
    median_constant,
    rearrange_sampled,
    split_at,
    truncate,
)


class TestMakeDomain:
    """
    Test class for the domain catalog.
    """

    @pytest.mark.parametrize(
        "shape, params",
        [
            ("interval", None),
            ("square", None),
            ("disk", None),
            ("beta_cusp", {"beta": 2.0}),
            ("s_john", {"s": 1.5}),
        ],
    )
    def test_unit_measure(self, shape, params):
        """
        Every catalog shape carries total measure 1 and a positive
        inscribed ball.
        """
        domain = make_domain(shape, 16, params)
        assert math.fsum(domain.measures) == pytest.approx(1.0, abs=1e-12)
        assert 0.0 < domain.inscribed_ball_measure <= 1.0
        assert domain.centers.shape == (domain.n_cells, domain.n)

    def test_dimensions(self, interval_domain, square_domain):
        assert interval_domain.n == 1
        assert interval_domain.n_cells == 32
        assert square_domain.n == 2
        assert square_domain.n_cells == 256

    @pytest.mark.parametrize(
        "shape, resolution, params",
        [
            ("hexagon", 16, None),
            ("square", 4, None),
            ("square", 16.0, None),
            ("beta_cusp", 16, {"beta": 0.5}),
            ("s_john", 16, {"s": 1.0}),
        ],
    )
    def test_rejects_bad_input(self, shape, resolution, params):
        with pytest.raises(ValueError):
            make_domain(shape, resolution, params)

    def test_dict_round_trip(self, disk_domain):
        values = np.arange(disk_domain.n_cells, dtype=float)
        domain, restored = domain_from_dict(disk_domain.to_dict(values))
        assert domain.n_cells == disk_domain.n_cells
        np.testing.assert_allclose(domain.centers, disk_domain.centers)
        np.testing.assert_array_equal(restored, values)

    def test_dict_mismatch(self, square_domain):
        data = square_domain.to_dict()
        data["resolution"] = 20
        with pytest.raises(ValueError, match="do not match"):
            domain_from_dict(data)

    def test_ball_coordinate_is_slot_midpoint(self, disk_domain):
        """
        The ball coordinates are the midpoints of consecutive cell slots.
        """
        coordinate = np.sort(disk_domain.ball_coordinate)
        expected = (np.arange(disk_domain.n_cells) + 0.5) / disk_domain.n_cells
        np.testing.assert_allclose(coordinate, expected)

    def test_radial_coordinate_is_symmetric(self, square_domain):
        mirrored = square_domain.lookup(
            np.column_stack((15 - square_domain.lattice[:, 0], square_domain.lattice[:, 1]))
        )
        assert np.all(mirrored >= 0)
        np.testing.assert_allclose(
            square_domain.radial_coordinate, square_domain.radial_coordinate[mirrored]
        )

    def test_lookup_outside(self, square_domain):
        np.testing.assert_array_equal(square_domain.lookup(np.array([[-1, 0], [16, 3]])), [-1, -1])


class TestMazyaExponent:
    """
    Test class for the Maz'ya exponent catalog.
    """

    @pytest.mark.parametrize(
        "shape, params, expected",
        [
            ("interval", None, 0.0),
            ("square", None, 0.5),
            ("disk", None, 0.5),
            ("s_john", {"s": 1.5}, 0.75),
            ("beta_cusp", {"beta": 2.0}, 2.0 / 3.0),
        ],
    )
    def test_values(self, shape, params, expected):
        assert mazya_exponent(shape, params) == pytest.approx(expected)

    def test_unknown_shape(self):
        with pytest.raises(ValueError):
            mazya_exponent("torus")


class TestSampledFunction:
    """
    Test class for sampled functions and their calculus.
    """

    def test_wrong_length(self, square_domain):
        with pytest.raises(ValueError, match="expected 256 values"):
            SampledFunction(square_domain, np.zeros(10))

    def test_rejects_nan(self, interval_domain):
        values = np.zeros(interval_domain.n_cells)
        values[3] = np.nan
        with pytest.raises(ValueError):
            SampledFunction(interval_domain, values)

    @pytest.mark.parametrize("fixture", ["interval_domain", "square_domain"])
    def test_gradient_of_coordinate(self, fixture, request):
        """
        |grad x| = 1 with both central and one-sided differences.
        """
        domain = request.getfixturevalue(fixture)
        f = domain.sample(lambda x: x[:, 0])
        np.testing.assert_allclose(gradient_magnitude(f).values, 1.0)

    def test_gradient_of_affine_function(self):
        domain = make_domain("square", 64)
        f = domain.sample(lambda x: x[:, 0] + 2.0 * x[:, 1])
        interior = np.all(domain.neighbors >= 0, axis=(1, 2))
        assert interior.sum() == 62 * 62
        np.testing.assert_allclose(gradient_magnitude(f).values[interior], math.sqrt(5.0), atol=1e-8)

    def test_gradient_of_constant(self, disk_domain):
        f = disk_domain.sample(lambda x: np.full(len(x), 2.0))
        assert np.all(gradient_magnitude(f).values == 0.0)

    def test_median_and_mean(self, interval_domain):
        f = interval_domain.sample(lambda x: x[:, 0])
        r = median_constant(f)
        assert r == pytest.approx(15.5 / 32)
        assert np.mean(f.values >= r) >= 0.5
        assert np.mean(f.values <= r) >= 0.5
        assert mean_value(f) == pytest.approx(0.5)

    def test_rearrangement_is_equimeasurable(self, disk_domain, rng):
        f = disk_domain.sample(lambda x: rng.normal(size=len(x)))
        f_star = rearrange_sampled(f)
        assert f_star.integral() == pytest.approx(math.fsum(np.abs(f.values) * disk_domain.measures))
        assert f_star.sup == pytest.approx(np.max(np.abs(f.values)))


class TestTruncation:
    """
    Test class for truncations and layer-cake sums.
    """

    def test_truncate(self, interval_domain):
        f = interval_domain.sample(lambda x: x[:, 0])
        g = truncate(f, 0.25, 0.5)
        assert np.max(g.values) == pytest.approx(0.25)
        assert np.min(g.values) == 0.0
        np.testing.assert_allclose(g.values, np.clip(f.values - 0.25, 0.0, 0.25))

    @pytest.mark.parametrize("t1, t2", [(0.5, 0.5), (0.6, 0.2), (-0.1, 0.3)])
    def test_rejects_bad_levels(self, interval_domain, t1, t2):
        f = interval_domain.sample(lambda x: x[:, 0])
        with pytest.raises(ValueError):
            truncate(f, t1, t2)

    def test_rejects_negative_function(self, interval_domain):
        f = interval_domain.sample(lambda x: x[:, 0] - 0.5)
        with pytest.raises(ValueError):
            truncate(f, 0.0, 1.0)

    def test_layer_cake(self, square_domain, rng):
        f = square_domain.sample(lambda x: np.abs(rng.normal(size=len(x))))
        levels = np.concatenate(([0.0], np.sort(rng.uniform(0.1, 1.0, 5)), [np.max(f.values)]))
        np.testing.assert_allclose(layer_cake(f, levels).values, f.values, atol=1e-12)

    def test_layer_cake_rejects_short_levels(self, interval_domain):
        f = interval_domain.sample(lambda x: x[:, 0])
        with pytest.raises(ValueError):
            layer_cake(f, [0.0, 0.5])


class TestMedianSplitting:
    """
    Test class for the median halving and splitting identities.
    """

    def test_median_halving(self, square_domain):
        f = square_domain.sample(lambda x: x[:, 0] + 0.3 * x[:, 1] ** 2)
        w = split_at(f, median_constant(f))[0]
        result = check_median_halving(w)
        assert result["holds"]
        assert result["levels"] > 0
        assert result["max_ratio"] <= 1.0 + 1e-12

    def test_median_halving_requires_zero_half(self, interval_domain):
        w = interval_domain.sample(lambda x: x[:, 0])
        with pytest.raises(ValueError):
            check_median_halving(w)

    def test_splitting_identity(self, disk_domain, rng):
        f = disk_domain.sample(lambda x: rng.normal(size=len(x)))
        assert check_splitting_identity(f)
        u, v = split_at(f, 0.0)
        assert np.all(u.values * v.values == 0.0)

    def test_cell_frame(self, square_domain):
        f = square_domain.sample(lambda x: x[:, 1])
        frame = cell_frame(f, {"gradient": gradient_magnitude(f).values})
        assert list(frame.columns) == ["x", "y", "measure", "value", "gradient"]
        assert len(frame) == square_domain.n_cells
