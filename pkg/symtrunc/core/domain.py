"""
Domain module for the symtrunc package.

This module contains the discretized model domains (interval, square, disk,
beta-cusp and s-John "room with a corridor") normalized to total measure 1,
functions sampled on their cells, finite-difference gradient magnitudes,
medians, truncations and rearrangements of sampled data.
"""

import math
import logging
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Dict, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from scipy.spatial import cKDTree

from symtrunc.core.stepfn import MonotoneStep
from symtrunc.core.validation import (
    SUPPORTED_SHAPES,
    check_finite,
    check_nonnegative,
    check_weights,
)

logger = logging.getLogger(__name__)

MIN_RESOLUTION = 8
S_JOHN_ROOM_MEASURE = 0.8


def _frozen(array: np.ndarray) -> np.ndarray:
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class GridDomain:
    """
    A lattice discretization of a domain with total measure 1.

    Attributes
    ----------
    shape : str
        Shape tag (interval, square, disk, beta_cusp, s_john).
    resolution : int
        Resolution passed to ``make_domain``.
    params : dict
        Shape parameters (``beta`` or ``s``).
    centers : np.ndarray
        Cell centers, shape (N, n).
    measures : np.ndarray
        Cell measures, summing to 1.
    lattice : np.ndarray
        Integer lattice coordinates of the cells, shape (N, n).
    neighbors : np.ndarray
        Neighbor indices, shape (N, n, 2); [..., 0] is the lower and
        [..., 1] the upper neighbor along each axis, -1 when absent.
    spacing : np.ndarray
        Lattice spacing per axis.
    center : np.ndarray
        Designated interior point.
    inscribed_ball_measure : float
        Measure of the largest grid-inscribed ball around ``center``.
    """

    shape: str
    resolution: int
    params: Dict[str, float]
    centers: np.ndarray
    measures: np.ndarray
    lattice: np.ndarray
    neighbors: np.ndarray
    spacing: np.ndarray
    center: np.ndarray
    inscribed_ball_measure: float
    index_grid: np.ndarray = field(repr=False)

    @property
    def n(self) -> int:
        return int(self.centers.shape[1])

    @property
    def n_cells(self) -> int:
        return int(self.centers.shape[0])

    @property
    def cell_measure(self) -> float:
        return float(np.min(self.measures))

    @cached_property
    def isolated_axis_count(self) -> int:
        """Number of (cell, axis) pairs without any neighbor."""
        return int(np.count_nonzero(np.all(self.neighbors < 0, axis=2)))

    @cached_property
    def ball_coordinate(self) -> np.ndarray:
        """
        Measure coordinate of the ball through each cell around ``center``.

        Cells are ordered by distance to the centre, ties by cell index; a
        cell receives the measure of all earlier cells plus half its own
        measure. This is the grid realization of gamma_n |x - x0|^n, and it
        makes each cell the midpoint of its own slot of (0, 1].
        """
        distance = np.linalg.norm(self.centers - self.center, axis=1)
        order = np.argsort(distance, kind="stable")
        sorted_measure = self.measures[order]
        coordinate = np.empty(self.n_cells)
        coordinate[order] = np.cumsum(sorted_measure) - 0.5 * sorted_measure
        return _frozen(coordinate)

    @cached_property
    def radial_coordinate(self) -> np.ndarray:
        """
        Ball measure coordinate shared by equidistant cells.

        A cell receives the measure of all strictly closer cells plus half
        the measure of its group of equidistant cells, so functions of this
        coordinate are exactly radial on the grid.
        """
        distance = np.linalg.norm(self.centers - self.center, axis=1)
        order = np.argsort(distance, kind="stable")
        sorted_distance = distance[order]
        tolerance = 1e-12 * max(1.0, float(sorted_distance[-1]))
        new_group = np.concatenate(([True], np.diff(sorted_distance) > tolerance))
        group_id = np.cumsum(new_group) - 1
        group_measure = np.bincount(group_id, weights=self.measures[order])
        group_start = np.concatenate(([0.0], np.cumsum(group_measure)[:-1]))
        coordinate = np.empty(self.n_cells)
        coordinate[order] = group_start[group_id] + 0.5 * group_measure[group_id]
        return _frozen(coordinate)

    def lookup(self, lattice_points: np.ndarray) -> np.ndarray:
        """Cell index at integer lattice points, -1 outside the domain."""
        points = np.asarray(lattice_points, dtype=int)
        inside = np.all((points >= 0) & (points < np.array(self.index_grid.shape)), axis=1)
        result = np.full(points.shape[0], -1, dtype=int)
        if np.any(inside):
            result[inside] = self.index_grid[tuple(points[inside].T)]
        return result

    def sample(self, func) -> "SampledFunction":
        """Sample ``func(centers)`` (one row per cell) on the domain."""
        return SampledFunction(self, np.asarray(func(self.centers), dtype=float))

    def to_dict(self, values: Optional[np.ndarray] = None) -> Dict[str, Any]:
        data = {
            "shape": self.shape,
            "n": self.n,
            "resolution": self.resolution,
            "params": dict(self.params),
            "cells": [
                {"center": center.tolist(), "measure": float(measure)}
                for center, measure in zip(self.centers, self.measures)
            ],
        }
        if values is not None:
            data["values"] = np.asarray(values, dtype=float).tolist()
        return data

    def __repr__(self) -> str:
        return f"GridDomain(shape={self.shape!r}, resolution={self.resolution}, n_cells={self.n_cells})"


@dataclass(frozen=True, eq=False)
class SampledFunction:
    """
    A function sampled at the cells of a GridDomain.

    Attributes
    ----------
    domain : GridDomain
        Domain carrying the samples.
    values : np.ndarray
        One value per cell.
    """

    domain: GridDomain
    values: np.ndarray

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        if values.shape != (self.domain.n_cells,):
            raise ValueError(
                f"expected {self.domain.n_cells} values for {self.domain!r}, got shape {values.shape}"
            )
        check_finite(values, "sampled values")
        object.__setattr__(self, "values", _frozen(values))

    def with_values(self, values: np.ndarray) -> "SampledFunction":
        return SampledFunction(self.domain, values)

    def shift(self, c: float) -> "SampledFunction":
        """Return f - c."""
        return self.with_values(self.values - c)

    def abs(self) -> "SampledFunction":
        return self.with_values(np.abs(self.values))

    @property
    def is_constant(self) -> bool:
        return bool(np.all(self.values == self.values[0]))

    def to_dict(self) -> Dict[str, Any]:
        return self.domain.to_dict(self.values)


def _build_lattice_domain(
    shape: str,
    resolution: int,
    params: Dict[str, float],
    axes: Sequence[np.ndarray],
    member: np.ndarray,
    center: Optional[np.ndarray],
) -> GridDomain:
    spacing = np.array([axis[1] - axis[0] for axis in axes], dtype=float)
    lattice = np.argwhere(member)
    n_cells = lattice.shape[0]
    if n_cells == 0:
        raise ValueError(f"shape {shape} has no cells at resolution {resolution}")
    centers = np.column_stack([axes[k][lattice[:, k]] for k in range(len(axes))])

    index_grid = np.full(member.shape, -1, dtype=int)
    index_grid[tuple(lattice.T)] = np.arange(n_cells)

    n = len(axes)
    neighbors = np.full((n_cells, n, 2), -1, dtype=int)
    for axis in range(n):
        for side, step in ((0, -1), (1, 1)):
            shifted = lattice.copy()
            shifted[:, axis] += step
            inside = (shifted[:, axis] >= 0) & (shifted[:, axis] < member.shape[axis])
            found = np.full(n_cells, -1, dtype=int)
            found[inside] = index_grid[tuple(shifted[inside].T)]
            neighbors[:, axis, side] = found

    # Uniform cells renormalized to total measure 1
    measures = np.full(n_cells, 1.0 / n_cells)

    # Distances to the centers of lattice cells outside the domain, including
    # one padding layer around the bounding box
    padded = np.pad(member, 1, constant_values=False)
    outside = np.argwhere(~padded) - 1
    outside_centers = np.column_stack(
        [axes[k][0] + outside[:, k] * spacing[k] for k in range(n)]
    )
    if center is None:
        tree = cKDTree(outside_centers)
        clearance, _ = tree.query(centers)
        center = centers[int(np.argmax(clearance))]
    center = np.asarray(center, dtype=float)
    rho = float(np.min(np.linalg.norm(outside_centers - center, axis=1)))
    inside_ball = np.linalg.norm(centers - center, axis=1) < rho
    sigma = float(min(1.0, measures[inside_ball].sum()))

    return GridDomain(
        shape=shape,
        resolution=resolution,
        params=dict(params),
        centers=_frozen(centers),
        measures=_frozen(measures),
        lattice=_frozen(lattice),
        neighbors=_frozen(neighbors),
        spacing=_frozen(spacing),
        center=_frozen(center.copy()),
        inscribed_ball_measure=sigma,
        index_grid=_frozen(index_grid),
    )


def _centers(lo: float, hi: float, count: int) -> np.ndarray:
    h = (hi - lo) / count
    return lo + (np.arange(count) + 0.5) * h


def make_domain(shape: str, resolution: int, params: Optional[Dict[str, float]] = None) -> GridDomain:
    """
    Build a discretized model domain with total measure 1.

    Parameters
    ----------
    shape : str
        One of 'interval', 'square', 'disk', 'beta_cusp', 's_john'.
    resolution : int
        Cells across the reference length (interval length, square side,
        disk diameter, cusp length, s-John room side); at least 8.
    params : dict, optional
        ``{'beta': b}`` (b >= 1) for beta_cusp, ``{'s': s}`` (s > 1) for
        s_john.

    Returns
    -------
    GridDomain

    Raises
    ------
    ValueError
        For unsupported shapes or parameters.
    """
    params = dict(params or {})
    if shape not in SUPPORTED_SHAPES:
        raise ValueError(f"Unsupported shape: {shape}")
    if not isinstance(resolution, (int, np.integer)) or resolution < MIN_RESOLUTION:
        raise ValueError(f"resolution must be an integer >= {MIN_RESOLUTION}, got {resolution}")
    resolution = int(resolution)

    if shape == "interval":
        xs = _centers(0.0, 1.0, resolution)
        member = np.ones(resolution, dtype=bool)
        domain = _build_lattice_domain(shape, resolution, params, [xs], member, np.array([0.5]))

    elif shape == "square":
        xs = _centers(-0.5, 0.5, resolution)
        member = np.ones((resolution, resolution), dtype=bool)
        domain = _build_lattice_domain(shape, resolution, params, [xs, xs], member, np.zeros(2))

    elif shape == "disk":
        radius = 1.0 / math.sqrt(math.pi)
        xs = _centers(-radius, radius, resolution)
        X, Y = np.meshgrid(xs, xs, indexing="ij")
        member = X**2 + Y**2 <= radius**2
        domain = _build_lattice_domain(shape, resolution, params, [xs, xs], member, np.zeros(2))

    elif shape == "beta_cusp":
        beta = float(params.get("beta", 2.0))
        if beta < 1:
            raise ValueError(f"beta_cusp requires beta >= 1, got {beta}")
        params["beta"] = beta
        xs = _centers(0.0, 1.0, resolution)
        ys = _centers(-1.0, 1.0, 2 * resolution)
        X, Y = np.meshgrid(xs, ys, indexing="ij")
        member = np.abs(Y) < X**beta
        domain = _build_lattice_domain(shape, resolution, params, [xs, ys], member, None)

    else:
        s = float(params.get("s", 1.5))
        if s <= 1:
            raise ValueError(f"s_john requires s > 1, got {s}")
        params["s"] = s
        side = math.sqrt(S_JOHN_ROOM_MEASURE)
        length = side
        # corridor of measure 1 - room measure whose half-width grows like
        # (distance to the tip)^s towards the room
        half_width = (1.0 - S_JOHN_ROOM_MEASURE) * (s + 1.0) / (2.0 * length)
        xs = _centers(-length, side, 2 * resolution)
        ys = _centers(-side / 2.0, side / 2.0, resolution)
        X, Y = np.meshgrid(xs, ys, indexing="ij")
        room = X > 0
        profile = half_width * np.clip((X + length) / length, 0.0, None) ** s
        member = room | (np.abs(Y) < profile)
        domain = _build_lattice_domain(
            shape, resolution, params, [xs, ys], member, np.array([side / 2.0, 0.0])
        )

    logger.info(
        f"Built {shape} domain: {domain.n_cells} cells, sigma = {domain.inscribed_ball_measure:.4f}, "
        f"isolated axis pairs = {domain.isolated_axis_count}"
    )
    return domain


def domain_from_dict(data: Dict[str, Any]) -> Tuple[GridDomain, Optional[np.ndarray]]:
    """
    Rebuild a domain (and optional values) from its JSON dictionary.

    The lattice is regenerated from shape, resolution and params and checked
    against the serialized cell centers.
    """
    try:
        domain = make_domain(data["shape"], int(data["resolution"]), data.get("params", {}))
    except KeyError as e:
        raise ValueError(f"domain JSON is missing field {e}")
    cells = data.get("cells")
    if cells is not None:
        centers = np.array([cell["center"] for cell in cells], dtype=float)
        if centers.shape != domain.centers.shape or not np.allclose(centers, domain.centers, atol=1e-12):
            raise ValueError("serialized cell centers do not match the regenerated domain")
    values = data.get("values")
    return domain, None if values is None else np.asarray(values, dtype=float)


def mazya_exponent(shape: str, params: Optional[Dict[str, float]] = None, n: int = 2) -> float:
    """
    Maz'ya class exponent of a catalog shape.

    Parameters
    ----------
    shape : str
        Catalog shape.
    params : dict, optional
        ``beta`` or ``s``.
    n : int, optional
        Dimension (1 for the interval).

    Returns
    -------
    float
        1 - 1/n for interval/square/disk, (n-1)s/n for s_john,
        beta(n-1)/(beta(n-1)+1) for beta_cusp. The admissible Poincare
        exponent is its reciprocal.
    """
    params = params or {}
    if shape == "interval":
        return 0.0
    if shape in ("square", "disk"):
        return 1.0 - 1.0 / n
    if shape == "s_john":
        return (n - 1) * float(params.get("s", 1.5)) / n
    if shape == "beta_cusp":
        beta = float(params.get("beta", 2.0))
        return beta * (n - 1) / (beta * (n - 1) + 1.0)
    raise ValueError(f"Unsupported shape: {shape}")


def gradient_magnitude(f: SampledFunction) -> SampledFunction:
    """
    Finite-difference gradient magnitude |grad f|.

    Central differences are used where both neighbors exist along an axis,
    one-sided differences at boundary cells and 0 on axes without any
    neighbor (counted in ``domain.isolated_axis_count``).

    Parameters
    ----------
    f : SampledFunction
        Function to differentiate.

    Returns
    -------
    SampledFunction
    """
    domain = f.domain
    values = f.values
    squared = np.zeros(domain.n_cells)
    for axis in range(domain.n):
        lower = domain.neighbors[:, axis, 0]
        upper = domain.neighbors[:, axis, 1]
        h = domain.spacing[axis]
        has_lower, has_upper = lower >= 0, upper >= 0
        f_lower = np.where(has_lower, values[np.maximum(lower, 0)], values)
        f_upper = np.where(has_upper, values[np.maximum(upper, 0)], values)
        width = np.where(has_lower & has_upper, 2.0 * h, h)
        derivative = np.where(has_lower | has_upper, (f_upper - f_lower) / width, 0.0)
        squared += derivative**2
    if domain.isolated_axis_count:
        logger.warning(
            f"{domain.isolated_axis_count} isolated (cell, axis) pairs on {domain!r}; derivative set to 0"
        )
    return f.with_values(np.sqrt(squared))


def _measure(f: SampledFunction, weights: Optional[np.ndarray]) -> np.ndarray:
    if weights is None:
        return f.domain.measures
    return check_weights(weights, f.domain.n_cells)


def median_constant(f: SampledFunction, weights: Optional[np.ndarray] = None) -> float:
    """
    Median r_f with measure{f >= r} >= 1/2 and measure{f <= r} >= 1/2.

    When the admissible set is an interval its left endpoint is returned:
    the smallest sampled value whose lower cumulative measure reaches 1/2.

    Parameters
    ----------
    f : SampledFunction
        Sampled function.
    weights : np.ndarray, optional
        Per-cell measure (cell measures by default).

    Returns
    -------
    float
    """
    measure = _measure(f, weights)
    order = np.argsort(f.values, kind="stable")
    cumulative = np.cumsum(measure[order])
    half = 0.5 * cumulative[-1]
    position = int(np.searchsorted(cumulative, half - 1e-12 * cumulative[-1], side="left"))
    return float(f.values[order][min(position, f.domain.n_cells - 1)])


def mean_value(f: SampledFunction, weights: Optional[np.ndarray] = None) -> float:
    """
    Measure-weighted average f_Omega.

    The weighted sum is correctly rounded (math.fsum), so the result does
    not depend on summation order.
    """
    measure = _measure(f, weights)
    return math.fsum(measure * f.values) / math.fsum(measure)


def truncate(f: SampledFunction, t1: float, t2: float) -> SampledFunction:
    """
    Truncation f_{t1}^{t2} of a nonnegative function.

    Parameters
    ----------
    f : SampledFunction
        Nonnegative function.
    t1, t2 : float
        Levels with 0 <= t1 < t2.

    Returns
    -------
    SampledFunction
        t2 - t1 where f > t2, f - t1 where t1 < f <= t2, 0 where f <= t1.

    Raises
    ------
    ValueError
        If t1 >= t2, t1 < 0 or f has negative values.
    """
    if not (0 <= t1 < t2):
        raise ValueError(f"truncation levels must satisfy 0 <= t1 < t2, got ({t1}, {t2})")
    check_nonnegative(f.values, "truncated function")
    v = f.values
    return f.with_values(np.where(v > t2, t2 - t1, np.where(v > t1, v - t1, 0.0)))


def layer_cake(f: SampledFunction, levels: Sequence[float]) -> SampledFunction:
    """
    Sum of the truncations between consecutive levels, in level order.

    With levels 0 = tau_0 < ... < tau_k >= max f the result equals f.
    """
    levels = np.asarray(levels, dtype=float)
    if levels[0] != 0.0 or np.any(np.diff(levels) <= 0):
        raise ValueError("levels must start at 0 and increase strictly")
    if levels[-1] < np.max(f.values):
        raise ValueError("last level must be at least max f")
    total = np.zeros(f.domain.n_cells)
    for lower, upper in zip(levels[:-1], levels[1:]):
        total = total + truncate(f, lower, upper).values
    return f.with_values(total)


def rearrange_sampled(f: SampledFunction, weights: Optional[np.ndarray] = None) -> MonotoneStep:
    """
    Decreasing rearrangement of |f| with respect to a cell measure.

    Parameters
    ----------
    f : SampledFunction
        Sampled function.
    weights : np.ndarray, optional
        Positive per-cell measure summing to 1 (cell measures by default).

    Returns
    -------
    MonotoneStep
        f* on (0, 1]; ties keep cell order and equal values are merged.
    """
    measure = _measure(f, weights)
    magnitudes = np.abs(f.values)
    order = np.argsort(-magnitudes, kind="stable")
    return MonotoneStep.from_sorted(measure[order], magnitudes[order])


def check_median_halving(w: SampledFunction, weights: Optional[np.ndarray] = None) -> Dict[str, Any]:
    """
    Exhaustive check of the median halving lemma.

    For w >= 0 with measure{w = 0} >= 1/2 and every t > 0:
    measure{w >= t} <= 2 inf_c measure{|w - c| >= t/2}. Only the distinct
    positive values of w need to be checked as levels, and the infimum over
    c is attained in the open gaps between the points w_i +- t/2.

    Returns
    -------
    dict
        ``max_ratio`` (lhs / rhs, <= 1 when the lemma holds), ``levels`` and
        ``holds``.
    """
    measure = _measure(w, weights)
    check_nonnegative(w.values, "w")
    if math.fsum(measure[w.values == 0]) < 0.5 - 1e-12:
        raise ValueError("median halving requires measure{w = 0} >= 1/2")
    levels = np.unique(w.values[w.values > 0])
    max_ratio = 0.0
    for t in levels:
        lhs = math.fsum(measure[w.values >= t])
        ends = np.unique(np.concatenate((w.values - t / 2.0, w.values + t / 2.0)))
        candidates = np.concatenate(
            ([ends[0] - 1.0], 0.5 * (ends[:-1] + ends[1:]), [ends[-1] + 1.0])
        )
        far = np.abs(w.values[None, :] - candidates[:, None]) >= t / 2.0
        rhs = 2.0 * float(np.min(far @ measure))
        ratio = math.inf if rhs == 0 else lhs / rhs
        max_ratio = max(max_ratio, ratio)
    return {"max_ratio": max_ratio, "levels": int(levels.size), "holds": bool(max_ratio <= 1.0 + 1e-12)}


def split_at(f: SampledFunction, r: float) -> Tuple[SampledFunction, SampledFunction]:
    """u = (f - r) on {f >= r} and v = (r - f) on {f <= r}, zero elsewhere."""
    d = f.values - r
    u = np.where(f.values >= r, d, 0.0)
    v = np.where(f.values <= r, -d, 0.0)
    return f.with_values(u), f.with_values(v)


def check_splitting_identity(f: SampledFunction, r: Optional[float] = None, n_levels: int = 16) -> bool:
    """
    Check |f - r| = u + v pointwise and the level-set identity
    {b > u+v >= a} = {b > u >= a} union {b > v >= a} for level pairs a < b
    taken from the quantiles of |f - r|.
    """
    if r is None:
        r = median_constant(f)
    u, v = split_at(f, r)
    total = u.values + v.values
    if not np.array_equal(np.abs(f.values - r), total):
        return False
    levels = np.unique(np.quantile(total, np.linspace(0.0, 1.0, n_levels)))
    for i, a in enumerate(levels):
        for b in levels[i + 1 :]:
            joint = (total >= a) & (total < b)
            separate = ((u.values >= a) & (u.values < b)) | ((v.values >= a) & (v.values < b))
            if a > 0 and not np.array_equal(joint, separate):
                return False
    return True


def cell_frame(f: SampledFunction, extra: Optional[Dict[str, np.ndarray]] = None):
    """Cell-wise fields as a DataFrame (centers, measure, value, extras) for CSV export."""
    columns: Dict[str, np.ndarray] = {}
    for axis in range(f.domain.n):
        columns["xyz"[axis]] = f.domain.centers[:, axis]
    columns["measure"] = f.domain.measures
    columns["value"] = f.values
    for key, values in (extra or {}).items():
        columns[key] = np.asarray(values)
    return pd.DataFrame(columns)
