"""
Symmetrization module for the symtrunc package.

This module contains the spherical decreasing rearrangement f°, the
Polya-Szego comparison of gradient rearrangements, the X-modulus of
continuity computed from lattice translations, and the fundamental-function
corollary that bounds oscillations by the modulus of continuity.
"""

import math
import logging
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from scipy import optimize

from symtrunc.core.domain import (
    GridDomain,
    SampledFunction,
    gradient_magnitude,
    make_domain,
    mean_value,
    median_constant,
    rearrange_sampled,
)
from symtrunc.core.spaces import RISpaceSpec
from symtrunc.core.stepfn import oscillation
from symtrunc.utils.statistics import log_grid

logger = logging.getLogger(__name__)

__all__ = [
    "RISpaceSpec",
    "spherical_rearrangement",
    "polya_szego_check",
    "modulus_of_continuity",
    "modulus_curve",
    "corollary_check",
    "modulus_symmetrization_check",
    "nonexpansivity_constant",
]

POLYA_SHAPES = ("interval", "square", "disk")
LENGTH_TOLERANCE = 1e-9


def ball_domain(n: int, resolution: int) -> GridDomain:
    """Ball grid B with |B| = 1: the unit-measure disk in 2D, the interval in 1D."""
    if n == 1:
        return make_domain("interval", resolution)
    if n == 2:
        return make_domain("disk", resolution)
    raise ValueError(f"no ball grid in dimension {n}")


def spherical_rearrangement(
    f: SampledFunction,
    ball: Optional[GridDomain] = None,
    weights: Optional[np.ndarray] = None,
) -> SampledFunction:
    """
    Spherical decreasing rearrangement f°(x) = f*(gamma_n |x|^n).

    Parameters
    ----------
    f : SampledFunction
        Function on any domain.
    ball : GridDomain, optional
        Ball grid of matching dimension; defaults to a ball grid with the
        resolution of f's domain.
    weights : np.ndarray, optional
        Measure used to rearrange f.

    Returns
    -------
    SampledFunction
        Radially nonincreasing function on the ball grid.

    Raises
    ------
    ValueError
        If the ball grid dimension differs from f's.
    """
    if ball is None:
        ball = ball_domain(f.domain.n, f.domain.resolution)
    if ball.n != f.domain.n:
        raise ValueError(f"dimension mismatch: f lives in R^{f.domain.n}, ball grid in R^{ball.n}")
    f_star = rearrange_sampled(f, weights)
    return SampledFunction(ball, f_star(ball.ball_coordinate))


@dataclass(frozen=True, eq=False)
class PolyaSzegoResult:
    """Outcome of a Polya-Szego comparison."""

    measured_constant: float
    norm_constant: float
    c: float
    degenerate: bool
    curve: pd.DataFrame

    def to_dict(self) -> Dict[str, object]:
        return {
            "measured_constant": self.measured_constant,
            "norm_constant": self.norm_constant,
            "c": self.c,
            "degenerate": self.degenerate,
        }


def default_t_grid(domain: GridDomain, upper: float = 1.0, n_points: int = 200) -> np.ndarray:
    """Logarithmic t-grid on [cell measure, upper]."""
    return log_grid(domain.cell_measure, upper, n_points)


def polya_szego_check(
    f: SampledFunction,
    space: Optional[RISpaceSpec] = None,
    c: Optional[float] = None,
    t_grid: Optional[np.ndarray] = None,
    ball: Optional[GridDomain] = None,
) -> PolyaSzegoResult:
    """
    Compare prefix integrals of |grad (f - c)°|* and |grad f|*.

    Parameters
    ----------
    f : SampledFunction
        Function on a square, disk or interval.
    space : RISpaceSpec, optional
        Space for the implied norm constant (L1 by default).
    c : float, optional
        Shift; the median r_f by default.
    t_grid : np.ndarray, optional
        Evaluation points; logarithmic on [cell measure, 1] by default.
    ball : GridDomain, optional
        Ball grid for f°.

    Returns
    -------
    PolyaSzegoResult
        Supremum of the prefix-integral ratio and
        ||grad (f-c)°||_X / ||grad f||_X. A constant f gives a degenerate
        result with constant 0.
    """
    if f.domain.shape not in POLYA_SHAPES:
        raise ValueError(f"Polya-Szego comparison needs a square, disk or interval, got {f.domain.shape}")
    space = space or RISpaceSpec.lebesgue(1.0)
    c = median_constant(f) if c is None else float(c)
    t = default_t_grid(f.domain) if t_grid is None else np.asarray(t_grid, dtype=float)

    gradient = gradient_magnitude(f)
    if not np.any(gradient.values > 0):
        logger.warning("Polya-Szego check on a function with vanishing gradient; constant set to 0")
        empty = pd.DataFrame({"t": t, "lhs": 0.0, "rhs": 0.0, "ratio": 0.0})
        return PolyaSzegoResult(0.0, 0.0, c, True, empty)

    symmetric = spherical_rearrangement(f.shift(c), ball)
    symmetric_gradient = gradient_magnitude(symmetric)
    lhs = rearrange_sampled(symmetric_gradient).prefix_integral(t)
    rhs = rearrange_sampled(gradient).prefix_integral(t)
    ratio = np.where(rhs > 0, lhs / np.where(rhs > 0, rhs, 1.0), 0.0)

    norm_constant = space.norm(symmetric_gradient) / space.norm(gradient)
    curve = pd.DataFrame({"t": t, "lhs": lhs, "rhs": rhs, "ratio": ratio})
    result = PolyaSzegoResult(float(np.max(ratio)), float(norm_constant), c, False, curve)
    logger.info(f"Polya-Szego on {f.domain!r}: ratio {result.measured_constant:.4f}, norm {norm_constant:.4f}")
    return result


def default_directions(n: int) -> List[Tuple[int, ...]]:
    """Grid axes in both orientations, plus the diagonals in 2D."""
    if n == 1:
        return [(1,), (-1,)]
    return [(1, 0), (-1, 0), (0, 1), (0, -1), (1, 1), (-1, -1), (1, -1), (-1, 1)]


def _magnitudes(k_max: int, n_magnitudes: Optional[int]) -> np.ndarray:
    if n_magnitudes is None or k_max <= n_magnitudes:
        return np.arange(1, k_max + 1)
    return np.unique(np.round(np.geomspace(1, k_max, n_magnitudes)).astype(int))


def _translation_table(
    f: SampledFunction,
    space: RISpaceSpec,
    max_length: float,
    directions: Optional[Sequence[Tuple[int, ...]]] = None,
    n_magnitudes: Optional[int] = None,
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Norms of (f(. + h) - f) on Omega(h) for lattice translations h.

    Omega(h) keeps the cells whose whole lattice segment x, x + d, ...,
    x + k d lies in the domain. Returns the translation lengths and norms.
    """
    domain = f.domain
    directions = directions or default_directions(domain.n)
    lengths: List[float] = []
    norms: List[float] = []
    for direction in directions:
        step = np.asarray(direction, dtype=int)
        step_length = float(np.linalg.norm(step * domain.spacing))
        k_max = int(math.floor(max_length / step_length * (1 + LENGTH_TOLERANCE)))
        if k_max < 1:
            continue
        wanted = set(_magnitudes(k_max, n_magnitudes).tolist())
        valid = np.ones(domain.n_cells, dtype=bool)
        for k in range(1, k_max + 1):
            target = domain.lookup(domain.lattice + k * step)
            valid &= target >= 0
            if k not in wanted:
                continue
            if not np.any(valid):
                break
            difference = np.zeros(domain.n_cells)
            difference[valid] = f.values[target[valid]] - f.values[valid]
            lengths.append(k * step_length)
            norms.append(space.norm(f.with_values(difference)))
    return np.asarray(lengths), np.asarray(norms)


def modulus_curve(
    f: SampledFunction,
    space: RISpaceSpec,
    t_values: np.ndarray,
    directions: Optional[Sequence[Tuple[int, ...]]] = None,
    n_magnitudes: Optional[int] = None,
) -> np.ndarray:
    """
    X-modulus of continuity omega_X(f, t) at each t of ``t_values``.

    All values come from one translation table, so the curve is
    nondecreasing in t.
    """
    t_values = np.asarray(t_values, dtype=float)
    lengths, norms = _translation_table(f, space, float(np.max(t_values)), directions, n_magnitudes)
    if lengths.size == 0:
        logger.warning("modulus of continuity requested below one cell spacing; returning 0")
        return np.zeros_like(t_values)
    order = np.argsort(lengths, kind="stable")
    sorted_lengths = lengths[order]
    running = np.maximum.accumulate(norms[order])
    count = np.searchsorted(sorted_lengths, t_values * (1 + LENGTH_TOLERANCE), side="right")
    return np.where(count > 0, running[np.maximum(count - 1, 0)], 0.0)


def modulus_of_continuity(
    f: SampledFunction,
    space: RISpaceSpec,
    t: float,
    directions: Optional[Sequence[Tuple[int, ...]]] = None,
    n_magnitudes: Optional[int] = None,
) -> float:
    """
    omega_X(f, t) = sup over lattice translations |h| <= t of
    ||(f(. + h) - f) chi_{Omega(h)}||_X.

    Parameters
    ----------
    f : SampledFunction
        Sampled function.
    space : RISpaceSpec
        Norm.
    t : float
        Radius in (0, 1).
    directions : sequence of integer tuples, optional
        Lattice directions (axes and diagonals by default).
    n_magnitudes : int, optional
        Use a geometric ladder of this many step counts per direction
        instead of every lattice multiple.

    Returns
    -------
    float
        0 with a warning when t is below one cell spacing.
    """
    if not 0 < t < 1:
        raise ValueError(f"t must lie in (0, 1), got {t}")
    return float(modulus_curve(f, space, np.array([t]), directions, n_magnitudes)[0])


@dataclass(frozen=True, eq=False)
class CorollaryResult:
    """Outcome of the fundamental-function corollary check."""

    measured_constant: float
    degenerate: bool
    curve: pd.DataFrame

    def to_dict(self) -> Dict[str, object]:
        return {"measured_constant": self.measured_constant, "degenerate": self.degenerate}


def _candidate_shifts(f: SampledFunction, candidates: Sequence[str]) -> List[float]:
    shifts = []
    for name in candidates:
        if name == "median":
            shifts.append(median_constant(f))
        elif name == "mean":
            shifts.append(mean_value(f))
        elif name == "zero":
            shifts.append(0.0)
        else:
            raise ValueError(f"Unknown shift candidate: {name}")
    return shifts


def _oscillation_at(f: SampledFunction, c: float, t: np.ndarray) -> np.ndarray:
    return oscillation(rearrange_sampled(f.shift(c)))(t)


def corollary_check(
    f: SampledFunction,
    space: RISpaceSpec,
    t_grid: Optional[np.ndarray] = None,
    candidates: Sequence[str] = ("median", "mean", "zero"),
    refine: bool = False,
    n_magnitudes: Optional[int] = None,
) -> CorollaryResult:
    """
    Measure sup_t inf_c [(f-c)**(t) - (f-c)*(t)] phi_X(t) / omega_X(f, t^{1/n}).

    Parameters
    ----------
    f : SampledFunction
        Sampled function.
    space : RISpaceSpec
        Space X.
    t_grid : np.ndarray, optional
        Points in (0, 1/2); logarithmic from one cell measure by default.
    candidates : sequence of str, optional
        Shifts among 'median', 'mean' and 'zero'.
    refine : bool, optional
        Refine the infimum over c with a bounded scalar minimization
        between min f and max f at every t.
    n_magnitudes : int, optional
        Ladder size for the modulus of continuity.

    Returns
    -------
    CorollaryResult
        Curve columns t, lhs (oscillation times phi_X), rhs (omega), ratio.
    """
    n = f.domain.n
    t = default_t_grid(f.domain, upper=0.49) if t_grid is None else np.asarray(t_grid, dtype=float)
    if np.any(t <= 0) or np.any(t >= 0.5):
        raise ValueError("corollary t-grid must lie in (0, 1/2)")

    oscillations = np.vstack([_oscillation_at(f, c, t) for c in _candidate_shifts(f, candidates)])
    best = np.min(oscillations, axis=0)
    if refine and not f.is_constant:
        lo, hi = float(np.min(f.values)), float(np.max(f.values))
        for i, ti in enumerate(t):
            found = optimize.minimize_scalar(
                lambda c: float(_oscillation_at(f, c, np.array([ti]))[0]),
                bounds=(lo, hi),
                method="bounded",
                options={"xatol": 1e-10 * max(1.0, hi - lo)},
            )
            best[i] = min(best[i], float(found.fun))

    phi = np.array([space.fundamental_function(ti) for ti in t])
    omega = modulus_curve(f, space, t ** (1.0 / n), n_magnitudes=n_magnitudes)
    lhs = best * phi
    if not np.any(omega > 0):
        logger.warning("corollary check with vanishing modulus of continuity; constant set to 0")
        curve = pd.DataFrame({"t": t, "lhs": lhs, "rhs": omega, "ratio": 0.0})
        return CorollaryResult(0.0, True, curve)
    ratio = np.where(omega > 0, lhs / np.where(omega > 0, omega, 1.0), 0.0)
    curve = pd.DataFrame({"t": t, "lhs": lhs, "rhs": omega, "ratio": ratio})
    return CorollaryResult(float(np.max(ratio)), False, curve)


def modulus_symmetrization_check(
    f: SampledFunction,
    space: RISpaceSpec,
    t_grid: Optional[np.ndarray] = None,
    candidates: Sequence[str] = ("median", "mean", "zero"),
    ball: Optional[GridDomain] = None,
) -> Dict[str, float]:
    """
    Measured constant of inf_c omega_X((f-c)°, t) <= C omega_X(f, t).

    Returns
    -------
    dict
        ``measured_constant`` and ``degenerate``.
    """
    spacing = float(np.max(f.domain.spacing))
    t = log_grid(spacing, 0.5, 24) if t_grid is None else np.asarray(t_grid, dtype=float)
    reference = modulus_curve(f, space, t)
    symmetric = np.vstack(
        [modulus_curve(spherical_rearrangement(f.shift(c), ball), space, t) for c in _candidate_shifts(f, candidates)]
    )
    best = np.min(symmetric, axis=0)
    if not np.any(reference > 0):
        return {"measured_constant": 0.0, "degenerate": True}
    ratio = np.where(reference > 0, best / np.where(reference > 0, reference, 1.0), 0.0)
    return {"measured_constant": float(np.max(ratio)), "degenerate": False}


def nonexpansivity_constant(
    f: SampledFunction,
    g: SampledFunction,
    space: RISpaceSpec,
    ball: Optional[GridDomain] = None,
) -> float:
    """||f° - g°||_X / ||f - g||_X for two functions on the same domain."""
    if f.domain is not g.domain:
        raise ValueError("nonexpansivity needs both functions on the same domain")
    difference = space.norm(f.with_values(f.values - g.values))
    if difference == 0:
        return 0.0
    ball = ball or ball_domain(f.domain.n, f.domain.resolution)
    f_sym = spherical_rearrangement(f, ball)
    g_sym = spherical_rearrangement(g, ball)
    return space.norm(f_sym.with_values(f_sym.values - g_sym.values)) / difference
