"""
Step function module for the symtrunc package.

This module contains the exact calculus for piecewise-constant functions on
(0, 1]: decreasing rearrangement, prefix integrals, the maximal average f**,
the oscillation f** - f*, and Lorentz-type norms. Curves that are not
piecewise constant (f**, weighted oscillations, Hardy transforms) are
represented exactly by PowerCurve, a piecewise sum of power functions.
"""

import math
import logging
from dataclasses import dataclass
from functools import cached_property
from typing import Dict, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd
from scipy import integrate

from symtrunc.core.validation import (
    check_breakpoints,
    check_exponents,
    check_finite,
    check_nonnegative,
)

logger = logging.getLogger(__name__)

ArrayLike = Union[float, Sequence[float], np.ndarray]

QUAD_RTOL = 1e-8


def _frozen(array: np.ndarray) -> np.ndarray:
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class StepFunction:
    """
    A piecewise-constant function on (0, 1].

    The function takes the value ``values[i]`` on the half-open piece
    (breakpoints[i], breakpoints[i+1]].

    Attributes
    ----------
    breakpoints : np.ndarray
        Strictly increasing breakpoints 0 = t_0 < ... < t_m = 1.
    values : np.ndarray
        Piece values v_1, ..., v_m.
    """

    breakpoints: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        breakpoints = np.array(self.breakpoints, dtype=float)
        values = np.array(self.values, dtype=float)
        if values.ndim != 1:
            raise ValueError("values must be a 1D sequence")
        check_breakpoints(breakpoints, values.size)
        check_finite(values, "values")
        object.__setattr__(self, "breakpoints", _frozen(breakpoints))
        object.__setattr__(self, "values", _frozen(values))

    @classmethod
    def constant(cls, c: float) -> "StepFunction":
        """Constant function c on (0, 1]."""
        return cls([0.0, 1.0], [c])

    @classmethod
    def indicator(cls, m: float, height: float = 1.0) -> "StepFunction":
        """Indicator of (0, m] scaled by ``height``."""
        if not 0 < m <= 1:
            raise ValueError(f"indicator measure must lie in (0, 1], got {m}")
        if m == 1.0:
            return cls.constant(height)
        return cls([0.0, m, 1.0], [height, 0.0])

    @classmethod
    def from_lengths(cls, lengths: ArrayLike, values: ArrayLike) -> "StepFunction":
        """
        Build a step function from consecutive piece lengths.

        Parameters
        ----------
        lengths : array-like
            Positive piece lengths summing to 1 (the last breakpoint is
            pinned to 1 exactly).
        values : array-like
            Piece values.

        Returns
        -------
        StepFunction
        """
        lengths = np.asarray(lengths, dtype=float)
        if np.any(lengths <= 0):
            raise ValueError("piece lengths must be positive")
        breakpoints = np.concatenate(([0.0], np.cumsum(lengths)))
        if abs(breakpoints[-1] - 1.0) > 1e-10:
            raise ValueError(f"piece lengths must sum to 1, got {breakpoints[-1]!r}")
        breakpoints[-1] = 1.0
        return cls(breakpoints, values)

    @property
    def n_pieces(self) -> int:
        return int(self.values.size)

    @cached_property
    def lengths(self) -> np.ndarray:
        return _frozen(np.diff(self.breakpoints))

    @cached_property
    def masses(self) -> np.ndarray:
        """Cumulative integrals at the breakpoints, masses[i] = int_0^{t_i} f."""
        return _frozen(np.concatenate(([0.0], np.cumsum(self.values * self.lengths))))

    def piece_index(self, t: ArrayLike) -> np.ndarray:
        """Index i with t in (t_i, t_{i+1}]; t = 0 maps to the first piece."""
        idx = np.searchsorted(self.breakpoints, np.asarray(t, dtype=float), side="left") - 1
        return np.clip(idx, 0, self.n_pieces - 1)

    def __call__(self, t: ArrayLike) -> np.ndarray:
        return self.values[self.piece_index(t)]

    def prefix_integral(self, t: ArrayLike) -> Union[float, np.ndarray]:
        """Exact int_0^t f(s) ds for t in (0, 1]."""
        t_arr = np.asarray(t, dtype=float)
        if np.any(t_arr <= 0) or np.any(t_arr > 1):
            raise ValueError("prefix_integral requires t in (0, 1]")
        idx = self.piece_index(t_arr)
        result = self.masses[idx] + self.values[idx] * (t_arr - self.breakpoints[idx])
        return float(result) if result.ndim == 0 else result

    def integral(self) -> float:
        """Total integral over (0, 1] in fixed summation order."""
        return math.fsum(self.values * self.lengths)

    def abs(self) -> "StepFunction":
        return StepFunction(self.breakpoints, np.abs(self.values))

    def distribution(self, level: float) -> float:
        """Measure of {|f| > level}."""
        return math.fsum(self.lengths[np.abs(self.values) > level])

    def to_dict(self) -> Dict[str, list]:
        return {"breakpoints": self.breakpoints.tolist(), "values": self.values.tolist()}

    @classmethod
    def from_dict(cls, data: Dict[str, Sequence[float]]) -> "StepFunction":
        try:
            return cls(data["breakpoints"], data["values"])
        except KeyError as e:
            raise ValueError(f"step function JSON is missing field {e}")

    def __repr__(self) -> str:
        return f"{type(self).__name__}(n_pieces={self.n_pieces})"


@dataclass(frozen=True, eq=False)
class MonotoneStep(StepFunction):
    """
    A nonnegative, nonincreasing step function.

    MonotoneStep is the home of decreasing rearrangements f*, (f - c)* and
    |grad f|*; it equals its own rearrangement.
    """

    def __post_init__(self):
        super().__post_init__()
        check_nonnegative(self.values, "MonotoneStep values")
        if np.any(np.diff(self.values) > 0):
            raise ValueError("MonotoneStep values must be nonincreasing")

    @classmethod
    def from_sorted(cls, lengths: np.ndarray, values: np.ndarray) -> "MonotoneStep":
        """
        Build a MonotoneStep from already sorted pieces, merging equal values.

        Parameters
        ----------
        lengths : np.ndarray
            Positive piece lengths in rearranged order.
        values : np.ndarray
            Nonincreasing nonnegative values.
        """
        keep = np.concatenate(([True], values[1:] != values[:-1]))
        starts = np.flatnonzero(keep)
        merged_lengths = np.add.reduceat(lengths, starts)
        return cls.from_lengths(merged_lengths, values[starts])

    @property
    def sup(self) -> float:
        return float(self.values[0])


def rearrange_step(f: StepFunction) -> MonotoneStep:
    """
    Decreasing rearrangement of |f|.

    Pieces are sorted by |value| in descending order with ties broken by
    original piece order, and their lengths are accumulated into new
    breakpoints. Adjacent pieces with equal values are merged.

    Parameters
    ----------
    f : StepFunction
        Function to rearrange.

    Returns
    -------
    MonotoneStep
        f*, equimeasurable with |f|.
    """
    if isinstance(f, MonotoneStep):
        return f
    magnitudes = np.abs(f.values)
    order = np.argsort(-magnitudes, kind="stable")
    return MonotoneStep.from_sorted(f.lengths[order], magnitudes[order])


def prefix_integral(f: StepFunction, t: ArrayLike) -> Union[float, np.ndarray]:
    """
    Exact int_0^t f(s) ds.

    Parameters
    ----------
    f : StepFunction
        Integrand (typically a MonotoneStep).
    t : float or array-like
        Upper limits in (0, 1].

    Returns
    -------
    float or np.ndarray
    """
    return f.prefix_integral(t)


def evaluate_step(f: StepFunction, t: ArrayLike) -> np.ndarray:
    """Evaluate f at t with the (t_{i-1}, t_i] convention."""
    return f(t)


def _power_primitive(t: np.ndarray, gamma: float) -> np.ndarray:
    with np.errstate(divide="ignore", invalid="ignore"):
        if gamma == -1.0:
            return np.log(t)
        return np.power(t, gamma + 1.0) / (gamma + 1.0)


@dataclass(frozen=True, eq=False)
class PowerCurve:
    """
    A piecewise sum of power functions on (0, 1].

    On the piece (t_{i-1}, t_i] the curve equals sum_k c[i, k] * t**g_k.

    Attributes
    ----------
    breakpoints : np.ndarray
        0 = t_0 < ... < t_m = 1.
    exponents : tuple of float
        Exponents g_1, ..., g_K shared by all pieces.
    coefficients : np.ndarray
        Coefficient matrix of shape (m, K).
    """

    breakpoints: np.ndarray
    exponents: Tuple[float, ...]
    coefficients: np.ndarray

    def __post_init__(self):
        breakpoints = np.array(self.breakpoints, dtype=float)
        coefficients = np.array(self.coefficients, dtype=float)
        exponents = tuple(float(g) for g in self.exponents)
        if coefficients.ndim != 2 or coefficients.shape[1] != len(exponents):
            raise ValueError("coefficients must have shape (n_pieces, n_exponents)")
        check_breakpoints(breakpoints, coefficients.shape[0])
        check_finite(coefficients, "coefficients")
        object.__setattr__(self, "breakpoints", _frozen(breakpoints))
        object.__setattr__(self, "coefficients", _frozen(coefficients))
        object.__setattr__(self, "exponents", exponents)

    @property
    def n_pieces(self) -> int:
        return int(self.coefficients.shape[0])

    def piece_index(self, t: ArrayLike) -> np.ndarray:
        idx = np.searchsorted(self.breakpoints, np.asarray(t, dtype=float), side="left") - 1
        return np.clip(idx, 0, self.n_pieces - 1)

    def _evaluate(self, idx: np.ndarray, t: np.ndarray) -> np.ndarray:
        total = np.zeros(np.shape(t), dtype=float)
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            for k, gamma in enumerate(self.exponents):
                c = self.coefficients[idx, k]
                total = total + np.where(c == 0.0, 0.0, c * np.power(t, gamma))
        return total

    def __call__(self, t: ArrayLike) -> np.ndarray:
        t_arr = np.asarray(t, dtype=float)
        return self._evaluate(self.piece_index(t_arr), t_arr)

    def _local_integral(self, idx: np.ndarray, lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
        # lo, hi must lie in the closure of piece idx
        total = np.zeros(np.shape(lo), dtype=float)
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            for k, gamma in enumerate(self.exponents):
                c = self.coefficients[idx, k]
                delta = _power_primitive(hi, gamma) - _power_primitive(lo, gamma)
                total = total + np.where(c == 0.0, 0.0, c * delta)
        return total

    @cached_property
    def piece_integrals(self) -> np.ndarray:
        idx = np.arange(self.n_pieces)
        return _frozen(self._local_integral(idx, self.breakpoints[:-1], self.breakpoints[1:]))

    @cached_property
    def cumulative(self) -> np.ndarray:
        return _frozen(np.concatenate(([0.0], np.cumsum(self.piece_integrals))))

    def prefix(self, t: ArrayLike) -> Union[float, np.ndarray]:
        """Exact int_0^t of the curve (log primitives for exponent -1)."""
        t_arr = np.asarray(t, dtype=float)
        idx = self.piece_index(t_arr)
        result = self.cumulative[idx] + self._local_integral(idx, self.breakpoints[idx], t_arr)
        return float(result) if result.ndim == 0 else result

    def integral(self, lo: ArrayLike, hi: ArrayLike) -> Union[float, np.ndarray]:
        """Exact int_lo^hi of the curve for 0 <= lo <= hi <= 1."""
        return np.subtract(self.prefix(hi), self.prefix(lo))

    def multiply_power(self, alpha: float) -> "PowerCurve":
        """Return t**alpha times the curve."""
        return PowerCurve(self.breakpoints, tuple(g + alpha for g in self.exponents), self.coefficients)

    def scale(self, factor: float) -> "PowerCurve":
        return PowerCurve(self.breakpoints, self.exponents, self.coefficients * factor)

    def refinement_grid(self, n_points: int = 2048) -> np.ndarray:
        """
        Union of the curve breakpoints with geometric and uniform grids.

        The geometric part resolves the behaviour near t = 0.
        """
        geometric = np.geomspace(1e-9, 1.0, n_points)
        uniform = np.linspace(0.0, 1.0, n_points + 1)
        grid = np.unique(np.concatenate((self.breakpoints, geometric, uniform)))
        grid[0], grid[-1] = 0.0, 1.0
        return grid

    def discretize(self, grid: Optional[np.ndarray] = None) -> StepFunction:
        """
        Exact cell averages of the curve on a refinement grid.

        Parameters
        ----------
        grid : np.ndarray, optional
            Grid 0 = s_0 < ... < s_N = 1. Defaults to ``refinement_grid()``;
            curve breakpoints are always merged in so that every cell lies
            inside one piece.

        Returns
        -------
        StepFunction
        """
        if grid is None:
            grid = self.refinement_grid()
        else:
            grid = np.unique(np.concatenate((np.asarray(grid, dtype=float), self.breakpoints)))
        lo, hi = grid[:-1], grid[1:]
        idx = self.piece_index(0.5 * (lo + hi))
        averages = self._local_integral(idx, lo, hi) / (hi - lo)
        if not np.all(np.isfinite(averages)):
            raise ValueError("curve is not integrable near 0; cannot discretize")
        return StepFunction(grid, averages)

    def _active(self) -> np.ndarray:
        return self.coefficients != 0.0

    def lebesgue_norm(self, q: float) -> float:
        """
        L^q norm of the curve over (0, 1].

        Pieces carrying a single power term are integrated in closed form;
        other pieces use adaptive Gauss-Kronrod quadrature (QUADPACK) to
        relative tolerance 1e-8. ``q = inf`` returns the exact supremum.
        """
        if math.isinf(q):
            return self.sup_abs()
        if q < 1:
            raise ValueError(f"Lebesgue exponent must be >= 1, got {q}")
        active = self._active()
        n_active = active.sum(axis=1)
        lo, hi = self.breakpoints[:-1], self.breakpoints[1:]
        pieces = np.zeros(self.n_pieces)

        single = np.flatnonzero(n_active == 1)
        if single.size:
            k = np.argmax(active[single], axis=1)
            gammas = np.asarray(self.exponents)[k] * q
            c = np.abs(self.coefficients[single, k]) ** q
            with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
                log_case = gammas == -1.0
                safe = np.where(log_case, 0.0, gammas + 1.0)
                power = (np.power(hi[single], gammas + 1.0) - np.power(lo[single], gammas + 1.0)) / np.where(
                    log_case, 1.0, safe
                )
                logs = np.log(hi[single]) - np.log(lo[single])
            pieces[single] = c * np.where(log_case, logs, power)

        for i in np.flatnonzero(n_active > 1):
            value, _ = integrate.quad(
                lambda s, i=i: abs(float(self._evaluate(np.array(i), np.array(s)))) ** q,
                lo[i],
                hi[i],
                epsrel=QUAD_RTOL,
                limit=200,
            )
            pieces[i] = value

        total = math.fsum(pieces)
        return total ** (1.0 / q) if np.isfinite(total) else math.inf

    def sup_abs(self) -> float:
        """
        Exact supremum of |curve| over (0, 1].

        Candidates are both piece endpoints (right limits at the left end)
        and, for two-term pieces, the interior stationary point.
        """
        lo, hi = self.breakpoints[:-1], self.breakpoints[1:]
        idx = np.arange(self.n_pieces)
        active = self._active()
        gammas = np.asarray(self.exponents)

        best = np.abs(self._evaluate(idx, hi))
        at_zero = lo == 0.0
        singular = at_zero & np.any(active & (gammas < 0), axis=1)
        if np.any(singular):
            return math.inf
        left = np.where(at_zero, np.sum(np.where(gammas == 0, self.coefficients, 0.0), axis=1), 0.0)
        left = np.where(at_zero, left, self._evaluate(idx, np.where(at_zero, 1.0, lo)))
        best = np.maximum(best, np.abs(left))

        if len(self.exponents) == 2:
            c1, c2 = self.coefficients[:, 0], self.coefficients[:, 1]
            g1, g2 = gammas
            with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
                ratio = -(c2 * g2) / (c1 * g1)
                t_star = np.power(ratio, 1.0 / (g1 - g2)) if g1 != g2 else np.full_like(ratio, np.nan)
            inside = np.isfinite(t_star) & (ratio > 0) & (t_star > lo) & (t_star < hi)
            if np.any(inside):
                best[inside] = np.maximum(
                    best[inside], np.abs(self._evaluate(idx[inside], t_star[inside]))
                )
        elif len(self.exponents) > 2:
            for i in idx:
                samples = np.linspace(max(lo[i], 1e-12), hi[i], 65)
                best[i] = max(best[i], float(np.max(np.abs(self._evaluate(np.full(65, i), samples)))))
        return float(np.max(best))

    def __repr__(self) -> str:
        return f"PowerCurve(n_pieces={self.n_pieces}, exponents={self.exponents})"


def _average_shift(f: StepFunction) -> np.ndarray:
    # beta_i = int_0^{t_{i-1}} f - v_i t_{i-1}
    return f.masses[:-1] - f.values * f.breakpoints[:-1]


def maximal_average(f: StepFunction) -> PowerCurve:
    """
    The maximal average f**(t) = (1/t) int_0^t f*(s) ds.

    Parameters
    ----------
    f : StepFunction
        Function whose rearrangement is averaged (a MonotoneStep is used
        as is).

    Returns
    -------
    PowerCurve
        alpha_i + beta_i / t on each piece of f*.
    """
    f_star = rearrange_step(f)
    beta = _average_shift(f_star)
    return PowerCurve(f_star.breakpoints, (0.0, -1.0), np.column_stack((f_star.values, beta)))


def oscillation(f: StepFunction) -> PowerCurve:
    """
    The oscillation f**(t) - f*(t).

    The constant part of f** cancels against f*, leaving beta_i / t on each
    piece, which is nonnegative because f* is nonincreasing.

    Parameters
    ----------
    f : StepFunction
        Function whose rearrangement is used.

    Returns
    -------
    PowerCurve
    """
    f_star = rearrange_step(f)
    beta = np.maximum(_average_shift(f_star), 0.0)
    return PowerCurve(f_star.breakpoints, (-1.0,), beta[:, None])


def weighted_average(g: StepFunction, alpha: float) -> PowerCurve:
    """
    The weighted average t^{-alpha-1} int_0^t s^alpha |g(s)| ds.

    Bounded on every rearrangement-invariant space with norm at most
    1/alpha.

    Parameters
    ----------
    g : StepFunction
        Function to average (not rearranged).
    alpha : float
        Positive weight exponent.

    Returns
    -------
    PowerCurve
    """
    if alpha <= 0:
        raise ValueError(f"alpha must be positive, got {alpha}")
    v = np.abs(g.values)
    a, b = g.breakpoints[:-1], g.breakpoints[1:]
    e = alpha + 1.0
    weighted = v * (b**e - a**e) / e
    before = np.concatenate(([0.0], np.cumsum(weighted)[:-1]))
    coefficients = np.column_stack((v / e, before - v * a**e / e))
    return PowerCurve(g.breakpoints, (0.0, -e), coefficients)


def jump_integral(f: MonotoneStep, p: float, t: ArrayLike) -> Union[float, np.ndarray]:
    """
    Exact int_0^t s^{1/p} d(-f*)(s) for a step rearrangement.

    The derivative of a step rearrangement is a sum of point masses at the
    breakpoints, so the integral is the sum of t_i^{1/p} (v_i - v_{i+1})
    over breakpoints t_i <= t.
    """
    f_star = rearrange_step(f)
    inner = f_star.breakpoints[1:-1]
    drops = f_star.values[:-1] - f_star.values[1:]
    weight = 0.0 if math.isinf(p) else 1.0 / p
    cumulative = np.concatenate(([0.0], np.cumsum(inner**weight * drops)))
    count = np.searchsorted(inner, np.asarray(t, dtype=float), side="right")
    result = cumulative[count]
    return float(result) if np.ndim(result) == 0 else result


def lorentz_norm(f: StepFunction, p: float, q: float, flavor: str = "classical") -> float:
    """
    Lorentz-type norm of a step function.

    Parameters
    ----------
    f : StepFunction
        Function to measure; it is rearranged first unless it already is a
        MonotoneStep.
    p, q : float
        Exponents in [1, inf].
    flavor : str, optional
        'classical' for (int_0^1 (t^{1/p} f*(t))^q dt/t)^{1/q};
        'oscillation' for (int_0^1 (f** - f*)^q t^{q/p} dt/t)^{1/q}, where
        p = inf is allowed and the weight becomes 1.

    Returns
    -------
    float

    Raises
    ------
    ValueError
        For non-admissible (p, q), including classical p = inf with q < inf.
    """
    check_exponents(p, q, flavor)
    f_star = rearrange_step(f)
    a, b = f_star.breakpoints[:-1], f_star.breakpoints[1:]
    inv_p = 0.0 if math.isinf(p) else 1.0 / p

    if flavor == "classical":
        v = f_star.values
        if math.isinf(p):
            return f_star.sup
        if math.isinf(q):
            return float(np.max(v * b**inv_p))
        pieces = v**q * (p / q) * (b ** (q * inv_p) - a ** (q * inv_p))
        return math.fsum(pieces) ** (1.0 / q)

    beta = np.maximum(_average_shift(f_star), 0.0)
    mask = beta > 0
    if not np.any(mask):
        return 0.0
    beta, a, b = beta[mask], a[mask], b[mask]
    if math.isinf(q):
        return float(np.max(beta * a ** (inv_p - 1.0)))
    e = q * inv_p - q
    if e == 0.0:
        pieces = beta**q * np.log(b / a)
    else:
        pieces = beta**q * (b**e - a**e) / e
    return math.fsum(pieces) ** (1.0 / q)


def curves_to_frame(f: StepFunction, t_grid: ArrayLike) -> pd.DataFrame:
    """
    Tabulate f*, f** and f** - f* on a t-grid for CSV export.

    Parameters
    ----------
    f : StepFunction
        Source function.
    t_grid : array-like
        Points in (0, 1].

    Returns
    -------
    pandas.DataFrame
        Columns t, f_star, f_star_star, oscillation.
    """
    t = np.asarray(t_grid, dtype=float)
    f_star = rearrange_step(f)
    average = maximal_average(f_star)
    f_values = f_star(t)
    averages = average(t)
    return pd.DataFrame(
        {"t": t, "f_star": f_values, "f_star_star": averages, "oscillation": averages - f_values}
    )
