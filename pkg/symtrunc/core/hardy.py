"""
Hardy operator module for the symtrunc package.

This module contains the one-dimensional Hardy-type operator
g -> int_t^1 s^alpha g(s) ds/s, the weighted-norm (Maz'ya) boundedness
criterion on power weights, the fitted blow-up exponent of that criterion,
and the radial test functions that transport Hardy outputs onto a domain.
"""

import math
import logging
from dataclasses import dataclass, field
from typing import Dict, Optional, Tuple

import numpy as np

from symtrunc.core.domain import GridDomain, SampledFunction
from symtrunc.core.spaces import RISpaceSpec
from symtrunc.core.stepfn import PowerCurve, StepFunction, weighted_average
from symtrunc.core.validation import check_nonnegative
from symtrunc.utils.statistics import geometric_grid, loglog_slope

logger = logging.getLogger(__name__)

DEFAULT_RATIO = 0.8
DEFAULT_A_MIN = 1e-8
FIT_WINDOW = (1e-6, 1e-4)
DIVERGENCE_FACTOR = 10.0
SLOPE_TOLERANCE = 1e-3


@dataclass(frozen=True)
class HardyParams:
    """
    Exponents of the Hardy criterion on an s-John domain.

    Attributes
    ----------
    n : int
        Dimension (>= 2).
    s : float
        John exponent (>= 1).
    t_exp : float
        Source Lebesgue exponent t > 1.
    require_har : bool
        Enforce the standing assumption s > (t - 1)/(n - 1).
    alpha : float
        Hardy exponent 1 - (n-1)s/n (derived).
    r_exp : float
        Target exponent nt/((n-1)s + 1 - t); in the borderline regime where
        the denominator is not positive, nt/((n-1)s) (derived).
    """

    n: int
    s: float
    t_exp: float
    require_har: bool = False
    alpha: float = field(init=False)
    r_exp: float = field(init=False)

    def __post_init__(self):
        if self.n < 2:
            raise ValueError(f"Hardy criterion needs n >= 2, got {self.n}")
        if self.s < 1:
            raise ValueError(f"John exponent s must be >= 1, got {self.s}")
        if self.t_exp <= 1:
            raise ValueError(f"source exponent t must be > 1, got {self.t_exp}")
        if self.require_har and self.s <= (self.t_exp - 1) / (self.n - 1):
            raise ValueError(
                f"s = {self.s} must exceed (t - 1)/(n - 1) = {(self.t_exp - 1) / (self.n - 1)}"
            )
        denominator = (self.n - 1) * self.s + 1 - self.t_exp
        if denominator > 0:
            r_exp = self.n * self.t_exp / denominator
        else:
            r_exp = self.n * self.t_exp / ((self.n - 1) * self.s)
        object.__setattr__(self, "alpha", 1.0 - (self.n - 1) * self.s / self.n)
        object.__setattr__(self, "r_exp", r_exp)
        if denominator <= 0:
            logger.info(f"Borderline configuration n={self.n}, s={self.s}, t={self.t_exp}: using r = {r_exp}")

    @property
    def inner_exponent(self) -> float:
        """Exponent e of the inner integral int_a^1 u^{-e} du."""
        return (self.n - 1) * self.s * self.t_exp / (self.n * (self.t_exp - 1))

    def to_dict(self) -> Dict[str, float]:
        return {"n": self.n, "s": self.s, "t": self.t_exp, "alpha": self.alpha, "r": self.r_exp}


@dataclass(frozen=True, eq=False)
class MazyaCriterion:
    """Values of the Maz'ya functional on an a-grid."""

    a_grid: np.ndarray
    values: np.ndarray
    sup_value: float
    argmax_a: float
    diverging: bool
    strong_divergence: bool
    tail_slope: Optional[float]

    def to_dict(self) -> Dict[str, object]:
        return {
            "sup": self.sup_value,
            "argmax_a": self.argmax_a,
            "diverging": self.diverging,
            "strong_divergence": self.strong_divergence,
            "tail_slope": self.tail_slope,
        }


def hardy_apply(g: StepFunction, alpha: float) -> PowerCurve:
    """
    Hardy transform t -> int_t^1 s^alpha g(s) ds/s.

    On the piece (a_i, b_i] the result is
    tail_i + v_i (b_i^alpha - t^alpha)/alpha with tail_i the exact
    contribution of the later pieces, so it is continuous and
    nonincreasing.

    Parameters
    ----------
    g : StepFunction
        Nonnegative step function.
    alpha : float
        Positive exponent.

    Returns
    -------
    PowerCurve
        Exponents (0, alpha).

    Raises
    ------
    ValueError
        If alpha <= 0 or g has negative values.
    """
    if alpha <= 0:
        raise ValueError(f"alpha must be positive, got {alpha}")
    check_nonnegative(g.values, "Hardy input")
    v = g.values
    a, b = g.breakpoints[:-1], g.breakpoints[1:]
    contributions = v * (b**alpha - a**alpha) / alpha
    tail = np.concatenate((np.cumsum(contributions[::-1])[::-1][1:], [0.0]))
    coefficients = np.column_stack((tail + v * b**alpha / alpha, -v / alpha))
    return PowerCurve(g.breakpoints, (0.0, alpha), coefficients)


def fubini_gap(g: StepFunction, alpha: float, t: float) -> Tuple[float, float]:
    """
    Both sides of h**(t) - h(t) = (1/t) int_0^t s^alpha g(s) ds for
    h = hardy_apply(g, alpha).
    """
    h = hardy_apply(g, alpha)
    lhs = h.prefix(t) / t - float(h(t))
    weighted = PowerCurve(g.breakpoints, (alpha,), g.values[:, None])
    rhs = weighted.prefix(t) / t
    return float(lhs), float(rhs)


def hardy_l1_ratio(g: StepFunction, alpha: float) -> float:
    """||hardy_apply(g, alpha)||_1 / ||g||_1 (at most 1)."""
    total = g.integral()
    if total == 0:
        return 0.0
    return hardy_apply(g, alpha).prefix(1.0) / total


def weighted_average_bound(g: StepFunction, alpha: float, space: RISpaceSpec) -> float:
    """
    Measured constant of the weighted average operator in ``space``.

    ||t^{-alpha-1} int_0^t s^alpha |g|||_X / ||g||_X, which is at most
    1/alpha.
    """
    denominator = space.norm(g)
    if denominator == 0:
        return 0.0
    return space.norm(weighted_average(g, alpha)) / denominator


def default_a_grid(a_min: float = DEFAULT_A_MIN, ratio: float = DEFAULT_RATIO) -> np.ndarray:
    """Geometric grid 1, ratio, ratio^2, ... down to a_min."""
    return geometric_grid(1.0, a_min, ratio)


def predicted_exponent(params: HardyParams) -> float:
    """Predicted blow-up exponent (n-1)(1-t)(s-1)/(nt)."""
    n, s, t = params.n, params.s, params.t_exp
    return (n - 1) * (1 - t) * (s - 1) / (n * t)


def mazya_values(params: HardyParams, a_grid: np.ndarray) -> np.ndarray:
    """
    a^{1/r} (int_a^1 u^{-e} du)^{(t-1)/t} with the inner integral in closed
    form.
    """
    a = np.asarray(a_grid, dtype=float)
    if np.any(a <= 0) or np.any(a > 1):
        raise ValueError("a_grid must lie in (0, 1]")
    e = params.inner_exponent
    if not np.isfinite(e):
        raise ValueError(f"inner exponent undefined for {params}")
    if e == 1.0:
        inner = -np.log(a)
    else:
        inner = (1.0 - a ** (1.0 - e)) / (1.0 - e)
    inner = np.maximum(inner, 0.0)
    t = params.t_exp
    return a ** (1.0 / params.r_exp) * inner ** ((t - 1.0) / t)


def _tail_slope(a: np.ndarray, values: np.ndarray) -> Optional[float]:
    window = (a >= FIT_WINDOW[0] * (1 - 1e-9)) & (a <= FIT_WINDOW[1] * (1 + 1e-9)) & (values > 0)
    if np.count_nonzero(window) < 3:
        return None
    return loglog_slope(a[window], values[window])


def mazya_criterion_sup(
    params: HardyParams,
    a_grid: Optional[np.ndarray] = None,
    divergence_factor: float = DIVERGENCE_FACTOR,
) -> MazyaCriterion:
    """
    Evaluate the Maz'ya criterion on a geometric a-grid.

    Divergence is declared when the log-log slope over a in [1e-6, 1e-4]
    is below -1e-3 (polynomial blow-up). ``strong_divergence`` records
    whether the value at the smallest a exceeds ``divergence_factor`` times
    the value at a = 1e-2.

    Parameters
    ----------
    params : HardyParams
        Exponents.
    a_grid : np.ndarray, optional
        Points in (0, 1]; defaults to ratio 0.8 from 1 down to 1e-8.
    divergence_factor : float, optional
        Growth factor for ``strong_divergence`` (default: 10).

    Returns
    -------
    MazyaCriterion
    """
    a = default_a_grid() if a_grid is None else np.asarray(a_grid, dtype=float)
    values = mazya_values(params, a)
    if a.size > 1:
        ordered = np.sort(a)[::-1]
        ratio = float(np.max(ordered[1:] / ordered[:-1]))
        if ratio > 0.9 or ordered[-1] > 1e-6:
            logger.warning(
                f"a-grid is too coarse or too short (ratio {ratio:.3f}, min {ordered[-1]:.1e}); "
                "divergence cannot be judged reliably"
            )

    slope = _tail_slope(a, values)
    diverging = slope is not None and slope < -SLOPE_TOLERANCE

    smallest = int(np.argmin(a))
    reference = int(np.argmin(np.abs(np.log(a) - math.log(1e-2))))
    strong = bool(values[smallest] > divergence_factor * values[reference]) if values[reference] > 0 else False

    best = int(np.argmax(values))
    result = MazyaCriterion(
        a_grid=a,
        values=values,
        sup_value=float(values[best]),
        argmax_a=float(a[best]),
        diverging=bool(diverging),
        strong_divergence=strong,
        tail_slope=slope,
    )
    logger.info(f"Maz'ya criterion for {params.to_dict()}: sup={result.sup_value:.6g}, diverging={diverging}")
    return result


def blowup_exponent(params: HardyParams, a_grid: Optional[np.ndarray] = None) -> float:
    """
    Least-squares log-log slope of the criterion over a in [1e-6, 1e-4].

    Raises
    ------
    ValueError
        If the configuration does not diverge (slope near 0 or positive).
    """
    criterion = mazya_criterion_sup(params, a_grid)
    if not criterion.diverging:
        raise ValueError(
            f"criterion does not diverge for {params.to_dict()} "
            f"(tail slope {criterion.tail_slope}); no blow-up exponent"
        )
    return float(criterion.tail_slope)


def radial_test_function(g: StepFunction, domain: GridDomain) -> SampledFunction:
    """
    Radial function u(x) = int_{tau(x)}^1 g(s) s^{1/n - 1} ds on a domain.

    tau(x) is the grid measure of the ball through x around the designated
    centre, so that u* agrees with hardy_apply(g, 1/n) up to one cell.

    Parameters
    ----------
    g : StepFunction
        Nonnegative step function vanishing beyond the inscribed ball
        measure sigma of the domain.
    domain : GridDomain
        Target domain.

    Returns
    -------
    SampledFunction

    Raises
    ------
    ValueError
        If g is negative or supported beyond sigma.
    """
    check_nonnegative(g.values, "radial profile")
    sigma = domain.inscribed_ball_measure
    beyond = g.breakpoints[:-1] >= sigma * (1 + 1e-12)
    straddling = (g.breakpoints[:-1] < sigma) & (g.breakpoints[1:] > sigma * (1 + 1e-12))
    if np.any(g.values[beyond | straddling] > 0):
        raise ValueError(f"profile support exceeds the inscribed ball measure sigma = {sigma:.6g}")
    h = hardy_apply(g, 1.0 / domain.n)
    tau = np.minimum(domain.radial_coordinate, 1.0)
    return SampledFunction(domain, h(tau))
