"""
Statistics module for the symtrunc package.

This module contains the small numerical helpers shared by the harnesses:
polynomial and log-log regression, refinement drift, and the logarithmic
and geometric grids on which ratio curves are evaluated.
"""

import math
from typing import Tuple

import numpy as np


def fit_regression(x: np.ndarray, y: np.ndarray, degree: int = 1) -> Tuple[np.ndarray, np.poly1d]:
    """
    Fit a polynomial regression to data points.

    Parameters
    ----------
    x : np.ndarray
        Independent variable data.
    y : np.ndarray
        Dependent variable data.
    degree : int, optional
        Degree of the polynomial to fit. Default is 1 (linear regression).

    Returns
    -------
    Tuple[np.ndarray, np.poly1d]
        Tuple containing the polynomial coefficients and the polynomial function.
    """
    coeffs = np.polyfit(x, y, degree)
    poly_func = np.poly1d(coeffs)
    return coeffs, poly_func


def loglog_slope(x: np.ndarray, y: np.ndarray) -> float:
    """
    Least-squares slope of log(y) against log(x).

    Parameters
    ----------
    x, y : np.ndarray
        Positive samples; at least two points.

    Returns
    -------
    float
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.size < 2 or np.any(x <= 0) or np.any(y <= 0):
        raise ValueError("log-log fit needs at least two positive points")
    coeffs, _ = fit_regression(np.log(x), np.log(y), degree=1)
    return float(coeffs[0])


def relative_drift(coarse: float, fine: float) -> float:
    """
    Relative change |fine - coarse| / max(|coarse|, |fine|) between two
    refinement levels; 0 when both vanish, inf when either is infinite.
    """
    if not (math.isfinite(coarse) and math.isfinite(fine)):
        return math.inf
    scale = max(abs(coarse), abs(fine))
    if scale == 0:
        return 0.0
    return abs(fine - coarse) / scale


def log_grid(lower: float, upper: float = 1.0, n_points: int = 200) -> np.ndarray:
    """Logarithmic grid with ``n_points`` points on [lower, upper]."""
    if not 0 < lower < upper:
        raise ValueError(f"log grid needs 0 < lower < upper, got ({lower}, {upper})")
    grid = np.geomspace(lower, upper, n_points)
    grid[-1] = upper
    return grid


def geometric_grid(start: float, stop: float, ratio: float) -> np.ndarray:
    """Decreasing grid start, start*ratio, ... ending at the first point <= stop."""
    if not 0 < ratio < 1:
        raise ValueError(f"ratio must lie in (0, 1), got {ratio}")
    count = int(math.ceil(math.log(stop / start) / math.log(ratio))) + 1
    return start * ratio ** np.arange(count)
