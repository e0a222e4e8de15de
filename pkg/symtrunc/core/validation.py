"""
Input validation module for the symtrunc package.

This module contains the checks shared by every value type of the package
(step functions, grid domains, exponents, interval families) and the
ConfigValidator, which collects configuration issues instead of raising.
"""

import math
import logging
from typing import Dict, List, Optional, Sequence

import numpy as np

logger = logging.getLogger(__name__)

SUPPORTED_SHAPES = ("interval", "square", "disk", "beta_cusp", "s_john")
BATTERY_KINDS = ("general", "radial", "trivial")


def check_finite(values: np.ndarray, name: str) -> None:
    """
    Raise ValueError if any entry of ``values`` is NaN or infinite.

    Parameters
    ----------
    values : np.ndarray
        Array to check.
    name : str
        Field name used in the error message.
    """
    if not np.all(np.isfinite(values)):
        bad = int(np.count_nonzero(~np.isfinite(values)))
        raise ValueError(f"{name} must be finite ({bad} non-finite entries)")


def check_nonnegative(values: np.ndarray, name: str) -> None:
    """Raise ValueError if any entry of ``values`` is negative."""
    if np.any(values < 0):
        raise ValueError(f"{name} must be nonnegative (min = {float(np.min(values))})")


def check_breakpoints(breakpoints: np.ndarray, n_values: int) -> None:
    """
    Validate the breakpoints of a step function on (0, 1].

    Parameters
    ----------
    breakpoints : np.ndarray
        Candidate breakpoints t_0 < t_1 < ... < t_m.
    n_values : int
        Number of piece values m.

    Raises
    ------
    ValueError
        If the breakpoints are not strictly increasing from 0 to 1 or the
        number of values does not match.
    """
    if breakpoints.ndim != 1 or breakpoints.size < 2:
        raise ValueError("breakpoints must be a 1D sequence with at least two entries")
    if breakpoints.size != n_values + 1:
        raise ValueError(
            f"breakpoints has {breakpoints.size} entries but values has {n_values}; "
            "expected len(breakpoints) == len(values) + 1"
        )
    check_finite(breakpoints, "breakpoints")
    if breakpoints[0] != 0.0 or breakpoints[-1] != 1.0:
        raise ValueError(
            f"breakpoints must start at 0 and end at 1, got {breakpoints[0]} and {breakpoints[-1]}"
        )
    if np.any(np.diff(breakpoints) <= 0):
        raise ValueError("breakpoints must be strictly increasing")


def check_exponents(p: float, q: float, flavor: str) -> None:
    """
    Validate a Lorentz exponent pair.

    Parameters
    ----------
    p, q : float
        Exponents in [1, inf].
    flavor : str
        'classical' or 'oscillation'.

    Raises
    ------
    ValueError
        If the pair is not admissible.
    """
    if flavor not in ("classical", "oscillation"):
        raise ValueError(f"Unknown Lorentz flavor: {flavor}")
    for label, value in (("p", p), ("q", q)):
        if math.isnan(value) or value < 1:
            raise ValueError(f"Exponent {label} must lie in [1, inf], got {value}")
    if flavor == "classical" and math.isinf(p) and not math.isinf(q):
        raise ValueError(
            "Classical L(inf, q) with q < inf is not normable; "
            "use the oscillation flavor for the L^{inf,q} endpoint"
        )


def check_weights(weights: np.ndarray, n_cells: int) -> np.ndarray:
    """
    Validate per-cell weights and return them renormalized to total 1.

    Raises
    ------
    ValueError
        If the weights have the wrong length, are not positive, or do not
        sum to 1 within 1e-10.
    """
    weights = np.asarray(weights, dtype=float)
    if weights.shape != (n_cells,):
        raise ValueError(f"weights must have one entry per cell ({n_cells}), got {weights.shape}")
    check_finite(weights, "weights")
    if np.any(weights <= 0):
        raise ValueError("weights must be strictly positive")
    total = math.fsum(weights)
    if abs(total - 1.0) > 1e-10:
        raise ValueError(f"weights must sum to 1 within 1e-10, got {total!r}")
    return weights / total


class ConfigValidator:
    """Collects issues in a verification configuration without raising."""

    def __init__(self, min_resolution: int = 8):
        """
        Initialize the ConfigValidator.

        Parameters
        ----------
        min_resolution : int, optional
            Smallest admissible grid resolution (default: 8)
        """
        self.min_resolution = min_resolution

    def validate(self, config: Dict[str, Dict]) -> Dict[str, List[str]]:
        """
        Validate a nested configuration dictionary.

        Parameters
        ----------
        config : dict
            Configuration sections as produced by ``Configuration.config``.

        Returns
        -------
        dict
            Mapping of issue category to messages; empty when valid.
        """
        issues: Dict[str, List[str]] = {}

        domains = config.get("domains", {})
        for shape in domains.get("shapes", []):
            if shape not in SUPPORTED_SHAPES:
                issues.setdefault("shapes", []).append(f"unsupported shape: {shape}")
        resolutions = domains.get("resolutions", [])
        if len(resolutions) < 2:
            issues.setdefault("resolutions", []).append(
                "at least two resolutions are needed for refinement drift"
            )
        for res in resolutions:
            if not isinstance(res, int) or res < self.min_resolution:
                issues.setdefault("resolutions", []).append(f"resolution {res} below {self.min_resolution}")

        exponents = config.get("exponents", {})
        p = exponents.get("p", 2.0)
        if not isinstance(p, (int, float)) or p < 1:
            issues.setdefault("exponents", []).append(f"p must be >= 1, got {p}")

        for key, value in config.get("tolerances", {}).items():
            if not isinstance(value, (int, float)) or value <= 0:
                issues.setdefault("tolerances", []).append(f"{key} must be positive, got {value}")

        battery = config.get("battery", {})
        if battery.get("kind", "general") not in BATTERY_KINDS:
            issues.setdefault("battery", []).append(f"unknown battery kind: {battery.get('kind')}")
        if battery.get("n_random", 5) < 0:
            issues.setdefault("battery", []).append("n_random must be non-negative")

        from symtrunc.core.spaces import RISpaceSpec

        spaces = config.get("spaces", {})
        for key, labels in spaces.items():
            for label in [labels] if isinstance(labels, str) else labels:
                try:
                    RISpaceSpec.parse(label)
                except ValueError as e:
                    issues.setdefault("spaces", []).append(f"{key}: {e}")

        n_pairs = config.get("majorize", {}).get("n_pairs", 200)
        if not isinstance(n_pairs, int) or n_pairs < 1:
            issues.setdefault("majorize", []).append(f"n_pairs must be a positive integer, got {n_pairs}")

        if issues:
            logger.warning(f"Configuration issues found: {issues}")
        return issues


def check_interval_family(a: Sequence[float], b: Sequence[float]) -> None:
    """Validate 0 < a_1 < b_1 <= a_2 < ... < b_m < inf."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.ndim != 1 or a.size == 0 or a.shape != b.shape:
        raise ValueError("interval family needs m >= 1 intervals with matching endpoints")
    check_finite(a, "interval starts")
    check_finite(b, "interval ends")
    if a[0] <= 0:
        raise ValueError("interval family must start strictly after 0")
    if np.any(b <= a):
        raise ValueError("every interval must satisfy a_i < b_i")
    if np.any(a[1:] < b[:-1]):
        raise ValueError("intervals must be ordered and disjoint (b_i <= a_{i+1})")


def optional_float(value: Optional[str]) -> Optional[float]:
    """Parse 'inf'/'none' aware floats from CLI and config strings."""
    if value is None:
        return None
    text = str(value).strip().lower()
    if text in ("none", "null", ""):
        return None
    if text in ("inf", "infinity", "oo"):
        return math.inf
    return float(text)
