"""
Verification module for the symtrunc package.

This module contains the harnesses that measure the constants of the
Sobolev-Poincare inequalities and their symmetrization forms on the model
domains, the Hardy-operator round trip, the s-John counterexample to the
Hardy criterion, and the orchestration of all checks into a reproducible
VerificationReport.

Every measured constant is a battery maximum, hence a lower bound on the
true constant; stability under grid refinement is the pass criterion.
"""

import json
import math
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd

from symtrunc.core.battery import (
    TestFunctionFamily,
    boundary_distance,
    general_battery,
    make_battery,
    radial_battery,
    radial_spike_battery,
    spike_monotone_steps,
    spike_scales,
    spike_steps,
)
from symtrunc.core.domain import (
    GridDomain,
    SampledFunction,
    gradient_magnitude,
    make_domain,
    mazya_exponent,
    mean_value,
    median_constant,
    rearrange_sampled,
)
from symtrunc.core.hardy import HardyParams, default_a_grid, hardy_apply, mazya_criterion_sup, predicted_exponent
from symtrunc.core.majorize import audit
from symtrunc.core.spaces import RISpaceSpec
from symtrunc.core.stepfn import jump_integral, lorentz_norm, oscillation
from symtrunc.core.symmetrize import ball_domain, corollary_check, polya_szego_check
from symtrunc.core.validation import ConfigValidator, check_weights
from symtrunc.utils.performance import profile_function
from symtrunc.utils.statistics import log_grid, relative_drift

logger = logging.getLogger(__name__)

Battery = Union[TestFunctionFamily, Sequence[SampledFunction]]

IDENTITY_TOLERANCE = 1e-8


@dataclass
class InequalityRecord:
    """
    One measured inequality in a VerificationReport.

    A record passes when it carries no error and is either skipped or has
    a finite measured constant, a refinement drift within tolerance and
    all extra checks satisfied.
    """

    name: str
    shape: str
    resolution: List[int]
    params: Dict[str, Any]
    measured_constant: float
    refinement_drift: Optional[float] = None
    tolerance: Optional[float] = None
    skipped: bool = False
    error: Optional[str] = None
    checks: Dict[str, bool] = field(default_factory=dict)
    details: Dict[str, Any] = field(default_factory=dict)
    curves: Dict[int, pd.DataFrame] = field(default_factory=dict, repr=False)

    @property
    def passed(self) -> bool:
        if self.error is not None:
            return False
        if self.skipped:
            return True
        if not math.isfinite(self.measured_constant):
            return False
        if self.refinement_drift is not None and self.tolerance is not None:
            if not self.refinement_drift <= self.tolerance:
                return False
        return all(self.checks.values())

    @property
    def sort_key(self) -> Tuple[str, str, str]:
        return self.name, self.shape, json.dumps(to_jsonable(self.params), sort_keys=True)

    def curve_file(self, resolution: int) -> str:
        return f"{self.name}_{self.shape}_{resolution}.csv"

    def to_dict(self) -> Dict[str, Any]:
        return to_jsonable(
            {
                "name": self.name,
                "shape": self.shape,
                "resolution": list(self.resolution),
                "params": self.params,
                "measured_constant": self.measured_constant,
                "refinement_drift": self.refinement_drift,
                "tolerance": self.tolerance,
                "skipped": self.skipped,
                "error": self.error,
                "checks": self.checks,
                "details": self.details,
                "ratio_curves": [self.curve_file(res) for res in sorted(self.curves)],
                "pass": self.passed,
            }
        )


@dataclass
class VerificationReport:
    """Records of a verification run, kept sorted by name."""

    records: List[InequalityRecord]
    seed: int = 0
    config: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        self.records = sorted(self.records, key=lambda record: record.sort_key)

    @property
    def all_passed(self) -> bool:
        return all(record.passed for record in self.records)

    @property
    def exit_code(self) -> int:
        return 0 if self.all_passed else 1

    def summary(self) -> Dict[str, int]:
        return {
            "n_records": len(self.records),
            "n_passed": sum(record.passed for record in self.records),
            "n_failed": sum(not record.passed for record in self.records),
            "n_errors": sum(record.error is not None for record in self.records),
            "n_skipped": sum(record.skipped for record in self.records),
        }

    def to_dict(self) -> Dict[str, Any]:
        return to_jsonable(
            {
                "seed": self.seed,
                "config": self.config,
                "summary": self.summary(),
                "all_passed": self.all_passed,
                "records": [record.to_dict() for record in self.records],
            }
        )

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)


def to_jsonable(obj: Any) -> Any:
    """Convert numpy scalars, tuples and non-finite floats into JSON-safe values."""
    if isinstance(obj, dict):
        return {str(key): to_jsonable(value) for key, value in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(value) for value in obj]
    if isinstance(obj, np.ndarray):
        return [to_jsonable(value) for value in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        value = float(obj)
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return value
    return obj


def _members(battery: Battery, domain: GridDomain) -> List[Tuple[str, SampledFunction]]:
    if isinstance(battery, TestFunctionFamily):
        members = battery.sample(domain)
    else:
        members = [(f"member_{i}", f) for i, f in enumerate(battery)]
    if not members:
        raise ValueError("battery is empty")
    return members


def _check_exponent(p: float, n: int, strict_lower: bool = False) -> None:
    upper = math.inf if n == 1 else n / (n - 1)
    if p < 1 or (strict_lower and p <= 1) or p > upper * (1 + 1e-12):
        bound = "(1" if strict_lower else "[1"
        raise ValueError(f"p must lie in {bound}, {upper:g}] for n = {n}, got {p}")


def _gradient(f: SampledFunction, multiplier: Optional[np.ndarray] = None) -> SampledFunction:
    gradient = gradient_magnitude(f)
    if multiplier is None:
        return gradient
    return gradient.with_values(gradient.values * np.asarray(multiplier, dtype=float))


def _t_grid(domain: GridDomain, n_points: int = 200) -> np.ndarray:
    return log_grid(domain.cell_measure, 1.0, n_points)


def sobolev_poincare_ratios(
    domain: GridDomain,
    battery: Battery,
    target: RISpaceSpec,
    source: RISpaceSpec,
    weights: Optional[np.ndarray] = None,
    gradient_multiplier: Optional[np.ndarray] = None,
) -> Dict[str, float]:
    """
    ||f - f_Omega||_Y / ||grad f||_X for each non-constant battery member.

    Parameters
    ----------
    domain : GridDomain
        Domain the battery is sampled on.
    battery : TestFunctionFamily or sequence of SampledFunction
        Test functions.
    target, source : RISpaceSpec
        Spaces Y and X.
    weights : np.ndarray, optional
        Cell measure for weighted inequalities (means and rearrangements).
    gradient_multiplier : np.ndarray, optional
        Per-cell factor applied to |grad f|.

    Returns
    -------
    dict
        Member name to ratio; constant members are skipped.
    """
    if weights is not None:
        weights = check_weights(weights, domain.n_cells)
    ratios: Dict[str, float] = {}
    skipped = 0
    for name, f in _members(battery, domain):
        gradient = _gradient(f, gradient_multiplier)
        denominator = source.norm(gradient, weights)
        if f.is_constant or denominator == 0:
            skipped += 1
            continue
        centred = f.shift(mean_value(f, weights))
        ratios[name] = target.norm(centred, weights) / denominator
    if skipped:
        logger.warning(f"skipped {skipped} constant battery members on {domain!r}")
    return ratios


def sobolev_poincare_constant(
    domain: GridDomain,
    battery: Battery,
    target: RISpaceSpec,
    source: RISpaceSpec,
    weights: Optional[np.ndarray] = None,
    gradient_multiplier: Optional[np.ndarray] = None,
) -> float:
    """Battery maximum of ||f - f_Omega||_Y / ||grad f||_X (0 when every member is skipped)."""
    ratios = sobolev_poincare_ratios(domain, battery, target, source, weights, gradient_multiplier)
    return max(ratios.values(), default=0.0)


def poincare_constant(
    domain: GridDomain,
    battery: Battery,
    p: float,
    weights: Optional[np.ndarray] = None,
    gradient_multiplier: Optional[np.ndarray] = None,
) -> float:
    """
    Measured L^p Poincare constant (int |f - f_Omega|^p)^{1/p} / int |grad f|.

    Parameters
    ----------
    domain : GridDomain
        Domain.
    battery : TestFunctionFamily or sequence of SampledFunction
        Test functions; constant members are skipped.
    p : float
        Exponent in [1, n/(n-1)].
    weights, gradient_multiplier : np.ndarray, optional
        See ``sobolev_poincare_ratios``.

    Returns
    -------
    float
        Battery maximum, a lower bound on the true constant.
    """
    _check_exponent(p, domain.n)
    return sobolev_poincare_constant(
        domain, battery, RISpaceSpec.lebesgue(p), RISpaceSpec.lebesgue(1.0), weights, gradient_multiplier
    )


def _weight_values(domain: GridDomain, weight: Union[np.ndarray, Callable]) -> np.ndarray:
    values = weight(domain) if callable(weight) else weight
    values = np.asarray(values, dtype=float)
    if values.shape != (domain.n_cells,) or np.any(values <= 0) or not np.all(np.isfinite(values)):
        raise ValueError("weights must be positive and finite with one entry per cell")
    return values


def weighted_poincare_constant(
    domain: GridDomain,
    battery: Battery,
    p: float,
    density: Union[np.ndarray, Callable],
    gradient_weight: Union[np.ndarray, Callable],
) -> float:
    """
    Measured constant of
    (int |f - f_{Omega,h}|^p h)^{1/p} <= C int |grad f| g
    written with d mu = h dx as an L^p(mu) / L^1(mu) inequality with
    gradient factor g/h.

    Parameters
    ----------
    domain : GridDomain
        Domain.
    battery : TestFunctionFamily or sequence of SampledFunction
        Test functions.
    p : float
        Exponent > 1.
    density, gradient_weight : np.ndarray or callable
        Positive weights h and g per cell, or callables of the domain.
    """
    if p <= 1:
        raise ValueError(f"weighted Poincare inequality needs p > 1, got {p}")
    h = _weight_values(domain, density)
    g = _weight_values(domain, gradient_weight)
    mass = h * domain.measures
    mu = mass / math.fsum(mass)
    return sobolev_poincare_constant(
        domain, battery, RISpaceSpec.lebesgue(p), RISpaceSpec.lebesgue(1.0), mu, g / h
    )


@dataclass(frozen=True, eq=False)
class PointwiseResult:
    """Suprema of the pointwise symmetrization ratios for one function."""

    sup_ratio_a: float
    sup_ratio_b: float
    sup_ratio_c: float
    sup_ratio_c_log: float
    r_f: float
    curve_b: pd.DataFrame
    curve_c: pd.DataFrame

    def to_dict(self) -> Dict[str, float]:
        return {
            "sup_ratio_a": self.sup_ratio_a,
            "sup_ratio_b": self.sup_ratio_b,
            "sup_ratio_c": self.sup_ratio_c,
            "sup_ratio_c_log": self.sup_ratio_c_log,
            "r_f": self.r_f,
        }


def _shifted_rearrangements(
    f: SampledFunction,
    weights: Optional[np.ndarray],
    gradient_multiplier: Optional[np.ndarray],
):
    if f.is_constant:
        raise ValueError("function is constant; the symmetrization ratios are undefined")
    gradient = _gradient(f, gradient_multiplier)
    if not np.any(gradient.values > 0):
        raise ValueError("gradient vanishes identically")
    r_f = median_constant(f, weights)
    return r_f, rearrange_sampled(f.shift(r_f), weights), rearrange_sampled(gradient, weights)


def theorem_a_pointwise(
    domain: GridDomain,
    f: SampledFunction,
    p: float,
    t_grid: Optional[np.ndarray] = None,
    weights: Optional[np.ndarray] = None,
    gradient_multiplier: Optional[np.ndarray] = None,
) -> PointwiseResult:
    """
    Pointwise symmetrization ratios at the median r_f.

    With F = (f - r_f)* and G = |grad f|*:

    - ratio_a = int_0^t s^{1/p} d(-F) / int_0^t G
    - ratio_b = t^{1/p} (F** - F*)(t) / int_0^t G
    - ratio_c = int_0^t s^{1/p - 1} (F** - F*)(s) ds / int_0^t G
    - ratio_c_log uses ds/s in the numerator instead of ds.

    Parameters
    ----------
    domain : GridDomain
        Domain of f.
    f : SampledFunction
        Non-constant function.
    p : float
        Exponent in (1, n/(n-1)].
    t_grid : np.ndarray, optional
        Logarithmic grid with 200 points on [cell measure, 1] by default.
    weights, gradient_multiplier : np.ndarray, optional
        Weighted variant with rearrangements taken against ``weights``.

    Returns
    -------
    PointwiseResult

    Raises
    ------
    ValueError
        For constant f, vanishing gradient or p out of range.
    """
    _check_exponent(p, domain.n, strict_lower=True)
    if weights is not None:
        weights = check_weights(weights, domain.n_cells)
    r_f, F, G = _shifted_rearrangements(f, weights, gradient_multiplier)
    t = _t_grid(domain) if t_grid is None else np.asarray(t_grid, dtype=float)
    inv_p = 1.0 / p

    rhs = G.prefix_integral(t)
    osc = oscillation(F)
    lhs_a = jump_integral(F, p, t)
    lhs_b = t ** inv_p * osc(t)
    lhs_c = osc.multiply_power(inv_p - 1.0).prefix(t)
    lhs_c_log = osc.multiply_power(inv_p - 2.0).prefix(t)

    curve_b = pd.DataFrame({"t": t, "lhs": lhs_b, "rhs": rhs, "ratio": lhs_b / rhs})
    curve_c = pd.DataFrame({"t": t, "lhs": lhs_c, "rhs": rhs, "ratio": lhs_c / rhs})
    return PointwiseResult(
        sup_ratio_a=float(np.max(lhs_a / rhs)),
        sup_ratio_b=float(curve_b["ratio"].max()),
        sup_ratio_c=float(curve_c["ratio"].max()),
        sup_ratio_c_log=float(np.max(lhs_c_log / rhs)),
        r_f=r_f,
        curve_b=curve_b,
        curve_c=curve_c,
    )


@dataclass(frozen=True)
class NormResult:
    """Norm form of the symmetrization inequality for one function and space."""

    constant: float
    numerator: float
    denominator: float
    gn_form: Optional[float] = None
    identity_gap: Optional[float] = None

    def to_dict(self) -> Dict[str, Optional[float]]:
        return {
            "constant": self.constant,
            "numerator": self.numerator,
            "denominator": self.denominator,
            "gn_form": self.gn_form,
            "identity_gap": self.identity_gap,
        }


def theorem_a_norm(
    domain: GridDomain,
    f: SampledFunction,
    p: float,
    space: RISpaceSpec,
    weights: Optional[np.ndarray] = None,
) -> NormResult:
    """
    ||s^{1/p-1} [(f-r_f)** - (f-r_f)*](s)||_X / ||grad f||_X.

    For X = L1 the numerator is also evaluated through the identity
    int_0^1 s^{1/p-1} (F** - F*) ds = (||F||_{L(p,1)} - p ||F||_1)/(p - 1),
    which links the norm form to the Gagliardo-Nirenberg L(p,1) form;
    ``identity_gap`` is the relative difference of both evaluations.
    """
    _check_exponent(p, domain.n, strict_lower=True)
    if weights is not None:
        weights = check_weights(weights, domain.n_cells)
    _, F, G = _shifted_rearrangements(f, weights, None)
    weighted = oscillation(F).multiply_power(1.0 / p - 1.0)
    numerator = space.norm(weighted)
    denominator = space.norm(G)
    gn_form = gap = None
    if space == RISpaceSpec.lebesgue(1.0):
        gn_form = (lorentz_norm(F, p, 1.0) - p * F.integral()) / (p - 1.0)
        gap = abs(gn_form - numerator) / max(abs(numerator), 1e-300)
    return NormResult(numerator / denominator, numerator, denominator, gn_form, gap)


@dataclass(frozen=True)
class GNResult:
    """Strong L(p,1) and weak L(p,inf) Gagliardo-Nirenberg constants."""

    strong: float
    weak: float
    weak_le_strong: bool

    def to_dict(self) -> Dict[str, Any]:
        return {"strong": self.strong, "weak": self.weak, "weak_le_strong": self.weak_le_strong}


def gn_sharp_constant(domain: GridDomain, battery: Battery, p: float) -> GNResult:
    """
    Battery maxima of ||f - f_Omega||_{L(p,1)} / ||grad f||_1 and of the
    weak form ||f - f_Omega||_{L(p,inf)} / ||grad f||_1 (classical flavor).

    ``weak_le_strong`` records that the weak ratio never exceeds the strong
    one on any member.
    """
    _check_exponent(p, domain.n)
    l1 = RISpaceSpec.lebesgue(1.0)
    strong = sobolev_poincare_ratios(domain, battery, RISpaceSpec.lorentz(p, 1.0), l1)
    weak = sobolev_poincare_ratios(domain, battery, RISpaceSpec.lorentz(p, math.inf), l1)
    ordered = all(weak[name] <= strong[name] * (1 + 1e-12) for name in strong)
    return GNResult(max(strong.values(), default=0.0), max(weak.values(), default=0.0), ordered)


def oscillation_gradient_constant(
    domain: GridDomain,
    f: SampledFunction,
    p: float,
    t_grid: Optional[np.ndarray] = None,
    candidates: Sequence[str] = ("median", "mean"),
) -> Tuple[float, pd.DataFrame]:
    """
    Measured constant of
    inf_c ((f-c)** - (f-c)*)(t) <= C t^{1-1/p} |grad f|**(t) for all t.

    Returns
    -------
    tuple
        (constant, curve with columns t, lhs, rhs, ratio).
    """
    _check_exponent(p, domain.n)
    _, _, G = _shifted_rearrangements(f, None, None)
    t = _t_grid(domain) if t_grid is None else np.asarray(t_grid, dtype=float)
    shifts = {"median": median_constant(f), "mean": mean_value(f), "zero": 0.0}
    lhs = np.min([oscillation(rearrange_sampled(f.shift(shifts[c])))(t) for c in candidates], axis=0)
    rhs = t ** (1.0 - 1.0 / p) * G.prefix_integral(t) / t
    curve = pd.DataFrame({"t": t, "lhs": lhs, "rhs": rhs, "ratio": lhs / rhs})
    return float(curve["ratio"].max()), curve


def self_improvement_constant(domain: GridDomain, battery: Battery, p: float, q: float) -> Tuple[float, float]:
    """
    Measured constant of ||f - f_Omega||_{L(s,q)} <= C ||grad f||_{L^q} in
    the oscillation flavor, with s = pq/(p + q - pq).

    q = p/(p-1) gives s = inf, the L(inf, q) endpoint.

    Returns
    -------
    tuple
        (constant, s).
    """
    _check_exponent(p, domain.n, strict_lower=True)
    conjugate = p / (p - 1.0)
    if not 1.0 < q <= conjugate * (1 + 1e-12):
        raise ValueError(f"q must lie in (1, {conjugate:g}], got {q}")
    denominator = p + q - p * q
    s = math.inf if abs(denominator) < 1e-12 else p * q / denominator
    target = RISpaceSpec.lorentz(s, q, "oscillation")
    return sobolev_poincare_constant(domain, battery, target, RISpaceSpec.lebesgue(q)), s


def truncation_level_constant(
    domain: GridDomain,
    f: SampledFunction,
    p: float,
    n_levels: int = 8,
    min_layer_measure: float = 0.02,
) -> Dict[str, Any]:
    """
    Measured constant of the truncation estimate
    (t2 - t1) |{|f - r_f| >= t2}|^{1/p} <= C int_{t1 < |f - r_f| <= t2} |grad f|
    over level pairs on the value grid k max|f - r_f| / n_levels, k < n_levels.

    A pair enters the supremum only when the layer {t1 < |f - r_f| <= t2}
    and the superlevel set {|f - r_f| >= t2} both have measure at least
    ``min_layer_measure``. The value grid and the measure floor do not
    depend on the resolution, so the constant converges under refinement.

    Returns
    -------
    dict
        ``measured_constant``, ``pairs`` and ``unresolved`` (pairs below
        the measure floor or whose layer carries no gradient; excluded).
    """
    _check_exponent(p, domain.n)
    if n_levels < 2:
        raise ValueError(f"n_levels must be >= 2, got {n_levels}")
    if not 0.0 < min_layer_measure < 1.0:
        raise ValueError(f"min_layer_measure must lie in (0, 1), got {min_layer_measure}")
    r_f = median_constant(f)
    w = np.abs(f.values - r_f)
    density = gradient_magnitude(f).values * domain.measures
    levels = float(np.max(w)) * np.arange(n_levels) / n_levels
    best, pairs, unresolved = 0.0, 0, 0
    for i, t1 in enumerate(levels):
        for t2 in levels[i + 1 :]:
            layer = (w > t1) & (w <= t2)
            upper = math.fsum(domain.measures[w >= t2])
            if math.fsum(domain.measures[layer]) < min_layer_measure or upper < min_layer_measure:
                unresolved += 1
                continue
            rhs = math.fsum(density[layer])
            if rhs == 0:
                unresolved += 1
                continue
            pairs += 1
            best = max(best, (t2 - t1) * upper ** (1.0 / p) / rhs)
    return {"measured_constant": best, "pairs": pairs, "unresolved": unresolved}


@dataclass(frozen=True)
class TheoremBResult:
    """Constants of the three equivalent statements and their stability."""

    c_i: float
    c_ii: float
    c_iii: float
    drift_i: float
    drift_ii: float
    drift_iii: float
    tolerance: float

    @property
    def finite_i(self) -> bool:
        return math.isfinite(self.c_i) and self.drift_i <= self.tolerance

    @property
    def finite_ii(self) -> bool:
        return math.isfinite(self.c_ii) and self.drift_ii <= self.tolerance

    @property
    def finite_iii(self) -> bool:
        return math.isfinite(self.c_iii) and self.drift_iii <= self.tolerance

    @property
    def agree(self) -> bool:
        return self.finite_i == self.finite_ii == self.finite_iii

    def to_dict(self) -> Dict[str, Any]:
        return {
            "c_i": self.c_i,
            "c_ii": self.c_ii,
            "c_iii": self.c_iii,
            "drift_i": self.drift_i,
            "drift_ii": self.drift_ii,
            "drift_iii": self.drift_iii,
            "finite_i": self.finite_i,
            "finite_ii": self.finite_ii,
            "finite_iii": self.finite_iii,
            "agree": self.agree,
        }


def _hardy_constant(scales: np.ndarray, alpha: float, source: RISpaceSpec, target: RISpaceSpec) -> float:
    return max(target.norm(hardy_apply(g, alpha)) / source.norm(g) for g in spike_steps(scales))


def _oscillation_constant(scales: np.ndarray, n: int, source: RISpaceSpec, target: RISpaceSpec) -> float:
    ratios = []
    for f in spike_monotone_steps(scales):
        denominator = source.norm(oscillation(f).multiply_power(-1.0 / n)) + f.integral()
        ratios.append(target.norm(f) / denominator)
    return max(ratios)


def _radial_constant(domain: GridDomain, source: RISpaceSpec, target: RISpaceSpec) -> float:
    ratios = []
    for _, u in radial_spike_battery(domain):
        denominator = source.norm(gradient_magnitude(u))
        if denominator > 0:
            ratios.append(target.norm(u.shift(mean_value(u))) / denominator)
    if not ratios:
        raise ValueError(f"no resolved radial test function on {domain!r}")
    return max(ratios)


def theorem_b_roundtrip(
    source: RISpaceSpec,
    target: RISpaceSpec,
    domain: GridDomain,
    fine_domain: Optional[GridDomain] = None,
    k_max: int = 12,
    tolerance: float = 0.15,
) -> TheoremBResult:
    """
    Measure the three equivalent statements for the space pair (X, Y).

    - c_ii: Hardy operator with exponent 1/n from X to Y over spike steps;
    - c_i: ||f||_Y / (||s^{-1/n} (f** - f*)||_X + ||f||_1) over
      nonincreasing spikes and staircases;
    - c_iii: ||u - u_Omega||_Y / ||grad u||_X over radial test functions.

    c_i and c_ii are compared between spike batteries down to widths
    2^{-k_max/2} and 2^{-k_max}; c_iii between ``domain`` and
    ``fine_domain`` (twice the resolution by default). A constant counts as
    finite when its drift stays within ``tolerance``.

    Raises
    ------
    ValueError
        For X = L-infinity (the maximal operator is unbounded there) or a
        battery without spikes.
    """
    if source.family == "sup":
        raise ValueError("inadmissible space pair: X = L-infinity")
    if k_max < 2:
        raise ValueError("spike battery is empty; k_max must be at least 2")
    n = domain.n
    if fine_domain is None:
        fine_domain = make_domain(domain.shape, 2 * domain.resolution, domain.params)

    small, large = spike_scales(1.0, k_max=k_max // 2), spike_scales(1.0, k_max=k_max)
    c_ii_small = _hardy_constant(small, 1.0 / n, source, target)
    c_ii = _hardy_constant(large, 1.0 / n, source, target)
    c_i_small = _oscillation_constant(small, n, source, target)
    c_i = _oscillation_constant(large, n, source, target)
    c_iii_coarse = _radial_constant(domain, source, target)
    c_iii = _radial_constant(fine_domain, source, target)

    result = TheoremBResult(
        c_i=c_i,
        c_ii=c_ii,
        c_iii=c_iii,
        drift_i=relative_drift(c_i_small, c_i),
        drift_ii=relative_drift(c_ii_small, c_ii),
        drift_iii=relative_drift(c_iii_coarse, c_iii),
        tolerance=tolerance,
    )
    if not result.agree:
        logger.warning(f"theorem B flags disagree for X={source}, Y={target}: {result.to_dict()}")
    return result


@dataclass(frozen=True, eq=False)
class HarDemoResult:
    """A finite Poincare constant next to a diverging Hardy criterion."""

    params: HardyParams
    resolutions: Tuple[int, ...]
    constants: Tuple[float, ...]
    drift: float
    tolerance: float
    criterion_diverging: bool
    fitted_exponent: Optional[float]
    predicted_exponent: float

    @property
    def inequality_holds(self) -> bool:
        return all(math.isfinite(c) for c in self.constants) and self.drift <= self.tolerance

    @property
    def exponent_error(self) -> Optional[float]:
        if self.fitted_exponent is None or self.predicted_exponent == 0:
            return None
        return abs(self.fitted_exponent - self.predicted_exponent) / abs(self.predicted_exponent)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "params": self.params.to_dict(),
            "resolutions": list(self.resolutions),
            "constants": list(self.constants),
            "drift": self.drift,
            "inequality_holds": self.inequality_holds,
            "criterion_diverging": self.criterion_diverging,
            "fitted_exponent": self.fitted_exponent,
            "predicted_exponent": self.predicted_exponent,
            "exponent_error": self.exponent_error,
        }


def proposition_har_demo(
    n: int = 2,
    s: float = 1.5,
    t: float = 1.2,
    resolutions: Sequence[int] = (64, 128),
    battery: Optional[Battery] = None,
    tolerance: float = 0.15,
    seed: int = 0,
) -> HarDemoResult:
    """
    Poincare inequality from L^t to L^r on an s-John domain, juxtaposed
    with the Maz'ya criterion of the Hardy operator for the same exponents.

    Parameters
    ----------
    n : int, optional
        Dimension; the s-John grid is two-dimensional.
    s : float, optional
        John exponent with 1 < s < n/(n-1) and s > (t-1)/(n-1).
    t : float, optional
        Gradient exponent > 1.
    resolutions : sequence of int, optional
        Two or more resolutions for the refinement drift.
    battery : TestFunctionFamily, optional
        General battery with ``seed`` by default.
    tolerance : float, optional
        Admissible drift (default: 0.15).

    Returns
    -------
    HarDemoResult

    Raises
    ------
    ValueError
        If the parameters leave the demonstration regime.
    """
    if n != 2:
        raise ValueError(f"the s-John grid is two-dimensional, got n = {n}")
    if not 1.0 < s < n / (n - 1.0):
        raise ValueError(f"s must lie in (1, {n / (n - 1.0):g}), got {s}")
    if len(resolutions) < 2:
        raise ValueError("at least two resolutions are needed")
    params = HardyParams(n, s, t, require_har=True)
    battery = battery if battery is not None else make_battery("general", seed)
    target = RISpaceSpec.lebesgue(params.r_exp)
    source = RISpaceSpec.lebesgue(params.t_exp)

    constants = []
    for resolution in resolutions:
        domain = make_domain("s_john", resolution, {"s": s})
        constants.append(sobolev_poincare_constant(domain, battery, target, source))
    criterion = mazya_criterion_sup(params)
    fitted = criterion.tail_slope if criterion.diverging else None
    result = HarDemoResult(
        params=params,
        resolutions=tuple(resolutions),
        constants=tuple(constants),
        drift=relative_drift(constants[-2], constants[-1]),
        tolerance=tolerance,
        criterion_diverging=criterion.diverging,
        fitted_exponent=fitted,
        predicted_exponent=predicted_exponent(params),
    )
    logger.info(
        f"s-John demo {params.to_dict()}: constants {constants}, criterion diverging = {criterion.diverging}"
    )
    return result


# Harness jobs of run_full_report. Each takes the plain configuration dict
# and returns a list of records.


def _section(config: Dict[str, Any], name: str) -> Dict[str, Any]:
    return config.get(name, {}) or {}


def _shape_params(config: Dict[str, Any], shape: str) -> Dict[str, float]:
    return dict(_section(config, "domains").get(shape, {}) or {})


def _shape_dimension(shape: str) -> int:
    return 1 if shape == "interval" else 2


def _admissible_p(config: Dict[str, Any], shape: str) -> float:
    p = float(_section(config, "exponents").get("p", 2.0))
    exponent = mazya_exponent(shape, _shape_params(config, shape), _shape_dimension(shape))
    return p if exponent == 0 else min(p, 1.0 / exponent)


def _battery(config: Dict[str, Any]) -> TestFunctionFamily:
    section = _section(config, "battery")
    kind = section.get("kind", "general")
    seed = int(_section(config, "verify").get("seed", 0))
    if kind == "general":
        return general_battery(seed, int(section.get("n_random", 5)))
    return make_battery(kind, seed)


def _domains(config: Dict[str, Any], shape: str) -> List[GridDomain]:
    resolutions = _section(config, "domains").get("resolutions", [64, 128])
    return [make_domain(shape, int(res), _shape_params(config, shape)) for res in resolutions]


def _tolerance(config: Dict[str, Any], key: str, default: float) -> float:
    return float(_section(config, "tolerances").get(key, default))


def _refinement_record(
    name: str,
    shape: str,
    domains: List[GridDomain],
    constants: List[float],
    tolerance: float,
    params: Dict[str, Any],
    **kwargs,
) -> InequalityRecord:
    skipped = all(c == 0 for c in constants)
    return InequalityRecord(
        name=name,
        shape=shape,
        resolution=[d.resolution for d in domains],
        params=params,
        measured_constant=constants[-1],
        refinement_drift=None if skipped else relative_drift(constants[-2], constants[-1]),
        tolerance=tolerance,
        skipped=skipped,
        **kwargs,
    )


def _job_poincare(config: Dict[str, Any]) -> List[InequalityRecord]:
    battery = _battery(config)
    tolerance = _tolerance(config, "refinement_drift", 0.10)
    records = []
    for shape in _section(config, "domains").get("shapes", []):
        p = _admissible_p(config, shape)
        domains = _domains(config, shape)
        constants = [poincare_constant(d, battery, p) for d in domains]
        records.append(_refinement_record("poincare", shape, domains, constants, tolerance, {"p": p}))
    return records


def _job_theorem_a(config: Dict[str, Any]) -> List[InequalityRecord]:
    battery = _battery(config)
    tolerance = _tolerance(config, "refinement_drift", 0.10)
    identity_tolerance = _tolerance(config, "identity", IDENTITY_TOLERANCE)
    n_points = int(_section(config, "verify").get("t_points", 200))
    spaces = [RISpaceSpec.parse(label) for label in _section(config, "spaces").get("theorem_a", ["L1"])]
    records = []
    for shape in _section(config, "domains").get("shapes", []):
        p = _admissible_p(config, shape)
        if p <= 1:
            continue
        domains = _domains(config, shape)
        best_b, best_c, curves_b, curves_c = [], [], {}, {}
        norm_constants = {space.label: [] for space in spaces}
        max_gap = 0.0
        for domain in domains:
            sup_b, sup_c = 0.0, 0.0
            norms = {space.label: 0.0 for space in spaces}
            for name, f in _members(battery, domain):
                try:
                    result = theorem_a_pointwise(domain, f, p, _t_grid(domain, n_points))
                except ValueError:
                    continue
                if result.sup_ratio_b > sup_b:
                    sup_b, curves_b[domain.resolution] = result.sup_ratio_b, result.curve_b
                if result.sup_ratio_c > sup_c:
                    sup_c, curves_c[domain.resolution] = result.sup_ratio_c, result.curve_c
                for space in spaces:
                    norm = theorem_a_norm(domain, f, p, space)
                    norms[space.label] = max(norms[space.label], norm.constant)
                    if norm.identity_gap is not None:
                        max_gap = max(max_gap, norm.identity_gap)
            best_b.append(sup_b)
            best_c.append(sup_c)
            for label, value in norms.items():
                norm_constants[label].append(value)

        params = {"p": p}
        records.append(_refinement_record("theorem_a_b", shape, domains, best_b, tolerance, params, curves=curves_b))
        records.append(_refinement_record("theorem_a_c", shape, domains, best_c, tolerance, params, curves=curves_c))
        for label, values in norm_constants.items():
            records.append(
                _refinement_record("theorem_a_norm", shape, domains, values, tolerance, {"p": p, "space": label})
            )
        records.append(
            InequalityRecord(
                name="theorem_a_l1_identity",
                shape=shape,
                resolution=[d.resolution for d in domains],
                params=params,
                measured_constant=max_gap,
                checks={"identity": max_gap <= identity_tolerance},
                skipped=all(v == 0 for v in best_b),
            )
        )
    return records


def _job_gn(config: Dict[str, Any]) -> List[InequalityRecord]:
    battery = _battery(config)
    tolerance = _tolerance(config, "refinement_drift", 0.10)
    records = []
    for shape in _section(config, "domains").get("shapes", []):
        p = _admissible_p(config, shape)
        domains = _domains(config, shape)
        results = [gn_sharp_constant(d, battery, p) for d in domains]
        ordered = {"weak_le_strong": all(r.weak_le_strong for r in results)}
        records.append(
            _refinement_record("gn_strong", shape, domains, [r.strong for r in results], tolerance, {"p": p}, checks=ordered)
        )
        records.append(
            _refinement_record("gn_weak", shape, domains, [r.weak for r in results], tolerance, {"p": p}, checks=ordered)
        )
    return records


def _job_theorem_b(config: Dict[str, Any]) -> List[InequalityRecord]:
    spaces = _section(config, "spaces")
    source = RISpaceSpec.parse(spaces.get("theorem_b_source", "L1"))
    target = RISpaceSpec.parse(spaces.get("theorem_b_target", "L(2,inf)"))
    tolerance = _tolerance(config, "theorem_b_drift", 0.15)
    domains = _domains(config, "disk")
    result = theorem_b_roundtrip(source, target, domains[-2], domains[-1], tolerance=tolerance)
    return [
        InequalityRecord(
            name="theorem_b",
            shape="disk",
            resolution=[d.resolution for d in domains[-2:]],
            params={"X": source.label, "Y": target.label},
            measured_constant=max(result.c_i, result.c_ii, result.c_iii),
            refinement_drift=max(result.drift_i, result.drift_ii, result.drift_iii),
            tolerance=tolerance,
            checks={"agree": result.agree},
            details=result.to_dict(),
        )
    ]


def _job_har(config: Dict[str, Any]) -> List[InequalityRecord]:
    har = _section(config, "exponents").get("har", {"n": 2, "s": 1.5, "t": 1.2})
    tolerance = _tolerance(config, "har_drift", 0.15)
    exponent_tolerance = _tolerance(config, "exponent_rel", 0.05)
    resolutions = _section(config, "domains").get("resolutions", [64, 128])
    result = proposition_har_demo(
        int(har["n"]),
        float(har["s"]),
        float(har["t"]),
        resolutions,
        _battery(config),
        tolerance,
    )
    error = result.exponent_error
    return [
        InequalityRecord(
            name="proposition_har",
            shape="s_john",
            resolution=list(resolutions),
            params=result.params.to_dict(),
            measured_constant=result.constants[-1],
            refinement_drift=result.drift,
            tolerance=tolerance,
            skipped=all(c == 0 for c in result.constants),
            checks={
                "criterion_diverging": result.criterion_diverging,
                "exponent": error is not None and error <= exponent_tolerance,
            },
            details=result.to_dict(),
        )
    ]


def _job_hardy(config: Dict[str, Any]) -> List[InequalityRecord]:
    section = _section(config, "hardy")
    exponent_tolerance = _tolerance(config, "exponent_rel", 0.05)
    cases = _section(config, "exponents").get("hardy_cases", [[2, 1.5, 1.2]])
    a_min = float(section.get("a_min", 1e-8))
    ratio = float(section.get("ratio", 0.8))
    records = []
    for n, s, t in cases:
        params = HardyParams(int(n), float(s), float(t))
        criterion = mazya_criterion_sup(
            params, default_a_grid(a_min, ratio), float(section.get("divergence_factor", 10.0))
        )
        predicted = predicted_exponent(params)
        if predicted < 0:
            error = (
                abs(criterion.tail_slope - predicted) / abs(predicted) if criterion.tail_slope is not None else math.inf
            )
            checks = {"diverging": criterion.diverging, "exponent": error <= exponent_tolerance}
        else:
            checks = {"bounded": not criterion.diverging}
        records.append(
            InequalityRecord(
                name="hardy_criterion",
                shape="-",
                resolution=[],
                params=params.to_dict(),
                measured_constant=criterion.sup_value,
                checks=checks,
                details={**criterion.to_dict(), "predicted_exponent": predicted},
            )
        )
    return records


def _job_polya(config: Dict[str, Any]) -> List[InequalityRecord]:
    tolerance = _tolerance(config, "refinement_drift", 0.10)
    radial_tolerance = _tolerance(config, "radial_ratio", 0.05)
    batteries = {"polya_szego_radial": radial_battery(), "polya_szego": _battery(config)}
    records = []
    for shape in ("disk", "square"):
        if shape not in _section(config, "domains").get("shapes", []):
            continue
        domains = _domains(config, shape)
        for name, battery in batteries.items():
            if name == "polya_szego_radial" and shape != "disk":
                continue
            constants, curves = [], {}
            for domain in domains:
                ball = ball_domain(2, domain.resolution)
                best = 0.0
                for _, f in _members(battery, domain):
                    result = polya_szego_check(f, ball=ball, t_grid=_t_grid(domain))
                    if not result.degenerate and result.measured_constant > best:
                        best, curves[domain.resolution] = result.measured_constant, result.curve
                constants.append(best)
            checks = {}
            if name == "polya_szego_radial":
                checks["ratio_one"] = all(abs(c - 1.0) <= radial_tolerance for c in constants)
            records.append(_refinement_record(name, shape, domains, constants, tolerance, {}, checks=checks, curves=curves))
    return records


def _job_corollary(config: Dict[str, Any]) -> List[InequalityRecord]:
    section = _section(config, "symmetrize")
    space = RISpaceSpec.parse(_section(config, "spaces").get("corollary", "L1"))
    tolerance = _tolerance(config, "corollary_drift", 0.15)
    candidates = tuple(section.get("candidates", ("median", "mean", "zero")))
    refine = bool(section.get("refine", False))
    n_magnitudes = section.get("n_magnitudes")
    battery = _battery(config)
    domains = _domains(config, "interval")
    constants, curves = [], {}
    for domain in domains:
        best = 0.0
        for _, f in _members(battery, domain):
            result = corollary_check(f, space, candidates=candidates, refine=refine, n_magnitudes=n_magnitudes)
            if not result.degenerate and result.measured_constant > best:
                best, curves[domain.resolution] = result.measured_constant, result.curve
        constants.append(best)
    records = [
        _refinement_record(
            "modulus_corollary", "interval", domains, constants, tolerance, {"space": space.label}, curves=curves
        )
    ]

    # f(x) = x with c = f_Omega on an even grid has the closed form
    # j(j-1)h / ((2j-1)(1 - (2j-1)h)) at t = (2j - 1/2)h.
    resolution = 2 * (max(domain.resolution for domain in domains) // 2)
    interval = make_domain("interval", resolution)
    h = 1.0 / resolution
    j = np.arange(2, resolution // 4)
    t = (2 * j - 0.5) * h
    exact = j * (j - 1) * h / ((2 * j - 1) * (1 - (2 * j - 1) * h))
    measured = corollary_check(
        interval.sample(lambda x: x[:, 0]), RISpaceSpec.lebesgue(1.0), t_grid=t, candidates=("mean",)
    ).curve["ratio"].to_numpy()
    error = float(np.max(np.abs(measured - exact)))
    records.append(
        InequalityRecord(
            name="modulus_corollary_closed_form",
            shape="interval",
            resolution=[resolution],
            params={"space": "L1"},
            measured_constant=error,
            checks={"closed_form": error <= 1e-6},
        )
    )
    return records


def _job_majorize(config: Dict[str, Any]) -> List[InequalityRecord]:
    section = _section(config, "majorize")
    seed = int(_section(config, "verify").get("seed", 0))
    summary = audit(
        int(section.get("n_pairs", 200)),
        seed,
        section.get("spaces", ("L1", "L2", "L(2,1)", "Linf")),
        monitor_memory=bool(_section(config, "performance").get("monitor_memory", False)),
    )
    return [
        InequalityRecord(
            name="majorization_audit",
            shape="-",
            resolution=[],
            params={"n_pairs": summary["n_pairs"], "seed": seed},
            measured_constant=summary["max_ratio"],
            checks={"audit": summary["pass"]},
            details={key: value for key, value in summary.items() if key != "failures"},
        )
    ]


def _job_sharp_forms(config: Dict[str, Any]) -> List[InequalityRecord]:
    battery = _battery(config)
    tolerance = _tolerance(config, "refinement_drift", 0.10)
    records = []
    for shape in _section(config, "domains").get("shapes", []):
        p = _admissible_p(config, shape)
        if p <= 1:
            continue
        domains = _domains(config, shape)
        q = 0.5 * (1.0 + p / (p - 1.0)) if math.isfinite(p) else 1.5
        oscillation_constants, improvement, truncation, weighted = [], [], [], []
        for domain in domains:
            members = [(name, f) for name, f in _members(battery, domain) if not f.is_constant]
            osc = [oscillation_gradient_constant(domain, f, p)[0] for _, f in members
                   if np.any(gradient_magnitude(f).values > 0)]
            oscillation_constants.append(max(osc, default=0.0))
            improvement.append(self_improvement_constant(domain, battery, p, q)[0])
            truncation.append(
                max((truncation_level_constant(domain, f, p)["measured_constant"] for _, f in members), default=0.0)
            )
            weighted.append(
                weighted_poincare_constant(
                    domain, battery, p, lambda d: boundary_distance(d) ** 0.5, lambda d: boundary_distance(d)
                )
            )
        records.append(_refinement_record("oscillation_gradient", shape, domains, oscillation_constants, tolerance, {"p": p}))
        records.append(_refinement_record("self_improvement", shape, domains, improvement, tolerance, {"p": p, "q": q}))
        records.append(_refinement_record("truncation_level", shape, domains, truncation, tolerance, {"p": p}))
        records.append(
            _refinement_record("weighted_poincare", shape, domains, weighted, tolerance, {"p": p, "h": "d^0.5", "g": "d"})
        )
    return records


JOBS: Dict[str, Callable[[Dict[str, Any]], List[InequalityRecord]]] = {
    "poincare": _job_poincare,
    "theorem_a": _job_theorem_a,
    "gn": _job_gn,
    "theorem_b": _job_theorem_b,
    "har": _job_har,
    "hardy": _job_hardy,
    "polya": _job_polya,
    "corollary": _job_corollary,
    "majorize": _job_majorize,
    "sharp_forms": _job_sharp_forms,
}


def _run_job(name: str, config: Dict[str, Any]) -> Tuple[List[InequalityRecord], Dict[str, float]]:
    """Run one job; exceptions become a single error record."""
    try:
        records, stats = profile_function(JOBS[name], config)
    except Exception as e:
        logger.error(f"Error during {name}: {e}")
        error = InequalityRecord(
            name=name, shape="-", resolution=[], params={}, measured_constant=math.nan, error=f"Error during {name}: {e}"
        )
        return [error], {}
    logger.info(f"{name}: {len(records)} records in {stats['execution_time']:.2f} s")
    return records, stats


def _report_config(config: Dict[str, Any]) -> Dict[str, Any]:
    return {key: value for key, value in config.items() if key not in ("paths", "performance")}


def run_full_report(config: Any) -> Tuple[VerificationReport, Dict[str, Dict[str, float]]]:
    """
    Run every configured harness and assemble a VerificationReport.

    Parameters
    ----------
    config : Configuration or dict
        Configuration; ``verify.checks`` selects the jobs and
        ``performance.n_workers`` > 1 runs them in worker processes.

    Returns
    -------
    tuple
        (report, timings). Timings are kept out of the report so that equal
        configurations give byte-identical reports.
    """
    config = config.config if hasattr(config, "config") else dict(config)
    seed = int(_section(config, "verify").get("seed", 0))
    issues = ConfigValidator().validate(config)
    if issues:
        message = "; ".join(f"{key}: {', '.join(values)}" for key, values in sorted(issues.items()))
        error = InequalityRecord(
            name="configuration", shape="-", resolution=[], params={}, measured_constant=math.nan, error=message
        )
        return VerificationReport([error], seed, to_jsonable(_report_config(config))), {}

    checks = list(_section(config, "verify").get("checks", list(JOBS)))
    unknown = [name for name in checks if name not in JOBS]
    records: List[InequalityRecord] = [
        InequalityRecord(
            name=name, shape="-", resolution=[], params={}, measured_constant=math.nan, error=f"Unknown check: {name}"
        )
        for name in unknown
    ]
    checks = [name for name in checks if name in JOBS]
    n_workers = int(_section(config, "performance").get("n_workers", 1))

    timings: Dict[str, Dict[str, float]] = {}
    if n_workers > 1 and len(checks) > 1:
        with ProcessPoolExecutor(max_workers=n_workers) as executor:
            outcomes = list(executor.map(_run_job, checks, [config] * len(checks)))
    else:
        outcomes = [_run_job(name, config) for name in checks]
    for name, (job_records, stats) in zip(checks, outcomes):
        records.extend(job_records)
        timings[name] = stats

    report = VerificationReport(records, seed, to_jsonable(_report_config(config)))
    logger.info(f"verification report: {report.summary()}")
    return report, timings
