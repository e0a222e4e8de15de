"""
Majorization module for the symtrunc package.

This module contains the two-hypothesis majorization lemma on (0, 1]:
if g <= C1 h** pointwise and int_0^t g <= C2 int_0^t h*, then
int_0^t g* <= 4 max(C1, C2) int_0^t h*. It provides exact evaluation of the
hypothesis constants and of the majorization constant, constructive
certificates for finite interval families, an independent certificate
checker, and a randomized audit of the constant 4.

Functions are extended by zero beyond t = 1, so intervals reaching past 1
are allowed.
"""

import json
import math
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import optimize

from symtrunc.core.spaces import RISpaceSpec
from symtrunc.core.stepfn import MonotoneStep, StepFunction, maximal_average, rearrange_step
from symtrunc.core.validation import check_interval_family, check_nonnegative
from symtrunc.utils.progress import track_progress

logger = logging.getLogger(__name__)

REL_TOL = 1e-9
ABS_TOL = 1e-14
BISECTION_ITERATIONS = 60
LOG_SUM_TARGET = 2.0
FINAL_FACTOR = 4.0
DEFAULT_AUDIT_SPACES = ("L1", "L2", "L(2,1)", "Linf")


def _holds(lhs: float, rhs: float) -> bool:
    return lhs <= rhs * (1.0 + REL_TOL) + ABS_TOL


@dataclass(frozen=True, eq=False)
class IntervalFamily:
    """
    Ordered disjoint intervals (a_i, b_i) with 0 < a_1 < b_1 <= a_2 < ... < b_m.

    Attributes
    ----------
    a : np.ndarray
        Left endpoints.
    b : np.ndarray
        Right endpoints.
    """

    a: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        a = np.array(self.a, dtype=float)
        b = np.array(self.b, dtype=float)
        check_interval_family(a, b)
        a.setflags(write=False)
        b.setflags(write=False)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @classmethod
    def from_pairs(cls, pairs: Sequence[Tuple[float, float]]) -> "IntervalFamily":
        pairs = list(pairs)
        if not pairs:
            raise ValueError("interval family needs m >= 1 intervals")
        return cls([p[0] for p in pairs], [p[1] for p in pairs])

    @property
    def m(self) -> int:
        return int(self.a.size)

    @property
    def lengths(self) -> np.ndarray:
        return self.b - self.a

    @property
    def log_ratios(self) -> np.ndarray:
        return np.log(self.b / self.a)

    @property
    def total_length(self) -> float:
        return math.fsum(self.lengths)

    def to_dict(self) -> Dict[str, list]:
        return {"intervals": [[float(a), float(b)] for a, b in zip(self.a, self.b)]}

    @classmethod
    def from_dict(cls, data: Dict[str, list]) -> "IntervalFamily":
        try:
            return cls.from_pairs(data["intervals"])
        except KeyError as e:
            raise ValueError(f"interval family JSON is missing field {e}")


@dataclass(frozen=True)
class HypothesisConstants:
    """Smallest constants in g <= C1 h** and int_0^t g <= C2 int_0^t h*."""

    C1: float
    C2: float

    @property
    def constant(self) -> float:
        return max(self.C1, self.C2)

    @property
    def finite(self) -> bool:
        return math.isfinite(self.C1) and math.isfinite(self.C2)

    def to_dict(self) -> Dict[str, float]:
        return {"C1": self.C1, "C2": self.C2}


@dataclass(frozen=True)
class SubBound:
    """One inequality lhs <= rhs of the certificate chain."""

    name: str
    lhs: float
    rhs: float

    @property
    def holds(self) -> bool:
        return _holds(self.lhs, self.rhs)

    def to_dict(self) -> Dict[str, object]:
        return {"name": self.name, "lhs": self.lhs, "rhs": self.rhs, "holds": self.holds}


@dataclass(frozen=True)
class MajorizationCertificate:
    """
    Constructive witness of sum_i int_{a_i}^{b_i} g <= 4c int_0^{sum(b_i - a_i)} h*.

    Attributes
    ----------
    branch : str
        'direct_j1' when sum log(b_i/a_i) <= 1, otherwise 'split_j0'.
    j0 : int
        Zero-based index of the split interval (0 on the direct branch).
    c_split : float
        Split point in [a_j0, b_j0] (a_0 on the direct branch).
    log_sum : float
        log(b_j0/c_split) + sum_{i > j0} log(b_i/a_i).
    constants : HypothesisConstants
        Constants the certificate is claimed with.
    sub_bounds : tuple of SubBound
        The partial-sum estimates of the final chain.
    """

    branch: str
    j0: int
    c_split: float
    log_sum: float
    constants: HypothesisConstants
    sub_bounds: Tuple[SubBound, ...] = field(default_factory=tuple)

    @property
    def valid(self) -> bool:
        return all(bound.holds for bound in self.sub_bounds)

    def to_dict(self) -> Dict[str, object]:
        return {
            "branch": self.branch,
            "j0": self.j0,
            "c_split": self.c_split,
            "log_sum": self.log_sum,
            "constants": self.constants.to_dict(),
            "sub_bounds": [bound.to_dict() for bound in self.sub_bounds],
        }


@dataclass(frozen=True)
class CertificateCheck:
    """Result of re-checking a certificate; falsy when an inequality fails."""

    valid: bool
    violated: Optional[str] = None

    def __bool__(self) -> bool:
        return self.valid


def _cumulative(f: StepFunction, t: float) -> float:
    """int_0^t f with f extended by zero beyond 1."""
    t = min(float(t), 1.0)
    if t <= 0:
        return 0.0
    return float(f.prefix_integral(t))


def _interval_integral(f: StepFunction, lo: float, hi: float) -> float:
    return _cumulative(f, hi) - _cumulative(f, lo)


def _ratio(numerator: np.ndarray, denominator: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = numerator / denominator
    ratio = np.where(numerator <= 0, 0.0, ratio)
    return np.where((denominator <= 0) & (numerator > 0), math.inf, ratio)


def _prefix_ratio_sup(numerator: StepFunction, denominator: MonotoneStep) -> float:
    """
    sup_t int_0^t numerator / int_0^t denominator.

    On each common piece the ratio is a Moebius function of t and hence
    monotone, so the supremum is attained at a common breakpoint or in the
    limit t -> 0, where it equals the ratio of the first values.
    """
    grid = np.union1d(numerator.breakpoints, denominator.breakpoints)[1:]
    top = numerator.prefix_integral(grid)
    bottom = denominator.prefix_integral(grid)
    limit = _ratio(np.array([numerator.values[0]]), np.array([denominator.values[0]]))
    return float(max(np.max(_ratio(top, bottom)), limit[0]))


def check_hypotheses(g: StepFunction, h: StepFunction) -> HypothesisConstants:
    """
    Exact hypothesis constants of the majorization lemma.

    Parameters
    ----------
    g : StepFunction
        Nonnegative step function.
    h : StepFunction
        Nonnegative step function.

    Returns
    -------
    HypothesisConstants
        C1 = sup g/h** (attained at right piece ends since h** is
        nonincreasing) and C2 = sup int_0^t g / int_0^t h*. Both are
        infinite when h vanishes and g does not.
    """
    check_nonnegative(g.values, "g")
    check_nonnegative(h.values, "h")
    h_star = rearrange_step(h)
    right_ends = np.union1d(g.breakpoints, h_star.breakpoints)[1:]
    average = maximal_average(h_star)(right_ends)
    c1 = float(np.max(_ratio(g(right_ends), average)))
    c2 = _prefix_ratio_sup(g, h_star)
    if not (math.isfinite(c1) and math.isfinite(c2)):
        logger.warning("h vanishes identically while g does not; hypotheses are unsatisfiable")
    return HypothesisConstants(c1, c2)


def majorization_constant(g: StepFunction, h: StepFunction) -> float:
    """
    Exact sup_t int_0^t g* / int_0^t h*.

    Returns
    -------
    float
        1 for g = h or any rearrangement of h's pieces; infinite when h
        vanishes and g does not.
    """
    return _prefix_ratio_sup(rearrange_step(g), rearrange_step(h))


def dd_bound(
    g: StepFunction,
    h: StepFunction,
    family: IntervalFamily,
    j: int,
    constant: Optional[float] = None,
) -> Tuple[float, float]:
    """
    Both sides of the tail estimate
    sum_{i>=j} int_{a_i}^{b_i} g <= C (1 + sum_{i>=j} log(b_i/a_i)) int_0^{L_j} h*,
    with L_j = sum_{i>=j} (b_i - a_i).

    Parameters
    ----------
    g, h : StepFunction
        Nonnegative step functions.
    family : IntervalFamily
        Interval family.
    j : int
        Zero-based first interval of the tail.
    constant : float, optional
        Pointwise constant C (C1 from check_hypotheses by default).

    Returns
    -------
    tuple of float
        (lhs, rhs).
    """
    if not 0 <= j < family.m:
        raise ValueError(f"j must lie in [0, {family.m}), got {j}")
    if constant is None:
        constant = check_hypotheses(g, h).C1
    h_star = rearrange_step(h)
    lhs = math.fsum(_interval_integral(g, a, b) for a, b in zip(family.a[j:], family.b[j:]))
    log_sum = math.fsum(family.log_ratios[j:])
    rhs = constant * (1.0 + log_sum) * _cumulative(h_star, math.fsum(family.lengths[j:]))
    return lhs, rhs


def _split_point(a: float, b: float, tail: float) -> float:
    """c in [a, b] with log(b/c) + tail = 2, found by bisection."""

    def excess(c: float) -> float:
        return math.log(b / c) + tail - LOG_SUM_TARGET

    if excess(a) <= 0:
        return a
    c = optimize.bisect(excess, a, b, xtol=1e-15 * b, maxiter=BISECTION_ITERATIONS, disp=False)
    # keep log_sum <= 2 after rounding
    while excess(c) > 0 and c < b:
        c = float(np.nextafter(c, b))
    return float(c)


def _sub_bounds(
    g: StepFunction,
    h_star: MonotoneStep,
    family: IntervalFamily,
    constants: HypothesisConstants,
    branch: str,
    j0: int,
    c_split: float,
    log_sum: float,
) -> Tuple[SubBound, ...]:
    total = math.fsum(_interval_integral(g, a, b) for a, b in zip(family.a, family.b))
    full_mass = _cumulative(h_star, family.total_length)
    final = SubBound("final_4c", total, FINAL_FACTOR * constants.constant * full_mass)
    if branch == "direct_j1":
        return (SubBound("dd", total, constants.C1 * (1.0 + log_sum) * full_mass), final)

    a, b = family.a, family.b
    tail_length = (b[j0] - c_split) + math.fsum(family.lengths[j0 + 1 :])
    tail_mass = _cumulative(h_star, tail_length)
    head = math.fsum(_interval_integral(g, a[i], b[i]) for i in range(j0)) + _interval_integral(g, a[j0], c_split)
    tail = _interval_integral(g, c_split, b[j0]) + math.fsum(
        _interval_integral(g, a[i], b[i]) for i in range(j0 + 1, family.m)
    )
    return (
        SubBound("head", head, constants.C2 * tail_mass),
        SubBound("dd", tail, constants.C1 * (1.0 + log_sum) * tail_mass),
        final,
    )


def interval_bound_certificate(
    g: StepFunction,
    h: StepFunction,
    family: IntervalFamily,
    constants: Optional[HypothesisConstants] = None,
) -> MajorizationCertificate:
    """
    Build the constructive certificate for one interval family.

    When sum log(b_i/a_i) <= 1 the tail estimate at the first interval
    already gives the bound. Otherwise j0 is the largest index whose tail
    log-sum exceeds 1, and c_split solves log(b_j0/c) + tail = 2 (or equals
    a_j0 when the full tail log-sum stays below 2).

    Parameters
    ----------
    g, h : StepFunction
        Nonnegative step functions.
    family : IntervalFamily
        Ordered disjoint intervals.
    constants : HypothesisConstants, optional
        Claimed constants; measured exactly by default.

    Returns
    -------
    MajorizationCertificate

    Raises
    ------
    ValueError
        If the hypotheses fail (infinite constants, or measured constants
        above the claimed ones).
    """
    measured = check_hypotheses(g, h)
    if not measured.finite:
        raise ValueError("hypotheses violated: h vanishes while g does not")
    if constants is None:
        constants = measured
    elif not (_holds(measured.C1, constants.C1) and _holds(measured.C2, constants.C2)):
        raise ValueError(f"hypotheses violated: measured {measured.to_dict()} exceed claimed {constants.to_dict()}")

    logs = family.log_ratios
    suffix = np.cumsum(logs[::-1])[::-1]
    if suffix[0] <= 1.0:
        branch, j0, c_split, log_sum = "direct_j1", 0, float(family.a[0]), float(math.fsum(logs))
    else:
        branch = "split_j0"
        j0 = int(np.flatnonzero(suffix > 1.0)[-1])
        tail = math.fsum(logs[j0 + 1 :])
        c_split = _split_point(float(family.a[j0]), float(family.b[j0]), tail)
        log_sum = math.log(family.b[j0] / c_split) + tail

    h_star = rearrange_step(h)
    bounds = _sub_bounds(g, h_star, family, constants, branch, j0, c_split, log_sum)
    certificate = MajorizationCertificate(branch, j0, c_split, log_sum, constants, bounds)
    logger.debug(f"certificate {branch} j0={j0} log_sum={log_sum:.6f} for m={family.m}")
    return certificate


def verify_certificate(
    certificate: MajorizationCertificate,
    g: StepFunction,
    h: StepFunction,
    family: IntervalFamily,
) -> CertificateCheck:
    """
    Re-check every inequality of a certificate from scratch.

    Checks run in the order branch, c_range, dd1, aa1, log_sum,
    hypotheses, then the chain (head, dd, final_4c); the first failure is
    named in the result.

    Returns
    -------
    CertificateCheck
        Truthy iff every inequality holds with the claimed constants.
    """
    logs = family.log_ratios
    total_log = math.fsum(logs)
    j0, c = certificate.j0, certificate.c_split

    if certificate.branch == "direct_j1":
        if total_log > 1.0 or j0 != 0:
            return CertificateCheck(False, "branch")
        log_sum = total_log
    elif certificate.branch == "split_j0":
        if total_log <= 1.0 or not 0 <= j0 < family.m:
            return CertificateCheck(False, "branch")
        if not family.a[j0] <= c <= family.b[j0]:
            return CertificateCheck(False, "c_range")
        log_sum = math.log(family.b[j0] / c) + math.fsum(logs[j0 + 1 :])
        if not 1.0 < log_sum <= LOG_SUM_TARGET * (1.0 + REL_TOL):
            return CertificateCheck(False, "dd1")
        tail_length = (family.b[j0] - c) + math.fsum(family.lengths[j0 + 1 :])
        if not c < tail_length:
            return CertificateCheck(False, "aa1")
    else:
        return CertificateCheck(False, "branch")

    if abs(log_sum - certificate.log_sum) > 1e-12 * max(1.0, abs(log_sum)):
        return CertificateCheck(False, "log_sum")

    measured = check_hypotheses(g, h)
    claimed = certificate.constants
    if not (_holds(measured.C1, claimed.C1) and _holds(measured.C2, claimed.C2)):
        return CertificateCheck(False, "hypotheses")

    recomputed = _sub_bounds(g, rearrange_step(h), family, claimed, certificate.branch, j0, c, log_sum)
    for bound in recomputed:
        if not bound.holds:
            return CertificateCheck(False, bound.name)
    return CertificateCheck(True)


def certificate_to_json(certificate: MajorizationCertificate) -> str:
    """Serialize a certificate with sorted keys."""
    return json.dumps(certificate.to_dict(), sort_keys=True, indent=2)


def _random_lengths(rng: np.random.Generator, k: int) -> np.ndarray:
    lengths = rng.dirichlet(np.ones(k))
    return np.maximum(lengths, 1e-6) / np.sum(np.maximum(lengths, 1e-6))


def random_pair(rng: np.random.Generator, max_pieces: int = 8) -> Tuple[StepFunction, StepFunction]:
    """
    Random nonnegative (g, h) with finite hypothesis constants.

    g is drawn as an independent step function, as a damped copy of h** on a
    geometric grid (the regime where the pointwise hypothesis is tight), or
    as a permutation of h's pieces.
    """
    k = int(rng.integers(1, max_pieces + 1))
    h = StepFunction.from_lengths(_random_lengths(rng, k), rng.exponential(1.0, k) + 1e-3)
    kind = int(rng.integers(3))
    if kind == 0:
        k_g = int(rng.integers(1, max_pieces + 1))
        values = rng.exponential(1.0, k_g) * (rng.random(k_g) > 0.2)
        g = StepFunction.from_lengths(_random_lengths(rng, k_g), values)
    elif kind == 1:
        k_g = int(rng.integers(2, max_pieces + 2))
        inner = np.geomspace(10.0 ** (-rng.uniform(1.0, 4.0)), 1.0, k_g)
        inner[-1] = 1.0
        breakpoints = np.concatenate(([0.0], inner))
        values = maximal_average(h)(breakpoints[1:]) * rng.uniform(0.25, 1.0, k_g)
        g = StepFunction(breakpoints, values)
    else:
        order = rng.permutation(h.n_pieces)
        g = StepFunction.from_lengths(h.lengths[order], h.values[order])
    return g, h


def random_family(rng: np.random.Generator, max_intervals: int = 6) -> IntervalFamily:
    """Random interval family in (0, 1] with log-uniform endpoints."""
    m = int(rng.integers(1, max_intervals + 1))
    while True:
        points = np.sort(10.0 ** rng.uniform(-4.0, 0.0, 2 * m))
        if np.unique(points).size == 2 * m:
            return IntervalFamily(points[0::2], points[1::2])


def audit(
    n_pairs: int = 200,
    seed: int = 0,
    spaces: Sequence[str] = DEFAULT_AUDIT_SPACES,
    monitor_memory: bool = False,
) -> Dict[str, object]:
    """
    Randomized audit of the majorization constant 4.

    For each seeded pair the normalized constant
    majorization_constant / max(C1, C2) is compared against 4, a
    certificate is built for a random family and re-checked, the tail
    estimate is tested at every j, and ||g||_X <= 4c ||h||_X is checked for
    each listed space.

    Parameters
    ----------
    n_pairs : int, optional
        Number of random pairs (default: 200).
    seed : int, optional
        Base seed; pair i uses the seed sequence (seed, i).
    spaces : sequence of str, optional
        Space labels for the norm consequence.
    monitor_memory : bool, optional
        Show resident memory on the progress bar and log its peak.

    Returns
    -------
    dict
        max_ratio, bound, pass, n_pairs, certificates, certificates_valid,
        branches and failures.
    """
    if n_pairs < 1:
        raise ValueError(f"audit needs at least one pair, got {n_pairs}")
    parsed = [RISpaceSpec.parse(label) for label in spaces]
    max_ratio = 0.0
    issued = 0
    valid = 0
    branches = {"direct_j1": 0, "split_j0": 0}
    failures: List[Dict[str, object]] = []

    pairs = track_progress(range(n_pairs), desc="majorization audit", unit="pairs", memory_monitoring=monitor_memory)
    for i in pairs:
        rng = np.random.default_rng([seed, i])
        g, h = random_pair(rng)
        constants = check_hypotheses(g, h)
        c = constants.constant
        if c == 0:
            continue
        ratio = majorization_constant(g, h) / c
        max_ratio = max(max_ratio, ratio)
        if not _holds(ratio, FINAL_FACTOR):
            failures.append({"pair": i, "check": "majorization", "ratio": ratio})

        family = random_family(rng)
        certificate = interval_bound_certificate(g, h, family, constants)
        issued += 1
        branches[certificate.branch] += 1
        check = verify_certificate(certificate, g, h, family)
        if check:
            valid += 1
        else:
            failures.append({"pair": i, "check": check.violated})

        for j in range(family.m):
            lhs, rhs = dd_bound(g, h, family, j, constants.C1)
            if not _holds(lhs, rhs):
                failures.append({"pair": i, "check": f"dd_j{j}", "lhs": lhs, "rhs": rhs})

        for space in parsed:
            if not _holds(space.norm(g), FINAL_FACTOR * c * space.norm(h)):
                failures.append({"pair": i, "check": f"norm_{space.label}"})

    summary = {
        "n_pairs": n_pairs,
        "seed": seed,
        "max_ratio": max_ratio,
        "bound": FINAL_FACTOR,
        "certificates": issued,
        "certificates_valid": valid,
        "branches": branches,
        "failures": failures,
        "pass": not failures,
    }
    logger.info(f"majorization audit: max ratio {max_ratio:.4f} over {n_pairs} pairs, {len(failures)} failures")
    return summary
