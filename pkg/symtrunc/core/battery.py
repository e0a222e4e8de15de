"""
Test function batteries for the symtrunc package.

This module contains the families of analytic test functions sampled on
model domains (affine maps, radial bumps, tensor sinusoids,
distance-to-boundary powers, seeded random Fourier sums and radial Hardy
profiles) and the spike batteries of step functions on (0, 1] used by the
Hardy-operator round trip.
"""

import logging
from typing import Callable, Dict, Iterator, List, Optional, Tuple

import numpy as np
from scipy.spatial import cKDTree

from symtrunc.core.domain import GridDomain, SampledFunction
from symtrunc.core.hardy import radial_test_function
from symtrunc.core.stepfn import MonotoneStep, StepFunction

logger = logging.getLogger(__name__)

Generator = Callable[[GridDomain], np.ndarray]

MIN_BATTERY_SIZE = 20
SPIKE_MIN_CELLS = 32


class TestFunctionFamily:
    """
    A named, ordered collection of test function generators.

    Each generator maps a GridDomain to one value per cell, so the same
    family can be sampled on several resolutions for refinement studies.

    Attributes
    ----------
    name : str
        Family name used in reports.
    generators : dict
        Ordered mapping from member name to generator.
    """

    __test__ = False

    def __init__(self, name: str, generators: Dict[str, Generator]):
        if not generators:
            raise ValueError("a test function family needs at least one member")
        self.name = name
        self.generators = dict(generators)

    def __len__(self) -> int:
        return len(self.generators)

    @property
    def names(self) -> List[str]:
        return list(self.generators)

    def sample(self, domain: GridDomain) -> List[Tuple[str, SampledFunction]]:
        """
        Sample every member on a domain.

        Raises
        ------
        ValueError
            If a member produces non-finite values.
        """
        members = []
        for name, generator in self.generators.items():
            values = np.asarray(generator(domain), dtype=float)
            if not np.all(np.isfinite(values)):
                raise ValueError(f"battery member {name} is not finite on {domain!r}")
            members.append((name, SampledFunction(domain, values)))
        return members

    def __iter__(self) -> Iterator[str]:
        return iter(self.generators)

    def __repr__(self) -> str:
        return f"TestFunctionFamily(name={self.name!r}, size={len(self)})"


def _relative(domain: GridDomain) -> np.ndarray:
    return domain.centers - domain.center


def _affine(direction: np.ndarray) -> Generator:
    def generate(domain: GridDomain) -> np.ndarray:
        weights = np.resize(direction, domain.n)
        return domain.centers @ weights

    return generate


def _radial_bump(radius: float, power: float) -> Generator:
    def generate(domain: GridDomain) -> np.ndarray:
        r = np.linalg.norm(_relative(domain), axis=1)
        return np.clip(1.0 - (r / radius) ** 2, 0.0, None) ** power

    return generate


def _sinusoid(kx: int, ky: int) -> Generator:
    def generate(domain: GridDomain) -> np.ndarray:
        x = domain.centers
        value = np.cos(np.pi * kx * x[:, 0])
        if domain.n > 1:
            value = value * np.cos(np.pi * ky * x[:, 1])
        return value

    return generate


def boundary_distance(domain: GridDomain) -> np.ndarray:
    """
    Distance from each cell center to the boundary of the grid domain.

    Approximated by the distance to the nearest lattice cell outside the
    domain (one padding layer included) minus half a spacing.
    """
    member = domain.index_grid >= 0
    padded = np.pad(member, 1, constant_values=False)
    outside = np.argwhere(~padded) - 1
    origin = domain.centers[0] - domain.lattice[0] * domain.spacing
    outside_centers = origin + outside * domain.spacing
    distance, _ = cKDTree(outside_centers).query(domain.centers)
    return np.maximum(distance - 0.5 * float(np.min(domain.spacing)), 0.0)


def _distance_power(gamma: float) -> Generator:
    def generate(domain: GridDomain) -> np.ndarray:
        return boundary_distance(domain) ** gamma

    return generate


def _random_fourier(seed: int, index: int, n_modes: int = 4) -> Generator:
    def generate(domain: GridDomain) -> np.ndarray:
        rng = np.random.default_rng([seed, index])
        x = domain.centers
        total = np.zeros(domain.n_cells)
        for k in np.ndindex(*(n_modes,) * domain.n):
            wave = np.asarray(k, dtype=float)
            if not np.any(wave):
                continue
            amplitude = rng.normal() / (1.0 + wave @ wave)
            phase = rng.uniform(0.0, 2.0 * np.pi)
            total += amplitude * np.cos(np.pi * (x @ wave) + phase)
        return total

    return generate


def _radial_hardy(fraction: float) -> Generator:
    def generate(domain: GridDomain) -> np.ndarray:
        sigma = domain.inscribed_ball_measure
        profile = StepFunction.indicator(fraction * sigma, 1.0 / (fraction * sigma))
        return radial_test_function(profile, domain).values

    return generate


def general_battery(seed: int = 0, n_random: int = 5) -> TestFunctionFamily:
    """
    The default battery of at least 20 smooth and radial test functions.

    Parameters
    ----------
    seed : int, optional
        Seed of the random Fourier members.
    n_random : int, optional
        Number of random Fourier members.
    """
    generators: Dict[str, Generator] = {
        "affine_x": _affine(np.array([1.0, 0.0])),
        "affine_y": _affine(np.array([0.0, 1.0])),
        "affine_diag": _affine(np.array([1.0, 1.0])),
    }
    for radius in (0.15, 0.3):
        for power in (1.0, 2.0):
            generators[f"bump_r{radius:g}_k{power:g}"] = _radial_bump(radius, power)
    for kx, ky in ((1, 0), (1, 1), (2, 1), (3, 2)):
        generators[f"sin_{kx}_{ky}"] = _sinusoid(kx, ky)
    for gamma in (0.5, 1.0, 2.0):
        generators[f"dist_pow{gamma:g}"] = _distance_power(gamma)
    for index in range(n_random):
        generators[f"fourier_{seed}_{index}"] = _random_fourier(seed, index)
    for fraction in (0.25, 0.5, 1.0):
        generators[f"hardy_{fraction:g}"] = _radial_hardy(fraction)
    family = TestFunctionFamily("general", generators)
    if len(family) < MIN_BATTERY_SIZE:
        logger.warning(f"general battery has only {len(family)} members")
    return family


def radial_battery() -> TestFunctionFamily:
    """
    Radially nonincreasing bumps around the domain centre.

    Every support has measure below 1/2 on the disk, so the median is 0.
    """
    generators = {}
    for radius in (0.15, 0.25, 0.35):
        for power in (1.0, 2.0, 3.0):
            generators[f"bump_r{radius:g}_k{power:g}"] = _radial_bump(radius, power)
    return TestFunctionFamily("radial", generators)


def trivial_battery() -> TestFunctionFamily:
    """Constant functions only; every harness skips them."""
    return TestFunctionFamily(
        "trivial",
        {f"constant_{c:g}": (lambda domain, c=c: np.full(domain.n_cells, c)) for c in (0.0, 1.0, -2.5)},
    )


BATTERIES = {
    "general": general_battery,
    "radial": lambda seed=0: radial_battery(),
    "trivial": lambda seed=0: trivial_battery(),
}


def make_battery(kind: str, seed: int = 0) -> TestFunctionFamily:
    """Battery factory used by the configuration layer."""
    if kind not in BATTERIES:
        raise ValueError(f"Unknown battery kind: {kind}")
    return BATTERIES[kind](seed=seed)


def spike_scales(sigma: float, cell_measure: Optional[float] = None, k_max: int = 12) -> np.ndarray:
    """
    Spike widths sigma 2^{-k}.

    With a cell measure the widths stop at SPIKE_MIN_CELLS cell measures,
    otherwise at k = k_max.
    """
    if not 0 < sigma <= 1:
        raise ValueError(f"sigma must lie in (0, 1], got {sigma}")
    scales = sigma * 2.0 ** -np.arange(k_max + 1)
    if cell_measure is not None:
        scales = scales[scales >= SPIKE_MIN_CELLS * cell_measure]
    if scales.size == 0:
        raise ValueError("no spike is resolved at this cell measure")
    return scales


def spike_steps(scales: np.ndarray) -> List[StepFunction]:
    """
    L1-normalized spikes (1/eps) chi_(0, eps] and shifted spikes
    (1/eps) chi_(eps, 2 eps].
    """
    battery: List[StepFunction] = []
    for eps in scales:
        battery.append(StepFunction.indicator(eps, 1.0 / eps))
        if 2.0 * eps < 1.0:
            battery.append(StepFunction([0.0, eps, 2.0 * eps, 1.0], [0.0, 1.0 / eps, 0.0]))
    return battery


def spike_monotone_steps(scales: np.ndarray) -> List[MonotoneStep]:
    """
    Nonincreasing spikes and dyadic staircases
    sum_{j <= k} chi_(0, eps_j] / (eps_j (k + 1)).
    """
    battery: List[MonotoneStep] = []
    for k, eps in enumerate(scales):
        spike = StepFunction.indicator(eps, 1.0 / eps)
        battery.append(MonotoneStep(spike.breakpoints, spike.values))
        widths = scales[: k + 1]
        if widths.size > 1:
            ends = np.sort(widths)
            breakpoints = np.concatenate(([0.0], ends, [1.0] if ends[-1] < 1.0 else []))
            values = np.array([np.sum(1.0 / widths[widths >= end]) for end in ends]) / (k + 1)
            if breakpoints.size == values.size + 2:
                values = np.concatenate((values, [0.0]))
            battery.append(MonotoneStep(breakpoints, values))
    return battery


def radial_spike_battery(domain: GridDomain) -> List[Tuple[str, SampledFunction]]:
    """Radial test functions built from spikes resolved on the domain."""
    scales = spike_scales(domain.inscribed_ball_measure, domain.cell_measure)
    return [
        (f"radial_spike_{k}", radial_test_function(StepFunction.indicator(eps, 1.0 / eps), domain))
        for k, eps in enumerate(scales)
    ]
