"""
Rearrangement-invariant spaces for the symtrunc package.

This module contains RISpaceSpec, a descriptor of the norms used throughout
the package (Lebesgue L^p, Lorentz L(p,q) in the classical or oscillation
flavor, and L-infinity), together with its fundamental function.
"""

import math
import re
import logging
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from symtrunc.core.stepfn import PowerCurve, StepFunction, lorentz_norm, rearrange_step
from symtrunc.core.validation import check_exponents, optional_float

logger = logging.getLogger(__name__)

FAMILIES = ("lebesgue", "lorentz", "sup")


def _format_exponent(value: float) -> str:
    return "inf" if math.isinf(value) else f"{value:g}"


@dataclass(frozen=True)
class RISpaceSpec:
    """
    Descriptor of a rearrangement-invariant norm on (0, 1] or on a domain.

    Attributes
    ----------
    family : str
        'lebesgue', 'lorentz' or 'sup'.
    p : float
        Primary exponent.
    q : float
        Secondary (Lorentz) exponent.
    flavor : str
        'classical' or 'oscillation' (Lorentz family only).
    """

    family: str
    p: float = 1.0
    q: float = 1.0
    flavor: str = "classical"

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"Unknown space family: {self.family}")
        if self.family == "lebesgue":
            if math.isinf(self.p):
                raise ValueError("use RISpaceSpec.sup_norm() for L-infinity")
            check_exponents(self.p, self.p, "classical")
        elif self.family == "lorentz":
            check_exponents(self.p, self.q, self.flavor)

    @classmethod
    def lebesgue(cls, p: float) -> "RISpaceSpec":
        if math.isinf(p):
            return cls.sup_norm()
        return cls("lebesgue", p, p)

    @classmethod
    def lorentz(cls, p: float, q: float, flavor: str = "classical") -> "RISpaceSpec":
        return cls("lorentz", p, q, flavor)

    @classmethod
    def sup_norm(cls) -> "RISpaceSpec":
        return cls("sup", math.inf, math.inf)

    @classmethod
    def parse(cls, label: str) -> "RISpaceSpec":
        """
        Parse a space label.

        Accepted forms are ``L1``, ``L2.5``, ``Linf``, ``L(2,inf)`` and
        ``Losc(inf,2)``.

        Raises
        ------
        ValueError
            If the label is not recognised.
        """
        text = label.replace(" ", "")
        match = re.fullmatch(r"L(osc)?\(([^,()]+),([^,()]+)\)", text)
        if match:
            flavor = "oscillation" if match.group(1) else "classical"
            return cls.lorentz(optional_float(match.group(2)), optional_float(match.group(3)), flavor)
        match = re.fullmatch(r"L([^()]+)", text)
        if match:
            try:
                p = optional_float(match.group(1))
            except ValueError:
                raise ValueError(f"Unrecognised space label: {label}")
            if p is not None:
                return cls.lebesgue(p)
        raise ValueError(f"Unrecognised space label: {label}")

    @property
    def label(self) -> str:
        if self.family == "sup":
            return "Linf"
        if self.family == "lebesgue":
            return f"L{_format_exponent(self.p)}"
        prefix = "Losc" if self.flavor == "oscillation" else "L"
        return f"{prefix}({_format_exponent(self.p)},{_format_exponent(self.q)})"

    def norm_step(self, f: StepFunction) -> float:
        """Norm of a step function on (0, 1]."""
        if self.family == "sup":
            return float(np.max(np.abs(f.values)))
        if self.family == "lebesgue":
            return lorentz_norm(f, self.p, self.p, "classical")
        return lorentz_norm(f, self.p, self.q, self.flavor)

    def norm(self, obj: Union[StepFunction, PowerCurve, "SampledFunction"], weights: Optional[np.ndarray] = None) -> float:
        """
        Norm of a step function, a power curve or a sampled function.

        Power curves are measured exactly for the Lebesgue and sup families
        and through their exact cell averages on a refinement grid for the
        Lorentz family. Sampled functions are rearranged with respect to
        ``weights`` (cell measures by default).
        """
        if isinstance(obj, StepFunction):
            return self.norm_step(obj)
        if isinstance(obj, PowerCurve):
            if self.family == "sup":
                return obj.sup_abs()
            if self.family == "lebesgue":
                return obj.lebesgue_norm(self.p)
            return self.norm_step(rearrange_step(obj.discretize()))
        from symtrunc.core.domain import rearrange_sampled

        return self.norm_step(rearrange_sampled(obj, weights))

    def fundamental_function(self, s: float) -> float:
        """
        phi_X(s), the norm of the indicator of (0, s].

        Equals s^{1/p} for L^p, (p/q)^{1/q} s^{1/p} for classical L(p,q)
        and 1 for L-infinity.
        """
        if s <= 0:
            return 0.0
        return self.norm_step(StepFunction.indicator(min(float(s), 1.0)))

    def __str__(self) -> str:
        return self.label
