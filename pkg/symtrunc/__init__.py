"""
symtrunc package

Rearrangements, truncations and symmetrization inequalities for
Sobolev-Poincare estimates, with verification harnesses on
discretized model domains.
"""

__version__ = '0.1.0'

# Import core modules
from symtrunc.core.stepfn import StepFunction, MonotoneStep, PowerCurve
from symtrunc.core.spaces import RISpaceSpec
from symtrunc.core.domain import GridDomain, SampledFunction, make_domain
from symtrunc.core.configuration import Configuration
