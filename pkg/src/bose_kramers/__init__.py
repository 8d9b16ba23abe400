"""Isothermal slip of a Bose gas along a flat wall.

BGK-type kinetic model with the Bose kernel, solved by expanding the
spectral density in powers of the diffuseness coefficient q, with a
closed-form phase-integral benchmark for q = 1.
"""

from __future__ import annotations

from .errors import (
    BranchDiscontinuity,
    GridTooCoarse,
    KramersError,
    NonFiniteInput,
    OscillatoryTolerance,
    QuadratureFailure,
    SingularPoint,
    SpecularLimit,
    ToleranceNotReached,
)
from .exact import V1, exact_wall_speed, phase_curve
from .fields import h_correction, knudsen_correction, profile, wall_speeds
from .kernel import CLASSICAL_ALPHA, KernelContext, kernel_eval, moment_l
from .neumann import NeumannExpansion, build_expansion, relative_error, slip_velocity
from .quadrature import DEFAULT_SPEC, QuadratureSpec
from .spectral import SpectralFunctions, SpectralGrid, SpectralTable

__version__ = "0.1.0"
