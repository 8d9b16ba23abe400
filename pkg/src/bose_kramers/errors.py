"""Exception hierarchy shared by the numerical modules."""

from __future__ import annotations


class KramersError(Exception):
    """Base class for every error raised by this package."""


class NonFiniteInput(KramersError, ValueError):
    pass


class SingularPoint(KramersError, ValueError):
    """Evaluation requested exactly at an (integrable) singularity."""


class QuadratureFailure(KramersError, ArithmeticError):
    pass


class ToleranceNotReached(QuadratureFailure):
    """Subdivision budget exhausted before the error estimate met tolerance."""


class NonFiniteIntegrand(QuadratureFailure):
    pass


class PoleTooCloseToBoundary(QuadratureFailure):
    pass


class OscillatoryTolerance(QuadratureFailure):
    pass


class SpecularLimit(KramersError, ValueError):
    """q = 0: the slip velocity diverges for purely specular reflection."""


class GridTooCoarse(KramersError, ArithmeticError):
    pass


class BranchDiscontinuity(KramersError, ArithmeticError):
    pass
