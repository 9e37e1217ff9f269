#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Exception hierarchy shared by all PSBFEM modules.
"""


# listing all classes declared in this file so that sphinx-automodapi
# correctly documents them and doesn't document imported functions.
__all__ = ["PsbfemError",
           "MeshParseError",
           "MeshValidationError",
           "EvaluationDomainError",
           "QuadratureError",
           "OrientationError",
           "ConditioningError",
           "ModalBasisError",
           "ConventionError",
           "MassSingularityError",
           "SolverError",
           "ConvergenceError",
           "ConfigError",
           ]


class PsbfemError(Exception):
    """Base class for every error raised by psbfem."""
    kind = "psbfem error"


class MeshParseError(PsbfemError):
    """Mesh file could not be parsed under the declared format."""
    kind = "parse error"


class MeshValidationError(PsbfemError):
    """
    Mesh violates an analysis-ready invariant. The list of violations
    is kept on the exception.
    """
    kind = "validation error"

    def __init__(self, message, violations=()):
        super().__init__(message)
        self.violations = list(violations)


class EvaluationDomainError(PsbfemError):
    """Point lies on or outside the polygon where a basis is evaluated."""
    kind = "evaluation-domain error"


class QuadratureError(PsbfemError):
    kind = "quadrature error"


class OrientationError(PsbfemError):
    """Non-positive boundary Jacobian on a face."""
    kind = "orientation error"


class ConditioningError(PsbfemError):
    kind = "conditioning error"


class ModalBasisError(PsbfemError):
    """Eigen-decomposition of the Hamiltonian matrix is unusable."""
    kind = "modal-basis error"


class ConventionError(PsbfemError):
    """Stiffness is asymmetric or complex beyond tolerance."""
    kind = "convention error"


class MassSingularityError(PsbfemError):
    kind = "mass-singularity error"


class SolverError(PsbfemError):
    kind = "solver error"


class ConvergenceError(PsbfemError):
    kind = "convergence error"


class ConfigError(PsbfemError):
    kind = "config error"
