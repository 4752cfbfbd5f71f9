"""Numerical kernel for elliptic special functions and contour integrals.

The package evaluates theta functions, elliptic gamma functions, and the
associated balanced contour integrals (univariate and low-dimensional), and
ships a registry of seeded self-verification checks covering the exact
identities these objects satisfy: closed-form evaluations, contiguity and
difference equations, matrix difference systems, kernel vanishing statements,
determinant representations, and parameter-inversion transformations.
"""

from .errors import (BalancingViolated, CapExceeded, ContourInvalid,
                     DomainError, EllipticError, KernelViolated,
                     NonConvergent, PoleProximity, SamplerInfeasible,
                     TieBreak)
from .identities import (CHECKS, IdentityReport, list_checks, run_all,
                         run_check)
from .integrals import (ShiftSpec, TypeIParams, VParams, apply_shifts, i1m,
                        i1m_continued, inm_det, inm_det_full, inm_direct,
                        kappa, kappa_n, u_function, v_function,
                        v_qgt1_solution, w_function)
from .quadrature import Contour, QuadResult, QuadSpec, contour_integrate
from .specfun import (BasePair, TruncationPolicy, elliptic_gamma,
                      elliptic_gamma_recip, gamma_pm, qpochhammer_inf, theta,
                      theta_pm)

__version__ = "1.0.0"

__all__ = [
    "__version__",
    # bases, policies, special functions
    "BasePair", "TruncationPolicy", "qpochhammer_inf", "theta", "theta_pm",
    "elliptic_gamma", "elliptic_gamma_recip", "gamma_pm",
    # quadrature
    "Contour", "QuadSpec", "QuadResult", "contour_integrate",
    # integrals
    "VParams", "TypeIParams", "ShiftSpec", "apply_shifts", "kappa", "kappa_n",
    "v_function", "i1m", "i1m_continued", "inm_det", "inm_det_full",
    "inm_direct", "u_function", "w_function", "v_qgt1_solution",
    # identity checks
    "CHECKS", "IdentityReport", "run_check", "run_all", "list_checks",
    # errors
    "EllipticError", "DomainError", "NonConvergent", "PoleProximity",
    "TieBreak", "ContourInvalid", "CapExceeded", "BalancingViolated",
    "KernelViolated", "SamplerInfeasible",
]
