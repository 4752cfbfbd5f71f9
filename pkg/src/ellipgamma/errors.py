"""Typed exceptions shared across the package."""


class EllipticError(Exception):
    """Base class for package-specific errors."""


class NonConvergent(EllipticError):
    """Infinite product cannot converge for the given base (|p| >= 1)."""


class DomainError(EllipticError):
    """Argument outside the domain of definition (e.g. z = 0, |q| >= 1)."""


class PoleProximity(EllipticError):
    """Argument too close to a pole lattice for stable evaluation."""


class TieBreak(EllipticError):
    """Two parameters nearly coincide where a coefficient denominator vanishes."""


class ContourInvalid(EllipticError):
    """No admissible integration circle separates the pole sequences."""


class CapExceeded(EllipticError):
    """Requested dimension beyond the supported cap."""


class BalancingViolated(EllipticError):
    """Parameter vector does not satisfy the required balancing product."""


class KernelViolated(EllipticError):
    """Supplied vector is not in the left kernel of the matrix."""


class SamplerInfeasible(EllipticError):
    """Parameter sampler exhausted its rejection budget."""
