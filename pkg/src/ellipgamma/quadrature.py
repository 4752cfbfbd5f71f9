"""Spectrally accurate contour quadrature on circles.

For f analytic in an annulus around the circle |z| = r the trapezoid rule

    (1/N) sum_k f(r e^{2 pi i k / N})

converges geometrically in N, so node doubling with a relative stop rule is
both the error estimate and the refinement strategy.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import CapExceeded


@dataclass(frozen=True)
class Contour:
    """Circle |z| = radius, traversed once counterclockwise."""

    radius: float = 1.0

    def __post_init__(self) -> None:
        if not self.radius > 0.0:
            raise ValueError("radius must be positive")


@dataclass(frozen=True)
class QuadSpec:
    """Node-doubling parameters.

    n0 starting node count, n_max hard cap, rel_tol relative stop rule,
    abs_floor guards the relative test for values collapsing to zero.
    """

    n0: int = 64
    n_max: int = 16384
    rel_tol: float = 1e-11
    abs_floor: float = 1e-300

    def __post_init__(self) -> None:
        if self.n0 < 16:
            raise ValueError("n0 must be at least 16")
        if self.n_max < self.n0:
            raise ValueError("n_max must be >= n0")
        if not 0.0 < self.rel_tol < 1.0:
            raise ValueError("rel_tol must lie in (0, 1)")

    @staticmethod
    def tensor_default() -> "QuadSpec":
        return QuadSpec(n0=64, n_max=512, rel_tol=1e-9)


@dataclass
class QuadResult:
    value: complex
    err_est: float
    nodes_used: int
    converged: bool

    def scaled(self, factor: complex) -> "QuadResult":
        return QuadResult(self.value * factor, self.err_est * abs(factor),
                          self.nodes_used, self.converged)


DEFAULT_SPEC = QuadSpec()


def nodes(contour: Contour, n: int) -> np.ndarray:
    k = np.arange(n)
    return contour.radius * np.exp(2j * np.pi * k / n)


def contour_sum(f, contour: Contour, n: int) -> complex:
    """Single fixed-N trapezoid pass (1/N) sum f(z_k)."""
    vals = np.broadcast_to(np.asarray(f(nodes(contour, n))), (n,))
    return complex(vals.mean())


def contour_integrate(f, contour: Contour | None = None,
                      spec: QuadSpec | None = None) -> QuadResult:
    """Integrate f(z) dz / (2 pi i z) over the circle by node doubling.

    f must accept a complex ndarray of nodes and return values elementwise.
    The returned err_est is the last refinement delta; converged means the
    delta fell below rel_tol * max(|value|, abs_floor) before n_max.
    """
    contour = contour or Contour()
    spec = spec or DEFAULT_SPEC
    n = spec.n0
    val = contour_sum(f, contour, n)
    err = float("inf")
    while 2 * n <= spec.n_max:
        m = 2 * n
        # the even nodes of the refined grid are the current grid; only the
        # odd (interleaved) nodes need new evaluations
        odd = contour.radius * np.exp(2j * np.pi * (2 * np.arange(n) + 1) / m)
        odd_mean = complex(np.broadcast_to(np.asarray(f(odd)), (n,)).mean())
        new_val = 0.5 * (val + odd_mean)
        err = abs(new_val - val)
        val, n = new_val, m
        if err <= spec.rel_tol * max(abs(val), spec.abs_floor):
            return QuadResult(val, err, n, True)
    return QuadResult(val, err, n, False)


def tensor_integrate(f, contour: Contour | None = None,
                     spec: QuadSpec | None = None, n: int = 2) -> QuadResult:
    """n-fold product-contour integral, prod_j dz_j / (2 pi i z_j) measure.

    f is called with n open-mesh arrays (shape (N,1,..), (1,N,..), ...) so a
    factorized integrand only pays the full N^n cost for genuinely coupled
    factors. Node counts are shared across axes and doubled jointly; n <= 3.
    """
    if n > 3:
        raise CapExceeded("tensor quadrature supports at most 3 axes")
    if n < 1:
        raise ValueError("need n >= 1")
    contour = contour or Contour()
    spec = spec or QuadSpec.tensor_default()

    def level(npts: int) -> complex:
        z = nodes(contour, npts)
        meshes = []
        for axis in range(n):
            shape = [1] * n
            shape[axis] = npts
            meshes.append(z.reshape(shape))
        vals = np.broadcast_to(np.asarray(f(*meshes)), (npts,) * n)
        return complex(vals.mean())

    npts = spec.n0
    val = level(npts)
    err = float("inf")
    while 2 * npts <= spec.n_max:
        npts *= 2
        new_val = level(npts)
        err = abs(new_val - val)
        val = new_val
        if err <= spec.rel_tol * max(abs(val), spec.abs_floor):
            return QuadResult(val, err, npts, True)
    return QuadResult(val, err, npts, False)


def circle_contour_valid(params, radius: float = 1.0, margin: float = 0.02) -> bool:
    """Whether |z| = radius separates the pole sequences of the parameters.

    Each parameter w spawns poles inward from |w| and outward from 1/|w|, so
    the circle works iff max|w| < radius < 1/max|w| with a relative margin.
    """
    mods = np.abs(np.asarray(params, dtype=complex))
    if mods.size == 0:
        return True
    mmax = float(mods.max())
    return mmax < radius * (1.0 - margin) and mmax * radius < 1.0 - margin
