"""Determinant identities and minor-expansion helpers.

Everything here is quadrature-free: inputs are numbers or matrices already
evaluated elsewhere. Determinants go through numpy's partial-pivot LU with a
condition estimate alongside.
"""

from __future__ import annotations

import itertools
import math

import numpy as np

from .errors import CapExceeded, KernelViolated, PoleProximity, TieBreak
from .specfun import DEFAULT_POLICY, TIE_GUARD, theta_pm


def det_with_cond(matrix: np.ndarray) -> tuple[complex, float]:
    """(det, condition estimate) via LU; cond is the 2-norm ratio."""
    matrix = np.asarray(matrix, dtype=complex)
    det = complex(np.linalg.det(matrix))
    cond = float(np.linalg.cond(matrix)) if matrix.shape[0] > 1 else 1.0
    return det, cond


def elliptic_cauchy_det(a, z, p, policy=DEFAULT_POLICY) -> tuple[complex, complex]:
    """Both sides of the elliptic Cauchy determinant.

    lhs = det_{ij} [ a_i / theta_p(a_i z_j^{+-1}) ]
    rhs = prod_{i<j} a_i^{-1} theta_p(a_i a_j^{+-1}) z_i^{-1} theta_p(z_i z_j^{+-1})
          / [ (-1)^{n(n-1)/2} prod_{i,j} a_i^{-1} theta_p(a_i z_j^{+-1}) ]

    The lhs determinant is the oracle: the identity is lhs == rhs.
    """
    a = [complex(v) for v in a]
    z = [complex(v) for v in z]
    if len(a) != len(z):
        raise ValueError("need equally many a and z points")
    n = len(a)
    for grp in (a, z):
        for i in range(n):
            for j in range(i + 1, n):
                if abs(grp[i] / grp[j] - 1.0) < TIE_GUARD:
                    raise TieBreak("coincident points in the Cauchy determinant")

    cross = np.empty((n, n), dtype=complex)
    for i in range(n):
        for j in range(n):
            cross[i, j] = theta_pm(a[i], z[j], p, policy)
    if np.abs(cross).min() < 1e-8:
        raise PoleProximity("theta denominator nearly vanishes")

    lhs_matrix = np.array([[a[i] / cross[i, j] for j in range(n)] for i in range(n)])
    lhs, _ = det_with_cond(lhs_matrix)

    rhs = complex((-1.0) ** (n * (n - 1) // 2))
    for i in range(n):
        for j in range(i + 1, n):
            rhs *= theta_pm(a[i], a[j], p, policy) / a[i]
            rhs *= theta_pm(z[i], z[j], p, policy) / z[i]
    for i in range(n):
        for j in range(n):
            rhs /= cross[i, j] / a[i]
    return lhs, rhs


def minor_relation_residual(matrix: np.ndarray, v, kernel_rtol: float = 1e-9) -> np.ndarray:
    """Terms of the minor expansion forced by a left kernel vector.

    For an n x k matrix M (k < n) and a row vector v with v M = 0, the
    (k+1) x k minors obey

        sum_{i=k..n} v_i det M[{1,..,k-1,i}, :] = 0     (1-indexed rows)

    Returns the length n-k+1 array of terms v_i det(...); the caller checks
    that the sum vanishes against the largest term. Raises KernelViolated if
    v is not actually in the left kernel.
    """
    matrix = np.asarray(matrix, dtype=complex)
    v = np.asarray(v, dtype=complex)
    n, k = matrix.shape
    if v.shape != (n,):
        raise ValueError("kernel vector length must match the row count")
    if k >= n:
        raise ValueError("need strictly more rows than columns")
    resid = v @ matrix
    scale = (np.abs(v)[:, None] * np.abs(matrix)).sum(axis=0).max()
    if np.abs(resid).max() > kernel_rtol * max(scale, 1e-300):
        raise KernelViolated(
            f"|v M| = {np.abs(resid).max():.3g} exceeds {kernel_rtol:.1g} * {scale:.3g}"
        )
    lead = list(range(k - 1))
    terms = []
    for i in range(k - 1, n):
        rows = lead + [i]
        terms.append(v[i] * complex(np.linalg.det(matrix[rows, :])))
    return np.asarray(terms)


def colex_subsets(n: int, k: int) -> list[tuple[int, ...]]:
    """All k-subsets of range(n) in colexicographic order."""
    return sorted(itertools.combinations(range(n), k), key=lambda s: s[::-1])


def exterior_power_det_check(matrix: np.ndarray, n: int) -> tuple[complex, complex]:
    """Both sides of det(compound_n M) = det(M)^binom(N-1, n-1).

    The compound matrix has entries det M[S, T] over n-subsets S, T in
    colex order. Matrix dimension N is capped at 4.
    """
    matrix = np.asarray(matrix, dtype=complex)
    big = matrix.shape[0]
    if matrix.shape[0] != matrix.shape[1]:
        raise ValueError("matrix must be square")
    if big > 4:
        raise CapExceeded("compound determinants implemented for N <= 4")
    if not 1 <= n <= big:
        raise ValueError("need 1 <= n <= N")
    subsets = colex_subsets(big, n)
    comp = np.array([
        [complex(np.linalg.det(matrix[np.ix_(rows, cols)])) for cols in subsets]
        for rows in subsets
    ])
    lhs, _ = det_with_cond(comp)
    base_det, _ = det_with_cond(matrix)
    rhs = base_det ** math.comb(big - 1, n - 1)
    return lhs, rhs
