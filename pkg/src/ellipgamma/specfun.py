"""Theta and elliptic gamma functions via truncated infinite products.

Conventions used throughout the package:

    (z; p)_inf   = prod_{k>=0} (1 - z p^k),              |p| < 1
    theta_p(z)   = (z; p)_inf * (p/z; p)_inf
    Gamma_{p,q}(z) = prod_{j,k>=0} (1 - p^{j+1} q^{k+1} / z) / (1 - z p^j q^k)

Compound arguments follow the usual shorthand: theta_p(t z^{+-1}) means
theta_p(t z) * theta_p(t / z), a list of arguments means the product over the
list, and two +-1 exponents expand to four factors.

All evaluators accept complex scalars or numpy arrays of arguments (the bases
are always scalars) and truncate products according to a TruncationPolicy.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import DomainError, NonConvergent, PoleProximity, TieBreak

# Relative distance to a pole lattice point below which evaluation refuses.
POLE_GUARD = 1e-6

# Relative separation below which near-coincident parameters are rejected.
TIE_GUARD = 1e-3

# Largest argument array chunk (in complex entries times lattice size) that a
# single broadcast product is allowed to materialize.
_CHUNK_BUDGET = 30_000_000


class TruncationCapWarning(UserWarning):
    """Raised as a warning when max_terms truncates before the cutoff."""


@dataclass(frozen=True)
class TruncationPolicy:
    """Cutoff policy for infinite products.

    eps_trunc: drop factors once the deviation |z| |p|^K falls below this.
    max_terms: hard cap on the number of factors per product direction.
    """

    eps_trunc: float = 1e-17
    max_terms: int = 512

    def __post_init__(self) -> None:
        if not 0.0 < self.eps_trunc < 1e-6:
            raise ValueError("eps_trunc must lie in (0, 1e-6)")
        if self.max_terms < 8:
            raise ValueError("max_terms must be at least 8")


DEFAULT_POLICY = TruncationPolicy()


@dataclass(frozen=True)
class BasePair:
    """Pair of elliptic bases, both strictly inside the unit disc.

    Exactly equal bases are rejected as a genericity guard for sampling;
    commensurate but distinct pairs (say q = p^2) are allowed.
    """

    p: complex
    q: complex

    def __post_init__(self) -> None:
        p, q = complex(self.p), complex(self.q)
        if not (abs(p) < 1.0 and abs(q) < 1.0):
            raise DomainError("both bases must satisfy |p| < 1, |q| < 1")
        if p == q:
            raise DomainError("bases must be distinct")
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "q", q)

    @property
    def pq(self) -> complex:
        return self.p * self.q

    def swapped(self) -> "BasePair":
        return BasePair(self.q, self.p)


def _as_array(z):
    arr = np.asarray(z, dtype=complex)
    return arr, arr.ndim == 0


def _terms_needed(mod: float, base_mod: float, policy: TruncationPolicy) -> int:
    """Smallest K with mod * base_mod**K < eps_trunc, capped at max_terms."""
    if mod == 0.0:
        return 0
    if mod < policy.eps_trunc:
        return 0
    if base_mod == 0.0:
        return 1
    k = math.ceil((math.log(policy.eps_trunc) - math.log(mod)) / math.log(base_mod))
    k = max(k, 0)
    if k > policy.max_terms:
        warnings.warn(
            f"truncation cap {policy.max_terms} reached (wanted {k} terms)",
            TruncationCapWarning,
            stacklevel=3,
        )
        return policy.max_terms
    return k


def _chunked_product(z: np.ndarray, lattice: np.ndarray, guard: float = 0.0) -> np.ndarray:
    """prod_k (1 - z * lattice_k), chunking z to bound peak memory.

    With guard > 0, raises PoleProximity if any factor comes closer to zero
    than the guard (relative distance of z to the reciprocal lattice point).
    """
    flat = z.reshape(-1)
    out = np.empty(flat.shape, dtype=complex)
    step = max(1, _CHUNK_BUDGET // max(1, lattice.size))
    for lo in range(0, flat.size, step):
        factors = 1.0 - flat[lo : lo + step, None] * lattice[None, :]
        if guard > 0.0 and factors.size and np.abs(factors).min() < guard:
            raise PoleProximity("argument within pole guard of the pole lattice")
        out[lo : lo + step] = factors.prod(axis=1)
    return out.reshape(z.shape)


def qpochhammer_inf(z, p, policy: TruncationPolicy = DEFAULT_POLICY):
    """(z; p)_inf = prod_{k>=0} (1 - z p^k), truncated per policy."""
    arr, scalar = _as_array(z)
    p = complex(p)
    if abs(p) >= 1.0:
        raise NonConvergent(f"|p| = {abs(p):.6g} >= 1")
    zmax = float(np.abs(arr).max()) if arr.size else 0.0
    k = _terms_needed(zmax, abs(p), policy)
    powers = p ** np.arange(k)
    out = _chunked_product(arr, powers)
    return complex(out) if scalar else out


def theta(z, p, policy: TruncationPolicy = DEFAULT_POLICY):
    """theta_p(z) = (z; p)_inf (p/z; p)_inf.

    Zeros at z in p^Z; quasi-periodicity theta_p(p z) = -theta_p(z)/z and
    inversion theta_p(1/z) = -theta_p(z)/z.
    """
    arr, scalar = _as_array(z)
    if arr.size and np.any(arr == 0):
        raise DomainError("theta argument must be nonzero")
    p = complex(p)
    out = qpochhammer_inf(arr, p, policy) * qpochhammer_inf(p / arr, p, policy)
    return complex(out) if scalar else out


@lru_cache(maxsize=128)
def _gamma_lattice(p: complex, q: complex, eps: float, cap: int) -> np.ndarray:
    """Flattened grid p^j q^k for 0 <= j < J, 0 <= k < K."""
    policy = TruncationPolicy(eps_trunc=eps, max_terms=cap)
    nj = max(1, _terms_needed(1.0, abs(p), policy))
    nk = max(1, _terms_needed(1.0, abs(q), policy))
    pj = p ** np.arange(nj)
    qk = q ** np.arange(nk)
    return np.outer(pj, qk).reshape(-1)


def elliptic_gamma(z, base: BasePair, policy: TruncationPolicy = DEFAULT_POLICY,
                   pole_guard: float = POLE_GUARD):
    """Gamma_{p,q}(z), the elliptic gamma function.

    Poles on z in p^{Z<=0} q^{Z<=0} (guarded), zeros on z in p^{Z>0} q^{Z>0}.
    Satisfies Gamma(q z) = theta_p(z) Gamma(z), Gamma(p z) = theta_q(z) Gamma(z)
    and the reflection Gamma(z) Gamma(pq/z) = 1.
    """
    arr, scalar = _as_array(z)
    if arr.size and np.any(arr == 0):
        raise DomainError("elliptic gamma argument must be nonzero")
    lattice = _gamma_lattice(base.p, base.q, policy.eps_trunc, policy.max_terms)
    den = _chunked_product(arr, lattice, guard=pole_guard)
    num = _chunked_product(1.0 / arr, base.pq * lattice)
    out = num / den
    return complex(out) if scalar else out


def elliptic_gamma_recip(z, base: BasePair, policy: TruncationPolicy = DEFAULT_POLICY,
                         pole_guard: float = POLE_GUARD):
    """1 / Gamma_{p,q}(z), stable where Gamma has poles.

    Contour integrands contain Gamma(z^{+-2}) in the denominator; its poles
    are removable zeros of the integrand, so the reciprocal is evaluated as
    its own product instead of dividing by a vanishing Gamma.
    """
    arr, scalar = _as_array(z)
    if arr.size and np.any(arr == 0):
        raise DomainError("elliptic gamma argument must be nonzero")
    lattice = _gamma_lattice(base.p, base.q, policy.eps_trunc, policy.max_terms)
    num = _chunked_product(arr, lattice)
    den = _chunked_product(1.0 / arr, base.pq * lattice, guard=pole_guard)
    out = num / den
    return complex(out) if scalar else out


def _expand_pm(args):
    """Expand compound-argument notation into a flat list of plain arguments.

    Each entry is either a plain complex number or a tuple (t, z1, ..., zk);
    the tuple contributes t * z1^{e1} * ... * zk^{ek} over all sign choices
    e_i = +-1, i.e. 2^k factors.
    """
    flat = []
    for entry in args:
        if isinstance(entry, tuple):
            t, *zs = entry
            vals = [complex(t)]
            for zz in zs:
                zz = complex(zz)
                vals = [v * zz for v in vals] + [v / zz for v in vals]
            flat.extend(vals)
        else:
            flat.append(complex(entry))
    return flat


def theta_compound(args, p, policy: TruncationPolicy = DEFAULT_POLICY) -> complex:
    """Product of theta_p over a compound argument list."""
    out = 1.0 + 0.0j
    for a in _expand_pm(args):
        out *= theta(a, p, policy)
    return out


def gamma_compound(args, base: BasePair, policy: TruncationPolicy = DEFAULT_POLICY) -> complex:
    """Product of Gamma_{p,q} over a compound argument list."""
    out = 1.0 + 0.0j
    for a in _expand_pm(args):
        out *= elliptic_gamma(a, base, policy)
    return out


def theta_pm(t, z, p, policy: TruncationPolicy = DEFAULT_POLICY):
    """theta_p(t z^{+-1}) = theta_p(t z) theta_p(t / z). Vectorized in z."""
    return theta(np.asarray(t) * np.asarray(z), p, policy) * theta(
        np.asarray(t) / np.asarray(z), p, policy
    )


def gamma_pm(t, z, base: BasePair, policy: TruncationPolicy = DEFAULT_POLICY):
    """Gamma_{p,q}(t z^{+-1}) = Gamma(t z) Gamma(t / z). Vectorized in z."""
    return elliptic_gamma(np.asarray(t) * np.asarray(z), base, policy) * elliptic_gamma(
        np.asarray(t) / np.asarray(z), base, policy
    )


def theta_addition_terms(t1, t2, t3, z, p, policy: TruncationPolicy = DEFAULT_POLICY):
    """The three terms of the theta addition formula.

    term_k cycles (t1, t2, t3) -> (t_k theta_p(t_i t_k^{+-1}) theta_p(t_j z^{+-1}))
    and the three terms sum to zero for every z.
    """
    terms = []
    for (a, b, c) in ((t1, t2, t3), (t2, t3, t1), (t3, t1, t2)):
        terms.append(c * theta_pm(b, c, p, policy) * theta_pm(a, z, p, policy))
    return tuple(terms)


def theta_addition_residual(t1, t2, t3, z, p, policy: TruncationPolicy = DEFAULT_POLICY) -> complex:
    """Sum of the theta addition terms; zero in exact arithmetic."""
    return complex(sum(theta_addition_terms(t1, t2, t3, z, p, policy)))


def _check_ties(t, guard: float = TIE_GUARD) -> None:
    t = np.asarray(t, dtype=complex)
    for i in range(len(t)):
        for j in range(i + 1, len(t)):
            if abs(t[i] / t[j] - 1.0) < guard:
                raise TieBreak(f"parameters {i} and {j} nearly coincide")


def recurrence_kernel_terms(t, z, p, policy: TruncationPolicy = DEFAULT_POLICY):
    """Terms of the theta partial-fraction kernel identity.

    For t of length n+2 and auxiliary points z of length n,

        term_i = t_i prod_j theta_p(t_i z_j^{+-1}) / prod_{j != i} theta_p(t_i t_j^{+-1})

    and sum_i term_i = 0. Near-coincident t raise TieBreak.
    """
    t = [complex(v) for v in t]
    z = [complex(v) for v in z]
    if len(t) != len(z) + 2:
        raise ValueError("need len(t) == len(z) + 2")
    _check_ties(t)
    terms = []
    for i, ti in enumerate(t):
        num = ti
        for zj in z:
            num *= theta_pm(ti, zj, p, policy)
        den = 1.0 + 0.0j
        for j, tj in enumerate(t):
            if j != i:
                den *= theta_pm(ti, tj, p, policy)
        terms.append(num / den)
    return tuple(terms)


def recurrence1_kernel_residual(t, z, p, policy: TruncationPolicy = DEFAULT_POLICY) -> complex:
    """Sum of the kernel terms; zero in exact arithmetic."""
    return complex(sum(recurrence_kernel_terms(t, z, p, policy)))
