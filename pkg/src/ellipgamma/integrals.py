"""Elliptic hypergeometric contour integrals.

The univariate workhorse is

    I_1^{(m)}(t) = kappa oint prod_{r} Gamma(t_r z^{+-1}) / Gamma(z^{+-2})
                   dz / (2 pi i z)

with 2m+6 parameters balanced to prod_r t_r = (pq)^{m+1} and
kappa = (p;p)_inf (q;q)_inf / 2.  The m = 1 case (eight parameters, balance
(pq)^2) is the elliptic analogue of the Gauss hypergeometric function and is
exposed separately as v_function.  The n-dimensional generalization

    I_n^{(m)}(t) = kappa_n oint prod_{j<k} 1/Gamma(z_j^{+-1} z_k^{+-1})
                   prod_j [ prod_r Gamma(t_r z_j^{+-1}) / Gamma(z_j^{+-2}) ]
                   prod_j dz_j / (2 pi i z_j)

has 2n+2m+4 parameters, the same balance, and
kappa_n = (p;p)_inf^n (q;q)_inf^n / (2^n n!).  It can be computed either by
tensor quadrature (small n, oracle use) or through its representation as an
n x n determinant of shifted univariate integrals.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import specfun
from .errors import (BalancingViolated, CapExceeded, ContourInvalid,
                     DomainError, TieBreak)
from .quadrature import (Contour, QuadResult, QuadSpec, circle_contour_valid,
                         contour_integrate, tensor_integrate)
from .specfun import (DEFAULT_POLICY, BasePair, TruncationPolicy,
                      elliptic_gamma, gamma_pm, qpochhammer_inf, theta_pm)

BALANCE_RTOL = 1e-12


def _prod(values) -> complex:
    out = 1.0 + 0.0j
    for v in values:
        out *= complex(v)
    return out


def _check_balance(t, target: complex, what: str) -> None:
    actual = _prod(t)
    if abs(actual - target) > BALANCE_RTOL * abs(target):
        raise BalancingViolated(
            f"{what}: prod t = {actual:.15g}, required {target:.15g}"
        )


@dataclass(frozen=True)
class VParams:
    """Eight parameters balanced to prod t_j = (pq)^2."""

    t: tuple
    base: BasePair

    def __post_init__(self) -> None:
        t = tuple(complex(v) for v in self.t)
        if len(t) != 8:
            raise ValueError("v_function takes exactly 8 parameters")
        _check_balance(t, self.base.pq ** 2, "v_function balancing")
        object.__setattr__(self, "t", t)

    @classmethod
    def make(cls, t, base: BasePair, normalize_last: bool = True) -> "VParams":
        """Build params, by default solving the last slot for the balance."""
        t = [complex(v) for v in t]
        if normalize_last:
            if len(t) != 8:
                raise ValueError("v_function takes exactly 8 parameters")
            t[-1] = base.pq ** 2 / _prod(t[:-1])
        return cls(tuple(t), base)

    def unit_circle_ok(self, margin: float = 0.02) -> bool:
        return circle_contour_valid(self.t, 1.0, margin)


@dataclass(frozen=True)
class TypeIParams:
    """2n+2m+4 parameters balanced to prod t_r = (pq)^{m+1}, m >= -1."""

    n: int
    m: int
    t: tuple
    base: BasePair

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError("need n >= 1")
        if self.m < -1:
            raise ValueError("need m >= -1")
        t = tuple(complex(v) for v in self.t)
        if len(t) != 2 * self.n + 2 * self.m + 4:
            raise ValueError(
                f"expected {2 * self.n + 2 * self.m + 4} parameters, got {len(t)}"
            )
        _check_balance(t, self.base.pq ** (self.m + 1), "type-I balancing")
        object.__setattr__(self, "t", t)

    @classmethod
    def make(cls, n: int, m: int, t, base: BasePair,
             normalize_last: bool = True) -> "TypeIParams":
        t = [complex(v) for v in t]
        if normalize_last:
            if len(t) != 2 * n + 2 * m + 4:
                raise ValueError("wrong parameter count")
            t[-1] = base.pq ** (m + 1) / _prod(t[:-1])
        return cls(n, m, tuple(t), base)

    def unit_circle_ok(self, margin: float = 0.02) -> bool:
        return circle_contour_valid(self.t, 1.0, margin)


@dataclass(frozen=True)
class ShiftSpec:
    """Multiply parameter slot `index` by p^p_power q^q_power."""

    index: int
    p_power: int = 0
    q_power: int = 0


def apply_shifts(params, shifts) -> "VParams | TypeIParams":
    """Apply multiplicative base shifts; the result must re-balance.

    Shifts compose multiplicatively, so their order never matters. A result
    that violates the target balancing raises BalancingViolated.
    """
    t = list(params.t)
    for s in shifts:
        if not 0 <= s.index < len(t):
            raise ValueError(f"shift index {s.index} out of range")
        t[s.index] *= params.base.p ** s.p_power * params.base.q ** s.q_power
    if isinstance(params, VParams):
        return VParams(tuple(t), params.base)
    return TypeIParams(params.n, params.m, tuple(t), params.base)


def kappa(base: BasePair, policy: TruncationPolicy = DEFAULT_POLICY) -> complex:
    """(p;p)_inf (q;q)_inf / 2."""
    return (qpochhammer_inf(base.p, base.p, policy)
            * qpochhammer_inf(base.q, base.q, policy) / 2.0)


def kappa_n(base: BasePair, n: int, policy: TruncationPolicy = DEFAULT_POLICY) -> complex:
    """(p;p)_inf^n (q;q)_inf^n / (2^n n!)."""
    pp = qpochhammer_inf(base.p, base.p, policy)
    qq = qpochhammer_inf(base.q, base.q, policy)
    return (pp * qq) ** n / (2 ** n * math.factorial(n))


def univariate_integrand(t, base: BasePair, policy: TruncationPolicy = DEFAULT_POLICY):
    """Vectorized z -> prod_r Gamma(t_r z^{+-1}) / Gamma(z^{+-2}).

    The division by Gamma(z^{+-2}) is evaluated as a reciprocal product, so
    nodes at z = +-1 (removable zeros of the integrand) are harmless.
    """
    t = np.asarray(t, dtype=complex)

    def f(z):
        z = np.asarray(z, dtype=complex)
        tz = t.reshape(t.shape + (1,) * z.ndim)
        args = np.concatenate([tz * z[None, ...], tz / z[None, ...]])
        g = elliptic_gamma(args, base, policy).prod(axis=0)
        zz = z * z
        return (g * specfun.elliptic_gamma_recip(zz, base, policy)
                * specfun.elliptic_gamma_recip(1.0 / zz, base, policy))

    return f


def _pick_radius(t, contour: Contour | None) -> Contour:
    if contour is not None:
        if not circle_contour_valid(t, contour.radius):
            raise ContourInvalid(
                f"radius {contour.radius} does not separate the pole sequences"
            )
        return contour
    if not circle_contour_valid(t, 1.0):
        raise ContourInvalid(
            "max |t_j| too close to 1 for the unit circle; "
            "pass an explicit contour or reduce the parameters"
        )
    return Contour(1.0)


def i1m(params: TypeIParams, spec: QuadSpec | None = None,
        contour: Contour | None = None,
        policy: TruncationPolicy = DEFAULT_POLICY) -> QuadResult:
    """Univariate integral I_1^{(m)} on a validated circle."""
    if params.n != 1:
        raise ValueError("i1m requires n == 1")
    contour = _pick_radius(params.t, contour)
    res = contour_integrate(univariate_integrand(params.t, params.base, policy),
                            contour, spec)
    return res.scaled(kappa(params.base, policy))


def v_function(params: VParams, spec: QuadSpec | None = None,
               contour: Contour | None = None,
               policy: TruncationPolicy = DEFAULT_POLICY) -> QuadResult:
    """The elliptic hypergeometric V-function (I_1^{(1)} normalization)."""
    contour = _pick_radius(params.t, contour)
    res = contour_integrate(univariate_integrand(params.t, params.base, policy),
                            contour, spec)
    return res.scaled(kappa(params.base, policy))


def single_pole_correction(t, j: int, base: BasePair,
                           policy: TruncationPolicy = DEFAULT_POLICY) -> complex:
    """Residue correction picked up when parameter t_j crosses the contour.

    Moving t_j from inside the circle to 1 < |t_j| deforms the true contour
    past the pole pair z = t_j, 1/t_j; the deformed-contour value exceeds the
    plain circle value by

        prod_{i != j} Gamma(t_i t_j^{+-1}) / Gamma(t_j^{-2}).
    """
    t = [complex(v) for v in t]
    tj = t[j]
    out = 1.0 + 0.0j
    for i, ti in enumerate(t):
        if i != j:
            out *= gamma_pm(ti, tj, base, policy)
    return out / elliptic_gamma(tj ** -2, base, policy)


def i1m_continued(params: TypeIParams, spec: QuadSpec | None = None,
                  policy: TruncationPolicy = DEFAULT_POLICY,
                  margin: float = 0.005) -> QuadResult:
    """I_1^{(m)} continued past the unit circle in at most one parameter.

    If every |t_r| < 1 this is plain quadrature. If exactly one parameter
    sits outside, the value is circle quadrature plus the single pole
    correction, valid while the crossing parameter stays clear of all other
    pole sequences (|t_j p|, |t_j q| < 1 and |t_j| < 1 / max_others).
    """
    mods = np.abs(np.asarray(params.t))
    outside = np.nonzero(mods >= 1.0)[0]
    if outside.size == 0:
        return i1m(params, spec, None, policy)
    if outside.size > 1:
        raise ContourInvalid("more than one parameter outside the unit circle")
    j = int(outside[0])
    tj = params.t[j]
    inner = np.delete(mods, j)
    mmax = float(inner.max())
    sat = abs(tj) * max(abs(params.base.p), abs(params.base.q))
    # The circle must keep every pole ladder except the crossed pair
    # (t_j, 1/t_j) on its usual side: inner ladders and the satellites
    # t_j p, t_j q inside, their reciprocals outside.
    lo = max(mmax, 1.0 / abs(tj), sat)
    hi = min(1.0 / mmax, abs(tj), 1.0 / sat)
    if not (lo * (1.0 + margin) < hi * (1.0 - margin)):
        raise ContourInvalid("crossing parameter pinches the contour")
    radius = math.sqrt(lo * hi)
    res = contour_integrate(univariate_integrand(params.t, params.base, policy),
                            Contour(radius), spec)
    res = res.scaled(kappa(params.base, policy))
    res.value += single_pole_correction(params.t, j, params.base, policy)
    return res


def inm_direct(params: TypeIParams, spec: QuadSpec | None = None,
               policy: TruncationPolicy = DEFAULT_POLICY) -> QuadResult:
    """I_n^{(m)} by n-fold tensor quadrature; n <= 2 (oracle use)."""
    if params.n >= 3:
        raise CapExceeded("direct quadrature implemented for n <= 2 only")
    if params.n == 1:
        return i1m(params, spec, None, policy)
    if not params.unit_circle_ok():
        raise ContourInvalid("parameters too close to the unit circle")
    base = params.base
    dens = univariate_integrand(params.t, base, policy)

    recip = specfun.elliptic_gamma_recip

    def f(z1, z2):
        cross = (recip(z1 * z2, base, policy) * recip(z1 / z2, base, policy)
                 * recip(z2 / z1, base, policy) * recip(1.0 / (z1 * z2), base, policy))
        return dens(z1) * dens(z2) * cross

    res = tensor_integrate(f, Contour(1.0), spec or QuadSpec.tensor_default(), n=2)
    return res.scaled(kappa_n(base, 2, policy))


@dataclass
class DetEvaluation:
    """Determinant-route value with diagnostics."""

    value: complex
    prefactor: complex
    det: complex
    cond_est: float
    nodes_used: int
    converged: bool
    entries: np.ndarray


def inm_det_full(params: TypeIParams, spec: QuadSpec | None = None,
                 a_slots=None, b_slots=None,
                 policy: TruncationPolicy = DEFAULT_POLICY) -> DetEvaluation:
    """I_n^{(m)} through the n x n determinant of univariate integrals.

    With a_i, b_i taken from 2n distinct parameter slots,

        I_n^{(m)}(t) = prod_{i<j} [a_j theta_p(a_i a_j^{+-1})
                                   b_j theta_q(b_i b_j^{+-1})]^{-1}
                       det_{ij} [ T_q(a_i)^{-1} T_p(b_j)^{-1}
                                  I_1^{(m+n-1)}(q a_1,..,q a_n, p b_1,..,p b_n,
                                                rest) ]

    where T_q(a_i)^{-1} undoes the q-shift on slot a_i in entry row i and
    T_p(b_j)^{-1} the p-shift on slot b_j in entry column j.
    """
    n, m, base = params.n, params.m, params.base
    a_slots = tuple(a_slots) if a_slots is not None else tuple(range(n))
    b_slots = tuple(b_slots) if b_slots is not None else tuple(range(n, 2 * n))
    if len(a_slots) != n or len(b_slots) != n or set(a_slots) & set(b_slots):
        raise ValueError("a_slots and b_slots must be disjoint index groups of size n")
    a = [params.t[i] for i in a_slots]
    b = [params.t[i] for i in b_slots]
    for grp, base_theta in ((a, base.p), (b, base.q)):
        for i in range(len(grp)):
            for j in range(i + 1, len(grp)):
                if abs(grp[i] / grp[j] - 1.0) < specfun.TIE_GUARD:
                    raise TieBreak("determinant slots nearly coincide")

    pref = 1.0 + 0.0j
    for i in range(n):
        for j in range(i + 1, n):
            pref *= a[j] * theta_pm(a[i], a[j], base.p, policy)
            pref *= b[j] * theta_pm(b[i], b[j], base.q, policy)
    pref = 1.0 / pref

    shifted = list(params.t)
    for i in a_slots:
        shifted[i] *= base.q
    for i in b_slots:
        shifted[i] *= base.p

    entries = np.empty((n, n), dtype=complex)
    nodes = 0
    converged = True
    for i in range(n):
        for j in range(n):
            cell = list(shifted)
            cell[a_slots[i]] /= base.q
            cell[b_slots[j]] /= base.p
            sub = TypeIParams(1, n + m - 1, tuple(cell), base)
            if not sub.unit_circle_ok():
                raise ContourInvalid(f"determinant entry ({i},{j}) has no valid circle")
            res = i1m(sub, spec, None, policy)
            entries[i, j] = res.value
            nodes += res.nodes_used
            converged = converged and res.converged

    det = complex(np.linalg.det(entries))
    cond = float(np.linalg.cond(entries)) if n > 1 else 1.0
    return DetEvaluation(pref * det, pref, det, cond, nodes, converged, entries)


def inm_det(params: TypeIParams, spec: QuadSpec | None = None,
            a_slots=None, b_slots=None,
            policy: TruncationPolicy = DEFAULT_POLICY) -> complex:
    return inm_det_full(params, spec, a_slots, b_slots, policy).value


def w_function(params: VParams, z, spec: QuadSpec | None = None,
               policy: TruncationPolicy = DEFAULT_POLICY) -> complex:
    """V divided by its integrand-style normalizer prod_j Gamma(t_j z^{+-1})."""
    z = complex(z)
    norm = 1.0 + 0.0j
    for tj in params.t:
        norm *= gamma_pm(tj, z, params.base, policy)
    return v_function(params, spec, None, policy).value / norm


def u_function(params: VParams, spec: QuadSpec | None = None,
               policy: TruncationPolicy = DEFAULT_POLICY) -> complex:
    """V divided by Gamma(t_1 t_3^{+-1}) Gamma(t_2 t_3^{+-1})."""
    t = params.t
    norm = (gamma_pm(t[0], t[2], params.base, policy)
            * gamma_pm(t[1], t[2], params.base, policy))
    return v_function(params, spec, None, policy).value / norm


def v_qgt1_solution(t, p: complex, q: complex, spec: QuadSpec | None = None,
                    policy: TruncationPolicy = DEFAULT_POLICY) -> complex:
    """Solution normalization valid for |q| > 1.

    For |q| > 1 the defining integral diverges, but

        U(t; q, p) = V(p^{1/2}/t_1, ..., p^{1/2}/t_8; q^{-1}, p)
                     / prod_{k=1,2} Gamma_{p,q^{-1}}(p/(t_k t_3), t_3/t_k)

    extends the solution space. The inner parameters are balanced to
    (p/q)^2 automatically when prod t_j = (pq)^2. The global sign of
    p^{1/2} is immaterial (absorbed by z -> -z inside the integral).
    """
    p, q = complex(p), complex(q)
    if abs(q) <= 1.0:
        raise DomainError("this normalization requires |q| > 1")
    t = [complex(v) for v in t]
    if len(t) != 8:
        raise ValueError("expected 8 parameters")
    _check_balance(t, (p * q) ** 2, "|q|>1 solution balancing")
    inner_base = BasePair(p, 1.0 / q)
    rp = np.sqrt(complex(p))
    inner = VParams(tuple(rp / tj for tj in t), inner_base)
    num = v_function(inner, spec, None, policy).value
    den = 1.0 + 0.0j
    for k in (0, 1):
        den *= elliptic_gamma(p / (t[k] * t[2]), inner_base, policy)
        den *= elliptic_gamma(t[2] / t[k], inner_base, policy)
    return num / den
