"""Registry of numerical identity checks with seeded random draws.

Every check draws admissible parameters from documented windows, evaluates
both sides of one identity (or the flat sum of its terms), and reports a
relative residual:

    residual = |lhs - rhs| / max(|lhs|, |rhs|)      for two-sided identities,
    residual = |sum terms| / max_k |term_k|         for vanishing sums.

Checks may emit several labelled parts (for example a difference equation
plus the ellipticity of its coefficients); a part with tol None inherits the
check tolerance, which is the one a caller may override. A report passes when
every part is within its tolerance.

Draws are deterministic: trial k of check NAME under seed S uses
numpy.random.default_rng seeded with (S, crc32(NAME), k), so reruns with the
same seed reproduce identical reports. Rejection sampling keeps parameters
clear of theta zeros and gamma poles; a handful of such retries re-uses the
same generator stream and stays deterministic.
"""

from __future__ import annotations

import itertools
import json
import math
import time
from dataclasses import dataclass, field

import numpy as np

from . import matrixkit
from .errors import (ContourInvalid, PoleProximity, SamplerInfeasible,
                     TieBreak)
from .integrals import (TypeIParams, VParams, i1m, i1m_continued,
                        inm_det_full, inm_direct, kappa,
                        single_pole_correction, univariate_integrand,
                        v_function, v_qgt1_solution)
from .quadrature import Contour, QuadSpec, contour_integrate, nodes
from .sampling import (MAX_TRIES, draw_balanced, draw_base_pair, draw_modulus,
                       draw_phase, pairwise_separation, rng_for)
from .specfun import (DEFAULT_POLICY, BasePair, TruncationPolicy,
                      elliptic_gamma, gamma_pm, recurrence_kernel_terms,
                      theta, theta_addition_terms, theta_pm)

__all__ = [
    "CheckPart", "CheckSpec", "IdentityReport", "CHECKS", "register",
    "run_check", "run_all", "list_checks", "potential",
    "downward_coefficients", "zero_mode_vector", "g_kernel",
    "g_partial_fraction", "gamma_pair_product",
]

_DRAW_ATTEMPTS = 12


# ---------------------------------------------------------------------------
# reports and registry plumbing
# ---------------------------------------------------------------------------

def _jsonify(x):
    if isinstance(x, dict):
        return {str(k): _jsonify(v) for k, v in x.items()}
    if isinstance(x, (list, tuple, np.ndarray)):
        return [_jsonify(v) for v in x]
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        return float(x)
    if isinstance(x, (complex, np.complexfloating)):
        return [float(x.real), float(x.imag)]
    return str(x)


@dataclass
class CheckPart:
    """One labelled residual with the tolerance it was judged against."""

    label: str
    residual: float
    tol: float

    @property
    def passed(self) -> bool:
        return self.residual <= self.tol


@dataclass
class IdentityReport:
    """Outcome of one seeded trial of one registered check.

    For single-part checks residual/tol are that part's numbers; for
    multi-part checks residual is the worst residual-to-tolerance ratio and
    tol is 1. Wall time is kept out of the serialized form so that reruns
    with the same seed are byte-identical.
    """

    name: str
    trial: int
    seed: int
    residual: float
    tol: float
    passed: bool
    nodes: int
    parts: list = field(default_factory=list)
    params: dict = field(default_factory=dict)
    elapsed: float = 0.0

    def to_json(self) -> str:
        doc = {
            "name": self.name,
            "trial": self.trial,
            "seed": self.seed,
            "residual": float(self.residual),
            "tol": float(self.tol),
            "passed": bool(self.passed),
            "nodes": int(self.nodes),
            "parts": [
                {"label": p.label, "residual": float(p.residual),
                 "tol": float(p.tol)}
                for p in self.parts
            ],
            "params": _jsonify(self.params),
        }
        return json.dumps(doc, sort_keys=True, separators=(",", ":"))


@dataclass(frozen=True)
class CheckSpec:
    name: str
    func: object
    tol: float
    trials: int
    tags: tuple
    doc: str = ""


CHECKS: "dict[str, CheckSpec]" = {}


def register(name: str, tol: float, trials: int, tags=()):
    def deco(fn):
        CHECKS[name] = CheckSpec(name, fn, tol, trials, tuple(tags),
                                 (fn.__doc__ or "").strip().splitlines()[0]
                                 if fn.__doc__ else "")
        return fn
    return deco


def list_checks():
    """(name, default tol, default trials, tags, one-line description) rows."""
    return [(c.name, c.tol, c.trials, c.tags, c.doc) for c in CHECKS.values()]


def run_check(name: str, seed: int = 0, trials: int | None = None,
              tol: float | None = None, spec: QuadSpec | None = None,
              policy: TruncationPolicy = DEFAULT_POLICY):
    """Run one registered check and return a report per trial."""
    if name not in CHECKS:
        raise KeyError(f"unknown check {name!r}; see list_checks()")
    cs = CHECKS[name]
    n_trials = cs.trials if trials is None else int(trials)
    reports = []
    for trial in range(n_trials):
        rng = rng_for(seed, name, trial)
        t0 = time.perf_counter()
        last = None
        for _ in range(_DRAW_ATTEMPTS):
            try:
                raw_parts, node_count, params = cs.func(rng, spec, policy)
                break
            except (PoleProximity, TieBreak, ContourInvalid) as exc:
                last = exc
        else:
            raise SamplerInfeasible(
                f"{name} trial {trial}: {_DRAW_ATTEMPTS} draws rejected "
                f"({last})")
        elapsed = time.perf_counter() - t0
        parts = []
        for label, residual, part_tol in raw_parts:
            eff = (cs.tol if tol is None else float(tol)) \
                if part_tol is None else float(part_tol)
            parts.append(CheckPart(label, float(residual), eff))
        passed = all(p.passed for p in parts)
        if len(parts) == 1:
            headline, head_tol = parts[0].residual, parts[0].tol
        else:
            headline = max(p.residual / p.tol for p in parts)
            head_tol = 1.0
        reports.append(IdentityReport(
            name=name, trial=trial, seed=seed, residual=headline,
            tol=head_tol, passed=passed, nodes=int(node_count), parts=parts,
            params=params, elapsed=elapsed))
    return reports


def run_all(seed: int = 0, trials: int | None = None,
            tol: float | None = None, spec: QuadSpec | None = None,
            names=None):
    """Run the whole registry (or a subset) and return all reports."""
    out = []
    for name in (list(CHECKS) if names is None else names):
        out.extend(run_check(name, seed=seed, trials=trials, tol=tol,
                             spec=spec))
    return out


# ---------------------------------------------------------------------------
# shared draw and formula helpers
# ---------------------------------------------------------------------------

def _prod(values) -> complex:
    out = 1.0 + 0.0j
    for v in values:
        out *= complex(v)
    return out


def _rel(lhs: complex, rhs: complex) -> float:
    return abs(lhs - rhs) / max(abs(lhs), abs(rhs))


def _sum_residual(terms) -> float:
    terms = [complex(v) for v in terms]
    return abs(sum(terms)) / max(abs(v) for v in terms)


def _cnum(rng, lo: float, hi: float) -> complex:
    return draw_modulus(rng, lo, hi) * draw_phase(rng)


def _draw_free(rng, windows, constraints=(), max_tries: int = MAX_TRIES):
    """Independent per-slot draws (no balance) with rejection constraints."""
    for _ in range(max_tries):
        t = tuple(draw_modulus(rng, lo, hi) * draw_phase(rng)
                  for lo, hi in windows)
        if all(c(t) for c in constraints):
            return t
    raise SamplerInfeasible(
        f"no admissible free draw within {max_tries} tries (windows {windows})")


def _ladder_gap(w, b, kmax: int = 4) -> float:
    """Relative distance of w from the geometric ladder {b^k}."""
    w, b = complex(w), complex(b)
    return min(abs(w / b ** k - 1.0) for k in range(-kmax, kmax + 1))


def _gamma_gap(w, base: BasePair, kmax: int = 2) -> float:
    """Relative distance of w from the gamma pole lattice {p^-j q^-k}."""
    w = complex(w)
    return min(abs(w * base.p ** j * base.q ** k - 1.0)
               for j in range(kmax + 1) for k in range(kmax + 1))


def _gap_constraint(arg_builder, floor: float = 0.04):
    def check(t) -> bool:
        return all(g >= floor for g in arg_builder(t))
    return check


def _scaled_windows(balance, n: int, lo: float = 0.75, hi: float = 1.33,
                    cap: float | None = None):
    """n identical log-windows centred on |balance|^(1/n), so the dependent
    slot of a balanced draw lands mid-window with high probability."""
    c = abs(balance) ** (1.0 / n)
    if cap is not None and hi * c > cap:
        scale = cap / (hi * c)
        lo, hi = lo * scale, hi * scale
    return [(lo * c, hi * c)] * n


def _q_lowered_windows(base: BasePair, m: int, total: int,
                       head_lo: float = 0.5, head_hi: float = 0.85,
                       cap: float = 0.88):
    """Windows for draws balanced to (pq)^(m+1) q: the first m+2 slots sit at
    |q| scale (they get lowered by q during the check and must stay inside
    the contour), the remaining slots are scaled so the dependent one lands
    mid-window for any admissible base pair."""
    qa = abs(base.q)
    head = m + 2
    center = math.sqrt(head_lo * head_hi) * qa
    resid = abs(base.pq) ** (m + 1) * qa / center ** head
    return [(head_lo * qa, head_hi * qa)] * head \
        + _scaled_windows(resid, total - head, cap=cap)


def gamma_pair_product(t, base: BasePair,
                       policy: TruncationPolicy = DEFAULT_POLICY,
                       upto: int | None = None) -> complex:
    """prod_{i<j} Gamma(t_i t_j) over the first `upto` slots (default: all)."""
    t = [complex(v) for v in t]
    k = len(t) if upto is None else upto
    out = 1.0 + 0.0j
    for i in range(k):
        for j in range(i + 1, k):
            out *= elliptic_gamma(t[i] * t[j], base, policy)
    return out


def potential(t, q, p, policy: TruncationPolicy = DEFAULT_POLICY) -> complex:
    """Coefficient potential of the three-term difference equation.

    A(t_1..t_8; q; p) = theta_p(t_1/(q t_3)) theta_p(t_3 t_1) theta_p(t_3/t_1)
                        / [theta_p(t_1/t_2) theta_p(t_2/(q t_1))
                           theta_p(t_1 t_2/q)]
                        * prod_{k=4..8} theta_p(t_2 t_k/q) / theta_p(t_3 t_k)

    It is p-elliptic under any balance-preserving pair shift of the
    parameters, and inverting q is equivalent to t_j -> sqrt(p)/t_j.
    """
    t = [complex(v) for v in t]
    q = complex(q)
    out = (theta(t[0] / (q * t[2]), p, policy)
           * theta(t[2] * t[0], p, policy)
           * theta(t[2] / t[0], p, policy))
    out /= (theta(t[0] / t[1], p, policy)
            * theta(t[1] / (q * t[0]), p, policy)
            * theta(t[0] * t[1] / q, p, policy))
    for k in range(3, 8):
        out *= theta(t[1] * t[k] / q, p, policy) / theta(t[2] * t[k], p, policy)
    return out


def _potential_args(t, q):
    """All theta arguments entering `potential`, for zero-avoidance draws."""
    t = [complex(v) for v in t]
    args = [t[0] / (q * t[2]), t[2] * t[0], t[2] / t[0],
            t[0] / t[1], t[1] / (q * t[0]), t[0] * t[1] / q]
    for k in range(3, 8):
        args += [t[1] * t[k] / q, t[2] * t[k]]
    return args


def downward_coefficients(t, head, q, p,
                          policy: TruncationPolicy = DEFAULT_POLICY):
    """Coefficients of the vanishing sum over q-lowered parameters.

    For slots indexed by `head` (the group carrying the extra factor of q in
    the balance) the combination

        sum_{k in head} c_k * I(t with t_k -> t_k/q) = 0,
        c_k = prod_{i not in head} theta_p(t_i t_k / q)
              / (t_k prod_{i in head, i != k} theta_p(t_i / t_k))

    holds whenever prod t = (pq)^{m+1} q for the relevant integral family.
    """
    head = tuple(head)
    t = [complex(v) for v in t]
    out = []
    for k in head:
        c = 1.0 / t[k]
        for i in range(len(t)):
            if i in head:
                if i != k:
                    c /= theta(t[i] / t[k], p, policy)
            else:
                c *= theta(t[i] * t[k] / q, p, policy)
        out.append(c)
    return out


def zero_mode_vector(t, base: BasePair, m: int,
                     policy: TruncationPolicy = DEFAULT_POLICY):
    """Left kernel weights of the doubly lowered integral matrix.

    With 2m+6 parameters balanced to (pq)^{m+2} and
    M_{kl} = I_1^{(m)}(t with t_k -> t_k/q, t_{m+2+l} -> t_{m+2+l}/p),
    the weights

        v_k = prod_{i=m+3..2m+6} theta_p(t_i t_k / q)
              / prod_{i<=m+2, i != k} theta_p(t_i / t_k)

    satisfy sum_k v_k M_{kl} = 0 for every column l.
    """
    p, q = base.p, base.q
    head = m + 2
    t = [complex(v) for v in t]
    out = []
    for k in range(head):
        val = 1.0 + 0.0j
        for i in range(head, len(t)):
            val *= theta(t[i] * t[k] / q, p, policy)
        for i in range(head):
            if i != k:
                val /= theta(t[i] / t[k], p, policy)
        out.append(val)
    return out


def g_kernel(z, t_small, v_big, base: BasePair,
             policy: TruncationPolicy = DEFAULT_POLICY):
    """Symmetrized theta kernel g(z) = h(z) + h(1/z) with

        h(w) = prod_i theta_p(v_i w)
               / (w theta_p(w^2) prod_i theta_p((pq/t_i) w)).

    Invariant under z -> 1/z; satisfies g(pz) = p z^2 g(z) exactly when
    prod t * prod v = (pq)^{m+1} q for m = len(t_small) - 2.
    """
    z = np.asarray(z, dtype=complex)
    p, pq = base.p, base.pq

    def half(w):
        num = np.ones_like(w)
        for v in v_big:
            num = num * theta(v * w, p, policy)
        den = w * theta(w * w, p, policy)
        for ti in t_small:
            den = den * theta(pq * w / ti, p, policy)
        return num / den

    out = half(z) + half(1.0 / z)
    return out if out.ndim else complex(out)


def g_partial_fraction(z, t_small, v_big, base: BasePair,
                       policy: TruncationPolicy = DEFAULT_POLICY):
    """Partial-fraction form of g_kernel:

        g(z) = sum_i alpha_i / theta_p((pq/t_i) z^{+-1}),
        alpha_i = q prod_j theta_p(v_j t_i / q)
                  / (t_i prod_{j != i} theta_p(t_j / t_i)).
    """
    z = np.asarray(z, dtype=complex)
    p, q, pq = base.p, base.q, base.pq
    total = np.zeros(z.shape, dtype=complex)
    for i, ti in enumerate(t_small):
        alpha = q / ti
        for v in v_big:
            alpha *= theta(v * ti / q, p, policy)
        for j, tj in enumerate(t_small):
            if j != i:
                alpha /= theta(tj / ti, p, policy)
        total = total + alpha / (theta(pq * z / ti, p, policy)
                                 * theta(pq / (ti * z), p, policy))
    return total if total.ndim else complex(total)


# --- coefficients of the three-term relations for normalized shifted values

def _alpha_w(u, z, p, policy):
    return (theta_pm(u[3], z, p, policy) * theta_pm(u[6], u[7], p, policy)
            / (theta_pm(u[6], z, p, policy) * theta_pm(u[3], u[7], p, policy)))


def _beta_w(u, z, p, policy):
    return (theta_pm(u[7], z, p, policy) * theta_pm(u[6], u[3], p, policy)
            / (theta_pm(u[6], z, p, policy) * theta_pm(u[7], u[3], p, policy)))


def _gamma_w(u, z, p, policy):
    pref = (theta_pm(u[7], z, p, policy) * theta(u[2] / u[7], p, policy)
            / (theta_pm(u[3], z, p, policy) * theta(u[2] / u[3], p, policy)))
    for j in (0, 1, 4, 5, 6):
        pref *= theta(u[3] * u[j], p, policy) / theta(u[7] * u[j], p, policy)
    return pref


def _delta_w(u, z, p, policy):
    pref = (theta_pm(u[7], z, p, policy) * theta(u[3] / u[7], p, policy)
            / (theta_pm(u[2], z, p, policy) * theta(u[3] / u[2], p, policy)))
    for j in (0, 1, 4, 5, 6):
        pref *= theta(u[2] * u[j], p, policy) / theta(u[7] * u[j], p, policy)
    return pref


def w_shift_matrix_a(tx, z, base: BasePair,
                     policy: TruncationPolicy = DEFAULT_POLICY) -> np.ndarray:
    """Coefficient matrix A(x) of the q-difference system M(qx) = A(x) M(x).

    tx already carries the spectral substitution (slot 7 times x, slot 8
    over x). A is assembled from the three-term relation coefficients at the
    auxiliary octuple (p t_1, t_2, .., t_7 x, t_8/(q x)) and its t_3 <-> t_4
    swap; it is p-elliptic in x and in balance-preserving parameter pairs.
    """
    p, q = base.p, base.q
    u = np.asarray(tx, dtype=complex).copy()
    u[0] *= p
    u[7] /= q
    us = u.copy()
    us[2], us[3] = u[3], u[2]
    a11 = (_alpha_w(u, z, p, policy) * _gamma_w(u, z, p, policy)
           + _beta_w(u, z, p, policy))
    a12 = _alpha_w(u, z, p, policy) * _delta_w(u, z, p, policy)
    a21 = _alpha_w(us, z, p, policy) * _delta_w(us, z, p, policy)
    a22 = (_alpha_w(us, z, p, policy) * _gamma_w(us, z, p, policy)
           + _beta_w(us, z, p, policy))
    return np.array([[a11, a12], [a21, a22]])


def w_shift_matrix_b(t, x, z, base: BasePair,
                     policy: TruncationPolicy = DEFAULT_POLICY) -> np.ndarray:
    """Coefficient matrix B(x) of the p-difference system M(px) = M(x) B(x).

    Built from the same three-term coefficients with p and q swapped, at the
    permuted octuple (t_3, t_4, t_1, t_2, t_5, t_6, t_7 x, t_8/x) decorated
    by (q, 1/p) on its outer slots. Its off-diagonal entries are wired
    crosswise relative to A.
    """
    p, q = base.p, base.q
    u = np.array([t[2], t[3], t[0], t[1], t[4], t[5], t[6] * x, t[7] / x],
                 dtype=complex)
    u[0] *= q
    u[7] /= p
    us = u.copy()
    us[2], us[3] = u[3], u[2]
    b11 = (_alpha_w(u, z, q, policy) * _gamma_w(u, z, q, policy)
           + _beta_w(u, z, q, policy))
    b12 = _alpha_w(us, z, q, policy) * _delta_w(us, z, q, policy)
    b21 = _alpha_w(u, z, q, policy) * _delta_w(u, z, q, policy)
    b22 = (_alpha_w(us, z, q, policy) * _gamma_w(us, z, q, policy)
           + _beta_w(us, z, q, policy))
    return np.array([[b11, b12], [b21, b22]])


def _w_value(t, z, base, spec, policy):
    """V(t)/prod_j Gamma(t_j z^{+-1}) with node accounting."""
    vp = VParams(tuple(t), base)
    res = v_function(vp, spec, None, policy)
    norm = 1.0 + 0.0j
    for tj in vp.t:
        norm *= gamma_pm(tj, z, base, policy)
    return res.value / norm, res.nodes_used


# ---------------------------------------------------------------------------
# algebraic checks
# ---------------------------------------------------------------------------

@register("theta-addition", tol=1e-11, trials=200, tags=("algebraic",))
def _check_theta_addition(rng, spec, policy):
    """Three cyclic theta terms summing to zero for every spectator point."""
    p = _cnum(rng, 0.05, 0.5)
    t1, t2, t3, z = (_cnum(rng, 0.25, 1.9) for _ in range(4))
    terms = theta_addition_terms(t1, t2, t3, z, p, policy)
    return ([("sum", _sum_residual(terms), None)], 0,
            {"p": p, "t": [t1, t2, t3], "z": z})


@register("recurrence-kernel", tol=1e-11, trials=200, tags=("algebraic",))
def _check_recurrence_kernel(rng, spec, policy):
    """Partial-fraction theta kernel: n+2 weighted terms summing to zero."""
    p = _cnum(rng, 0.05, 0.45)
    n = 1 + int(rng.integers(0, 3))
    t = [_cnum(rng, 0.3, 1.6) for _ in range(n + 2)]
    z = [_cnum(rng, 0.3, 1.6) for _ in range(n)]
    terms = recurrence_kernel_terms(t, z, p, policy)
    return ([("sum", _sum_residual(terms), None)], 0,
            {"p": p, "t": t, "z": z, "n": n})


@register("cauchy-determinant", tol=1e-10, trials=100,
          tags=("algebraic", "matrix"))
def _check_cauchy_determinant(rng, spec, policy):
    """Theta Cauchy determinant against its factorized product form."""
    p = _cnum(rng, 0.05, 0.4)
    size = 2 + int(rng.integers(0, 2))
    a = [_cnum(rng, 0.4, 1.5) for _ in range(size)]
    z = [_cnum(rng, 0.4, 1.5) for _ in range(size)]
    lhs, rhs = matrixkit.elliptic_cauchy_det(a, z, p, policy)
    return ([("det", _rel(lhs, rhs), None)], 0,
            {"p": p, "a": a, "z": z, "size": size})


@register("exterior-power", tol=1e-12, trials=100, tags=("matrix",))
def _check_exterior_power(rng, spec, policy):
    """Determinant of the n-th compound matrix equals det^binom(N-1,n-1)."""
    size = 3 + int(rng.integers(0, 2))
    n = 1 + int(rng.integers(0, size))
    mat = rng.standard_normal((size, size)) + 1j * rng.standard_normal((size, size))
    lhs, rhs = matrixkit.exterior_power_det_check(mat, n)
    return ([("compound-det", _rel(lhs, rhs), None)], 0,
            {"size": size, "power": n})


@register("potential-ellipticity", tol=1e-11, trials=100, tags=("algebraic",))
def _check_potential_ellipticity(rng, spec, policy):
    """Pair-shift ellipticity and base inversion of the coefficient potential."""
    base = draw_base_pair(rng, (0.08, 0.3), (0.08, 0.35))
    p, q = base.p, base.q
    rp = np.sqrt(complex(p))

    def gaps(t):
        out = []
        sigma = [rp / complex(v) for v in t]
        swapped = [t[1], t[0]] + list(t[2:])
        for tt, qq in ((t, q), (sigma, q), (swapped, q), (t, 1.0 / q)):
            for w in _potential_args(tt, qq):
                out.append(_ladder_gap(w, p, kmax=4))
        return out

    t = draw_balanced(rng, _scaled_windows(base.pq ** 2, 8), base.pq ** 2,
                      constraints=[pairwise_separation(delta=5e-3),
                                   _gap_constraint(gaps, 0.03)])
    a0 = potential(t, q, p, policy)
    parts = []
    for (i, j), label in (((0, 1), "pair-shift-12"), ((3, 5), "pair-shift-46")):
        tt = list(t)
        tt[i] *= p
        tt[j] /= p
        parts.append((label, abs(potential(tt, q, p, policy) - a0) / abs(a0),
                      None))
    lhs = potential([rp / v for v in t], q, p, policy)
    rhs = potential(t, 1.0 / q, p, policy)
    parts.append(("base-inversion", _rel(lhs, rhs), None))
    return parts, 0, {"p": p, "q": q, "t": list(t)}


@register("q-inversion", tol=1e-11, trials=100, tags=("algebraic",))
def _check_q_inversion(rng, spec, policy):
    """Base inversion q -> 1/q via t_j -> p^{a_j}/t_j in rescaled coefficients.

    The downward coefficients, rescaled by theta_p(t_k z^{+-1}/q), change by
    a k-independent factor under the substitution, so the vanishing sum is
    preserved; the residual is the spread of that factor over k.
    """
    m = int(rng.integers(0, 2))
    nslots = 2 * m + 6
    head = tuple(range(m + 2))
    base = draw_base_pair(rng, (0.1, 0.3), (0.15, 0.4))
    p, q = base.p, base.q
    z = _cnum(rng, 0.6, 1.4)
    a = [0] * nslots
    a[0] = a[1] = 1
    a[2] += 2 * m

    def hat(tv, qv):
        cs = downward_coefficients(tv, head, qv, p, policy)
        return [c / (theta(tv[k] * z / qv, p, policy)
                     * theta(tv[k] / (qv * z), p, policy))
                for k, c in zip(head, cs)]

    def gaps(t):
        st = [p ** a[i] / complex(t[i]) for i in range(nslots)]
        out = []
        for tv, qv in ((t, q), (st, 1.0 / q)):
            for k in head:
                for i in range(nslots):
                    if i in head and i != k:
                        out.append(_ladder_gap(tv[i] / tv[k], p))
                    elif i not in head:
                        out.append(_ladder_gap(tv[i] * tv[k] / qv, p))
                out.append(_ladder_gap(tv[k] * z / qv, p))
                out.append(_ladder_gap(tv[k] / (qv * z), p))
        return out

    balance = base.pq ** (m + 1) * q
    t = draw_balanced(rng, _scaled_windows(balance, nslots), balance,
                      constraints=[pairwise_separation(delta=5e-3),
                                   _gap_constraint(gaps, 0.03)])
    st = [p ** a[i] / t[i] for i in range(nslots)]
    ratios = [hs / h for hs, h in zip(hat(st, 1.0 / q), hat(t, q))]
    res = max(abs(r / ratios[0] - 1.0) for r in ratios)
    return ([("spread", res, None)], 0,
            {"p": p, "q": q, "z": z, "t": list(t), "m": m, "a": a})


# ---------------------------------------------------------------------------
# univariate integral evaluations against closed forms
# ---------------------------------------------------------------------------

@register("beta-integral", tol=1e-8, trials=20, tags=("integral",))
def _check_beta_integral(rng, spec, policy):
    """Six-parameter integral against its complete gamma-product evaluation."""
    base = draw_base_pair(rng, (0.1, 0.3), (0.1, 0.35))
    t = draw_balanced(rng, [(0.4, 0.82)] * 6, base.pq,
                      constraints=[pairwise_separation(delta=1e-2)])
    res = i1m(TypeIParams(1, 0, t, base), spec, None, policy)
    rhs = gamma_pair_product(t, base, policy)
    return ([("closed-form", _rel(res.value, rhs), None)], res.nodes_used,
            {"p": base.p, "q": base.q, "t": list(t)})


@register("v-reduction", tol=1e-8, trials=20, tags=("integral",))
def _check_v_reduction(rng, spec, policy):
    """Eight-parameter integral collapsing when one parameter pair is pq."""
    base = draw_base_pair(rng, (0.1, 0.3), (0.1, 0.35))
    t6 = draw_balanced(rng, [(0.4, 0.82)] * 6, base.pq,
                       constraints=[pairwise_separation(delta=1e-2)])
    t7 = _cnum(rng, 0.3, 0.6)
    t8 = base.pq / t7
    vp = VParams(tuple(t6) + (t7, t8), base)
    res = v_function(vp, spec, None, policy)
    rhs = gamma_pair_product(t6, base, policy)
    return ([("reduction", _rel(res.value, rhs), None)], res.nodes_used,
            {"p": base.p, "q": base.q, "t": list(vp.t)})


@register("v-symmetry", tol=1e-9, trials=10, tags=("integral",))
def _check_v_symmetry(rng, spec, policy):
    """Base exchange, parameter permutation, and contour independence of V."""
    base = draw_base_pair(rng, (0.1, 0.3), (0.1, 0.35))
    t = draw_balanced(rng, _scaled_windows(base.pq ** 2, 8, cap=0.85),
                      base.pq ** 2,
                      constraints=[pairwise_separation(delta=1e-2)])
    v0 = v_function(VParams(t, base), spec, None, policy)
    swapped = v_function(VParams(t, base.swapped()), spec, None, policy)
    perm = tuple(t[i] for i in rng.permutation(8))
    permuted = v_function(VParams(perm, base), spec, None, policy)
    shrunk = v_function(VParams(t, base), spec, Contour(0.9), policy)
    nodes_total = sum(r.nodes_used for r in (v0, swapped, permuted, shrunk))
    parts = [
        ("base-swap", _rel(v0.value, swapped.value), None),
        ("permutation", _rel(v0.value, permuted.value), None),
        ("contour-radius", _rel(v0.value, shrunk.value), None),
    ]
    return parts, nodes_total, {"p": base.p, "q": base.q, "t": list(t)}


@register("residue-crossing", tol=1e-7, trials=10,
          tags=("integral", "continuation"))
def _check_residue_crossing(rng, spec, policy):
    """Continuation past the contour in one parameter via the residue term."""
    base = draw_base_pair(rng, (0.08, 0.18), (0.2, 0.32))
    p, q = base.p, base.q
    t1 = _cnum(rng, 1.05, 1.25)

    def gaps(tt):
        full = [t1] + list(tt)
        return [_gamma_gap(full[i] * full[j], base)
                for i in range(6) for j in range(i + 1, 6)]

    mid = draw_balanced(rng, [(0.3, 0.7)] * 5, base.pq / t1,
                        constraints=[pairwise_separation(delta=1e-2),
                                     _gap_constraint(gaps, 0.03)])
    t7 = _cnum(rng, 0.35, 0.65)
    t8 = base.pq / t7
    t = (t1,) + tuple(mid) + (t7, t8)
    params = TypeIParams(1, 1, t, base)
    res = i1m_continued(params, spec, policy)
    rhs = gamma_pair_product(t, base, policy, upto=6)
    parts = [("reduction-oracle", _rel(res.value, rhs), None)]

    # same deformed value from two distinct admissible radii
    mods = np.abs(np.asarray(t))
    mmax = float(np.delete(mods, 0).max())
    sat = abs(t1) * max(abs(p), abs(q))
    lo = max(mmax, 1.0 / abs(t1), sat)
    hi = min(1.0 / mmax, abs(t1), 1.0 / sat)
    f = univariate_integrand(t, base, policy)
    corr = single_pole_correction(t, 0, base, policy)
    vals = []
    nodes_total = res.nodes_used
    for wlo, whi in ((0.65, 0.35), (0.35, 0.65)):
        r = math.exp(wlo * math.log(lo * 1.01) + whi * math.log(hi * 0.99))
        rr = contour_integrate(f, Contour(r), spec)
        vals.append(rr.value * kappa(base, policy) + corr)
        nodes_total += rr.nodes_used
    parts.append(("radius-consistency", _rel(vals[0], vals[1]), 1e-9))
    return parts, nodes_total, {"p": p, "q": q, "t": list(t)}


# ---------------------------------------------------------------------------
# contiguity and difference equations
# ---------------------------------------------------------------------------

@register("contiguity-up", tol=1e-7, trials=20,
          tags=("integral", "contiguity"))
def _check_contiguity_up(rng, spec, policy):
    """Three-term vanishing sum over q-raised parameters at balance p^2 q."""
    base = draw_base_pair(rng, (0.1, 0.3), (0.1, 0.35))
    p, q = base.p, base.q

    def gaps(t):
        out = []
        for i in range(3):
            for j in range(3):
                if i != j:
                    out.append(_ladder_gap(t[i] * t[j], p))
                    out.append(_ladder_gap(t[i] / t[j], p))
        return out

    t = draw_balanced(rng, _scaled_windows(p * p * q, 8, cap=0.86), p * p * q,
                      constraints=[pairwise_separation(delta=1e-2),
                                   _gap_constraint(gaps, 0.04)])
    terms = []
    nodes_total = 0
    for i in range(3):
        j, k = [x for x in range(3) if x != i]
        shifted = list(t)
        shifted[i] *= q
        res = v_function(VParams(tuple(shifted), base), spec, None, policy)
        nodes_total += res.nodes_used
        coeff = t[i] / (theta_pm(t[i], t[j], p, policy)
                        * theta_pm(t[i], t[k], p, policy))
        terms.append(coeff * res.value)
    return ([("sum", _sum_residual(terms), None)], nodes_total,
            {"p": p, "q": q, "t": list(t)})


@register("contiguity-down", tol=1e-7, trials=10,
          tags=("integral", "contiguity"))
def _check_contiguity_down(rng, spec, policy):
    """Three-term vanishing sum over q-lowered parameters at balance p^2 q^3."""
    base = draw_base_pair(rng, (0.15, 0.22), (0.3, 0.4))
    p, q = base.p, base.q

    def gaps(t):
        out = []
        for i in range(3):
            for a in range(3):
                if a != i:
                    out.append(_ladder_gap(t[a] / t[i], p))
            for j in range(3, 8):
                out.append(_ladder_gap(t[i] * t[j] / q, p))
        return out

    t = draw_balanced(rng, _q_lowered_windows(base, 1, 8), p * p * q ** 3,
                      constraints=[pairwise_separation(delta=1e-2),
                                   _gap_constraint(gaps, 0.04)])
    terms = []
    nodes_total = 0
    for i in range(3):
        a, b = [x for x in range(3) if x != i]
        shifted = list(t)
        shifted[i] /= q
        res = v_function(VParams(tuple(shifted), base), spec, None, policy)
        nodes_total += res.nodes_used
        coeff = _prod(theta(t[i] * t[j] / q, p, policy) for j in range(3, 8))
        coeff /= (t[i] * theta(t[a] / t[i], p, policy)
                  * theta(t[b] / t[i], p, policy))
        terms.append(coeff * res.value)
    return ([("sum", _sum_residual(terms), None)], nodes_total,
            {"p": p, "q": q, "t": list(t)})


def _eheq_draw(rng, base, small_first: bool):
    """Parameter draw for the three-term difference equation checks.

    Slots 1 and 2 stay below |q| (both directions of the q-shift must keep
    them inside the contour); slot 1 shrinks to |pq| scale when the second
    independent solution (shifted by 1/p on slot 1) is exercised.
    """
    p, q = base.p, base.q
    qa, pqa = abs(q), abs(base.pq)

    def gaps(t):
        out = []
        for tt in (t, [t[1], t[0]] + list(t[2:])):
            for w in _potential_args(tt, q):
                out.append(_ladder_gap(w, p, kmax=4))
        return out

    if small_first:
        # slot 1 sits at |pq| scale so the rest must carry the balance
        windows = [(0.5 * pqa, 0.85 * pqa), (0.45 * qa, 0.85 * qa)] \
            + [(0.7, 0.88)] * 5 + [(0.55, 0.9)]
    else:
        windows = [(0.45 * qa, 0.85 * qa)] * 2 + [(0.35, 0.72)] * 5 \
            + [(0.3, 0.85)]
    return draw_balanced(rng, windows, base.pq ** 2,
                         constraints=[pairwise_separation(delta=1e-2),
                                      _gap_constraint(gaps, 0.03)])


def _eheq_residual(u_of, t, q, p, policy):
    """Residual of A12 (U(qt1,t2/q) - U) + A21 (U(t1/q,qt2) - U) + U = 0."""
    u0 = u_of(t)
    up = u_of([t[0] * q, t[1] / q] + list(t[2:]))
    um = u_of([t[0] / q, t[1] * q] + list(t[2:]))
    a12 = potential(t, q, p, policy)
    a21 = potential([t[1], t[0]] + list(t[2:]), q, p, policy)
    lhs = a12 * (up - u0) + a21 * (um - u0) + u0
    scale = max(abs(a12 * (up - u0)), abs(a21 * (um - u0)), abs(u0))
    return abs(lhs) / scale


@register("hypergeometric-equation", tol=1e-7, trials=15,
          tags=("integral", "difference-equation"))
def _check_hypergeometric_equation(rng, spec, policy):
    """Three-term q-difference equation for the normalized V-function."""
    base = draw_base_pair(rng, (0.1, 0.16), (0.28, 0.38))
    t = _eheq_draw(rng, base, small_first=False)
    nodes_total = 0

    def u_of(tv):
        nonlocal nodes_total
        vp = VParams(tuple(tv), base)
        res = v_function(vp, spec, None, policy)
        nodes_total += res.nodes_used
        norm = (gamma_pm(vp.t[0], vp.t[2], base, policy)
                * gamma_pm(vp.t[1], vp.t[2], base, policy))
        return res.value / norm

    res = _eheq_residual(u_of, list(t), base.q, base.p, policy)
    return ([("equation", res, None)], nodes_total,
            {"p": base.p, "q": base.q, "t": list(t)})


@register("hypergeometric-second-solution", tol=1e-7, trials=8,
          tags=("integral", "difference-equation"))
def _check_second_solution(rng, spec, policy):
    """The p-shifted image U(t1/p, p t2) solves the same difference equation."""
    base = draw_base_pair(rng, (0.1, 0.16), (0.28, 0.38))
    t = _eheq_draw(rng, base, small_first=True)
    p = base.p
    nodes_total = 0

    def u_of(tv):
        nonlocal nodes_total
        shifted = [tv[0] / p, tv[1] * p] + list(tv[2:])
        vp = VParams(tuple(shifted), base)
        res = v_function(vp, spec, None, policy)
        nodes_total += res.nodes_used
        norm = (gamma_pm(vp.t[0], vp.t[2], base, policy)
                * gamma_pm(vp.t[1], vp.t[2], base, policy))
        return res.value / norm

    res = _eheq_residual(u_of, list(t), base.q, base.p, policy)
    return ([("equation", res, None)], nodes_total,
            {"p": base.p, "q": base.q, "t": list(t)})


@register("hypergeometric-qbig", tol=1e-6, trials=6,
          tags=("integral", "difference-equation"))
def _check_qbig_solution(rng, spec, policy):
    """The |q| > 1 normalization solves the difference equation at base 1/q."""
    p = _cnum(rng, 0.09, 0.13)
    qs = _cnum(rng, 0.30, 0.36)
    qbig = 1.0 / qs
    rp = abs(np.sqrt(p))
    floor = rp / (0.88 * abs(qs))

    def feasible(t):
        if any(rp / abs(v) > 0.88 for v in t[2:]):
            return False
        if abs(t[0]) < floor or abs(t[1]) < floor:
            return False
        swapped = [t[1], t[0]] + list(t[2:])
        for tt in (list(t), swapped):
            for w in _potential_args(tt, qbig):
                if _ladder_gap(w, p, kmax=3) < 0.03:
                    return False
        return True

    windows = [(1.4, 1.75)] * 2 + [(0.45, 0.75)] * 5 + [(0.45, 0.85)]
    t = draw_balanced(rng, windows, (p * qbig) ** 2,
                      constraints=[pairwise_separation(delta=1e-2), feasible])

    def u_of(tv):
        return v_qgt1_solution(tv, p, qbig, spec, policy)

    res = _eheq_residual(u_of, list(t), qbig, p, policy)
    return ([("equation", res, None)], 0,
            {"p": p, "q": qbig, "t": list(t)})


@register("casoratian", tol=1e-6, trials=10, tags=("integral",))
def _check_casoratian(rng, spec, policy):
    """Quadratic combination of shifted V-values equal to a gamma product."""
    base = draw_base_pair(rng, (0.12, 0.2), (0.25, 0.35))
    p, q, pq = base.p, base.q, base.pq

    def gaps(t):
        w = 1.0 / (t[0] * t[1])
        return [abs(t[0] / t[1] - 1.0), abs(t[1] / t[0] - 1.0),
                _gamma_gap(w, base), _gamma_gap(t[0] / t[1], base),
                _gamma_gap(t[1] / t[0], base)]

    t = draw_balanced(rng, [(0.55, 0.8)] * 8, pq,
                      constraints=[pairwise_separation(delta=1e-2),
                                   _gap_constraint(gaps, 0.05)])

    def v_shift(f1, f2):
        shifted = [t[0] * f1, t[1] * f2] + list(t[2:])
        return v_function(VParams(tuple(shifted), base), spec, None, policy)

    r1, r2, r3, r4 = (v_shift(pq, 1), v_shift(1, pq),
                      v_shift(q, p), v_shift(p, q))
    nodes_total = sum(r.nodes_used for r in (r1, r2, r3, r4))
    prod_a = r1.value * r2.value
    prod_b = r3.value * r4.value / (t[0] ** 2 * t[1] ** 2)
    rhs = gamma_pair_product(t, base, policy)
    rhs /= (elliptic_gamma(t[0] * t[1], base, policy)
            * elliptic_gamma(t[0] / t[1], base, policy)
            * elliptic_gamma(t[1] / t[0], base, policy)
            * elliptic_gamma(1.0 / (t[0] * t[1]), base, policy))
    res = abs(prod_a - prod_b - rhs) / max(abs(prod_a), abs(prod_b), abs(rhs))
    return ([("combination", res, None)], nodes_total,
            {"p": p, "q": q, "t": list(t)})


# ---------------------------------------------------------------------------
# normalized-value contiguity and the 2x2 difference systems
# ---------------------------------------------------------------------------

@register("w-contiguity", tol=1e-7, trials=8, tags=("integral", "contiguity"))
def _check_w_contiguity(rng, spec, policy):
    """Three-term relations among doubly q-raised normalized values."""
    base = draw_base_pair(rng, (0.12, 0.18), (0.28, 0.36))
    p, q = base.p, base.q
    z = draw_phase(rng)
    t = draw_balanced(rng, [(0.5, 0.8)] * 8, p * p,
                      constraints=[pairwise_separation(delta=5e-2)])
    t = np.asarray(t, dtype=complex)

    cache = {}
    nodes_total = 0

    def w_at(i, j):
        nonlocal nodes_total
        if (i, j) not in cache:
            tt = t.copy()
            tt[i] *= q
            tt[j] *= q
            val, used = _w_value(tt, z, base, spec, policy)
            nodes_total += used
            cache[(i, j)] = val
        return cache[(i, j)]

    alpha = _alpha_w(t, z, p, policy)
    beta = _beta_w(t, z, p, policy)
    gamma = _gamma_w(t, z, p, policy)
    delta = _delta_w(t, z, p, policy)
    w37, w34 = w_at(2, 6), w_at(2, 3)
    w38, w48 = w_at(2, 7), w_at(3, 7)
    parts = [
        ("relation-1",
         abs(w37 - alpha * w34 - beta * w38)
         / max(abs(w37), abs(alpha * w34), abs(beta * w38)), None),
        ("relation-2",
         abs(w34 - gamma * w38 - delta * w48)
         / max(abs(w34), abs(gamma * w38), abs(delta * w48)), None),
        ("relation-3",
         abs(w37 - (alpha * gamma + beta) * w38 - alpha * delta * w48)
         / max(abs(w37), abs((alpha * gamma + beta) * w38),
               abs(alpha * delta * w48)), None),
    ]
    return parts, nodes_total, {"p": p, "q": q, "z": z, "t": list(t)}


@register("w-matrix-system", tol=1e-7, trials=3, tags=("integral", "system"))
def _check_w_matrix_system(rng, spec, policy):
    """First-order 2x2 q- and p-difference systems in the twist variable."""
    base = draw_base_pair(rng, (0.11, 0.15), (0.30, 0.36))
    p, q, pq = base.p, base.q, base.pq
    z = draw_phase(rng)

    def assemble(draw):
        head = list(draw[:6])
        t7 = draw[6] * draw[7]
        t6 = pq / (_prod(head) * t7)
        return head + [t6, t7], draw[7]

    def ok(draw):
        t, x = assemble(draw)
        return (abs(t[6] * x) <= 0.93
                and abs(t[7] / (p * x)) <= 0.93
                and abs(t[7] / (q * x)) <= 0.93
                and pairwise_separation(delta=4e-2)(t[:6]))

    windows = [(0.85, 0.91)] * 6 + [(0.095, 0.115)] + [(0.60, 0.75)]
    draw = _draw_free(rng, windows, constraints=[ok])
    t, x = assemble(draw)
    t = np.asarray(t, dtype=complex)

    nodes_total = 0

    def m_matrix(xv):
        nonlocal nodes_total
        tx = t.copy()
        tx[6] *= xv
        tx[7] /= xv
        out = np.empty((2, 2), dtype=complex)
        for i, qslot in enumerate((2, 3)):
            for j, pslot in enumerate((0, 1)):
                tt = tx.copy()
                tt[pslot] *= p
                tt[qslot] *= q
                val, used = _w_value(tt, z, base, spec, policy)
                nodes_total += used
                out[i, j] = val
        return out

    mx, mqx, mpx = m_matrix(x), m_matrix(q * x), m_matrix(p * x)
    tx = t.copy()
    tx[6] *= x
    tx[7] /= x
    amat = w_shift_matrix_a(tx, z, base, policy)
    bmat = w_shift_matrix_b(t, x, z, base, policy)
    scale_q = np.abs(mqx).max()
    scale_p = np.abs(mpx).max()
    parts = [
        ("q-system", float(np.abs(mqx - amat @ mx).max() / scale_q), None),
        ("p-system", float(np.abs(mpx - mx @ bmat).max() / scale_p), None),
    ]
    tpx = t.copy()
    tpx[6] *= p * x
    tpx[7] /= p * x
    a_px = w_shift_matrix_a(tpx, z, base, policy)
    parts.append(("coefficient-x-ellipticity",
                  float(np.abs(a_px - amat).max() / np.abs(amat).max()),
                  1e-11))
    tx2 = tx.copy()
    tx2[0] /= p
    tx2[1] *= p
    a_shift = w_shift_matrix_a(tx2, z, base, policy)
    parts.append(("coefficient-pair-shift",
                  float(np.abs(a_shift - amat).max() / np.abs(amat).max()),
                  1e-11))
    return parts, nodes_total, {"p": p, "q": q, "z": z, "x": x, "t": list(t)}


# ---------------------------------------------------------------------------
# parameter recurrences of the multivariate family
# ---------------------------------------------------------------------------

@register("recurrence-up-n1", tol=1e-7, trials=10,
          tags=("integral", "recurrence"))
def _check_recurrence_up_n1(rng, spec, policy):
    """Vanishing q-raised sum for the univariate family at balance p."""
    base = draw_base_pair(rng, (0.05, 0.15), (0.2, 0.35))
    p, q = base.p, base.q
    t = draw_balanced(rng, [(0.45, 0.85)] * 6, p,
                      constraints=[pairwise_separation((0, 1, 2), 5e-2)])
    terms = []
    nodes_total = 0
    for i in range(3):
        shifted = list(t)
        shifted[i] *= q
        res = i1m(TypeIParams(1, 0, tuple(shifted), base), spec, None, policy)
        nodes_total += res.nodes_used
        coeff = t[i]
        for j in range(3):
            if j != i:
                coeff /= theta_pm(t[i], t[j], p, policy)
        terms.append(coeff * res.value)
    return ([("sum", _sum_residual(terms), None)], nodes_total,
            {"p": p, "q": q, "t": list(t)})


@register("recurrence-up-n2", tol=1e-6, trials=3,
          tags=("integral", "recurrence"))
def _check_recurrence_up_n2(rng, spec, policy):
    """Vanishing q-raised sum for the two-dimensional family at balance p."""
    base = draw_base_pair(rng, (0.04, 0.1), (0.2, 0.3))
    p, q = base.p, base.q
    t = draw_balanced(rng, [(0.5, 0.85)] * 8, p,
                      constraints=[pairwise_separation((0, 1, 2, 3), 5e-2)])
    terms = []
    nodes_total = 0
    for i in range(4):
        shifted = list(t)
        shifted[i] *= q
        full = inm_det_full(TypeIParams(2, 0, tuple(shifted), base), spec,
                            a_slots=(4, 5), b_slots=(6, 7), policy=policy)
        nodes_total += full.nodes_used
        coeff = t[i]
        for j in range(4):
            if j != i:
                coeff /= theta_pm(t[i], t[j], p, policy)
        terms.append(coeff * full.value)
    return ([("sum", _sum_residual(terms), None)], nodes_total,
            {"p": p, "q": q, "t": list(t)})


def _recurrence_down_check(rng, spec, policy, n, m, base_windows, evaluator):
    base = draw_base_pair(rng, *base_windows)
    p, q = base.p, base.q
    head = tuple(range(m + 2))
    total = 2 * n + 2 * m + 4

    def gaps(t):
        out = []
        for k in head:
            for i in range(total):
                if i in head and i != k:
                    out.append(_ladder_gap(t[i] / t[k], p))
        return out

    t = draw_balanced(rng, _q_lowered_windows(base, m, total),
                      base.pq ** (m + 1) * q,
                      constraints=[pairwise_separation(delta=1e-2),
                                   _gap_constraint(gaps, 0.04)])
    coeffs = downward_coefficients(t, head, q, p, policy)
    terms = []
    nodes_total = 0
    closed_terms = []
    for k, c in zip(head, coeffs):
        shifted = list(t)
        shifted[k] /= q
        value, used, closed = evaluator(base, shifted)
        nodes_total += used
        terms.append(c * value)
        if closed is not None:
            closed_terms.append(c * closed)
    parts = [("sum", _sum_residual(terms), None)]
    if closed_terms:
        parts.append(("closed-form-route", _sum_residual(closed_terms), 1e-9))
    return parts, nodes_total, {"p": p, "q": q, "t": list(t), "n": n, "m": m}


@register("recurrence-down-n1-m0", tol=1e-7, trials=10,
          tags=("integral", "recurrence"))
def _check_recurrence_down_n1_m0(rng, spec, policy):
    """Vanishing q-lowered sum, univariate, zero surplus (balance p q^2)."""
    def evaluator(base, shifted):
        res = i1m(TypeIParams(1, 0, tuple(shifted), base), spec, None, policy)
        return res.value, res.nodes_used, gamma_pair_product(shifted, base,
                                                             policy)

    return _recurrence_down_check(
        rng, spec, policy, 1, 0, ((0.1, 0.2), (0.3, 0.42)), evaluator)


@register("recurrence-down-n1-m1", tol=1e-7, trials=8,
          tags=("integral", "recurrence"))
def _check_recurrence_down_n1_m1(rng, spec, policy):
    """Vanishing q-lowered sum, univariate, surplus one (balance (pq)^2 q)."""
    def evaluator(base, shifted):
        res = i1m(TypeIParams(1, 1, tuple(shifted), base), spec, None, policy)
        return res.value, res.nodes_used, None

    return _recurrence_down_check(
        rng, spec, policy, 1, 1, ((0.1, 0.18), (0.3, 0.4)), evaluator)


@register("recurrence-down-n2-m0", tol=1e-6, trials=3,
          tags=("integral", "recurrence"))
def _check_recurrence_down_n2_m0(rng, spec, policy):
    """Vanishing q-lowered sum for the two-dimensional family, zero surplus."""
    def evaluator(base, shifted):
        full = inm_det_full(TypeIParams(2, 0, tuple(shifted), base), spec,
                            a_slots=(2, 3), b_slots=(4, 5), policy=policy)
        return (full.value, full.nodes_used,
                gamma_pair_product(shifted, base, policy))

    return _recurrence_down_check(
        rng, spec, policy, 2, 0, ((0.08, 0.14), (0.3, 0.38)), evaluator)


@register("recurrence-down-n2-m1", tol=1e-6, trials=2,
          tags=("integral", "recurrence"))
def _check_recurrence_down_n2_m1(rng, spec, policy):
    """Vanishing q-lowered sum for the two-dimensional family, surplus one."""
    def evaluator(base, shifted):
        full = inm_det_full(TypeIParams(2, 1, tuple(shifted), base), spec,
                            a_slots=(3, 4), b_slots=(5, 6), policy=policy)
        return full.value, full.nodes_used, None

    return _recurrence_down_check(
        rng, spec, policy, 2, 1, ((0.08, 0.14), (0.3, 0.38)), evaluator)


# ---------------------------------------------------------------------------
# the symmetrized kernel and the kernel of the lowered-matrix system
# ---------------------------------------------------------------------------

def _g_function_check(rng, spec, policy, m, base_windows):
    base = draw_base_pair(rng, *base_windows)
    p, q, pq = base.p, base.q, base.pq
    head = m + 2
    z0 = _cnum(rng, 0.75, 1.3)

    def gaps(t):
        out = [_ladder_gap(complex(z0) ** 2, p, kmax=3)]
        for ti in t[:head]:
            out.append(_ladder_gap(pq * z0 / ti, p, kmax=3))
            out.append(_ladder_gap(pq / (ti * z0), p, kmax=3))
        return out

    t = draw_balanced(rng, _q_lowered_windows(base, m, 2 * m + 6, cap=0.85),
                      pq ** (m + 1) * q,
                      constraints=[pairwise_separation(delta=1e-2),
                                   _gap_constraint(gaps, 0.04)])
    t_small, v_big = t[:head], t[head:]

    g0 = g_kernel(z0, t_small, v_big, base, policy)
    g_inv = g_kernel(1.0 / z0, t_small, v_big, base, policy)
    g_shift = g_kernel(p * z0, t_small, v_big, base, policy)
    g_pf = g_partial_fraction(z0, t_small, v_big, base, policy)
    parts = [
        ("inversion-symmetry", abs(g0 - g_inv) / abs(g0), 1e-11),
        ("quasi-periodicity",
         abs(g_shift - p * z0 ** 2 * g0) / max(abs(g_shift),
                                               abs(p * z0 ** 2 * g0)), 1e-11),
        ("partial-fractions", abs(g0 - g_pf) / abs(g0), 1e-10),
    ]

    # node angles offset by half a spacing so no node lands on z = +-1,
    # where the two halves of g have cancelling simple poles
    npts = 512
    zs = np.exp(1j * np.pi * (2.0 * np.arange(npts) + 1.0) / npts)
    dens = univariate_integrand(t, base, policy)
    vals = g_kernel(zs, t_small, v_big, base, policy) * dens(zs)
    integral = complex(vals.mean())
    scale = float(np.abs(vals).mean())
    parts.append(("vanishing-integral", abs(integral) / scale, None))
    return parts, npts, {"p": p, "q": q, "z": z0, "t": list(t), "m": m}


@register("g-function-m1", tol=1e-8, trials=8, tags=("integral", "kernel"))
def _check_g_function_m1(rng, spec, policy):
    """Symmetrized kernel, surplus one: symmetry, periodicity, vanishing."""
    return _g_function_check(rng, spec, policy, 1, ((0.1, 0.18), (0.3, 0.4)))


@register("g-function-m2", tol=1e-8, trials=4, tags=("integral", "kernel"))
def _check_g_function_m2(rng, spec, policy):
    """Symmetrized kernel, surplus two: symmetry, periodicity, vanishing."""
    return _g_function_check(rng, spec, policy, 2, ((0.1, 0.16), (0.3, 0.38)))


def _zero_mode_check(rng, spec, policy, m, q_window, head_scale, tail_maker):
    base = draw_base_pair(rng, (0.018, 0.025), q_window)
    p, q = base.p, base.q
    qa, pa = abs(q), abs(p)
    head = m + 2
    tail = m + 4
    total = 2 * m + 6
    tail_window = tail_maker(pa)

    def ok(t):
        for i in range(head, total):
            y = abs(t[i]) / pa
            if y * max(pa, qa) > 0.88 or y < 1.2:
                return False
        for i in range(head, total):
            for j in range(head, total):
                if i != j and _gamma_gap(t[i] * t[j] / p, base, 1) < 0.04:
                    return False
        return True

    windows = [(head_scale[0] * qa, head_scale[1] * qa)] * head \
        + [tail_window] * tail
    t = draw_balanced(rng, windows, base.pq ** (m + 2),
                      constraints=[pairwise_separation(delta=3e-2), ok])

    mat = np.empty((head, tail), dtype=complex)
    nodes_total = 0
    oracle = []
    for k in range(head):
        for l in range(tail):
            shifted = list(t)
            shifted[k] /= q
            shifted[head + l] /= p
            res = i1m_continued(TypeIParams(1, m, tuple(shifted), base),
                                spec, policy)
            mat[k, l] = res.value
            nodes_total += res.nodes_used
            if m == 0:
                oracle.append(_rel(res.value,
                                   gamma_pair_product(shifted, base, policy)))

    weights = np.asarray(zero_mode_vector(t, base, m, policy))
    combo = weights @ mat
    scale = (np.abs(weights)[:, None] * np.abs(mat)).sum(axis=0)
    kernel_res = float((np.abs(combo) / scale).max())
    parts = [("kernel", kernel_res, None)]

    square = mat[:, :head]
    det = complex(np.linalg.det(square))
    perm_scale = sum(
        abs(_prod(square[i, s[i]] for i in range(head)))
        for s in itertools.permutations(range(head)))
    parts.append(("null-determinant", abs(det) / perm_scale, 1e-6))
    if m == 0:
        parts.append(("entry-oracle", max(oracle), 1e-7))
    else:
        minor_terms = matrixkit.minor_relation_residual(
            mat[:, :head - 1], weights, kernel_rtol=1e-4)
        parts.append(("minor-relation", _sum_residual(minor_terms), 1e-6))
    return parts, nodes_total, {"p": p, "q": q, "t": list(t), "m": m}


@register("zero-mode-m0", tol=1e-7, trials=4, tags=("integral", "kernel"))
def _check_zero_mode_m0(rng, spec, policy):
    """Explicit left kernel of the doubly lowered 2x4 integral matrix."""
    # |q| capped at 0.105 so the continuation satellite bound
    # |t_tail q / p| <= 0.88 holds across the whole tail window
    return _zero_mode_check(rng, spec, policy, 0, (0.09, 0.105), (0.80, 0.88),
                            lambda pa: (1.03 * pa ** 0.5, 1.12 * pa ** 0.5))


@register("zero-mode-m1", tol=1e-7, trials=2, tags=("integral", "kernel"))
def _check_zero_mode_m1(rng, spec, policy):
    """Explicit left kernel of the doubly lowered 3x5 integral matrix."""
    return _zero_mode_check(rng, spec, policy, 1, (0.09, 0.12), (0.78, 0.88),
                            lambda pa: (0.85 * pa ** 0.6, 1.15 * pa ** 0.6))


# ---------------------------------------------------------------------------
# multivariate evaluations: tensor quadrature, determinant route, transforms
# ---------------------------------------------------------------------------

@register("closed-form-n2", tol=1e-6, trials=2, tags=("integral", "multidim"))
def _check_closed_form_n2(rng, spec, policy):
    """Two-dimensional integral at balance pq: tensor and determinant routes
    against the complete gamma-product evaluation."""
    base = draw_base_pair(rng, (0.1, 0.16), (0.25, 0.33))
    t = draw_balanced(rng, [(0.45, 0.75)] * 8, base.pq,
                      constraints=[pairwise_separation(delta=3e-2)])
    params = TypeIParams(2, 0, t, base)
    rhs = gamma_pair_product(t, base, policy)
    direct = inm_direct(params, spec, policy)
    full_a = inm_det_full(params, spec, a_slots=(0, 1), b_slots=(2, 3),
                          policy=policy)
    full_b = inm_det_full(params, spec, a_slots=(4, 5), b_slots=(6, 7),
                          policy=policy)
    nodes_total = (direct.nodes_used ** 2 + full_a.nodes_used
                   + full_b.nodes_used)
    parts = [
        ("tensor-route", _rel(direct.value, rhs), None),
        ("det-route", _rel(full_a.value, rhs), None),
        ("slot-invariance", _rel(full_a.value, full_b.value), 1e-9),
    ]
    return parts, nodes_total, {"p": base.p, "q": base.q, "t": list(t)}


@register("det-route-n2-m1", tol=1e-6, trials=2,
          tags=("integral", "multidim"))
def _check_det_route_n2_m1(rng, spec, policy):
    """Determinant route against tensor quadrature at surplus one."""
    base = draw_base_pair(rng, (0.1, 0.15), (0.25, 0.32))
    t = draw_balanced(rng, [(0.42, 0.68)] * 10, base.pq ** 2,
                      constraints=[pairwise_separation(delta=3e-2)])
    params = TypeIParams(2, 1, t, base)
    direct = inm_direct(params, spec, policy)
    full = inm_det_full(params, spec, a_slots=(0, 1), b_slots=(2, 3),
                        policy=policy)
    nodes_total = direct.nodes_used ** 2 + full.nodes_used
    return ([("det-vs-tensor", _rel(direct.value, full.value), None)],
            nodes_total, {"p": base.p, "q": base.q, "t": list(t)})


def _transformation_draw(rng, policy, nm_left, base_windows):
    """Draw for the sqrt(pq)/t inversion checks; returns the image tuple and
    the gamma pair-product prefactor along with the original parameters.

    Windows scale with the balance so that both the drawn tuple and its
    sqrt(pq)/t image stay comfortably inside the unit circle."""
    (n_l, m_l) = nm_left
    base = draw_base_pair(rng, *base_windows)
    count = 2 * n_l + 2 * m_l + 4
    balance = base.pq ** (m_l + 1)

    def gaps(t):
        return [_gamma_gap(t[i] * t[j], base)
                for i in range(count) for j in range(i + 1, count)]

    t = draw_balanced(rng, _scaled_windows(balance, count, cap=0.8), balance,
                      constraints=[pairwise_separation(delta=3e-2),
                                   _gap_constraint(gaps, 0.03)])
    sigma = tuple(np.sqrt(base.pq) / v for v in t)
    return base, t, sigma, gamma_pair_product(t, base, policy)


@register("transformation-1-1", tol=1e-7, trials=8,
          tags=("integral", "transformation"))
def _check_transformation_1_1(rng, spec, policy):
    """Parameter inversion t -> sqrt(pq)/t with a gamma-product prefactor."""
    base, t, sigma, pref = _transformation_draw(
        rng, policy, (1, 1), ((0.1, 0.14), (0.26, 0.34)))
    lhs = v_function(VParams(t, base), spec, None, policy)
    rhs = v_function(VParams(sigma, base), spec, None, policy)
    nodes_total = lhs.nodes_used + rhs.nodes_used
    return ([("transformation", _rel(lhs.value, pref * rhs.value), None)],
            nodes_total, {"p": base.p, "q": base.q, "t": list(t)})


@register("transformation-2-1", tol=1e-6, trials=2,
          tags=("integral", "transformation"))
def _check_transformation_2_1(rng, spec, policy):
    """Dimension-trading inversion: (n, m) = (2, 1) against (1, 2)."""
    base, t, sigma, pref = _transformation_draw(
        rng, policy, (2, 1), ((0.1, 0.14), (0.26, 0.32)))
    full = inm_det_full(TypeIParams(2, 1, t, base), spec,
                        a_slots=(0, 1), b_slots=(2, 3), policy=policy)
    rhs = i1m(TypeIParams(1, 2, sigma, base), spec, None, policy)
    nodes_total = full.nodes_used + rhs.nodes_used
    return ([("transformation", _rel(full.value, pref * rhs.value), None)],
            nodes_total, {"p": base.p, "q": base.q, "t": list(t)})


@register("transformation-1-2", tol=1e-6, trials=2,
          tags=("integral", "transformation"))
def _check_transformation_1_2(rng, spec, policy):
    """Dimension-trading inversion: (n, m) = (1, 2) against (2, 1)."""
    base, t, sigma, pref = _transformation_draw(
        rng, policy, (1, 2), ((0.1, 0.14), (0.26, 0.32)))
    lhs = i1m(TypeIParams(1, 2, t, base), spec, None, policy)
    full = inm_det_full(TypeIParams(2, 1, sigma, base), spec,
                        a_slots=(0, 1), b_slots=(2, 3), policy=policy)
    nodes_total = lhs.nodes_used + full.nodes_used
    return ([("transformation", _rel(lhs.value, pref * full.value), None)],
            nodes_total, {"p": base.p, "q": base.q, "t": list(t)})


@register("big-determinant", tol=1e-6, trials=3,
          tags=("integral", "multidim"))
def _check_big_determinant(rng, spec, policy):
    """2x2 determinant of doubly raised integrals against the closed product.

    At balance pq the determinant over single p-raises of slots 1-2 crossed
    with single q-raises of slots 3-4 factorizes into a theta bracket (with
    the q-theta on the p-raised pair and vice versa) times the full gamma
    pair product.
    """
    base = draw_base_pair(rng, (0.1, 0.16), (0.25, 0.33))
    p, q = base.p, base.q

    def gaps(t):
        return [_ladder_gap(t[0] * t[1], q, 2), _ladder_gap(t[2] * t[3], p, 2)]

    t = draw_balanced(rng, [(0.5, 0.8)] * 8, base.pq,
                      constraints=[pairwise_separation(delta=3e-2),
                                   _gap_constraint(gaps, 0.05)])
    mat = np.empty((2, 2), dtype=complex)
    nodes_total = 0
    for i, pslot in enumerate((0, 1)):
        for j, qslot in enumerate((2, 3)):
            shifted = list(t)
            shifted[pslot] *= p
            shifted[qslot] *= q
            res = v_function(VParams(tuple(shifted), base), spec, None,
                             policy)
            mat[i, j] = res.value
            nodes_total += res.nodes_used
    det = complex(np.linalg.det(mat))
    bracket = (t[1] * theta_pm(t[0], t[1], q, policy)
               * t[3] * theta_pm(t[2], t[3], p, policy))
    rhs = bracket * gamma_pair_product(t, base, policy)
    return ([("det-product", _rel(det, rhs), None)], nodes_total,
            {"p": p, "q": q, "t": list(t)})


# ---------------------------------------------------------------------------
# q-difference system in the spectral slot of the doubly shifted matrix
# ---------------------------------------------------------------------------

def _i1sys_theta_args(t6, x, v, T):
    """Theta arguments of the shift coefficient whose moduli can drift onto
    the p-power ladder for the admissible windows; everything else stays a
    fixed modulus gap away from every rung."""
    tx = T * x
    args = [tx * v, tx / v, tx * x]
    for l in (0, 1):
        args += [t6[l] * tx, tx / t6[l]]
    for l in (2, 3, 4, 5):
        args.append(tx / t6[l])
    return args


def _i1sys_entry(t6, x, T, i, j, v, base, spec, policy):
    p, q, pq = base.p, base.q, base.pq
    slots = [pq * t6[0], pq * t6[1], t6[2], t6[3], t6[4], t6[5],
             x, pq / (T * x)]
    slots[i] /= p
    slots[j] /= q
    tp = list(t6)
    tp[i] = tp[i] / p
    tp[j] = tp[j] / q
    tshift = T / pq
    num = (elliptic_gamma(v * v, base, policy)
           * elliptic_gamma(1.0 / (v * v), base, policy))
    for r in (0, 1):
        num *= (elliptic_gamma(v / tp[r], base, policy)
                * elliptic_gamma(1.0 / (v * tp[r]), base, policy))
    den = (elliptic_gamma(x * v, base, policy)
           * elliptic_gamma(x / v, base, policy))
    den *= (elliptic_gamma(v / (tshift * x), base, policy)
            * elliptic_gamma(1.0 / (v * tshift * x), base, policy))
    for r in (2, 3, 4, 5):
        den *= gamma_pm(t6[r], v, base, policy)
    res = i1m_continued(TypeIParams(1, 1, tuple(slots), base), spec, policy)
    return num / den * res.value, res.nodes_used


def i1_shift_matrix_a(t6, x, v, base: BasePair,
                      policy: TruncationPolicy = DEFAULT_POLICY) -> np.ndarray:
    """Coefficient matrix of M(qx) = M(x) A(x) for the doubly shifted matrix.

    Column j of M(qx) is D_j M(x)_j + R_j S sum_k C_k M(x)_k, i.e.

        A_{kj} = delta_kj * theta_p(x t_j^{+-1}) theta_p(Tx v^{+-1})
                           / [theta_p(x v^{+-1}) theta_p(Tx t_j^{+-1})]
                 + C_k * S * R_j

    with T the product of all six parameters and S, C, R theta ratios built
    in the code below; A(px) = A(x). The orientation (right multiplication
    mixing the q-shifted columns) was fixed numerically; the left-multiplied
    variants fail at order one.
    """
    p = base.p
    T = _prod(t6)
    tx = T * x
    s_mid = theta(tx * x, p, policy)
    for l in (0, 1):
        s_mid *= theta(t6[l] * tx, p, policy)
    for l in (2, 3, 4, 5):
        s_mid /= theta(tx / t6[l], p, policy)
    out = np.empty((2, 2), dtype=complex)
    for j in (0, 1):
        diag = (theta_pm(x, t6[j], p, policy) * theta_pm(tx, v, p, policy)
                / (theta_pm(x, v, p, policy) * theta_pm(tx, t6[j], p, policy)))
        mix = (theta_pm(t6[j], v, p, policy) * theta_pm(tx, v, p, policy)
               / (theta_pm(t6[j], tx, p, policy)
                  * theta_pm(x, v, p, policy)))
        for k in (0, 1):
            col = theta(t6[k] * x, p, policy)
            for l in (2, 3, 4, 5):
                col *= theta(1.0 / (t6[l] * t6[k]), p, policy)
            col /= (theta(t6[k] * tx, p, policy)
                    * theta_pm(1.0 / t6[k], v, p, policy))
            for l in (0, 1):
                if l != k:
                    col /= theta(t6[l] / t6[k], p, policy)
            out[k, j] = (diag if k == j else 0.0) + col * s_mid * mix
    return out


@register("i1-matrix-system", tol=1e-6, trials=2,
          tags=("integral", "system"))
def _check_i1_matrix_system(rng, spec, policy):
    """First-order q-difference system in the free spectral slot (surplus one).

    The 2x2 matrix of doubly lowered prefactored integrals satisfies
    M(qx) = M(x) A(x) with an explicit theta-ratio A; A is p-elliptic in x,
    and swapping the bases transposes M.
    """
    qmod = draw_modulus(rng, 0.17, 0.20)
    pmod = draw_modulus(rng, 0.10, 0.14)
    base = BasePair(pmod * draw_phase(rng), qmod * draw_phase(rng))
    p, q = base.p, base.q
    v = 1.35 * draw_phase(rng)

    def ok(draw):
        t6, x = draw[:6], draw[6]
        T = _prod(t6)
        if abs(T * x * q) < 1.15:
            return False
        if abs(t6[0] * q) > 0.88 or abs(t6[1] * q) > 0.88:
            return False
        for w in _i1sys_theta_args(t6, x, v, T):
            if _ladder_gap(w, p, kmax=3) < 0.04:
                return False
        # entry prefactors at x and qx: keep Gamma(v^{+-1}/(T'x)) away from
        # the zero lattice of the elliptic gamma function
        tshift = T / base.pq
        for xv in (x, q * x):
            for w in (v / (tshift * xv), 1.0 / (v * tshift * xv)):
                if _gamma_gap(1.0 / w, base, kmax=3) < 0.04:
                    return False
        return True

    windows = [(3.9, 4.4)] * 2 + [(0.80, 0.88)] * 4 + [(0.84, 0.89)]
    draw = _draw_free(rng, windows,
                      constraints=[pairwise_separation((0, 1), 5e-2), ok])
    t6, x = list(draw[:6]), draw[6]
    T = _prod(t6)

    nodes_total = 0

    def m_matrix(xv, bp):
        nonlocal nodes_total
        out = np.empty((2, 2), dtype=complex)
        for i in (0, 1):
            for j in (0, 1):
                val, used = _i1sys_entry(t6, xv, T, i, j, v, bp, spec, policy)
                out[i, j] = val
                nodes_total += used
        return out

    mx = m_matrix(x, base)
    mqx = m_matrix(q * x, base)
    amat = i1_shift_matrix_a(t6, x, v, base, policy)
    res_q = float(np.abs(mqx - mx @ amat).max() / np.abs(mqx).max())
    a_px = i1_shift_matrix_a(t6, p * x, v, base, policy)
    res_ell = float(np.abs(a_px - amat).max() / np.abs(amat).max())
    m_swap = m_matrix(x, base.swapped())
    res_swap = float(np.abs(m_swap - mx.T).max() / np.abs(mx).max())
    parts = [
        ("q-system", res_q, None),
        ("coefficient-x-ellipticity", res_ell, 1e-11),
        ("base-swap-transpose", res_swap, 1e-9),
    ]
    return parts, nodes_total, {"p": p, "q": q, "v": v, "x": x, "t": t6}
