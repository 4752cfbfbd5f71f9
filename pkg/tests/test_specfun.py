"""Unit tests for the q-Pochhammer / theta / elliptic-gamma layer.

Property loops use seeded numpy generators; tolerances are absolute on
relative residuals and sit well above double-precision noise but far below
any plausible implementation error.
"""

import numpy as np
import pytest

from ellipgamma.errors import NonConvergent
from ellipgamma.specfun import (
    BasePair,
    DEFAULT_POLICY,
    DomainError,
    POLE_GUARD,
    PoleProximity,
    TieBreak,
    TruncationCapWarning,
    TruncationPolicy,
    elliptic_gamma,
    elliptic_gamma_recip,
    gamma_compound,
    gamma_pm,
    qpochhammer_inf,
    recurrence_kernel_terms,
    theta,
    theta_addition_terms,
    theta_compound,
    theta_pm,
)


def _draw_base(rng):
    mod_p, mod_q = rng.uniform(0.1, 0.4, size=2)
    ph_p, ph_q = np.exp(2j * np.pi * rng.uniform(size=2))
    return BasePair(mod_p * ph_p, mod_q * ph_q)


def _draw_z(rng, lo=0.3, hi=1.8):
    return rng.uniform(lo, hi) * np.exp(2j * np.pi * rng.uniform())


# ---------------------------------------------------------------------------
# q-Pochhammer
# ---------------------------------------------------------------------------

def test_qpochhammer_frozen_value():
    # independently computed truncation of prod_k (1 - 0.5 * 0.3^k)
    assert qpochhammer_inf(0.5, 0.3) == pytest.approx(0.3980822043018776,
                                                      abs=1e-15)


def test_qpochhammer_functional_equation():
    rng = np.random.default_rng(101)
    for _ in range(200):
        p = 0.45 * rng.uniform() * np.exp(2j * np.pi * rng.uniform())
        z = _draw_z(rng)
        lhs = qpochhammer_inf(z, p)
        rhs = (1.0 - z) * qpochhammer_inf(p * z, p)
        assert abs(lhs - rhs) <= 1e-13 * max(abs(lhs), 1.0)


def test_qpochhammer_zero_argument():
    assert qpochhammer_inf(0.0, 0.3) == pytest.approx(1.0)


def test_qpochhammer_rejects_modulus_one():
    with pytest.raises(NonConvergent):
        qpochhammer_inf(0.5, 1.0)


def test_truncation_cap_warning():
    tight = TruncationPolicy(eps_trunc=1e-17, max_terms=8)
    with pytest.warns(TruncationCapWarning):
        qpochhammer_inf(0.5, 0.8, tight)


# ---------------------------------------------------------------------------
# theta
# ---------------------------------------------------------------------------

def test_theta_quasi_periodicity_and_inversion():
    rng = np.random.default_rng(202)
    for _ in range(200):
        p = 0.45 * rng.uniform() * np.exp(2j * np.pi * rng.uniform())
        z = _draw_z(rng)
        tz = theta(z, p)
        scale = max(abs(tz), 1.0)
        assert abs(theta(p * z, p) + tz / z) <= 1e-13 * scale
        assert abs(theta(1.0 / z, p) + tz / z) <= 1e-13 * scale


def test_theta_vanishes_on_lattice():
    p = 0.2 + 0.1j
    assert theta(1.0, p) == 0.0
    assert abs(theta(p, p)) <= 1e-15
    assert abs(theta(1.0 / p, p)) <= 1e-14


def test_theta_compound_conventions():
    rng = np.random.default_rng(303)
    for _ in range(50):
        p = 0.3 * np.exp(2j * np.pi * rng.uniform())
        t, z = _draw_z(rng, 0.3, 0.9), _draw_z(rng)
        assert theta_pm(t, z, p) == pytest.approx(
            theta(t * z, p) * theta(t / z, p))
        args = [_draw_z(rng, 0.3, 0.9) for _ in range(3)]
        prod = 1.0
        for a in args:
            prod *= theta(a, p)
        assert theta_compound(args, p) == pytest.approx(prod)


def test_theta_addition_three_terms_cancel():
    rng = np.random.default_rng(404)
    for _ in range(100):
        p = 0.4 * rng.uniform() * np.exp(2j * np.pi * rng.uniform())
        t = [_draw_z(rng, 0.3, 1.2) for _ in range(3)]
        z = _draw_z(rng)
        terms = theta_addition_terms(t[0], t[1], t[2], z, p)
        assert len(terms) == 3
        assert abs(sum(terms)) <= 1e-12 * max(abs(v) for v in terms)


def test_recurrence_kernel_terms_cancel():
    rng = np.random.default_rng(505)
    for _ in range(100):
        n = int(rng.integers(1, 4))
        p = 0.35 * rng.uniform() * np.exp(2j * np.pi * rng.uniform())
        t = [_draw_z(rng, 0.4, 1.4) for _ in range(n + 2)]
        z = [_draw_z(rng) for _ in range(n)]
        terms = recurrence_kernel_terms(t, z, p)
        assert len(terms) == n + 2
        assert abs(sum(terms)) <= 1e-11 * max(abs(v) for v in terms)


def test_recurrence_kernel_tie_guard():
    p = 0.2
    with pytest.raises(TieBreak):
        recurrence_kernel_terms([0.5, 0.5 * (1 + 1e-5), 0.8], [1.1], p)


def test_kernel_shape_validation():
    with pytest.raises(ValueError):
        recurrence_kernel_terms([0.5, 0.7, 0.9], [1.1, 1.3], 0.2)


# ---------------------------------------------------------------------------
# elliptic gamma
# ---------------------------------------------------------------------------

def test_gamma_shift_equations():
    rng = np.random.default_rng(606)
    for _ in range(200):
        base = _draw_base(rng)
        z = _draw_z(rng, 0.4, 1.6)
        g = elliptic_gamma(z, base)
        scale = max(abs(g), 1.0)
        assert abs(elliptic_gamma(base.q * z, base)
                   - theta(z, base.p) * g) <= 1e-13 * scale
        assert abs(elliptic_gamma(base.p * z, base)
                   - theta(z, base.q) * g) <= 1e-13 * scale


def test_gamma_reflection_and_swap():
    rng = np.random.default_rng(707)
    for _ in range(200):
        base = _draw_base(rng)
        z = _draw_z(rng, 0.4, 1.6)
        assert abs(elliptic_gamma(z, base)
                   * elliptic_gamma(base.pq / z, base) - 1.0) <= 1e-12
        assert elliptic_gamma(z, base) == pytest.approx(
            elliptic_gamma(z, base.swapped()), rel=1e-12)


def test_gamma_reciprocal():
    base = BasePair(0.2 + 0.05j, 0.3 - 0.1j)
    z = 0.7 * np.exp(0.9j)
    assert elliptic_gamma(z, base) * elliptic_gamma_recip(z, base) == (
        pytest.approx(1.0))


def test_gamma_compound_product():
    base = BasePair(0.15, 0.3j)
    args = [0.5, 0.6 + 0.2j, 1.2 - 0.3j]
    prod = 1.0
    for a in args:
        prod *= elliptic_gamma(a, base)
    assert gamma_compound(args, base) == pytest.approx(prod)
    t, z = 0.4 + 0.1j, 0.9 * np.exp(0.4j)
    assert gamma_pm(t, z, base) == pytest.approx(
        elliptic_gamma(t * z, base) * elliptic_gamma(t / z, base))


def test_gamma_pole_guard():
    base = BasePair(0.2, 0.3)
    # z = 1 is the corner pole of the double series
    with pytest.raises(PoleProximity):
        elliptic_gamma(1.0 + 0.3 * POLE_GUARD, base)
    # the reciprocal has a zero there, not a pole, so it must evaluate
    assert elliptic_gamma_recip(1.0 + 0.3 * POLE_GUARD, base) == (
        pytest.approx(0.0, abs=1e-5))


def test_gamma_vanishes_on_zero_lattice():
    base = BasePair(0.2, 0.3)
    assert abs(elliptic_gamma(base.pq, base)) <= 1e-14
    assert abs(elliptic_gamma(base.p ** 2 * base.q, base)) <= 1e-14


def test_base_pair_validation():
    with pytest.raises(DomainError):
        BasePair(1.0, 0.3)
    with pytest.raises(DomainError):
        BasePair(0.2, 0.2)
    swapped = BasePair(0.2, 0.3j).swapped()
    assert swapped.p == 0.3j and swapped.q == 0.2
    assert BasePair(0.2, 0.3).pq == pytest.approx(0.06)
