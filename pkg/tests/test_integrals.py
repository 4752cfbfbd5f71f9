"""Unit tests for the integral evaluators and their parameter containers."""

import numpy as np
import pytest

from ellipgamma.errors import (
    BalancingViolated,
    CapExceeded,
    ContourInvalid,
    DomainError,
    TieBreak,
)
from ellipgamma.integrals import (
    DetEvaluation,
    ShiftSpec,
    TypeIParams,
    VParams,
    apply_shifts,
    i1m,
    i1m_continued,
    inm_det,
    inm_det_full,
    inm_direct,
    kappa,
    kappa_n,
    u_function,
    v_function,
    v_qgt1_solution,
    w_function,
)
from ellipgamma.quadrature import QuadSpec
from ellipgamma.sampling import draw_balanced, pairwise_separation, rng_for
from ellipgamma.specfun import BasePair, elliptic_gamma, gamma_pm

BASE = BasePair(0.14 * np.exp(0.4j), 0.31 * np.exp(-0.9j))


def _octuple(seed=0, surplus=2, count=8, lo=0.75, hi=1.25):
    """Balanced parameter draw with windows centred on the balance scale."""
    rng = rng_for(seed, "integrals-unit", 0)
    balance = BASE.pq ** surplus
    c = abs(balance) ** (1.0 / count)
    windows = [(lo * c, min(hi * c, 0.88))] * count
    return draw_balanced(rng, windows, balance,
                         constraints=[pairwise_separation(delta=2e-2)])


# ---------------------------------------------------------------------------
# parameter containers
# ---------------------------------------------------------------------------

def test_vparams_validation():
    t = _octuple()
    params = VParams(t, BASE)
    assert len(params.t) == 8
    with pytest.raises(ValueError):
        VParams(t[:7], BASE)
    skewed = (t[0] * 1.05,) + t[1:]
    with pytest.raises(BalancingViolated):
        VParams(skewed, BASE)
    fixed = VParams.make(list(skewed), BASE)   # re-solves the last slot
    assert fixed.t[:7] == skewed[:7]
    np.testing.assert_allclose(np.prod(fixed.t), BASE.pq ** 2, rtol=1e-12)


def test_type_i_params_validation():
    t = _octuple(surplus=2)        # 8 slots <=> n=1, m=1
    params = TypeIParams(1, 1, t, BASE)
    assert (params.n, params.m) == (1, 1)
    with pytest.raises(ValueError):
        TypeIParams(0, 1, t, BASE)
    with pytest.raises(ValueError):
        TypeIParams(1, -2, t, BASE)
    with pytest.raises(ValueError):
        TypeIParams(2, 1, t, BASE)     # wrong count for (n, m) = (2, 1)
    with pytest.raises(BalancingViolated):
        TypeIParams(1, 0, t[:6], BASE)
    assert params.unit_circle_ok()


def test_surplus_minus_one_balance():
    # m = -1 is admissible: the balance collapses to (pq)^0 = 1
    rng = rng_for(3, "integrals-unit", 1)
    t = draw_balanced(rng, [(0.7, 1.3)] * 4, 1.0 + 0.0j)
    params = TypeIParams(1, -1, t, BASE)
    np.testing.assert_allclose(np.prod(params.t), 1.0, rtol=1e-12)


def test_apply_shifts_balanced_pair():
    params = VParams(_octuple(), BASE)
    shifted = apply_shifts(params, [ShiftSpec(0, q_power=1),
                                    ShiftSpec(1, q_power=-1)])
    assert shifted.t[0] == pytest.approx(params.t[0] * BASE.q)
    assert shifted.t[1] == pytest.approx(params.t[1] / BASE.q)
    assert shifted.t[2:] == params.t[2:]
    with pytest.raises(BalancingViolated):
        apply_shifts(params, [ShiftSpec(0, p_power=1)])
    with pytest.raises(ValueError):
        apply_shifts(params, [ShiftSpec(9, q_power=1)])


# ---------------------------------------------------------------------------
# evaluators
# ---------------------------------------------------------------------------

def test_kappa_symmetry_and_dimension_scaling():
    assert kappa(BASE) == pytest.approx(kappa(BASE.swapped()))
    assert kappa_n(BASE, 1) == pytest.approx(kappa(BASE))
    # the n-fold constant divides by 2^n n!, so kappa^2 = 2 kappa_2
    assert kappa(BASE) ** 2 == pytest.approx(2.0 * kappa_n(BASE, 2))


def test_v_function_is_surplus_one_integral():
    t = _octuple()
    res_v = v_function(VParams(t, BASE))
    res_i = i1m(TypeIParams(1, 1, t, BASE))
    assert res_v.converged and res_i.converged
    assert res_v.value == pytest.approx(res_i.value, rel=1e-12)


def test_i1m_continued_matches_plain_quadrature_inside():
    t = _octuple(seed=4)
    params = TypeIParams(1, 1, t, BASE)
    plain = i1m(params)
    cont = i1m_continued(params)
    assert cont.value == pytest.approx(plain.value, rel=1e-12)


def test_i1m_continued_contour_failures():
    t = list(_octuple(seed=5))
    # two parameters pushed outside: no single-crossing continuation
    t2 = list(t)
    t2[0], t2[1] = 1.2, 1.3
    t2[-1] = BASE.pq ** 2 / np.prod(t2[:-1])
    with pytest.raises(ContourInvalid):
        i1m_continued(TypeIParams(1, 1, tuple(t2), BASE))
    # one crossing pinched between the inner ladder and its reciprocal
    t3 = list(t)
    t3[0] = 1.004
    t3[1] = 0.998
    t3[-1] = BASE.pq ** 2 / np.prod(t3[:-1])
    with pytest.raises(ContourInvalid):
        i1m_continued(TypeIParams(1, 1, tuple(t3), BASE))


def test_inm_direct_dimension_guards():
    t = _octuple()
    res = inm_direct(TypeIParams(1, 1, t, BASE))
    assert res.value == pytest.approx(i1m(TypeIParams(1, 1, t, BASE)).value)
    t10 = _octuple(seed=6, surplus=1, count=10)
    with pytest.raises(CapExceeded):
        inm_direct(TypeIParams(3, 0, t10, BASE))


def test_det_route_agrees_with_tensor_route():
    t = _octuple(seed=7, surplus=2, count=10, lo=0.8, hi=1.2)
    params = TypeIParams(2, 1, t, BASE)
    spec = QuadSpec(n0=64, n_max=256, rel_tol=1e-8)
    full = inm_det_full(params, spec)
    direct = inm_direct(params, spec)
    assert isinstance(full, DetEvaluation)
    assert full.converged and direct.converged
    rel = abs(full.value - direct.value) / abs(direct.value)
    assert rel <= 1e-6
    assert full.value == pytest.approx(full.prefactor * full.det)
    assert full.cond_est >= 1.0
    assert full.entries.shape == (2, 2)
    assert inm_det(params, spec) == pytest.approx(full.value)


def test_inm_det_slot_validation():
    t = _octuple(seed=7, surplus=2, count=10, lo=0.8, hi=1.2)
    params = TypeIParams(2, 1, t, BASE)
    with pytest.raises(ValueError):
        inm_det_full(params, a_slots=(0, 1), b_slots=(1, 2))
    near = list(t)
    near[1] = near[0] * (1.0 + 1e-5)
    near[-1] = BASE.pq ** 2 / np.prod(near[:-1])
    with pytest.raises(TieBreak):
        inm_det_full(TypeIParams(2, 1, tuple(near), BASE))


def test_w_function_inversion_invariance():
    t = _octuple(seed=8)
    params = VParams(t, BASE)
    z = 1.15 * np.exp(0.7j)
    assert w_function(params, z) == pytest.approx(w_function(params, 1.0 / z),
                                                  rel=1e-11)


def test_u_function_normalizer():
    t = _octuple(seed=9)
    params = VParams(t, BASE)
    norm = (gamma_pm(t[0], t[2], BASE) * gamma_pm(t[1], t[2], BASE))
    expected = v_function(params).value / norm
    assert u_function(params) == pytest.approx(expected, rel=1e-12)


def test_v_qgt1_solution_domain_guards():
    t = _octuple()
    with pytest.raises(DomainError):
        v_qgt1_solution(t, BASE.p, BASE.q)      # |q| < 1 not allowed here
    with pytest.raises(ValueError):
        v_qgt1_solution(t[:5], BASE.p, 1.0 / BASE.q)
    with pytest.raises(BalancingViolated):
        v_qgt1_solution(t, BASE.p, 1.0 / BASE.q)  # balance is for BASE.q
