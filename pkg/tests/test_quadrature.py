"""Unit tests for circle-contour quadrature with node doubling."""

import numpy as np
import pytest

from ellipgamma.errors import CapExceeded
from ellipgamma.quadrature import (
    Contour,
    QuadSpec,
    circle_contour_valid,
    contour_integrate,
    contour_sum,
    nodes,
    tensor_integrate,
)


def test_nodes_lie_on_circle():
    ring = nodes(Contour(0.7), 16)
    assert ring.shape == (16,)
    np.testing.assert_allclose(np.abs(ring), 0.7, atol=1e-15)
    assert ring[0] == pytest.approx(0.7)
    # equally spaced points sum to zero
    assert abs(ring.sum()) <= 1e-13


def test_laurent_monomials_integrate_to_kronecker_delta():
    # against dz/(2 pi i z) the only surviving monomial is z^0; a value that
    # collapses to zero needs abs_floor large enough that rel_tol * abs_floor
    # clears double-precision roundoff
    spec = QuadSpec(rel_tol=1e-9, abs_floor=1e-6)
    for k in (-3, -1, 1, 2, 5):
        res = contour_integrate(lambda z, k=k: z ** k, Contour(0.8), spec)
        assert res.converged
        assert abs(res.value) <= 1e-14
    res = contour_integrate(lambda z: np.ones_like(z))
    assert res.value == pytest.approx(1.0)


def test_geometric_series_pole_inside():
    # f(z) = 1/(1 - a/z) integrates to 1 for |a| < r (geometric in a/z)
    for a in (0.3, 0.5 + 0.2j):
        res = contour_integrate(lambda z, a=a: 1.0 / (1.0 - a / z))
        assert res.converged
        assert res.value == pytest.approx(1.0, abs=1e-11)


def test_convergence_flag_and_error_estimate():
    res = contour_integrate(lambda z: np.exp(z) / (1.0 - 0.4 / z))
    assert res.converged
    assert res.err_est <= 1e-11 * abs(res.value)
    assert res.nodes_used <= 1024


def test_nonconvergence_reports_cap():
    # pole just inside the circle needs far more than 32 nodes
    spec = QuadSpec(n0=16, n_max=32, rel_tol=1e-13)
    res = contour_integrate(lambda z: 1.0 / (1.0 - 0.995 / z), spec=spec)
    assert not res.converged
    assert res.nodes_used == 32
    assert res.err_est > 0.0


def test_contour_sum_fixed_pass():
    val = contour_sum(lambda z: z ** 2 + 3.0, Contour(1.0), 64)
    assert val == pytest.approx(3.0)


def test_tensor_integrate_two_axes():
    # coupled integrand: only the diagonal Laurent term z1^k z2^-k survives
    res = tensor_integrate(lambda z1, z2: 1.0 / (1.0 - 0.35 * z1 / z2), n=2)
    assert res.converged
    assert res.value == pytest.approx(1.0, abs=1e-9)


def test_tensor_integrate_three_axes_and_cap():
    res = tensor_integrate(lambda a, b, c: a * b * c + 2.0,
                           spec=QuadSpec(n0=16, n_max=64, rel_tol=1e-9), n=3)
    assert res.value == pytest.approx(2.0)
    with pytest.raises(CapExceeded):
        tensor_integrate(lambda *zs: 1.0, n=4)
    with pytest.raises(ValueError):
        tensor_integrate(lambda *zs: 1.0, n=0)


def test_quad_result_scaled():
    res = contour_integrate(lambda z: np.ones_like(z))
    doubled = res.scaled(2.0j)
    assert doubled.value == pytest.approx(2.0j)
    assert doubled.err_est == pytest.approx(2.0 * res.err_est)
    assert doubled.nodes_used == res.nodes_used


def test_spec_and_contour_validation():
    with pytest.raises(ValueError):
        QuadSpec(n0=8)
    with pytest.raises(ValueError):
        QuadSpec(n0=64, n_max=32)
    with pytest.raises(ValueError):
        QuadSpec(rel_tol=0.0)
    with pytest.raises(ValueError):
        Contour(0.0)


def test_circle_contour_valid_margins():
    assert circle_contour_valid([0.3, 0.5, 0.7])
    assert not circle_contour_valid([0.3, 1.01])
    # 0.99 < 1 but inside the default 2% margin
    assert not circle_contour_valid([0.99])
    assert circle_contour_valid([0.99], margin=0.005)
    # off-unit radius: both the ladder below and its reciprocal must clear
    assert circle_contour_valid([0.5], radius=0.8)
    assert not circle_contour_valid([0.5], radius=2.1)
    assert circle_contour_valid([])
