"""Unit tests for theta-Cauchy determinants, minors, and compound matrices."""

import math

import numpy as np
import pytest

from ellipgamma.errors import CapExceeded, KernelViolated, PoleProximity, TieBreak
from ellipgamma.matrixkit import (
    colex_subsets,
    det_with_cond,
    elliptic_cauchy_det,
    exterior_power_det_check,
    minor_relation_residual,
)


def _points(rng, n, lo=0.5, hi=1.6):
    return [rng.uniform(lo, hi) * np.exp(2j * np.pi * rng.uniform())
            for _ in range(n)]


def test_cauchy_determinant_sizes_one_to_three():
    rng = np.random.default_rng(11)
    for n in (1, 2, 3):
        for _ in range(25):
            p = 0.35 * rng.uniform(0.3, 1.0) * np.exp(2j * np.pi * rng.uniform())
            try:
                lhs, rhs = elliptic_cauchy_det(_points(rng, n), _points(rng, n), p)
            except (TieBreak, PoleProximity):
                continue
            assert abs(lhs - rhs) <= 1e-10 * max(abs(lhs), abs(rhs))


def test_cauchy_determinant_guards():
    p = 0.2
    with pytest.raises(ValueError):
        elliptic_cauchy_det([0.5, 0.7], [1.1], p)
    with pytest.raises(TieBreak):
        elliptic_cauchy_det([0.5, 0.5 * (1 + 1e-5)], [1.1, 1.3], p)


def test_det_with_cond():
    mat = np.array([[2.0, 1.0], [1.0, 2.0]], dtype=complex)
    det, cond = det_with_cond(mat)
    assert det == pytest.approx(3.0)
    assert cond == pytest.approx(3.0)


def test_colex_subsets_pinned_order():
    assert colex_subsets(4, 2) == [(0, 1), (0, 2), (1, 2),
                                   (0, 3), (1, 3), (2, 3)]
    assert colex_subsets(3, 1) == [(0,), (1,), (2,)]
    assert len(colex_subsets(4, 3)) == math.comb(4, 3)


def test_exterior_power_determinant_identity():
    rng = np.random.default_rng(22)
    for big in (3, 4):
        for n in range(1, big + 1):
            mat = rng.normal(size=(big, big)) + 1j * rng.normal(size=(big, big))
            lhs, rhs = exterior_power_det_check(mat, n)
            assert abs(lhs - rhs) <= 1e-12 * max(abs(lhs), abs(rhs))


def test_exterior_power_guards():
    rng = np.random.default_rng(33)
    with pytest.raises(CapExceeded):
        exterior_power_det_check(rng.normal(size=(5, 5)), 2)
    with pytest.raises(ValueError):
        exterior_power_det_check(rng.normal(size=(3, 4)), 2)
    with pytest.raises(ValueError):
        exterior_power_det_check(rng.normal(size=(3, 3)), 4)


def test_minor_relation_for_kernel_vector():
    rng = np.random.default_rng(44)
    for _ in range(25):
        n, k = 4, 2
        mat = rng.normal(size=(n, k)) + 1j * rng.normal(size=(n, k))
        # the condition v @ mat = 0 is bilinear, so the left kernel is the
        # null space of mat.T (right singular directions past the rank)
        _, _, vh = np.linalg.svd(mat.T)
        coeffs = rng.normal(size=n - k) + 1j * rng.normal(size=n - k)
        v = vh[k:].conj().T @ coeffs
        terms = minor_relation_residual(mat, v, kernel_rtol=1e-10)
        assert terms.shape == (n - k + 1,)
        assert abs(terms.sum()) <= 1e-12 * max(np.abs(terms).max(), 1e-300)


def test_minor_relation_k1_reduces_to_kernel_condition():
    mat = np.array([[1.0], [2.0], [-1.0]], dtype=complex)
    v = np.array([2.0, 0.0, 2.0], dtype=complex)   # v @ mat = 0
    terms = minor_relation_residual(mat, v)
    np.testing.assert_allclose(terms, v * mat[:, 0])
    assert abs(terms.sum()) <= 1e-15


def test_minor_relation_guards():
    mat = np.eye(3, 2, dtype=complex)
    with pytest.raises(KernelViolated):
        minor_relation_residual(mat, np.array([1.0, 1.0, 1.0]))
    with pytest.raises(ValueError):
        minor_relation_residual(np.eye(2, 2, dtype=complex),
                                np.array([1.0, -1.0]))
    with pytest.raises(ValueError):
        minor_relation_residual(mat, np.array([0.0, 0.0]))
