from itertools import permutations

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cclab.errors import InvalidTensorError, NotSymmetricError, ShapeError
from cclab.jacobi import jacobi_eigenvalues
from cclab.lambda2 import (CurvatureOperator, CurvatureTensor, Lambda2Basis, block_diagonal, scale_metric,
                           sectional_curvature, sectional_range, spectrum_of, tensor_to_operator, validate_tensor)


def algebraic_tensor(rng, n):
    """Random tensor with every curvature symmetry: sum of S_ac S_bd - S_ad S_bc terms."""
    R = np.zeros((n, n, n, n))
    for _ in range(3):
        S = rng.normal(size=(n, n))
        S = S + S.T
        R += np.einsum("ac,bd->abcd", S, S) - np.einsum("ad,bc->abcd", S, S)
    return CurvatureTensor(R)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 12), st.integers(0, 2**32 - 1))
def test_jacobi_matches_lapack(n, seed):
    m = np.random.default_rng(seed).normal(size=(n, n))
    m = m + m.T
    np.testing.assert_allclose(np.sort(jacobi_eigenvalues(m)), np.linalg.eigvalsh(m), atol=1e-10)


def test_jacobi_rejects_asymmetric():
    with pytest.raises(NotSymmetricError):
        jacobi_eigenvalues(np.array([[1.0, 2.0], [0.0, 1.0]]))


def test_basis_order():
    b = Lambda2Basis(4)
    assert b.dim == 6
    assert list(b.pairs) == [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]
    assert all(b.index(i, j) == k for k, (i, j) in enumerate(b.pairs))


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_unit_sphere_is_identity(n):
    s = spectrum_of(CurvatureTensor.constant_curvature(n))
    np.testing.assert_allclose(s.eigenvalues, 1.0, atol=1e-12)
    assert len(s) == n * (n - 1) // 2


def test_sphere_sectional_curvature_is_one():
    R = CurvatureTensor.constant_curvature(4)
    assert sectional_curvature(R, np.eye(4)[0], np.eye(4)[2]) == pytest.approx(1.0)
    lo, hi = sectional_range(R)
    assert lo == pytest.approx(1.0) and hi == pytest.approx(1.0)


def test_sectional_rejects_non_orthonormal():
    with pytest.raises(InvalidTensorError):
        sectional_curvature(CurvatureTensor.constant_curvature(3), [1, 0, 0], [1, 1, 0])


def test_flat_tensor_gives_zero_spectrum():
    s = spectrum_of(CurvatureTensor.zeros(4))
    assert np.all(s.eigenvalues == 0.0)


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 6), st.integers(0, 2**32 - 1))
def test_random_algebraic_tensor_validates(n, seed):
    R = algebraic_tensor(np.random.default_rng(seed), n)
    assert validate_tensor(R, tol=1e-10, relative=True).ok


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 6), st.integers(0, 2**32 - 1), st.floats(0.01, 100.0))
def test_scaling_divides_spectrum(n, seed, c):
    R = algebraic_tensor(np.random.default_rng(seed), n)
    np.testing.assert_allclose(spectrum_of(scale_metric(R, c)).eigenvalues,
                               spectrum_of(R).eigenvalues / c**2, rtol=1e-10, atol=1e-10)


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 6), st.integers(0, 2**32 - 1))
def test_operator_trace_is_half_scalar_curvature(n, seed):
    R = algebraic_tensor(np.random.default_rng(seed), n)
    scal = np.einsum("ijij->", R.R)
    assert np.trace(tensor_to_operator(R).M) == pytest.approx(scal / 2, rel=1e-10, abs=1e-10)


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 5), st.integers(0, 2**32 - 1))
def test_sectional_within_operator_bounds(n, seed):
    R = algebraic_tensor(np.random.default_rng(seed), n)
    s = spectrum_of(R)
    lo, hi = sectional_range(R)
    assert s.min - 1e-9 <= lo <= hi <= s.max + 1e-9


def test_broken_bianchi_is_named():
    # the volume form has every symmetry except Bianchi
    R = np.zeros((4, 4, 4, 4))
    for perm in permutations(range(4)):
        R[perm] = np.linalg.det(np.eye(4)[list(perm)])
    assert validate_tensor(R).failures() == ["first_bianchi"]


def test_operator_rejects_antisymmetry_failure():
    R = np.zeros((2, 2, 2, 2))
    R[0, 1, 0, 1] = 1.0
    with pytest.raises(InvalidTensorError, match="antisymmetry"):
        tensor_to_operator(CurvatureTensor(R))


def test_operator_checks_symmetry():
    with pytest.raises(NotSymmetricError):
        CurvatureOperator(Lambda2Basis(3), np.triu(np.ones((3, 3))))


def test_shape_errors():
    with pytest.raises(ShapeError):
        CurvatureTensor(np.zeros((2, 2, 2)))
    with pytest.raises(ShapeError):
        sectional_curvature(CurvatureTensor.zeros(3), [1, 0], [0, 1])


def test_block_diagonal_spectrum_is_union_plus_zeros():
    a = CurvatureTensor.constant_curvature(2, 2.0)
    b = CurvatureTensor.constant_curvature(3, -1.0)
    s = spectrum_of(block_diagonal(a, b)).eigenvalues
    expect = np.sort([2.0] + [-1.0] * 3 + [0.0] * 6)
    np.testing.assert_allclose(s, expect, atol=1e-12)


def test_tensor_is_immutable():
    R = CurvatureTensor.constant_curvature(2)
    with pytest.raises(ValueError):
        R.R[0, 1, 0, 1] = 3.0
