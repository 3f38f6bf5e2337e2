import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cclab.errors import LieAlgebraError
from cclab.lambda2 import CurvatureTensor, spectrum_of, validate_tensor
from cclab.lie import (SU3_CIRCLE, LieAlgebraData, ReductiveSplit, biinvariant_curvature, make_algebra, product,
                       quotient_submersion_data, scaled, so_n, su2, su3, symmetric_space_curvature, torus)
from cclab.submersion import assemble_tg, base_from_total
from lie_oracle import left_invariant_curvature, orthonormal_constants


ALGEBRAS = [su2(), su3(), so_n(3), so_n(4), so_n(5), torus(2), product(su2(), su2()), product(su2(), torus(1))]


@pytest.mark.parametrize("g", ALGEBRAS, ids=lambda g: g.name)
def test_constructors_are_biinvariant_lie_algebras(g):
    g.check(require_biinvariant=True)
    assert g.jacobi_residual() < 1e-13


def test_su2_operator_is_quarter_identity():
    s = spectrum_of(biinvariant_curvature(su2()))
    np.testing.assert_allclose(s.eigenvalues, 0.25, atol=1e-12)


@pytest.mark.parametrize("g", ALGEBRAS, ids=lambda g: g.name)
def test_biinvariant_operator_psd(g):
    assert spectrum_of(biinvariant_curvature(g)).min >= -1e-10


@pytest.mark.parametrize("g", ALGEBRAS, ids=lambda g: g.name)
def test_biinvariant_matches_koszul(g):
    np.testing.assert_allclose(biinvariant_curvature(g).R, left_invariant_curvature(g.c), atol=1e-13)


@settings(max_examples=20, deadline=None)
@given(st.floats(0.1, 10.0))
def test_scaled_algebra_scales_curvature(s):
    R1 = biinvariant_curvature(su3()).R
    R2 = biinvariant_curvature(scaled(su3(), s)).R
    np.testing.assert_allclose(R2, R1 / s**2, atol=1e-12)


def test_su3_dimensions_and_circle():
    g = su3()
    assert g.dim == 8
    # the circle direction commutes with the su(2) block
    for i in range(3):
        assert np.allclose(g.bracket(SU3_CIRCLE, np.eye(8)[i]), 0.0)


def test_make_algebra_dispatch_and_errors():
    assert make_algebra("so_n", 4).dim == 6
    assert make_algebra("torus", 3).dim == 3
    assert make_algebra("product", su2(), torus(1)).dim == 4
    with pytest.raises(LieAlgebraError, match="unknown"):
        make_algebra("e8")
    with pytest.raises(LieAlgebraError, match="argument"):
        make_algebra("so_n")


def test_broken_jacobi_is_reported():
    # generic antisymmetric constants in dimension 4 violate Jacobi
    c = np.random.default_rng(0).normal(size=(4, 4, 4))
    c = c - c.transpose(0, 2, 1)
    assert LieAlgebraData(c).jacobi_residual() > 1e-3
    with pytest.raises(LieAlgebraError, match="Jacobi residual"):
        LieAlgebraData(c).check()


def test_non_biinvariant_inner_product_rejected():
    g = LieAlgebraData(su2().c, np.diag([1.0, 2.0, 3.0]))
    with pytest.raises(LieAlgebraError, match="bi-invariant"):
        biinvariant_curvature(g)


def test_in_basis_preserves_curvature_spectrum():
    rng = np.random.default_rng(3)
    q, _ = np.linalg.qr(rng.normal(size=(8, 8)))
    g = su3().in_basis(q)
    np.testing.assert_allclose(spectrum_of(biinvariant_curvature(g)).eigenvalues,
                               spectrum_of(biinvariant_curvature(su3())).eigenvalues, atol=1e-12)


def test_symmetric_pair_two_routes_agree():
    # so(3) / so(2): round 2-sphere; symmetric-space formula vs O'Neill from the group
    split = ReductiveSplit.from_subalgebra(so_n(3), [np.eye(3)[0]])
    assert split.is_symmetric
    R1 = symmetric_space_curvature(split)
    data = quotient_submersion_data(split)
    R2 = base_from_total(data, biinvariant_curvature(split.adapted()))
    np.testing.assert_allclose(R1.R, R2.R, atol=1e-13)
    assert R1.R[0, 1, 0, 1] == pytest.approx(0.5)


@pytest.mark.parametrize("n", [4, 5])
def test_sphere_quotients_agree(n):
    # so(n) / so(n-1) is the round sphere
    k = [i for i, (a, b) in enumerate((a, b) for a in range(n) for b in range(a + 1, n)) if a > 0]
    split = ReductiveSplit.from_subalgebra(so_n(n), np.eye(n * (n - 1) // 2)[k])
    R = symmetric_space_curvature(split)
    s = spectrum_of(R).eigenvalues
    np.testing.assert_allclose(s, s[0], atol=1e-12)
    assert s[0] > 0
    data = quotient_submersion_data(split)
    np.testing.assert_allclose(base_from_total(data, biinvariant_curvature(split.adapted())).R, R.R, atol=1e-13)


def test_non_symmetric_pair_named():
    split = ReductiveSplit.from_subalgebra(su3(), [SU3_CIRCLE])
    assert not split.is_symmetric
    with pytest.raises(LieAlgebraError, match=r"\[m_\d+, m_\d+\]"):
        symmetric_space_curvature(split)


def test_not_a_subalgebra_rejected():
    with pytest.raises(LieAlgebraError):
        ReductiveSplit.from_subalgebra(su2(), [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]])


SPLITS = [
    (su3(), [SU3_CIRCLE]),
    (su3(), np.eye(8)[:3]),
    (product(su2(), su2()), [np.r_[np.eye(3)[i], np.eye(3)[i]] for i in range(3)]),
    (so_n(4), np.eye(6)[[3, 4, 5]]),
    (so_n(5), np.eye(10)[[4, 5, 6, 7, 8, 9]]),
    (scaled(su2(), 0.5), [[0.0, 0.0, 1.0]]),
]


@pytest.mark.parametrize("alg,k", SPLITS, ids=lambda x: getattr(x, "name", ""))
@pytest.mark.parametrize("eps", [1.0, 0.3])
def test_quotient_data_reproduces_canonical_variation(alg, k, eps):
    # Koszul on the left-invariant metric with the k directions scaled by eps
    split = ReductiveSplit.from_subalgebra(alg, k)
    data = quotient_submersion_data(split)
    data = data.with_base(base_from_total(data, biinvariant_curvature(split.adapted())))
    R = assemble_tg(data, np.log(eps))
    c = split.adapted().c
    scales = [eps] * split.p + [1.0] * split.b
    expect = left_invariant_curvature(orthonormal_constants(c, scales))
    np.testing.assert_allclose(R.R, expect, atol=1e-12)
    assert validate_tensor(R, tol=1e-12).ok


def test_hopf_split_base_is_radius_half_sphere():
    split = ReductiveSplit.from_subalgebra(scaled(su2(), 0.5), [[0.0, 0.0, 1.0]])
    data = quotient_submersion_data(split)
    R_B = base_from_total(data, biinvariant_curvature(split.adapted()))
    assert R_B.R[0, 1, 0, 1] == pytest.approx(4.0)


def test_su3_circle_quotient_has_negative_operator():
    split = ReductiveSplit.from_subalgebra(su3(), [SU3_CIRCLE])
    data = quotient_submersion_data(split)
    R_B = base_from_total(data, biinvariant_curvature(split.adapted()))
    assert spectrum_of(R_B).min == pytest.approx(-0.375, abs=1e-12)


def test_quotient_requires_biinvariant():
    g = LieAlgebraData(su2().c, np.diag([1.0, 1.0, 4.0]))
    split = ReductiveSplit(g.orthonormalized(), np.eye(3)[:1], np.eye(3)[1:])
    with pytest.raises(LieAlgebraError):
        quotient_submersion_data(split)


def test_constant_curvature_helper():
    assert CurvatureTensor.constant_curvature(3, 2.0).R[0, 1, 0, 1] == 2.0
