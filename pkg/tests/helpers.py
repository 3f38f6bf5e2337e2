"""Shared generators for tests."""

import numpy as np

from cclab.fibration import DoubleFibrationData
from cclab.lambda2 import Lambda2Basis
from cclab.submersion import SubmersionPointData


def tensor_from_operator(M, n):
    """Dense tensor with given wedge-basis operator (pair symmetry and antisymmetries only)."""
    R = np.zeros((n,) * 4)
    pairs = Lambda2Basis(n).pairs
    for a, (i, j) in enumerate(pairs):
        for b, (k, l) in enumerate(pairs):
            v = M[a, b]
            R[i, j, k, l], R[j, i, k, l], R[i, j, l, k], R[j, i, l, k] = v, -v, -v, v
    return R


def random_composite(rng, k, z, b):
    p = k + z
    A = rng.normal(size=(p, b, b))
    A = A - A.transpose(0, 2, 1)
    T = rng.normal(size=(p, b, p))
    T = T + T.transpose(2, 1, 0)
    sym = lambda x: x + x.transpose(0, 3, 2, 1)  # noqa: E731
    asym = lambda x: x - x.transpose(0, 1, 3, 2)  # noqa: E731
    return SubmersionPointData(
        p, b, R_V=rng.normal(size=(p,) * 4), R_B=rng.normal(size=(b,) * 4), A=A, T=T,
        DT_vert=sym(rng.normal(size=(p, p, b, p))), DT_horiz=sym(rng.normal(size=(b, p, b, p))),
        DA_vert=asym(rng.normal(size=(p, p, b, b))), DA_horiz=asym(rng.normal(size=(b, p, b, b))))


def random_double(rng, k, z, b):
    return DoubleFibrationData(k, z, random_composite(rng, k, z, b))


def bounded_double(rng, k, z, b, c):
    """Fibre operator >= c^2 Id and random nabla T: the setting of the quadratic-form bound."""
    p = k + z
    m = p * (p - 1) // 2
    B = rng.normal(size=(m, m)) * rng.uniform(0, 2)
    R_V = tensor_from_operator(c * c * np.eye(m) + B @ B.T, p)
    dT = rng.normal(size=(p, p, b, p)) * rng.uniform(0, 5)
    dT = dT + dT.transpose(0, 3, 2, 1)
    return DoubleFibrationData(k, z, SubmersionPointData(p, b, R_V=R_V, DT_vert=dT), c)


def random_two_form(rng, n):
    D = rng.normal(size=(n, n))
    return D - D.T
