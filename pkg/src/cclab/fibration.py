"""Double fibrations ``M -> B -> B/T^k`` and their collapsing family.

Index blocks follow the torus picture: ``alpha`` for the base of the base
(``b`` of them), ``i`` for torus directions (``k``) and ``I`` for the fibre
``Z`` of ``M -> B`` (``z``). All data is stored for the composite submersion
``M -> B/T^k`` whose vertical space is ``i + I``; vertical indices are laid
out torus first, then fibre.

Scaling both vertical blocks by ``eps**2`` is the canonical variation of the
composite submersion, i.e. a constant vertical warp ``f = log eps``.
"""

from dataclasses import dataclass, replace

import numpy as np

from .errors import InvalidTensorError, ShapeError
from .lambda2 import CurvatureTensor, spectrum_of
from .submersion import SubmersionPointData, WarpData, assemble_h0, oneill_horizontal


@dataclass(frozen=True)
class DoubleFibrationData:
    k: int
    z: int
    composite: SubmersionPointData
    c: float = 1.0

    def __post_init__(self):
        if self.k < 0 or self.z < 0:
            raise ShapeError("block dimensions must be non-negative")
        if self.composite.p != self.k + self.z:
            raise ShapeError(f"composite fibre has dimension {self.composite.p}, expected k + z = {self.k + self.z}")
        object.__setattr__(self, "c", float(self.c))

    @property
    def b(self) -> int:
        return self.composite.b

    @property
    def n(self) -> int:
        return self.k + self.z + self.b

    @property
    def torus(self) -> slice:
        return slice(0, self.k)

    @property
    def fibre(self) -> slice:
        return slice(self.k, self.k + self.z)

    def with_composite(self, **changes):
        return replace(self, composite=replace(self.composite, **changes))


def amalgamate(data: DoubleFibrationData) -> SubmersionPointData:
    """The single submersion with fibre ``T^k x Z``."""
    return data.composite


def _check_eps(eps):
    if not eps > 0:
        raise InvalidTensorError(f"eps must be positive, got {eps}")


def double_fibration_components(data: DoubleFibrationData, eps: float) -> CurvatureTensor:
    """Curvature of ``eps^2 g_1 + eps^2 g_2 + g_3`` in its orthonormal frame."""
    _check_eps(eps)
    comp = data.composite
    return assemble_h0(comp, WarpData(comp.b, f=np.log(eps)))


def extra_families(data: DoubleFibrationData, eps: float) -> dict:
    """The components mixing torus and fibre blocks, each with its own power of eps.

    Returned arrays, keyed by the index pattern, all in the orthonormal frame
    of the collapsed metric:

    * ``"abcd"``: ``eps^2`` O'Neill correction of the base block, split into
      torus and fibre contributions;
    * ``"iIab"``, ``"iabI"``: ``eps^2`` quadratic terms in ``A``;
    * ``"iIjJ"``: the cross ``T T`` terms (no eps factor);
    * ``"iIaJ"``, ``"iajI"``: ``eps`` terms, products of ``A`` and ``T``.
    """
    _check_eps(eps)
    comp = data.composite
    t, F = data.torus, data.fibre
    A, T = comp.A, comp.T
    At, Af = A[t], A[F]
    e, e2 = eps, eps * eps

    out = {}
    out["abcd"] = e2 * (oneill_horizontal(At) + oneill_horizontal(Af))
    # A^i_{ca} A^c_{I b} - (a <-> b), with A^c_{I b} = -A^I_{c b}
    out["iIab"] = -e2 * (np.einsum("ica,Icb->iIab", At, Af) - np.einsum("icb,Ica->iIab", At, Af))
    # A^i_{cb} A^c_{a I}, with A^c_{a I} = -A^I_{c a}
    out["iabI"] = -e2 * np.einsum("icb,Ica->iabI", At, Af)
    # T^i_{a j} T^a_{I J} - T^i_{a J} T^a_{I j}
    Tt, Tf = T[t], T[F]
    out["iIjJ"] = (-np.einsum("iaj,IaJ->iIjJ", Tt[:, :, t], Tf[:, :, F])
                   + np.einsum("iaJ,Iaj->iIjJ", Tt[:, :, F], Tf[:, :, t]))
    # R_{i I a J} = R_{a J i I} = -R_{J a i I}; the latter from the mixed line
    # T^J_{b i} A^b_{a I} - T^J_{b I} A^b_{a i}, with A^b_{a K} = A^K_{a b}
    out["iIaJ"] = -e * (np.einsum("Jbi,Iab->iIaJ", Tf[:, :, t], Af)
                        - np.einsum("JbI,iab->iIaJ", Tf[:, :, F], At))
    # R_{i a j I} = T^i_{b j} A^b_{a I} - T^i_{b I} A^b_{a j}
    out["iajI"] = e * (np.einsum("ibj,Iab->iajI", Tt[:, :, t], Af)
                       - np.einsum("ibI,jab->iajI", Tt[:, :, F], At))
    return out


EXTRA_FAMILY_POWERS = {"abcd": 2, "iIab": 2, "iabI": 2, "iIjJ": 0, "iIaJ": 1, "iajI": 1}


def divergent_tensor(data: DoubleFibrationData, eps: float) -> CurvatureTensor:
    """The only components that can blow up as ``eps -> 0``.

    ``eps^-2 R_V`` on the whole vertical block, plus ``eps^-1 (nabla_j T^i_{ak}
    - nabla_k T^i_{aj})`` restricted to indices all in the torus block or all
    in the fibre block, completed by the curvature symmetries.
    """
    _check_eps(eps)
    comp = data.composite
    p, b = comp.p, comp.b
    n = p + b
    V, H = slice(0, p), slice(p, n)
    S = np.zeros((n, n, n, n))
    S[V, V, V, V] = comp.R_V.R / eps**2
    m = np.zeros((p, b, p, p))
    dT = comp.DT_vert
    for blk in (data.torus, data.fibre):
        d = dT[blk][:, blk][:, :, :, blk]
        m[blk, :, blk, blk] = (np.einsum("jiak->iajk", d) - np.einsum("kiaj->iajk", d)) / eps
    S[V, H, V, V] = m
    S[H, V, V, V] = -m.transpose(1, 0, 2, 3)
    S[V, V, V, H] = m.transpose(2, 3, 0, 1)
    S[V, V, H, V] = -m.transpose(2, 3, 1, 0)
    return CurvatureTensor(S)


def fibre_operator_bound(data: DoubleFibrationData) -> float:
    """Smallest eigenvalue of the vertical curvature operator."""
    if data.composite.p < 2:
        return np.inf
    return spectrum_of(data.composite.R_V).min


def quadratic_form_bound(data: DoubleFibrationData, D, eps: float):
    """Both sides of the complete-the-square estimate for ``<D, S D>``.

    ``D`` is an antisymmetric ``n x n`` array of 2-form coefficients; sums run
    over all index values. Returns ``(lhs, rhs)`` with ``lhs = D S D`` and
    ``rhs = -4 c^-2 |D^{I a} (nabla_J T_{I a K} - nabla_K T_{I a J})|^2``,
    which bounds ``lhs`` from below whenever the fibre curvature operator is
    at least ``c^2``.
    """
    _check_eps(eps)
    if not data.c > 0:
        raise InvalidTensorError(f"vertical curvature bound c must be positive, got {data.c}")
    D = np.asarray(D, dtype=float)
    n = data.n
    if D.shape != (n, n):
        raise ShapeError(f"D must be {n} x {n}, got {D.shape}")
    if np.max(np.abs(D + D.T), initial=0.0) > 1e-12 * max(1.0, np.max(np.abs(D), initial=0.0)):
        raise InvalidTensorError("D must be antisymmetric")
    S = divergent_tensor(data, eps).R
    lhs = float(np.einsum("ab,abcd,cd->", D, S, D))
    p = data.composite.p
    V, H = slice(0, p), slice(p, n)
    # same entries as S at eps = 1, without the curvature block
    S1 = divergent_tensor(data, 1.0).R[V, H, V, V]
    X = np.einsum("ia,iajk->jk", D[V, H], S1)
    rhs = -4.0 / data.c**2 * float(np.sum(X * X))
    return lhs, rhs
