"""Curvature of a warped Riemannian submersion from pointwise O'Neill data.

The total space carries ``e^{2f} g^V + e^{-2h} s^* g_B`` with ``f, h`` pulled
back from the base. Every tensor below is expressed in an orthonormal frame
of the *unwarped* metric; the assembled curvature tensor is expressed in the
rescaled frame ``(e^{-f} e_i, e^{h} e_alpha)``.

Index layout of every dense total-space tensor: the ``p`` vertical indices
come first, then the ``b`` horizontal ones.

Canonical storage (all other index placements follow from the symmetries):

=============  ============================  ======================
array          meaning                       shape
=============  ============================  ======================
``A``          ``A^i_{ab}``                  ``(p, b, b)``
``T``          ``T^i_{a j}``                 ``(p, b, p)``
``DT_vert``    ``nabla_j T^i_{a k}``         ``(p, p, b, p)``
``DT_horiz``   ``nabla_b T^i_{a j}``         ``(b, p, b, p)``
``DA_vert``    ``nabla_j A^i_{a b}``         ``(p, p, b, b)``
``DA_horiz``   ``nabla_c A^i_{a b}``         ``(b, p, b, b)``
=============  ============================  ======================

with ``A^a_{b i} = A^a_{i b} = -A^i_{ab}`` and ``T^a_{ij} = -T^i_{aj}``.
"""

from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from .errors import InvalidTensorError, ShapeError
from .lambda2 import CurvatureTensor

SYMMETRY_TOL = 1e-12


def _arr(x, shape, name):
    if x is None:
        return np.zeros(shape)
    a = np.array(x, dtype=float)
    if a.shape != shape:
        raise ShapeError(f"{name} has shape {a.shape}, expected {shape}")
    a.setflags(write=False)
    return a


def _as_tensor(x, n, name):
    if x is None:
        return None
    t = x if isinstance(x, CurvatureTensor) else CurvatureTensor(np.asarray(x, dtype=float).reshape((n,) * 4))
    if t.n != n:
        raise ShapeError(f"{name} has dimension {t.n}, expected {n}")
    return t


@dataclass(frozen=True)
class SubmersionPointData:
    p: int
    b: int
    R_V: Optional[CurvatureTensor] = None
    R_B: Optional[CurvatureTensor] = None
    A: np.ndarray = None
    T: np.ndarray = None
    DT_vert: np.ndarray = None
    DT_horiz: np.ndarray = None
    DA_vert: np.ndarray = None
    DA_horiz: np.ndarray = None
    omega_vv: np.ndarray = None  # omega^i_{jk}
    omega_vh: np.ndarray = None  # omega^i_{j alpha}

    def __post_init__(self):
        p, b = self.p, self.b
        if p < 0 or b < 0:
            raise ShapeError("block dimensions must be non-negative")
        put = lambda k, v: object.__setattr__(self, k, v)  # noqa: E731
        put("R_V", _as_tensor(self.R_V, p, "R_V") if self.R_V is not None else CurvatureTensor.zeros(p))
        put("R_B", _as_tensor(self.R_B, b, "R_B"))
        put("A", _arr(self.A, (p, b, b), "A"))
        put("T", _arr(self.T, (p, b, p), "T"))
        put("DT_vert", _arr(self.DT_vert, (p, p, b, p), "DT_vert"))
        put("DT_horiz", _arr(self.DT_horiz, (b, p, b, p), "DT_horiz"))
        put("DA_vert", _arr(self.DA_vert, (p, p, b, b), "DA_vert"))
        put("DA_horiz", _arr(self.DA_horiz, (b, p, b, b), "DA_horiz"))
        put("omega_vv", _arr(self.omega_vv, (p, p, p), "omega_vv"))
        put("omega_vh", _arr(self.omega_vh, (p, p, b), "omega_vh"))

    @property
    def n(self) -> int:
        return self.p + self.b

    @property
    def DA_vert2(self) -> np.ndarray:
        """``nabla_i A^a_{b j}`` as ``[i, a, b, j]``; equals ``-nabla_i A^j_{ab}``."""
        return -np.transpose(self.DA_vert, (0, 2, 3, 1))

    @property
    def is_totally_geodesic(self) -> bool:
        return not (np.any(self.T) or np.any(self.DT_vert) or np.any(self.DT_horiz))

    def with_base(self, R_B):
        return replace(self, R_B=R_B)

    def symmetry_residuals(self) -> dict:
        res = {
            "A antisymmetric in horizontal pair": np.max(np.abs(self.A + self.A.transpose(0, 2, 1)), initial=0.0),
            "T symmetric in vertical pair": np.max(np.abs(self.T - self.T.transpose(2, 1, 0)), initial=0.0),
            "DT_vert symmetric": np.max(np.abs(self.DT_vert - self.DT_vert.transpose(0, 3, 2, 1)), initial=0.0),
            "DT_horiz symmetric": np.max(np.abs(self.DT_horiz - self.DT_horiz.transpose(0, 3, 2, 1)), initial=0.0),
            "DA_vert antisymmetric": np.max(np.abs(self.DA_vert + self.DA_vert.transpose(0, 1, 3, 2)), initial=0.0),
            "DA_horiz antisymmetric": np.max(np.abs(self.DA_horiz + self.DA_horiz.transpose(0, 1, 3, 2)), initial=0.0),
            "omega_vv antisymmetric": np.max(np.abs(self.omega_vv + self.omega_vv.transpose(1, 0, 2)), initial=0.0),
            "omega_vh antisymmetric": np.max(np.abs(self.omega_vh + self.omega_vh.transpose(1, 0, 2)), initial=0.0),
        }
        return {k: float(v) for k, v in res.items()}

    def check(self, tol=SYMMETRY_TOL):
        scale = max(1.0, max(float(np.max(np.abs(a), initial=0.0)) for a in
                             (self.A, self.T, self.DT_vert, self.DT_horiz, self.DA_vert, self.DA_horiz)))
        bad = {k: v for k, v in self.symmetry_residuals().items() if v > tol * scale}
        if bad:
            detail = ", ".join(f"{k} (residual {v:.3e})" for k, v in bad.items())
            raise InvalidTensorError(f"submersion data violates index symmetries: {detail}")
        return self


@dataclass(frozen=True)
class WarpData:
    """Values of ``f`` and ``h`` and their base derivatives at the point."""

    b: int
    f: float = 0.0
    grad_f: np.ndarray = None
    hess_f: np.ndarray = None
    h: float = 0.0
    grad_h: np.ndarray = None
    hess_h: np.ndarray = None

    def __post_init__(self):
        b = self.b
        object.__setattr__(self, "f", float(self.f))
        object.__setattr__(self, "h", float(self.h))
        for name, shape in (("grad_f", (b,)), ("hess_f", (b, b)), ("grad_h", (b,)), ("hess_h", (b, b))):
            object.__setattr__(self, name, _arr(getattr(self, name), shape, name))
        for name in ("hess_f", "hess_h"):
            m = getattr(self, name)
            if m.size and np.max(np.abs(m - m.T)) > 1e-12 * max(1.0, np.max(np.abs(m))):
                raise InvalidTensorError(f"{name} is not symmetric")

    @classmethod
    def constant(cls, b, f=0.0, h=0.0):
        return cls(b=b, f=f, h=h)

    @property
    def grad_f_sq(self) -> float:
        return float(self.grad_f @ self.grad_f)

    @property
    def grad_h_sq(self) -> float:
        return float(self.grad_h @ self.grad_h)

    @property
    def is_h_zero(self) -> bool:
        return self.h == 0.0 and not np.any(self.grad_h) and not np.any(self.hess_h)

    @property
    def is_f_constant(self) -> bool:
        return not np.any(self.grad_f) and not np.any(self.hess_f)


def _check_shapes(data: SubmersionPointData, warp: WarpData):
    if warp.b != data.b:
        raise ShapeError(f"warp data is for a {warp.b}-dimensional base, submersion base has dimension {data.b}")
    if data.R_B is None:
        raise InvalidTensorError("base curvature R_B is unset; compute it with base_from_total first")
    data.check()


# (sign, axis permutation) for R_JIKL, R_IJLK, R_JILK, R_KLIJ, R_LKIJ, R_KLJI, R_LKJI
_ORBIT = ((-1, (1, 0, 2, 3)), (-1, (0, 1, 3, 2)), (1, (1, 0, 3, 2)), (1, (2, 3, 0, 1)),
          (-1, (3, 2, 0, 1)), (-1, (2, 3, 1, 0)), (1, (3, 2, 1, 0)))


class _Blocks:
    """Writes one generating block of a curvature tensor and its symmetry orbit."""

    def __init__(self, p, b):
        self.p, self.b = p, b
        self.V = slice(0, p)
        self.H = slice(p, p + b)
        n = p + b
        self.R = np.zeros((n, n, n, n))

    def _s(self, pattern):
        return tuple(self.V if c == "v" else self.H for c in pattern)

    def put(self, pattern, block, orbit=True):
        """Store ``block`` at ``pattern`` (e.g. ``"vhvv"``) and, unless the
        pattern is its own orbit, at every index placement related by the
        curvature antisymmetries and pair exchange."""
        R = self.R
        R[self._s(pattern)] = block
        if not orbit:
            return
        seen = {pattern}
        for sign, perm in _ORBIT:
            pat = "".join(pattern[k] for k in perm)
            if pat in seen:
                continue
            seen.add(pat)
            R[self._s(pat)] = sign * np.transpose(block, perm)

    def tensor(self):
        return CurvatureTensor(self.R)


def assemble_full(data: SubmersionPointData, warp: WarpData) -> CurvatureTensor:
    """Curvature of ``e^{2f} g^V + e^{-2h} s^* g_B`` from O'Neill data.

    Only generating blocks are computed from the formulas; the remaining
    placements come from the curvature symmetries. Nothing is symmetrised, so
    inconsistent input data shows up as a Bianchi or pair-symmetry residual.
    """
    _check_shapes(data, warp)
    p, b = data.p, data.b
    A, T = data.A, data.T
    dTv, dTh, dAv, dAh = data.DT_vert, data.DT_horiz, data.DA_vert, data.DA_horiz
    f, h = warp.f, warp.h
    gf, gh, Hf, Hh = warp.grad_f, warp.grad_h, warp.hess_f, warp.hess_h
    gs = gf + gh
    dv, dh = np.eye(p), np.eye(b)
    out = _Blocks(p, b)

    # R^i_{jkl}
    tt = -np.einsum("iak,jal->ijkl", T, T) + np.einsum("ial,jak->ijkl", T, T)
    gt = np.einsum("a,iaj->ij", gf, T)
    fterm = (-np.einsum("ik,jl->ijkl", dv, gt) - np.einsum("jl,ik->ijkl", dv, gt)
             + np.einsum("il,jk->ijkl", dv, gt) + np.einsum("jk,il->ijkl", dv, gt))
    gauss = np.einsum("ik,jl->ijkl", dv, dv) - np.einsum("il,jk->ijkl", dv, dv)
    vvvv = np.exp(-2 * f) * data.R_V.R + np.exp(2 * h) * (tt + fterm - warp.grad_f_sq * gauss)
    out.put("vvvv", vvvv, orbit=False)

    # R^i_{a jk}
    dT = np.einsum("jiak->iajk", dTv) - np.einsum("kiaj->iajk", dTv)
    ta = np.einsum("ibj,kab->iajk", T, A) - np.einsum("ibk,jab->iajk", T, A)
    ga = np.einsum("b,kab->ak", gf, A)
    ta += np.einsum("ij,ak->iajk", dv, ga) - np.einsum("ik,aj->iajk", dv, ga)
    out.put("vhvv", np.exp(-f + h) * dT + np.exp(f + 3 * h) * ta)

    # R^i_{a j b}
    W = Hf + np.outer(gf, gf) + np.outer(gf, gh) + np.outer(gh, gf) - float(gf @ gh) * dh
    vhvh = (-np.einsum("biaj->iajb", dTh) + np.einsum("jiab->iajb", dAv)
            - np.einsum("iak,kbj->iajb", T, T) - np.einsum("ab,ij->iajb", W, dv)
            - np.einsum("iaj,b->iajb", T, gs) - np.einsum("ibj,a->iajb", T, gs)
            # conformal change of the horizontal connection; vanishes when h or T does
            + np.einsum("ab,c,icj->iajb", dh, gh, T))
    aa = np.einsum("icb,jca->iajb", A, A)
    out.put("vhvh", np.exp(2 * h) * vhvh + np.exp(2 * f + 4 * h) * aa)

    # R^a_{b ij}
    hhvv = (-np.einsum("ijab->abij", dAv) + np.einsum("jiab->abij", dAv)
            - np.einsum("kai,kbj->abij", T, T) + np.einsum("kaj,kbi->abij", T, T))
    aa = np.einsum("iac,jcb->abij", A, A) - np.einsum("jac,icb->abij", A, A)
    out.put("hhvv", np.exp(2 * h) * hhvv + np.exp(2 * f + 4 * h) * aa)

    # R^a_{b c i}
    hhhv = (-np.einsum("ciab->abci", dAh)
            - np.einsum("kab,kci->abci", A, T)
            + np.einsum("kbc,kai->abci", A, T)
            - np.einsum("kac,kbi->abci", A, T)
            - 2 * np.einsum("iab,c->abci", A, gs)
            - np.einsum("iac,b->abci", A, gs)
            + np.einsum("ibc,a->abci", A, gs)
            + np.einsum("iaf,f,bc->abci", A, gh, dh)
            - np.einsum("ibf,f,ac->abci", A, gh, dh))
    out.put("hhhv", np.exp(f + 3 * h) * hhhv)

    # R^a_{b c d}
    Q = Hh + np.outer(gh, gh)
    conf = (-np.einsum("ad,bc->abcd", dh, Q) + np.einsum("ac,bd->abcd", dh, Q)
            + np.einsum("bd,ac->abcd", dh, Q) - np.einsum("bc,ad->abcd", dh, Q)
            - warp.grad_h_sq * (np.einsum("ac,bd->abcd", dh, dh) - np.einsum("ad,bc->abcd", dh, dh)))
    out.put("hhhh", np.exp(2 * h) * (data.R_B.R + conf) + np.exp(2 * f + 4 * h) * oneill_horizontal(A), orbit=False)
    return out.tensor()


def oneill_horizontal(A: np.ndarray) -> np.ndarray:
    """``2 A^a_{bi} A^i_{cd} - A^a_{id} A^i_{bc} + A^a_{ic} A^i_{bd}`` as ``[a, b, c, d]``."""
    return (-2 * np.einsum("iab,icd->abcd", A, A)
            + np.einsum("iad,ibc->abcd", A, A)
            - np.einsum("iac,ibd->abcd", A, A))


def assemble_h0(data: SubmersionPointData, warp: WarpData) -> CurvatureTensor:
    """Vertical warp only (``h = 0``); a separate transcription of the
    simplified formulas, kept independent of :func:`assemble_full`."""
    _check_shapes(data, warp)
    if not warp.is_h_zero:
        raise InvalidTensorError("assemble_h0 requires h = 0 with vanishing gradient and Hessian")
    p, b = data.p, data.b
    n = p + b
    V, H = slice(0, p), slice(p, n)
    A, T, f, g = data.A, data.T, warp.f, warp.grad_f
    ef = np.exp(f)
    R = np.zeros((n, n, n, n))

    # all-vertical block
    Tl = -np.transpose(T, (1, 0, 2))  # T^a_{ij} as [a, i, j]
    blk = ef ** -2 * data.R_V.R.copy()
    blk += np.einsum("iak,ajl->ijkl", T, Tl) - np.einsum("ial,ajk->ijkl", T, Tl)
    I = np.eye(p)
    gTl = np.einsum("a,aij->ij", g, Tl)
    gT = np.einsum("a,iaj->ij", g, T)
    blk += (np.einsum("ik,jl->ijkl", I, gTl) - np.einsum("jl,ik->ijkl", I, gT)
            - np.einsum("il,jk->ijkl", I, gTl) + np.einsum("jk,il->ijkl", I, gT))
    blk -= (g @ g) * (np.einsum("ik,jl->ijkl", I, I) - np.einsum("il,jk->ijkl", I, I))
    R[V, V, V, V] = blk

    # one horizontal index; A^b_{a k} = A^k_{a b}
    Aup = np.transpose(A, (2, 1, 0))  # A^b_{a k} as [b, a, k]
    m = ef ** -1 * (np.einsum("jiak->iajk", data.DT_vert) - np.einsum("kiaj->iajk", data.DT_vert))
    m += ef * (np.einsum("ibj,bak->iajk", T, Aup) - np.einsum("ibk,baj->iajk", T, Aup)
               + np.einsum("b,ij,bak->iajk", g, I, Aup) - np.einsum("b,ik,baj->iajk", g, I, Aup))
    R[V, H, V, V] = m
    R[H, V, V, V] = -m.transpose(1, 0, 2, 3)
    R[V, V, V, H] = m.transpose(2, 3, 0, 1)
    R[V, V, H, V] = -m.transpose(2, 3, 1, 0)

    # mixed vertical-horizontal planes
    Ad = -np.transpose(A, (1, 2, 0))  # A^c_{a j} as [c, a, j]
    m = (-np.einsum("biaj->iajb", data.DT_horiz) + np.einsum("jiab->iajb", data.DA_vert)
         - np.einsum("iak,kbj->iajb", T, T)
         - np.einsum("ab,ij->iajb", warp.hess_f + np.outer(g, g), I)
         - np.einsum("iaj,b->iajb", T, g) - np.einsum("ibj,a->iajb", T, g)
         - ef ** 2 * np.einsum("icb,caj->iajb", A, Ad))
    R[V, H, V, H] = m
    R[H, V, V, H] = -m.transpose(1, 0, 2, 3)
    R[V, H, H, V] = -m.transpose(0, 1, 3, 2)
    R[H, V, H, V] = m.transpose(1, 0, 3, 2)

    # A^a_{b j} as [a, b, j]; same array layout as Ad
    Ab = Ad
    dA2 = data.DA_vert2  # nabla_i A^a_{b j} as [i, a, b, j]
    m = (np.einsum("iabj->abij", dA2) - np.einsum("jabi->abij", dA2)
         + np.einsum("aki,kbj->abij", Tl, T) - np.einsum("akj,kbi->abij", Tl, T)
         + ef ** 2 * (np.einsum("aci,cbj->abij", Ab, Ab) - np.einsum("acj,cbi->abij", Ab, Ab)))
    R[H, H, V, V] = m
    R[V, V, H, H] = m.transpose(2, 3, 0, 1)

    # three horizontal indices
    dAh_up = -np.transpose(data.DA_horiz, (0, 2, 3, 1))  # nabla_c A^a_{b i} as [c, a, b, i]
    Akc = -np.transpose(A, (1, 0, 2))  # A^a_{k c} as [a, k, c]
    m = (np.einsum("cabi->abci", dAh_up)
         + np.einsum("abk,kci->abci", Ab, T) - np.einsum("kbc,aki->abci", A, Tl)
         + np.einsum("akc,kbi->abci", Akc, T)
         + 2 * np.einsum("abi,c->abci", Ab, g) + np.einsum("aci,b->abci", Ab, g)
         - np.einsum("bci,a->abci", Ab, g))
    m *= ef
    R[H, H, H, V] = m
    R[H, H, V, H] = -m.transpose(0, 1, 3, 2)
    R[H, V, H, H] = np.einsum("abci->ciab", m)
    R[V, H, H, H] = -np.einsum("abci->icab", m)

    R[H, H, H, H] = data.R_B.R + ef ** 2 * (
        2 * np.einsum("abi,icd->abcd", Ab, A)
        - np.einsum("aid,ibc->abcd", Akc, A)
        + np.einsum("aic,ibd->abcd", Akc, A))
    return CurvatureTensor(R)


def assemble_tg(data: SubmersionPointData, f_const: float) -> CurvatureTensor:
    """Totally geodesic fibres, constant vertical warp ``e^{f}``."""
    if data.R_B is None:
        raise InvalidTensorError("base curvature R_B is unset; compute it with base_from_total first")
    data.check()
    if np.any(data.T) or np.any(data.DT_vert) or np.any(data.DT_horiz):
        raise InvalidTensorError("assemble_tg requires totally geodesic fibres (T = 0 and nabla T = 0)")
    p, b = data.p, data.b
    n = p + b
    V, H = slice(0, p), slice(p, n)
    A = data.A
    e2 = np.exp(2.0 * f_const)
    R = np.zeros((n, n, n, n))
    R[V, V, V, V] = data.R_V.R / e2

    # nabla_j A^i_{ab} - e^{2f} A^i_{cb} A^c_{aj};  A^c_{aj} = -A^j_{ca}
    m = np.einsum("jiab->iajb", data.DA_vert) + e2 * np.einsum("icb,jca->iajb", A, A)
    R[V, H, V, H] = m
    R[H, V, V, H] = -np.einsum("iajb->aijb", m)
    R[V, H, H, V] = -np.einsum("iajb->iabj", m)
    R[H, V, H, V] = np.einsum("iajb->aibj", m)

    # nabla_i A^a_{bj} - nabla_j A^a_{bi} + e^{2f}(A^a_{ci} A^c_{bj} - A^a_{cj} A^c_{bi})
    m = (-np.einsum("ijab->abij", data.DA_vert) + np.einsum("jiab->abij", data.DA_vert)
         + e2 * (np.einsum("iac,jcb->abij", A, A) - np.einsum("jac,icb->abij", A, A)))
    R[H, H, V, V] = m
    R[V, V, H, H] = np.einsum("abij->ijab", m)

    # e^{f} nabla_c A^a_{bi}
    m = -np.sqrt(e2) * np.einsum("ciab->abci", data.DA_horiz)
    R[H, H, H, V] = m
    R[H, H, V, H] = -np.einsum("abci->abic", m)
    R[V, H, H, H] = -np.einsum("abci->icab", m)
    R[H, V, H, H] = np.einsum("abci->ciab", m)

    R[H, H, H, H] = data.R_B.R + e2 * oneill_horizontal(A)
    return CurvatureTensor(R)


def base_from_total(data: SubmersionPointData, R_total: CurvatureTensor) -> CurvatureTensor:
    """Base curvature of a submersion with totally geodesic fibres.

    Inverts the horizontal block ``R_tot = R_B + O'Neill(A)`` at ``f = 0``.
    """
    if np.any(data.T) or np.any(data.DT_vert) or np.any(data.DT_horiz):
        raise InvalidTensorError("base_from_total only supports totally geodesic fibres (T = 0)")
    if R_total.n != data.n:
        raise ShapeError(f"total tensor has dimension {R_total.n}, expected {data.n}")
    H = slice(data.p, data.n)
    return CurvatureTensor(R_total.R[H, H, H, H] - oneill_horizontal(data.A))


def projected_connection_derivative(T, A, eT_vert=None, eT_horiz=None, eA_vert=None, eA_horiz=None,
                                    omega_vv=None, omega_vh=None, omega_hh=None):
    """Covariant derivatives of ``T`` and ``A`` for the projected connection.

    ``eX_*`` are plain frame derivatives ``e_J(X)`` laid out like the output
    arrays; ``omega_vv[i, l, j] = omega^i_{lj}``, ``omega_vh[i, k, b] =
    omega^i_{kb}``, ``omega_hh[c, a, b] = omega^c_{ab}``. The horizontal frame
    is basic, so the projected connection has no ``omega^c_{a j}`` part.

    Returns ``(DT_vert, DT_horiz, DA_vert, DA_horiz)`` in canonical layout.
    """
    T = np.asarray(T, dtype=float)
    A = np.asarray(A, dtype=float)
    p, b = T.shape[0], T.shape[1]
    if T.shape != (p, b, p) or A.shape != (p, b, b):
        raise ShapeError(f"T must be (p, b, p) and A (p, b, b); got {T.shape} and {A.shape}")
    z = lambda *s: np.zeros(s)  # noqa: E731
    eTv = z(p, p, b, p) if eT_vert is None else np.asarray(eT_vert, float)
    eTh = z(b, p, b, p) if eT_horiz is None else np.asarray(eT_horiz, float)
    eAv = z(p, p, b, b) if eA_vert is None else np.asarray(eA_vert, float)
    eAh = z(b, p, b, b) if eA_horiz is None else np.asarray(eA_horiz, float)
    wvv = z(p, p, p) if omega_vv is None else np.asarray(omega_vv, float)
    wvh = z(p, p, b) if omega_vh is None else np.asarray(omega_vh, float)
    whh = z(b, b, b) if omega_hh is None else np.asarray(omega_hh, float)
    for arr, shape, name in ((eTv, (p, p, b, p), "eT_vert"), (eTh, (b, p, b, p), "eT_horiz"),
                             (eAv, (p, p, b, b), "eA_vert"), (eAh, (b, p, b, b), "eA_horiz"),
                             (wvv, (p, p, p), "omega_vv"), (wvh, (p, p, b), "omega_vh"),
                             (whh, (b, b, b), "omega_hh")):
        if arr.shape != shape:
            raise ShapeError(f"{name} has shape {arr.shape}, expected {shape}")

    # nabla_j T^i_{ak} = e_j T^i_{ak} + w^i_{lj} T^l_{ak} - w^l_{kj} T^i_{al}
    DTv = eTv + np.einsum("ilj,lak->jiak", wvv, T) - np.einsum("lkj,ial->jiak", wvv, T)
    # nabla_b T^i_{aj} = e_b T + w^i_{kb} T^k_{aj} - w^c_{ab} T^i_{cj} - w^k_{jb} T^i_{ak}
    DTh = (eTh + np.einsum("ikb,kaj->biaj", wvh, T) - np.einsum("cab,icj->biaj", whh, T)
           - np.einsum("kjb,iak->biaj", wvh, T))
    # nabla_j A^i_{ab} = e_j A^i_{ab} + w^i_{kj} A^k_{ab}
    DAv = eAv + np.einsum("ikj,kab->jiab", wvv, A)
    # nabla_c A^a_{bi} with A^a_{bi} = -A^i_{ab}; convert back at the end
    Aab = -np.transpose(A, (1, 2, 0))
    eAab = -np.transpose(eAh, (0, 2, 3, 1))
    D = (eAab + np.einsum("adc,dbi->cabi", whh, Aab) - np.einsum("dbc,adi->cabi", whh, Aab)
         - np.einsum("jic,abj->cabi", wvh, Aab))
    DAh = -np.transpose(D, (0, 3, 1, 2))
    return DTv, DTh, DAv, DAh
