"""Compact Lie algebras, reductive splits and homogeneous O'Neill data.

Structure constants are stored as ``c[k, i, j] = c^k_{ij}`` so that
``[e_i, e_j] = c^k_{ij} e_k``.
"""

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .errors import LieAlgebraError
from .lambda2 import CurvatureTensor
from .submersion import SubmersionPointData

LIE_TOL = 1e-10


@dataclass(frozen=True)
class LieAlgebraData:
    c: np.ndarray
    ip: np.ndarray = None
    name: str = ""

    def __post_init__(self):
        c = np.array(self.c, dtype=float)
        if c.ndim != 3 or len(set(c.shape)) != 1:
            raise LieAlgebraError(f"structure constants must be dim x dim x dim, got {c.shape}")
        n = c.shape[0]
        ip = np.eye(n) if self.ip is None else np.array(self.ip, dtype=float)
        if ip.shape != (n, n):
            raise LieAlgebraError(f"inner product has shape {ip.shape}, expected {(n, n)}")
        if n and np.max(np.abs(ip - ip.T)) > 1e-12:
            raise LieAlgebraError("inner product matrix is not symmetric")
        if n and np.min(np.linalg.eigvalsh(ip)) <= 0:
            raise LieAlgebraError("inner product matrix is not positive definite")
        c.setflags(write=False)
        ip.setflags(write=False)
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "ip", ip)

    @property
    def dim(self) -> int:
        return self.c.shape[0]

    def bracket(self, x, y):
        return np.einsum("kij,i,j->k", self.c, x, y)

    def antisymmetry_residual(self) -> float:
        return float(np.max(np.abs(self.c + self.c.transpose(0, 2, 1)), initial=0.0))

    def jacobi_residual(self) -> float:
        # [e_i,[e_j,e_k]] + cyclic, component m
        c = self.c
        t = np.einsum("mil,ljk->mijk", c, c)
        res = t + t.transpose(0, 2, 3, 1) + t.transpose(0, 3, 1, 2)
        return float(np.max(np.abs(res), initial=0.0))

    def biinvariance_residual(self) -> float:
        # <[x, y], z> + <y, [x, z]> over basis triples
        cl = np.einsum("kij,kl->ijl", self.c, self.ip)  # <[e_i, e_j], e_l>
        return float(np.max(np.abs(cl + cl.transpose(0, 2, 1)), initial=0.0))

    def check(self, tol=LIE_TOL, require_biinvariant=False):
        r = self.antisymmetry_residual()
        if r > tol:
            raise LieAlgebraError(f"structure constants not antisymmetric: residual {r:.3e}")
        r = self.jacobi_residual()
        if r > tol:
            raise LieAlgebraError(f"Jacobi identity fails: Jacobi residual {r:.3e}")
        if require_biinvariant:
            r = self.biinvariance_residual()
            if r > tol:
                raise LieAlgebraError(f"inner product is not bi-invariant: residual {r:.3e}")
        return self

    @property
    def is_biinvariant(self) -> bool:
        return self.biinvariance_residual() <= LIE_TOL

    def in_basis(self, B) -> "LieAlgebraData":
        """Structure constants in the basis given by the rows of ``B``."""
        B = np.asarray(B, dtype=float)
        if B.shape != (self.dim, self.dim):
            raise LieAlgebraError(f"change of basis must be {self.dim} x {self.dim}")
        Binv = np.linalg.inv(B)
        c = np.einsum("ia,jb,dab,dk->kij", B, B, self.c, Binv)
        return LieAlgebraData(c, B @ self.ip @ B.T, self.name)

    def orthonormalized(self) -> "LieAlgebraData":
        if np.allclose(self.ip, np.eye(self.dim), atol=1e-14, rtol=0):
            return self
        L = np.linalg.cholesky(self.ip)
        return self.in_basis(np.linalg.inv(L))


def _from_matrices(mats, name):
    """Orthonormal basis of anti-Hermitian matrices with <X, Y> = -Re tr(XY)."""
    n = len(mats)
    c = np.zeros((n, n, n))
    for i, j in combinations(range(n), 2):
        br = mats[i] @ mats[j] - mats[j] @ mats[i]
        for k in range(n):
            c[k, i, j] = -np.trace(br @ mats[k]).real
            c[k, j, i] = -c[k, i, j]
    return LieAlgebraData(c, name=name)


def _su3_basis():
    s2, s3 = np.sqrt(2.0), np.sqrt(3.0)
    lam = np.zeros((8, 3, 3), dtype=complex)
    lam[0][0, 1] = lam[0][1, 0] = 1
    lam[1][0, 1], lam[1][1, 0] = -1j, 1j
    lam[2][0, 0], lam[2][1, 1] = 1, -1
    lam[3][0, 2] = lam[3][2, 0] = 1
    lam[4][0, 2], lam[4][2, 0] = -1j, 1j
    lam[5][1, 2] = lam[5][2, 1] = 1
    lam[6][1, 2], lam[6][2, 1] = -1j, 1j
    lam[7] = np.diag([1, 1, -2]) / s3
    # tr(lam_a lam_b) = 2 delta_ab, so i lam / sqrt 2 is orthonormal for -tr(XY)
    return [1j * m / s2 for m in lam]


SU3_CIRCLE = np.eye(8)[7]  # i diag(1, 1, -2) / sqrt 6


def su2():
    c = np.zeros((3, 3, 3))
    for i, j, k in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
        c[k, i, j], c[k, j, i] = 1.0, -1.0
    return LieAlgebraData(c, name="su2")


def su3():
    return _from_matrices(_su3_basis(), "su3")


def so_n(n):
    if n < 2:
        raise LieAlgebraError(f"so(n) needs n >= 2, got {n}")
    mats = []
    for a, b in combinations(range(n), 2):
        m = np.zeros((n, n))
        m[a, b], m[b, a] = 1.0, -1.0
        mats.append(m / np.sqrt(2.0))  # -tr(XY) orthonormal; equals -1/2 tr on E_ab - E_ba
    return _from_matrices(mats, f"so{n}")


def torus(k):
    if k < 0:
        raise LieAlgebraError(f"torus rank must be >= 0, got {k}")
    return LieAlgebraData(np.zeros((k, k, k)), name=f"torus{k}")


def product(*algebras):
    n = sum(a.dim for a in algebras)
    c = np.zeros((n, n, n))
    ip = np.zeros((n, n))
    off = 0
    for a in algebras:
        s = slice(off, off + a.dim)
        c[s, s, s] = a.c
        ip[s, s] = a.ip
        off += a.dim
    return LieAlgebraData(c, ip, "+".join(a.name for a in algebras))


def scaled(algebra, s):
    """Same algebra, metric multiplied by ``s**2``, re-expressed orthonormally."""
    if not s > 0:
        raise LieAlgebraError(f"scale must be positive, got {s}")
    a = algebra.orthonormalized()
    return LieAlgebraData(a.c / s, name=f"{a.name}*{s:g}")


_CONSTRUCTORS = {"su2": (su2, 0), "su3": (su3, 0), "so_n": (so_n, 1), "torus": (torus, 1),
                 "product": (product, None), "scaled": (scaled, 2)}


def make_algebra(name, *args) -> LieAlgebraData:
    """Build a named algebra: ``su2``, ``su3``, ``so_n(n)``, ``torus(k)``,
    ``product(*algebras)`` or ``scaled(algebra, s)``."""
    if name not in _CONSTRUCTORS:
        raise LieAlgebraError(f"unknown algebra {name!r}; choose from {sorted(_CONSTRUCTORS)}")
    fn, arity = _CONSTRUCTORS[name]
    if arity is not None and len(args) != arity:
        raise LieAlgebraError(f"{name} takes {arity} argument(s), got {len(args)}")
    if name == "product" and not args:
        raise LieAlgebraError("product needs at least one algebra")
    return fn(*args)


def biinvariant_curvature(g: LieAlgebraData) -> CurvatureTensor:
    """``R(X, Y, Z, W) = 1/4 <[X, Y], [Z, W]>`` in an orthonormal basis."""
    g.check(require_biinvariant=True)
    g = g.orthonormalized()
    return CurvatureTensor(0.25 * np.einsum("mij,mkl->ijkl", g.c, g.c))


def _orthonormal_rows(v, tol=1e-12):
    v = np.atleast_2d(np.asarray(v, dtype=float))
    if v.size == 0:
        return np.zeros((0, v.shape[-1] if v.ndim == 2 else 0))
    u, s, vt = np.linalg.svd(v, full_matrices=False)
    rank = int(np.sum(s > tol * max(1.0, s[0])))
    if rank < v.shape[0]:
        raise LieAlgebraError("subalgebra spanning vectors are linearly dependent")
    q, r = np.linalg.qr(v.T)
    # fix signs so the first nonzero coefficient along each input is positive
    q = q * np.sign(np.where(np.diag(r) == 0, 1.0, np.diag(r)))
    return q.T


@dataclass(frozen=True)
class ReductiveSplit:
    """``g = k + m`` with orthonormal bases stored as rows (algebra coordinates)."""

    algebra: LieAlgebraData
    k_basis: np.ndarray
    m_basis: np.ndarray

    @classmethod
    def from_subalgebra(cls, algebra, k_vectors):
        algebra = algebra.orthonormalized()
        n = algebra.dim
        k = _orthonormal_rows(k_vectors) if len(k_vectors) else np.zeros((0, n))
        if k.shape[1] != n:
            raise LieAlgebraError(f"subalgebra vectors must have length {n}")
        # complement: orthonormal basis of the null space, made deterministic via QR
        proj = np.eye(n) - k.T @ k
        u, s, _ = np.linalg.svd(proj)
        m = u[:, : n - k.shape[0]].T
        if m.size:
            q, r = np.linalg.qr(m.T)
            m = (q * np.sign(np.where(np.diag(r) == 0, 1.0, np.diag(r)))).T
        split = cls(algebra, k, m)
        split.check()
        return split

    @property
    def p(self) -> int:
        return self.k_basis.shape[0]

    @property
    def b(self) -> int:
        return self.m_basis.shape[0]

    def adapted(self) -> LieAlgebraData:
        """The algebra in the basis (k..., m...)."""
        return self.algebra.in_basis(np.vstack([self.k_basis, self.m_basis]))

    def residuals(self) -> dict:
        c = self.adapted().c
        p = self.p
        K, M = slice(0, p), slice(p, None)
        out = {
            "orthonormality": float(np.max(np.abs(np.vstack([self.k_basis, self.m_basis])
                                                  @ np.vstack([self.k_basis, self.m_basis]).T
                                                  - np.eye(self.algebra.dim)), initial=0.0)),
            "[k,k] in k": float(np.max(np.abs(c[M, K, K]), initial=0.0)),
            "[k,m] in m": float(np.max(np.abs(c[K, K, M]), initial=0.0)),
            "[m,m] in k": float(np.max(np.abs(c[M, M, M]), initial=0.0)),
        }
        return out

    def check(self, tol=LIE_TOL):
        self.algebra.check(tol)
        res = self.residuals()
        for key in ("orthonormality", "[k,k] in k", "[k,m] in m"):
            if res[key] > tol:
                raise LieAlgebraError(f"invalid reductive split: {key} residual {res[key]:.3e}")
        return self

    @property
    def is_symmetric(self) -> bool:
        return self.residuals()["[m,m] in k"] <= LIE_TOL


def symmetric_space_curvature(split: ReductiveSplit) -> CurvatureTensor:
    """Curvature on ``m`` from ``R(X, Y) Z = [Z, [X, Y]]``."""
    split.check()
    c = split.adapted().c
    p = split.p
    K, M = slice(0, p), slice(p, None)
    bad = np.abs(c[M, M, M])
    if bad.size and np.max(bad) > LIE_TOL:
        i, j = np.unravel_index(np.argmax(np.max(bad, axis=0)), bad.shape[1:])
        raise LieAlgebraError(
            f"not a symmetric pair: [m_{i}, m_{j}] has m-component {np.max(bad[:, i, j]):.3e}")
    # R_IJKL = <R(e_K, e_L) e_J, e_I> = <[e_J, [e_K, e_L]], e_I>, bracket [e_K, e_L] in k
    inner = c[K, M, M]  # [e_K, e_L] = inner[q, K, L] k_q
    mixed = c[M, M, K]  # [e_J, k_q] = mixed[I, J, q] m_I
    return CurvatureTensor(np.einsum("qkl,ijq->ijkl", inner, mixed))


def quotient_submersion_data(split: ReductiveSplit) -> SubmersionPointData:
    """O'Neill data of ``G -> G/K`` at the identity coset, bi-invariant metric.

    Frames are left-invariant: the first ``p`` from ``k`` and the rest from
    ``m``. Fibres are totally geodesic, ``A^i_{ab} = <nabla_{e_b} e_a, e_i>
    = 1/2 c^i_{ba}``, and ``nabla A`` is the projected-connection derivative
    of these constant components (only connection terms survive). ``R_B`` is
    left unset.
    """
    split.check()
    split.algebra.check(require_biinvariant=True)
    p, b = split.p, split.b
    c = split.adapted().c
    K, M = slice(0, p), slice(p, None)
    ckk = c[K, K, K]
    R_V = CurvatureTensor(0.25 * np.einsum("mij,mkl->ijkl", ckk, ckk))
    A = 0.5 * np.transpose(c[K, M, M], (0, 2, 1))
    # connection coefficients w^I_{JK} = <nabla_{e_K} e_J, e_I>
    w_vv = 0.5 * np.transpose(c[K, K, K], (0, 2, 1))  # w^i_{jk} = 1/2 c^i_{kj}
    w_hv = np.transpose(c[M, K, M], (0, 2, 1))  # w^a_{b k} = c^a_{k b}, from H[e_k, e_b]
    w_hh = 0.5 * np.transpose(c[M, M, M], (0, 2, 1))  # w^a_{b c} = 1/2 c^a_{c b}
    # nabla_K A^i_{ab} = w^i_{lK} A^l_{ab} - w^d_{aK} A^i_{db} - w^d_{bK} A^i_{ad}
    DA_vert = (np.einsum("ilj,lab->jiab", w_vv, A)
               - np.einsum("daj,idb->jiab", w_hv, A) - np.einsum("dbj,iad->jiab", w_hv, A))
    DA_horiz = (- np.einsum("dac,idb->ciab", w_hh, A) - np.einsum("dbc,iad->ciab", w_hh, A))
    return SubmersionPointData(p=p, b=b, R_V=R_V, A=A, DA_vert=DA_vert, DA_horiz=DA_horiz,
                               omega_vv=w_vv, omega_vh=np.zeros((p, p, b)))
