"""Curvature tensors and curvature operators on the exterior square.

Conventions (fixed once, used by every module):

* ``R[I, J, K, L] = <R(e_K, e_L) e_J, e_I>`` in an orthonormal frame, with
  ``R(X, Y) = [nabla_X, nabla_Y] - nabla_[X,Y]``. The unit round sphere has
  ``R[I, J, I, J] = +1``.
* The curvature operator acts on the unit-norm basis ``e_I ^ e_J`` (I < J)
  by ``M[(IJ), (KL)] = R[I, J, K, L]``, so ``<Riem(u ^ v), u ^ v> = K(u, v)``
  and the unit sphere gives the identity.
"""

from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .errors import InvalidTensorError, NotSymmetricError, ShapeError, default_tol
from .jacobi import jacobi_eigenvalues


@dataclass(frozen=True)
class Lambda2Basis:
    n: int
    pairs: tuple = field(init=False)

    def __post_init__(self):
        if self.n < 1:
            raise ShapeError(f"tangent dimension must be >= 1, got {self.n}")
        object.__setattr__(self, "pairs", tuple(combinations(range(self.n), 2)))

    @property
    def dim(self) -> int:
        return len(self.pairs)

    def index(self, i: int, j: int) -> int:
        """Position of ``e_i ^ e_j`` (i < j) in the lexicographic list."""
        if not 0 <= i < j < self.n:
            raise ShapeError(f"invalid wedge pair ({i}, {j}) for n={self.n}")
        # pairs (a, b) with a < i come first
        return i * self.n - i * (i + 1) // 2 + (j - i - 1)


def _frozen(a):
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class CurvatureTensor:
    """Dense orthonormal-frame components ``R[I, J, K, L]``."""

    R: np.ndarray

    def __post_init__(self):
        r = _frozen(self.R)
        if r.ndim != 4 or len(set(r.shape)) != 1:
            raise ShapeError(f"curvature tensor must be n x n x n x n, got {r.shape}")
        object.__setattr__(self, "R", r)

    @property
    def n(self) -> int:
        return self.R.shape[0]

    @classmethod
    def zeros(cls, n):
        return cls(np.zeros((n, n, n, n)))

    @classmethod
    def constant_curvature(cls, n, kappa=1.0):
        d = np.eye(n)
        r = kappa * (np.einsum("ik,jl->ijkl", d, d) - np.einsum("il,jk->ijkl", d, d))
        return cls(r)

    def __add__(self, other):
        return CurvatureTensor(self.R + other.R)

    def scaled(self, factor):
        return CurvatureTensor(factor * self.R)

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.R))) if self.R.size else 0.0


@dataclass(frozen=True)
class CurvatureOperator:
    basis: Lambda2Basis
    M: np.ndarray

    def __post_init__(self):
        m = _frozen(self.M)
        if m.shape != (self.basis.dim, self.basis.dim):
            raise ShapeError(f"operator shape {m.shape} does not match basis dimension {self.basis.dim}")
        scale = max(1.0, float(np.max(np.abs(m)))) if m.size else 1.0
        if m.size and float(np.max(np.abs(m - m.T))) > 1e-12 * scale:
            raise NotSymmetricError("curvature operator matrix is not symmetric")
        object.__setattr__(self, "M", m)


@dataclass(frozen=True)
class Spectrum:
    eigenvalues: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "eigenvalues", _frozen(np.sort(self.eigenvalues)))

    @property
    def min(self) -> float:
        return float(self.eigenvalues[0]) if self.eigenvalues.size else 0.0

    @property
    def max(self) -> float:
        return float(self.eigenvalues[-1]) if self.eigenvalues.size else 0.0

    def __len__(self):
        return self.eigenvalues.size


@dataclass
class SymmetryReport:
    """Max residuals of the curvature identities, each judged against ``tol``."""

    tol: float
    residuals: dict
    scale: float = 1.0

    @property
    def passed(self) -> dict:
        return {k: v <= self.tol for k, v in self.residuals.items()}

    @property
    def ok(self) -> bool:
        return all(self.passed.values())

    def failures(self):
        return [k for k, ok in self.passed.items() if not ok]

    def __str__(self):
        lines = []
        for name, res in self.residuals.items():
            mark = "pass" if res <= self.tol else "FAIL"
            lines.append(f"{name}: {res:.3e} ({mark}, tol {self.tol:.1e})")
        return "\n".join(lines)


def symmetry_residuals(R: np.ndarray) -> dict:
    """Absolute max residuals of each curvature identity."""
    r = np.asarray(R, dtype=float)
    if r.size == 0:
        return {"antisymmetry_first_pair": 0.0, "antisymmetry_second_pair": 0.0,
                "pair_symmetry": 0.0, "first_bianchi": 0.0}
    bianchi = r + np.transpose(r, (0, 2, 3, 1)) + np.transpose(r, (0, 3, 1, 2))
    return {
        "antisymmetry_first_pair": float(np.max(np.abs(r + np.transpose(r, (1, 0, 2, 3))))),
        "antisymmetry_second_pair": float(np.max(np.abs(r + np.transpose(r, (0, 1, 3, 2))))),
        "pair_symmetry": float(np.max(np.abs(r - np.transpose(r, (2, 3, 0, 1))))),
        "first_bianchi": float(np.max(np.abs(bianchi))),
    }


def validate_tensor(R, tol=None, relative=False) -> SymmetryReport:
    """Check antisymmetry, pair symmetry and first Bianchi.

    With ``relative=True`` residuals are divided by ``max(1, max|R|)``, which
    is the policy for epsilon-scaled tensors whose entries reach 1e8.
    """
    tol = default_tol() if tol is None else tol
    r = R.R if isinstance(R, CurvatureTensor) else np.asarray(R, dtype=float)
    res = symmetry_residuals(r)
    scale = 1.0
    if relative and r.size:
        scale = max(1.0, float(np.max(np.abs(r))))
        res = {k: v / scale for k, v in res.items()}
    return SymmetryReport(tol=tol, residuals=res, scale=scale)


def require_valid(R, tol=None, relative=True, identities=None):
    report = validate_tensor(R, tol=tol, relative=relative)
    failing = [k for k in report.failures() if identities is None or k in identities]
    if failing:
        detail = ", ".join(f"{k} residual {report.residuals[k]:.3e}" for k in failing)
        raise InvalidTensorError(f"curvature tensor violates {detail} (tol {report.tol:.1e})")
    return report


def tensor_to_operator(R: CurvatureTensor, tol=None) -> CurvatureOperator:
    """Curvature operator on the unit-norm wedge basis.

    Only the antisymmetries and pair symmetry are preconditions; the Bianchi
    identity is a separate diagnostic.
    """
    require_valid(R, tol=tol, identities=("antisymmetry_first_pair", "antisymmetry_second_pair",
                                          "pair_symmetry"))
    basis = Lambda2Basis(R.n)
    if basis.dim == 0:
        return CurvatureOperator(basis, np.zeros((0, 0)))
    ii, jj = np.array(basis.pairs).T
    m = R.R[ii[:, None], jj[:, None], ii[None, :], jj[None, :]]
    return CurvatureOperator(basis, 0.5 * (m + m.T))


def operator_spectrum(op: CurvatureOperator) -> Spectrum:
    return Spectrum(jacobi_eigenvalues(op.M))


def spectrum_of(R: CurvatureTensor) -> Spectrum:
    return operator_spectrum(tensor_to_operator(R))


def sectional_curvature(R: CurvatureTensor, u, v, tol=1e-10) -> float:
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    if u.shape != (R.n,) or v.shape != (R.n,):
        raise ShapeError(f"vectors must have length {R.n}")
    gram = np.array([[u @ u, u @ v], [v @ u, v @ v]])
    resid = float(np.max(np.abs(gram - np.eye(2))))
    if resid > tol:
        raise InvalidTensorError(f"(u, v) is not orthonormal: Gram residual {resid:.3e}")
    return float(np.einsum("ijkl,i,j,k,l->", R.R, u, v, u, v))


def sectional_range(R: CurvatureTensor):
    """Estimated min and max sectional curvature.

    Frame planes plus a fixed-seed sample of random planes; the result is an
    inner estimate of the true range, reproducible run to run.
    """
    n = R.n
    if n < 2:
        return 0.0, 0.0
    vals = [R.R[i, j, i, j] for i in range(n) for j in range(i + 1, n)]
    lo, hi = min(vals), max(vals)
    # Sectional curvature is a quadratic form on decomposable 2-vectors; the
    # extremes of the frame values are only bounds from one side, so sample.
    rng = np.random.default_rng(0)
    for _ in range(64 * n):
        q, _ = np.linalg.qr(rng.standard_normal((n, 2)))
        k = float(np.einsum("ijkl,i,j,k,l->", R.R, q[:, 0], q[:, 1], q[:, 0], q[:, 1]))
        lo, hi = min(lo, k), max(hi, k)
    return float(lo), float(hi)


def scale_metric(R: CurvatureTensor, c: float) -> CurvatureTensor:
    """Orthonormal-frame curvature of the metric ``c**2 * g``."""
    if not c > 0:
        raise InvalidTensorError(f"metric scale must be positive, got {c}")
    return CurvatureTensor(R.R / (c * c))


def block_diagonal(*tensors: CurvatureTensor) -> CurvatureTensor:
    """Curvature of a Riemannian product, factors in the given order."""
    n = sum(t.n for t in tensors)
    out = np.zeros((n, n, n, n))
    off = 0
    for t in tensors:
        s = slice(off, off + t.n)
        out[s, s, s, s] = t.R
        off += t.n
    return CurvatureTensor(out)
