"""Collapsing families as functions of ``eps`` and their eigenvalue sweeps."""

from dataclasses import dataclass, field, replace

import numpy as np

from .errors import InvalidTensorError, ShapeError
from .fibration import DoubleFibrationData, divergent_tensor, double_fibration_components
from .lambda2 import CurvatureTensor, block_diagonal, scale_metric, sectional_range, spectrum_of
from .lie import LieAlgebraData, biinvariant_curvature
from .submersion import SubmersionPointData, WarpData, assemble_full, assemble_h0, assemble_tg

KINDS = ("theorem1", "theorem2", "theorem3", "example3_product", "example5_principal", "scale_metric")

DEFAULT_GRID = np.logspace(0, -4, 25)
DIVERGE_SLOPE = -0.9
ALMOST_COEFF = 10.0
ALMOST_POWER = 1.5
STRUCTURE_TOL = 1e-12


@dataclass(frozen=True)
class FunctionData:
    """Value, base gradient and base Hessian of an invariant bump function."""

    b: int
    value: float = 1.0
    grad: np.ndarray = None
    hess: np.ndarray = None

    def __post_init__(self):
        if not 0.0 <= self.value <= 1.0:
            raise InvalidTensorError(f"function value must lie in [0, 1], got {self.value}")
        g = np.zeros(self.b) if self.grad is None else np.array(self.grad, dtype=float)
        h = np.zeros((self.b, self.b)) if self.hess is None else np.array(self.hess, dtype=float)
        if g.shape != (self.b,) or h.shape != (self.b, self.b):
            raise ShapeError(f"gradient/Hessian shapes {g.shape}, {h.shape} do not match base dimension {self.b}")
        if h.size and np.max(np.abs(h - h.T)) > 1e-12 * max(1.0, np.max(np.abs(h))):
            raise InvalidTensorError("Hessian must be symmetric")
        object.__setattr__(self, "value", float(self.value))
        object.__setattr__(self, "grad", g)
        object.__setattr__(self, "hess", h)


@dataclass(frozen=True)
class FamilySpec:
    """One collapsing family.

    ``fixture`` depends on ``kind``:

    * ``theorem1``, ``theorem2``: :class:`DoubleFibrationData`;
    * ``theorem3``: :class:`SubmersionPointData` (vertical = blocks 0 and 1,
      horizontal = blocks 2 and 3);
    * ``example3_product``: a :class:`CurvatureTensor` (``params["l"]`` is the
      torus rank);
    * ``example5_principal``: :class:`SubmersionPointData` with ``T = 0`` and
      ``params["algebra"]`` the structure algebra;
    * ``scale_metric``: a :class:`CurvatureTensor` scaled by ``c = eps``.

    ``functions`` holds the per-step bump data for ``theorem2`` and the
    ``contract`` / ``expand`` pair for ``theorem3``.
    """

    kind: str
    fixture: object
    block_split: dict = field(default_factory=dict)
    functions: dict = field(default_factory=dict)
    presale: bool = False
    params: dict = field(default_factory=dict)
    name: str = ""

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InvalidTensorError(f"unknown family kind {self.kind!r}; choose from {KINDS}")
        n = _fixture_dim(self)
        if self.block_split:
            idx = sorted(i for a, b in self.block_split.values() for i in range(a, b))
            if idx != list(range(n)):
                raise InvalidTensorError(f"block split {self.block_split} does not partition {n} dimensions")


def _fixture_dim(spec):
    fx = spec.fixture
    if isinstance(fx, DoubleFibrationData):
        return fx.n
    if isinstance(fx, SubmersionPointData):
        return fx.n
    if isinstance(fx, CurvatureTensor):
        return fx.n + (spec.params.get("l", 0) if spec.kind == "example3_product" else 0)
    raise InvalidTensorError(f"unsupported fixture type {type(fx).__name__} for kind {spec.kind}")


def presale_factor(eps: float) -> float:
    """``L`` with ``L^2 = max(1, log^2(1/eps))``; the invariant metric is multiplied by ``L^2``."""
    return max(1.0, abs(np.log(eps)))


def presale(data: SubmersionPointData, L: float) -> SubmersionPointData:
    """O'Neill data of the metric ``L^2 g`` in its own orthonormal frame."""
    if L == 1.0:
        return data
    L2 = L * L
    return replace(
        data,
        R_V=data.R_V.scaled(1 / L2),
        R_B=None if data.R_B is None else data.R_B.scaled(1 / L2),
        A=data.A / L, T=data.T / L,
        DT_vert=data.DT_vert / L2, DT_horiz=data.DT_horiz / L2,
        DA_vert=data.DA_vert / L2, DA_horiz=data.DA_horiz / L2,
        omega_vv=data.omega_vv / L, omega_vh=data.omega_vh / L,
    )


def _exponent_warp(b, eps, L, fns, factor=1.0):
    """``factor * log(eps) * F`` and its frame derivatives after presale."""
    le = np.log(eps) * factor
    val = sum(f.value for f in fns)
    grad = sum((f.grad for f in fns), np.zeros(b))
    hess = sum((f.hess for f in fns), np.zeros((b, b)))
    return le * val, le * grad / L, le * hess / (L * L)


def _check_eps(eps):
    if not eps > 0:
        raise InvalidTensorError(f"eps must be positive, got {eps}")


def _theorem1_assumptions(data: DoubleFibrationData):
    """Reasons the fixture is outside the reduced-structure-group form."""
    problems = []
    comp = data.composite
    if comp.p >= 2:
        lo = spectrum_of(comp.R_V).min
        if lo < -1e-10:
            problems.append(f"vertical curvature operator is not nonnegative (min eigenvalue {lo:.3e})")
    S = divergent_tensor(data, 1.0).R
    p = comp.p
    mixed = np.max(np.abs(S[:p, p:, :p, :p]), initial=0.0)
    if mixed > STRUCTURE_TOL:
        problems.append(f"mixed divergent components do not vanish (max {mixed:.3e}); "
                        "T must be supported in flat directions with affine frames")
    return problems


def theorem1_family(spec: FamilySpec, eps: float) -> CurvatureTensor:
    """``eps^2 g_1 + eps^2 g_2 + g_3`` on a double fibration."""
    _check_eps(eps)
    if spec.kind != "theorem1" or not isinstance(spec.fixture, DoubleFibrationData):
        raise InvalidTensorError("theorem1_family needs a theorem1 spec with double-fibration data")
    problems = _theorem1_assumptions(spec.fixture)
    if problems:
        raise InvalidTensorError("fixture not in the required form: " + "; ".join(problems))
    data = spec.fixture
    if spec.presale:
        data = replace(data, composite=presale(data.composite, presale_factor(eps)))
    return double_fibration_components(data, eps)


def theorem2_step(spec: FamilySpec, eps: float, prev_c: float, step: int = 0):
    """Curvature after step ``step`` of the inductive contraction.

    Earlier steps act on the same fibration, so their exponents add: the fibre
    metric is ``eps^{2(F_1 + ... + F_step)}`` times the presaled one. Returns
    the tensor and the updated vertical bound ``prev_c * eps^{-F_step}``.
    """
    _check_eps(eps)
    if spec.kind != "theorem2" or not isinstance(spec.fixture, DoubleFibrationData):
        raise InvalidTensorError("theorem2_step needs a theorem2 spec with double-fibration data")
    if not prev_c > 0:
        raise InvalidTensorError(f"previous vertical bound must be positive, got {prev_c}")
    steps = spec.functions.get("steps", ())
    if not 0 <= step < len(steps):
        raise InvalidTensorError(f"step {step} out of range for {len(steps)} function(s)")
    L = presale_factor(eps) if spec.presale else 1.0
    comp = presale(spec.fixture.composite, L)
    b = comp.b
    prior = steps[:step]
    f0, _, _ = _exponent_warp(b, eps, L, prior)
    if comp.p >= 2:
        lo = spectrum_of(comp.R_V).min * np.exp(-2 * f0)
        if lo < prev_c**2 * (1 - 1e-9):
            raise InvalidTensorError(
                f"fibre curvature operator bound violated: min eigenvalue {lo:.6e} < prev_c^2 = {prev_c**2:.6e}")
    f, gf, hf = _exponent_warp(b, eps, L, steps[: step + 1])
    R = assemble_h0(comp, WarpData(b, f=f, grad_f=gf, hess_f=hf))
    new_c = prev_c * eps ** (-steps[step].value)
    return R, new_c


def theorem2_family(spec: FamilySpec, eps: float) -> CurvatureTensor:
    """All steps composed; the bound ``c`` is threaded through."""
    steps = spec.functions.get("steps", ())
    L = presale_factor(eps) if spec.presale else 1.0
    c = spec.fixture.c / L
    R = None
    for i in range(len(steps)):
        R, c = theorem2_step(spec, eps, c, i)
    if R is None:
        comp = presale(spec.fixture.composite, L)
        R = assemble_h0(comp, WarpData(comp.b))
    return R


def theorem2_bound_data(spec: FamilySpec, eps: float, step: int = 0):
    """Presaled double fibration and accumulated contraction after ``step``.

    Feeding the pair to :func:`quadratic_form_bound` gives the divergent
    quadratic form of that step and its lower bound with the presaled
    vertical constant ``c / L``.
    """
    _check_eps(eps)
    steps = spec.functions.get("steps", ())
    if not 0 <= step < len(steps):
        raise InvalidTensorError(f"step {step} out of range for {len(steps)} function(s)")
    L = presale_factor(eps) if spec.presale else 1.0
    fx = spec.fixture
    data = DoubleFibrationData(fx.k, fx.z, presale(fx.composite, L), fx.c / L)
    return data, eps ** sum(f.value for f in steps[: step + 1])


def theorem3_step(spec: FamilySpec, eps: float) -> CurvatureTensor:
    """Contract blocks 0 and 1, keep block 2, expand block 3.

    Uses the full warped formula with ``f = log(eps) F_c`` and ``h = 2 log(eps)
    F_e`` on the horizontal space (blocks 2 and 3); ``h = 0`` when block 3 is
    empty.
    """
    _check_eps(eps)
    if spec.kind != "theorem3" or not isinstance(spec.fixture, SubmersionPointData):
        raise InvalidTensorError("theorem3_step needs a theorem3 spec with submersion data")
    data = spec.fixture
    split = spec.block_split
    for key in ("0", "1", "2", "3"):
        if key not in split:
            raise InvalidTensorError(f"theorem3 block split must declare blocks 0-3, missing {key}")
    p = data.p
    if split["0"][0] != 0 or split["1"][1] != p or split["2"][0] != p or split["3"][1] != data.n:
        raise InvalidTensorError(f"blocks 0, 1 must cover the {p} vertical and 2, 3 the horizontal directions")
    L = presale_factor(eps) if spec.presale else 1.0
    data = presale(data, L)
    b = data.b
    fc = spec.functions.get("contract", FunctionData(b, 0.0))
    fe = spec.functions.get("expand", FunctionData(b, 0.0))
    f, gf, hf = _exponent_warp(b, eps, L, [fc])
    if split["3"][1] > split["3"][0]:
        h, gh, hh = _exponent_warp(b, eps, L, [fe], factor=2.0)
    else:
        h, gh, hh = 0.0, None, None
    return assemble_full(data, WarpData(b, f=f, grad_f=gf, hess_f=hf, h=h, grad_h=gh, hess_h=hh))


def example3_product(M_tensor: CurvatureTensor, l: int, eps: float) -> CurvatureTensor:
    """``M x eps T^l``: the flat factor contributes nothing for any ``eps``."""
    _check_eps(eps)
    if l < 1:
        raise InvalidTensorError(f"torus rank must be >= 1, got {l}")
    return block_diagonal(M_tensor, CurvatureTensor.zeros(l))


def example5_principal(base_tensor: CurvatureTensor, algebra: LieAlgebraData, A, DA_vert, DA_horiz,
                       eps: float) -> CurvatureTensor:
    """Connection metric on a principal bundle with fibres scaled by ``eps``."""
    _check_eps(eps)
    R_V = biinvariant_curvature(algebra)
    p, b = algebra.dim, base_tensor.n
    data = SubmersionPointData(p=p, b=b, R_V=R_V, R_B=base_tensor, A=A, DA_vert=DA_vert, DA_horiz=DA_horiz)
    return assemble_tg(data, np.log(eps))


def evaluate(spec: FamilySpec, eps: float) -> CurvatureTensor:
    _check_eps(eps)
    k = spec.kind
    if k == "theorem1":
        return theorem1_family(spec, eps)
    if k == "theorem2":
        return theorem2_family(spec, eps)
    if k == "theorem3":
        return theorem3_step(spec, eps)
    if k == "example3_product":
        return example3_product(spec.fixture, spec.params.get("l", 1), eps)
    if k == "example5_principal":
        d = spec.fixture
        return example5_principal(d.R_B, spec.params["algebra"], d.A, d.DA_vert, d.DA_horiz, eps)
    return scale_metric(spec.fixture, eps)


@dataclass(frozen=True)
class SweepResult:
    eps: np.ndarray
    min_eig: np.ndarray
    max_eig: np.ndarray
    min_sec: np.ndarray
    max_sec: np.ndarray
    summary: dict

    @property
    def rows(self):
        return list(zip(self.eps, self.min_eig, self.max_eig, self.min_sec, self.max_sec))

    @property
    def classified(self) -> str:
        return self.summary["classified"]

    @property
    def inf_min_eig(self) -> float:
        return self.summary["inf_min_eig"]


def classify(eps, min_eig) -> dict:
    """Label the tail behaviour of the minimum eigenvalue.

    * ``diverges_to_minus_infinity``: negative on the last decade and the
      log-log slope of ``|min_eig|`` against ``eps`` there is at most -0.9;
    * ``almost_nonnegative``: negative somewhere on the last decade and
      ``|min_eig| <= 10 eps^1.5`` throughout it;
    * ``uniformly_bounded_below`` otherwise.

    Almost nonnegative families are also uniformly bounded below; ``labels``
    lists every label that applies and ``bounded_below`` records the coarse
    verdict.
    """
    eps = np.asarray(eps, dtype=float)
    lam = np.asarray(min_eig, dtype=float)
    tail = eps <= eps.min() * 10.0
    if tail.sum() < 2:
        tail = np.zeros_like(tail)
        tail[-2:] = True
    te, tl = eps[tail], lam[tail]
    slope = None
    label = "uniformly_bounded_below"
    if np.all(tl < 0):
        slope = float(np.polyfit(np.log(te), np.log(-tl), 1)[0])
        if slope <= DIVERGE_SLOPE:
            label = "diverges_to_minus_infinity"
    if label != "diverges_to_minus_infinity" and np.any(tl < 0) and np.all(tl >= -ALMOST_COEFF * te**ALMOST_POWER):
        label = "almost_nonnegative"
    labels = {
        "diverges_to_minus_infinity": ["diverges_to_minus_infinity"],
        "almost_nonnegative": ["almost_nonnegative", "uniformly_bounded_below"],
        "uniformly_bounded_below": ["uniformly_bounded_below"],
    }[label]
    return {
        "classified": label,
        "labels": labels,
        "bounded_below": label != "diverges_to_minus_infinity",
        "inf_min_eig": float(lam.min()),
        "tail_slope": slope,
        "thresholds": {"diverge_slope": DIVERGE_SLOPE, "almost_coeff": ALMOST_COEFF,
                       "almost_power": ALMOST_POWER, "tail": "last decade of the grid"},
    }


def sweep(spec: FamilySpec, eps_grid=None) -> SweepResult:
    grid = DEFAULT_GRID if eps_grid is None else np.asarray(eps_grid, dtype=float)
    if grid.ndim != 1 or grid.size < 2:
        raise InvalidTensorError("eps grid needs at least two points")
    if np.any(grid <= 0) or np.any(np.diff(grid) >= 0):
        raise InvalidTensorError("eps grid must be positive and strictly decreasing")
    cols = {"min_eig": [], "max_eig": [], "min_sec": [], "max_sec": []}
    for e in grid:
        R = evaluate(spec, float(e))
        s = spectrum_of(R)
        lo, hi = sectional_range(R)
        cols["min_eig"].append(s.min)
        cols["max_eig"].append(s.max)
        cols["min_sec"].append(lo)
        cols["max_sec"].append(hi)
    arrs = {k: np.array(v) for k, v in cols.items()}
    return SweepResult(eps=grid, summary=classify(grid, arrs["min_eig"]), **arrs)
