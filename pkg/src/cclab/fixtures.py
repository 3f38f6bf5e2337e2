"""Fixture documents, bundled fixtures and sweep CSV files.

A fixture is a JSON document ``{"schema_version", "kind", "payload"}``.
Arrays are stored as ``{"shape": [...], "data": [flat row-major values]}``
so shapes stay explicit and files stay hand-editable.
"""

import json
from dataclasses import dataclass
from importlib import resources

import numpy as np

from .errors import FixtureError, FixtureFormatError
from .families import FamilySpec, FunctionData, SweepResult, classify
from .fibration import DoubleFibrationData
from .lambda2 import CurvatureTensor, spectrum_of
from .lie import SU3_CIRCLE, LieAlgebraData, ReductiveSplit, biinvariant_curvature, quotient_submersion_data, \
    scaled, so_n, su2, su3, torus
from .submersion import SubmersionPointData, base_from_total

SCHEMA_VERSION = "1"
DOCUMENT_KINDS = ("lie_algebra", "reductive_split", "submersion_point", "double_fibration", "family_spec")
SUBMERSION_ARRAYS = ("R_V", "R_B", "A", "T", "DT_vert", "DT_horiz", "DA_vert", "DA_horiz", "omega_vv", "omega_vh")


@dataclass(frozen=True)
class FixtureDocument:
    schema_version: str
    kind: str
    payload: dict

    def to_dict(self):
        return {"schema_version": self.schema_version, "kind": self.kind, "payload": self.payload}

    @classmethod
    def from_dict(cls, d):
        if not isinstance(d, dict):
            raise FixtureFormatError("fixture must be a JSON object")
        missing = [k for k in ("schema_version", "kind", "payload") if k not in d]
        if missing:
            raise FixtureFormatError(f"fixture is missing field(s): {', '.join(missing)}")
        if d["schema_version"] != SCHEMA_VERSION:
            raise FixtureFormatError(f"unsupported schema_version {d['schema_version']!r}, expected {SCHEMA_VERSION!r}")
        if d["kind"] not in DOCUMENT_KINDS:
            raise FixtureFormatError(f"unknown fixture kind {d['kind']!r}; choose from {DOCUMENT_KINDS}")
        if not isinstance(d["payload"], dict):
            raise FixtureFormatError("payload must be a JSON object")
        return cls(d["schema_version"], d["kind"], d["payload"])


def document(kind, payload) -> FixtureDocument:
    return FixtureDocument(SCHEMA_VERSION, kind, payload)


# ---- text form ----------------------------------------------------------

def _emit(obj, indent=0):
    pad = " " * indent
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f'{pad}  {json.dumps(k)}: {_emit(v, indent + 2)}' for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, list) and any(isinstance(v, (dict, list)) for v in obj):
        items = [f"{pad}  {_emit(v, indent + 2)}" for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + pad + "]"
    return json.dumps(obj)


def dumps(doc: FixtureDocument) -> str:
    return _emit(doc.to_dict()) + "\n"


def loads(text: str) -> FixtureDocument:
    try:
        d = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FixtureFormatError(f"not valid JSON: {exc}") from None
    return FixtureDocument.from_dict(d)


def read_document(path) -> FixtureDocument:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except (OSError, UnicodeDecodeError) as exc:
        raise FixtureFormatError(f"cannot read {path}: {exc}") from None
    return loads(text)


def write_document(doc: FixtureDocument, path):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(dumps(doc))


# ---- arrays -------------------------------------------------------------

def encode_array(a) -> dict:
    a = np.asarray(a, dtype=float)
    return {"shape": list(a.shape), "data": [float(x) for x in a.ravel()]}


def decode_array(obj, name="array") -> np.ndarray:
    if not isinstance(obj, dict) or "shape" not in obj or "data" not in obj:
        raise FixtureFormatError(f"{name} must be an object with 'shape' and 'data'")
    shape, data = obj["shape"], obj["data"]
    if not isinstance(shape, list) or not all(isinstance(s, int) and s >= 0 for s in shape):
        raise FixtureFormatError(f"{name}: shape must be a list of non-negative integers")
    if not isinstance(data, list) or not all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in data):
        raise FixtureFormatError(f"{name}: data must be a flat list of numbers")
    if len(data) != int(np.prod(shape)):
        raise FixtureError(f"{name}: {len(data)} values do not fill shape {tuple(shape)}")
    return np.array(data, dtype=float).reshape(shape)


def _field(payload, key, kind, types=None):
    if key not in payload:
        raise FixtureFormatError(f"{kind} payload is missing {key!r}")
    v = payload[key]
    if types is not None and (not isinstance(v, types) or isinstance(v, bool) and bool not in types):
        raise FixtureFormatError(f"{kind} payload field {key!r} has the wrong type")
    return v


# ---- documents to domain objects ----------------------------------------

def build(doc: FixtureDocument):
    """Domain object described by ``doc``; validation errors are :class:`FixtureError` subclasses."""
    return _BUILDERS[doc.kind](doc.payload)


def _build_lie(p):
    c = decode_array(_field(p, "c", "lie_algebra"), "c")
    ip = decode_array(p["ip"], "ip") if "ip" in p else None
    return LieAlgebraData(c, ip, str(p.get("name", "")))


def _build_split(p):
    alg = _build_lie(_field(p, "algebra", "reductive_split", dict))
    k = decode_array(_field(p, "k_basis", "reductive_split"), "k_basis")
    return ReductiveSplit.from_subalgebra(alg, k)


def _build_submersion(p):
    dims = [_field(p, key, "submersion_point", int) for key in ("p", "b")]
    arrays = {k: decode_array(p[k], k) for k in SUBMERSION_ARRAYS if k in p}
    return SubmersionPointData(*dims, **arrays)


def _build_double(p):
    k = _field(p, "k", "double_fibration", int)
    z = _field(p, "z", "double_fibration", int)
    c = float(_field(p, "c", "double_fibration", (int, float)))
    comp = _build_submersion(_field(p, "composite", "double_fibration", dict))
    return DoubleFibrationData(k, z, comp, c)


def _build_function(obj, b, name):
    if not isinstance(obj, dict):
        raise FixtureFormatError(f"function {name} must be an object")
    grad = decode_array(obj["grad"], f"{name}.grad") if "grad" in obj else None
    hess = decode_array(obj["hess"], f"{name}.hess") if "hess" in obj else None
    return FunctionData(b, float(obj.get("value", 1.0)), grad, hess)


def homogeneous_bundle(split: ReductiveSplit):
    """Principal bundle ``G -> G/K``: O'Neill data with ``R_B`` and the algebra of ``K``."""
    data = quotient_submersion_data(split)
    R_total = biinvariant_curvature(split.adapted())
    data = data.with_base(base_from_total(data, R_total))
    p = split.p
    k_alg = LieAlgebraData(split.adapted().c[:p, :p, :p], name=f"k({split.algebra.name})")
    return data, k_alg


def quotient_curvature(split: ReductiveSplit) -> CurvatureTensor:
    """Curvature of ``G/K`` with the normal metric."""
    return homogeneous_bundle(split)[0].R_B


def _build_family(p):
    kind = _field(p, "family", "family_spec", str)
    src = _field(p, "source", "family_spec", dict)
    params = dict(p.get("params", {}))
    if "tensor" in src:
        fixture = CurvatureTensor(decode_array(src["tensor"], "source.tensor"))
    else:
        obj = build(FixtureDocument.from_dict(src))
        if kind == "example5_principal":
            if not isinstance(obj, ReductiveSplit):
                raise FixtureError("example5_principal families need a reductive_split source")
            fixture, params["algebra"] = homogeneous_bundle(obj)
        elif kind == "scale_metric" and isinstance(obj, ReductiveSplit):
            fixture = quotient_curvature(obj)
        else:
            fixture = obj
    b = fixture.b if hasattr(fixture, "b") else 0
    fns = {}
    raw = p.get("functions", {})
    if not isinstance(raw, dict):
        raise FixtureFormatError("functions must be an object")
    for key, val in raw.items():
        if key == "steps":
            if not isinstance(val, list):
                raise FixtureFormatError("functions.steps must be a list")
            fns["steps"] = tuple(_build_function(v, b, f"steps[{i}]") for i, v in enumerate(val))
        else:
            fns[key] = _build_function(val, b, key)
    split = p.get("block_split", {})
    if not isinstance(split, dict) or not all(isinstance(v, list) and len(v) == 2 for v in split.values()):
        raise FixtureFormatError("block_split must map block names to [start, stop] pairs")
    return FamilySpec(kind=kind, fixture=fixture, block_split={k: tuple(v) for k, v in split.items()},
                      functions=fns, presale=bool(p.get("presale", False)), params=params,
                      name=str(p.get("name", "")))


_BUILDERS = {"lie_algebra": _build_lie, "reductive_split": _build_split, "submersion_point": _build_submersion,
             "double_fibration": _build_double, "family_spec": _build_family}


# ---- domain objects to payloads -----------------------------------------

def lie_payload(g: LieAlgebraData) -> dict:
    out = {"name": g.name, "c": encode_array(g.c)}
    if not np.array_equal(g.ip, np.eye(g.dim)):
        out["ip"] = encode_array(g.ip)
    return out


def split_payload(g: LieAlgebraData, k_basis) -> dict:
    return {"algebra": lie_payload(g), "k_basis": encode_array(np.atleast_2d(k_basis))}


def submersion_payload(d: SubmersionPointData) -> dict:
    out = {"p": d.p, "b": d.b}
    for k in SUBMERSION_ARRAYS:
        v = getattr(d, k)
        if v is None:
            continue
        a = v.R if isinstance(v, CurvatureTensor) else v
        if k == "R_B" or np.any(a):  # a flat base is still a declared base
            out[k] = encode_array(a)
    return out


def function_payload(f: FunctionData) -> dict:
    return {"value": f.value, "grad": encode_array(f.grad), "hess": encode_array(f.hess)}


# ---- bundled fixtures ---------------------------------------------------

def _family(kind, source, name, **extra):
    payload = {"name": name, "family": kind, "source": source}
    payload.update(extra)
    return document("family_spec", payload)


def _hopf_split():
    return split_payload(scaled(su2(), 0.5), [[0.0, 0.0, 1.0]])


def _su3_su2_split():
    return split_payload(su3(), np.eye(8)[:3])


def _heisenberg_point():
    A = np.zeros((1, 2, 2))
    A[0, 0, 1], A[0, 1, 0] = 1.0, -1.0
    return SubmersionPointData(1, 2, R_B=np.zeros((2, 2, 2, 2)), A=A)


def _symmetric_fibre_point():
    # Heisenberg circle direction times a unit 2-sphere fibre over a flat torus
    A = np.zeros((3, 2, 2))
    A[0, 0, 1], A[0, 1, 0] = 1.0, -1.0
    R_V = np.zeros((3, 3, 3, 3))
    R_V[1:, 1:, 1:, 1:] = CurvatureTensor.constant_curvature(2).R
    return SubmersionPointData(3, 2, R_V=R_V, R_B=np.zeros((2, 2, 2, 2)), A=A)


def _bump(b, seed):
    # value 1, |grad| <= 2, |hess| <= 8: a bump over unit scale
    rng = np.random.default_rng(seed)
    g = rng.uniform(-1, 1, b)
    g *= 1.5 / np.linalg.norm(g)
    h = rng.uniform(-1, 1, (b, b))
    h = h + h.T
    h *= 6.0 / np.max(np.abs(np.linalg.eigvalsh(h)))
    return FunctionData(b, 1.0, np.round(g, 6), np.round(h, 6))


def _flat_torus_point():
    text = resources.files("cclab").joinpath("data/flat_torus_point.json").read_text(encoding="utf-8")
    return loads(text)


def _double(k, z, point: SubmersionPointData, c=1.0):
    return {"k": k, "z": z, "c": c, "composite": submersion_payload(point)}


def _theorem2_doc():
    split = ReductiveSplit.from_subalgebra(su3(), np.eye(8)[:3])
    data, _ = homogeneous_bundle(split)
    # the fibre operator is at least c^2, with c^2 its smallest eigenvalue
    c = float(np.sqrt(spectrum_of(data.R_V).min))
    fns = [_bump(data.b, 1), _bump(data.b, 2)]
    return _family("theorem2", document("double_fibration", _double(0, 3, data, c)).to_dict(),
                   "theorem2", presale=True, functions={"steps": [function_payload(f) for f in fns]})


def _theorem3_doc():
    pt = _flat_torus_point()
    b = pt.payload["b"]
    return _family("theorem3", pt.to_dict(), "theorem3", presale=True,
                   block_split={"0": [0, 1], "1": [1, 2], "2": [2, 4], "3": [4, 5]},
                   functions={"contract": function_payload(_bump(b, 3)), "expand": function_payload(_bump(b, 4))})


BUNDLED = {
    "su2": lambda: document("lie_algebra", lie_payload(su2())),
    "su3": lambda: document("lie_algebra", lie_payload(su3())),
    "so_n": lambda: document("lie_algebra", lie_payload(so_n(4))),
    "torus": lambda: document("lie_algebra", lie_payload(torus(3))),
    "hopf": lambda: _family("example5_principal", document("reductive_split", _hopf_split()).to_dict(), "hopf"),
    "nonabelian_bundle": lambda: _family("example5_principal",
                                         document("reductive_split", _su3_su2_split()).to_dict(),
                                         "nonabelian_bundle"),
    "heisenberg": lambda: _family("theorem1", document("double_fibration",
                                                       _double(1, 0, _heisenberg_point())).to_dict(), "heisenberg"),
    "symmetric_fibre": lambda: _family("theorem1", document("double_fibration",
                                                            _double(1, 2, _symmetric_fibre_point())).to_dict(),
                                       "symmetric_fibre"),
    "example3": lambda: _family("example3_product", {"tensor": encode_array(CurvatureTensor.constant_curvature(2).R)},
                                "example3", params={"l": 1}),
    "theorem2": _theorem2_doc,
    "theorem3": _theorem3_doc,
    "su3_circle_quotient": lambda: _family("scale_metric",
                                           document("reductive_split", split_payload(su3(), [SU3_CIRCLE])).to_dict(),
                                           "su3_circle_quotient"),
}


def bundled_names():
    return sorted(BUNDLED)


def bundled(name) -> FixtureDocument:
    if name not in BUNDLED:
        raise FixtureError(f"unknown fixture {name!r}; available: {', '.join(bundled_names())}")
    return BUNDLED[name]()


# ---- sweep CSV ----------------------------------------------------------

CSV_HEADER = "eps,min_eig,max_eig,min_sec,max_sec"


def _g(x):
    return "%.12g" % x


def format_csv(result: SweepResult) -> str:
    lines = [CSV_HEADER]
    for row in result.rows:
        lines.append(",".join(_g(v) for v in row))
    s = result.summary
    lines.append(f"# classified={s['classified']}")
    lines.append(f"# labels={';'.join(s['labels'])}")
    lines.append(f"# inf_min_eig={_g(s['inf_min_eig'])}")
    # a fitted slope carries fewer digits than the rows it came from
    slope = "none" if s["tail_slope"] is None else f"{s['tail_slope']:.8g}"
    lines.append(f"# tail_slope={slope}")
    for k, v in s["thresholds"].items():
        lines.append(f"# {k}={v if isinstance(v, str) else _g(v)}")
    return "\n".join(lines) + "\n"


def write_csv(result: SweepResult, path):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(format_csv(result))


def parse_csv(text: str) -> SweepResult:
    lines = text.splitlines()
    if not lines or lines[0] != CSV_HEADER:
        raise FixtureFormatError(f"sweep CSV must start with the header {CSV_HEADER!r}")
    rows, notes = [], {}
    for ln in lines[1:]:
        if ln.startswith("#"):
            key, _, val = ln[1:].strip().partition("=")
            notes[key] = val
            continue
        try:
            vals = [float(x) for x in ln.split(",")]
        except ValueError:
            raise FixtureFormatError(f"bad CSV row {ln!r}") from None
        if len(vals) != 5:
            raise FixtureFormatError(f"CSV row needs 5 values, got {len(vals)}")
        rows.append(vals)
    if len(rows) < 2:
        raise FixtureFormatError("sweep CSV needs at least two rows")
    a = np.array(rows)
    summary = classify(a[:, 0], a[:, 1])
    if notes.get("classified", summary["classified"]) != summary["classified"]:
        raise FixtureFormatError("classification footer does not match the rows")
    return SweepResult(eps=a[:, 0], min_eig=a[:, 1], max_eig=a[:, 2], min_sec=a[:, 3], max_sec=a[:, 4],
                       summary=summary)


def read_csv(path) -> SweepResult:
    try:
        with open(path, encoding="utf-8") as fh:
            return parse_csv(fh.read())
    except OSError as exc:
        raise FixtureFormatError(f"cannot read {path}: {exc}") from None
