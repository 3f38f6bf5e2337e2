"""Command-line front end.

Exit codes: 0 success, 1 domain or invariant failure, 2 I/O or parse failure.
"""

import argparse
import os
import sys

import numpy as np

from .errors import CclabError, FixtureFormatError, default_tol
from .families import FamilySpec, evaluate, sweep
from .fibration import DoubleFibrationData, double_fibration_components
from .fixtures import bundled, bundled_names, build, format_csv, quotient_curvature, read_document, write_document
from .lambda2 import CurvatureTensor, sectional_range, spectrum_of, validate_tensor
from .lie import LieAlgebraData, ReductiveSplit, biinvariant_curvature
from .submersion import SubmersionPointData, WarpData, assemble_full

EXIT_OK, EXIT_DOMAIN, EXIT_IO = 0, 1, 2
VALIDATE_EPS = (1.0, 1e-2)


class GridError(Exception):
    pass


def parse_grid(text):
    """``a:b:log:n``: ``n`` log-spaced points from ``a`` down to ``b``, endpoints included."""
    parts = text.split(":")
    if len(parts) != 4 or parts[2] != "log":
        raise GridError(f"grid must look like a:b:log:n, got {text!r}")
    try:
        a, b, n = float(parts[0]), float(parts[1]), int(parts[3])
    except ValueError:
        raise GridError(f"grid endpoints must be numbers and n an integer, got {text!r}") from None
    if not (a > b > 0) or n < 2:
        raise GridError(f"grid needs a > b > 0 and n >= 2, got {text!r}")
    return np.logspace(np.log10(a), np.log10(b), n)


def curvature_of(obj, eps=1.0) -> CurvatureTensor:
    """The curvature tensor a fixture describes, at ``eps`` where that makes sense."""
    if isinstance(obj, LieAlgebraData):
        return biinvariant_curvature(obj)
    if isinstance(obj, ReductiveSplit):
        R = quotient_curvature(obj)
        return R.scaled(1 / eps**2)
    if isinstance(obj, SubmersionPointData):
        return assemble_full(obj, WarpData(obj.b, f=np.log(eps)))
    if isinstance(obj, DoubleFibrationData):
        return double_fibration_components(obj, eps)
    if isinstance(obj, FamilySpec):
        return evaluate(obj, eps)
    raise CclabError(f"no curvature for {type(obj).__name__}")


def _g(x):
    return "%.12g" % x


def _object_checks(obj, tol):
    """(name, residual) pairs for the structural invariants of ``obj``."""
    if isinstance(obj, LieAlgebraData):
        return [("antisymmetry residual", obj.antisymmetry_residual()),
                ("Jacobi residual", obj.jacobi_residual()),
                ("bi-invariance residual", obj.biinvariance_residual())]
    if isinstance(obj, ReductiveSplit):
        return [(f"{k} residual", v) for k, v in obj.residuals().items() if k != "[m,m] in k"]
    if isinstance(obj, SubmersionPointData):
        return [(f"{k} residual", v) for k, v in obj.symmetry_residuals().items()]
    if isinstance(obj, DoubleFibrationData):
        return _object_checks(obj.composite, tol)
    if isinstance(obj, FamilySpec) and isinstance(obj.fixture, (SubmersionPointData, DoubleFibrationData)):
        return _object_checks(obj.fixture, tol)
    return []


def _load(path):
    return build(read_document(path))


def cmd_validate(args, out):
    tol = default_tol()
    obj = _load(args.path)
    ok = True
    for name, res in _object_checks(obj, tol):
        good = res <= tol
        ok &= good
        print(f"{name}: {res:.3e} {'pass' if good else 'FAIL'}", file=out)
    if ok and not (isinstance(obj, SubmersionPointData) and obj.R_B is None):
        for eps in VALIDATE_EPS:
            report = validate_tensor(curvature_of(obj, eps), tol=tol, relative=True)
            for name, res in report.residuals.items():
                good = res <= tol
                ok &= good
                print(f"eps={_g(eps)} {name} residual: {res:.3e} {'pass' if good else 'FAIL'}", file=out)
    print("valid" if ok else "invalid", file=out)
    return EXIT_OK if ok else EXIT_DOMAIN


def cmd_curvature(args, out):
    obj = _load(args.path)
    R = curvature_of(obj, args.eps)
    spec = spectrum_of(R)
    lo, hi = sectional_range(R)
    bianchi = validate_tensor(R, relative=True).residuals["first_bianchi"]
    if args.spectrum:
        print("spectrum " + " ".join(_g(v) for v in spec.eigenvalues), file=out)
    print(f"min_eig {_g(spec.min)}", file=out)
    print(f"max_eig {_g(spec.max)}", file=out)
    print(f"min_sec {_g(lo)}", file=out)
    print(f"max_sec {_g(hi)}", file=out)
    print(f"bianchi_residual {bianchi:.3e}", file=out)
    return EXIT_OK


def cmd_sweep(args, out):
    grid = parse_grid(args.grid) if args.grid else None
    obj = _load(args.path)
    if not isinstance(obj, FamilySpec):
        raise CclabError("sweep needs a family_spec fixture")
    result = sweep(obj, grid)
    text = format_csv(result)
    if args.out:
        try:
            with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(text)
        except OSError as exc:
            raise FixtureFormatError(f"cannot write {args.out}: {exc}") from None
        print(f"classified {result.classified} inf_min_eig {_g(result.inf_min_eig)}", file=out)
    else:
        out.write(text)
    return EXIT_OK


def cmd_examples(args, out):
    if args.action == "list":
        for name in bundled_names():
            print(name, file=out)
        return EXIT_OK
    if not args.name or not args.dir:
        raise GridError("usage: cclab examples emit NAME DIR")
    doc = bundled(args.name)
    os.makedirs(args.dir, exist_ok=True)
    path = os.path.join(args.dir, f"{args.name}.json")
    try:
        write_document(doc, path)
    except OSError as exc:
        raise FixtureFormatError(f"cannot write {path}: {exc}") from None
    print(path, file=out)
    return EXIT_OK


def build_parser():
    p = argparse.ArgumentParser(prog="cclab", description="Curvature operators of collapsing metric families.")
    sub = p.add_subparsers(dest="command", required=True)
    v = sub.add_parser("validate", help="check a fixture's invariants and the curvature identities")
    v.add_argument("path")
    v.set_defaults(func=cmd_validate)
    c = sub.add_parser("curvature", help="curvature operator spectrum and sectional range")
    c.add_argument("path")
    c.add_argument("--eps", type=float, default=1.0)
    c.add_argument("--spectrum", action="store_true", help="print every eigenvalue")
    c.set_defaults(func=cmd_curvature)
    s = sub.add_parser("sweep", help="sweep a family over eps and classify")
    s.add_argument("path")
    s.add_argument("--grid", help="a:b:log:n (default 1:1e-4:log:25)")
    s.add_argument("--out", help="CSV output file (default stdout)")
    s.set_defaults(func=cmd_sweep)
    e = sub.add_parser("examples", help="list or emit bundled fixtures")
    e.add_argument("action", choices=("list", "emit"))
    e.add_argument("name", nargs="?")
    e.add_argument("dir", nargs="?")
    e.set_defaults(func=cmd_examples)
    return p


def main(argv=None, out=None, err=None):
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_IO if exc.code else EXIT_OK
    try:
        default_tol()
    except ValueError:
        print(f"error: CCLAB_TOL must be a positive number, got {os.environ.get('CCLAB_TOL')!r}", file=err)
        return EXIT_IO
    if getattr(args, "eps", 1.0) is not None and not getattr(args, "eps", 1.0) > 0:
        print("error: --eps must be positive", file=err)
        return EXIT_DOMAIN
    try:
        return args.func(args, out)
    except (FixtureFormatError, GridError) as exc:
        print(f"error: {exc}", file=err)
        return EXIT_IO
    except CclabError as exc:
        print(f"error: {exc}", file=err)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
