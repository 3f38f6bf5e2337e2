"""Exception hierarchy shared by every cclab module."""

import os

import numpy as np

DEFAULT_TOL = 1e-10


def default_tol() -> float:
    """Tolerance used by validators; ``CCLAB_TOL`` overrides it."""
    raw = os.environ.get("CCLAB_TOL")
    if raw is None:
        return DEFAULT_TOL
    tol = float(raw)
    if not np.isfinite(tol) or tol <= 0:
        raise ValueError(f"CCLAB_TOL must be positive, got {raw!r}")
    return tol


class CclabError(ValueError):
    """Base class for domain failures (CLI exit code 1)."""


class InvalidTensorError(CclabError):
    pass


class NotSymmetricError(CclabError):
    pass


class ConvergenceError(CclabError):
    pass


class LieAlgebraError(CclabError):
    pass


class ShapeError(CclabError):
    pass


class FixtureError(CclabError):
    """A fixture is structurally readable but violates its kind's rules."""


class FixtureFormatError(Exception):
    """A document cannot be read or parsed at all (CLI exit code 2)."""
