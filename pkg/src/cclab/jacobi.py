"""Cyclic Jacobi eigenvalue iteration for small dense symmetric matrices."""

import math

import numpy as np

from .errors import ConvergenceError, NotSymmetricError

MAX_SWEEPS = 100


def _off_norm(a):
    off = a - np.diag(np.diag(a))
    return math.sqrt(float(np.sum(off * off)))


def jacobi_eigenvalues(m, max_sweeps=MAX_SWEEPS, sym_tol=1e-12):
    """Eigenvalues of a symmetric matrix, sorted ascending.

    Row-cyclic Jacobi with a threshold on the first three sweeps (the
    classical Rutishauser schedule). Pivot order is fixed, so the output is
    bit-for-bit reproducible for identical input.
    """
    a = np.array(m, dtype=float, copy=True)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise NotSymmetricError(f"expected a square matrix, got shape {a.shape}")
    n = a.shape[0]
    if n == 0:
        return np.zeros(0)
    scale = max(1.0, float(np.max(np.abs(a))))
    asym = float(np.max(np.abs(a - a.T)))
    if asym > sym_tol * scale:
        raise NotSymmetricError(f"matrix not symmetric: max |M - M^T| = {asym:.3e}")
    a = 0.5 * (a + a.T)

    fro = math.sqrt(float(np.sum(a * a)))
    target = np.finfo(float).eps * max(fro, 1e-300)
    for sweep in range(max_sweeps):
        off = _off_norm(a)
        if off <= target:
            return np.sort(np.diag(a))
        thresh = 0.2 * off / n**2 if sweep < 3 else 0.0
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) <= thresh:
                    continue
                app, aqq = a[p, p], a[q, q]
                # negligible against both diagonals after a few sweeps
                if sweep > 3 and abs(apq) * 1e18 <= min(abs(app), abs(aqq)):
                    a[p, q] = a[q, p] = 0.0
                    continue
                theta = (aqq - app) / (2.0 * apq)
                t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                ap = a[:, p].copy()
                aq = a[:, q].copy()
                a[:, p] = c * ap - s * aq
                a[:, q] = s * ap + c * aq
                rp = a[p, :].copy()
                rq = a[q, :].copy()
                a[p, :] = c * rp - s * rq
                a[q, :] = s * rp + c * rq
                a[p, q] = a[q, p] = 0.0
    off = _off_norm(a)
    if off <= 1e3 * target:
        return np.sort(np.diag(a))
    raise ConvergenceError(
        f"Jacobi iteration did not converge in {max_sweeps} sweeps; off-diagonal norm {off:.3e}"
    )
