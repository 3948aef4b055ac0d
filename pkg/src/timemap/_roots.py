"""Small root-finding and optimisation helpers shared by the solvers."""

import math

import numpy as np

from .errors import ConvergenceError


def newton_bracketed(fun, dfun, x0, lo, hi, tol):
    """Vectorised Newton iteration safeguarded by bisection.

    ``fun`` must be increasing on ``[lo, hi]``; only unconverged entries
    are re-evaluated.
    """
    x = x0.copy()
    active = np.ones(x.shape, dtype=bool)
    for _ in range(200):
        idx = np.flatnonzero(active)
        if idx.size == 0:
            return x
        xa = x[idx]
        fa = fun(xa, idx)
        lo[idx] = np.where(fa < 0, xa, lo[idx])
        hi[idx] = np.where(fa > 0, xa, hi[idx])
        x_new = xa - fa / dfun(xa, idx)
        bad = (x_new < lo[idx]) | (x_new > hi[idx]) | ~np.isfinite(x_new)
        x_new = np.where(bad, 0.5 * (lo[idx] + hi[idx]), x_new)
        done = (np.abs(x_new - xa) <= tol(x_new)) & ~bad | (fa == 0) | (hi[idx] - lo[idx] <= tol(x_new))
        x[idx] = x_new
        active[idx[done]] = False
    raise ConvergenceError("bracketed Newton iteration did not converge", best=x)


_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


def golden_section_max(f, lo, hi, xtol):
    """Maximise a unimodal ``f`` on ``[lo, hi]``; returns ``(x, f(x))``."""
    a, b = lo, hi
    c = b - _INV_PHI * (b - a)
    d = a + _INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(500):
        if b - a <= xtol:
            break
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - _INV_PHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INV_PHI * (b - a)
            fd = f(d)
    else:
        raise ConvergenceError("golden-section search did not converge", best=(a, b))
    x = c if fc >= fd else d
    return x, max(fc, fd)
