"""Limit objects of the asymptotic analysis and the sup-distance metric."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .emden import EmdenSolution, Interval, peak_fraction
from .errors import DomainError, NumericError

SQRT2 = math.sqrt(2.0)
DEFAULT_GRID = 2001
LOCAL_WINDOW = (-4.0, 4.0)


def _out(x, like):
    return float(x) if np.ndim(like) == 0 else x


def green_1d(interval: Interval, s, t):
    """Dirichlet Green's function of ``-d^2/ds^2`` on the interval.

    ``G(s,t) = (s-a)(b-t)/(b-a)`` for ``s <= t`` and ``(b-s)(t-a)/(b-a)``
    otherwise.  Vectorised over both arguments.
    """
    s_arr = interval.check(s, "s")
    t_arr = interval.check(t, "t")
    a, b = interval.a_bar, interval.b_bar
    lo = np.minimum(s_arr, t_arr)
    hi = np.maximum(s_arr, t_arr)
    g = (lo - a) * (b - hi) / (b - a)
    return float(g) if np.ndim(g) == 0 else g


def liouville_U(t):
    """``U(t) = log(4 e^{sqrt2 t} / (1 + e^{sqrt2 t})**2)``, written in an overflow-free form."""
    x = SQRT2 * np.abs(np.asarray(t, dtype=float))
    return _out(math.log(4.0) - x - 2.0 * np.log1p(np.exp(-x)), t)


def emden_limit_p_infty(interval: Interval, s):
    """Tent ``(4/(b-a)) G(s, s0)`` with peak 1 at the midpoint."""
    return green_1d(interval, s, interval.s0) * (4.0 / interval.length)


def emden_limit_p_one(interval: Interval, s):
    """First Dirichlet eigenfunction ``sin(pi (s-a)/(b-a))``."""
    s_arr = interval.check(s)
    return _out(np.sin(math.pi * (s_arr - interval.a_bar) / interval.length), s)


def eps_p(sol: EmdenSolution) -> float:
    """Local scale with ``p * eps**2 * xi**(p-1) == 1``.

    ``xi**(p-1)`` is taken from the closed form for the peak, so the value
    is finite for any ``p``.
    """
    iv = sol.interval
    xi_pm1 = (2.0 / iv.length * math.sqrt(0.5 * (sol.p + 1.0)) * sol.L) ** 2
    return 1.0 / math.sqrt(sol.p * xi_pm1)


@dataclass(frozen=True)
class RescaledProfile:
    eps: float
    window: Interval
    sampler: Callable

    def __call__(self, t):
        return self.sampler(t)


def rescale_emden(sol: EmdenSolution) -> RescaledProfile:
    """Zoom ``t -> (p/xi) (W(eps t + s0) - xi)`` around the peak."""
    if not sol.p > 1:
        raise DomainError("rescaling needs p > 1")
    eps = eps_p(sol)
    iv = sol.interval
    window = Interval((iv.a_bar - iv.s0) / eps, (iv.b_bar - iv.s0) / eps)

    def sampler(t):
        t_arr = window.check(t, "t")
        s = np.clip(eps * t_arr + iv.s0, iv.a_bar, iv.b_bar)
        _, d, _ = peak_fraction(sol, s)
        return _out(-sol.p * d, t)

    return RescaledProfile(eps, window, sampler)


def sup_distance(f: Callable, g: Callable, interval: Interval, n: int = DEFAULT_GRID) -> float:
    """Max of ``|f - g|`` on an ``n``-point uniform grid of ``interval``.

    Both callables are tried on the whole grid first and fall back to
    pointwise evaluation.
    """
    if n < 2:
        raise DomainError("sup_distance needs at least two grid points")
    x = interval.grid(n)

    def sample(h):
        try:
            y = np.asarray(h(x), dtype=float)
            if y.shape != x.shape:
                y = np.broadcast_to(y, x.shape)
        except (TypeError, ValueError):
            y = np.array([float(h(xi)) for xi in x])
        return y

    diff = np.abs(sample(f) - sample(g))
    if not np.all(np.isfinite(diff)):
        raise NumericError("non-finite sample in sup_distance")
    return float(diff.max())
