"""The 1-D Emden problem ``-W'' = W**p`` on ``(a_bar, b_bar)`` with zero ends.

The positive solution is symmetric about the midpoint ``s0``.  Energy
conservation gives the time map

    s - a_bar = (half / L_p) * F(W(s) / xi),   F(y) = int_0^y dt / sqrt(1 - t**(p+1)),

where ``half = (b_bar - a_bar) / 2`` and ``F(1) = L_p``.  Everything below
works with the peak fraction ``y = W / xi`` and its complement ``1 - y``,
so nothing of the size ``xi**(p+1)`` is ever formed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import quad
from ._roots import newton_bracketed
from .errors import DomainError

# Peak fractions closer to 1 than this are solved for the complement 1 - y
# with the endpoint-singular rule.
_TAIL_SWITCH = 1e-6
_INVERSION_TOL = 1e-12
_QUAD_TOL = 1e-13
_BOUNDARY_SNAP = 1e-14


@dataclass(frozen=True)
class Interval:
    a_bar: float
    b_bar: float

    def __post_init__(self):
        if not (math.isfinite(self.a_bar) and math.isfinite(self.b_bar)):
            raise DomainError("interval endpoints must be finite")
        if not self.a_bar < self.b_bar:
            raise DomainError(f"need a_bar < b_bar, got ({self.a_bar}, {self.b_bar})")

    @property
    def s0(self) -> float:
        return 0.5 * (self.a_bar + self.b_bar)

    @property
    def length(self) -> float:
        return self.b_bar - self.a_bar

    def check(self, s, what="s"):
        s = np.asarray(s, dtype=float)
        if np.any(~np.isfinite(s)) or np.any(s < self.a_bar) or np.any(s > self.b_bar):
            raise DomainError(f"{what} outside [{self.a_bar}, {self.b_bar}]")
        return s

    def grid(self, n: int) -> np.ndarray:
        return np.linspace(self.a_bar, self.b_bar, n)


@dataclass(frozen=True)
class EmdenSolution:
    interval: Interval
    p: float
    xi: float
    log_xi: float = field(repr=False)
    L: float = field(repr=False)
    # F(1 - _TAIL_SWITCH) / L_p: time-map fraction where the tail regime starts
    switch: float = field(repr=False)


def _direct_integrand(n):
    def f(t):
        with np.errstate(divide="ignore"):
            return 1.0 / np.sqrt(-np.expm1(n * np.log(t)))

    return f


def _tail_integrand(n):
    # integrates over e in (0, d); the distance to the upper end is 1 - t
    def f(x, e):
        return 1.0 / np.sqrt(-np.expm1(n * np.log1p(-e)))

    return f


def _F(y, n):
    """``int_0^y dt/sqrt(1-t**n)`` for ``0 < y <= 1 - _TAIL_SWITCH``."""
    val, _, _ = quad.integrate_batch(_direct_integrand(n), 0.0, y, rel_tol=_QUAD_TOL)
    return val


def _tail(d, n):
    """``int_{1-d}^1 dt/sqrt(1-t**n)`` computed on ``(0, d)`` without rounding 1-d."""
    val, _, _ = quad.integrate_batch(
        _tail_integrand(n), 0.0, d, singular_at_hi=True, rel_tol=_QUAD_TOL, with_distance=True
    )
    return val


def solve_emden(interval: Interval, p: float) -> EmdenSolution:
    """Peak value of the positive solution from the closed form.

    ``xi = ((2/(b-a)) * sqrt((p+1)/2) * L_p) ** (2/(p-1))``, evaluated in
    log space.
    """
    if not p > 1:
        raise DomainError(f"Emden problem needs p > 1, got {p}")
    L = quad.L_p(p)
    log_xi = (2.0 / (p - 1.0)) * math.log(2.0 / interval.length * math.sqrt(0.5 * (p + 1.0)) * L)
    if log_xi > 700.0:
        raise DomainError(f"peak value exp({log_xi:.1f}) overflows double precision")
    n = p + 1.0
    switch = 1.0 - _tail(np.array([_TAIL_SWITCH]), n)[0] / L
    return EmdenSolution(interval, float(p), math.exp(log_xi), log_xi, L, float(switch))


def _invert_direct(target, n):
    """Solve ``F(y) = target`` for the peak fraction ``y``."""
    hi = np.full_like(target, 1.0 - _TAIL_SWITCH)
    y0 = np.clip(target, 1e-300, hi)
    return newton_bracketed(
        lambda y, i: _F(y, n) - target[i],
        lambda y, i: 1.0 / np.sqrt(-np.expm1(n * np.log(y))),
        y0,
        np.zeros_like(target),
        hi,
        lambda y: _INVERSION_TOL * 1e-2,
    )


def _invert_tail(target, n):
    """Solve ``tail(v**2) = target`` for ``v = sqrt(1 - y)``."""
    v_max = math.sqrt(_TAIL_SWITCH)
    # near the peak tail(d) ~ 2 sqrt(d / n)
    v0 = np.clip(0.5 * math.sqrt(n) * target, 1e-300, v_max)
    v = newton_bracketed(
        lambda v, i: _tail(v * v, n) - target[i],
        lambda v, i: 2.0 * v / np.sqrt(-np.expm1(n * np.log1p(-v * v))),
        v0,
        np.zeros_like(target),
        np.full_like(target, v_max),
        lambda v: 1e-2 * _INVERSION_TOL / np.maximum(2.0 * v, 1e-300),
    )
    return v * v


def peak_fraction(sol: EmdenSolution, s):
    """Return ``(y, d, sign)`` with ``y = W(s)/xi``, ``d = 1 - y`` and the
    sign of ``W'(s)``.  Vectorised over ``s``."""
    iv = sol.interval
    s = iv.check(s)
    shape = s.shape
    s = s.ravel()
    sign = np.sign(iv.s0 - s)
    left = np.where(s > iv.s0, iv.a_bar + iv.b_bar - s, s)
    half = 0.5 * iv.length
    sigma = np.clip((left - iv.a_bar) / half, 0.0, 1.0)
    at_wall = (left - iv.a_bar) <= _BOUNDARY_SNAP * iv.length
    at_peak = s == iv.s0

    n = sol.p + 1.0
    y = np.zeros_like(sigma)
    d = np.ones_like(sigma)
    direct = ~at_wall & ~at_peak & (sigma <= sol.switch)
    tail = ~at_wall & ~at_peak & ~direct
    if np.any(direct):
        y[direct] = _invert_direct(sigma[direct] * sol.L, n)
        d[direct] = 1.0 - y[direct]
    if np.any(tail):
        d[tail] = _invert_tail((1.0 - sigma[tail]) * sol.L, n)
        y[tail] = 1.0 - d[tail]
    y[at_peak] = 1.0
    d[at_peak] = 0.0
    sign[at_peak] = 0.0
    return y.reshape(shape), d.reshape(shape), sign.reshape(shape)


def _out(x, like):
    return float(x) if np.ndim(like) == 0 else x


def eval_W(sol: EmdenSolution, s):
    """Solution value ``W_p(s)``; accepts scalars or arrays."""
    y, _, _ = peak_fraction(sol, s)
    return _out(sol.xi * y, s)


def eval_W_prime(sol: EmdenSolution, s):
    """``W_p'(s) = ±sqrt(2/(p+1) * (xi**(p+1) - W**(p+1)))``, positive left of ``s0``."""
    y, d, sign = peak_fraction(sol, s)
    n = sol.p + 1.0
    with np.errstate(divide="ignore"):
        log_y = np.where(d < _TAIL_SWITCH, np.log1p(-d), np.log(np.maximum(y, 1e-300)))
    gap = -np.expm1(n * log_y)
    gap = np.where(y <= 0.0, 1.0, gap)
    scale = math.sqrt(2.0 / n) * math.exp(0.5 * n * sol.log_xi)
    return _out(sign * scale * np.sqrt(gap), s)


def lq_norm_power(sol: EmdenSolution, q: float) -> float:
    """``||W_p||_q**q = sqrt(2/(p+1)) * xi**((2q-p+1)/2) * B((q+1)/(p+1), 1/2)``."""
    if not q > 0:
        raise DomainError(f"q must be positive, got {q}")
    p = sol.p
    log_val = (
        0.5 * math.log(2.0 / (p + 1.0))
        + 0.5 * (2.0 * q - p + 1.0) * sol.log_xi
        + quad.ln_beta((q + 1.0) / (p + 1.0), 0.5)
    )
    return math.exp(log_val)


def lq_norm(sol: EmdenSolution, q: float) -> float:
    """The ``L^q`` norm of ``W_p`` on its interval."""
    return lq_norm_power(sol, q) ** (1.0 / q)
