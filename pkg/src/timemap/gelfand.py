"""The 1-D Gelfand problem ``-w'' = lam * exp(w)`` with zero Dirichlet data.

With peak ``mu = w(s0)`` the energy ``w'**2/2 + lam*exp(w)`` is conserved,
and after substituting ``w = mu - u**2`` the half-interval time map reads

    sqrt(2*lam) * (s - a_bar) = exp(-mu/2) * int_v^{sqrt(mu)} g(u) du,
    g(u) = 2u / sqrt(1 - exp(-u**2)),

where ``v = sqrt(mu - w(s))``.  The integrand is smooth, so both the
``lam(mu)`` curve and pointwise evaluation reduce to regular quadrature.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Literal

import numpy as np
from scipy.optimize import brentq

from . import quad
from ._roots import golden_section_max, newton_bracketed
from .emden import Interval
from .errors import DomainError, NoSolutionError
from .profiles import green_1d

Branch = Literal["minimal", "unstable"]

MU_MAX = 60.0
_QUAD_TOL = 1e-13
_FOLD_XTOL = 1e-8


def _g(u):
    with np.errstate(invalid="ignore", divide="ignore"):
        val = 2.0 * u / np.sqrt(-np.expm1(-u * u))
    return np.where(u == 0.0, 2.0, val)


def _g_integral(lo, hi):
    """``int_lo^hi g(u) du`` for arrays of limits (zero where ``lo == hi``)."""
    lo = np.atleast_1d(np.asarray(lo, dtype=float))
    hi = np.atleast_1d(np.asarray(hi, dtype=float))
    lo, hi = np.broadcast_arrays(lo, hi)
    out = np.zeros(lo.shape)
    ok = hi > lo
    if np.any(ok):
        out[ok], _, _ = quad.integrate_batch(_g, lo[ok], hi[ok], rel_tol=_QUAD_TOL)
    return out


def _time_integral(mu: float) -> float:
    """``J(mu) = int_0^mu dw / sqrt(e^mu - e^w)``; then ``lam = 2 J**2 / (b-a)**2``."""
    return math.exp(-0.5 * mu) * float(_g_integral(0.0, math.sqrt(mu))[0])


@dataclass(frozen=True)
class GelfandSolution:
    interval: Interval
    mu: float
    lam: float
    branch: Branch
    # int_0^{sqrt(mu)} g(u) du
    g_total: float = field(repr=False)

    @property
    def delta(self) -> float:
        return delta(self)

    @property
    def gamma(self) -> float:
        return gamma(self)


@dataclass(frozen=True)
class BifurcationDiagram:
    samples: list
    mu_star: float
    lambda_star: float


def lambda_of_mu(interval: Interval, mu: float) -> float:
    """The ``lam`` whose symmetric solution has peak value ``mu``."""
    if not mu > 0:
        raise DomainError(f"peak value mu must be positive, got {mu}")
    return 2.0 * _time_integral(mu) ** 2 / interval.length**2


@lru_cache(maxsize=1)
def _fold_unit():
    """Fold of ``J(mu)`` (interval independent): ``(mu_star, J_star)``."""
    mus = np.geomspace(1e-3, MU_MAX, 200)
    J = np.array([_time_integral(m) for m in mus])
    k = int(np.argmax(J))
    if k == 0 or k == len(mus) - 1:
        raise DomainError("lam(mu) has no interior maximum on the scan grid")
    mu_star, J_star = golden_section_max(_time_integral, mus[k - 1], mus[k + 1], _FOLD_XTOL)
    return mu_star, J_star


def lambda_star(interval: Interval):
    """Fold point ``(lambda_star, mu_star)`` of the bifurcation curve."""
    mu_star, J_star = _fold_unit()
    return 2.0 * J_star**2 / interval.length**2, mu_star


def bifurcation_diagram(interval: Interval, mus) -> BifurcationDiagram:
    mus = [float(m) for m in mus]
    samples = [(m, lambda_of_mu(interval, m)) for m in mus]
    lam_star, mu_star = lambda_star(interval)
    return BifurcationDiagram(samples, mu_star, lam_star)


def _make(interval, mu, lam, branch):
    return GelfandSolution(interval, float(mu), float(lam), branch, float(_g_integral(0.0, math.sqrt(mu))[0]))


def solution_from_mu(interval: Interval, mu: float) -> GelfandSolution:
    """Solution with prescribed peak; the branch follows from ``mu`` vs ``mu_star``."""
    lam = lambda_of_mu(interval, mu)
    _, mu_star = lambda_star(interval)
    return _make(interval, mu, lam, "minimal" if mu <= mu_star else "unstable")


def solve_branch(interval: Interval, lam: float, branch: Branch) -> GelfandSolution:
    """Solve for the minimal or unstable solution at a given ``lam``.

    Inverts the monotone pieces of ``lam(mu)`` on either side of the fold
    with Brent's method.
    """
    if branch not in ("minimal", "unstable"):
        raise DomainError(f"unknown branch {branch!r}")
    if not lam > 0:
        raise DomainError(f"lambda must be positive, got {lam}")
    lam_star, mu_star = lambda_star(interval)
    if abs(lam - lam_star) <= 1e-12 * lam_star:
        return _make(interval, mu_star, lam_star, branch)
    if lam > lam_star:
        raise NoSolutionError(f"no solution for lambda={lam} > lambda_star={lam_star}")

    def h(mu):
        return lambda_of_mu(interval, mu) - lam

    if branch == "minimal":
        lo = min(0.5 * mu_star, lam * interval.length**2 / 16.0)
        while h(lo) > 0:
            lo *= 0.5
        a, b = lo, mu_star
    else:
        if h(MU_MAX) > 0:
            raise DomainError(f"lambda={lam} lies below lam(mu={MU_MAX}); unstable peak out of range")
        a, b = mu_star, MU_MAX
    mu = brentq(h, a, b, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=200)
    return _make(interval, mu, lam, branch)


def _peak_gap(sol: GelfandSolution, s):
    """``v = sqrt(mu - W(s))`` and the sign of ``W'(s)``; vectorised."""
    iv = sol.interval
    s = iv.check(s)
    shape = s.shape
    s = s.ravel()
    sign = np.sign(iv.s0 - s)
    left = np.where(s > iv.s0, iv.a_bar + iv.b_bar - s, s)
    sigma = np.clip((left - iv.a_bar) / (0.5 * iv.length), 0.0, 1.0)
    root_mu = math.sqrt(sol.mu)
    v = np.full(sigma.shape, root_mu)
    v[sigma >= 1.0] = 0.0
    inner = (sigma > 1e-14) & (sigma < 1.0)
    if np.any(inner):
        target = sol.g_total * sigma[inner]
        # K(v) = int_v^{sqrt(mu)} g is decreasing; solve target - K(v) = 0
        v[inner] = newton_bracketed(
            lambda x, i: target[i] - _g_integral(x, root_mu),
            lambda x, i: _g(x),
            np.clip(root_mu * (1.0 - sigma[inner]), 0.0, root_mu),
            np.zeros(target.shape),
            np.full(target.shape, root_mu),
            lambda x: 1e-14 * max(root_mu, 1.0),
        )
    return v.reshape(shape), sign.reshape(shape)


def _out(x, like):
    return float(x) if np.ndim(like) == 0 else x


def eval_W_gelfand(sol: GelfandSolution, s):
    """Solution value ``W(s)``, zero at the ends and ``mu`` at the midpoint."""
    v, _ = _peak_gap(sol, s)
    # v == sqrt(mu) exactly at the walls, where mu - v*v may round away from 0
    w = np.where(v >= math.sqrt(sol.mu), 0.0, np.maximum(sol.mu - v * v, 0.0))
    return _out(w, s)


def eval_W_prime_gelfand(sol: GelfandSolution, s):
    """``W'(s) = ±sqrt(2 lam (e^mu - e^W))`` with the sign of ``s0 - s``."""
    v, sign = _peak_gap(sol, s)
    mag = math.sqrt(2.0 * sol.lam) * math.exp(0.5 * sol.mu) * np.sqrt(-np.expm1(-v * v))
    return _out(sign * mag, s)


def gamma(sol: GelfandSolution) -> float:
    """``gamma = lam * int e^W = 2 W'(a_bar) = 2 sqrt(2 lam (e^mu - 1))``."""
    return 2.0 * math.sqrt(2.0 * sol.lam) * math.exp(0.5 * sol.mu) * math.sqrt(-math.expm1(-sol.mu))


def delta(sol: GelfandSolution) -> float:
    """Blow-up scale with ``lam * delta**2 * e^mu == 1``."""
    return math.exp(-0.5 * sol.mu) / math.sqrt(sol.lam)


def rescaled_window(sol: GelfandSolution):
    """The rescaled interval ``((a_bar - s0)/delta, (b_bar - s0)/delta)``."""
    iv, dl = sol.interval, delta(sol)
    return (iv.a_bar - iv.s0) / dl, (iv.b_bar - iv.s0) / dl


def rescaled_profile_gelfand(sol: GelfandSolution, t):
    """``W(delta*t + s0) - mu``, which tends to the Liouville profile as ``lam -> 0``."""
    t_arr = np.asarray(t, dtype=float)
    lo, hi = rescaled_window(sol)
    if np.any(~np.isfinite(t_arr)) or np.any(t_arr < lo) or np.any(t_arr > hi):
        raise DomainError(f"t outside the rescaled window ({lo}, {hi})")
    iv = sol.interval
    s = np.clip(delta(sol) * t_arr + iv.s0, iv.a_bar, iv.b_bar)
    v, _ = _peak_gap(sol, s)
    return _out(-v * v, t)


def green_representation_rhs(sol: GelfandSolution, s: float, rel_tol: float = 1e-11) -> float:
    """``int_{I_lam} G(s, delta*t + s0) exp(W~(t)) dt`` by quadrature.

    The range is split at the peak ``t = 0`` and at the kink of ``G``.
    """
    iv = sol.interval
    iv.check(s)
    dl = delta(sol)
    lo, hi = rescaled_window(sol)
    kink = (s - iv.s0) / dl
    cuts = sorted({lo, 0.0, min(max(kink, lo), hi), hi})

    def f(t):
        tau = np.clip(dl * t + iv.s0, iv.a_bar, iv.b_bar)
        return green_1d(iv, s, tau) * np.exp(rescaled_profile_gelfand(sol, np.clip(t, lo, hi)))

    total = 0.0
    for a, b in zip(cuts[:-1], cuts[1:]):
        if b > a:
            total += quad.integrate_endpoint_singular(f, a, b, rel_tol=rel_tol).value
    return total


def green_representation_check(sol: GelfandSolution, s: float) -> float:
    """``|RHS - delta * W(s)|`` for the Green representation of the solution."""
    return abs(green_representation_rhs(sol, s) - delta(sol) * eval_W_gelfand(sol, s))
