"""Independent shooting solvers used to cross-check the time-map route.

Nothing here touches the time-map integrals: solutions come from an
adaptive Dormand-Prince 5(4) integrator started at the midpoint, where
symmetry fixes ``W'(s0) = 0``, and the peak value is found by root
finding on the boundary miss distance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import simpson

from .emden import Interval
from .errors import ConvergenceError, DomainError, NoSolutionError, StiffnessError
from ._roots import golden_section_max

DEFAULT_TOL = 1e-10

# Dormand-Prince 5(4) tableau
_C = (0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0)
_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
_B5 = (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0)
_B4 = (5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40)
_E = tuple(b5 - b4 for b5, b4 in zip(_B5, _B4))


@dataclass
class IvpTrace:
    """Accepted steps of an integration as ``(s, y, y')`` triples.

    Nodes are stored in increasing ``s`` whatever the direction of
    integration; ``forward`` records that direction.  ``errors[i]`` is the
    scaled local error estimate (at most one) of the step joining nodes
    ``i`` and ``i + 1``.
    """

    nodes: list
    tolerance: float
    errors: list = field(default_factory=list)
    forward: bool = True

    @property
    def s(self):
        return np.array([n[0] for n in self.nodes])

    @property
    def y(self):
        return np.array([n[1] for n in self.nodes])

    @property
    def y_prime(self):
        return np.array([n[2] for n in self.nodes])

    @property
    def start(self):
        return self.nodes[0] if self.forward else self.nodes[-1]

    @property
    def end(self):
        """Node where the integration stopped."""
        return self.nodes[-1] if self.forward else self.nodes[0]

    def sample(self, points):
        """Values at points that were passed as ``s_eval``; returns ``(y, y')``."""
        table = {n[0]: (n[1], n[2]) for n in self.nodes}
        try:
            vals = [table[float(p)] for p in points]
        except KeyError as exc:
            raise DomainError(f"{exc.args[0]} is not a node of this trace") from None
        arr = np.array(vals)
        return arr[:, 0], arr[:, 1]


def integrate_ivp(f, s0, y0, yp0, s_end, tol=DEFAULT_TOL, s_eval=None, max_steps=1_000_000):
    """Integrate ``y'' = f(s, y, y')`` from ``s0`` to ``s_end``.

    The local error of each step is kept below ``tol * max(1, |component|)``
    for both ``y`` and ``y'``.  Integration may run backwards
    (``s_end < s0``).  Points in ``s_eval`` lying between ``s0`` and
    ``s_end`` are hit exactly and recorded as nodes.
    """
    if not (1e-14 < tol < 1e-3):
        raise DomainError(f"tol={tol} outside (1e-14, 1e-3)")
    direction = 1.0 if s_end >= s0 else -1.0
    span = abs(s_end - s0)
    stops = []
    if s_eval is not None:
        pts = np.asarray(s_eval, dtype=float).ravel()
        inside = (direction * (pts - s0) > 0) & (direction * (s_end - pts) > 0)
        stops = sorted(set(pts[inside].tolist()), key=lambda p: direction * (p - s0))
    stops.append(float(s_end))

    def accel(s, y, yp):
        acc = f(s, y, yp)
        if not math.isfinite(acc):
            raise DomainError(f"non-finite right-hand side at s={s}")
        return acc

    # the state is two floats, so the stages are written out by hand
    s = float(s0)
    y, yp = float(y0), float(yp0)
    nodes = [(s, y, yp)]
    errors = []
    if span == 0.0:
        return IvpTrace(nodes, tol, errors)

    def finish():
        if direction > 0:
            return IvpTrace(nodes, tol, errors, True)
        return IvpTrace(nodes[::-1], tol, errors[::-1], False)

    h = direction * min(1e-2 * span, 1e-3 * max(span, 1.0))
    k1 = (yp, accel(s, y, yp))
    stop_idx = 0
    for _ in range(max_steps):
        target = stops[stop_idx]
        remaining = target - s
        clipped = abs(h) >= abs(remaining)
        step = remaining if clipped else h
        k = [k1]
        for i in range(1, 7):
            dy = dyp = 0.0
            for a, kj in zip(_A[i], k):
                dy += a * kj[0]
                dyp += a * kj[1]
            yi, ypi = y + step * dy, yp + step * dyp
            k.append((ypi, accel(s + _C[i] * step, yi, ypi)))
        dy = dyp = ey = eyp = 0.0
        for b, e, kj in zip(_B5, _E, k):
            dy += b * kj[0]
            dyp += b * kj[1]
            ey += e * kj[0]
            eyp += e * kj[1]
        y_new, yp_new = y + step * dy, yp + step * dyp
        err = max(
            abs(step * ey) / (tol * max(1.0, abs(y), abs(y_new))),
            abs(step * eyp) / (tol * max(1.0, abs(yp), abs(yp_new))),
        )
        if err <= 1.0:
            s = target if clipped else s + step
            y, yp = y_new, yp_new
            k1 = k[6]  # first same as last
            nodes.append((s, y, yp))
            errors.append(err)
            if clipped:
                stop_idx += 1
                if stop_idx == len(stops):
                    return finish()
        factor = 0.9 * err**-0.2 if err > 0 else 5.0
        new = abs(step) * min(5.0, max(0.2, factor))
        if err <= 1.0 and clipped:
            new = max(new, abs(h))
        h = direction * new
        if abs(h) < 1e-14 * max(1.0, abs(s)):
            raise StiffnessError(f"step size underflow at s={s}", best=(s, y, yp))
    raise ConvergenceError("maximum number of steps exceeded", best=nodes[-1])


def _illinois(phi, lo, hi, f_lo, f_hi, ftol, xtol, max_iter=200):
    """Root of ``phi`` in a sign-changing bracket: a few bisections, then
    Illinois-modified regula falsi."""
    for it in range(max_iter):
        if it < 8:
            mid = 0.5 * (lo + hi)
        else:
            mid = (lo * f_hi - hi * f_lo) / (f_hi - f_lo)
            if not lo < mid < hi:
                mid = 0.5 * (lo + hi)
        f_mid = phi(mid)
        if abs(f_mid) <= ftol(mid) or hi - lo <= xtol(mid):
            return mid
        if (f_mid > 0) == (f_lo > 0):
            lo, f_lo = mid, f_mid
            if it >= 8:
                f_hi *= 0.5
        else:
            hi, f_hi = mid, f_mid
            if it >= 8:
                f_lo *= 0.5
    raise ConvergenceError("shooting root did not converge", best=0.5 * (lo + hi))


def _emden_rhs(p):
    def f(s, y, yp):
        # odd extension keeps the shot defined past the first zero
        try:
            return -math.copysign(abs(y) ** p, y)
        except OverflowError:
            return -math.copysign(math.inf, y)

    return f


def _emden_miss(interval, p, xi, tol):
    """``W(a_bar)`` for the midpoint shot, or ``-inf`` once the trajectory
    has turned back (the peak guess is past the first zero)."""
    try:
        with np.errstate(over="ignore"):
            trace = integrate_ivp(_emden_rhs(p), interval.s0, xi, 0.0, interval.a_bar, tol)
    except (DomainError, StiffnessError, OverflowError):
        # the shot blew up long before reaching a_bar: far too large
        return -math.inf
    # nodes run from a_bar up to s0; the slope must stay positive before s0
    yp = trace.y_prime[:-1]
    if np.any(yp <= 0.0):
        return -math.inf
    return trace.end[1]


def shoot_emden(interval: Interval, p: float, tol: float = DEFAULT_TOL, s_eval=None):
    """Peak value of the Emden problem by shooting from the midpoint.

    Returns ``(xi, trace)`` where ``trace`` covers ``[a_bar, s0]``
    (integrated from ``s0`` towards ``a_bar``).
    """
    if not p > 1:
        raise DomainError(f"need p > 1, got {p}")

    def phi(log_xi):
        return _emden_miss(interval, p, math.exp(log_xi), tol)

    lo = hi = 0.0
    f0 = phi(0.0)
    f_lo = f_hi = f0
    # the quarter period scales like xi**((1-p)/2); this step at most
    # shrinks it by 1.5, so the first zero is never jumped over twice
    factor = min(math.log(10.0), 2.0 * math.log(1.5) / (p - 1.0))
    for _ in range(20000):
        if f_lo > 0 and f_hi < 0:
            break
        if f0 > 0:
            lo, f_lo = hi, f_hi
            hi += factor
            f_hi = phi(hi)
        else:
            hi, f_hi = lo, f_lo
            lo -= factor
            f_lo = phi(lo)
    else:
        raise ConvergenceError("could not bracket the peak value")
    if math.isinf(f_hi):
        # pull the upper end back inside the first half-period
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            f_mid = phi(mid)
            if f_mid > 0:
                lo, f_lo = mid, f_mid
            elif math.isfinite(f_mid):
                hi, f_hi = mid, f_mid
                break
            else:
                hi, f_hi = mid, f_mid
    log_xi = _illinois(
        phi,
        lo,
        hi,
        f_lo,
        f_hi,
        ftol=lambda x: 1e-13 * max(1.0, math.exp(x)),
        xtol=lambda x: 4e-16 * max(1.0, abs(x)),
    )
    xi = math.exp(log_xi)
    trace = integrate_ivp(_emden_rhs(p), interval.s0, xi, 0.0, interval.a_bar, tol, s_eval=s_eval)
    return xi, trace


def _gelfand_rhs(lam):
    def f(s, y, yp):
        try:
            return -lam * math.exp(y)
        except OverflowError:
            return -math.inf

    return f


def _gelfand_miss(interval, lam, mu, tol):
    try:
        return integrate_ivp(_gelfand_rhs(lam), interval.s0, mu, 0.0, interval.a_bar, tol).end[1]
    except (StiffnessError, DomainError, OverflowError):
        # the blow-up scale exp(-mu/2)/sqrt(lam) is below resolution and the
        # shot collapses towards -inf long before a_bar
        return -math.inf


def shoot_gelfand(interval: Interval, lam: float, mu_guess: float, tol: float = DEFAULT_TOL, s_eval=None):
    """Peak ``mu`` of a Gelfand solution, nearest (in log scale) to ``mu_guess``.

    The miss distance ``w(a_bar)`` is negative below the minimal branch,
    positive between the two branches and negative above the unstable one.
    """
    if not lam > 0:
        raise DomainError(f"lambda must be positive, got {lam}")
    if not mu_guess > 0:
        raise DomainError("mu_guess must be positive")

    def phi(log_mu):
        return _gelfand_miss(interval, lam, math.exp(log_mu), tol)

    x0 = math.log(mu_guess)
    f0 = phi(x0)
    step = math.log(1.2)
    lo_lim, hi_lim = math.log(1e-10), math.log(100.0)
    x_dn = x_up = x0
    f_dn = f_up = f0
    bracket = None
    while bracket is None:
        moved = False
        if x_up < hi_lim:
            x_new = min(x_up + step, hi_lim)
            f_new = phi(x_new)
            if (f_new > 0) != (f_up > 0):
                bracket = (x_up, x_new, f_up, f_new)
            x_up, f_up, moved = x_new, f_new, True
        if bracket is None and x_dn > lo_lim:
            x_new = max(x_dn - step, lo_lim)
            f_new = phi(x_new)
            if (f_new > 0) != (f_dn > 0):
                bracket = (x_new, x_dn, f_new, f_dn)
            x_dn, f_dn, moved = x_new, f_new, True
        if not moved and bracket is None:
            raise NoSolutionError(f"no Gelfand solution found for lambda={lam}")
    lo, hi, f_lo, f_hi = bracket
    log_mu = _illinois(
        phi,
        lo,
        hi,
        f_lo,
        f_hi,
        ftol=lambda x: 1e-11,
        xtol=lambda x: 4e-16 * max(1.0, abs(x)),
    )
    mu = math.exp(log_mu)
    trace = integrate_ivp(_gelfand_rhs(lam), interval.s0, mu, 0.0, interval.a_bar, tol, s_eval=s_eval)
    return mu, trace


def shoot_lambda(interval: Interval, mu: float, tol: float = DEFAULT_TOL) -> float:
    """The ``lam`` for which the midpoint shot with peak ``mu`` lands on zero."""
    if not mu > 0:
        raise DomainError("mu must be positive")

    def phi(log_lam):
        # decreasing in lam; flip so the bracket reads (+, -)
        return _gelfand_miss(interval, math.exp(log_lam), mu, tol)

    lo = math.log(1.0 / interval.length**2)
    f_lo = phi(lo)
    while f_lo <= 0:
        lo -= math.log(4.0)
        f_lo = phi(lo)
    hi, f_hi = lo, f_lo
    while f_hi > 0:
        hi += math.log(4.0)
        f_hi = phi(hi)
    return math.exp(
        _illinois(phi, lo, hi, f_lo, f_hi, ftol=lambda x: 1e-12 * max(1.0, mu), xtol=lambda x: 1e-15)
    )


def shoot_fold(interval: Interval, tol: float = DEFAULT_TOL, xtol: float = 1e-5):
    """Fold ``(lambda_star, mu_star)`` located with shooting only.

    A coarse scan of ``lam(mu)`` is refined by golden-section search.
    """
    mus = np.geomspace(0.1, 10.0, 12)
    lams = [shoot_lambda(interval, m, tol) for m in mus]
    k = int(np.argmax(lams))
    lo, hi = mus[max(k - 1, 0)], mus[min(k + 1, len(mus) - 1)]
    mu_star, lam_star = golden_section_max(lambda m: shoot_lambda(interval, m, tol), lo, hi, xtol)
    return lam_star, mu_star


def oracle_lq_norm(interval: Interval, p: float, q: float, n: int = 2001, tol: float = DEFAULT_TOL):
    """``(||W||_q, xi)`` from the shooting solution by Simpson's rule.

    The half-solution is sampled on ``n`` uniform points of ``[a_bar, s0]``
    and doubled by symmetry.
    """
    if not q > 0:
        raise DomainError(f"q must be positive, got {q}")
    if n < 3:
        raise DomainError("need at least three sample points")
    s = np.linspace(interval.a_bar, interval.s0, n)
    xi, trace = shoot_emden(interval, p, tol, s_eval=s)
    w, _ = trace.sample(s[:-1])
    w = np.append(np.clip(w, 0.0, None), xi)
    # scale by xi so that W**q cannot overflow for large q
    power = 2.0 * simpson((w / xi) ** q, x=s)
    return xi * power ** (1.0 / q), xi
