"""Weighted elliptic problems on annuli and their reduction to 1-D.

Radial solutions of the five problems below are pulled back from the
Emden or Gelfand problem on an interval ``(a_bar, b_bar)``:

==============  ======================================================  =====================
kind            PDE on ``a < |x| < b``                                  radial map
==============  ======================================================  =====================
power_planar    ``-Δu = u^p / |x|^2``  (N = 2)                          ``u(r) = W(-log r)``
power_higher    ``-Δu = (N-2)^2 u^p / |x|^(2(N-1))``  (N >= 3)          ``u(r) = W(r^(2-N))``
hardy_henon     ``-Δu - C_N u/|x|^2 = |x|^((N-1)(p-1)/2) u^p``          ``u(r) = r^(-(N-1)/2) W(r)``
exp_planar      ``-Δu = lam e^u / |x|^2``  (N = 2)                      ``u(r) = w(-log r)``
exp_higher      ``-Δu = lam (N-2)^2 e^u / |x|^(2(N-1))``  (N >= 3)      ``u(r) = w(r^(2-N))``
==============  ======================================================  =====================

with ``C_N = (N-1)(N-3)/4``.  For hardy_henon the weight ``r^(-(N-1)/2)``
is the one that removes the first-order term; with it the equation for
``W`` is exactly ``-W'' = W^p`` on ``(a, b)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal, Optional, Union

import numpy as np

from . import gelfand, profiles
from .emden import EmdenSolution, Interval, eval_W, solve_emden
from .errors import DomainError
from .gelfand import GelfandSolution

Kind = Literal["power_planar", "power_higher", "hardy_henon", "exp_planar", "exp_higher"]
Regime = Literal["p_infty", "p_one", "lambda_zero"]

KINDS = ("power_planar", "power_higher", "hardy_henon", "exp_planar", "exp_higher")
POWER_KINDS = ("power_planar", "power_higher", "hardy_henon")
EXP_KINDS = ("exp_planar", "exp_higher")
REGIMES = ("p_infty", "p_one", "lambda_zero")
DEFAULT_FD_STEP = 1e-4


@dataclass(frozen=True)
class AnnulusProblem:
    kind: Kind
    N: int
    a: float
    b: float
    parameter: float

    def __post_init__(self):
        if self.kind not in KINDS:
            raise DomainError(f"unknown kind {self.kind!r}")
        if not (0 < self.a < self.b) or not math.isfinite(self.b):
            raise DomainError(f"need 0 < a < b, got a={self.a}, b={self.b}")
        if self.kind.endswith("_planar") and self.N != 2:
            raise DomainError(f"{self.kind} needs N = 2")
        if self.kind.endswith("_higher") and self.N < 3:
            raise DomainError(f"{self.kind} needs N >= 3")
        if self.kind == "hardy_henon" and self.N < 1:
            raise DomainError("hardy_henon needs N >= 1")
        if self.kind in POWER_KINDS and not self.parameter > 1:
            raise DomainError(f"exponent p must exceed 1, got {self.parameter}")
        if self.kind in EXP_KINDS and not self.parameter > 0:
            raise DomainError(f"lambda must be positive, got {self.parameter}")

    @property
    def is_exp(self) -> bool:
        return self.kind in EXP_KINDS

    @property
    def c_N(self) -> float:
        return (self.N - 1) * (self.N - 3) / 4.0


@dataclass(frozen=True)
class RadialSolution:
    problem: AnnulusProblem
    reduced: Union[EmdenSolution, GelfandSolution]


def reduce_interval(problem: AnnulusProblem) -> Interval:
    """The interval on which the reduced 1-D problem lives."""
    a, b = problem.a, problem.b
    if problem.kind in ("power_planar", "exp_planar"):
        return Interval(-math.log(b), -math.log(a))
    if problem.kind in ("power_higher", "exp_higher"):
        e = 2 - problem.N
        return Interval(b**e, a**e)
    return Interval(a, b)


def _check_r(problem, r):
    r = np.asarray(r, dtype=float)
    if np.any(~np.isfinite(r)) or np.any(r < problem.a) or np.any(r > problem.b):
        raise DomainError(f"r outside [{problem.a}, {problem.b}]")
    return r


def to_reduced(problem: AnnulusProblem, r):
    """Map radii to reduced coordinates ``s``."""
    r = _check_r(problem, r)
    if problem.kind in ("power_planar", "exp_planar"):
        s = -np.log(r)
    elif problem.kind in ("power_higher", "exp_higher"):
        s = r ** (2 - problem.N)
    else:
        s = r
    iv = reduce_interval(problem)
    return np.clip(s, iv.a_bar, iv.b_bar)


def from_reduced(problem: AnnulusProblem, s):
    """Inverse of :func:`to_reduced`."""
    s = reduce_interval(problem).check(s)
    if problem.kind in ("power_planar", "exp_planar"):
        r = np.exp(-s)
    elif problem.kind in ("power_higher", "exp_higher"):
        r = s ** (1.0 / (2 - problem.N))
    else:
        r = s
    return np.clip(r, problem.a, problem.b)


def _weight(problem, r):
    """Factor ``u / W``: ``r^(-(N-1)/2)`` for hardy_henon, 1 otherwise."""
    if problem.kind == "hardy_henon":
        return np.asarray(r, dtype=float) ** (-0.5 * (problem.N - 1))
    return 1.0


def _out(x, like):
    return float(x) if np.ndim(like) == 0 else x


def solve_radial(problem: AnnulusProblem, branch: Optional[str] = None) -> RadialSolution:
    """Radial solution of ``problem``; exp kinds need a ``branch``."""
    iv = reduce_interval(problem)
    if problem.is_exp:
        if branch is None:
            raise DomainError(f"{problem.kind} needs branch='minimal' or 'unstable'")
        return RadialSolution(problem, gelfand.solve_branch(iv, problem.parameter, branch))
    if branch is not None:
        raise DomainError(f"{problem.kind} has a unique solution; branch must be omitted")
    return RadialSolution(problem, solve_emden(iv, problem.parameter))


def radial_from_mu(problem: AnnulusProblem, mu: float) -> RadialSolution:
    """Exp-kind solution selected by its peak value; ``problem.parameter`` is ignored."""
    if not problem.is_exp:
        raise DomainError("radial_from_mu applies to exp kinds only")
    sol = gelfand.solution_from_mu(reduce_interval(problem), mu)
    fixed = AnnulusProblem(problem.kind, problem.N, problem.a, problem.b, sol.lam)
    return RadialSolution(fixed, sol)


def eval_reduced(sol: RadialSolution, s):
    if sol.problem.is_exp:
        return gelfand.eval_W_gelfand(sol.reduced, s)
    return eval_W(sol.reduced, s)


def eval_radial(sol: RadialSolution, r):
    """``u(r)`` through the kind's transformation."""
    pb = sol.problem
    s = to_reduced(pb, r)
    return _out(_weight(pb, r) * eval_reduced(sol, s), r)


def green_annulus(N: int, a: float, b: float, r, s):
    """Green's function of ``-d²/dr² - ((N-1)/r) d/dr`` on ``(a, b)``, zero at both ends."""
    if N < 2:
        raise DomainError("green_annulus needs N >= 2")
    if not 0 < a < b:
        raise DomainError("need 0 < a < b")
    r = np.asarray(r, dtype=float)
    s_arr = np.asarray(s, dtype=float)
    for v, name in ((r, "r"), (s_arr, "s")):
        if np.any(~np.isfinite(v)) or np.any(v < a) or np.any(v > b):
            raise DomainError(f"{name} outside [{a}, {b}]")
    if N == 2:
        la, lb = math.log(a), math.log(b)
        lr, ls = np.log(r), np.log(s_arr)
        g = np.where(r <= s_arr, (lr - la) * (lb - ls), (ls - la) * (lb - lr)) * s_arr / (lb - la)
    else:
        e = 2 - N
        A, B = a**e, b**e
        R, S = r**e, s_arr**e
        # for s < r the first factor is s^(2-N) - a^(2-N); this is what makes
        # the two branches meet at r = s and matches the N = 2 formula
        g = np.where(r <= s_arr, (B - S) * (R - A), (S - A) * (B - R))
        g = g * s_arr ** (N - 1) / ((N - 2) * (A - B))
    return _out(g, np.broadcast(r, s_arr))


def r0(N: int, a: float, b: float) -> float:
    """Radius where the reduced midpoint lands."""
    if N < 2 or not 0 < a < b:
        raise DomainError("r0 needs N >= 2 and 0 < a < b")
    if N == 2:
        return math.sqrt(a * b)
    e = 2 - N
    return (0.5 * (a**e + b**e)) ** (1.0 / e)


def radial_limit_profile(problem: AnnulusProblem, regime: Regime, r):
    """Limit profile in ``r`` for the given regime.

    ``p_infty``: the tent ``(4/(b_bar-a_bar)) G(s, s0)`` (compare with ``u``).
    ``p_one``: the sine factor (compare with ``u / xi``).
    ``lambda_zero``: ``2 sqrt(2) G(s, s0)`` (compare with ``delta * u``).
    hardy_henon profiles carry the weight ``r^(-(N-1)/2)``.
    """
    if regime not in REGIMES:
        raise DomainError(f"unknown regime {regime!r}")
    if (regime == "lambda_zero") != problem.is_exp:
        raise DomainError(f"regime {regime!r} does not apply to kind {problem.kind!r}")
    iv = reduce_interval(problem)
    s = to_reduced(problem, r)
    if regime == "p_infty":
        base = profiles.emden_limit_p_infty(iv, s)
    elif regime == "p_one":
        base = profiles.emden_limit_p_one(iv, s)
    else:
        base = 2.0 * profiles.SQRT2 * profiles.green_1d(iv, s, iv.s0)
    return _out(_weight(problem, r) * base, r)


def _rhs(pb: AnnulusProblem, r, u):
    if pb.kind == "power_planar":
        return u**pb.parameter / r**2
    if pb.kind == "power_higher":
        return (pb.N - 2) ** 2 * u**pb.parameter / r ** (2 * (pb.N - 1))
    if pb.kind == "hardy_henon":
        return r ** (0.5 * (pb.N - 1) * (pb.parameter - 1)) * u**pb.parameter
    if pb.kind == "exp_planar":
        return pb.parameter * math.exp(u) / r**2
    return pb.parameter * (pb.N - 2) ** 2 * math.exp(u) / r ** (2 * (pb.N - 1))


def radial_residual(sol: RadialSolution, r: float, h: float = DEFAULT_FD_STEP) -> float:
    """``|-u'' - ((N-1)/r) u' [- C_N u / r^2] - rhs|`` with central differences."""
    pb = sol.problem
    if not h > 0:
        raise DomainError("h must be positive")
    if not (pb.a < r - h and r + h < pb.b):
        raise DomainError(f"stencil [{r - h}, {r + h}] leaves ({pb.a}, {pb.b})")
    um, u0, up = (eval_radial(sol, x) for x in (r - h, r, r + h))
    d2 = (up - 2.0 * u0 + um) / (h * h)
    d1 = (up - um) / (2.0 * h)
    lhs = -d2 - (pb.N - 1) / r * d1
    if pb.kind == "hardy_henon":
        lhs -= pb.c_N * u0 / r**2
    return abs(lhs - _rhs(pb, r, u0))


def rescale_scale(sol: RadialSolution) -> float:
    """``eps_p`` for power kinds, ``delta_lam`` for exp kinds."""
    if sol.problem.is_exp:
        return gelfand.delta(sol.reduced)
    return profiles.eps_p(sol.reduced)


def rescaled_window(sol: RadialSolution):
    if sol.problem.is_exp:
        return gelfand.rescaled_window(sol.reduced)
    w = profiles.rescale_emden(sol.reduced).window
    return w.a_bar, w.b_bar


def rescaled_radial_profile(sol: RadialSolution, t):
    """Blow-up rescaling around the peak radius, in reduced coordinates.

    ``t`` maps to ``s = scale*t + s0`` and ``r = from_reduced(s)``; the
    window is the image of ``(a, b)``, i.e. half-width
    ``(b_bar - a_bar) / (2 * scale)``.
    """
    if sol.problem.is_exp:
        return gelfand.rescaled_profile_gelfand(sol.reduced, t)
    return profiles.rescale_emden(sol.reduced)(t)
