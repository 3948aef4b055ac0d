"""Command-line front end emitting CSV tables.

Subcommands: ``norms``, ``profile``, ``bifurcation``, ``converge``,
``residual``.  Without ``--kind`` the 1-D problems on ``(--a, --b)`` are
used (default ``(0, 1)``); with an annulus kind the default annulus is
``(1, e)``.  A JSON file given by ``--config`` supplies defaults for any
flag; flags on the command line win.

Exit codes: 0 success, 1 ``converge`` found a non-decreasing sequence,
2 usage error, 3 numerical failure or no solution.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import annulus, gelfand, oracle, profiles
from .emden import Interval, eval_W, lq_norm_power, solve_emden
from .errors import DomainError, NumericError

EXIT_OK = 0
EXIT_NOT_DECREASING = 1
EXIT_USAGE = 2
EXIT_NUMERIC = 3

COMMANDS = ("norms", "profile", "bifurcation", "converge", "residual")
DEFAULT_GRID = profiles.DEFAULT_GRID
DEFAULT_BIFURCATION_SAMPLES = 200
DEFAULT_RESIDUAL_POINTS = 10


class UsageError(Exception):
    pass


def _floats(text):
    if isinstance(text, (list, tuple)):
        return [float(v) for v in text]
    if isinstance(text, (int, float)):
        return [float(text)]
    parts = [t for t in str(text).replace(" ", ",").split(",") if t]
    try:
        return [float(t) for t in parts]
    except ValueError:
        raise UsageError(f"cannot parse number list {text!r}") from None


@dataclass
class RunConfig:
    command: str
    kind: Optional[str] = None
    N: Optional[int] = None
    a: Optional[float] = None
    b: Optional[float] = None
    p: Optional[float] = None
    lam: Optional[float] = None
    branch: Optional[str] = None
    q: Optional[list] = None
    sweep: Optional[list] = None
    grid: Optional[int] = None
    window: Optional[list] = None
    out: Optional[str] = None
    mu: Optional[float] = None
    regime: Optional[str] = None
    format: str = "csv"

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise UsageError(f"unknown command {self.command!r}")
        if self.kind is not None and self.kind not in annulus.KINDS:
            raise UsageError(f"unknown kind {self.kind!r}")
        if self.branch is not None and self.branch not in ("minimal", "unstable"):
            raise UsageError(f"unknown branch {self.branch!r}")
        if self.regime is not None and self.regime not in annulus.REGIMES + ("local",):
            raise UsageError(f"unknown regime {self.regime!r}")
        if self.grid is not None and self.grid < 2:
            raise UsageError("--grid must be at least 2")
        if self.window is not None and (len(self.window) != 2 or not self.window[0] < self.window[1]):
            raise UsageError("--window needs two increasing numbers lo,hi")
        if self.format != "csv":
            raise UsageError("only csv output is supported")
        if self.kind is not None and self.N is None:
            self.N = 2 if self.kind.endswith("_planar") else 3
        if self.a is None and self.b is None:
            self.a, self.b = (0.0, 1.0) if self.kind is None else (1.0, math.e)
        if self.a is None or self.b is None:
            raise UsageError("give both --a and --b")

    @property
    def is_exp(self) -> bool:
        return self.kind in annulus.EXP_KINDS


class _Target:
    """The 1-D problem on ``(a, b)`` or an annulus problem, behind one interface.

    ``x`` is the sampling variable: ``s`` for the bare problem, ``r`` for
    an annulus.
    """

    def __init__(self, cfg: RunConfig):
        self.cfg = cfg
        if cfg.kind is None:
            self.interval = Interval(cfg.a, cfg.b)
        else:
            self.interval = annulus.reduce_interval(self._problem(2.0 if cfg.kind in annulus.POWER_KINDS else 1.0))
        self.x_range = (cfg.a, cfg.b)

    def _problem(self, parameter):
        c = self.cfg
        return annulus.AnnulusProblem(c.kind, c.N, c.a, c.b, parameter)

    def solve_power(self, p):
        if self.cfg.kind is None:
            return solve_emden(self.interval, p)
        if self.cfg.is_exp:
            raise UsageError(f"kind {self.cfg.kind} has no exponent p")
        return annulus.solve_radial(self._problem(p))

    def solve_exp(self, lam=None, branch=None, mu=None):
        kind = self.cfg.kind
        if kind is not None and not self.cfg.is_exp:
            raise UsageError(f"kind {kind} is not an exponential problem")
        if mu is not None:
            if kind is None:
                return gelfand.solution_from_mu(self.interval, mu)
            return annulus.radial_from_mu(self._problem(1.0), mu)
        if lam is None or branch is None:
            raise UsageError("exponential problems need --mu, or --lambda with --branch")
        if kind is None:
            return gelfand.solve_branch(self.interval, lam, branch)
        return annulus.solve_radial(self._problem(lam), branch)

    def reduced(self, sol):
        return sol if self.cfg.kind is None else sol.reduced

    def eval(self, sol, x):
        if self.cfg.kind is not None:
            return annulus.eval_radial(sol, x)
        if isinstance(sol, gelfand.GelfandSolution):
            return gelfand.eval_W_gelfand(sol, x)
        return eval_W(sol, x)

    def limit(self, regime, x):
        if self.cfg.kind is None:
            iv = self.interval
            if regime == "p_infty":
                return profiles.emden_limit_p_infty(iv, x)
            if regime == "p_one":
                return profiles.emden_limit_p_one(iv, x)
            return 2.0 * profiles.SQRT2 * profiles.green_1d(iv, x, iv.s0)
        return annulus.radial_limit_profile(self._problem(2.0 if regime != "lambda_zero" else 1.0), regime, x)

    def scaled(self, sol, regime):
        """The quantity that converges to ``limit(regime, .)``, as a callable of ``x``."""
        red = self.reduced(sol)
        if regime == "p_infty":
            return lambda x: self.eval(sol, x)
        if regime == "p_one":
            return lambda x: self.eval(sol, x) / red.xi
        dl = gelfand.delta(red)
        return lambda x: dl * self.eval(sol, x)

    def local(self, sol):
        red = self.reduced(sol)
        if isinstance(red, gelfand.GelfandSolution):
            return lambda t: gelfand.rescaled_profile_gelfand(red, t)
        return profiles.rescale_emden(red)

    def x_grid(self, n, window=None):
        lo, hi = self.x_range
        if window is not None:
            if window[0] < lo or window[1] > hi:
                raise UsageError(f"sampling range {window} leaves [{lo}, {hi}]")
            lo, hi = window
        return np.linspace(lo, hi, n)


def _default_regime(cfg):
    bare_exp = cfg.kind is None and cfg.p is None and (cfg.mu is not None or cfg.lam is not None)
    return "lambda_zero" if cfg.is_exp or bare_exp else "p_infty"


def _regime(cfg, allow_local):
    """Chosen regime and whether it concerns the exponential problem."""
    regime = cfg.regime or _default_regime(cfg)
    if regime == "local":
        if not allow_local:
            raise UsageError("profile compares global profiles; use converge for the local regime")
        return regime, cfg.is_exp
    if regime == "lambda_zero":
        if cfg.kind is not None and not cfg.is_exp:
            raise UsageError(f"regime lambda_zero does not apply to kind {cfg.kind}")
        return regime, True
    if cfg.is_exp:
        raise UsageError(f"regime {regime} does not apply to kind {cfg.kind}")
    return regime, False


def cmd_norms(cfg: RunConfig):
    if cfg.is_exp:
        raise UsageError("norms applies to power problems")
    ps = cfg.sweep if cfg.sweep is not None else ([cfg.p] if cfg.p is not None else None)
    if not ps:
        raise UsageError("norms needs --p or --sweep")
    if any(not p > 1 for p in ps):
        raise UsageError("every p must exceed 1")
    qs = cfg.q if cfg.q is not None else ["p"]
    if not qs:
        raise UsageError("q list is empty")
    target = _Target(cfg)
    iv = target.interval
    n = cfg.grid or DEFAULT_GRID
    rows = []
    for p in ps:
        sol = solve_emden(iv, p)
        for q_spec in qs:
            q = p if q_spec == "p" else float(q_spec)
            if not q > 0:
                raise UsageError(f"q must be positive, got {q}")
            value = lq_norm_power(sol, q) ** (1.0 / q)
            ref, _ = oracle.oracle_lq_norm(iv, p, q, n=n if n % 2 else n + 1)
            rows.append((p, q, sol.xi, value, ref, abs(value - ref) / abs(ref)))
    return ["p", "q", "xi_p", "lq_norm", "oracle_lq", "rel_err"], rows, []


def cmd_profile(cfg: RunConfig):
    target = _Target(cfg)
    regime, exp_problem = _regime(cfg, allow_local=False)
    if exp_problem:
        sol = target.solve_exp(cfg.lam, cfg.branch, cfg.mu)
    else:
        if cfg.p is None:
            raise UsageError("profile needs --p")
        sol = target.solve_power(cfg.p)
    x = target.x_grid(cfg.grid or DEFAULT_GRID, cfg.window)
    u = np.asarray(target.scaled(sol, regime)(x), dtype=float)
    lim = np.asarray(target.limit(regime, x), dtype=float)
    rows = list(zip(x, u, lim, np.abs(u - lim)))
    name = "r" if cfg.kind is not None else "s"
    return [name, "u", "limit", "abs_err"], rows, []


def cmd_bifurcation(cfg: RunConfig):
    if cfg.kind is not None and not cfg.is_exp:
        raise UsageError("bifurcation needs an exponential kind or a bare interval")
    if cfg.sweep is not None:
        mus = cfg.sweep
        if not mus:
            raise UsageError("empty sweep list")
    else:
        mus = np.geomspace(1e-3, 50.0, cfg.grid or DEFAULT_BIFURCATION_SAMPLES).tolist()
    if any(not m > 0 for m in mus):
        raise UsageError("peak values must be positive")
    iv = _Target(cfg).interval
    diag = gelfand.bifurcation_diagram(iv, mus)
    comment = [f"lambda_star={diag.lambda_star:.17g}", f"mu_star={diag.mu_star:.17g}"]
    return ["mu", "lambda"], diag.samples, comment


def _strictly_monotone(values):
    d = np.diff(values)
    return bool(np.all(d > 0) or np.all(d < 0))


def cmd_converge(cfg: RunConfig):
    if not cfg.sweep:
        raise UsageError("converge needs --sweep")
    if len(cfg.sweep) > 1 and not _strictly_monotone(cfg.sweep):
        raise UsageError("sweep list must be strictly monotone")
    target = _Target(cfg)
    regime, exp_problem = _regime(cfg, allow_local=True)
    n = cfg.grid or DEFAULT_GRID
    rows = []
    for param in cfg.sweep:
        # exponential problems are swept along the peak value mu
        sol = target.solve_exp(mu=param) if exp_problem else target.solve_power(param)
        if regime == "local":
            lo, hi = cfg.window or profiles.LOCAL_WINDOW
            dist = profiles.sup_distance(target.local(sol), profiles.liouville_U, Interval(lo, hi), n)
        else:
            grid_iv = Interval(*target.x_range)
            dist = profiles.sup_distance(target.scaled(sol, regime), lambda x: target.limit(regime, x), grid_iv, n)
        rows.append((param, dist))
    dists = [r[1] for r in rows]
    decreasing = all(b < a for a, b in zip(dists, dists[1:]))
    return ["parameter", "sup_distance"], rows, [f"strictly_decreasing={str(decreasing).lower()}"], decreasing


def cmd_residual(cfg: RunConfig):
    if cfg.kind is None:
        raise UsageError("residual needs --kind")
    target = _Target(cfg)
    if cfg.is_exp:
        sol = target.solve_exp(cfg.lam, cfg.branch, cfg.mu)
    else:
        if cfg.p is None:
            raise UsageError("residual needs --p")
        sol = target.solve_power(cfg.p)
    k = cfg.grid or DEFAULT_RESIDUAL_POINTS
    rs = np.linspace(cfg.a, cfg.b, k + 2)[1:-1]
    rows = [(r, annulus.radial_residual(sol, r)) for r in rs]
    return ["r", "residual"], rows, [f"max_residual={max(v for _, v in rows):.17g}"]


def _format(value):
    if isinstance(value, (float, np.floating)):
        return "%.17g" % value
    return str(value)


def render_csv(header, rows, comments) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_format(v) for v in row])
    for c in comments:
        buf.write(f"# {c}\n")
    return buf.getvalue()


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--kind", choices=annulus.KINDS)
    common.add_argument("--N", type=int)
    common.add_argument("--a", type=float)
    common.add_argument("--b", type=float)
    common.add_argument("--p", type=float)
    common.add_argument("--lambda", dest="lam", type=float)
    common.add_argument("--branch", choices=("minimal", "unstable"))
    common.add_argument("--mu", type=float, help="peak value selecting an exponential solution")
    common.add_argument("--q", help="comma list of exponents; 'p' means q = p")
    common.add_argument("--sweep", help="comma list of parameter values")
    common.add_argument("--grid", type=int)
    common.add_argument("--window", help="lo,hi sampling range")
    common.add_argument("--regime", choices=annulus.REGIMES + ("local",))
    common.add_argument("--out", help="output file (default: standard output)")
    common.add_argument("--config", help="JSON file with defaults for any flag")
    parser = argparse.ArgumentParser(prog="timemap", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sub.add_parser(name, parents=[common])
    return parser


_CONFIG_KEYS = {"kind", "N", "a", "b", "p", "lambda", "lam", "branch", "mu", "q", "sweep", "grid", "window", "regime", "out", "format"}


def _load_config(path):
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from None
    if not isinstance(data, dict):
        raise UsageError("config file must hold a JSON object")
    unknown = set(data) - _CONFIG_KEYS
    if unknown:
        raise UsageError(f"unknown config keys: {', '.join(sorted(unknown))}")
    if "lambda" in data:
        data["lam"] = data.pop("lambda")
    return data


def make_config(args: argparse.Namespace) -> RunConfig:
    merged = _load_config(args.config) if args.config else {}
    for key in ("kind", "N", "a", "b", "p", "lam", "branch", "mu", "q", "sweep", "grid", "window", "regime", "out"):
        val = getattr(args, key)
        if val is not None:
            merged[key] = val
    if merged.get("q") is not None:
        q = merged["q"]
        items = q if isinstance(q, list) else str(q).replace(" ", ",").split(",")
        merged["q"] = ["p" if str(v).strip() == "p" else _floats(v)[0] for v in items if str(v).strip()]
    if merged.get("sweep") is not None:
        merged["sweep"] = _floats(merged["sweep"])
    if merged.get("window") is not None:
        merged["window"] = _floats(merged["window"])
    try:
        return RunConfig(command=args.command, **merged)
    except TypeError as exc:
        raise UsageError(str(exc)) from None


def run(cfg: RunConfig):
    """Execute a command; returns ``(csv_text, exit_code)``."""
    handler = {
        "norms": cmd_norms,
        "profile": cmd_profile,
        "bifurcation": cmd_bifurcation,
        "converge": cmd_converge,
        "residual": cmd_residual,
    }[cfg.command]
    result = handler(cfg)
    code = EXIT_OK
    if cfg.command == "converge":
        header, rows, comments, decreasing = result
        code = EXIT_OK if decreasing else EXIT_NOT_DECREASING
    else:
        header, rows, comments = result
    return render_csv(header, rows, comments), code


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = make_config(args)
        text, code = run(cfg)
    except (UsageError, DomainError) as exc:
        print(f"timemap: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NumericError as exc:
        print(f"timemap: numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
