import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from timemap import annulus
from timemap.annulus import (
    AnnulusProblem,
    eval_radial,
    eval_reduced,
    from_reduced,
    green_annulus,
    r0,
    radial_from_mu,
    radial_limit_profile,
    radial_residual,
    reduce_interval,
    rescaled_radial_profile,
    solve_radial,
    to_reduced,
)
from timemap.emden import Interval, solve_emden
from timemap.errors import DomainError, NoSolutionError
from timemap.gelfand import lambda_star, solution_from_mu, solve_branch
from timemap.profiles import green_1d, liouville_U, sup_distance

E = math.e
LAM_STAR_UNIT = lambda_star(Interval(0, 1))[0]

# one representative of each kind; the exp kinds sit at half their fold
INSTANCES = [
    ("power_planar", 2, 1.0, E, 3.0, None),
    ("power_higher", 3, 0.5, 1.0, 3.0, None),
    ("hardy_henon", 2, 1.0, 3.0, 3.0, None),
    ("hardy_henon", 3, 1.0, 3.0, 3.0, None),
    ("hardy_henon", 5, 1.0, 3.0, 2.0, None),
    ("exp_planar", 2, 1.0, E, LAM_STAR_UNIT / 2, "minimal"),
    ("exp_planar", 2, 1.0, E, LAM_STAR_UNIT / 2, "unstable"),
    ("exp_higher", 3, 0.5, 1.0, LAM_STAR_UNIT / 2, "minimal"),
    ("exp_higher", 4, 0.5, 1.0, 0.1, "unstable"),
]


def build(kind, N, a, b, par, branch):
    return solve_radial(AnnulusProblem(kind, N, a, b, par), branch)


class TestProblem:
    @pytest.mark.parametrize(
        "args",
        [
            ("power_planar", 3, 1, 2, 3),
            ("power_higher", 2, 1, 2, 3),
            ("hardy_henon", 0, 1, 2, 3),
            ("power_planar", 2, 0, 2, 3),
            ("power_planar", 2, 2, 1, 3),
            ("power_planar", 2, 1, 2, 1),
            ("exp_planar", 2, 1, 2, 0),
            ("cubic", 2, 1, 2, 3),
        ],
    )
    def test_invalid(self, args):
        with pytest.raises(DomainError):
            AnnulusProblem(*args)

    def test_hardy_constant(self):
        assert AnnulusProblem("hardy_henon", 3, 1, 2, 3).c_N == 0.0
        assert AnnulusProblem("hardy_henon", 5, 1, 2, 3).c_N == 2.0


class TestReduce:
    def test_planar(self):
        iv = reduce_interval(AnnulusProblem("power_planar", 2, 1.0, E, 3))
        assert (iv.a_bar, iv.b_bar) == (-1.0, -0.0)

    def test_higher(self):
        iv = reduce_interval(AnnulusProblem("power_higher", 3, 0.5, 1.0, 3))
        assert (iv.a_bar, iv.b_bar) == (1.0, 2.0)

    def test_hardy(self):
        iv = reduce_interval(AnnulusProblem("hardy_henon", 3, 1.0, 3.0, 3))
        assert (iv.a_bar, iv.b_bar) == (1.0, 3.0)

    @pytest.mark.parametrize("kind,N", [("power_planar", 2), ("power_higher", 3), ("exp_higher", 5), ("hardy_henon", 4)])
    def test_round_trip(self, kind, N):
        pb = AnnulusProblem(kind, N, 0.7, 2.3, 2.0 if kind.startswith(("power", "hardy")) else 0.1)
        r = np.linspace(0.7, 2.3, 101)
        assert np.max(np.abs(from_reduced(pb, to_reduced(pb, r)) - r)) < 1e-14


class TestSolveAndEval:
    def test_power_planar_reduces_to_emden(self):
        sol = solve_radial(AnnulusProblem("power_planar", 2, 1.0, E, 3.0))
        assert sol.reduced.xi == solve_emden(Interval(-1.0, 0.0), 3.0).xi

    def test_exp_needs_branch(self):
        with pytest.raises(DomainError):
            solve_radial(AnnulusProblem("exp_planar", 2, 1.0, E, 1.0))

    def test_power_rejects_branch(self):
        with pytest.raises(DomainError):
            solve_radial(AnnulusProblem("power_planar", 2, 1.0, E, 3.0), "minimal")

    def test_beyond_fold(self):
        with pytest.raises(NoSolutionError):
            solve_radial(AnnulusProblem("exp_planar", 2, 1.0, E, 2 * LAM_STAR_UNIT), "minimal")

    def test_branches_merge_at_fold(self):
        lam = LAM_STAR_UNIT * (1 - 1e-8)
        lo = solve_radial(AnnulusProblem("exp_planar", 2, 1.0, E, lam), "minimal").reduced.mu
        hi = solve_radial(AnnulusProblem("exp_planar", 2, 1.0, E, lam), "unstable").reduced.mu
        assert lo < hi < lo + 1e-3

    @pytest.mark.parametrize("inst", INSTANCES, ids=lambda i: f"{i[0]}-N{i[1]}-{i[5]}")
    def test_boundary_values(self, inst):
        sol = build(*inst)
        assert eval_radial(sol, inst[2]) == 0.0 and eval_radial(sol, inst[3]) == 0.0

    @pytest.mark.parametrize("inst", INSTANCES, ids=lambda i: f"{i[0]}-N{i[1]}-{i[5]}")
    def test_transform_round_trip(self, inst):
        sol = build(*inst)
        pb = sol.problem
        iv = reduce_interval(pb)
        s = iv.grid(101)
        r = from_reduced(pb, s)
        weight = r ** (-(pb.N - 1) / 2) if pb.kind == "hardy_henon" else 1.0
        assert np.max(np.abs(eval_radial(sol, r) - weight * eval_reduced(sol, to_reduced(pb, r)))) < 1e-12
        assert np.max(np.abs(to_reduced(pb, r) - s)) < 1e-12 * max(1.0, abs(iv.b_bar))

    def test_planar_peak_at_geometric_mean(self):
        sol = solve_radial(AnnulusProblem("power_planar", 2, 1.0, 4.0, 3.0))
        r = np.linspace(1.0, 4.0, 3001)
        u = eval_radial(sol, r)
        assert abs(r[np.argmax(u)] - 2.0) < 2e-3
        assert eval_radial(sol, 2.0) == pytest.approx(sol.reduced.xi, rel=1e-14)

    def test_higher_peak_at_r0(self):
        sol = solve_radial(AnnulusProblem("power_higher", 3, 0.5, 1.0, 3.0))
        assert eval_radial(sol, r0(3, 0.5, 1.0)) == pytest.approx(sol.reduced.xi, rel=1e-14)

    def test_out_of_range(self):
        sol = solve_radial(AnnulusProblem("power_planar", 2, 1.0, E, 3.0))
        with pytest.raises(DomainError):
            eval_radial(sol, 0.5)

    def test_radial_from_mu(self):
        sol = radial_from_mu(AnnulusProblem("exp_planar", 2, 1.0, E, 1.0), 20.0)
        assert sol.reduced.mu == 20.0 and sol.problem.parameter == sol.reduced.lam


class TestGreenAnnulus:
    def test_zero_at_inner_radius(self):
        assert green_annulus(3, 0.5, 1.0, 0.5, 0.7) == 0.0
        assert green_annulus(2, 1.0, 2.0, 2.0, 1.5) == 0.0

    def test_planar_value(self):
        r = math.sqrt(E**2)
        assert green_annulus(2, 1.0, E**2, r, r) == pytest.approx(E / 2, rel=1e-15)

    @given(st.floats(1.0, E), st.floats(1.0, E))
    def test_planar_pullback(self, r, s):
        iv = Interval(-1.0, 0.0)
        expected = s * green_1d(iv, -math.log(r), -math.log(s))
        assert green_annulus(2, 1.0, E, r, s) == pytest.approx(expected, abs=1e-12)

    @given(st.floats(0.5, 1.0), st.floats(0.5, 1.0), st.sampled_from([3, 4, 6]))
    def test_higher_pullback(self, r, s, N):
        e = 2 - N
        iv = Interval(1.0, 0.5**e)
        expected = s ** (N - 1) / (N - 2) * green_1d(iv, r**e, s**e)
        assert green_annulus(N, 0.5, 1.0, r, s) == pytest.approx(expected, rel=1e-12, abs=1e-12)

    @given(st.floats(0.55, 0.95))
    def test_continuity(self, s):
        left = green_annulus(3, 0.5, 1.0, s * (1 - 1e-13), s)
        right = green_annulus(3, 0.5, 1.0, s * (1 + 1e-13), s)
        assert left == pytest.approx(right, abs=1e-12)

    def test_is_greens_function(self):
        # v(r) = int G(r, s) ds solves -v'' - ((N-1)/r) v' = 1 with v(a) = v(b) = 0
        N, a, b = 3, 0.5, 1.0
        s = np.linspace(a, b, 40001)
        v = lambda r: np.trapezoid(green_annulus(N, a, b, r, s), s)
        r, h = 0.7, 1e-3
        lhs = -(v(r + h) - 2 * v(r) + v(r - h)) / h**2 - (N - 1) / r * (v(r + h) - v(r - h)) / (2 * h)
        assert lhs == pytest.approx(1.0, rel=1e-4)

    def test_out_of_range(self):
        with pytest.raises(DomainError):
            green_annulus(3, 0.5, 1.0, 1.2, 0.7)
        with pytest.raises(DomainError):
            green_annulus(1, 0.5, 1.0, 0.7, 0.7)


class TestR0:
    def test_values(self):
        assert r0(2, 1.0, 4.0) == 2.0
        assert r0(3, 0.5, 1.0) == pytest.approx(2 / 3, rel=1e-15)

    @given(st.integers(2, 8), st.floats(0.1, 5.0), st.floats(1.01, 10.0))
    def test_between(self, N, a, ratio):
        assert a < r0(N, a, a * ratio) < a * ratio


class TestLimitProfiles:
    def test_planar_tent_peak(self):
        pb = AnnulusProblem("power_planar", 2, 1.0, E, 3.0)
        assert radial_limit_profile(pb, "p_infty", math.sqrt(E)) == pytest.approx(1.0, rel=1e-15)

    @pytest.mark.parametrize("N", [2, 3, 4])
    def test_hardy_tent_peak(self, N):
        pb = AnnulusProblem("hardy_henon", N, 1.0, 3.0, 3.0)
        assert radial_limit_profile(pb, "p_infty", 2.0) == pytest.approx(2.0 ** (-(N - 1) / 2), rel=1e-15)

    def test_exp_vanishes_at_wall(self):
        pb = AnnulusProblem("exp_planar", 2, 1.0, E, 1.0)
        assert radial_limit_profile(pb, "lambda_zero", 1.0) == 0.0

    def test_sine_factor(self):
        pb = AnnulusProblem("power_planar", 2, 1.0, E, 3.0)
        r = math.exp(0.25)
        expected = math.sin(math.pi * (1 - 0.25))
        assert radial_limit_profile(pb, "p_one", r) == pytest.approx(expected, rel=1e-14)

    @pytest.mark.parametrize(
        "kind,regime", [("power_planar", "lambda_zero"), ("exp_planar", "p_infty"), ("power_planar", "fast")]
    )
    def test_incompatible(self, kind, regime):
        pb = AnnulusProblem(kind, 2, 1.0, E, 2.0)
        with pytest.raises(DomainError):
            radial_limit_profile(pb, regime, 1.5)

    @pytest.mark.parametrize(
        "kind,N,a,b", [("power_planar", 2, 1.0, E), ("power_higher", 3, 0.5, 1.0), ("hardy_henon", 3, 1.0, 3.0)]
    )
    def test_global_limit_decreasing(self, kind, N, a, b):
        dist = []
        for p in (20.0, 50.0, 100.0, 200.0):
            pb = AnnulusProblem(kind, N, a, b, p)
            sol = solve_radial(pb)
            dist.append(
                sup_distance(
                    lambda r: eval_radial(sol, r), lambda r: radial_limit_profile(pb, "p_infty", r), Interval(a, b)
                )
            )
        assert all(y < x for x, y in zip(dist, dist[1:]))
        assert dist[-1] < 0.1

    def test_sine_limit_near_one(self):
        pb = AnnulusProblem("power_planar", 2, 1.0, E, 1.05)
        sol = solve_radial(pb)
        d = sup_distance(
            lambda r: eval_radial(sol, r) / sol.reduced.xi,
            lambda r: radial_limit_profile(pb, "p_one", r),
            Interval(1.0, E),
        )
        assert d < 0.05

    def test_gelfand_global(self):
        pb = AnnulusProblem("exp_higher", 3, 0.5, 1.0, 1.0)
        sol = radial_from_mu(pb, 20.0)
        dl = annulus.rescale_scale(sol)
        d = sup_distance(
            lambda r: dl * eval_radial(sol, r), lambda r: radial_limit_profile(pb, "lambda_zero", r), Interval(0.5, 1.0)
        )
        assert d < 0.1


class TestResidual:
    @pytest.mark.parametrize("inst", INSTANCES, ids=lambda i: f"{i[0]}-N{i[1]}-{i[5]}")
    def test_ten_interior_points(self, inst):
        sol = build(*inst)
        a, b = inst[2], inst[3]
        for r in np.linspace(a, b, 12)[1:-1]:
            assert radial_residual(sol, r) < 1e-3

    def test_planar_sample_point(self):
        sol = solve_radial(AnnulusProblem("power_planar", 2, 1.0, E, 3.0))
        assert radial_residual(sol, math.sqrt(E) * 1.1, 1e-4) < 1e-3

    def test_wrong_weight_fails(self):
        # the same W with the weight r^{+(N-1)/2} does not solve the hardy problem
        pb = AnnulusProblem("hardy_henon", 2, 1.0, 3.0, 3.0)
        sol = solve_radial(pb)
        h, r = 1e-4, 2.4
        u = lambda x: x**0.5 * eval_reduced(sol, x)
        lhs = -(u(r + h) - 2 * u(r) + u(r - h)) / h**2 - (u(r + h) - u(r - h)) / (2 * h) / r + 0.25 * u(r) / r**2
        assert abs(lhs - r**1.0 * u(r) ** 3) > 1e-1

    def test_stencil_outside(self):
        sol = solve_radial(AnnulusProblem("power_planar", 2, 1.0, E, 3.0))
        with pytest.raises(DomainError):
            radial_residual(sol, 1.00001, 1e-4)
        with pytest.raises(DomainError):
            radial_residual(sol, 1.5, 0.0)


class TestRescaledRadial:
    def test_peak(self):
        sol = solve_radial(AnnulusProblem("power_planar", 2, 1.0, E, 3.0))
        assert rescaled_radial_profile(sol, 0.0) == 0.0

    def test_planar_p200_near_liouville(self):
        sol = solve_radial(AnnulusProblem("power_planar", 2, 1.0, E, 200.0))
        d = sup_distance(lambda t: rescaled_radial_profile(sol, t), liouville_U, Interval(-4, 4))
        assert d < 0.05

    def test_matches_direct_radial_formula(self):
        # u(exp(-(eps t + s0))) rescaled by hand
        pb = AnnulusProblem("power_planar", 2, 1.0, E, 20.0)
        sol = solve_radial(pb)
        eps, xi, s0 = annulus.rescale_scale(sol), sol.reduced.xi, -0.5
        for t in (-3.0, 0.5, 2.0):
            direct = 20.0 / xi * (eval_radial(sol, math.exp(-(eps * t + s0))) - xi)
            assert rescaled_radial_profile(sol, t) == pytest.approx(direct, abs=1e-9)

    def test_hardy_weighted_peak_is_xi(self):
        pb = AnnulusProblem("hardy_henon", 4, 1.0, 3.0, 3.0)
        sol = solve_radial(pb)
        r = np.linspace(1.0, 3.0, 2001)
        weighted = r ** (1.5) * eval_radial(sol, r)
        assert weighted.max() == pytest.approx(sol.reduced.xi, rel=1e-12)

    def test_window_is_half_log_width(self):
        sol = solve_radial(AnnulusProblem("power_planar", 2, 1.0, E, 10.0))
        lo, hi = annulus.rescaled_window(sol)
        eps = annulus.rescale_scale(sol)
        assert hi == pytest.approx(0.5 / eps, rel=1e-14) and lo == pytest.approx(-0.5 / eps, rel=1e-14)

    def test_exp_kind(self):
        sol = radial_from_mu(AnnulusProblem("exp_planar", 2, 1.0, E, 1.0), 10.0)
        assert rescaled_radial_profile(sol, 1.0) == pytest.approx(liouville_U(1.0), abs=1e-12)

    def test_outside_window(self):
        sol = solve_radial(AnnulusProblem("power_planar", 2, 1.0, E, 3.0))
        _, hi = annulus.rescaled_window(sol)
        with pytest.raises(DomainError):
            rescaled_radial_profile(sol, 2 * hi)


class TestAsymptoticNotes:
    def test_peak_bounded_for_large_p(self):
        for p in (20.0, 50.0, 200.0, 1e4):
            assert solve_radial(AnnulusProblem("power_planar", 2, 1.0, E, p)).reduced.xi <= 1.5

    def test_thin_annulus_blow_up(self):
        xi = [solve_radial(AnnulusProblem("power_planar", 2, 1.0, E, p)).reduced.xi for p in (1.1, 1.05, 1.01)]
        assert xi[0] < xi[1] < xi[2]
        assert xi[2] > 1e3
