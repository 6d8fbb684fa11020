import math
import random

import pytest

from mvtkit import (
    BoundaryConditionError,
    CascadeWitness,
    MvtProblem,
    NonFiniteEvaluation,
    ResidualEvaluator,
    SolveStatus,
    SolverConfig,
    Theorem,
    cascade_solve,
    find_roots,
    parse,
    poly_source,
    residual,
    solve,
)

TWO_PI = 2 * math.pi


class TestFindRoots:
    def test_single_quadratic_root(self):
        scan = find_roots(lambda x: x * x - 0.25, 0.0, 1.0, grid=16)
        assert not scan.degenerate
        assert len(scan.roots) == 1
        assert scan.roots[0] == pytest.approx(0.5, abs=1e-12)

    def test_flett_point_of_sine(self):
        scan = find_roots(
            lambda x: x * math.cos(x) - math.sin(x), 1e-6, TWO_PI, grid=1024
        )
        assert len(scan.roots) == 1
        assert scan.roots[0] == pytest.approx(4.493409457909064, abs=1e-9)

    def test_identically_zero_is_degenerate(self):
        scan = find_roots(lambda x: 0.0, 0.0, 1.0, grid=16)
        assert scan.degenerate
        assert scan.roots == ()

    def test_flat_below_threshold_is_degenerate(self):
        scan = find_roots(
            lambda x: 1e-14, 0.0, 1.0, grid=16, degenerate_threshold=1e-11
        )
        assert scan.degenerate

    def test_exact_zero_at_grid_point(self):
        # 0.5 lands exactly on the 16-cell grid of [0, 1]
        scan = find_roots(lambda x: (x - 0.5) ** 2, 0.0, 1.0, grid=16)
        assert scan.roots == (0.5,)

    def test_roots_come_back_ascending(self):
        scan = find_roots(lambda x: math.sin(x), 0.1, 3.5 * math.pi, grid=512)
        assert list(scan.roots) == sorted(scan.roots)
        assert len(scan.roots) == 3

    def test_non_finite_value_reported_with_location(self):
        def fn(x):
            return float("inf") if x == 0.5 else x - 0.4

        with pytest.raises(NonFiniteEvaluation) as err:
            find_roots(fn, 0.0, 1.0, grid=2)
        assert err.value.x == pytest.approx(0.5)

    def test_preconditions(self):
        with pytest.raises(ValueError):
            find_roots(lambda x: x, 1.0, 0.0)
        with pytest.raises(ValueError):
            find_roots(lambda x: x, 0.0, 1.0, grid=1)

    def test_noise_floor_suppresses_cancellation_dust(self):
        # simulate a trivial-root basin: exact zeros near lo only
        def fn(x):
            return 0.0 if x < 0.05 else x - 0.5

        scan = find_roots(fn, 0.0, 1.0, grid=64)
        assert scan.roots == (0.5,)


class TestSolve:
    def test_flett_cubic(self):
        w = solve(MvtProblem(Theorem.FLETT, "x^3 - x", -1.0, 1.0))
        assert w.status is SolveStatus.FOUND
        assert w.eta == pytest.approx(0.5, abs=1e-9)
        assert w.boundary_ok
        assert w.root_policy == "leftmost"

    def test_flett_sine_over_full_period(self):
        w = solve(MvtProblem(Theorem.FLETT, "sin(x)", 0.0, TWO_PI))
        assert w.status is SolveStatus.FOUND
        assert w.eta == pytest.approx(4.493409457909064, abs=1e-9)

    def test_pawlikowska_quartic(self):
        w = solve(MvtProblem(Theorem.PAWLIKOWSKA, "x^4", -1.0, 1.0, n=2))
        assert w.status is SolveStatus.FOUND
        assert w.eta == pytest.approx(1 / 3, abs=1e-9)

    def test_unconstrained_variant_cubic(self):
        w = solve(MvtProblem(Theorem.UNCONSTRAINED, "x^3", 0.0, 1.0, n=1))
        assert w.status is SolveStatus.FOUND
        assert w.eta == pytest.approx(0.75, abs=1e-9)

    def test_riedel_sahoo_quadratic_is_degenerate(self):
        w = solve(MvtProblem(Theorem.RIEDEL_SAHOO, "x^2", 0.0, 1.0))
        assert w.status is SolveStatus.DEGENERATE_ALL_POINTS
        assert w.eta is None

    def test_two_function_example(self):
        p = MvtProblem(Theorem.TWO_FUNCTION, "x^2", 0.0, 1.0, n=1, g=parse("x^3"))
        w = solve(p)
        assert w.status is SolveStatus.FOUND
        assert w.eta == pytest.approx(0.75, abs=1e-9)

    def test_found_invariants(self):
        for p in (
            MvtProblem(Theorem.FLETT, "x^3 - x", -1.0, 1.0),
            MvtProblem(Theorem.PAWLIKOWSKA, "x^4", -1.0, 1.0, n=2),
            MvtProblem(Theorem.UNCONSTRAINED, "x^3", 0.0, 1.0, n=1),
        ):
            cfg = SolverConfig()
            w = solve(p, cfg)
            assert w.status is SolveStatus.FOUND
            assert p.a < w.eta < p.b
            assert abs(w.residual_at_eta) <= cfg.solve_tol * w.scale
            assert abs(residual(p, w.eta)) <= cfg.solve_tol * w.scale

    def test_leftmost_policy_with_multiple_roots(self):
        # two interior tangency points of sin on a double period
        w = solve(MvtProblem(Theorem.FLETT, "sin(x)", 0.0, 2 * TWO_PI))
        assert len(w.all_roots) >= 2
        assert w.eta == pytest.approx(4.493409457909064, abs=1e-9)
        assert w.eta == min(w.all_roots)

    def test_linear_function_is_degenerate_for_flett(self):
        w = solve(MvtProblem(Theorem.FLETT, "2*x + 1", 0.0, 1.0))
        assert w.status is SolveStatus.DEGENERATE_ALL_POINTS

    def test_boundary_violation_is_flagged_not_fatal(self):
        # f' disagrees at the endpoints; no witness for x^2 on [0, 1]
        w = solve(MvtProblem(Theorem.FLETT, "x^2", 0.0, 1.0))
        assert not w.boundary_ok
        assert w.boundary_gap == pytest.approx(2.0)
        assert w.status is SolveStatus.NOT_FOUND

    def test_boundary_violation_with_root_still_found(self):
        # x^3 on [-1, 2]: f'(-1) = 3 != f'(2) = 12, yet the tangency
        # defect (x+1)^2 (2x-1) still vanishes inside the interval
        w = solve(MvtProblem(Theorem.FLETT, "x^3", -1.0, 2.0))
        assert not w.boundary_ok
        assert w.status is SolveStatus.FOUND
        assert w.eta == pytest.approx(0.5, abs=1e-9)

    def test_custom_grid_config(self):
        w = solve(MvtProblem(Theorem.FLETT, "x^3 - x", -1.0, 1.0), SolverConfig(grid=64))
        assert w.eta == pytest.approx(0.5, abs=1e-9)
        assert w.grid_used == 64


class TestCascade:
    def test_quartic_two_stages(self):
        cw = cascade_solve("x^4", -1.0, 1.0, 2)
        assert len(cw.chain) == 1
        assert cw.chain[0] == pytest.approx(0.5, abs=1e-9)
        assert cw.eta == pytest.approx(1 / 3, abs=1e-9)
        assert cw.final_residual <= 1e-8 * cw.scale
        assert not cw.degenerate_stages

    def test_single_stage_matches_flett_solve(self):
        w = solve(MvtProblem(Theorem.FLETT, "x^3 - x", -1.0, 1.0))
        cw = cascade_solve("x^3 - x", -1.0, 1.0, 1)
        assert cw.chain == ()
        assert cw.eta == pytest.approx(w.eta, abs=1e-10)

    def test_unconstrained_single_stage_matches_direct_solve(self):
        w = solve(MvtProblem(Theorem.UNCONSTRAINED, "x^3", 0.0, 1.0, n=1))
        cw = cascade_solve("x^3", 0.0, 1.0, 1, unconstrained=True)
        assert cw.eta == pytest.approx(0.75, abs=1e-9)
        assert cw.eta == pytest.approx(w.eta, abs=1e-10)

    def test_boundary_condition_required_when_constrained(self):
        with pytest.raises(BoundaryConditionError):
            cascade_solve("x^3", 0.0, 1.0, 1, unconstrained=False)

    def test_unconstrained_needs_no_boundary_condition(self):
        cw = cascade_solve("x^3", 0.0, 1.0, 2, unconstrained=True)
        assert 0.0 < cw.eta < cw.chain[0] < 1.0

    def test_stage_derivative_conditions(self):
        cw = cascade_solve("x^4", -1.0, 1.0, 2)
        for value in cw.stage_prev_derivs:
            assert value <= 1e-9 * cw.scale
        for value in cw.identity_residuals:
            assert value <= 1e-9 * cw.scale

    def test_nesting_on_random_constrained_polys(self):
        from mvtkit import GeneratorSpec, draw_constrained_poly

        rng = random.Random(3)
        for case in range(30):
            n = 1 + case % 4
            spec = GeneratorSpec(
                n=n, degree=n + 1 + case % 6, seed=rng.randrange(2**32)
            )
            drawn = draw_constrained_poly(spec)
            cw = cascade_solve(drawn.expr, -1.0, 1.0, n)
            points = (1.0, *cw.chain, cw.eta, -1.0)
            assert all(x > y for x, y in zip(points, points[1:]))

    def test_degenerate_stage_continues_from_midpoint(self):
        # effective degree <= n: every stage equation vanishes identically
        cw = cascade_solve("x^2 - 3*x", -1.0, 1.0, 2)
        assert cw.degenerate_stages == (1, 2)
        assert -1.0 < cw.eta < cw.chain[0] < 1.0
        assert cw.final_residual == pytest.approx(0.0, abs=1e-14)

    def test_invalid_nesting_rejected_by_type(self):
        with pytest.raises(ValueError, match="nested"):
            CascadeWitness(
                a=0.0,
                b=1.0,
                chain=(0.8,),
                eta=0.9,
                stage_residuals=(0.0, 0.0),
                stage_prev_derivs=(0.0, 0.0),
                identity_residuals=(0.0, 0.0),
                final_residual=0.0,
                degenerate_stages=(),
                unconstrained=False,
                iterations=0,
                scale=1.0,
            )


class TestTrahanGuarantee:
    def test_satisfied_condition_implies_witness(self):
        # whenever the order-n product is strictly positive, a witness of
        # the order-n equation exists even without the equal-derivative
        # hypothesis; the solve (boundary flag merely advisory) must find it
        from mvtkit import poly_source as ps
        from mvtkit import trahan_check_general

        rng = random.Random(77)
        checked = 0
        while checked < 30:
            n = 1 + checked % 3
            coeffs = [rng.uniform(-1, 1) for _ in range(n + 3)]
            f = parse(ps(coeffs))
            report = trahan_check_general(f, -1.0, 1.0, n)
            if not report.satisfied or report.product <= 1e-9:
                continue
            w = solve(MvtProblem(Theorem.PAWLIKOWSKA, f, -1.0, 1.0, n=n))
            assert w.status is SolveStatus.FOUND
            assert -1.0 < w.eta < 1.0
            checked += 1


class TestScanQuality:
    def test_trivial_root_basin_not_reported(self):
        # the defect of any constrained problem vanishes at a with high
        # multiplicity; the solver must not return points glued to a
        rng = random.Random(51)
        for _ in range(20):
            coeffs = [rng.uniform(-1, 1) for _ in range(5)]
            src = poly_source(coeffs)
            p = MvtProblem(Theorem.PAWLIKOWSKA, src, -1.0, 1.0, n=2)
            w = solve(p)
            if w.status is SolveStatus.FOUND:
                assert w.eta > -1.0 + 1e-6

    def test_noise_guard_on_transcendental(self):
        # near a = 0 the sine residual is pure cancellation noise; the
        # witness must still be the tangency point, not a noise crossing
        for _ in range(3):
            w = solve(MvtProblem(Theorem.FLETT, "sin(x)", 0.0, TWO_PI))
            assert w.eta == pytest.approx(4.493409457909064, abs=1e-9)
