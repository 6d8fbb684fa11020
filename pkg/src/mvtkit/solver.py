"""Bracketed root location for theorem residuals, plus the nested cascade
that reproduces the constructive existence argument stage by stage.

Roots are found by scanning a uniform grid for sign changes and refining
each bracket with bisection.  Scans accept per-point noise floors; grid
values below their floor are treated as numerically zero, which keeps the
cancellation dust near the left endpoint (where every residual has a
trivial high-multiplicity root) from masquerading as a witness.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .derivs import DerivEvaluator, sample_scale
from .theorems import (
    MvtProblem,
    ResidualEvaluator,
    StageAux,
    Theorem,
    check_boundary,
    _as_expr,
)


class NonFiniteEvaluation(ValueError):
    """A scanned function produced NaN or infinity at a grid point."""

    def __init__(self, x: float, value: float):
        super().__init__(f"non-finite value {value!r} at x={x!r}")
        self.x = x
        self.value = value


class BoundaryConditionError(ValueError):
    """The equal-endpoint-derivative hypothesis required by the constrained
    cascade does not hold."""


class CascadeStageError(RuntimeError):
    """A cascade stage found no admissible root (existence is guaranteed,
    so this indicates exhausted numerics)."""

    def __init__(self, stage: int, message: str):
        super().__init__(f"stage {stage}: {message}")
        self.stage = stage


@dataclass(frozen=True)
class SolverConfig:
    grid: int = 1024
    solve_tol: float = 1e-12
    boundary_tol: float = 1e-9
    degenerate_tol: float = 1e-11
    max_grid_doublings: int = 7

    def as_dict(self) -> dict:
        return {
            "grid": self.grid,
            "solve_tol": self.solve_tol,
            "boundary_tol": self.boundary_tol,
            "degenerate_tol": self.degenerate_tol,
            "max_grid_doublings": self.max_grid_doublings,
        }


class SolveStatus(str, Enum):
    FOUND = "Found"
    DEGENERATE_ALL_POINTS = "DegenerateAllPoints"
    NOT_FOUND = "NotFound"


@dataclass(frozen=True)
class RootScan:
    """Result of one grid scan: ascending roots with their final brackets,
    or the all-points-flat degenerate outcome."""

    roots: tuple[float, ...]
    brackets: tuple[tuple[float, float], ...]
    degenerate: bool
    iterations: int
    max_abs_value: float


def _bisect(fn, xa, xb, fa, fb, width_target, residual_target, max_iter):
    """Shrink a sign-change bracket; returns (root, bracket, iterations).

    Runs until the bracket is narrower than ``width_target`` and, when
    ``residual_target > 0``, keeps halving (down to float resolution) until
    the better endpoint's value is within it.
    """
    iterations = 0
    while iterations < max_iter:
        if xb - xa <= width_target:
            if residual_target <= 0.0 or min(abs(fa), abs(fb)) <= residual_target:
                break
        xm = 0.5 * (xa + xb)
        if not xa < xm < xb:
            break
        fm = fn(xm)
        iterations += 1
        if fm == 0.0:
            return xm, (xa, xb), iterations
        if (fm > 0.0) == (fa > 0.0):
            xa, fa = xm, fm
        else:
            xb, fb = xm, fm
    root = xa if abs(fa) <= abs(fb) else xb
    return root, (xa, xb), iterations


def find_roots(
    fn,
    lo: float,
    hi: float,
    grid: int = 1024,
    tol: float = 1e-12,
    *,
    degenerate_threshold: float = 0.0,
    batch_fn=None,
    noise_fn=None,
    residual_target: float = 0.0,
    max_bisect: int = 200,
) -> RootScan:
    """Scan ``grid + 1`` uniform points of ``[lo, hi]`` for roots of ``fn``.

    Sign changes between adjacent grid points are refined by bisection to a
    bracket width of ``tol * (hi - lo)``.  Grid values that are exactly zero
    (or below their noise floor, when one is supplied) count as roots, with
    one exception: a run of such points anchored at ``lo`` is discarded,
    because the residuals scanned here all vanish identically at the left
    endpoint and values there are cancellation noise.  If every grid value
    is below ``degenerate_threshold`` (or its noise floor), the scan reports
    the degenerate all-points outcome instead of roots.

    ``batch_fn`` may vectorize the grid pass: it receives the grid as an
    array and returns ``(values, noise_floors)``.
    """
    if not lo < hi:
        raise ValueError(f"need lo < hi, got lo={lo!r}, hi={hi!r}")
    if grid < 2:
        raise ValueError(f"grid must be at least 2, got {grid}")
    xs = np.linspace(lo, hi, grid + 1)
    if batch_fn is not None:
        vals, noise = batch_fn(xs)
        vals = np.asarray(vals, dtype=float)
        noise = np.asarray(noise, dtype=float)
    else:
        vals = np.array([float(fn(float(x))) for x in xs])
        if noise_fn is not None:
            noise = np.array([float(noise_fn(float(x))) for x in xs])
        else:
            noise = np.zeros_like(vals)
    bad = ~np.isfinite(vals)
    if bad.any():
        i = int(np.argmax(bad))
        raise NonFiniteEvaluation(float(xs[i]), float(vals[i]))
    absvals = np.abs(vals)
    zeroish = (vals == 0.0) | (absvals <= noise)
    max_abs = float(absvals.max())
    if np.all(zeroish | (absvals <= degenerate_threshold)):
        return RootScan((), (), True, 0, max_abs)

    found: list[tuple[float, tuple[float, float]]] = []
    iterations = 0
    # collapse runs of numerically-zero points into single roots
    padded = np.concatenate(([False], zeroish, [False]))
    run_starts = np.nonzero(zeroish & ~padded[:-2])[0]
    run_ends = np.nonzero(zeroish & ~padded[2:])[0]
    for s, e in zip(run_starts, run_ends):
        if s == 0:  # lo-anchored runs are the trivial-root basin
            continue
        root = float(xs[s]) if e == s else float(0.5 * (xs[s] + xs[e]))
        found.append((root, (float(xs[s]), float(xs[e]))))
    # bisect genuine sign changes between adjacent non-zero points
    width_target = tol * (hi - lo)
    nonzero = ~zeroish
    positive = vals > 0.0
    changes = np.nonzero(
        nonzero[:-1] & nonzero[1:] & (positive[:-1] != positive[1:])
    )[0]
    for i in changes:
        root, bracket, its = _bisect(
            fn,
            float(xs[i]),
            float(xs[i + 1]),
            float(vals[i]),
            float(vals[i + 1]),
            width_target,
            residual_target,
            max_bisect,
        )
        iterations += its
        found.append((root, bracket))
    found.sort(key=lambda item: item[0])
    return RootScan(
        roots=tuple(r for r, _ in found),
        brackets=tuple(b for _, b in found),
        degenerate=False,
        iterations=iterations,
        max_abs_value=max_abs,
    )


@dataclass(frozen=True)
class Witness:
    """Located witness point with solve diagnostics."""

    variant: Theorem
    status: SolveStatus
    eta: float | None
    residual_at_eta: float | None
    bracket: tuple[float, float] | None
    iterations: int
    all_roots: tuple[float, ...]
    boundary_ok: bool
    boundary_gap: float | None
    scale: float
    grid_used: int
    root_policy: str = "leftmost"


@dataclass(frozen=True)
class CascadeWitness:
    """Nested chain of stage points ``b > u_1 > ... > u_{n-1} > eta > a``
    produced by the constructive cascade, with per-stage diagnostics."""

    a: float
    b: float
    chain: tuple[float, ...]
    eta: float
    stage_residuals: tuple[float, ...]
    stage_prev_derivs: tuple[float, ...]
    identity_residuals: tuple[float, ...]
    final_residual: float
    degenerate_stages: tuple[int, ...]
    unconstrained: bool
    iterations: int
    scale: float
    root_policy: str = "leftmost"

    def __post_init__(self) -> None:
        points = (self.b, *self.chain, self.eta, self.a)
        for left, right in zip(points, points[1:]):
            if not left > right:
                raise ValueError(
                    f"cascade chain is not strictly nested: {points!r}"
                )


def _scan_with_doubling(ev, lo, hi, cfg: SolverConfig, scale: float):
    """Run find_roots, doubling the grid (bounded) while nothing turns up."""
    grid = cfg.grid
    last = None
    for _ in range(cfg.max_grid_doublings + 1):
        last = find_roots(
            ev,
            lo,
            hi,
            grid,
            cfg.solve_tol,
            degenerate_threshold=cfg.degenerate_tol * scale,
            batch_fn=ev.batch,
            residual_target=cfg.solve_tol * scale,
        )
        if last.degenerate or last.roots:
            return last, grid
        grid *= 2
    return last, grid // 2


def solve(problem: MvtProblem, cfg: SolverConfig | None = None) -> Witness:
    """Locate the leftmost witness of the problem's defining equation.

    The equal-endpoint-derivative hypothesis (Flett and order-``n``
    constrained variants) is checked and reported through
    ``boundary_ok``/``boundary_gap``, but a violation does not stop the
    solve: whatever root exists is still reported.
    """
    cfg = cfg or SolverConfig()
    ev = ResidualEvaluator(problem)
    scale = ev.scale
    boundary_ok = True
    boundary_gap = None
    if problem.variant in (Theorem.FLETT, Theorem.PAWLIKOWSKA):
        report = check_boundary(
            problem.f, problem.a, problem.b, problem.n, cfg.boundary_tol
        )
        boundary_ok = report.ok
        boundary_gap = report.gap
    eps_a = 1e-12 * (problem.b - problem.a)
    scan, grid_used = _scan_with_doubling(
        ev, problem.a + eps_a, problem.b, cfg, scale
    )
    if scan.degenerate:
        return Witness(
            variant=problem.variant,
            status=SolveStatus.DEGENERATE_ALL_POINTS,
            eta=None,
            residual_at_eta=None,
            bracket=None,
            iterations=scan.iterations,
            all_roots=(),
            boundary_ok=boundary_ok,
            boundary_gap=boundary_gap,
            scale=scale,
            grid_used=grid_used,
        )
    target = cfg.solve_tol * scale
    for root, bracket in zip(scan.roots, scan.brackets):
        if not problem.a < root < problem.b:
            continue
        value = ev(root)
        if abs(value) <= target:
            return Witness(
                variant=problem.variant,
                status=SolveStatus.FOUND,
                eta=root,
                residual_at_eta=value,
                bracket=bracket,
                iterations=scan.iterations,
                all_roots=scan.roots,
                boundary_ok=boundary_ok,
                boundary_gap=boundary_gap,
                scale=scale,
                grid_used=grid_used,
            )
    return Witness(
        variant=problem.variant,
        status=SolveStatus.NOT_FOUND,
        eta=None,
        residual_at_eta=None,
        bracket=None,
        iterations=scan.iterations,
        all_roots=scan.roots,
        boundary_ok=boundary_ok,
        boundary_gap=boundary_gap,
        scale=scale,
        grid_used=grid_used,
    )


def cascade_solve(
    f,
    a: float,
    b: float,
    n: int,
    unconstrained: bool = False,
    cfg: SolverConfig | None = None,
) -> CascadeWitness:
    """Run the constructive cascade: stage ``k`` solves the first-order
    equation for the stage auxiliary function on the current subinterval,
    shrinking ``(a, b)`` to ``(a, u_1)`` to ... down to the final witness.

    A stage whose equation is identically zero (every interval point works)
    continues from the subinterval midpoint and is recorded in
    ``degenerate_stages``.
    """
    cfg = cfg or SolverConfig()
    if n < 1:
        raise ValueError(f"order n must be positive, got {n}")
    if not a < b:
        raise ValueError(f"need a < b, got a={a!r}, b={b!r}")
    f = _as_expr(f)
    fev = DerivEvaluator(f)
    scale = sample_scale([fev], a, b, n + 1)
    if not unconstrained:
        report = check_boundary(f, a, b, n, cfg.boundary_tol)
        if not report.ok:
            raise BoundaryConditionError(
                f"|f^({n})(a) - f^({n})(b)| = {report.gap!r} exceeds "
                f"threshold {report.threshold!r}"
            )
    eps_a = 1e-12 * (b - a)
    u_prev = float(b)
    chain: list[float] = []
    stage_residuals: list[float] = []
    stage_prev_derivs: list[float] = []
    identity_residuals: list[float] = []
    degenerate_stages: list[int] = []
    iterations = 0
    target = cfg.solve_tol * scale
    for k in range(1, n + 1):
        aux = StageAux(f, a, b, n, k, unconstrained=unconstrained, fev=fev)
        stage_prev_derivs.append(abs(aux.deriv(u_prev)))
        hi = u_prev if k == 1 else u_prev - 1e-12 * (u_prev - a)
        scan, _ = _scan_with_doubling(aux, a + eps_a, hi, cfg, scale)
        iterations += scan.iterations
        if scan.degenerate:
            u_k = 0.5 * (a + u_prev)
            degenerate_stages.append(k)
        else:
            u_k = None
            for root in scan.roots:
                if a < root < u_prev and abs(aux.residual(root)) <= target:
                    u_k = root
                    break
            if u_k is None:
                raise CascadeStageError(
                    k,
                    f"no admissible root of the stage equation in "
                    f"({a!r}, {u_prev!r}) after grid refinement",
                )
        stage_residuals.append(abs(aux.residual(u_k)))
        identity_residuals.append(abs(aux.order_k_identity_residual(u_k)))
        if k < n:
            chain.append(u_k)
        u_prev = u_k
    eta = u_prev
    final_variant = Theorem.UNCONSTRAINED if unconstrained else Theorem.PAWLIKOWSKA
    final_problem = MvtProblem(final_variant, f, a, b, n)
    final_residual = abs(ResidualEvaluator(final_problem)(eta))
    return CascadeWitness(
        a=float(a),
        b=float(b),
        chain=tuple(chain),
        eta=eta,
        stage_residuals=tuple(stage_residuals),
        stage_prev_derivs=tuple(stage_prev_derivs),
        identity_residuals=tuple(identity_residuals),
        final_residual=final_residual,
        degenerate_stages=tuple(degenerate_stages),
        unconstrained=unconstrained,
        iterations=iterations,
        scale=scale,
    )
