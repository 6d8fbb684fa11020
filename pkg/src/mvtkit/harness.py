"""Random constrained-polynomial generation and batch verification.

The generator draws coefficients uniformly and then fixes the degree
``n + 1`` coefficient so that ``f^(n)(a) = f^(n)(b)`` holds exactly in
rational arithmetic (the ``x^(n+1)`` term is the only one contributing a
linear-in-``x`` part to ``f^(n)``, so one division settles it).  Rendering
that coefficient back to a binary64 literal is the only rounding step.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction

from .exprs import Expr, parse
from .solver import (
    CascadeStageError,
    SolveStatus,
    SolverConfig,
    cascade_solve,
    solve,
)
from .theorems import (
    MvtProblem,
    ResidualEvaluator,
    Theorem,
    divided_diff_eval,
    trahan_check,
    trahan_check_general,
)


@dataclass(frozen=True)
class GeneratorSpec:
    """Recipe for one random polynomial satisfying the order-``n`` endpoint
    derivative constraint."""

    n: int
    degree: int
    coefficient_range: tuple[float, float] = (-1.0, 1.0)
    seed: int = 0
    interval: tuple[float, float] = (-1.0, 1.0)

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError(f"order n must be positive, got {self.n}")
        if not self.n + 1 <= self.degree <= self.n + 6:
            raise ValueError(
                f"degree must lie in [n+1, n+6] = "
                f"[{self.n + 1}, {self.n + 6}], got {self.degree}"
            )
        a, b = self.interval
        if not a < b:
            raise ValueError(f"interval must satisfy a < b, got {self.interval!r}")
        lo, hi = self.coefficient_range
        if not lo < hi:
            raise ValueError(
                f"coefficient range must be non-empty, got {self.coefficient_range!r}"
            )


@dataclass(frozen=True)
class DrawnPoly:
    """A generated polynomial with its exact coefficient list."""

    coeffs: tuple[float, ...]
    source: str
    expr: Expr
    # True when the constraint forces the x^(n+1) coefficient to zero
    # (degree == n + 1), leaving an effective degree <= n whose residual is
    # identically zero
    degenerate_tendency: bool


def poly_source(coeffs) -> str:
    """Render ascending coefficients as expression-language source with
    full-precision decimal literals."""
    terms: list[str] = []
    for j, c in enumerate(coeffs):
        if c == 0.0:
            continue
        mag = repr(abs(c))
        if j == 0:
            body = mag
        elif j == 1:
            body = f"{mag}*x"
        else:
            body = f"{mag}*x^{j}"
        if not terms:
            terms.append(body if c > 0 else f"-{body}")
        else:
            terms.append(f"+ {body}" if c > 0 else f"- {body}")
    if not terms:
        return "0"
    return " ".join(terms)


def draw_constrained_poly(spec: GeneratorSpec) -> DrawnPoly:
    """Draw coefficients and solve the one-coefficient constraint exactly."""
    rng = random.Random(spec.seed)
    lo, hi = spec.coefficient_range
    coeffs = [rng.uniform(lo, hi) for _ in range(spec.degree + 1)]
    a, b = spec.interval
    n = spec.n
    av, bv = Fraction(a), Fraction(b)
    total = Fraction(0)
    for j in range(n + 2, spec.degree + 1):
        falling = math.factorial(j) // math.factorial(j - n)
        total += Fraction(coeffs[j]) * falling * (bv ** (j - n) - av ** (j - n))
    coeffs[n + 1] = float(-total / (math.factorial(n + 1) * (bv - av)))
    source = poly_source(coeffs)
    return DrawnPoly(
        coeffs=tuple(coeffs),
        source=source,
        expr=parse(source),
        degenerate_tendency=spec.degree == n + 1,
    )


def gen_constrained_poly(spec: GeneratorSpec) -> Expr:
    """Expression form of :func:`draw_constrained_poly`."""
    return draw_constrained_poly(spec).expr


# -- batch verification -------------------------------------------------------


@dataclass(frozen=True)
class CaseResult:
    index: int
    n: int
    degree: int
    seed: int
    source: str
    outcome: str  # "pass" | "fail" | "degenerate"
    status: str | None
    eta: float | None
    residual_at_eta: float | None
    chain: tuple[float, ...]
    cascade_eta: float | None
    trahan_original_satisfied: bool | None
    trahan_general_satisfied: bool | None
    failures: tuple[str, ...]
    error: str | None


@dataclass(frozen=True)
class VerificationReport:
    total: int
    passes: int
    fails: int
    degenerates: int
    seed: int
    n_range: tuple[int, int]
    config: dict
    cases: tuple[CaseResult, ...]

    @property
    def ok(self) -> bool:
        return self.fails == 0


def _case_seed(seed: int, index: int) -> int:
    return (seed * 1_000_003 + index) & 0x7FFFFFFFFFFFFFFF


def _run_case(
    index: int,
    n: int,
    spec: GeneratorSpec,
    cfg: SolverConfig,
    residual_tol: float,
    stage_deriv_tol: float,
    cross_check_points: int,
) -> CaseResult:
    drawn = draw_constrained_poly(spec)
    a, b = spec.interval
    failures: list[str] = []
    problem = MvtProblem(Theorem.PAWLIKOWSKA, drawn.expr, a, b, n)
    revaluator = ResidualEvaluator(problem)
    scale = revaluator.scale

    witness = solve(problem, cfg)
    if witness.status is SolveStatus.NOT_FOUND:
        failures.append("solve returned NotFound")
    if not witness.boundary_ok:
        failures.append(
            f"generated polynomial missed the boundary constraint "
            f"(gap {witness.boundary_gap!r})"
        )
    if witness.status is SolveStatus.FOUND:
        if not a < witness.eta < b:
            failures.append(f"eta {witness.eta!r} outside ({a!r}, {b!r})")
        if abs(witness.residual_at_eta) > residual_tol * scale:
            failures.append(
                f"residual {witness.residual_at_eta!r} exceeds "
                f"{residual_tol!r} * scale"
            )

    chain: tuple[float, ...] = ()
    cascade_eta = None
    try:
        cw = cascade_solve(drawn.expr, a, b, n, unconstrained=False, cfg=cfg)
        chain = cw.chain
        cascade_eta = cw.eta
        worst_prev = max(cw.stage_prev_derivs)
        if worst_prev > stage_deriv_tol * scale:
            failures.append(
                f"stage derivative check {worst_prev!r} exceeds "
                f"{stage_deriv_tol!r} * scale"
            )
        if cw.final_residual > residual_tol * scale:
            failures.append(
                f"cascade eta residual {cw.final_residual!r} exceeds "
                f"{residual_tol!r} * scale"
            )
    except (CascadeStageError, ValueError) as exc:
        failures.append(f"cascade failed: {exc}")

    original = trahan_check(drawn.expr, a, b)
    general = trahan_check_general(drawn.expr, a, b, n)

    # closed-form derivative of the divided-difference function against the
    # direct residual, at a few interior points
    sign = (-1.0) ** n * math.factorial(n)
    for j in range(cross_check_points):
        x = a + (b - a) * (j + 1) / (cross_check_points + 1)
        lhs = divided_diff_eval(drawn.expr, a, n, x, derivative_order=1)
        defect = lhs * (x - a) ** (n + 1) / sign + revaluator(x)
        if abs(defect) > 1e-10 * scale:
            failures.append(
                f"divided-difference derivative cross-check defect {defect!r} at x={x!r}"
            )
            break

    if failures:
        outcome = "fail"
    elif witness.status is SolveStatus.DEGENERATE_ALL_POINTS:
        outcome = "degenerate"
    else:
        outcome = "pass"
    return CaseResult(
        index=index,
        n=n,
        degree=spec.degree,
        seed=spec.seed,
        source=drawn.source,
        outcome=outcome,
        status=witness.status.value,
        eta=witness.eta,
        residual_at_eta=witness.residual_at_eta,
        chain=chain,
        cascade_eta=cascade_eta,
        trahan_original_satisfied=original.satisfied,
        trahan_general_satisfied=general.satisfied,
        failures=tuple(failures),
        error=None,
    )


def verify_batch(
    count: int,
    n_range: tuple[int, int] = (1, 5),
    *,
    coefficient_range: tuple[float, float] = (-1.0, 1.0),
    interval: tuple[float, float] = (-1.0, 1.0),
    seed: int = 0,
    cfg: SolverConfig | None = None,
    residual_tol: float = 1e-8,
    stage_deriv_tol: float = 1e-9,
    cross_check_points: int = 3,
) -> VerificationReport:
    """Generate ``count`` constrained polynomials and run the full battery
    (solve, cascade, both Trahan-type checks, derivative cross-check) on
    each.  Individual case errors are recorded, never fatal.
    """
    if count < 1:
        raise ValueError(f"count must be positive, got {count}")
    n_lo, n_hi = n_range
    if not 1 <= n_lo <= n_hi:
        raise ValueError(f"bad n range {n_range!r}")
    cfg = cfg or SolverConfig()
    cases: list[CaseResult] = []
    passes = fails = degenerates = 0
    for index in range(count):
        n = n_lo + index % (n_hi - n_lo + 1)
        case_rng = random.Random(_case_seed(seed, index))
        degree = case_rng.randint(n + 1, n + 6)
        spec = GeneratorSpec(
            n=n,
            degree=degree,
            coefficient_range=coefficient_range,
            seed=case_rng.randrange(2**62),
            interval=interval,
        )
        try:
            case = _run_case(
                index, n, spec, cfg, residual_tol, stage_deriv_tol, cross_check_points
            )
        except Exception as exc:  # noqa: BLE001 - case errors are data here
            case = CaseResult(
                index=index,
                n=n,
                degree=degree,
                seed=spec.seed,
                source="",
                outcome="fail",
                status=None,
                eta=None,
                residual_at_eta=None,
                chain=(),
                cascade_eta=None,
                trahan_original_satisfied=None,
                trahan_general_satisfied=None,
                failures=(),
                error=f"{type(exc).__name__}: {exc}",
            )
        cases.append(case)
        if case.outcome == "pass":
            passes += 1
        elif case.outcome == "degenerate":
            degenerates += 1
        else:
            fails += 1
    return VerificationReport(
        total=count,
        passes=passes,
        fails=fails,
        degenerates=degenerates,
        seed=seed,
        n_range=(n_lo, n_hi),
        config=cfg.as_dict(),
        cases=tuple(cases),
    )
