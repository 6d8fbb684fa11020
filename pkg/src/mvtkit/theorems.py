"""Defining equations and sufficient conditions for Flett-type mean value
theorems.

The residual conventions used throughout (a witness is a root):

* Flett: ``r(x) = f'(x)(x - a) - (f(x) - f(a))``, identically equal to
  ``f(a) - T_1(f, x)(a)``.
* Riedel-Sahoo: ``r(x) = f'(x) - (f(x) - f(a))/(x - a) - K(f') (x - a)/2``
  with ``K(f') = (f'(b) - f'(a))/(b - a)``.
* Pawlikowska (order ``n``): ``r(x) = f(a) - T_n(f, x)(a)``.
* Endpoint-free order ``n`` (``unconstrained``):
  ``r(x) = f(a) - T_n(f, x)(a) - (a - x)^(n+1)/(n+1)! * K(f^(n))``.
* Two-function: ``r(x) = f(a) - T_n(f, x)(a) - K(f^(n), g^(n)) *
  (g(a) - T_n(g, x)(a))``.

Here ``T_n(f, x0)`` is the degree-``n`` Taylor polynomial of ``f`` at ``x0``
and ``K(u, v) = (u(b) - u(a)) / (v(b) - v(a))`` (denominator ``b - a`` in the
one-argument form).

For polynomials the Taylor gap ``f(a) - T_n(f, x)(a)`` is evaluated in tail
form ``sum_{i>n} t_i (a - x)^i`` from the full expansion at ``x``, which is
exact and avoids the catastrophic cancellation the direct difference
suffers near ``x = a``.  Evaluators also report a running noise floor
(roundoff magnitude) so the solver can tell a genuinely tiny residual from
cancellation dust.
"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .derivs import DerivEvaluator, sample_scale
from .exprs import Binary, Constant, Expr, eval_jet, parse
from . import jets

_EPS = sys.float_info.epsilon
# headroom over eps for error accumulated across a Horner chain
_NOISE_FACTOR = 64.0 * _EPS


class ZeroDenominatorError(ZeroDivisionError):
    """The divided-difference denominator vanished."""


class Theorem(str, Enum):
    FLETT = "flett"
    RIEDEL_SAHOO = "riedel-sahoo"
    PAWLIKOWSKA = "pawlikowska"
    UNCONSTRAINED = "unconstrained"
    TWO_FUNCTION = "two-function"


def _as_expr(f) -> Expr:
    return parse(f) if isinstance(f, str) else f


@dataclass(frozen=True)
class MvtProblem:
    """One witness-location problem: a theorem variant, function(s), an
    interval and the derivative order."""

    variant: Theorem
    f: Expr
    a: float
    b: float
    n: int = 1
    g: Expr | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "variant", Theorem(self.variant))
        object.__setattr__(self, "f", _as_expr(self.f))
        if self.g is not None:
            object.__setattr__(self, "g", _as_expr(self.g))
        object.__setattr__(self, "a", float(self.a))
        object.__setattr__(self, "b", float(self.b))
        if not (math.isfinite(self.a) and math.isfinite(self.b)):
            raise ValueError("interval endpoints must be finite")
        if not self.a < self.b:
            raise ValueError(f"need a < b, got a={self.a!r}, b={self.b!r}")
        if self.n < 1:
            raise ValueError(f"order n must be positive, got {self.n}")
        if self.variant in (Theorem.FLETT, Theorem.RIEDEL_SAHOO) and self.n != 1:
            raise ValueError(f"{self.variant.value} is first-order; got n={self.n}")
        if self.variant is Theorem.TWO_FUNCTION:
            if self.g is None:
                raise ValueError("two-function problems need g")
        elif self.g is not None:
            raise ValueError(f"{self.variant.value} takes no second function")


@dataclass(frozen=True)
class ConditionReport:
    """Evaluated sufficient-condition product and its verdict."""

    left_factor: float
    right_factor: float
    product: float
    m_f: float
    satisfied: bool
    tolerance_used: float


@dataclass(frozen=True)
class BoundaryReport:
    """Endpoint derivative agreement ``f^(n)(a) = f^(n)(b)``."""

    gap: float
    threshold: float
    deriv_a: float
    deriv_b: float

    @property
    def ok(self) -> bool:
        return self.gap <= self.threshold


# -- basic quantities -------------------------------------------------------


def k_ratio(f, a: float, b: float, n: int = 0, g=None) -> float:
    """Divided difference ``(f^(n)(b) - f^(n)(a)) / (g^(n)(b) - g^(n)(a))``,
    with denominator ``b - a`` when ``g`` is omitted."""
    if n < 0:
        raise ValueError(f"derivative order must be non-negative, got {n}")
    fev = DerivEvaluator(_as_expr(f))
    num = fev.derivative(b, n) - fev.derivative(a, n)
    if g is None:
        return num / (b - a)
    gev = DerivEvaluator(_as_expr(g))
    ga = gev.derivative(a, n)
    gb = gev.derivative(b, n)
    denom = gb - ga
    if denom == 0.0:
        raise ZeroDenominatorError(
            f"g^({n}) takes the same value at both endpoints: "
            f"g^({n})({a!r})={ga!r}, g^({n})({b!r})={gb!r}"
        )
    return num / denom


def taylor_poly_eval(f, x0: float, n: int, x: float) -> float:
    """Degree-``n`` Taylor polynomial of ``f`` at ``x0``, evaluated at ``x``."""
    if n < 0:
        raise ValueError(f"degree must be non-negative, got {n}")
    t = DerivEvaluator(_as_expr(f)).taylor_at(x0, n)
    dx = x - x0
    acc = 0.0
    for ti in reversed(t):
        acc = acc * dx + ti
    return acc


def check_boundary(f, a: float, b: float, n: int, boundary_tol: float = 1e-9) -> BoundaryReport:
    """Measure how closely ``f^(n)(a) = f^(n)(b)`` holds; the threshold is
    ``boundary_tol * max(1, |f^(n)(a)|, |f^(n)(b)|)``."""
    fev = DerivEvaluator(_as_expr(f))
    da = fev.derivative(a, n)
    db = fev.derivative(b, n)
    threshold = boundary_tol * max(1.0, abs(da), abs(db))
    return BoundaryReport(gap=abs(da - db), threshold=threshold, deriv_a=da, deriv_b=db)


# -- residuals ---------------------------------------------------------------


def _taylor_gap_direct(fa, t, n, ax):
    """``f(a) - sum_{i<=n} t_i ax^i`` plus an abs-magnitude estimate.

    Works elementwise when ``t`` rows and ``ax`` are arrays.
    """
    acc = t[n]
    mag = abs(t[n])
    aax = abs(ax)
    for i in range(n - 1, -1, -1):
        acc = acc * ax + t[i]
        mag = mag * aax + abs(t[i])
    return fa - acc, abs(fa) + mag


def _taylor_gap_tail(t, n, ax):
    """``sum_{i>n} t_i ax^i`` for a full expansion ``t`` (cancellation-free
    form of the Taylor gap), plus an abs-magnitude estimate."""
    d = len(t) - 1
    if d <= n:
        zero = ax * 0.0
        return zero, zero
    acc = t[d]
    mag = abs(t[d])
    aax = abs(ax)
    for i in range(d - 1, n, -1):
        acc = acc * ax + t[i]
        mag = mag * aax + abs(t[i])
    lead = ax ** (n + 1)
    return acc * lead, mag * abs(lead)


class ResidualEvaluator:
    """Signed residual of a problem's defining equation as a function of x.

    Exposes a scalar call, a vectorized grid call, and per-point noise
    floors (roundoff magnitude times machine epsilon).
    """

    def __init__(self, problem: MvtProblem):
        self.problem = problem
        p = problem
        self._f = DerivEvaluator(p.f)
        self._fa = self._f.value(p.a)
        self._n = p.n
        v = p.variant
        if v is Theorem.RIEDEL_SAHOO:
            self._k1 = (self._f.derivative(p.b, 1) - self._f.derivative(p.a, 1)) / (p.b - p.a)
        elif v is Theorem.UNCONSTRAINED:
            self._kn = (self._f.derivative(p.b, p.n) - self._f.derivative(p.a, p.n)) / (p.b - p.a)
        elif v is Theorem.TWO_FUNCTION:
            self._g = DerivEvaluator(p.g)
            self._ga = self._g.value(p.a)
            self._kfg = k_ratio(p.f, p.a, p.b, p.n, g=p.g)
        self._scale: float | None = None

    @property
    def scale(self) -> float:
        """max(1, sampled |f^(i)|) over the interval at the orders involved."""
        if self._scale is None:
            evs = [self._f]
            if self.problem.variant is Theorem.TWO_FUNCTION:
                evs.append(self._g)
            self._scale = sample_scale(evs, self.problem.a, self.problem.b, self._n + 1)
        return self._scale

    def _gap(self, ev: DerivEvaluator, fa, x, grid: bool):
        a = self.problem.a
        if grid:
            full = ev.full_taylor_grid(x)
            ax = a - x
            if full is not None:
                return _taylor_gap_tail(list(full), self._n, ax)
            t = ev.taylor_grid(x, self._n)
            return _taylor_gap_direct(fa, list(t), self._n, ax)
        full = ev.full_taylor_at(x)
        ax = a - x
        if full is not None:
            return _taylor_gap_tail(full, self._n, ax)
        t = ev.taylor_at(x, self._n)
        return _taylor_gap_direct(fa, t, self._n, ax)

    def _riedel_sahoo(self, x, grid: bool):
        p = self.problem
        if not grid and x <= p.a:
            raise ValueError(
                f"riedel-sahoo residual needs x > a, got x={x!r}, a={p.a!r}"
            )
        dx = x - p.a
        if grid:
            full = self._f.full_taylor_grid(x)
        else:
            full = self._f.full_taylor_at(x)
        if full is not None:
            # tail of (f(x) - f(a))/(x - a) beyond the f'(x) term; the i = 1
            # term cancels f'(x) structurally, so the sum starts at i = 2
            t = list(full)
            d = len(t) - 1
            ax = p.a - x
            if d < 2:
                acc = ax * 0.0
                mag = abs(acc)
            else:
                acc = t[d]
                mag = abs(t[d])
                aax = abs(ax)
                for i in range(d - 1, 1, -1):
                    acc = acc * ax + t[i]
                    mag = mag * aax + abs(t[i])
                acc = acc * ax
                mag = mag * aax
            corr = self._k1 * dx / 2.0
            return -acc - corr, mag + abs(corr)
        t = self._f.taylor_grid(x, 1) if grid else self._f.taylor_at(x, 1)
        dq = (t[0] - self._fa) / dx
        corr = self._k1 * dx / 2.0
        value = t[1] - dq - corr
        mag = abs(t[1]) + abs(dq) + abs(corr)
        return value, mag

    def _eval(self, x, grid: bool):
        p = self.problem
        v = p.variant
        if v is Theorem.RIEDEL_SAHOO:
            return self._riedel_sahoo(x, grid)
        value, mag = self._gap(self._f, self._fa, x, grid)
        if v is Theorem.UNCONSTRAINED:
            ax = p.a - x
            corr = ax ** (p.n + 1) / math.factorial(p.n + 1) * self._kn
            return value - corr, mag + abs(corr)
        if v is Theorem.TWO_FUNCTION:
            gv, gm = self._gap(self._g, self._ga, x, grid)
            return value - self._kfg * gv, mag + abs(self._kfg) * gm
        return value, mag

    def __call__(self, x: float) -> float:
        return self._eval(float(x), grid=False)[0]

    def value_and_noise(self, x: float) -> tuple[float, float]:
        value, mag = self._eval(float(x), grid=False)
        return value, _NOISE_FACTOR * mag

    def batch(self, xs: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        values, mags = self._eval(np.asarray(xs, dtype=float), grid=True)
        return np.asarray(values, dtype=float), _NOISE_FACTOR * np.asarray(mags, dtype=float)


def residual(problem: MvtProblem, x: float) -> float:
    """Residual of the problem's defining equation at ``x`` (root = witness)."""
    return ResidualEvaluator(problem)(x)


# -- cascade auxiliary functions ---------------------------------------------
#
# Stage k of the nested construction uses
#
#   phi_k(x) = x f^(n-k+1)(a)
#              + sum_{i=0..k} ((-1)^(i+1)/i!) (k-i) (x-a)^i f^(n-k+i)(x)
#
# whose derivative telescopes to an expression in f^(n-k+1)..f^(n) only,
# and the endpoint-free variant
#
#   psi_k(x) = phi_k(x) + ((-1)^(k+1)/(k+1)!) (x-a)^(k+1) K(f^(n)).


def _phi_weights(k: int) -> list[float]:
    return [((-1.0) ** (i + 1) / math.factorial(i)) * (k - i) for i in range(k + 1)]


class StageAux:
    """Stage-``k`` auxiliary function: values, derivatives and the residual
    of the first-order (Flett) equation it must satisfy on each nested
    subinterval.  Accepts scalars or numpy grids."""

    def __init__(self, f, a: float, b: float, n: int, k: int,
                 unconstrained: bool = False, fev: DerivEvaluator | None = None):
        if not 1 <= k <= n:
            raise ValueError(f"stage index k must satisfy 1 <= k <= n, got k={k}, n={n}")
        self.a = float(a)
        self.b = float(b)
        self.n = n
        self.k = k
        self.unconstrained = unconstrained
        self._f = fev if fev is not None else DerivEvaluator(_as_expr(f))
        ta = self._f.taylor_at(self.a, n + 1)
        self._da = [math.factorial(j) * ta[j] for j in range(n + 2)]
        self._A = self._da[n - k + 1]
        # value at the left endpoint: only the i = 0 term survives
        self.value_at_a = self.a * self._A - k * self._da[n - k]
        self._w = _phi_weights(k)
        if unconstrained:
            tb = self._f.taylor_at(self.b, n)
            dnb = math.factorial(n) * tb[n]
            self._kn = (dnb - self._da[n]) / (self.b - self.a)
            self._ck = (-1.0) ** (k + 1) / math.factorial(k + 1)
        else:
            self._kn = 0.0
            self._ck = 0.0

    def _assemble(self, x, t):
        """phi/psi value and first derivative at ``x`` (with abs magnitudes)
        from Taylor rows ``t`` covering orders 0..n."""
        n, k, a = self.n, self.k, self.a
        dx = x - a
        adx = abs(dx)
        D = [math.factorial(j) * t[j] for j in range(n + 1)]
        value = x * self._A
        vmag = abs(x * self._A)
        deriv = self._A + 0.0 * x
        dmag = abs(self._A) + 0.0 * x
        for i in range(k):  # w[k] = 0, skip it
            w = self._w[i]
            term = w * dx ** i * D[n - k + i]
            value = value + term
            vmag = vmag + abs(term)
            dterm = w * dx ** i * D[n - k + i + 1]
            deriv = deriv + dterm
            dmag = dmag + abs(dterm)
            if i >= 1:
                dterm2 = w * i * dx ** (i - 1) * D[n - k + i]
                deriv = deriv + dterm2
                dmag = dmag + abs(dterm2)
        if self.unconstrained:
            corr = self._ck * self._kn * dx ** (k + 1)
            value = value + corr
            vmag = vmag + abs(corr)
            dcorr = self._ck * (k + 1) * self._kn * dx ** k
            deriv = deriv + dcorr
            dmag = dmag + abs(dcorr)
        return value, deriv, vmag, dmag

    def _taylor(self, x, grid: bool):
        return self._f.taylor_grid(x, self.n) if grid else self._f.taylor_at(x, self.n)

    def value(self, x: float) -> float:
        return self._assemble(x, self._taylor(x, False))[0]

    def deriv(self, x: float) -> float:
        return self._assemble(x, self._taylor(x, False))[1]

    def _residual(self, x, grid: bool):
        value, deriv, vmag, dmag = self._assemble(x, list(self._taylor(x, grid)))
        dx = x - self.a
        res = deriv * dx - (value - self.value_at_a)
        mag = dmag * abs(dx) + vmag + abs(self.value_at_a)
        return res, mag

    def residual(self, x: float) -> float:
        """Residual of ``aux'(x)(x - a) = aux(x) - aux(a)``."""
        return self._residual(float(x), grid=False)[0]

    __call__ = residual

    def value_and_noise(self, x: float) -> tuple[float, float]:
        res, mag = self._residual(float(x), grid=False)
        return res, _NOISE_FACTOR * mag

    def batch(self, xs: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        res, mag = self._residual(np.asarray(xs, dtype=float), grid=True)
        return np.asarray(res, dtype=float), _NOISE_FACTOR * np.asarray(mag, dtype=float)

    def order_k_identity_residual(self, u: float) -> float:
        """How well the stage postcondition holds at ``u``:

        ``f^(n-k)(u) - f^(n-k)(a) = sum_{i=1..k} ((-1)^(i+1)/i!) (u-a)^i
        f^(n-k+i)(u)`` (minus the K-correction term in the endpoint-free
        variant).  Returns the signed defect.
        """
        n, k, a = self.n, self.k, self.a
        t = self._f.taylor_at(u, n)
        D = [math.factorial(j) * t[j] for j in range(n + 1)]
        du = u - a
        total = D[n - k] - self._da[n - k]
        for i in range(1, k + 1):
            total -= (-1.0) ** (i + 1) / math.factorial(i) * du ** i * D[n - k + i]
        if self.unconstrained:
            total += self._ck * self._kn * du ** (k + 1)
        return total


def phi_eval(f, a: float, n: int, k: int, x: float) -> float:
    """Value of the stage-``k`` cascade auxiliary function at ``x``."""
    return StageAux(f, a, a + 1.0, n, k).value(float(x))


def phi_deriv(f, a: float, n: int, k: int, x: float) -> float:
    """First derivative of the stage-``k`` cascade auxiliary function."""
    return StageAux(f, a, a + 1.0, n, k).deriv(float(x))


def psi_eval(f, a: float, b: float, n: int, k: int, x: float) -> float:
    """Value of the endpoint-free stage auxiliary function
    ``psi_k = phi_k + ((-1)^(k+1)/(k+1)!)(x-a)^(k+1) K(f^(n))``."""
    return StageAux(f, a, b, n, k, unconstrained=True).value(float(x))


def psi_deriv(f, a: float, b: float, n: int, k: int, x: float) -> float:
    """First derivative of the endpoint-free stage auxiliary function."""
    return StageAux(f, a, b, n, k, unconstrained=True).deriv(float(x))


# -- divided-difference function and Trahan-type conditions -------------------


def divided_diff_eval(f, a: float, n: int, x: float, derivative_order: int = 0) -> float:
    """The order-``(n-1)`` derivative of ``g(x) = (f(x) - f(a))/(x - a)``,
    extended by its limit ``f^(n)(a)/n`` at ``x = a``.

    ``derivative_order=1`` returns the next derivative ``g^(n)(x)`` through
    the closed form

    ``((-1)^n n! / (x-a)^(n+1)) (f(x) - f(a) +
    sum_{i=1..n} ((-1)^i / i!) (x-a)^i f^(i)(x))``

    which is only defined for ``x != a``.
    """
    if n < 1:
        raise ValueError(f"order n must be positive, got {n}")
    if derivative_order not in (0, 1):
        raise ValueError(f"derivative_order must be 0 or 1, got {derivative_order}")
    f = _as_expr(f)
    x = float(x)
    a = float(a)
    fev = DerivEvaluator(f)
    if derivative_order == 0:
        if x == a:
            return fev.derivative(a, n) / n
        fj = eval_jet(f, x, n)
        denom = jets.variable(x, n) - a
        quotient = (fj - fev.value(a)) / denom
        return quotient.derivative(n - 1)
    if x == a:
        raise ValueError("the closed-form derivative is undefined at x = a")
    t = fev.taylor_at(x, n)
    dx = x - a
    inner = t[0] - fev.value(a)
    for i in range(1, n + 1):
        inner += (-1.0) ** i * dx ** i * t[i]
    return (-1.0) ** n * math.factorial(n) / dx ** (n + 1) * inner


def trahan_check(f, a: float, b: float, tol: float | None = None) -> ConditionReport:
    """First-order sufficient condition
    ``(f'(a) - K(f)) (f'(b) - K(f)) >= 0`` (non-strict, checked against
    ``-tol``)."""
    f = _as_expr(f)
    fev = DerivEvaluator(f)
    kf = (fev.value(b) - fev.value(a)) / (b - a)
    left = fev.derivative(a, 1) - kf
    right = fev.derivative(b, 1) - kf
    if tol is None:
        tol = 1e-12 * sample_scale([fev], a, b, 1)
    product = left * right
    return ConditionReport(
        left_factor=left,
        right_factor=right,
        product=product,
        m_f=0.0,
        satisfied=product >= -tol,
        tolerance_used=tol,
    )


def trahan_check_general(f, a: float, b: float, n: int, tol: float | None = None) -> ConditionReport:
    """Order-``n`` sufficient condition

    ``(f^(n)(a)(a-b)^n/n! + M) (f^(n)(b)(a-b)^n/n! + M) >= 0``

    with ``M = T_{n-1}(f, b)(a) - f(a)``."""
    if n < 1:
        raise ValueError(f"order n must be positive, got {n}")
    f = _as_expr(f)
    fev = DerivEvaluator(f)
    m_f = taylor_poly_eval(f, b, n - 1, a) - fev.value(a)
    c = (a - b) ** n / math.factorial(n)
    left = fev.derivative(a, n) * c + m_f
    right = fev.derivative(b, n) * c + m_f
    if tol is None:
        tol = 1e-12 * sample_scale([fev], a, b, n)
    product = left * right
    return ConditionReport(
        left_factor=left,
        right_factor=right,
        product=product,
        m_f=m_f,
        satisfied=product >= -tol,
        tolerance_used=tol,
    )


# -- two-function reduction ----------------------------------------------------


def two_function_aux(f, g, a: float, b: float, n: int) -> Expr:
    """The combination ``h = f - K(f^(n), g^(n)) g`` whose order-``n``
    endpoint derivatives agree by construction."""
    f = _as_expr(f)
    g = _as_expr(g)
    k = k_ratio(f, a, b, n, g=g)
    return Binary("sub", f, Binary("mul", Constant(k), g))


def two_function_sign_value(f, g, a: float, b: float, n: int) -> float:
    """``F'(b) (F(b) - F(a))`` for the auxiliary function
    ``F = phi^(n-1) - K(f^(n), g^(n)) psi^(n-1)`` built from the divided
    differences of ``f`` and ``g``; non-positive whenever the inputs are
    valid, which is what guarantees a two-function witness."""
    f = _as_expr(f)
    g = _as_expr(g)
    kfg = k_ratio(f, a, b, n, g=g)
    fev = DerivEvaluator(f)
    gev = DerivEvaluator(g)
    f_b = divided_diff_eval(f, a, n, b) - kfg * divided_diff_eval(g, a, n, b)
    f_a = (fev.derivative(a, n) - kfg * gev.derivative(a, n)) / n
    gap_f = taylor_poly_eval(f, b, n, a) - fev.value(a)
    gap_g = taylor_poly_eval(g, b, n, a) - gev.value(a)
    deriv_b = (
        (-1.0) ** n * math.factorial(n) / (b - a) ** (n + 1) * (gap_f - kfg * gap_g)
    )
    return deriv_b * (f_b - f_a)


def problem_scale(problem: MvtProblem) -> float:
    """Sampled magnitude reference for a problem (see ``sample_scale``)."""
    return ResidualEvaluator(problem).scale
