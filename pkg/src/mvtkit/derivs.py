"""Derivative extraction shared by the theorem formulas and the solver.

Every formula in this package consumes local Taylor coefficients
``t_i = f^(i)(x) / i!``.  Polynomial expressions are expanded to power-basis
coefficients once and then shifted with repeated synthetic division, which
is faster than jet composition and, because the full expansion is available,
lets residuals be evaluated in cancellation-free tail form near interval
endpoints.  Everything else goes through jet arithmetic.
"""

from __future__ import annotations

import math

import numpy as np

from .exprs import Expr, eval_jet, poly_coeffs


def taylor_shift(coeffs: list[float], x: float, m: int) -> list[float]:
    """Taylor coefficients ``t_0..t_m`` of the polynomial at ``x``.

    Repeated synthetic division by ``(X - x)``: the remainder of pass ``i``
    is ``f^(i)(x) / i!``.
    """
    out = []
    work = list(coeffs)
    for _ in range(m + 1):
        if not work:
            out.append(0.0)
            continue
        acc = work[-1]
        quot = [0.0] * (len(work) - 1)
        for j in range(len(work) - 2, -1, -1):
            quot[j] = acc
            acc = work[j] + acc * x
        out.append(acc)
        work = quot
    return out


def taylor_shift_grid(coeffs: list[float], xs: np.ndarray, m: int) -> np.ndarray:
    """Vectorized :func:`taylor_shift`; returns shape ``(m + 1, len(xs))``."""
    npts = xs.shape[0]
    out = np.zeros((m + 1, npts))
    work = [np.full(npts, cj) for cj in coeffs]
    for i in range(m + 1):
        if not work:
            break
        acc = work[-1]
        quot = []
        for j in range(len(work) - 2, -1, -1):
            quot.append(acc)
            acc = work[j] + acc * xs
        out[i] = acc
        quot.reverse()
        work = quot
    return out


class DerivEvaluator:
    """Taylor coefficients of one expression at arbitrary points."""

    def __init__(self, expr: Expr):
        self.expr = expr
        self._poly = poly_coeffs(expr)

    @property
    def is_polynomial(self) -> bool:
        return self._poly is not None

    @property
    def degree(self) -> int | None:
        return None if self._poly is None else len(self._poly) - 1

    def taylor_at(self, x: float, m: int) -> list[float]:
        """``[t_0, ..., t_m]`` with ``t_i = f^(i)(x) / i!``."""
        if self._poly is not None:
            return taylor_shift(self._poly, x, m)
        return list(eval_jet(self.expr, x, m).coeffs)

    def full_taylor_at(self, x: float) -> list[float] | None:
        """Complete expansion at ``x`` (polynomials only): exact enough that
        ``f(a) = sum_i t_i (a - x)^i`` holds identically."""
        if self._poly is None:
            return None
        return taylor_shift(self._poly, x, len(self._poly) - 1)

    def taylor_grid(self, xs: np.ndarray, m: int) -> np.ndarray:
        """Shape ``(m + 1, len(xs))`` of Taylor coefficients per point."""
        if self._poly is not None:
            return taylor_shift_grid(self._poly, xs, m)
        out = np.empty((m + 1, xs.shape[0]))
        for j, x in enumerate(xs):
            out[:, j] = eval_jet(self.expr, float(x), m).coeffs
        return out

    def full_taylor_grid(self, xs: np.ndarray) -> np.ndarray | None:
        if self._poly is None:
            return None
        return taylor_shift_grid(self._poly, xs, len(self._poly) - 1)

    def value(self, x: float) -> float:
        return self.taylor_at(x, 0)[0]

    def derivative(self, x: float, i: int) -> float:
        return math.factorial(i) * self.taylor_at(x, i)[i]


def sample_scale(
    evaluators: list[DerivEvaluator],
    a: float,
    b: float,
    max_order: int,
    samples: int = 33,
) -> float:
    """Magnitude reference for relative tolerances.

    ``max(1, |f^(i)(x)|)`` over a uniform sample of the interval and all
    orders ``i <= max_order``, across all given functions.
    """
    scale = 1.0
    xs = np.linspace(a, b, samples)
    facts = np.array([math.factorial(i) for i in range(max_order + 1)])
    for ev in evaluators:
        t = ev.taylor_grid(xs, max_order)
        scale = max(scale, float((np.abs(t).max(axis=1) * facts).max()))
    return scale
