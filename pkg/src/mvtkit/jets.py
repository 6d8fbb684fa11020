"""Truncated Taylor-series ("jet") arithmetic.

A jet holds the value and scaled derivatives of a function at one expansion
point: coefficient ``i`` is ``f^(i)(x0) / i!``.  Storing Taylor coefficients
instead of raw derivatives keeps products free of binomial factors; raw
derivatives are recovered through :meth:`Jet.derivative`.

Everything is plain binary64.  Jets are immutable values: operations return
new instances, and two jets may only be combined when they share the same
base point and order (mismatches raise instead of truncating silently).
"""

from __future__ import annotations

import math
from dataclasses import dataclass


class DomainError(ValueError):
    """A value left the numeric domain: log/sqrt of a non-positive constant
    term, division by a jet with zero constant term, or a non-finite
    coefficient produced by overflow."""


@dataclass(frozen=True)
class Jet:
    """Taylor coefficients ``c_0..c_m`` of a function at ``base_point``."""

    base_point: float
    coeffs: tuple[float, ...]

    def __post_init__(self) -> None:
        coeffs = tuple(float(c) for c in self.coeffs)
        object.__setattr__(self, "coeffs", coeffs)
        object.__setattr__(self, "base_point", float(self.base_point))
        if not coeffs:
            raise ValueError("a jet needs at least the order-0 coefficient")
        for i, c in enumerate(coeffs):
            if not math.isfinite(c):
                raise DomainError(
                    f"non-finite coefficient c_{i}={c!r} at base point {self.base_point!r}"
                )

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    @property
    def value(self) -> float:
        return self.coeffs[0]

    def derivative(self, i: int) -> float:
        """Raw derivative ``f^(i)(base_point)``; out-of-range ``i`` raises."""
        if not 0 <= i <= self.order:
            raise IndexError(
                f"derivative order {i} outside stored range 0..{self.order}"
            )
        return math.factorial(i) * self.coeffs[i]

    def derivatives(self) -> tuple[float, ...]:
        """All raw derivatives ``(f(x0), f'(x0), ..., f^(m)(x0))``."""
        return tuple(math.factorial(i) * c for i, c in enumerate(self.coeffs))

    # -- arithmetic -----------------------------------------------------

    def _lift(self, other) -> "Jet | None":
        if isinstance(other, Jet):
            return other
        if isinstance(other, (int, float)):
            return constant(float(other), self.base_point, self.order)
        return None

    def _check_compatible(self, other: "Jet") -> None:
        if other.base_point != self.base_point:
            raise ValueError(
                f"mismatched base points {self.base_point!r} and {other.base_point!r}"
            )
        if other.order != self.order:
            raise ValueError(
                f"mismatched orders {self.order} and {other.order}"
            )

    def __neg__(self) -> "Jet":
        return Jet(self.base_point, tuple(-c for c in self.coeffs))

    def __add__(self, other) -> "Jet":
        rhs = self._lift(other)
        if rhs is None:
            return NotImplemented
        self._check_compatible(rhs)
        return Jet(
            self.base_point,
            tuple(x + y for x, y in zip(self.coeffs, rhs.coeffs)),
        )

    __radd__ = __add__

    def __sub__(self, other) -> "Jet":
        rhs = self._lift(other)
        if rhs is None:
            return NotImplemented
        self._check_compatible(rhs)
        return Jet(
            self.base_point,
            tuple(x - y for x, y in zip(self.coeffs, rhs.coeffs)),
        )

    def __rsub__(self, other) -> "Jet":
        lhs = self._lift(other)
        if lhs is None:
            return NotImplemented
        return lhs - self

    def __mul__(self, other) -> "Jet":
        rhs = self._lift(other)
        if rhs is None:
            return NotImplemented
        self._check_compatible(rhs)
        a, b = self.coeffs, rhs.coeffs
        out = []
        for k in range(self.order + 1):
            s = 0.0
            for i in range(k + 1):
                s += a[i] * b[k - i]
            out.append(s)
        return Jet(self.base_point, tuple(out))

    __rmul__ = __mul__

    def __truediv__(self, other) -> "Jet":
        rhs = self._lift(other)
        if rhs is None:
            return NotImplemented
        self._check_compatible(rhs)
        a, b = self.coeffs, rhs.coeffs
        if b[0] == 0.0:
            raise DomainError("division by jet with zero constant term")
        q: list[float] = []
        for k in range(self.order + 1):
            s = a[k]
            for i in range(k):
                s -= q[i] * b[k - i]
            q.append(s / b[0])
        return Jet(self.base_point, tuple(q))

    def __rtruediv__(self, other) -> "Jet":
        lhs = self._lift(other)
        if lhs is None:
            return NotImplemented
        return lhs / self


def variable(x0: float, order: int) -> Jet:
    """Jet of the identity function ``x -> x`` at ``x0``."""
    if order < 0:
        raise ValueError(f"order must be non-negative, got {order}")
    coeffs = [float(x0)] + [0.0] * order
    if order >= 1:
        coeffs[1] = 1.0
    return Jet(x0, tuple(coeffs))


def constant(value: float, x0: float, order: int) -> Jet:
    """Jet of the constant function ``x -> value`` at ``x0``."""
    if order < 0:
        raise ValueError(f"order must be non-negative, got {order}")
    return Jet(x0, (float(value),) + (0.0,) * order)


# -- elementary functions -----------------------------------------------
#
# Each recurrence comes from the defining ODE of the outer function applied
# to the composed series, e.g. (exp u)' = exp(u) u' gives the convolution
# below once derivatives are rewritten as shifted Taylor coefficients.


def exp(u: Jet) -> Jet:
    n = u.order
    uc = u.coeffs
    e = [0.0] * (n + 1)
    try:
        e[0] = math.exp(uc[0])
    except OverflowError:
        raise DomainError(f"exp overflow at constant term {uc[0]!r}") from None
    for m in range(1, n + 1):
        s = 0.0
        for j in range(1, m + 1):
            s += j * uc[j] * e[m - j]
        e[m] = s / m
    return Jet(u.base_point, tuple(e))


def ln(u: Jet) -> Jet:
    n = u.order
    uc = u.coeffs
    if uc[0] <= 0.0:
        raise DomainError(f"ln of non-positive constant term {uc[0]!r}")
    l = [0.0] * (n + 1)
    l[0] = math.log(uc[0])
    for m in range(1, n + 1):
        s = m * uc[m]
        for i in range(1, m):
            s -= uc[i] * (m - i) * l[m - i]
        l[m] = s / (m * uc[0])
    return Jet(u.base_point, tuple(l))


def _sin_cos(u: Jet) -> tuple[list[float], list[float]]:
    n = u.order
    uc = u.coeffs
    s = [0.0] * (n + 1)
    c = [0.0] * (n + 1)
    s[0] = math.sin(uc[0])
    c[0] = math.cos(uc[0])
    for m in range(1, n + 1):
        acc_s = 0.0
        acc_c = 0.0
        for i in range(m):
            w = (m - i) * uc[m - i]
            acc_s += c[i] * w
            acc_c -= s[i] * w
        s[m] = acc_s / m
        c[m] = acc_c / m
    return s, c


def sin(u: Jet) -> Jet:
    s, _ = _sin_cos(u)
    return Jet(u.base_point, tuple(s))


def cos(u: Jet) -> Jet:
    _, c = _sin_cos(u)
    return Jet(u.base_point, tuple(c))


def sqrt(u: Jet) -> Jet:
    n = u.order
    uc = u.coeffs
    if uc[0] <= 0.0:
        raise DomainError(f"sqrt of non-positive constant term {uc[0]!r}")
    r = [0.0] * (n + 1)
    r[0] = math.sqrt(uc[0])
    for m in range(1, n + 1):
        s = uc[m]
        for i in range(1, m):
            s -= r[i] * r[m - i]
        r[m] = s / (2.0 * r[0])
    return Jet(u.base_point, tuple(r))


def pow_int(u: Jet, k: int) -> Jet:
    """Integer power by repeated squaring; negative ``k`` goes through the
    series reciprocal and needs a nonzero constant term."""
    if k == 0:
        return constant(1.0, u.base_point, u.order)
    if k < 0:
        return constant(1.0, u.base_point, u.order) / pow_int(u, -k)
    result = None
    base = u
    e = k
    while e:
        if e & 1:
            result = base if result is None else result * base
        e >>= 1
        if e:
            base = base * base
    return result


def pow_const(u: Jet, p: float) -> Jet:
    """General power ``u^p`` for a constant real exponent.

    Integer exponents use repeated squaring (valid for any constant term,
    zero included when ``p >= 0``); everything else uses the power-rule ODE
    ``u w' = p w u'`` and needs a positive constant term.
    """
    if float(p).is_integer():
        return pow_int(u, int(p))
    uc = u.coeffs
    if uc[0] <= 0.0:
        raise DomainError(
            f"fractional power of non-positive constant term {uc[0]!r}"
        )
    n = u.order
    w = [0.0] * (n + 1)
    w[0] = uc[0] ** p
    for m in range(1, n + 1):
        s = 0.0
        for i in range(m):
            s += p * w[i] * (m - i) * uc[m - i]
        for i in range(1, m):
            s -= uc[i] * (m - i) * w[m - i]
        w[m] = s / (m * uc[0])
    return Jet(u.base_point, tuple(w))


_ELEMENTARY = {
    "exp": exp,
    "ln": ln,
    "sin": sin,
    "cos": cos,
    "sqrt": sqrt,
}


def apply(name: str, u: Jet) -> Jet:
    """Apply a named elementary function to a jet."""
    try:
        fn = _ELEMENTARY[name]
    except KeyError:
        raise ValueError(f"unknown elementary function {name!r}") from None
    return fn(u)
