"""Dual and hyper-dual scalar algebras.

A :class:`HyperDual` carries ``(v, dx, dy, dxy)`` — the value, both first
partials, and the mixed second partial — through arithmetic exactly, so one
evaluation of an expression yields every derivative the rectangle theorems
need, with no truncation error and no step-size tuning.

Components are ordinarily floats, but numpy arrays broadcast through the same
formulas, which lets a residual field be screened on a whole grid in one pass.
"""

from __future__ import annotations

import math
import sys

import numpy as np

from .expr import EvaluationError, Expression, evaluate, variables

__all__ = [
    "Dual",
    "HyperDual",
    "eval_dual",
    "eval_hyperdual",
    "finite_difference_oracle",
    "lift",
    "seed_x",
    "seed_y",
]

_CBRT_EPS = sys.float_info.epsilon ** (1.0 / 3.0)


def _as_component(v):
    return v if isinstance(v, np.ndarray) else float(v)


def _any(cond) -> bool:
    return bool(cond.any()) if isinstance(cond, np.ndarray) else bool(cond)


class HyperDual:
    """Four-component truncated number: value, d/dx, d/dy, d2/dxdy.

    Multiplication uses the second-order Leibniz rule
    ``(ab)_xy = a b_xy + a_xy b + a_x b_y + a_y b_x``; the terms are grouped in
    symmetric pairs so that products commute bitwise and swapping the x/y seed
    roles reproduces the mixed partial exactly.
    """

    __slots__ = ("v", "dx", "dy", "dxy")

    def __init__(self, v, dx=0.0, dy=0.0, dxy=0.0):
        self.v = v
        self.dx = dx
        self.dy = dy
        self.dxy = dxy

    def __repr__(self) -> str:
        return f"HyperDual(v={self.v!r}, dx={self.dx!r}, dy={self.dy!r}, dxy={self.dxy!r})"

    def __eq__(self, other):
        if not isinstance(other, HyperDual):
            return NotImplemented
        return (
            self.v == other.v
            and self.dx == other.dx
            and self.dy == other.dy
            and self.dxy == other.dxy
        )

    # -- ring operations -----------------------------------------------------

    def __add__(self, other):
        o = _lift_hd(other)
        if o is None:
            return NotImplemented
        return HyperDual(self.v + o.v, self.dx + o.dx, self.dy + o.dy, self.dxy + o.dxy)

    __radd__ = __add__

    def __sub__(self, other):
        o = _lift_hd(other)
        if o is None:
            return NotImplemented
        return HyperDual(self.v - o.v, self.dx - o.dx, self.dy - o.dy, self.dxy - o.dxy)

    def __rsub__(self, other):
        o = _lift_hd(other)
        if o is None:
            return NotImplemented
        return HyperDual(o.v - self.v, o.dx - self.dx, o.dy - self.dy, o.dxy - self.dxy)

    def __neg__(self):
        return HyperDual(-self.v, -self.dx, -self.dy, -self.dxy)

    def __mul__(self, other):
        o = _lift_hd(other)
        if o is None:
            return NotImplemented
        a, b = self, o
        return HyperDual(
            a.v * b.v,
            a.v * b.dx + a.dx * b.v,
            a.v * b.dy + a.dy * b.v,
            (a.v * b.dxy + a.dxy * b.v) + (a.dx * b.dy + a.dy * b.dx),
        )

    __rmul__ = __mul__

    def reciprocal(self) -> "HyperDual":
        if _any(self.v == 0):
            raise EvaluationError("division by zero")
        inv = 1.0 / self.v
        return self._chain(inv, -inv * inv, 2.0 * (inv * inv) * inv)

    def __truediv__(self, other):
        o = _lift_hd(other)
        if o is None:
            return NotImplemented
        return self * o.reciprocal()

    def __rtruediv__(self, other):
        o = _lift_hd(other)
        if o is None:
            return NotImplemented
        return o * self.reciprocal()

    def __pow__(self, other):
        if isinstance(other, HyperDual):
            if (
                isinstance(other.v, float)
                and other.dx == 0.0
                and other.dy == 0.0
                and other.dxy == 0.0
            ):
                return self.__pow__(other.v)
            if _any(self.v <= 0):
                raise EvaluationError("power with a varying exponent needs a positive base")
            return (other * self.log()).exp()
        if isinstance(other, (int, float)):
            p = float(other)
            if p.is_integer():
                return self._int_pow(int(p))
            if _any(self.v <= 0):
                raise EvaluationError("fractional power needs a positive base")
            return self._chain(
                self.v ** p,
                p * self.v ** (p - 1.0),
                p * (p - 1.0) * self.v ** (p - 2.0),
            )
        return NotImplemented

    def __rpow__(self, base):
        o = _lift_hd(base)
        if o is None:
            return NotImplemented
        return o.__pow__(self)

    def _int_pow(self, n: int) -> "HyperDual":
        # repeated multiplication keeps integer powers exact
        if n == 0:
            return HyperDual(1.0)
        if n < 0:
            return self.reciprocal()._int_pow(-n)
        out = self
        for _ in range(n - 1):
            out = out * self
        return out

    # -- unary functions via the second-order chain rule ----------------------

    def _chain(self, value, d1, d2) -> "HyperDual":
        # value = u(v), d1 = u'(v), d2 = u''(v)
        return HyperDual(
            value,
            d1 * self.dx,
            d1 * self.dy,
            d1 * self.dxy + d2 * (self.dx * self.dy),
        )

    def _mathlib(self):
        return np if isinstance(self.v, np.ndarray) else math

    def sin(self) -> "HyperDual":
        m = self._mathlib()
        return self._chain(m.sin(self.v), m.cos(self.v), -m.sin(self.v))

    def cos(self) -> "HyperDual":
        m = self._mathlib()
        return self._chain(m.cos(self.v), -m.sin(self.v), -m.cos(self.v))

    def exp(self) -> "HyperDual":
        e = self._mathlib().exp(self.v)
        return self._chain(e, e, e)

    def log(self) -> "HyperDual":
        if _any(self.v <= 0):
            raise EvaluationError("log of a non-positive value")
        inv = 1.0 / self.v
        return self._chain(self._mathlib().log(self.v), inv, -inv * inv)

    def sqrt(self) -> "HyperDual":
        if _any(self.v <= 0):
            raise EvaluationError("sqrt needs a positive argument for its derivatives")
        r = self._mathlib().sqrt(self.v)
        return self._chain(r, 0.5 / r, -0.25 / (r * self.v))


def _lift_hd(value):
    if isinstance(value, HyperDual):
        return value
    if isinstance(value, (int, float)):
        return HyperDual(float(value))
    return None


def seed_x(x0) -> HyperDual:
    return HyperDual(_as_component(x0), 1.0, 0.0, 0.0)


def seed_y(y0) -> HyperDual:
    return HyperDual(_as_component(y0), 0.0, 1.0, 0.0)


def lift(c) -> HyperDual:
    return HyperDual(_as_component(c))


def eval_hyperdual(f: Expression, x0, y0) -> HyperDual:
    """Value, both first partials, and the mixed partial of ``f`` at ``(x0, y0)``."""
    out = evaluate(f, seed_x(x0), seed_y(y0))
    if not isinstance(out, HyperDual):
        out = lift(out)
    comps = (out.v, out.dx, out.dy, out.dxy)
    if all(isinstance(c, float) for c in comps):
        if not all(math.isfinite(c) for c in comps):
            raise EvaluationError("non-finite derivative component")
    return out


class Dual:
    """Two-component number ``v + eps*d`` for single-variable first derivatives."""

    __slots__ = ("v", "d")

    def __init__(self, v, d=0.0):
        self.v = v
        self.d = d

    def __repr__(self) -> str:
        return f"Dual(v={self.v!r}, d={self.d!r})"

    def __eq__(self, other):
        if not isinstance(other, Dual):
            return NotImplemented
        return self.v == other.v and self.d == other.d

    def __add__(self, other):
        o = _lift_dual(other)
        if o is None:
            return NotImplemented
        return Dual(self.v + o.v, self.d + o.d)

    __radd__ = __add__

    def __sub__(self, other):
        o = _lift_dual(other)
        if o is None:
            return NotImplemented
        return Dual(self.v - o.v, self.d - o.d)

    def __rsub__(self, other):
        o = _lift_dual(other)
        if o is None:
            return NotImplemented
        return Dual(o.v - self.v, o.d - self.d)

    def __neg__(self):
        return Dual(-self.v, -self.d)

    def __mul__(self, other):
        o = _lift_dual(other)
        if o is None:
            return NotImplemented
        return Dual(self.v * o.v, self.v * o.d + self.d * o.v)

    __rmul__ = __mul__

    def reciprocal(self) -> "Dual":
        if _any(self.v == 0):
            raise EvaluationError("division by zero")
        inv = 1.0 / self.v
        return Dual(inv, -inv * inv * self.d)

    def __truediv__(self, other):
        o = _lift_dual(other)
        if o is None:
            return NotImplemented
        return self * o.reciprocal()

    def __rtruediv__(self, other):
        o = _lift_dual(other)
        if o is None:
            return NotImplemented
        return o * self.reciprocal()

    def __pow__(self, other):
        if isinstance(other, Dual):
            if isinstance(other.v, float) and other.d == 0.0:
                return self.__pow__(other.v)
            if _any(self.v <= 0):
                raise EvaluationError("power with a varying exponent needs a positive base")
            return (other * self.log()).exp()
        if isinstance(other, (int, float)):
            p = float(other)
            if p.is_integer():
                return self._int_pow(int(p))
            if _any(self.v <= 0):
                raise EvaluationError("fractional power needs a positive base")
            return self._chain(self.v ** p, p * self.v ** (p - 1.0))
        return NotImplemented

    def __rpow__(self, base):
        o = _lift_dual(base)
        if o is None:
            return NotImplemented
        return o.__pow__(self)

    def _int_pow(self, n: int) -> "Dual":
        if n == 0:
            return Dual(1.0)
        if n < 0:
            return self.reciprocal()._int_pow(-n)
        out = self
        for _ in range(n - 1):
            out = out * self
        return out

    def _chain(self, value, d1) -> "Dual":
        return Dual(value, d1 * self.d)

    def _mathlib(self):
        return np if isinstance(self.v, np.ndarray) else math

    def sin(self) -> "Dual":
        m = self._mathlib()
        return self._chain(m.sin(self.v), m.cos(self.v))

    def cos(self) -> "Dual":
        m = self._mathlib()
        return self._chain(m.cos(self.v), -m.sin(self.v))

    def exp(self) -> "Dual":
        e = self._mathlib().exp(self.v)
        return self._chain(e, e)

    def log(self) -> "Dual":
        if _any(self.v <= 0):
            raise EvaluationError("log of a non-positive value")
        return self._chain(self._mathlib().log(self.v), 1.0 / self.v)

    def sqrt(self) -> "Dual":
        if _any(self.v <= 0):
            raise EvaluationError("sqrt needs a positive argument for its derivative")
        r = self._mathlib().sqrt(self.v)
        return self._chain(r, 0.5 / r)


def _lift_dual(value):
    if isinstance(value, Dual):
        return value
    if isinstance(value, (int, float)):
        return Dual(float(value))
    return None


def eval_dual(f: Expression, x0) -> Dual:
    """Value and first derivative of a single-variable (x-only) expression."""
    if "y" in variables(f):
        raise ValueError("expression must depend on x only")
    out = evaluate(f, Dual(_as_component(x0), 1.0), 0.0)
    if not isinstance(out, Dual):
        out = Dual(_as_component(out))
    if isinstance(out.v, float) and isinstance(out.d, float):
        if not (math.isfinite(out.v) and math.isfinite(out.d)):
            raise EvaluationError("non-finite derivative component")
    return out


def finite_difference_oracle(f: Expression, x0: float, y0: float) -> HyperDual:
    """Central-difference approximation of what :func:`eval_hyperdual` computes.

    First partials use the two-point central stencil with step
    ``max(1, |coordinate|) * eps**(1/3)``; the mixed partial uses the four-point
    cross stencil on the same steps.  Kept deliberately independent of the
    hyper-dual path so the two can check each other.
    """
    x0, y0 = float(x0), float(y0)
    hx = max(1.0, abs(x0)) * _CBRT_EPS
    hy = max(1.0, abs(y0)) * _CBRT_EPS

    def e(a: float, b: float) -> float:
        return evaluate(f, a, b)

    v = e(x0, y0)
    dx = (e(x0 + hx, y0) - e(x0 - hx, y0)) / (2.0 * hx)
    dy = (e(x0, y0 + hy) - e(x0, y0 - hy)) / (2.0 * hy)
    dxy = (
        e(x0 + hx, y0 + hy)
        - e(x0 + hx, y0 - hy)
        - e(x0 - hx, y0 + hy)
        + e(x0 - hx, y0 - hy)
    ) / (4.0 * hx * hy)
    return HyperDual(v, dx, dy, dxy)
