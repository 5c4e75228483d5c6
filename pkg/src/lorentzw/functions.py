"""Differentiable one-variable functions used as generating data.

Two kinds exist. ``ExprFunction`` wraps a parsed expression. ``ComposedFunction``
is ``F(P(z))`` where ``F`` is an expression and ``P`` a numerically integrated
monotone map with known slope ``P'(z) = rate(P(z))``; its derivative is again
of that form, ``(F' * rate)(P(z))``, so no numerical differentiation is needed.
"""

from functools import cached_property

import numpy as np
from scipy.interpolate import CubicHermiteSpline

from . import exprlang
from .errors import DomainError


class ExprFunction:
    def __init__(self, expr):
        if isinstance(expr, str):
            expr = exprlang.parse(expr)
        elif not isinstance(expr, exprlang.Expr):
            expr = exprlang.Num(float(expr))
        self.expr = expr

    def __call__(self, t):
        return exprlang.evaluate(self.expr, t)

    @cached_property
    def _derivative(self):
        return ExprFunction(exprlang.differentiate(self.expr))

    def derivative(self):
        return self._derivative

    def is_constant(self):
        return not exprlang.depends_on_t(self.expr)

    def to_json(self):
        return exprlang.to_string(self.expr)

    def __repr__(self):
        return f"ExprFunction({exprlang.to_string(self.expr)!r})"


class CurveMap:
    """Monotone map z -> P(z) sampled at knots, with slope P' = rate(P).

    Between knots the map is the cubic Hermite interpolant built from the
    knot values and the exact slopes ``rate(P_k)``.
    """

    def __init__(self, z, values, rate):
        z = np.asarray(z, dtype=float)
        values = np.asarray(values, dtype=float)
        if z.ndim != 1 or z.shape != values.shape or len(z) < 2:
            raise ValueError("knots and values must be 1-D arrays of equal length >= 2")
        if np.any(np.diff(z) <= 0):
            raise ValueError("knots must be strictly increasing")
        self.z = z
        self.values = values
        self.rate = rate if isinstance(rate, ExprFunction) else ExprFunction(rate)
        self._spline = CubicHermiteSpline(z, values, self.rate(values))

    @property
    def interval(self):
        return float(self.z[0]), float(self.z[-1])

    def __call__(self, z):
        arr = np.asarray(z, dtype=float)
        lo, hi = self.interval
        span = hi - lo
        if np.any(arr < lo - 1e-12 * span) or np.any(arr > hi + 1e-12 * span):
            bad = arr[(arr < lo) | (arr > hi)].flat[0] if arr.ndim else float(arr)
            raise DomainError(f"parameter {bad!r} outside the integrated interval [{lo}, {hi}]", None, bad)
        out = self._spline(np.clip(arr, lo, hi))
        return float(out) if arr.ndim == 0 else out

    def slope(self, z):
        return self.rate(self(z))


class ComposedFunction:
    def __init__(self, outer, curve_map):
        self.outer = outer if isinstance(outer, ExprFunction) else ExprFunction(outer)
        self.map = curve_map

    def __call__(self, z):
        return self.outer(self.map(z))

    @cached_property
    def _derivative(self):
        chained = exprlang.simplify(self.outer.derivative().expr * self.map.rate.expr)
        return ComposedFunction(ExprFunction(chained), self.map)

    def derivative(self):
        return self._derivative

    def is_constant(self):
        return self.outer.is_constant()

    def __repr__(self):
        return f"ComposedFunction({self.outer!r} o P)"


def as_function(value):
    if isinstance(value, (ExprFunction, ComposedFunction)):
        return value
    return ExprFunction(value)
