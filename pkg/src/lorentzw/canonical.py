"""Canonical parameters: construction, verification and reparametrization.

A surface is canonically parametrized when f_i^2 g_i' h_i' has absolute value
1/16 on both curves; then E^2 sqrt(K^2 - kappa^2) = 1.

Reparametrization uses u = p(a) + q(b), v = p(a) - q(b) with a = u_bar + v_bar,
b = u_bar - v_bar, so the new curves are beta(2 p(z)) and theta(2 q(z)). The
maps P = 2p and Q = 2q solve

    P'(z) = s / sqrt(4 |f(P)| sqrt|g'(P) h'(P)|),

which makes the new generating data canonical.
"""

import csv
import io
from dataclasses import dataclass

import numpy as np

from . import exprlang
from .errors import (
    ConstructionError,
    DomainError,
    PreconditionError,
    StiffnessError,
)
from .functions import ComposedFunction, CurveMap, ExprFunction
from .nullcurve import NullCurve, find_vanishing, from_dict as curve_from_dict
from .surface import WeierstrassSurface

CANONICAL_CONSTANT = 1.0 / 16.0
ODE_TOL = 1e-10
MIN_STEP_FRACTION = 1e-12


# -- construction -----------------------------------------------------------

def canonical_factor(g, h):
    """The expression 1/(4 sqrt|g' h'|) for generating functions g, h."""
    g = exprlang.parse(g) if isinstance(g, str) else g
    h = exprlang.parse(h) if isinstance(h, str) else h
    product = exprlang.differentiate(g) * exprlang.differentiate(h)
    return exprlang.simplify(exprlang.Num(1.0) / (exprlang.Num(4.0) * exprlang.Func("sqrt", exprlang.Func("abs", product))))


def make_canonical(g1, h1, g2, h2, domain1, domain2=None, t0_1=None, t0_2=None, grid=None, name=None):
    """Surface with f_i = 1/(4 sqrt|g_i' h_i'|).

    Args:
        g1, h1, g2, h2: expressions (text or Expr) in t.
        domain1, domain2: parameter intervals of the two curves; domain2
            defaults to domain1.
        grid: optional (u, v) arrays on which (g1-g2)(h1-h2) != 0 and
            g1' g2' h1' h2' > 0 are required.

    Raises:
        ConstructionError: g_i' h_i' vanishes on a domain, or the grid
            conditions fail; the message names the offending point.
    """
    domain2 = domain1 if domain2 is None else domain2
    curves = []
    for g, h, dom, t0 in ((g1, h1, domain1, t0_1), (g2, h2, domain2, t0_2)):
        g = exprlang.parse(g) if isinstance(g, str) else g
        h = exprlang.parse(h) if isinstance(h, str) else h
        product = ExprFunction(exprlang.simplify(exprlang.differentiate(g) * exprlang.differentiate(h)))
        bad = find_vanishing(product, dom)
        if bad is not None:
            raise ConstructionError(f"g' h' vanishes or is undefined near t={bad}")
        curves.append(NullCurve(canonical_factor(g, h), g, h, domain=dom, t0=t0))
    surface = WeierstrassSurface(curves[0], curves[1], name=name)
    if grid is not None:
        _check_grid(surface, *grid)
    return surface


def _check_grid(S, u, v):
    u, v = np.broadcast_arrays(np.asarray(u, dtype=float), np.asarray(v, dtype=float))
    p = S.beta.generators(u + v)
    q = S.theta.generators(u - v)
    gap = (p["g"] - q["g"]) * (p["h"] - q["h"])
    prod = p["dg"] * p["dh"] * q["dg"] * q["dh"]
    for label, bad in (("(g1-g2)(h1-h2) vanishes", np.abs(gap) <= 1e-12),
                       ("g1' g2' h1' h2' is not positive", prod <= 0)):
        if np.any(bad):
            idx = np.argwhere(bad)[0]
            raise ConstructionError(f"{label} at (u, v) = ({u[tuple(idx)]}, {v[tuple(idx)]})")


# -- verification -------------------------------------------------------------

def canonical_residuals(S, u, v):
    """Pointwise residuals of the canonical conditions.

    Returns a dict of arrays:
        orthogonality: f1^2 g1' h1' - f2^2 g2' h2' (zero iff sigma(x,x) is
            orthogonal to sigma(x,y)),
        normalization: largest deviation of |f_i^2 g_i' h_i'| from 1/16,
        area: E^2 sqrt(K^2 - kappa^2) - 1 (NaN where the deficit is negative).
    """
    from .curvature import deficit_closed_form

    u, v = np.broadcast_arrays(np.asarray(u, dtype=float), np.asarray(v, dtype=float))
    p = S.beta.generators(u + v)
    q = S.theta.generators(u - v)
    c1 = p["f"] ** 2 * p["dg"] * p["dh"]
    c2 = q["f"] ** 2 * q["dg"] * q["dh"]
    normalization = np.maximum(np.abs(np.abs(c1) - CANONICAL_CONSTANT), np.abs(np.abs(c2) - CANONICAL_CONSTANT))
    E = np.asarray(S.first_form(u, v)[0])
    deficit = np.asarray(deficit_closed_form(S, u, v))
    with np.errstate(invalid="ignore"):
        area = E**2 * np.sqrt(np.where(deficit >= 0, deficit, np.nan)) - 1.0
    return {"orthogonality": c1 - c2, "normalization": normalization, "area": area}


@dataclass(frozen=True)
class CanonicalReport:
    orthogonality: float
    normalization: float
    area: float
    points: int
    tol: float

    @property
    def max_residual(self):
        return max(self.orthogonality, self.normalization, self.area)

    @property
    def passed(self):
        return self.max_residual <= self.tol

    def to_dict(self):
        return {"orthogonality": self.orthogonality, "normalization": self.normalization, "area": self.area,
                "points": self.points, "tol": self.tol, "passed": self.passed}


def verify_canonical(S, u, v, tol=1e-9):
    """Largest canonical-condition residuals over the admissible points of a grid.

    Points where E vanishes are skipped. A negative deficit makes the area
    residual infinite.
    """
    u, v = np.broadcast_arrays(np.asarray(u, dtype=float), np.asarray(v, dtype=float))
    keep = S.admissible(u, v)
    u, v = u[keep], v[keep]
    if u.size == 0:
        return CanonicalReport(0.0, 0.0, 0.0, 0, tol)
    res = canonical_residuals(S, u, v)
    area = np.abs(res["area"])
    area_max = float(np.inf) if np.any(np.isnan(area)) else float(np.max(area))
    return CanonicalReport(
        orthogonality=float(np.max(np.abs(res["orthogonality"]))),
        normalization=float(np.max(res["normalization"])),
        area=area_max, points=int(u.size), tol=tol,
    )


# -- reparametrization --------------------------------------------------------

def rate_expression(curve, sign=1):
    """Expr for s / sqrt(4 |f| sqrt|g' h'|), the slope of the curve map."""
    if curve.kind != "type2" or not isinstance(curve.f, ExprFunction):
        raise PreconditionError("reparametrization needs expression-based type-2 curves")
    E = exprlang
    gh = E.simplify(E.differentiate(curve.g.expr) * E.differentiate(curve.h.expr))
    inside = E.Num(4.0) * E.Func("abs", curve.f.expr) * E.Func("sqrt", E.Func("abs", gh))
    return E.simplify(E.Num(float(sign)) / E.Func("sqrt", inside))


class _MapField:
    """Right-hand side of P' = rate(P) with the precondition guards."""

    def __init__(self, curve, sign):
        self.curve = curve
        self.rate = ExprFunction(rate_expression(curve, sign))
        self.product = ExprFunction(exprlang.simplify(
            exprlang.differentiate(curve.g.expr) * exprlang.differentiate(curve.h.expr)))
        self.f_sign = None
        self.gh_sign = None
        self.start = None

    def __call__(self, t):
        lo, hi = self.curve.domain
        if not lo <= t <= hi:
            raise PreconditionError(f"curve map left the curve domain [{lo}, {hi}] at t={t}")
        try:
            f = float(self.curve.f(t))
            gh = float(self.product(t))
            rate = float(self.rate(t))
        except DomainError as exc:
            raise PreconditionError(f"f or g' h' vanishes or is undefined at t={t}") from exc
        if self.f_sign is None:
            self.f_sign, self.gh_sign = np.sign(f), np.sign(gh)
            self.start = (abs(f), abs(gh))
        if np.sign(f) != self.f_sign or np.sign(gh) != self.gh_sign or f == 0.0 or gh == 0.0:
            raise PreconditionError(f"f or g' h' changes sign near t={t}")
        return rate

    def near_zero(self, t, ratio=1e-8):
        """True when f or g' h' at t is negligible against its starting size."""
        f = abs(float(self.curve.f(t)))
        gh = abs(float(self.product(t)))
        return f <= ratio * self.start[0] or gh <= ratio * self.start[1]


def _rk4(field, y, h):
    k1 = field(y)
    k2 = field(y + 0.5 * h * k1)
    k3 = field(y + 0.5 * h * k2)
    k4 = field(y + h * k3)
    return y + h * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0


def integrate_map(field, y0, z0, z1, step, tol=ODE_TOL, min_step=None, max_step=None):
    """Classical RK4 with step doubling from (z0, y0) to z1 (either direction).

    Returns knot arrays (z, y) ordered from z0 towards z1.

    Raises:
        StiffnessError: the accepted step would fall below ``min_step``.
        PreconditionError: propagated from ``field``.
    """
    direction = 1.0 if z1 >= z0 else -1.0
    length = abs(z1 - z0)
    min_step = MIN_STEP_FRACTION * max(length, 1e-300) if min_step is None else min_step
    max_step = step if max_step is None else max_step
    zs, ys = [z0], [y0]
    z, y, h = z0, y0, min(step, max_step)
    field(y0)
    while direction * (z1 - z) > 1e-14 * max(length, 1.0):
        h = min(h, abs(z1 - z))
        try:
            full = _rk4(field, y, direction * h)
            half = _rk4(field, y, direction * h / 2)
            two = _rk4(field, half, direction * h / 2)
        except PreconditionError:
            if h / 2 >= min_step:
                h /= 2
                continue
            raise
        err = abs(two - full) / 15.0
        if err <= tol:
            y = two + (two - full) / 15.0
            z = z + direction * h
            if abs(z1 - z) <= 1e-14 * max(length, 1.0):
                z = z1
            zs.append(z)
            ys.append(y)
            grow = 4.0 if err == 0 else min(4.0, 0.9 * (tol / err) ** 0.2)
            h = min(max_step, h * max(grow, 1.0))
        else:
            h *= max(0.2, 0.9 * (tol / err) ** 0.2)
        if h < min_step:
            near_zero = getattr(field, "near_zero", None)
            if near_zero is not None and near_zero(y):
                raise PreconditionError(f"f or g' h' vanishes near t={y}")
            raise StiffnessError(f"step fell below {min_step:.3e} near z={z} (map value {y})")
    return np.array(zs), np.array(ys)


def _solve_map(curve, sign, z0, t0, step, span, tol):
    field = _MapField(curve, sign)
    kwargs = dict(tol=tol, min_step=MIN_STEP_FRACTION * span, max_step=step)
    zb, yb = integrate_map(field, t0, z0, z0 - span, step, **kwargs)
    zf, yf = integrate_map(field, t0, z0, z0 + span, step, **kwargs)
    z = np.concatenate([zb[::-1], zf[1:]])
    y = np.concatenate([yb[::-1], yf[1:]])
    return CurveMap(z, y, field.rate)


@dataclass
class ReparamSolution:
    """The parameter change u = p(a) + q(b), v = p(a) - q(b).

    ``beta_map`` and ``theta_map`` carry P = 2p and Q = 2q, the maps applied
    to the curve parameters.
    """

    beta_map: CurveMap
    theta_map: CurveMap
    z0: float
    s_p: int
    s_q: int

    @property
    def interval(self):
        lo = max(self.beta_map.interval[0], self.theta_map.interval[0])
        hi = min(self.beta_map.interval[1], self.theta_map.interval[1])
        return lo, hi

    def p(self, z):
        return 0.5 * self.beta_map(z)

    def q(self, z):
        return 0.5 * self.theta_map(z)

    def parameter_change(self, ubar, vbar):
        """Old parameters (u, v) of the new parameters (u_bar, v_bar)."""
        ubar, vbar = np.broadcast_arrays(np.asarray(ubar, dtype=float), np.asarray(vbar, dtype=float))
        pa = self.p(ubar + vbar)
        qb = self.q(ubar - vbar)
        return pa + qb, pa - qb

    def knots(self):
        lo, hi = self.interval
        z = np.union1d(self.beta_map.z, self.theta_map.z)
        return z[(z >= lo) & (z <= hi)]

    def ode_residual(self, at="knots"):
        """max |16 p'^2 |f(2p)| sqrt|g'h'(2p)| - 1| over both maps.

        ``at`` is "knots" or "midpoints"; slopes come from the interpolant.
        """
        worst = 0.0
        for m in (self.beta_map, self.theta_map):
            z = m.z if at == "knots" else 0.5 * (m.z[1:] + m.z[:-1])
            slope = m._spline.derivative()(z)
            expected = m.rate(m(z))
            worst = max(worst, float(np.max(np.abs(slope**2 / expected**2 - 1.0))))
        return worst

    def rows(self):
        z = self.knots()
        return np.column_stack([z, self.p(z), self.q(z)])

    def to_csv(self, stream=None):
        """Knot table with header ``z,p,q``; returns the text when no stream is given."""
        out = io.StringIO() if stream is None else stream
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(["z", "p", "q"])
        for row in self.rows():
            writer.writerow([repr(float(x)) for x in row])
        return out.getvalue() if stream is None else None


class ReparametrizedCurve(NullCurve):
    """The type-2 curve z -> base(P(z)) with canonical generating data.

    f_bar = P' f(P), g_bar = g(P), h_bar = h(P); the base point is z0.
    """

    def __init__(self, base, curve_map, sign, z0):
        if base.kind != "type2":
            raise PreconditionError("only type-2 curves can be reparametrized")
        self.base = base
        self.curve_map = curve_map
        self.sign = int(sign)
        outer_f = exprlang.simplify(base.f.expr * curve_map.rate.expr)
        super().__init__(
            ComposedFunction(ExprFunction(outer_f), curve_map),
            ComposedFunction(base.g, curve_map),
            ComposedFunction(base.h, curve_map),
            domain=curve_map.interval, t0=z0, check=False,
        )

    def to_dict(self):
        return {
            "kind": "reparametrized",
            "base": self.base.to_dict(),
            "sign": self.sign,
            "z0": self.t0,
            "map": {"z": [float(x) for x in self.curve_map.z], "t": [float(x) for x in self.curve_map.values]},
        }

    @classmethod
    def from_dict(cls, doc):
        base = curve_from_dict(doc["base"], check=False)
        rate = ExprFunction(rate_expression(base, doc["sign"]))
        curve_map = CurveMap(doc["map"]["z"], doc["map"]["t"], rate)
        return cls(base, curve_map, doc["sign"], doc["z0"])

    def __repr__(self):
        return f"ReparametrizedCurve(base={self.base!r}, sign={self.sign}, domain={self.domain})"


def reparametrize_to_canonical(S, z0=None, t0=None, s0=None, step=None, span=None, s_p=1, s_q=1, tol=ODE_TOL):
    """Solve for the curve maps and return (solution, canonical surface).

    Args:
        S: surface with expression-based type-2 curves.
        z0: parameter value of the new base point; defaults to t0.
        t0, s0: curve parameters mapped to z0; default to the domain centers.
        step: largest RK4 step; defaults to span/64.
        span: the maps are built on [z0 - span, z0 + span]; defaults to a
            quarter of the shorter domain length.
        s_p, s_q: square-root branches (+1 or -1).

    Raises:
        PreconditionError: f or g'h' vanishes or changes sign on the swept
            range, or a map leaves its curve domain.
        StiffnessError: step control collapsed.
    """
    if s_p not in (-1, 1) or s_q not in (-1, 1):
        raise ValueError("branch signs must be +1 or -1")
    db, dt = S.beta.domain, S.theta.domain
    t0 = 0.5 * (db[0] + db[1]) if t0 is None else float(t0)
    s0 = 0.5 * (dt[0] + dt[1]) if s0 is None else float(s0)
    z0 = t0 if z0 is None else float(z0)
    if span is None:
        span = 0.25 * min(db[1] - db[0], dt[1] - dt[0])
    step = span / 64.0 if step is None else float(step)
    if not (span > 0 and step > 0):
        raise ValueError("span and step must be positive")
    beta_map = _solve_map(S.beta, s_p, z0, t0, step, span, tol)
    theta_map = _solve_map(S.theta, s_q, z0, s0, step, span, tol)
    solution = ReparamSolution(beta_map, theta_map, z0, s_p, s_q)
    beta = ReparametrizedCurve(S.beta, beta_map, s_p, z0)
    theta = ReparametrizedCurve(S.theta, theta_map, s_q, z0)
    name = f"{S.name} (canonical)" if S.name else None
    return solution, WeierstrassSurface(beta, theta, name=name)
