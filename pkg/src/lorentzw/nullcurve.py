"""Null curves in R^4_2 given by their normal-form generating data.

Type 1:  beta'(t) = f(t) (1, e1, e2, e3),              e_i = +-1
Type 2:  beta'(t) = f(t) (1+gh, g-h, 1-gh, g+h)

Positions are antiderivatives fixed by beta(t0) = 0. They are cached on a
uniform grid of 1024 knots; each piece is integrated by a 10/20-point
Gauss-Legendre pair, and any piece missing the tolerance is redone by
adaptive Gauss-Kronrod (scipy's quad_vec).
"""

import threading

import numpy as np
from scipy.integrate import quad_vec

from . import exprlang
from .errors import ConstructionError, DomainError, QuadratureError
from .functions import ExprFunction, as_function

DEFAULT_QUAD_TOL = 1e-10
CHECK_SAMPLES = 4096
KNOTS = 1024
MAX_EVALUATIONS = 10**6

_GL10 = np.polynomial.legendre.leggauss(10)
_GL20 = np.polynomial.legendre.leggauss(20)


def type2_vector(f, g, h):
    """f (1+gh, g-h, 1-gh, g+h), broadcasting over array arguments."""
    f, g, h = np.broadcast_arrays(np.asarray(f, float), np.asarray(g, float), np.asarray(h, float))
    gh = g * h
    return np.stack([f * (1 + gh), f * (g - h), f * (1 - gh), f * (g + h)], axis=-1)


def case_b_vector(f, g, h):
    """The alternative normal form f (1+gh, g-h, g+h, 1-gh)."""
    f, g, h = np.broadcast_arrays(np.asarray(f, float), np.asarray(g, float), np.asarray(h, float))
    gh = g * h
    return np.stack([f * (1 + gh), f * (g - h), f * (g + h), f * (1 - gh)], axis=-1)


def sample_points(interval, n=CHECK_SAMPLES):
    a, b = interval
    return np.linspace(a, b, n + 2)[1:-1]


def find_vanishing(fn, interval, n=CHECK_SAMPLES, rel_tol=1e-12):
    """First sampled point where ``fn`` is undefined, zero, or changes sign; else None."""
    ts = sample_points(interval, n)
    try:
        vals = np.asarray(fn(ts), dtype=float)
    except DomainError as exc:
        return exc.value if exc.value is not None else float(ts[0])
    vals = np.broadcast_to(vals, ts.shape)
    scale = np.max(np.abs(vals)) if vals.size else 0.0
    small = np.abs(vals) <= rel_tol * scale
    if scale == 0.0 or np.any(small):
        return float(ts[np.argmax(small)]) if scale else float(ts[0])
    flips = np.nonzero(np.sign(vals[1:]) != np.sign(vals[:-1]))[0]
    if flips.size:
        return float(ts[flips[0] + 1])
    return None


class NullCurve:
    """A null curve on the interval ``domain`` with ``curve(t0) = 0``.

    Args:
        f, g, h: generating functions (expression text, Expr, or function
            objects). ``g`` and ``h`` are omitted for type 1.
        eps: the three signs of a type-1 curve.
        domain: (t_min, t_max).
        t0: base point; defaults to the domain midpoint clipped to 0 if 0 lies inside.
        check: sample the domain and reject generating data that is undefined
            or whose f vanishes.
    """

    def __init__(self, f, g=None, h=None, *, eps=None, domain=(-1.0, 1.0), t0=None, check=True):
        a, b = float(domain[0]), float(domain[1])
        if not (np.isfinite(a) and np.isfinite(b) and a < b):
            raise ConstructionError(f"domain must be a finite interval (a, b) with a < b, got {domain}")
        self.domain = (a, b)
        if t0 is None:
            t0 = 0.0 if a < 0.0 < b else 0.5 * (a + b)
        self.t0 = float(t0)
        if not a <= self.t0 <= b:
            raise ConstructionError(f"base point {t0} outside domain {domain}")
        self.f = as_function(f)
        if eps is not None:
            if g is not None or h is not None:
                raise ConstructionError("type-1 curves take f and eps only")
            eps = tuple(int(e) for e in eps)
            if len(eps) != 3 or any(e not in (-1, 1) for e in eps):
                raise ConstructionError(f"eps must be three signs +-1, got {eps}")
            self.kind = "type1"
            self.eps = eps
            self.direction = np.array([1.0, *eps])
            self.g = self.h = None
        else:
            if g is None or h is None:
                raise ConstructionError("type-2 curves need f, g and h")
            self.kind = "type2"
            self.eps = None
            self.g = as_function(g)
            self.h = as_function(h)
        self._lock = threading.Lock()
        self._cumulative = {}
        if check:
            self._check()

    @classmethod
    def type1(cls, f, eps, domain, t0=None, check=True):
        return cls(f, eps=eps, domain=domain, t0=t0, check=check)

    @classmethod
    def type2(cls, f, g, h, domain, t0=None, check=True):
        return cls(f, g, h, domain=domain, t0=t0, check=check)

    def _check(self):
        bad = find_vanishing(self.f, self.domain)
        if bad is not None:
            raise ConstructionError(f"f is undefined or vanishes near t={bad}")
        if self.kind == "type2":
            ts = sample_points(self.domain)
            for name in ("g", "h"):
                try:
                    getattr(self, name)(ts)
                except DomainError as exc:
                    raise ConstructionError(f"{name} is undefined at t={exc.value}") from exc

    # -- derivatives -------------------------------------------------------

    def _require_domain(self, t):
        arr = np.asarray(t, dtype=float)
        a, b = self.domain
        slack = 1e-12 * (b - a)
        if np.any(arr < a - slack) or np.any(arr > b + slack) or not np.all(np.isfinite(arr)):
            raise DomainError(f"parameter outside curve domain {self.domain}", None,
                              float(np.ravel(arr)[0]) if arr.size == 1 else None)
        return arr

    def derivative(self, t):
        """beta'(t); accepts arrays and returns shape (..., 4)."""
        t = self._require_domain(t)
        if self.kind == "type1":
            return np.multiply.outer(np.asarray(self.f(t)), self.direction)
        return type2_vector(self.f(t), self.g(t), self.h(t))

    def second_derivative(self, t):
        """beta''(t) by the product rule on the exact derivatives of f, g, h."""
        t = self._require_domain(t)
        df = self.f.derivative()(t)
        if self.kind == "type1":
            return np.multiply.outer(np.asarray(df), self.direction)
        f, g, h = self.f(t), self.g(t), self.h(t)
        dg, dh = self.g.derivative()(t), self.h.derivative()(t)
        dgh = dg * h + g * dh
        first = type2_vector(df, g, h)
        second = np.stack(np.broadcast_arrays(f * dgh, f * (dg - dh), -f * dgh, f * (dg + dh)), axis=-1)
        return first + second

    def generators(self, t):
        """(f, g, h) and their first derivatives at t, as a dict of arrays."""
        t = self._require_domain(t)
        if self.kind != "type2":
            raise ConstructionError("generating functions g, h exist only for type-2 curves")
        return {
            "f": self.f(t), "g": self.g(t), "h": self.h(t),
            "df": self.f.derivative()(t), "dg": self.g.derivative()(t), "dh": self.h.derivative()(t),
        }

    # -- positions ---------------------------------------------------------

    @property
    def knot_step(self):
        a, b = self.domain
        return (b - a) / KNOTS

    def _integrate(self, a, b, quad_tol):
        """Adaptive Gauss-Kronrod on one interval; the fallback path."""
        if a == b:
            return np.zeros(4)
        res, _err, info = quad_vec(
            self.derivative, a, b, epsabs=quad_tol, epsrel=quad_tol, norm="max",
            limit=MAX_EVALUATIONS // 42, full_output=True,
        )
        if not info.success or info.neval > MAX_EVALUATIONS:
            raise QuadratureError(
                f"quadrature on [{a}, {b}] missed tolerance {quad_tol} ({info.message}, {info.neval} evaluations)"
            )
        return np.asarray(res, dtype=float)

    def _integrate_many(self, lo, hi, quad_tol):
        """Integrals of beta' over [lo_i, hi_i], vectorized over intervals.

        The 20-point rule is accepted where it agrees with the 10-point rule
        to within the tolerance; other intervals are redone adaptively.
        """
        lo = np.asarray(lo, dtype=float)
        hi = np.asarray(hi, dtype=float)
        if lo.size == 0:
            return np.zeros((0, 4))
        half = 0.5 * (hi - lo)[:, None]
        mid = 0.5 * (hi + lo)[:, None]
        x20, w20 = _GL20
        x10, w10 = _GL10
        vals20 = self.derivative(mid + half * x20)  # (n, 20, 4)
        vals10 = self.derivative(mid + half * x10)
        est20 = half * np.einsum("j,njk->nk", w20, vals20)
        est10 = half * np.einsum("j,njk->nk", w10, vals10)
        err = np.max(np.abs(est20 - est10), axis=-1)
        scale = np.max(np.abs(est20), axis=-1)
        redo = np.nonzero(err > np.maximum(quad_tol, quad_tol * scale))[0]
        for i in redo:
            est20[i] = self._integrate(lo[i], hi[i], quad_tol)
        return est20

    def _knot_table(self, quad_tol):
        """Cumulative integrals at knots t0 + k*dt, as (k_min, values)."""
        with self._lock:
            cached = self._cumulative.get(quad_tol)
            if cached is not None:
                return cached
            a, b = self.domain
            dt = self.knot_step
            k_min = int(np.ceil((a - self.t0) / dt - 1e-9))
            k_max = int(np.floor((b - self.t0) / dt + 1e-9))
            ks = np.arange(k_min, k_max + 1)
            knots = np.clip(self.t0 + ks * dt, a, b)
            pieces = self._integrate_many(knots[:-1], knots[1:], quad_tol)
            values = np.zeros((len(ks), 4))
            zero = -k_min
            values[zero + 1:] = np.cumsum(pieces[zero:], axis=0)
            if zero > 0:
                values[:zero] = -np.cumsum(pieces[:zero][::-1], axis=0)[::-1]
            table = (k_min, knots, values)
            self._cumulative[quad_tol] = table
            return table

    def positions(self, ts, quad_tol=DEFAULT_QUAD_TOL):
        """beta(t) = integral of beta' from t0 to t, for an array of t."""
        ts = np.asarray(self._require_domain(ts), dtype=float)
        a, b = self.domain
        flat = np.clip(ts.ravel(), a, b)
        k_min, knots, values = self._knot_table(quad_tol)
        k = np.trunc((flat - self.t0) / self.knot_step).astype(int)
        k = np.clip(k, k_min, k_min + len(knots) - 1)
        idx = k - k_min
        out = values[idx] + self._integrate_many(knots[idx], flat, quad_tol)
        return out.reshape(ts.shape + (4,))

    def position(self, t, quad_tol=DEFAULT_QUAD_TOL):
        return self.positions(np.array([float(t)]), quad_tol)[0]

    # -- serialization -----------------------------------------------------

    def to_dict(self):
        if not all(isinstance(fn, ExprFunction) for fn in self._functions()):
            raise TypeError("only expression-based curves serialize through this path")
        out = {"kind": self.kind, "f": self.f.to_json()}
        if self.kind == "type1":
            out["eps"] = list(self.eps)
        else:
            out["g"] = self.g.to_json()
            out["h"] = self.h.to_json()
        out["domain"] = list(self.domain)
        out["t0"] = self.t0
        return out

    def _functions(self):
        return [fn for fn in (self.f, self.g, self.h) if fn is not None]

    def __repr__(self):
        if self.kind == "type1":
            return f"NullCurve(type1, f={self.f!r}, eps={self.eps}, domain={self.domain})"
        return f"NullCurve(type2, f={self.f!r}, g={self.g!r}, h={self.h!r}, domain={self.domain})"


def from_dict(doc, check=True):
    """Inverse of ``NullCurve.to_dict``; also accepts reparametrized curves."""
    kind = doc.get("kind")
    if kind == "type2":
        return NullCurve(doc["f"], doc["g"], doc["h"], domain=doc["domain"], t0=doc.get("t0"), check=check)
    if kind == "type1":
        return NullCurve(doc["f"], eps=doc["eps"], domain=doc["domain"], t0=doc.get("t0"), check=check)
    if kind == "reparametrized":
        from .canonical import ReparametrizedCurve

        return ReparametrizedCurve.from_dict(doc)
    raise ConstructionError(f"unknown curve kind {kind!r}")


def convert_case_b_to_a(f, g, h, interval, samples=CHECK_SAMPLES):
    """Rewrite f(1+gh, g-h, g+h, 1-gh) into the type-2 normal form.

    Substitutes g~ = (1-h)/(1+h), h~ = (1-g)/(1+g), f~ = 2f/((1+h~)(1+g~)).

    Raises:
        ConstructionError: 1+g or 1+h vanishes (or is undefined) on the sampled interval.
    """
    f, g, h = (exprlang.parse(x) if isinstance(x, str) else x for x in (f, g, h))
    for name, e in (("g", g), ("h", h)):
        bad = find_vanishing(ExprFunction(exprlang.Num(1.0) + e), interval, samples)
        if bad is not None:
            raise ConstructionError(f"1+{name} vanishes or is undefined near t={bad}")
    one = exprlang.Num(1.0)
    g_new = exprlang.simplify((one - h) / (one + h))
    h_new = exprlang.simplify((one - g) / (one + g))
    f_new = exprlang.simplify(exprlang.Num(2.0) * f / ((one + h_new) * (one + g_new)))
    return f_new, g_new, h_new
