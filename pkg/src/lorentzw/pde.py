"""Finite-difference check of the natural system for K and kappa.

With D = K^2 - kappa^2 and the hyperbolic Laplacian Lap = d_uu - d_vv, the
fields of a canonically parametrized surface satisfy

    (1/E) Lap ln D = 8 K,        (1/E) Lap ln((K + eps kappa)/(K - eps kappa)) = 4 eps kappa,

where 1/E = sign(E) D^(1/4). The sign of E is passed as the ``orientation``
field (all +1 when omitted) and kappa must be the smooth signed branch.
"""

import csv
import io
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from scipy.ndimage import binary_dilation

from . import exprlang
from .curvature import curvature_closed_forms
from .errors import ConstructionError, DomainError, MaskError

MARGIN = 3
MIN_NODES = 9


@dataclass
class ScalarField:
    """Values on a uniform lattice; ``values[i, j]`` sits at (u[i], v[j]).

    ``mask`` is True at excluded nodes; their values are never read.
    """

    u: np.ndarray
    v: np.ndarray
    values: np.ndarray
    mask: np.ndarray = None

    def __post_init__(self):
        self.u = np.asarray(self.u, dtype=float)
        self.v = np.asarray(self.v, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != (self.u.size, self.v.size):
            raise ValueError(f"values shape {self.values.shape} does not match grid {(self.u.size, self.v.size)}")
        for axis in (self.u, self.v):
            if axis.size < 2:
                raise ValueError("each axis needs at least two nodes")
            steps = np.diff(axis)
            if np.any(steps <= 0) or np.ptp(steps) > 1e-9 * abs(steps[0]) * max(1.0, axis.size):
                raise ValueError("grid axes must be uniform and increasing")
        mask = np.zeros(self.values.shape, dtype=bool) if self.mask is None else np.asarray(self.mask, dtype=bool)
        self.mask = mask | ~np.isfinite(self.values)

    @property
    def hu(self):
        return float((self.u[-1] - self.u[0]) / (self.u.size - 1))

    @property
    def hv(self):
        return float((self.v[-1] - self.v[0]) / (self.v.size - 1))

    @classmethod
    def from_function(cls, fn, u, v, mask=None):
        U, V = np.meshgrid(u, v, indexing="ij")
        return cls(u, v, fn(U, V), mask)

    def like(self, values, mask):
        return ScalarField(self.u, self.v, values, mask)

    def max_abs(self, region=None):
        keep = ~self.mask if region is None else (~self.mask & region)
        return float(np.max(np.abs(self.values[keep]))) if np.any(keep) else float("nan")

    def to_csv(self, stream=None):
        out = io.StringIO() if stream is None else stream
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(["u", "v", "value", "mask"])
        for i, uu in enumerate(self.u):
            for j, vv in enumerate(self.v):
                val = "" if self.mask[i, j] else repr(float(self.values[i, j]))
                writer.writerow([repr(float(uu)), repr(float(vv)), val, int(self.mask[i, j])])
        return out.getvalue() if stream is None else None

    @classmethod
    def from_csv(cls, stream):
        rows = list(csv.DictReader(stream))
        u = np.unique([float(r["u"]) for r in rows])
        v = np.unique([float(r["v"]) for r in rows])
        values = np.full((u.size, v.size), np.nan)
        mask = np.ones((u.size, v.size), dtype=bool)
        for r in rows:
            i = np.searchsorted(u, float(r["u"]))
            j = np.searchsorted(v, float(r["v"]))
            mask[i, j] = bool(int(r["mask"]))
            if r["value"]:
                values[i, j] = float(r["value"])
        return cls(u, v, values, mask)


def hyperbolic_laplacian(F):
    """Central differences of d_uu F - d_vv F; boundary nodes and stencils touching masked nodes are masked."""
    vals = np.where(F.mask, np.nan, F.values)
    out = np.full(vals.shape, np.nan)
    centre = vals[1:-1, 1:-1]
    d_uu = (vals[2:, 1:-1] - 2.0 * centre + vals[:-2, 1:-1]) / F.hu**2
    d_vv = (vals[1:-1, 2:] - 2.0 * centre + vals[1:-1, :-2]) / F.hv**2
    out[1:-1, 1:-1] = d_uu - d_vv
    mask = np.ones(vals.shape, dtype=bool)
    mask[1:-1, 1:-1] = ~np.isfinite(out[1:-1, 1:-1])
    return F.like(out, mask)


@dataclass
class ResidualReport:
    r1: ScalarField
    r2: ScalarField
    max_r1: float
    max_r2: float
    epsilon: int
    h: tuple
    nodes: int
    alternatives: dict = field(default_factory=dict)

    def to_dict(self):
        out = {"max_r1": self.max_r1, "max_r2": self.max_r2, "epsilon_best": self.epsilon,
               "h": list(self.h), "nodes": self.nodes}
        if self.alternatives:
            out["max_r2_by_epsilon"] = {str(k): v for k, v in self.alternatives.items()}
        return out


def _residuals(K, kappa, eps, orientation, margin):
    k, c = K.values, kappa.values
    with np.errstate(invalid="ignore", divide="ignore"):
        deficit = k * k - c * c
        ratio = (k + eps * c) / (k - eps * c)
        bad = K.mask | kappa.mask | ~(deficit > 0) | ~(ratio > 0)
        if orientation is not None:
            bad |= orientation.mask
        log_d = K.like(np.log(np.where(bad, 1.0, deficit)), bad)
        log_r = K.like(np.log(np.where(bad, 1.0, ratio)), bad)
    lap_d = hyperbolic_laplacian(log_d)
    lap_r = hyperbolic_laplacian(log_r)
    sign = 1.0 if orientation is None else orientation.values
    factor = sign * np.abs(deficit) ** 0.25
    r1 = K.like(factor * lap_d.values - 8.0 * k, lap_d.mask)
    r2 = K.like(factor * lap_r.values - 4.0 * eps * c, lap_r.mask)
    near_bad = binary_dilation(bad, np.ones((3, 3), dtype=bool), iterations=margin) if margin else bad
    region = ~near_bad & ~r1.mask & ~r2.mask
    return r1, r2, region


def natural_system_residual(K, kappa, epsilon="auto", orientation=None, margin=MARGIN):
    """Residual fields r1, r2 of the natural system and their max norms.

    Args:
        K, kappa: ScalarFields on the same lattice.
        epsilon: +1, -1 or "auto" (both are computed and the smaller max|r2|
            wins; values within a relative 1e-6 count as a tie and go to +1).
        orientation: ScalarField of sign(E); +1 everywhere when omitted.
        margin: nodes within this many stencil widths of an excluded input
            node do not enter the max norms.

    Raises:
        MaskError: fewer than 9 nodes are left for the max norms.
    """
    if K.values.shape != kappa.values.shape:
        raise ValueError("K and kappa must live on the same lattice")
    choices = (1, -1) if epsilon == "auto" else (int(epsilon),)
    if any(e not in (-1, 1) for e in choices):
        raise ValueError("epsilon must be +1, -1 or 'auto'")
    results = {}
    for eps in choices:
        r1, r2, region = _residuals(K, kappa, eps, orientation, margin)
        nodes = int(np.count_nonzero(region))
        if nodes < MIN_NODES:
            raise MaskError(f"only {nodes} nodes remain after masking (need {MIN_NODES})")
        results[eps] = (r1, r2, region, nodes)
    norms = {eps: results[eps][1].max_abs(results[eps][2]) for eps in results}
    best = 1 if 1 in norms else -1
    if -1 in norms and 1 in norms and norms[-1] < norms[1] * (1.0 - 1e-6):
        best = -1
    r1, r2, region, nodes = results[best]
    return ResidualReport(
        r1=r1, r2=r2, max_r1=r1.max_abs(region), max_r2=norms[best], epsilon=best,
        h=(K.hu, K.hv), nodes=nodes, alternatives=norms if len(norms) > 1 else {},
    )


class NaturalFields(NamedTuple):
    K: ScalarField
    kappa: ScalarField
    orientation: ScalarField


def _eval_masked(expr, t):
    try:
        return np.asarray(exprlang.evaluate(expr, t), dtype=float), np.zeros(t.shape, dtype=bool)
    except DomainError:
        out = np.full(t.shape, np.nan)
        for idx, val in np.ndenumerate(t):
            try:
                out[idx] = exprlang.evaluate(expr, float(val))
            except DomainError:
                pass
        return out, ~np.isfinite(out)


def _fields(u, v, G1, H1, G2, H2, dG1, dH1, dG2, dH2, mask, kappa_convention, tol):
    with np.errstate(invalid="ignore", divide="ignore", over="ignore"):
        dg, dh = G1 - G2, H1 - H2
        prod = dG1 * dG2 * dH1 * dH2
        mask = mask | ~(prod > 0) | ~(np.abs(dg) > tol) | ~(np.abs(dh) > tol)
        safe = lambda x: np.where(mask, 1.0, x)  # noqa: E731
        K, kappa_abs, kappa_signed = curvature_closed_forms(
            safe(G1), safe(H1), np.where(mask, 0.0, G2), np.where(mask, 0.0, H2),
            safe(dG1), safe(dH1), safe(dG2), safe(dH2),
        )
        orientation = np.sign(dg * dh)
    if np.all(mask):
        raise ConstructionError("every grid node fails the general-type conditions")
    kappa = kappa_signed if kappa_convention == "signed" else kappa_abs
    nan = lambda x: np.where(mask, np.nan, x)  # noqa: E731
    return NaturalFields(
        ScalarField(u, v, nan(K), mask),
        ScalarField(u, v, nan(kappa), mask),
        ScalarField(u, v, nan(orientation), mask),
    )


def fields_from_surface(S, u, v, kappa_convention="signed", tol=1e-12):
    """Like ``solution_from_generators`` but reading g, h from a type-2 surface.

    The closed forms assume canonical parameters; f is not consulted.
    """
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    U, V = np.meshgrid(u, v, indexing="ij")
    p = S.beta.generators(U + V)
    q = S.theta.generators(U - V)
    mask = np.zeros(U.shape, dtype=bool)
    return _fields(u, v, p["g"], p["h"], q["g"], q["h"], p["dg"], p["dh"], q["dg"], q["dh"],
                   mask, kappa_convention, tol)


def solution_from_generators(g1, g2, h1, h2, u, v, kappa_convention="signed", tol=1e-12):
    """K, kappa and sign(E) of the canonical surface built from g1, g2, h1, h2.

    Args:
        g1, g2, h1, h2: expressions in t (g1, h1 at u+v; g2, h2 at u-v).
        u, v: 1-D uniform axes.
        kappa_convention: "signed" for the smooth branch, "abs" for -|.|.

    Raises:
        ConstructionError: every node is masked.
    """
    exprs = [exprlang.parse(e) if isinstance(e, str) else e for e in (g1, g2, h1, h2)]
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    U, V = np.meshgrid(u, v, indexing="ij")
    a, b = U + V, U - V
    mask = np.zeros(U.shape, dtype=bool)
    vals = []
    for expr, t in zip(exprs, (a, b, a, b)):
        val, bad = _eval_masked(expr, t)
        dval, dbad = _eval_masked(exprlang.differentiate(expr), t)
        vals.append((val, dval))
        mask |= bad | dbad
    (G1, dG1), (G2, dG2), (H1, dH1), (H2, dH2) = vals
    return _fields(u, v, G1, H1, G2, H2, dG1, dH1, dG2, dH2, mask, kappa_convention, tol)
