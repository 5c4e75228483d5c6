"""Built-in surfaces with their closed-form positions and curvatures.

Closed forms are numpy callables of (u, v). Position closed forms carry the
additive constants of their printed form; compare differences
Psi(u, v) - Psi(0, 0) against computed positions.
"""

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .canonical import make_canonical
from .errors import ConstructionError
from .geometry4 import inner
from .nullcurve import NullCurve, sample_points
from .surface import WeierstrassSurface


@dataclass
class CatalogEntry:
    """A named surface plus reference data.

    ``excluded(u, v)`` is True on the singular set (within ``margin``).
    ``K`` and ``kappa`` are None for the degenerate demos.
    """

    name: str
    surface: WeierstrassSurface
    K: Optional[Callable] = None
    kappa: Optional[Callable] = None
    psi: Optional[Callable] = None
    excluded: Optional[Callable] = None
    expected_class: str = "GeneralType"
    grid: dict = field(default_factory=dict)
    pde_region: Optional[dict] = None
    description: str = ""

    def __iter__(self):
        yield from (self.surface, self.K, self.kappa, self.psi)

    def config(self):
        doc = {
            "name": self.name,
            "beta": self.surface.beta.to_dict(),
            "theta": self.surface.theta.to_dict(),
            "grid": {k: list(v) for k, v in self.grid.items()},
        }
        if self.pde_region:
            doc["pde_region"] = {k: list(v) for k, v in self.pde_region.items()}
        return doc


def _ex1_psi(u, v):
    u, v = np.broadcast_arrays(np.asarray(u, dtype=float), np.asarray(v, dtype=float))
    return np.stack([
        (2 * u**3 + 3 * u**2 + 3 * v**2 + 6 * u * (v**2 + 1)) / 12,
        v / 2,
        (-2 * u**3 - 3 * u**2 - 3 * v**2 - 6 * u * (v**2 - 1)) / 12,
        (u + u**2 + v**2) / 2,
    ], axis=-1)


def _ex1_K(u, v):
    v = np.asarray(v, dtype=float) + 0 * np.asarray(u, dtype=float)
    return 16 * (1 + 4 * v**2) / (1 - 4 * v**2) ** 3


def _ex1_kappa(u, v):
    v = np.asarray(v, dtype=float) + 0 * np.asarray(u, dtype=float)
    return -np.abs(64 * v / (1 - 4 * v**2) ** 3)


def example_5_1(margin=0.05):
    """g1 = t+1, h1 = t, g2 = s, h2 = s+1; singular along v = +-1/2."""
    surface = make_canonical("t+1", "t", "t", "t+1", (-3.0, 3.0), name="example_5_1")

    def excluded(u, v):
        v = np.asarray(v, dtype=float) + 0 * np.asarray(u, dtype=float)
        return (np.abs(v - 0.5) < margin) | (np.abs(v + 0.5) < margin)

    return CatalogEntry(
        "example_5_1", surface, _ex1_K, _ex1_kappa, _ex1_psi, excluded,
        grid={"u": [-1.0, 1.0, 21], "v": [-1.0, 1.0, 21]},
        pde_region={"u": [-0.05, 0.05], "v": [-0.2, 0.2]},
        description="polynomial generators; K = 16(1+4v^2)/(1-4v^2)^3",
    )


def _ex2_denominator(u, v):
    a = np.asarray(u, dtype=float) + np.asarray(v, dtype=float)
    b = np.asarray(u, dtype=float) - np.asarray(v, dtype=float)
    return a**2 - 1 - 2 * a * np.sinh(b)


def _ex2_psi(u, v):
    u, v = np.broadcast_arrays(np.asarray(u, dtype=float), np.asarray(v, dtype=float))
    a, b = u + v, u - v
    return np.stack([
        a**3 / 12 + a / 4,
        np.sinh(b) / 2,
        -(a**3) / 12 + (3 * u - v) / 4,
        np.cosh(b) / 2 + a**2 / 4,
    ], axis=-1)


def _ex2_K(u, v):
    a = np.asarray(u, dtype=float) + np.asarray(v, dtype=float)
    b = np.asarray(u, dtype=float) - np.asarray(v, dtype=float)
    return -16 * np.cosh(b) * (a**2 + 1) / _ex2_denominator(u, v) ** 3


def _ex2_kappa(u, v):
    a = np.asarray(u, dtype=float) + np.asarray(v, dtype=float)
    b = np.asarray(u, dtype=float) - np.asarray(v, dtype=float)
    return -16 * np.abs(((a**2 - 1) * np.sinh(b) + 2 * a) / _ex2_denominator(u, v) ** 3)


def example_5_2(margin=0.05):
    """g1 = h1 = t, g2 = e^s, h2 = -e^(-s); singular where (u+v)^2 - 1 = 2(u+v) sinh(u-v)."""
    surface = make_canonical("t", "t", "exp(t)", "-exp(-t)", (-2.0, 2.0), name="example_5_2")

    def excluded(u, v):
        # distance to the singular set measured through the gradient of the defining function
        a = np.asarray(u, dtype=float) + np.asarray(v, dtype=float)
        b = np.asarray(u, dtype=float) - np.asarray(v, dtype=float)
        d_a = 2 * a - 2 * np.sinh(b)
        d_b = -2 * a * np.cosh(b)
        grad = np.sqrt(2.0) * np.hypot(d_a, d_b)
        return np.abs(_ex2_denominator(u, v)) < margin * np.maximum(grad, 1e-12)

    return CatalogEntry(
        "example_5_2", surface, _ex2_K, _ex2_kappa, _ex2_psi, excluded,
        grid={"u": [-0.8, 0.8, 21], "v": [-0.8, 0.8, 21]},
        pde_region={"u": [-0.1, 0.1], "v": [-0.1, 0.1]},
        description="polynomial and exponential generators; K(0,0) = 16",
    )


def _check_pairing(beta, theta, name):
    ts = sample_points(theta.domain, 512)
    tb = sample_points(beta.domain, 512)
    # both curves may vary, so test the pairing on a product sample
    vals = inner(beta.derivative(tb[::16, None]), theta.derivative(ts[None, ::16]))
    scale = np.linalg.norm(beta.derivative(tb[::16]), axis=-1)[:, None] * np.linalg.norm(theta.derivative(ts[::16]), axis=-1)[None, :]
    if np.any(np.abs(vals) <= 1e-12 * scale):
        raise ConstructionError(f"<beta', theta'> vanishes on the sample for {name}")


def degenerate_plane():
    """Two straight null lines: a piece of a plane, sigma = 0."""
    beta = NullCurve.type1("1", (1, 1, 1), (-2.0, 2.0))
    theta = NullCurve.type1("1", (-1, 1, 1), (-2.0, 2.0))
    _check_pairing(beta, theta, "degenerate_plane")
    surface = WeierstrassSurface(beta, theta, name="degenerate_plane")
    return CatalogEntry("degenerate_plane", surface, expected_class="Plane",
                        grid={"u": [-0.9, 0.9, 11], "v": [-0.9, 0.9, 11]},
                        description="type 1 + type 1: part of a plane")


def degenerate_one_dim_normal():
    """A straight null line plus the second curve of example_5_1: rank-one normal space."""
    beta = NullCurve.type1("1", (1, 1, 1), (-3.0, 3.0))
    theta = NullCurve("1/4", "t", "t+1", domain=(-0.9, 0.9))
    _check_pairing(beta, theta, "degenerate_one_dim_normal")
    surface = WeierstrassSurface(beta, theta, name="degenerate_one_dim_normal")
    return CatalogEntry("degenerate_one_dim_normal", surface, expected_class="OneDimNormal",
                        grid={"u": [-0.4, 0.4, 11], "v": [-0.4, 0.4, 11]},
                        description="type 1 + type 2: one-dimensional first normal space")


CATALOG = {
    "example_5_1": example_5_1,
    "example_5_2": example_5_2,
    "degenerate_plane": degenerate_plane,
    "degenerate_one_dim_normal": degenerate_one_dim_normal,
}


def names():
    return sorted(CATALOG)


def get(name):
    try:
        return CATALOG[name]()
    except KeyError:
        raise KeyError(f"unknown catalog surface {name!r}; known: {', '.join(names())}") from None
