"""Minimal Lorentzian surfaces Psi(u, v) = beta(u+v) + theta(u-v).

All methods accept scalar or array (u, v) and broadcast. Vector results carry
a trailing axis of length 4.
"""

from dataclasses import dataclass

import numpy as np

from .errors import SingularPointError
from .geometry4 import euclidean_norm, inner
from .nullcurve import DEFAULT_QUAD_TOL

SINGULAR_TOL = 1e-12


@dataclass(frozen=True)
class FundamentalForms:
    """First form (E, F, G) and the second fundamental tensor on the unit frame.

    ``sxx``, ``sxy``, ``syy`` are sigma(x,x), sigma(x,y), sigma(y,y) with
    x = Psi_u/sqrt|E| and y = Psi_v/sqrt|E|.
    """

    E: np.ndarray
    F: np.ndarray
    G: np.ndarray
    sxx: np.ndarray
    sxy: np.ndarray
    syy: np.ndarray

    @property
    def sign_E(self):
        return np.sign(self.E).astype(int)


def _scalarize(x):
    return float(x) if np.ndim(x) == 0 else x


class WeierstrassSurface:
    def __init__(self, beta, theta, name=None):
        self.beta = beta
        self.theta = theta
        self.name = name

    @property
    def general_form(self):
        """Both curves are of type 2, so the closed-form expressions apply."""
        return self.beta.kind == "type2" and self.theta.kind == "type2"

    def _args(self, u, v):
        u, v = np.broadcast_arrays(np.asarray(u, dtype=float), np.asarray(v, dtype=float))
        return u + v, u - v

    # -- points and tangents ----------------------------------------------

    def eval_point(self, u, v, quad_tol=DEFAULT_QUAD_TOL):
        """Psi(u, v) = beta(u+v) + theta(u-v)."""
        a, b = self._args(u, v)
        return self.beta.positions(a, quad_tol) + self.theta.positions(b, quad_tol)

    def tangents(self, u, v):
        """(Psi_u, Psi_v) = (beta' + theta', beta' - theta')."""
        a, b = self._args(u, v)
        bp = self.beta.derivative(a)
        tp = self.theta.derivative(b)
        return bp + tp, bp - tp

    def first_form(self, u, v):
        """(E, F, G) with F = 0 and G = -E.

        E = 4 f1 f2 (g1-g2)(h1-h2) when both curves are of type 2, otherwise
        2<beta', theta'>.
        """
        a, b = self._args(u, v)
        if self.general_form:
            p = self.beta.generators(a)
            q = self.theta.generators(b)
            E = 4.0 * p["f"] * q["f"] * (p["g"] - q["g"]) * (p["h"] - q["h"])
        else:
            E = 2.0 * inner(self.beta.derivative(a), self.theta.derivative(b))
        E = np.asarray(E, dtype=float)
        return _scalarize(E), _scalarize(np.zeros_like(E)), _scalarize(-E)

    def inner_product_table(self, u, v):
        """Closed-form inner products of beta', beta'', theta', theta'' (type 2 only).

        Keys: ``bp_tp``, ``bp_bpp``, ``tp_tpp``, ``bpp_bpp``, ``tpp_tpp``,
        ``tpp_bp``, ``bpp_tp``.
        """
        a, b = self._args(u, v)
        p = self.beta.generators(a)
        q = self.theta.generators(b)
        f1, g1, h1, df1, dg1, dh1 = (p[k] for k in ("f", "g", "h", "df", "dg", "dh"))
        f2, g2, h2, df2, dg2, dh2 = (q[k] for k in ("f", "g", "h", "df", "dg", "dh"))
        dg = g2 - g1
        dh = h2 - h1
        table = {
            "bp_tp": 2.0 * f1 * f2 * dg * dh,
            "bp_bpp": np.zeros_like(dg),
            "tp_tpp": np.zeros_like(dg),
            "bpp_bpp": -4.0 * f1**2 * dg1 * dh1,
            "tpp_tpp": -4.0 * f2**2 * dg2 * dh2,
            "tpp_bp": 2.0 * f1 * df2 * dg * dh + 2.0 * f1 * f2 * (dg * dh2 + dh * dg2),
            "bpp_tp": 2.0 * f2 * df1 * dg * dh + 2.0 * f1 * f2 * (-dh * dg1 - dg * dh1),
        }
        return {k: _scalarize(np.asarray(val, dtype=float)) for k, val in table.items()}

    # -- second fundamental tensor ---------------------------------------

    def singular_mask(self, u, v, tol=SINGULAR_TOL):
        """True where |E| is negligible against |beta'| |theta'|."""
        a, b = self._args(u, v)
        E = np.asarray(self.first_form(u, v)[0])
        scale = euclidean_norm(self.beta.derivative(a)) * euclidean_norm(self.theta.derivative(b))
        return np.abs(E) <= tol * np.maximum(scale, np.finfo(float).tiny)

    def second_fundamental(self, u, v):
        """sigma on the unit frame x = Psi_u/sqrt|E|, y = Psi_v/sqrt|E|.

        The normal parts of Psi_uu and Psi_uv are taken with the closed-form
        inner products of ``inner_product_table`` when both curves are of
        type 2, and with exact derivative vectors otherwise. Minimality gives
        sigma(y,y) = sigma(x,x).

        Raises:
            SingularPointError: |E| below 1e-12 of its natural scale at some point.
        """
        a, b = self._args(u, v)
        if np.any(self.singular_mask(u, v)):
            raise SingularPointError(f"E vanishes on the requested points (u+v={a!r}, u-v={b!r})")
        bp = self.beta.derivative(a)
        tp = self.theta.derivative(b)
        bpp = self.beta.second_derivative(a)
        tpp = self.theta.second_derivative(b)
        if self.general_form:
            tab = self.inner_product_table(u, v)
            bp_tp, bpp_tp, bp_tpp = tab["bp_tp"], tab["bpp_tp"], tab["tpp_bp"]
        else:
            bp_tp = inner(bp, tp)
            bpp_tp = inner(bpp, tp)
            bp_tpp = inner(bp, tpp)
        bp_tp = np.asarray(bp_tp)[..., None]
        c_beta = np.asarray(bpp_tp)[..., None] / bp_tp
        c_theta = np.asarray(bp_tpp)[..., None] / bp_tp
        s_uu = bpp + tpp - c_beta * bp - c_theta * tp
        s_uv = bpp - tpp - c_beta * bp + c_theta * tp
        E = np.asarray(2.0 * bp_tp[..., 0] if not self.general_form else self.first_form(u, v)[0])
        absE = np.abs(E)[..., None]
        sxx = s_uu / absE
        sxy = s_uv / absE
        E = _scalarize(E)
        return FundamentalForms(E=E, F=_scalarize(np.zeros_like(np.asarray(E))), G=_scalarize(-np.asarray(E)),
                                sxx=sxx, sxy=sxy, syy=sxx.copy())

    def admissible(self, u, v, tol=SINGULAR_TOL):
        """f1 f2 (g1-g2)(h1-h2) != 0 (or <beta', theta'> != 0 for type-1 data)."""
        return ~self.singular_mask(u, v, tol)

    def __repr__(self):
        label = f"{self.name!r}, " if self.name else ""
        return f"WeierstrassSurface({label}beta={self.beta!r}, theta={self.theta!r})"
