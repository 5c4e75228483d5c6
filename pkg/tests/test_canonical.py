import io

import numpy as np
import pytest

from lorentzw import errors
from lorentzw.canonical import (
    ReparametrizedCurve,
    canonical_residuals,
    make_canonical,
    reparametrize_to_canonical,
    verify_canonical,
)
from lorentzw.curvature import curvatures_canonical_closed_form, curvatures_via_frame
from lorentzw.nullcurve import NullCurve, from_dict
from lorentzw.surface import WeierstrassSurface

GRID = np.meshgrid(np.linspace(-0.4, 0.4, 9), np.linspace(-0.4, 0.4, 9))


def _doubled_ex1():
    beta = NullCurve("1/2", "t+1", "t", domain=(-3, 3))
    theta = NullCurve("1/4", "t", "t+1", domain=(-3, 3))
    return WeierstrassSurface(beta, theta, name="doubled")


def _scaled_ex2():
    beta = NullCurve("1+t^2/4", "t", "t", domain=(-2, 2))
    theta = NullCurve("0.3*cosh(t)", "exp(t)", "-exp(-t)", domain=(-2, 2))
    return WeierstrassSurface(beta, theta, name="scaled")


def _sample_pairs(solution, n, seed):
    lo, hi = solution.interval
    rng = np.random.default_rng(seed)
    a = rng.uniform(lo, hi, n)
    b = rng.uniform(lo, hi, n)
    return (a + b) / 2, (a - b) / 2


# -- construction ---------------------------------------------------------------

def test_make_canonical_example_5_1(ex1):
    S = ex1.surface
    assert S.beta.f(0.7) == pytest.approx(0.25)
    assert S.theta.f(-1.2) == pytest.approx(0.25)
    assert verify_canonical(S, *GRID).max_residual < 1e-9


def test_make_canonical_example_5_2(ex2):
    S = ex2.surface
    assert S.beta.f(0.3) == pytest.approx(0.25)
    assert S.theta.f(0.3) == pytest.approx(0.25)  # g' h' = e^s e^-s = 1
    assert verify_canonical(S, *GRID).max_residual < 1e-9


def test_make_canonical_rejects_flat_generator():
    with pytest.raises(errors.ConstructionError):
        make_canonical("t^2", "t", "t", "t+1", (-1, 1))


def test_make_canonical_grid_check():
    u, v = np.meshgrid(np.linspace(-1, 1, 5), np.linspace(-1, 1, 5))
    # the grid contains v = +-1/2 where g1 - g2 or h1 - h2 vanishes
    with pytest.raises(errors.ConstructionError, match="vanishes"):
        make_canonical("t+1", "t", "t", "t+1", (-3, 3), grid=(u, v))
    with pytest.raises(errors.ConstructionError, match="not positive"):
        make_canonical("t", "t", "t+3", "-t+5", (-1, 1), grid=(0.1 * u, 0.1 * v))


# -- verification ---------------------------------------------------------------

def test_residuals_at_origin(ex1):
    res = canonical_residuals(ex1.surface, 0.0, 0.0)
    E = ex1.surface.first_form(0.0, 0.0)[0]
    assert E**2 == pytest.approx(1 / 16)
    assert res["area"] == pytest.approx(0.0, abs=1e-13)
    assert res["orthogonality"] == 0.0


def test_doubled_f_is_not_canonical():
    report = verify_canonical(_doubled_ex1(), *GRID)
    assert report.orthogonality == pytest.approx(3 / 16, rel=1e-12)
    assert report.normalization == pytest.approx(3 / 16, rel=1e-12)
    assert not report.passed
    assert report.to_dict()["passed"] is False


def test_doubling_both_keeps_orthogonality():
    beta = NullCurve("1/2", "t+1", "t", domain=(-3, 3))
    theta = NullCurve("1/2", "t", "t+1", domain=(-3, 3))
    report = verify_canonical(WeierstrassSurface(beta, theta), *GRID)
    assert report.orthogonality == 0.0
    assert report.normalization == pytest.approx(3 / 16)


def test_verify_skips_singular_points(ex1):
    report = verify_canonical(ex1.surface, np.array([0.0, 0.1]), np.array([0.5, 0.1]))
    assert report.points == 1


# -- reparametrization ------------------------------------------------------------

@pytest.fixture(scope="module")
def doubled_solution():
    return reparametrize_to_canonical(_doubled_ex1(), z0=0.0, t0=0.0, s0=0.0, span=1.0)


@pytest.fixture(scope="module")
def scaled_solution():
    return reparametrize_to_canonical(_scaled_ex2(), z0=0.0, t0=0.0, s0=0.0, span=0.8)


@pytest.mark.parametrize("which", ["doubled_solution", "scaled_solution"])
def test_reparametrized_surface_is_canonical(which, request):
    solution, S = request.getfixturevalue(which)
    lo, hi = solution.interval
    r = 0.45 * (hi - lo) / 2
    u, v = np.meshgrid(np.linspace(-r, r, 11), np.linspace(-r, r, 11))
    report = verify_canonical(S, u, v, tol=1e-6)
    assert report.passed, report
    # the canonical closed forms apply and agree with the frame route
    sample = curvatures_canonical_closed_form(S, 0.1 * r, 0.2 * r, tol=1e-6)
    frame_sample, _ = curvatures_via_frame(S, 0.1 * r, 0.2 * r)
    assert frame_sample.K == pytest.approx(sample.K, rel=1e-6)


@pytest.mark.parametrize("which, base", [("doubled_solution", _doubled_ex1), ("scaled_solution", _scaled_ex2)])
def test_point_set_preserved(which, base, request):
    solution, S_bar = request.getfixturevalue(which)
    S = base()
    ubar, vbar = _sample_pairs(solution, 50, seed=5)
    u, v = solution.parameter_change(ubar, vbar)
    u0, v0 = solution.parameter_change(solution.z0, 0.0)
    new = S_bar.eval_point(ubar, vbar) - S_bar.eval_point(solution.z0, 0.0)
    old = S.eval_point(u, v) - S.eval_point(u0, v0)
    assert np.max(np.abs(new - old)) < 1e-6


@pytest.mark.parametrize("which", ["doubled_solution", "scaled_solution"])
def test_ode_residual(which, request):
    solution, _ = request.getfixturevalue(which)
    assert solution.ode_residual("knots") < 1e-8
    assert solution.ode_residual("midpoints") < 1e-6


def test_maps_monotone(doubled_solution):
    solution, _ = doubled_solution
    z = solution.knots()
    assert np.all(np.diff(solution.p(z)) > 0)
    assert np.all(np.diff(solution.q(z)) > 0)


def test_canonical_input_gives_half_slope(ex1):
    solution, S_bar = reparametrize_to_canonical(ex1.surface, z0=0.0, t0=0.0, s0=0.0, span=1.0)
    z = np.linspace(-1, 1, 21)
    assert np.allclose(solution.p(z), z / 2, atol=1e-10)
    assert np.allclose(solution.q(z), z / 2, atol=1e-10)
    assert verify_canonical(S_bar, *(0.3 * g for g in GRID), tol=1e-9).passed


def test_constant_half_factor():
    curve = NullCurve("1/2", "t", "t", domain=(-2, 2))
    other = NullCurve("1/2", "exp(t)", "-exp(-t)", domain=(-2, 2))
    solution, S_bar = reparametrize_to_canonical(WeierstrassSurface(curve, other), z0=0.0, t0=0.0, s0=0.0, span=1.0)
    z = np.linspace(-1, 1, 11)
    assert np.allclose(solution.beta_map(z), z / np.sqrt(2), atol=1e-10)
    # g_bar' h_bar' = 1/2, so f_bar = 1/(4 sqrt(1/2)) = P' f
    dg, dh = S_bar.beta.g.derivative()(z), S_bar.beta.h.derivative()(z)
    assert np.allclose(dg * dh, 0.5, atol=1e-10)
    assert np.allclose(S_bar.beta.f(z), 1 / (2 * np.sqrt(2)), atol=1e-10)
    # the new curve traces the old one: beta_bar(z) = beta(z / sqrt 2)
    assert np.allclose(S_bar.beta.positions(z), curve.positions(z / np.sqrt(2)), atol=1e-9)


@pytest.mark.parametrize("s_p, s_q", [(1, 1), (1, -1), (-1, 1), (-1, -1)])
def test_all_sign_branches_canonical(s_p, s_q):
    solution, S_bar = reparametrize_to_canonical(_doubled_ex1(), z0=0.0, t0=0.0, s0=0.0, span=0.6, s_p=s_p, s_q=s_q)
    u, v = np.meshgrid(np.linspace(-0.25, 0.25, 7), np.linspace(-0.25, 0.25, 7))
    assert verify_canonical(S_bar, u, v, tol=1e-6).passed
    z = solution.knots()
    assert np.all(s_p * np.diff(solution.p(z)) > 0)
    assert np.all(s_q * np.diff(solution.q(z)) > 0)


@pytest.mark.parametrize("f", ["t/4", "t^2"])
def test_interior_zero_of_f(f):
    beta = NullCurve(f, "t", "t", domain=(-1, 1), t0=0.5, check=False)
    theta = NullCurve("1/4", "exp(t)", "-exp(-t)", domain=(-1, 1))
    S = WeierstrassSurface(beta, theta)
    with pytest.raises(errors.PreconditionError):
        reparametrize_to_canonical(S, z0=0.5, t0=0.5, s0=0.0, span=0.9)


def test_map_leaving_domain():
    S = _doubled_ex1()
    with pytest.raises(errors.PreconditionError):
        reparametrize_to_canonical(S, z0=0.0, t0=2.9, s0=0.0, span=1.0)


def test_bad_arguments():
    with pytest.raises(ValueError):
        reparametrize_to_canonical(_doubled_ex1(), span=-1.0)
    with pytest.raises(ValueError):
        reparametrize_to_canonical(_doubled_ex1(), s_p=0)


def test_csv_knot_table(doubled_solution):
    solution, _ = doubled_solution
    text = solution.to_csv()
    lines = text.strip().splitlines()
    assert lines[0] == "z,p,q"
    rows = np.array([[float(x) for x in line.split(",")] for line in lines[1:]])
    assert np.allclose(rows, solution.rows())
    buf = io.StringIO()
    assert solution.to_csv(buf) is None
    assert buf.getvalue() == text


def test_reparametrized_curve_round_trip(doubled_solution):
    _, S_bar = doubled_solution
    doc = S_bar.beta.to_dict()
    assert doc["kind"] == "reparametrized"
    back = from_dict(doc)
    assert isinstance(back, ReparametrizedCurve)
    z = np.linspace(-0.9, 0.9, 13)
    assert np.allclose(back.derivative(z), S_bar.beta.derivative(z), atol=1e-14)
    assert np.allclose(back.positions(z), S_bar.beta.positions(z), atol=1e-13)
