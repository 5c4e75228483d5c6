import numpy as np
import pytest

from conftest import admissible_points
from lorentzw import errors
from lorentzw.curvature import deficit_closed_form, frame_free_deficit
from lorentzw.geometry4 import inner, normal_rank


def test_eval_point_examples(ex1):
    S = ex1.surface
    assert np.array_equal(S.eval_point(0.0, 0.0), np.zeros(4))
    assert np.allclose(S.eval_point(1.0, 0.0), [11 / 12, 0, 1 / 12, 1], atol=1e-12)


@pytest.mark.parametrize("name", ["ex1", "ex2"])
def test_eval_point_matches_closed_form(name, request):
    entry = request.getfixturevalue(name)
    u, v = admissible_points(entry, 40, (-0.8, 0.8), seed=1)
    computed = entry.surface.eval_point(u, v)
    exact = entry.psi(u, v) - entry.psi(0.0, 0.0)
    assert np.allclose(computed, exact, rtol=0, atol=1e-11)


def test_tangents_example(ex1):
    pu, pv = ex1.surface.tangents(0.0, 0.0)
    assert np.allclose(pu, [0.5, 0, 0.5, 0.5], atol=1e-15)
    assert np.allclose(pv, [0, 0.5, 0, 0], atol=1e-15)


@pytest.mark.parametrize("uv, E", [((0.0, 0.0), -0.25), ((0.0, 1.0), 0.75)])
def test_first_form_examples(ex1, uv, E):
    e, f, g = ex1.surface.first_form(*uv)
    assert e == pytest.approx(E, rel=1e-15)
    assert f == 0.0
    assert g == -e


@pytest.mark.parametrize("name", ["ex1", "ex2", "one_dim"])
def test_first_form_against_tangents(name, request):
    entry = request.getfixturevalue(name)
    u, v = admissible_points(entry, 100, (-0.4, 0.4), seed=2)
    pu, pv = entry.surface.tangents(u, v)
    E, F, G = entry.surface.first_form(u, v)
    assert np.allclose(inner(pu, pu), E, rtol=1e-10, atol=0)
    assert np.allclose(inner(pu, pv), 0.0, atol=1e-12)
    assert np.allclose(inner(pv, pv), G, rtol=1e-10, atol=0)
    assert np.all(F == 0)


@pytest.mark.parametrize("name", ["ex1", "ex2"])
def test_sigma_is_normal(name, request):
    entry = request.getfixturevalue(name)
    S = entry.surface
    u, v = admissible_points(entry, 100, (-0.8, 0.8), seed=3)
    forms = S.second_fundamental(u, v)
    pu, pv = S.tangents(u, v)
    for s in (forms.sxx, forms.sxy):
        scale = np.linalg.norm(s, axis=-1) * np.linalg.norm(pu, axis=-1) + 1e-300
        assert np.all(np.abs(inner(s, pu)) <= 1e-9 * scale)
        assert np.all(np.abs(inner(s, pv)) <= 1e-9 * scale)
    assert np.array_equal(forms.syy, forms.sxx)


def test_frame_free_deficit_example(ex1):
    forms = ex1.surface.second_fundamental(0.0, 0.0)
    assert frame_free_deficit(forms.sxx, forms.sxy) == pytest.approx(256.0, rel=1e-12)


@pytest.mark.parametrize("name", ["ex1", "ex2"])
def test_deficit_forms_agree(name, request):
    entry = request.getfixturevalue(name)
    S = entry.surface
    u, v = admissible_points(entry, 100, (-0.8, 0.8), seed=4)
    forms = S.second_fundamental(u, v)
    from_sigma = frame_free_deficit(forms.sxx, forms.sxy)
    closed = deficit_closed_form(S, u, v)
    assert np.allclose(from_sigma, closed, rtol=1e-8, atol=0)


@pytest.mark.parametrize("name", ["ex1", "ex2"])
def test_inner_product_table_against_finite_differences(name, request):
    S = request.getfixturevalue(name).surface
    h = 1e-5
    for u, v in [(0.1, 0.2), (-0.3, 0.05), (0.25, -0.1)]:
        a, b = u + v, u - v
        tab = S.inner_product_table(u, v)
        bp, tp = S.beta.derivative(a), S.theta.derivative(b)
        bpp = (S.beta.derivative(a + h) - S.beta.derivative(a - h)) / (2 * h)
        tpp = (S.theta.derivative(b + h) - S.theta.derivative(b - h)) / (2 * h)
        fd = {
            "bp_tp": inner(bp, tp), "bp_bpp": inner(bp, bpp), "tp_tpp": inner(tp, tpp),
            "bpp_bpp": inner(bpp, bpp), "tpp_tpp": inner(tpp, tpp),
            "tpp_bp": inner(tpp, bp), "bpp_tp": inner(bpp, tp),
        }
        for key, value in fd.items():
            assert tab[key] == pytest.approx(value, abs=1e-8), key


def test_minimality_by_finite_differences(ex2):
    # Psi_uu - Psi_vv vanishes for a sum of two curves in u+v and u-v
    S = ex2.surface
    h = 1e-3
    u, v = 0.1, -0.05
    p = {(i, j): S.eval_point(u + i * h, v + j * h) for i in (-1, 0, 1) for j in (-1, 0, 1)}
    lap = (p[1, 0] - 2 * p[0, 0] + p[-1, 0]) - (p[0, 1] - 2 * p[0, 0] + p[0, -1])
    assert np.max(np.abs(lap / h**2)) < 1e-4


def test_plane_has_vanishing_sigma(plane):
    u, v = np.meshgrid(np.linspace(-0.9, 0.9, 5), np.linspace(-0.9, 0.9, 5))
    forms = plane.surface.second_fundamental(u, v)
    assert np.all(forms.sxx == 0) and np.all(forms.sxy == 0)


def test_one_dim_normal_rank(one_dim):
    for u, v in [(0.0, 0.1), (0.2, -0.3), (-0.1, 0.25)]:
        forms = one_dim.surface.second_fundamental(u, v)
        assert normal_rank(forms.sxx, forms.sxy) == 1


def test_singular_point_raises(ex1):
    with pytest.raises(errors.SingularPointError):
        ex1.surface.second_fundamental(0.0, 0.5)
    assert not ex1.surface.admissible(0.3, 0.5)
    assert ex1.surface.admissible(0.3, 0.2)


def test_sign_of_E_recorded(ex1):
    forms = ex1.surface.second_fundamental(np.array([0.0, 0.0]), np.array([0.0, 1.0]))
    assert list(forms.sign_E) == [-1, 1]
