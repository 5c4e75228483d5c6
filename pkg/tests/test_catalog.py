import numpy as np
import pytest

from lorentzw import catalog
from lorentzw.canonical import verify_canonical
from lorentzw.curvature import classify, curvatures_canonical_closed_form
from lorentzw.geometry4 import inner


def test_names_and_lookup():
    assert catalog.names() == ["degenerate_one_dim_normal", "degenerate_plane", "example_5_1", "example_5_2"]
    assert catalog.get("example_5_1").name == "example_5_1"
    with pytest.raises(KeyError, match="unknown catalog surface"):
        catalog.get("torus")


def test_entry_unpacks(ex1):
    S, K, kappa, psi = ex1
    assert S is ex1.surface
    assert K(0.3, 0.0) == 16.0
    assert kappa(0.3, 0.0) == 0.0
    assert np.allclose(psi(0.2, 0.4)[1], 0.2)


def test_example_5_1_exclusion(ex1):
    assert ex1.excluded(0.0, 0.5) and ex1.excluded(1.0, -0.5) and ex1.excluded(0.0, 0.52)
    assert not ex1.excluded(0.0, 0.0) and not ex1.excluded(0.0, 0.56)


def test_example_5_2_exclusion(ex2):
    assert not ex2.excluded(0.0, 0.0)
    # a point on the singular set: u + v = a, u - v = b with a^2 - 1 = 2 a sinh(b)
    a = 1.2
    b = np.arcsinh((a * a - 1) / (2 * a))
    assert ex2.excluded((a + b) / 2, (a - b) / 2)


def test_example_5_2_values(ex2):
    assert ex2.K(0.0, 0.0) == 16.0
    assert ex2.kappa(0.0, 0.0) == 0.0
    u, v = np.array([0.3, -0.2]), np.array([0.1, 0.4])
    assert np.allclose(ex2.psi(u, v)[..., 1], 0.5 * np.sinh(u - v))


@pytest.mark.parametrize("name, expected", [
    ("example_5_1", "GeneralType"), ("example_5_2", "GeneralType"),
    ("degenerate_plane", "Plane"), ("degenerate_one_dim_normal", "OneDimNormal"),
])
def test_classification_matches_construction(name, expected):
    entry = catalog.get(name)
    assert entry.expected_class == expected
    lo, hi, n = entry.grid["u"]
    rng = np.random.default_rng(0)
    count = 0
    while count < 10:
        u, v = rng.uniform(lo, hi, 2)
        if entry.excluded is not None and entry.excluded(u, v):
            continue
        assert str(classify(entry.surface, u, v)) == expected
        count += 1


@pytest.mark.parametrize("name", ["example_5_1", "example_5_2"])
def test_canonical_entries_verify(name):
    entry = catalog.get(name)
    u, v = np.meshgrid(np.linspace(*entry.grid["u"]), np.linspace(*entry.grid["v"]))
    keep = ~entry.excluded(u, v)
    assert verify_canonical(entry.surface, u[keep], v[keep]).max_residual < 1e-9


@pytest.mark.parametrize("name", ["example_5_1", "example_5_2"])
def test_displays_agree_on_fine_grid(name):
    entry = catalog.get(name)
    lo, hi, _ = entry.grid["u"]
    u, v = np.meshgrid(np.linspace(lo, hi, 51), np.linspace(lo, hi, 51))
    keep = ~entry.excluded(u, v)
    sample = curvatures_canonical_closed_form(entry.surface, u[keep], v[keep])
    assert np.allclose(sample.K, entry.K(u[keep], v[keep]), rtol=1e-8, atol=0)
    assert np.allclose(sample.kappa, entry.kappa(u[keep], v[keep]), rtol=1e-8, atol=1e-12)


def test_degenerate_pairings_nonvanishing(plane, one_dim):
    for entry in (plane, one_dim):
        S = entry.surface
        ts = np.linspace(-0.85, 0.85, 9)
        vals = inner(S.beta.derivative(ts[:, None]), S.theta.derivative(ts[None, :]))
        assert np.all(np.abs(vals) > 1e-6)


def test_config_documents(ex1, plane):
    doc = ex1.config()
    assert doc["beta"]["kind"] == "type2" and doc["grid"]["u"] == [-1.0, 1.0, 21]
    assert "pde_region" in doc
    assert plane.config()["beta"]["eps"] == [1, 1, 1]
