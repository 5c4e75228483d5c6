import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from lorentzw.geometry4 import causal_sign, inner, is_null, normal_rank, vec4

finite = st.floats(min_value=-1e3, max_value=1e3, allow_nan=False)
vectors = st.tuples(finite, finite, finite, finite).map(np.array)


@pytest.mark.parametrize("a, b, expected", [
    ((1, 0, 0, 0), (1, 0, 0, 0), 1.0),
    ((0, 0, 1, 0), (0, 0, 1, 0), -1.0),
    ((1, 1, 1, 1), (1, 1, 1, 1), 0.0),
    ((1, 2, 3, 4), (4, 3, 2, 1), 4 + 6 - 6 - 4),
])
def test_inner_examples(a, b, expected):
    assert inner(vec4(*a), vec4(*b)) == expected


def test_vec4_rejects_non_finite():
    with pytest.raises(ValueError):
        vec4(1.0, np.nan, 0.0, 0.0)
    with pytest.raises(ValueError):
        vec4(np.inf, 0.0, 0.0, 0.0)


@pytest.mark.parametrize("v, expected", [
    ((1, 1, 1, 1), True),
    ((1, 0, 0, 0), False),
    ((1 + 1e-16, 1, 1, 1), True),
    ((1e8, 0, 1e8, 0), True),
])
def test_is_null_examples(v, expected):
    assert is_null(vec4(*v), 1e-12) is expected


def test_causal_sign():
    assert causal_sign(vec4(1, 0, 0, 0)) == 1
    assert causal_sign(vec4(0, 0, 0, 1)) == -1
    assert causal_sign(vec4(1, 0, 1, 0)) == 0


@pytest.mark.parametrize("w1, w2, rank", [
    ((0, 0, 0, 0), (0, 0, 0, 0), 0),
    ((1, 1, 1, 1), (2, 2, 2, 2), 1),
    ((1, 0, 0, 0), (0, 1, 0, 0), 2),
    ((1, 1, 0, 0), (1, 1, 0, 0), 1),
    ((1, 0, 1, 0), (0, 1, 0, 1), 2),  # two null vectors spanning a degenerate-free plane
])
def test_normal_rank_examples(w1, w2, rank):
    assert normal_rank(vec4(*w1), vec4(*w2)) == rank


@given(vectors, vectors)
def test_inner_symmetric(a, b):
    assert inner(a, b) == inner(b, a)


@given(vectors, vectors, vectors, st.floats(min_value=-10, max_value=10))
def test_inner_bilinear(a, b, c, lam):
    lhs = inner(lam * a + c, b)
    rhs = lam * inner(a, b) + inner(c, b)
    scale = (abs(lam) * np.abs(a).max() + np.abs(c).max() + 1) * (np.abs(b).max() + 1)
    assert abs(lhs - rhs) <= 1e-12 * scale


@given(st.floats(min_value=-50, max_value=50), st.floats(min_value=-50, max_value=50),
       st.sampled_from([-1, 1]), st.sampled_from([-1, 1]))
def test_signature_matched_patterns_are_null(x, y, s1, s2):
    assert is_null(np.array([x, y, s1 * x, s2 * y]))


small_ints = st.integers(min_value=-5, max_value=5)
int_vectors = st.tuples(small_ints, small_ints, small_ints, small_ints).map(lambda x: np.array(x, dtype=float))


@given(vectors, vectors, st.floats(min_value=1e-3, max_value=1e3))
def test_normal_rank_swap_and_common_scale(a, b, s):
    r = normal_rank(a, b)
    assert r in (0, 1, 2)
    assert normal_rank(b, a) == r
    assert normal_rank(s * a, s * b) == r


@given(int_vectors, int_vectors, st.floats(min_value=0.5, max_value=2), st.floats(min_value=-2, max_value=-0.5))
def test_normal_rank_row_scaling(a, b, s1, s2):
    # integer rows are exactly rank 0, 1 or 2, far from the threshold
    expected = np.linalg.matrix_rank(np.array([a, b]))
    assert normal_rank(a, b) == expected
    assert normal_rank(s1 * a, s2 * b) == expected


def test_normal_rank_uses_coordinates_not_gram():
    # both rows null and mutually orthogonal: the Gram matrix vanishes but the rank is 2
    w1, w2 = vec4(1, 0, 1, 0), vec4(0, 1, 0, 1)
    gram = np.array([[inner(w1, w1), inner(w1, w2)], [inner(w2, w1), inner(w2, w2)]])
    assert np.linalg.det(gram) == 0
    assert normal_rank(w1, w2) == 2


def test_normal_rank_rejects_negative_tol():
    with pytest.raises(ValueError):
        normal_rank(vec4(1, 0, 0, 0), vec4(0, 1, 0, 0), -1.0)
