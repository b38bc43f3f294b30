import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fpplab.errors import InvalidParameterError, OutOfDomainError
from fpplab.weights import (
    HORIZONTAL, QUANTUM, VERTICAL, Distribution, EdgeId, edge_weights, make_field, weight_at,
)

EXP = Distribution.exponential(1.0)


def test_requery_is_bit_identical():
    f = make_field(4, 17, EXP)
    e = EdgeId(-2, 3, VERTICAL)
    assert weight_at(f, e) == weight_at(f, e)
    assert weight_at(f, e) == edge_weights(17, EXP, e.x, e.y, e.orientation)[0]


def test_uniform_support():
    f = make_field(10, 5, Distribution.uniform(0.5, 1.5))
    w = np.concatenate([f.horizontal.ravel(), f.vertical.ravel()])
    assert np.all((w > 0.5) & (w < 1.5))


def test_exponential_mean_law_of_large_numbers():
    x = np.arange(100_000) - 50_000
    w = edge_weights(2024, EXP, x, 7, HORIZONTAL)
    sigma = 1.0 / np.sqrt(w.size)
    assert abs(w.mean() - 1.0) < 3 * sigma
    assert abs(w.mean() - 1.0) < 0.02


def test_edge_count_by_enumeration():
    f = make_field(1, 0, EXP)
    pts = [(x, y) for x in range(-1, 2) for y in range(-1, 2)]
    enumerated = {frozenset((p, q)) for p in pts for q in pts if abs(p[0] - q[0]) + abs(p[1] - q[1]) == 1}
    assert len(enumerated) == 12
    assert f.n_edges == 12
    assert {frozenset(e.endpoints()) for e in f.edges()} == enumerated


def test_same_inputs_same_field():
    a, b = make_field(6, 99, EXP), make_field(6, 99, EXP)
    assert np.array_equal(a.horizontal, b.horizontal)
    assert np.array_equal(a.vertical, b.vertical)


@pytest.mark.parametrize("small,big", [(2, 5), (5, 10), (2, 10)])
def test_box_growth_stability(small, big):
    a, b = make_field(small, 3, EXP), make_field(big, 3, EXP)
    for e in a.edges():
        assert weight_at(a, e) == weight_at(b, e)


@given(seed=st.integers(0, 2**64 - 1), x=st.integers(-50, 50), y=st.integers(-50, 50), o=st.sampled_from([0, 1]))
@settings(max_examples=200, deadline=None)
def test_weight_independent_of_box(seed, x, y, o):
    e = EdgeId(x, y, o)
    r = max(abs(x), abs(y)) + 1
    assert weight_at(make_field(r, seed, EXP), e) == weight_at(make_field(r + 3, seed, EXP), e)


def test_weights_positive_and_dyadic():
    f = make_field(20, 1, Distribution.pareto(2.5, 0.5))
    w = np.concatenate([f.horizontal.ravel(), f.vertical.ravel()])
    assert np.all(w >= 0.5)
    assert np.all(w / QUANTUM == np.rint(w / QUANTUM))
    assert f.exact


def test_distinct_sums_on_random_edge_sets():
    f = make_field(6, 11, EXP)
    edges = list(f.edges())
    rng = np.random.default_rng(0)
    sums = {}
    for _ in range(3000):
        k = int(rng.integers(1, 6))
        chosen = frozenset(edges[i] for i in rng.choice(len(edges), size=k, replace=False))
        s = sum(weight_at(f, e) for e in chosen)
        assert sums.setdefault(s, chosen) == chosen


def test_distinct_sums_exhaustive_pairs():
    f = make_field(2, 8, EXP)
    w = [weight_at(f, e) for e in f.edges()]
    pair_sums = [a + b for a, b in itertools.combinations(w, 2)]
    assert len(set(pair_sums)) == len(pair_sums)
    assert len(set(w)) == len(w)


def test_different_seeds_differ():
    a, b = make_field(3, 1, EXP), make_field(3, 2, EXP)
    assert not np.array_equal(a.horizontal, b.horizontal)


def test_errors():
    with pytest.raises(InvalidParameterError):
        make_field(0, 1, EXP)
    with pytest.raises(OutOfDomainError):
        weight_at(make_field(2, 1, EXP), EdgeId(2, 0, HORIZONTAL))
    with pytest.raises(InvalidParameterError):
        Distribution.uniform(1.0, 0.5)
    with pytest.raises(InvalidParameterError):
        Distribution("gamma", {})
    with pytest.raises(InvalidParameterError):
        EdgeId.between((0, 0), (1, 1))


def test_edge_id_canonical():
    assert EdgeId.between((1, 0), (0, 0)) == EdgeId.between((0, 0), (1, 0)) == EdgeId(0, 0, HORIZONTAL)
    assert EdgeId.between((0, 2), (0, 1)) == EdgeId(0, 1, VERTICAL)


def test_constant_law():
    f = make_field(3, 0, Distribution.constant(1.0))
    assert np.all(f.horizontal == 1.0) and np.all(f.vertical == 1.0)
