import json

import numpy as np
import pytest

from brute import best_paths
from fpplab.errors import OutOfDomainError
from fpplab.geodesic import (
    check_geodesic, geodesic, geodesic_tree, out_set, passage_time, shortest_paths,
)
from fpplab.lattice import HALF, Point
from fpplab.weights import Distribution, make_field

EXP = Distribution.exponential(1.0)
UNIT = Distribution.constant(1.0)


def box_points(r, half=False):
    return [Point(x, y) for y in range(0 if half else -r, r + 1) for x in range(-r, r + 1)]


def test_trivial_cases():
    f = make_field(3, 0, EXP)
    assert passage_time(f, (1, 1), (1, 1)) == 0.0
    g = geodesic(f, (1, 1), (1, 1))
    assert g.vertices == ((1, 1),) and g.time == 0.0


def test_unit_weights_give_l1_distance():
    f = make_field(4, 0, UNIT)
    assert passage_time(f, (0, 0), (3, 2)) == 5.0
    rng = np.random.default_rng(1)
    pts = box_points(4)
    for _ in range(30):
        a, b = (pts[i] for i in rng.choice(len(pts), 2))
        assert passage_time(f, a, b) == abs(a.x - b.x) + abs(a.y - b.y)


@pytest.mark.parametrize("seed", range(6))
def test_matches_enumeration_oracle(seed):
    f = make_field(2, 100 + seed, EXP)
    rng = np.random.default_rng(seed)
    pts = box_points(2)
    for src in [pts[i] for i in rng.choice(len(pts), 2, replace=False)]:
        best = best_paths(f, src)
        sp = shortest_paths(f, src)
        for dst in pts:
            t, path = best[dst]
            assert sp.time_to(dst) == t
            assert sp.path_to(dst).vertices == path


def test_unit_weight_tie_break_matches_enumeration():
    f = make_field(2, 0, UNIT)
    for src in [(0, 0), (-2, 1), (2, -2)]:
        best = best_paths(f, src)
        sp = shortest_paths(f, src)
        for dst, (t, path) in best.items():
            assert sp.time_to(dst) == t
            assert sp.path_to(dst).vertices == path


def test_half_plane_matches_enumeration():
    f = make_field(2, 7, EXP)
    for src in [(0, 0), (-1, 2)]:
        best = best_paths(f, src, restriction=HALF)
        sp = shortest_paths(f, src, HALF)
        for dst, (t, path) in best.items():
            assert sp.time_to(dst) == t
            assert sp.path_to(dst).vertices == path


def test_half_plane_path_stays_up():
    f = make_field(12, 3, EXP)
    g = geodesic(f, (-10, 0), (10, 0), HALF)
    assert all(p.y >= 0 for p in g.vertices)
    assert g.time >= passage_time(f, (-10, 0), (10, 0))


def test_half_plane_rejects_lower_points():
    f = make_field(4, 3, EXP)
    with pytest.raises(OutOfDomainError):
        passage_time(f, (0, -1), (0, 2), HALF)
    with pytest.raises(OutOfDomainError):
        passage_time(f, (0, 0), (5, 0))


def test_metric_axioms_sampled():
    f = make_field(10, 5, EXP)
    rng = np.random.default_rng(2)
    pts = box_points(10)
    sources = [pts[i] for i in rng.choice(len(pts), 12, replace=False)]
    runs = {s: shortest_paths(f, s) for s in sources}
    for x in sources:
        for y in sources:
            txy = runs[x].time_to(y)
            assert txy == runs[y].time_to(x)
            assert (txy == 0) == (x == y)
            for z in sources:
                assert runs[x].time_to(z) <= txy + runs[y].time_to(z)


def test_restriction_monotonicity():
    f = make_field(10, 9, EXP)
    pts = box_points(10, half=True)
    rng = np.random.default_rng(3)
    for s in [pts[i] for i in rng.choice(len(pts), 5, replace=False)]:
        full, half = shortest_paths(f, s), shortest_paths(f, s, HALF)
        for p in pts:
            assert half.time_to(p) >= full.time_to(p)


def test_geodesic_reversal_continuous_weights():
    f = make_field(10, 4, EXP)
    g = geodesic(f, (-7, 3), (6, -5))
    assert geodesic(f, (6, -5), (-7, 3)).vertices == g.reversed().vertices


def test_subpath_property():
    f = make_field(12, 8, EXP)
    g = geodesic(f, (-9, -9), (10, 8))
    check_geodesic(f, g)
    verts = g.vertices
    for i, j in [(0, 5), (3, 20), (10, len(verts) - 1), (7, 8)]:
        sub = geodesic(f, verts[i], verts[j])
        assert sub.vertices == verts[i:j + 1]


def test_tree_single_target_is_the_geodesic():
    f = make_field(8, 1, EXP)
    tree = geodesic_tree(f, (0, 0), [(5, 6)])
    assert tree.path_to((5, 6)) == geodesic(f, (0, 0), (5, 6)).vertices
    assert tree.leaves == {(5, 6)}


def test_tree_shared_prefix_stored_once():
    f = make_field(10, 12, EXP)
    a, b = (3, 9), (5, 9)
    ga, gb = geodesic(f, (0, 0), a), geodesic(f, (0, 0), b)
    k = 0
    while k < min(len(ga), len(gb)) and ga.vertices[k] == gb.vertices[k]:
        k += 1
    tree = geodesic_tree(f, (0, 0), [a, b])
    assert tree.path_to(a) == ga.vertices and tree.path_to(b) == gb.vertices
    assert len(tree.parent) == len(ga) + len(gb) - k - 1
    branch = ga.vertices[k - 1]
    assert sorted(tree.children()[branch]) == sorted({ga.vertices[k], gb.vertices[k]})


def test_tree_consistency_every_leaf():
    f = make_field(9, 21, EXP)
    targets = [(x, 8) for x in range(-6, 7)]
    tree = geodesic_tree(f, (0, 0), targets)
    for t in targets:
        assert tree.path_to(t) == geodesic(f, (0, 0), t).vertices


def test_out_set():
    f = make_field(2, 33, EXP)
    probes = box_points(2)
    assert out_set(f, (0, 0), (0, 0), probes) == set(probes)
    best = best_paths(f, (0, 0))
    for w in [(1, 0), (0, 1), (-1, -1), (2, 2)]:
        expected = {u for u in probes if tuple(w) in best[u][1]}
        assert out_set(f, (0, 0), w, probes) == expected


def test_out_set_empty_when_off_all_paths():
    f = make_field(6, 2, EXP)
    probes = [(x, 6) for x in range(-2, 3)]
    paths = [geodesic(f, (0, 0), u) for u in probes]
    off = next(p for p in [(-6, -6), (6, -6), (-6, 6)] if not any(p in g for g in paths))
    assert out_set(f, (0, 0), off, probes) == set()


def test_box_stability():
    f_small = make_field(14, 77, EXP)
    g = geodesic(f_small, (-5, -3), (6, 4))
    assert max(max(abs(p.x), abs(p.y)) for p in g.vertices) <= 12
    f_big = make_field(16, 77, EXP)
    assert geodesic(f_big, (-5, -3), (6, 4)).vertices == g.vertices


def test_json_export():
    f = make_field(3, 1, EXP)
    g = geodesic(f, (0, 0), (2, 1))
    assert json.loads(g.to_json()) == [list(p) for p in g.vertices]


def test_subtree_mask_matches_on_path():
    f = make_field(6, 3, EXP)
    sp = shortest_paths(f, (0, 0))
    w = geodesic(f, (0, 0), (4, 5)).vertices[3]
    mask = sp.subtree_mask(w)
    for p in box_points(6):
        assert mask[p.y + 6, p.x + 6] == sp.on_path(w, p)
