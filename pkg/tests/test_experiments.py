import json
import math

import numpy as np
import pytest

from brute import best_paths
from fpplab.config import parse_config
from fpplab.errors import ConfigError, InvalidParameterError
from fpplab.experiments import (
    competition, dual_edges, ferromagnet_weight_map, field_couplings, half_full_pair,
    midpoint_indicator, run_experiment,
)
from fpplab.geodesic import geodesic
from fpplab.lattice import DualEdge, SectorSpec, VERTICAL
from fpplab.weights import Distribution, WeightField, make_field


def cfg(text, name="t"):
    return parse_config(text, name)


def _field_with(radius, cheap_edges, cheap=0.125, base=1.0):
    w = 2 * radius + 1
    h = np.full((w, w - 1), base)
    v = np.full((w - 1, w), base)
    for (x, y, o) in cheap_edges:
        (h if o == 0 else v)[y + radius, x + radius] = cheap
    return WeightField.from_arrays(radius, h, v)


def test_midpoint_forced_straight_path():
    f = _field_with(3, [(0, 0, 0), (1, 0, 0)])
    region = {(x, y) for x in range(-1, 4) for y in range(-2, 3)}
    t, path = best_paths(f, (0, 0), region=region)[(2, 0)]
    assert path == ((0, 0), (1, 0), (2, 0))
    assert midpoint_indicator(f, 2)


def test_midpoint_unit_weights_deterministic():
    rep = run_experiment("midpoint", cfg("dist = constant\nreplicates = 5\nn_values = 4, 8"))
    for s in rep.stats:
        assert s["count"] in (0, s["replicates"])
    # the tie-break prefers low rows then low x, so the path hugs y = 0
    assert all(row[3] == 1 for row in rep.rows)


def test_midpoint_report_shape():
    rep = run_experiment("midpoint", cfg("replicates = 30\nn_values = 4, 8\nseed = 3"))
    assert [s["n"] for s in rep.stats] == [4, 8]
    assert all(s["replicates"] == 30 and len(s["ci"]) == 2 for s in rep.stats)
    assert rep.verdicts["trend_alpha"] == 0.01
    assert rep.ok


def test_coalescence_zero_separation():
    rep = run_experiment("coalescence", cfg("replicates = 10\nn_values = 8, 16\nseparations = 0, 6"))
    zero = [s for s in rep.stats if s["d"] == 0]
    assert all(s["count"] == s["replicates"] for s in zero)
    assert rep.invariants["zero_separation_coalesces"]


def test_half_full_vertical_column():
    f = _field_with(6, [(0, y, 1) for y in range(0, 5)])
    sector = SectorSpec.direction(math.pi / 2)
    assert half_full_pair(f, sector, 5) == (True, True)


def test_half_full_excludes_dipping_paths():
    # a cheap detour below L_0 makes the full-plane proxy leave the half-plane
    cheap = [(0, -1, 1), (0, -1, 0), (1, -1, 1), (1, 0, 1), (1, 1, 0)]
    f = _field_with(4, cheap, cheap=0.01, base=5.0)
    full = geodesic(f, (0, 0), (1, 1))
    assert any(p.y < 0 for p in full.vertices)
    assert half_full_pair(f, SectorSpec.direction(math.pi / 4), 1) == (False, False)


def test_half_full_report():
    rep = run_experiment("half-full", cfg("replicates = 10\nn_values = 8, 16"))
    for s in rep.stats:
        assert s["replicates"] <= 10 and s["total_replicates"] == 10


def test_competition_unit_weights_adjacent_sources():
    f = make_field(2, 0, Distribution.constant(1.0))
    c = competition(f, (0, 0), (1, 0))
    assert c.ties == 0
    xs = np.arange(-2, 3)
    assert np.array_equal(c.labels, np.tile((xs > 0).astype(np.int8), (5, 1)))
    assert c.interface == [DualEdge(0, y, VERTICAL) for y in range(-3, 2)]
    assert c.ends == [(0.5, -2.5), (0.5, 2.5)]


def test_competition_rejects_single_source():
    f = make_field(3, 0, Distribution.exponential())
    with pytest.raises(InvalidParameterError):
        competition(f, (1, 1), (1, 1))
    with pytest.raises(ConfigError):
        run_experiment("competition", cfg("sources = 1,1; 1,1\nn_values = 4\nreplicates = 1"))


def test_competition_partition_and_connectivity():
    rep = run_experiment("competition", cfg("replicates = 6\nn_values = 10, 14\nsources = -5,0; 5,0"))
    assert rep.invariants == {"partition": True, "clusters_connected": True}
    for row in rep.rows:
        n = row[0]
        assert row[3] + row[4] == (2 * n + 1) ** 2


def test_competition_ties_go_to_first_source():
    f = make_field(3, 0, Distribution.constant(1.0))
    c = competition(f, (-1, 0), (1, 0))
    assert c.ties > 0
    assert c.labels[3, 3] == 0  # the origin is equidistant
    assert all(c.connected)


def test_ferromagnet_unit_couplings():
    r = 3
    f = ferromagnet_weight_map({d: 1.0 for d in dual_edges(r)}, r)
    unit = make_field(r, 0, Distribution.constant(1.0))
    assert np.array_equal(f.horizontal, unit.horizontal) and np.array_equal(f.vertical, unit.vertical)


def test_ferromagnet_round_trip_and_geodesics():
    r = 5
    rng = np.random.default_rng(4)
    couplings = {d: float(rng.exponential()) + 1e-3 for d in dual_edges(r)}
    f = ferromagnet_weight_map(couplings, r)
    assert field_couplings(f) == couplings
    direct = make_field(r, 17, Distribution.exponential())
    mapped = ferromagnet_weight_map(field_couplings(direct), r)
    assert geodesic(mapped, (-4, -3), (4, 2)).vertices == geodesic(direct, (-4, -3), (4, 2)).vertices


def test_ferromagnet_rejects_bad_couplings():
    r = 2
    couplings = {d: 1.0 for d in dual_edges(r)}
    missing = dict(couplings)
    missing.pop(next(iter(missing)))
    with pytest.raises(InvalidParameterError):
        ferromagnet_weight_map(missing, r)
    couplings[next(iter(couplings))] = 0.0
    with pytest.raises(InvalidParameterError):
        ferromagnet_weight_map(couplings, r)


@pytest.mark.parametrize("name", ["shape", "busemann", "delta-h", "ordering", "cluster"])
def test_other_experiments_run(name, tmp_path):
    rep = run_experiment(name, cfg("replicates = 4\nn_values = 16"))
    assert rep.ok
    paths = rep.write(tmp_path)
    data = json.loads(paths["report"].read_text())
    assert data["name"] == name and data["config"]["replicates"] == 4
    assert paths["samples"].read_text().splitlines()[0] == ",".join(rep.header)


def test_unknown_experiment():
    with pytest.raises(ConfigError):
        run_experiment("nope", cfg("replicates = 1"))


def test_samples_do_not_depend_on_workers_or_extra_scales(tmp_path):
    a = run_experiment("midpoint", cfg("replicates = 6\nn_values = 8\nseed = 9"))
    b = run_experiment("midpoint", cfg("replicates = 6\nn_values = 8, 12\nseed = 9\nworkers = 2"))
    assert b.rows[:6] == a.rows
