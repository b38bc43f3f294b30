import math

import pytest
from hypothesis import given, strategies as st

from fpplab.config import ExperimentConfig, load_config, parse_config
from fpplab.errors import ConfigError, InsufficientDataError
from fpplab.stats import (
    difference_lower_bound, mean_interval, nondecreasing, strictly_decreasing, wilson_interval,
)
from fpplab.weights import Distribution


def test_wilson_known_value():
    lo, hi = wilson_interval(30, 100, 0.95)
    # closed form of the Wilson score interval
    z = 1.959963984540054
    p, n = 0.3, 100
    c = (p + z * z / (2 * n)) / (1 + z * z / n)
    h = z / (1 + z * z / n) * math.sqrt(p * (1 - p) / n + z * z / (4 * n * n))
    assert (lo, hi) == pytest.approx((c - h, c + h), abs=1e-12)


@given(st.integers(0, 200), st.integers(1, 200))
def test_wilson_contains_estimate(k, extra):
    n = k + extra
    lo, hi = wilson_interval(k, n)
    assert 0 <= lo <= k / n <= hi <= 1


def test_difference_bound_signs():
    assert difference_lower_bound(60, 100, 40, 100) > 0
    assert difference_lower_bound(50, 100, 50, 100) < 0
    with pytest.raises(InsufficientDataError):
        difference_lower_bound(1, 0, 1, 1)


def test_trends():
    falling = [(500, 1000), (300, 1000), (100, 1000)]
    assert strictly_decreasing(falling).holds
    assert not nondecreasing(falling).holds
    flat = [(300, 1000), (310, 1000), (295, 1000)]
    assert nondecreasing(flat).holds and not strictly_decreasing(flat).holds


def test_mean_interval():
    m, lo, hi = mean_interval([1.0, 2.0, 3.0], 0.95)
    assert m == 2.0 and lo < 2.0 < hi
    with pytest.raises(InsufficientDataError):
        mean_interval([1.0])


def test_parse_example():
    c = parse_config("dist = exponential\nrate = 1.0\nseed = 42\n# comment\nn_values = 16, 32\n", "midpoint")
    assert c.dist == Distribution.exponential(1.0) and c.seed_base == 42
    assert c.n_values == (16, 32) and c.name == "midpoint"


def test_parse_everything():
    text = """
    name = run1
    dist = uniform
    a = 0.5
    b = 1.5
    replicates = 7
    n_values = 8 16
    theta = 1.5
    theta1 = 1.4
    theta2 = 1.6
    separations = 0, 4
    sources = -3,0; 3,0
    restriction = half
    box_factor = 2
    level = 0.9
    workers = 2
    tol_tangent = 0.01
    """
    c = parse_config(text)
    assert c.name == "run1" and c.dist == Distribution.uniform(0.5, 1.5)
    assert (c.sector.theta1, c.sector.theta2) == (1.4, 1.6)
    assert c.sources == ((-3, 0), (3, 0)) and c.separations == (0, 4)
    assert c.tolerances == {"tangent": 0.01} and c.restriction == "half"
    assert c.echo()["dist"] == {"kind": "uniform", "a": 0.5, "b": 1.5}


@pytest.mark.parametrize("text", [
    "replicates = 0",
    "n_values = 32, 16",
    "n_values = 16, 16",
    "dist = gamma",
    "dist = uniform\na = 1",
    "rate = -1",
    "bogus = 1",
    "replicates = many",
    "seed 4",
    "seed = 1\nseed = 2",
    "theta = 1\ntheta1 = 2",
    "restriction = quarter",
    "sources = 1,2,3",
    "box_factor = 0.5",
    "level = 1.5",
])
def test_bad_configs(text):
    with pytest.raises(ConfigError):
        parse_config(text)


def test_load_missing_file(tmp_path):
    with pytest.raises(ConfigError):
        load_config(tmp_path / "none.cfg")
    p = tmp_path / "a.cfg"
    p.write_text("replicates = 3\n")
    assert load_config(p, "x").replicates == 3


def test_dataclass_invariants():
    with pytest.raises(ConfigError):
        ExperimentConfig("x", n_values=())
