import math

import pytest

from ngpart.generate import grid_graph, rgg_graph, rgg_radius


def test_grid_counts():
    g = grid_graph(4, 4)
    assert (g.n, g.m) == (16, 24)
    g.validate()


def test_grid_degrees():
    g = grid_graph(3, 2)
    assert sorted(g.degree(v) for v in range(6)) == [2, 2, 2, 2, 3, 3]


def test_grid_rejects_empty():
    with pytest.raises(ValueError):
        grid_graph(0, 3)


def test_rgg_radius_2_10():
    # 0.55 * sqrt(ln 1024 / 1024)
    assert rgg_radius(1024) == pytest.approx(0.0453, abs=5e-5)
    assert rgg_radius(1024) == pytest.approx(0.55 * math.sqrt(math.log(1024) / 1024))


def test_rgg_reproducible():
    a, b = rgg_graph(10, seed=3), rgg_graph(10, seed=3)
    assert a.snapshot() == b.snapshot()
    assert rgg_graph(10, seed=4).snapshot() != a.snapshot()


def test_rgg_valid_and_plausible_density():
    g = rgg_graph(11, seed=0)
    g.validate()
    assert g.n == 2048
    # expected degree is about pi * r^2 * n = 0.95 * ln n (minus boundary loss)
    mean_deg = 2 * g.m / g.n
    assert 0.6 * 0.95 * math.log(2048) < mean_deg < 1.1 * 0.95 * math.log(2048)
