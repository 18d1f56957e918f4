"""Benchmark instance generators: unit grids and random geometric graphs."""

from __future__ import annotations

import math

import numpy as np
from scipy.spatial import cKDTree

from .graph import DynGraph


def grid_graph(width: int, height: int) -> DynGraph:
    if width < 1 or height < 1:
        raise ValueError("grid dimensions must be positive")
    edges = []
    for y in range(height):
        for x in range(width):
            v = y * width + x
            if x + 1 < width:
                edges.append((v, v + 1, 1))
            if y + 1 < height:
                edges.append((v, v + width, 1))
    return DynGraph.from_edges([1] * (width * height), edges)


def rgg_radius(n: int) -> float:
    return 0.55 * math.sqrt(math.log(n) / n)


def rgg_graph(log_n: int, seed: int = 0) -> DynGraph:
    """``2**log_n`` uniform points in the unit square, joined below ``rgg_radius``."""
    n = 1 << log_n
    rng = np.random.default_rng(seed)
    points = rng.random((n, 2))
    # number points strip by strip so neighbours get nearby ids
    r = rgg_radius(n)
    strips = max(1, int(1 / r))
    points = points[np.lexsort((points[:, 0], np.floor(points[:, 1] * strips)))]
    pairs = cKDTree(points).query_pairs(r, output_type="ndarray")
    if len(pairs):
        pairs = pairs[np.lexsort((pairs[:, 1], pairs[:, 0]))]
    g = DynGraph([1] * n)
    adj, target = g.adj, g.target
    for h, (u, v) in enumerate(pairs.tolist()):
        target += (v, u)
        adj[u].append(2 * h)
        adj[v].append(2 * h + 1)
    g.edge_weight = [1] * len(target)
    g.edge_alive = bytearray(b"\x01") * len(target)
    g.m = len(pairs)
    return g
