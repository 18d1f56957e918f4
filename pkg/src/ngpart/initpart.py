"""Initial partitioning of the coarsest graph by recursive greedy bisection."""

from __future__ import annotations

import heapq
import math
import random
from dataclasses import dataclass, field

from .graph import DynGraph
from .partition import BalanceBound, Partition
from .refine import Refiner, border_nodes


@dataclass
class InitialResult:
    partition: Partition
    feasible: bool
    attempt_cuts: list = field(default_factory=list)
    attempt_feasible: list = field(default_factory=list)


def greedy_bisect(g: DynGraph, target_fraction: float, rng: random.Random,
                  limits: tuple[float, float] | None = None,
                  alpha: float = math.inf, beta: float = 0.0) -> Partition:
    """Grow block 0 from a random node, then polish with one FM search.

    ``g`` must be compact (every slot alive).  Nodes are pulled in by highest
    gain until block 0 reaches ``target_fraction`` of the total weight; a node
    that would push block 0 past ``limits[0]`` is skipped.  Without ``limits``
    each side may exceed its target share by the heaviest node weight.  The
    FM polish never empties a side.
    """
    n = g.num_slots
    nw, ea, tg, ew, adj = g.node_weight, g.edge_alive, g.target, g.edge_weight, g.adj
    total = g.total_weight
    target = target_fraction * total
    limit0 = limits[0] if limits is not None else math.inf
    block = [1] * n
    if n == 0:
        return Partition(g, 2, block)

    wdeg = [0] * n
    for v in range(n):
        wdeg[v] = sum(ew[h] for h in adj[v] if ea[h])
    conn = [0] * n
    order = list(range(n))
    rng.shuffle(order)
    next_seed = 0
    heap: list = []
    current: dict[int, tuple] = {}
    w0 = 0
    while w0 < target:
        while heap and current.get(heap[0][2]) is not heap[0]:
            heapq.heappop(heap)
        if heap:
            e = heapq.heappop(heap)
            v = e[2]
            del current[v]
        else:
            v = -1
            while next_seed < n:
                s = order[next_seed]
                next_seed += 1
                if block[s] == 1 and s not in current and w0 + nw[s] <= limit0:
                    v = s
                    break
            if v < 0:
                break
        if w0 + nw[v] > limit0:
            continue
        block[v] = 0
        w0 += nw[v]
        for h in adj[v]:
            if ea[h]:
                t = tg[h]
                if block[t] == 1:
                    conn[t] += ew[h]
                    entry = (wdeg[t] - 2 * conn[t], rng.random(), t)
                    current[t] = entry
                    heapq.heappush(heap, entry)

    P = Partition(g, 2, block)
    if limits is None:
        heaviest = max(nw)
        limits = (target + heaviest, total - target + heaviest)
    refiner = Refiner(g, P, limits, alpha, beta, rng, allow_empty=False)
    refiner.local_search(border_nodes(g, P))
    return P


def recursive_split(g: DynGraph, k: int, bound: BalanceBound, rng: random.Random,
                    alpha: float = math.inf, beta: float = 0.0) -> list[int]:
    """Block list (indexed like ``g``) from recursive bisection into k parts."""
    block = [0] * g.num_slots
    _split(g, list(range(g.num_slots)), k, 0, bound, rng, alpha, beta, block)
    return block


def _split(g, nodes, k, offset, bound, rng, alpha, beta, block):
    if k == 1 or not nodes:
        for v in nodes:
            block[v] = offset
        return
    k0 = (k + 1) // 2
    k1 = k - k0
    sub, ids = g.compact(nodes) if len(nodes) != g.num_slots else (g, nodes)
    limits = (bound.limit_for(k0), bound.limit_for(k1))
    P = greedy_bisect(sub, k0 / k, rng, limits, alpha, beta)
    left = [ids[i] for i in range(sub.num_slots) if P.block[i] == 0]
    right = [ids[i] for i in range(sub.num_slots) if P.block[i] == 1]
    # ``left``/``right`` index the parent graph ``g``
    _split(g, left, k0, offset, bound, rng, alpha, beta, block)
    _split(g, right, k1, offset + k0, bound, rng, alpha, beta, block)


def initial_partition(g: DynGraph, k: int, bound: BalanceBound, attempts: int,
                      rng: random.Random, alpha: float = math.inf,
                      beta: float = 0.0) -> InitialResult:
    """Best of ``attempts`` recursive bisections, each refined k-way.

    Feasible attempts always beat infeasible ones; among equals the lower cut
    wins.  The returned partition is indexed by the slots of ``g``.
    """
    if k > g.n:
        raise ValueError(f"cannot split {g.n} nodes into {k} blocks")
    attempts = max(1, attempts)
    sub, ids = g.compact()
    best = None
    best_key = None
    cuts, feas = [], []
    for _ in range(attempts):
        blocks = recursive_split(sub, k, bound, rng, alpha, beta)
        P = Partition(sub, k, blocks)
        if k > 1:
            refiner = Refiner(sub, P, [bound.l_max] * k, alpha, beta, rng, allow_empty=False)
            refiner.local_search(border_nodes(sub, P))
        ok = P.is_feasible(bound)
        cuts.append(P.cut)
        feas.append(ok)
        key = (not ok, P.cut if ok else max(P.block_weight) - bound.l_max, P.cut)
        if best_key is None or key < best_key:
            best, best_key = P, key
    block = [-1] * g.num_slots
    for i, v in enumerate(ids):
        block[v] = best.block[i]
    P = Partition(g, k, block)
    return InitialResult(P, best_key[0] is False, cuts, feas)


def attempts_for(base: int, k: int) -> int:
    """``ceil(base / log2 k)``, with a single attempt when k is 1."""
    if k <= 1:
        return 1
    return math.ceil(base / math.log2(k))
