"""Localized FM local search with an adaptive random-walk stopping rule.

A search starts from a few seed nodes (the endpoints of an uncontracted edge),
keeps one max-priority queue per target block and moves the best node whose
target block stays within its weight limit.  Moved nodes are marked; their
unmarked neighbours are (re)activated.  When the search stops it is rolled
back to the best cut seen, and the whole pass is repeated until a pass no
longer improves the cut.

The search stops early once ``p * mu**2 > alpha * sigma2 + beta``, where ``p``
is the number of moves since the last improvement, ``mu`` their mean gain and
``sigma2`` the gain variance over the whole pass.  Treating gains as i.i.d.
steps of a random walk, continuing for ``s`` more steps reaches at best about
``(p + s) * mu + x * sqrt(s * sigma2)``, maximized at ``s = sigma2 / (4 mu^2)``;
requiring that optimum to stay negative leads to the inequality above, with
``alpha`` absorbing ``x`` and ``beta`` preventing a stop after a handful of
low-variance steps.
"""

from __future__ import annotations

import heapq
import math
import random
from dataclasses import dataclass
from typing import Iterable, Sequence

from .graph import DynGraph
from .partition import Partition, cut_weight


def gain(g: DynGraph, P: Partition, v: int, B: int) -> float:
    """Cut decrease of moving ``v`` to block ``B``."""
    own = P.block[v]
    if B == own:
        raise ValueError(f"node {v} already lives in block {B}")
    ea, tg, ew, block = g.edge_alive, g.target, g.edge_weight, P.block
    into = inside = 0
    for h in g.adj[v]:
        if ea[h]:
            b = block[tg[h]]
            if b == B:
                into += ew[h]
            elif b == own:
                inside += ew[h]
    return into - inside


def should_stop(p: int, mu: float, sigma2: float, alpha: float, beta: float) -> bool:
    if math.isinf(alpha):
        return False
    return p * mu * mu > alpha * sigma2 + beta


@dataclass
class StopStats:
    p: int = 0
    since: float = 0  # sum of gains since the last improvement
    count: int = 0
    total: float = 0
    total_sq: float = 0

    def record(self, g: float, improved: bool) -> None:
        self.count += 1
        self.total += g
        self.total_sq += g * g
        if improved:
            self.p = 0
            self.since = 0
        else:
            self.p += 1
            self.since += g

    @property
    def mu(self) -> float:
        return self.since / self.p if self.p else 0.0

    @property
    def variance(self) -> float:
        if not self.count:
            return 0.0
        mean = self.total / self.count
        return max(self.total_sq / self.count - mean * mean, 0.0)

    def should_stop(self, alpha: float, beta: float) -> bool:
        if self.p == 0:
            return False
        return should_stop(self.p, self.mu, self.variance, alpha, beta)


class SearchState:
    """Scratch for one FM pass: queues, marks, activation and the move log."""

    def __init__(self, k: int):
        self.queues: list[list] = [[] for _ in range(k)]
        self.entry: list[dict] = [{} for _ in range(k)]
        self.blocks_of: dict[int, list[int]] = {}
        self.active: set[int] = set()
        self.conn: dict[int, dict[int, float]] = {}  # block connectivity of active nodes
        self.marked: set[int] = set()
        self.log: list[tuple[int, int, int, float]] = []

    def dequeue(self, v: int) -> None:
        for b in self.blocks_of.pop(v, ()):
            del self.entry[b][v]

    def queued(self) -> dict[int, dict[int, float]]:
        """Current queue contents as ``{block: {node: gain}}``."""
        return {b: {v: -e[0] for v, e in d.items()} for b, d in enumerate(self.entry)}


def activate(g: DynGraph, P: Partition, v: int, state: SearchState,
             rng: random.Random) -> None:
    """Queue ``v`` for every foreign block it touches, refreshing old entries."""
    ea, tg, ew, block = g.edge_alive, g.target, g.edge_weight, P.block
    conn: dict[int, float] = {}
    for h in g.adj[v]:
        if ea[h]:
            b = block[tg[h]]
            conn[b] = conn.get(b, 0) + ew[h]
    state.conn[v] = conn
    state.active.add(v)
    requeue(v, block[v], conn, state, rng)


def requeue(v: int, own: int, conn: dict, state: SearchState, rng: random.Random) -> None:
    """Replace v's queue entries with gains derived from its block connectivity."""
    state.dequeue(v)
    if len(conn) < 2 and own in conn:
        return
    inside = conn.get(own, 0)
    targets = []
    entry, queues = state.entry, state.queues
    for b, w in conn.items():
        if b != own:
            e = (inside - w, rng.random(), v)
            entry[b][v] = e
            heapq.heappush(queues[b], e)
            targets.append(b)
    if targets:
        state.blocks_of[v] = targets


class Refiner:
    """Runs local searches on ``P`` under per-block weight ``limits``."""

    def __init__(self, g: DynGraph, P: Partition, limits: Sequence[float],
                 alpha: float, beta: float, rng: random.Random,
                 debug: bool = False, check_gains: bool = False, allow_empty: bool = True):
        self.g = g
        self.P = P
        self.limits = list(limits)
        self.alpha = alpha
        self.beta = beta
        self.rng = rng
        self.debug = debug
        self.check_gains = check_gains
        self.allow_empty = allow_empty
        self.searches = 0
        self.last_log: list = []  # moves of the most recent pass, before rollback

    def is_border(self, v: int) -> bool:
        g, block = self.g, self.P.block
        ea, tg = g.edge_alive, g.target
        b = block[v]
        return any(ea[h] and block[tg[h]] != b for h in g.adj[v])

    def local_search(self, seeds: Iterable[int]) -> tuple[float, int]:
        """Repeat FM passes from ``seeds`` until one fails to improve.

        Returns the (nonpositive) cut change and the number of moves made.
        """
        seeds = list(seeds)
        total = 0
        steps = 0
        while True:
            delta, moved = self.fm_pass(seeds)
            steps += moved
            if delta >= 0:
                break
            total += delta
        return total, steps

    def fm_pass(self, seeds: Sequence[int]) -> tuple[float, int]:
        if not any(self.is_border(s) for s in seeds):
            return 0, 0
        self.searches += 1
        g, P, rng = self.g, self.P, self.rng
        k = P.k
        state = SearchState(k)
        self.last_log = state.log
        for s in seeds:
            activate(g, P, s, state, rng)

        ea, tg, ew, adj = g.edge_alive, g.target, g.edge_weight, g.adj
        nw = g.node_weight
        conns = state.conn
        block, bw, limits = P.block, P.block_weight, self.limits
        queues, entry = state.queues, state.entry
        marked, active, log = state.marked, state.active, state.log
        stats = StopStats()
        alpha, beta = self.alpha, self.beta
        cur = best = 0
        best_len = 0
        pop = heapq.heappop
        allow_empty = self.allow_empty

        while True:
            pick = None
            for b in range(k):
                heap = queues[b]
                ent = entry[b]
                while heap and ent.get(heap[0][2]) is not heap[0]:
                    pop(heap)
                if heap:
                    e = heap[0]
                    c = nw[e[2]]
                    if (bw[b] + c <= limits[b] and (pick is None or e < pick[0])
                            and (allow_empty or bw[block[e[2]]] > c)):
                        pick = (e, b)
            if pick is None:
                break
            e, to = pick
            v = e[2]
            gv = -e[0]
            frm = block[v]
            if self.check_gains:
                before = cut_weight(g, block)
            c = nw[v]
            bw[frm] -= c
            bw[to] += c
            block[v] = to
            P.cut -= gv
            log.append((v, frm, to, gv))
            state.dequeue(v)
            active.discard(v)
            del conns[v]
            marked.add(v)
            if self.debug:
                assert bw[to] <= limits[to], (to, bw[to], limits[to])
            if self.check_gains:
                assert before - cut_weight(g, block) == gv, (v, gv)
            for h in adj[v]:
                if ea[h]:
                    w = tg[h]
                    if w in marked:
                        continue
                    cw = conns.get(w)
                    if cw is None:
                        activate(g, P, w, state, rng)
                        continue
                    we = ew[h]
                    rest = cw[frm] - we
                    if rest:
                        cw[frm] = rest
                    else:
                        del cw[frm]
                    cw[to] = cw.get(to, 0) + we
                    requeue(w, block[w], cw, state, rng)
            cur -= gv
            improved = cur < best
            stats.record(gv, improved)
            if improved:
                best = cur
                best_len = len(log)
            elif stats.should_stop(alpha, beta):
                break

        for v, frm, to, gv in reversed(log[best_len:]):
            c = nw[v]
            bw[to] -= c
            bw[frm] += c
            block[v] = frm
            P.cut += gv
        return best, len(log)


def local_search(g: DynGraph, P: Partition, seeds: Iterable[int], limits: Sequence[float],
                 alpha: float, beta: float, rng: random.Random) -> tuple[float, int]:
    return Refiner(g, P, limits, alpha, beta, rng).local_search(seeds)


def border_nodes(g: DynGraph, P: Partition) -> list[int]:
    ea, tg, block = g.edge_alive, g.target, P.block
    out = []
    for v in g.alive_nodes():
        b = block[v]
        for h in g.adj[v]:
            if ea[h] and block[tg[h]] != b:
                out.append(v)
                break
    return out
