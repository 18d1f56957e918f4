"""Single-edge coarsening driven by the expansion* rating.

Contractable nodes sit in a max-priority queue keyed by the rating of their
best eligible incident edge.  The heap uses lazy deletion: an entry is valid
only while it is the one recorded for its node in ``ContractionQueue.entry``.
"""

from __future__ import annotations

import heapq
import random

from .graph import ContractionMemento, DynGraph


def expansion_star(g: DynGraph, u: int, v: int) -> float:
    h = g.find_edge(u, v)
    if h is None:
        raise ValueError(f"{u} and {v} are not adjacent")
    cu, cv = g.node_weight[u], g.node_weight[v]
    if cu <= 0 or cv <= 0:
        raise ValueError("expansion* is undefined for zero node weight")
    return g.edge_weight[h] / (cu * cv)


def weight_cap(n0: int, k: int, factor: float = 1.5, coarsest_factor: int = 20) -> float:
    """Heaviest node weight still allowed to take part in a contraction."""
    return factor * n0 / (coarsest_factor * k)


def eligible(weight: float, cap: float) -> bool:
    return weight <= cap


class ContractionQueue:
    def __init__(self, g: DynGraph, cap: float, rng: random.Random):
        self.g = g
        self.cap = cap
        self.rng = rng
        self.key = [rng.random() for _ in range(g.num_slots)]
        self.heap: list[tuple] = []
        self.entry: dict[int, tuple] = {}
        for v in g.alive_nodes():
            self.update(v)

    def __len__(self) -> int:
        return len(self.entry)

    def __contains__(self, v: int) -> bool:
        return v in self.entry

    def best_edge(self, u: int):
        """``(rating, half-edge)`` of u's best eligible edge, or None."""
        g = self.g
        nw, ea, tg, ew, key, cap = g.node_weight, g.edge_alive, g.target, g.edge_weight, self.key, self.cap
        cu = nw[u]
        best = None
        best_r = 0.0
        best_k = 0.0
        for h in g.adj[u]:
            if not ea[h]:
                continue
            t = tg[h]
            ct = nw[t]
            if ct > cap:
                continue
            r = ew[h] / (cu * ct)
            if best is None or r > best_r or (r == best_r and key[t] < best_k):
                best, best_r, best_k = h, r, key[t]
        if best is None:
            return None
        return best_r, best

    def update(self, v: int) -> None:
        """(Re)rate node v, or drop it if it has no eligible edge."""
        g = self.g
        if not g.node_alive[v] or g.node_weight[v] > self.cap:
            self.entry.pop(v, None)
            return
        found = self.best_edge(v)
        if found is None:
            self.entry.pop(v, None)
            return
        e = (-found[0], self.key[v], v, found[1])
        self.entry[v] = e
        heapq.heappush(self.heap, e)

    def remove(self, v: int) -> None:
        self.entry.pop(v, None)

    def peek(self):
        heap, entry = self.heap, self.entry
        while heap:
            e = heap[0]
            if entry.get(e[2]) is e:
                return e
            heapq.heappop(heap)
        return None

    def pop(self):
        """Remove and return ``(node, half-edge, rating)`` of the top entry."""
        e = self.peek()
        if e is None:
            return None
        heapq.heappop(self.heap)
        del self.entry[e[2]]
        return e[2], e[3], -e[0]

    def add_node_key(self) -> None:
        self.key.append(self.rng.random())


def coarsen_step(g: DynGraph, queue: ContractionQueue) -> ContractionMemento:
    """Contract the globally best-rated eligible edge and repair the queue."""
    top = queue.pop()
    if top is None:
        raise IndexError("contraction queue is empty")
    _, h, _ = top
    memento = g.contract_edge(h)
    queue.add_node_key()
    queue.remove(memento.u)
    queue.remove(memento.v)
    x = memento.x
    queue.update(x)
    tg, ea, ew, nw = g.target, g.edge_alive, g.edge_weight, g.node_weight
    entry, key = queue.entry, queue.key
    x_ok = nw[x] <= queue.cap
    cx = nw[x]
    for e in g.adj[x]:
        w = tg[e]
        old = entry.get(w)
        if old is None or not ea[old[3]] or tg[old[3]] == x:
            queue.update(w)
            continue
        # best edge of w is untouched; only its edge to x can beat it
        if x_ok:
            r = ew[e] / (nw[w] * cx)
            best_r = -old[0]
            if r > best_r or (r == best_r and key[x] < key[tg[old[3]]]):
                new = (-r, old[1], w, e ^ 1)
                entry[w] = new
                heapq.heappush(queue.heap, new)
    return memento


def coarsen(g: DynGraph, k: int, cap: float, rng: random.Random,
            checkpoint: float = 0, coarsest_factor: int = 20,
            queue: ContractionQueue | None = None) -> list[ContractionMemento]:
    """Contract until the coarsest-size, checkpoint, queue or sparsity stop.

    Returns the mementos in application order.
    """
    floor = max(coarsest_factor * k, checkpoint)
    if queue is None:
        queue = ContractionQueue(g, cap, rng)
    mementos = []
    while g.n > floor and g.m >= g.n and len(queue):
        if queue.peek() is None:
            break
        mementos.append(coarsen_step(g, queue))
    return mementos
