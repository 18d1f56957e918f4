"""Block assignments, the balance bound and cut bookkeeping."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .graph import ContractionMemento, DynGraph


@dataclass(frozen=True)
class BalanceBound:
    l_max: float
    epsilon: float
    k: int = 1
    slack: float = 0  # heaviest node weight of the instance

    def limit_for(self, blocks: int) -> float:
        """Upper weight bound for a part that will hold ``blocks`` final blocks."""
        return blocks * (self.l_max - self.slack) + self.slack


def compute_l_max(g: DynGraph, k: int, epsilon: float) -> BalanceBound:
    if k < 1:
        raise ValueError(f"k must be at least 1, got {k}")
    if epsilon < 0:
        raise ValueError(f"epsilon must be nonnegative, got {epsilon}")
    heaviest = g.max_node_weight()
    l_max = (1 + epsilon) * g.total_weight / k + heaviest
    return BalanceBound(l_max, epsilon, k, heaviest)


def cut_weight(g: DynGraph, blocks: Sequence[int]) -> float:
    """Total weight of alive edges between different blocks, from scratch."""
    ea, tg, ew = g.edge_alive, g.target, g.edge_weight
    total = 0
    for u in g.alive_nodes():
        bu = blocks[u]
        for h in g.adj[u]:
            if ea[h]:
                t = tg[h]
                if u < t and blocks[t] != bu:
                    total += ew[h]
    return total


class Partition:
    """Assignment ``block[v]`` for alive nodes plus cached weights and cut.

    ``block`` is indexed by node slot; entries of dead slots are stale.
    """

    def __init__(self, g: DynGraph, k: int, block: list[int]):
        if len(block) != g.num_slots:
            raise ValueError("block list must cover every node slot")
        self.k = k
        self.block = block
        self.block_weight = [0] * k
        nw = g.node_weight
        for v in g.alive_nodes():
            b = block[v]
            if not 0 <= b < k:
                raise ValueError(f"node {v} assigned to block {b} outside 0..{k - 1}")
            self.block_weight[b] += nw[v]
        self.cut = cut_weight(g, block)

    def copy(self) -> "Partition":
        other = object.__new__(Partition)
        other.k = self.k
        other.block = list(self.block)
        other.block_weight = list(self.block_weight)
        other.cut = self.cut
        return other

    def move(self, g: DynGraph, v: int, to: int) -> float:
        """Move ``v`` to block ``to``; returns the gain that was applied."""
        frm = self.block[v]
        gain = 0
        ea, tg, ew, block = g.edge_alive, g.target, g.edge_weight, self.block
        for h in g.adj[v]:
            if ea[h]:
                b = block[tg[h]]
                if b == to:
                    gain += ew[h]
                elif b == frm:
                    gain -= ew[h]
        c = g.node_weight[v]
        self.block_weight[frm] -= c
        self.block_weight[to] += c
        block[v] = to
        self.cut -= gain
        return gain

    def project(self, memento: ContractionMemento) -> None:
        """Give the uncontracted endpoints the block of the node they formed.

        Call right after ``g.uncontract(memento)``; it drops the slot of x.
        """
        b = self.block[memento.x]
        self.block[memento.u] = b
        self.block[memento.v] = b
        if len(self.block) == memento.x + 1:
            self.block.pop()

    def is_feasible(self, bound: BalanceBound) -> bool:
        return all(w <= bound.l_max for w in self.block_weight)

    def empty_blocks(self) -> int:
        return sum(1 for w in self.block_weight if w == 0)

    def check(self, g: DynGraph) -> None:
        """Validate cached weights and cut against a full recomputation."""
        weights = [0] * self.k
        for v in g.alive_nodes():
            assert 0 <= self.block[v] < self.k
            weights[self.block[v]] += g.node_weight[v]
        assert weights == self.block_weight, (weights, self.block_weight)
        cut = cut_weight(g, self.block)
        assert cut == self.cut, (cut, self.cut)


def is_feasible(g: DynGraph, P: Partition, bound: BalanceBound) -> bool:
    return P.is_feasible(bound)


def write_partition(path, blocks: Sequence[int]) -> None:
    with open(path, "w") as f:
        f.write("".join(f"{b}\n" for b in blocks))


def read_partition(path) -> list[int]:
    with open(path) as f:
        return [int(line) for line in f if line.strip()]
