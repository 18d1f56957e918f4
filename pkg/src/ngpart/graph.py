"""Semi-dynamic weighted graph with edge contraction and exact undo.

Half-edges are allocated in pairs, so the reverse of half-edge ``h`` is
always ``h ^ 1``.  Contracting ``{u, v}`` marks ``u`` and ``v`` dead, appends
a new node ``x`` and redirects the surviving half-edges to it.  Nothing is
ever compacted while a hierarchy is alive; uncontraction pops the most recent
node again, which restores the storage exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator


class ContractViolation(RuntimeError):
    """A caller broke a precondition of the graph API (programming error)."""


class GraphFormatError(ValueError):
    """Malformed METIS input."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


@dataclass
class ContractionMemento:
    u: int
    v: int
    edge: int  # half-edge u -> v
    weight: float
    x: int
    # half-edges moved into x's adjacency; the first ``from_u`` came from u
    redirected: list[int] = field(default_factory=list)
    from_u: int = 0
    # (surviving half-edge, absorbed half-edge, surviving weight before merge)
    merged: list[tuple[int, int, float]] = field(default_factory=list)


class DynGraph:
    def __init__(self, node_weights: Iterable[float] = ()):
        self.node_weight: list = list(node_weights)
        n = len(self.node_weight)
        self.node_alive = bytearray(b"\x01") * n
        self.adj: list[list[int]] = [[] for _ in range(n)]
        self.target: list[int] = []
        self.edge_weight: list = []
        self.edge_alive = bytearray()
        self.n = n
        self.m = 0
        self.total_weight = sum(self.node_weight)
        self.created_edges = 0
        self.history: list[ContractionMemento] = []

    @classmethod
    def from_edges(cls, node_weights, edges) -> "DynGraph":
        """Build from ``(u, v, w)`` triples; each undirected edge listed once."""
        g = cls(node_weights)
        for u, v, w in edges:
            g.add_edge(u, v, w)
        return g

    def add_edge(self, u: int, v: int, w=1) -> int:
        if u == v:
            raise ContractViolation(f"self-loop at node {u}")
        if w <= 0:
            raise ContractViolation(f"edge weight must be positive, got {w}")
        h = len(self.target)
        self.target += (v, u)
        self.edge_weight += (w, w)
        self.edge_alive += b"\x01\x01"
        self.adj[u].append(h)
        self.adj[v].append(h + 1)
        self.m += 1
        return h

    # -- queries ---------------------------------------------------------

    @property
    def num_slots(self) -> int:
        return len(self.node_weight)

    def alive_nodes(self) -> Iterator[int]:
        alive = self.node_alive
        return (v for v in range(len(alive)) if alive[v])

    def neighbors(self, v: int) -> list[tuple[int, float]]:
        if not self.node_alive[v]:
            raise ContractViolation(f"node {v} is not alive")
        ea, tg, ew = self.edge_alive, self.target, self.edge_weight
        return [(tg[h], ew[h]) for h in self.adj[v] if ea[h]]

    def degree(self, v: int) -> int:
        ea = self.edge_alive
        return sum(1 for h in self.adj[v] if ea[h])

    def find_edge(self, u: int, v: int) -> int | None:
        ea, tg = self.edge_alive, self.target
        for h in self.adj[u]:
            if ea[h] and tg[h] == v:
                return h
        return None

    def edges(self) -> Iterator[tuple[int, int, float]]:
        """Alive undirected edges as ``(u, v, w)`` with ``u < v``."""
        ea, tg, ew = self.edge_alive, self.target, self.edge_weight
        for u in self.alive_nodes():
            for h in self.adj[u]:
                if ea[h] and u < tg[h]:
                    yield u, tg[h], ew[h]

    def max_node_weight(self) -> float:
        alive = self.node_alive
        return max((w for v, w in enumerate(self.node_weight) if alive[v]), default=0)

    def snapshot(self) -> tuple:
        """Everything uncontraction must restore (all but ``created_edges``)."""
        return (
            list(self.node_weight),
            bytes(self.node_alive),
            [list(a) for a in self.adj],
            list(self.target),
            list(self.edge_weight),
            bytes(self.edge_alive),
            self.n,
            self.m,
            self.total_weight,
        )

    def compact(self, nodes: Iterable[int] | None = None) -> tuple["DynGraph", list[int]]:
        """Induced subgraph on ``nodes`` (default: all alive) with dense ids.

        Returns the subgraph and the list mapping new ids to old ids.
        """
        if nodes is None:
            nodes = list(self.alive_nodes())
        else:
            nodes = list(nodes)
        index = {v: i for i, v in enumerate(nodes)}
        sub = DynGraph(self.node_weight[v] for v in nodes)
        ea, tg, ew = self.edge_alive, self.target, self.edge_weight
        for i, v in enumerate(nodes):
            for h in self.adj[v]:
                if ea[h]:
                    j = index.get(tg[h])
                    if j is not None and i < j:
                        sub.add_edge(i, j, ew[h])
        return sub, nodes

    def validate(self) -> None:
        """Check structural invariants; raises AssertionError on failure."""
        ea, tg, ew = self.edge_alive, self.target, self.edge_weight
        alive = self.node_alive
        m2 = 0
        for v in range(len(alive)):
            if not alive[v]:
                continue
            assert self.node_weight[v] >= 0
            seen = set()
            for h in self.adj[v]:
                if not ea[h]:
                    continue
                t = tg[h]
                assert alive[t], f"alive edge {h} points to dead node {t}"
                assert t != v, f"self-loop at {v}"
                assert t not in seen, f"parallel edge {v}-{t}"
                seen.add(t)
                r = h ^ 1
                assert ea[r] and tg[r] == v and ew[r] == ew[h] and ew[h] > 0
                assert r in self.adj[t]
                m2 += 1
        assert m2 == 2 * self.m, (m2, self.m)
        assert self.n == sum(alive)
        tw = sum(w for v, w in enumerate(self.node_weight) if alive[v])
        assert tw == self.total_weight, (tw, self.total_weight)

    # -- contraction -----------------------------------------------------

    def contract(self, u: int, v: int) -> tuple[int, ContractionMemento]:
        if u == v:
            raise ContractViolation("cannot contract a node with itself")
        if not (0 <= u < len(self.node_alive) and self.node_alive[u]):
            raise ContractViolation(f"node {u} is not alive")
        if not (0 <= v < len(self.node_alive) and self.node_alive[v]):
            raise ContractViolation(f"node {v} is not alive")
        h = self.find_edge(u, v)
        if h is None:
            raise ContractViolation(f"{u} and {v} are not adjacent")
        memento = self.contract_edge(h)
        return memento.x, memento

    def contract_edge(self, h: int) -> ContractionMemento:
        """Contract the edge of alive half-edge ``h``; unchecked fast path."""
        tg, ew, ea = self.target, self.edge_weight, self.edge_alive
        v = tg[h]
        u = tg[h ^ 1]
        x = len(self.node_weight)
        pos: dict[int, int] = {}
        new_adj: list[int] = []
        merged = []
        from_u = 0
        for src in (u, v):
            for e in self.adj[src]:
                if not ea[e]:
                    continue
                w = tg[e]
                if w == u or w == v:
                    continue
                h0 = pos.get(w)
                if h0 is None:
                    pos[w] = e
                    new_adj.append(e)
                    tg[e ^ 1] = x
                else:
                    w0 = ew[h0]
                    s = w0 + ew[e]
                    ew[h0] = s
                    ew[h0 ^ 1] = s
                    ea[e] = 0
                    ea[e ^ 1] = 0
                    merged.append((h0, e, w0))
            if src == u:
                from_u = len(new_adj)
        ea[h] = 0
        ea[h ^ 1] = 0
        self.m -= 1 + len(merged)
        self.node_weight.append(self.node_weight[u] + self.node_weight[v])
        self.node_alive.append(1)
        self.adj.append(new_adj)
        self.node_alive[u] = 0
        self.node_alive[v] = 0
        self.n -= 1
        self.created_edges += len(new_adj)
        memento = ContractionMemento(u, v, h, ew[h], x, new_adj, from_u, merged)
        self.history.append(memento)
        return memento

    def uncontract(self, memento: ContractionMemento | None = None) -> ContractionMemento:
        """Undo the most recent contraction (strict LIFO)."""
        if not self.history:
            raise ContractViolation("no contraction to undo")
        top = self.history[-1]
        if memento is not None and memento is not top:
            raise ContractViolation("uncontraction out of LIFO order")
        self.history.pop()
        tg, ew, ea = self.target, self.edge_weight, self.edge_alive
        u, v = top.u, top.v
        self.node_weight.pop()
        self.node_alive.pop()
        adj_x = self.adj.pop()
        for h0, e, w0 in reversed(top.merged):
            ew[h0] = w0
            ew[h0 ^ 1] = w0
            ea[e] = 1
            ea[e ^ 1] = 1
        from_u = top.from_u
        for i, e in enumerate(adj_x):
            tg[e ^ 1] = u if i < from_u else v
        ea[top.edge] = 1
        ea[top.edge ^ 1] = 1
        self.m += 1 + len(top.merged)
        self.node_alive[u] = 1
        self.node_alive[v] = 1
        self.n += 1
        return top


# -- METIS I/O ---------------------------------------------------------------


def _number(tok: str, line: int, what: str):
    try:
        return int(tok)
    except ValueError:
        try:
            return float(tok)
        except ValueError:
            raise GraphFormatError(f"bad {what} {tok!r}", line) from None


def load_metis(text: str) -> DynGraph:
    """Parse METIS graph text.  Adjacency order follows the file."""
    lines = text.splitlines()
    i = 0
    while i < len(lines) and (lines[i].lstrip().startswith("%") or not lines[i].strip()):
        i += 1
    if i == len(lines):
        raise GraphFormatError("missing header", 1)
    header = lines[i].split()
    header_line = i + 1
    if len(header) not in (2, 3, 4):
        raise GraphFormatError("header must be 'n m [fmt [ncon]]'", header_line)
    try:
        n, m = int(header[0]), int(header[1])
        fmt = header[2] if len(header) > 2 else "0"
        if len(header) > 3 and int(header[3]) != 1:
            raise GraphFormatError("multi-constraint node weights unsupported", header_line)
    except ValueError:
        raise GraphFormatError("non-integer value in header", header_line) from None
    if n < 0 or m < 0:
        raise GraphFormatError("negative size in header", header_line)
    fmt = fmt.zfill(3)
    if len(fmt) != 3 or fmt[0] not in "01" or fmt[1] not in "01" or fmt[2] not in "01":
        raise GraphFormatError(f"unsupported fmt {header[2]!r}", header_line)
    if fmt[0] == "1":
        raise GraphFormatError("vertex sizes (fmt 1xx) unsupported", header_line)
    has_nw = fmt[1] == "1"
    has_ew = fmt[2] == "1"

    rows: list[tuple[int, list[str]]] = []
    i += 1
    while i < len(lines) and len(rows) < n:
        raw = lines[i]
        i += 1
        if raw.lstrip().startswith("%"):
            continue
        rows.append((i, raw.split()))
    if len(rows) < n:
        raise GraphFormatError(f"expected {n} vertex lines, found {len(rows)}", len(lines) + 1)
    for j in range(i, len(lines)):
        if lines[j].strip() and not lines[j].lstrip().startswith("%"):
            raise GraphFormatError("unexpected content after last vertex line", j + 1)

    node_weights = []
    parsed: list[list[tuple[int, object]]] = []
    for u, (lineno, toks) in enumerate(rows):
        pos = 0
        if has_nw:
            if not toks:
                raise GraphFormatError("missing node weight", lineno)
            c = _number(toks[0], lineno, "node weight")
            if c <= 0:
                raise GraphFormatError("node weights must be positive", lineno)
            node_weights.append(c)
            pos = 1
        else:
            node_weights.append(1)
        step = 2 if has_ew else 1
        if (len(toks) - pos) % step:
            raise GraphFormatError("odd number of tokens in weighted adjacency", lineno)
        entries = []
        for p in range(pos, len(toks), step):
            t = _number(toks[p], lineno, "vertex index")
            if not isinstance(t, int) or not 1 <= t <= n:
                raise GraphFormatError(f"vertex index {toks[p]} out of range 1..{n}", lineno)
            t -= 1
            if t == u:
                raise GraphFormatError(f"self-loop at vertex {u + 1}", lineno)
            w = _number(toks[p + 1], lineno, "edge weight") if has_ew else 1
            if w <= 0:
                raise GraphFormatError("edge weights must be positive", lineno)
            entries.append((t, w))
        parsed.append(entries)

    g = DynGraph(node_weights)
    pair: dict[tuple[int, int], int] = {}
    for u, entries in enumerate(parsed):
        lineno = rows[u][0]
        for t, w in entries:
            if u < t:
                if (u, t) in pair:
                    raise GraphFormatError(f"duplicate edge {u + 1}-{t + 1}", lineno)
                h = len(g.target)
                g.target += (t, u)
                g.edge_weight += (w, w)
                g.edge_alive += b"\x01\x01"
                pair[(u, t)] = h
                g.m += 1
    referenced = set()
    for u, entries in enumerate(parsed):
        lineno = rows[u][0]
        adj = g.adj[u] = []
        for t, w in entries:
            if u < t:
                adj.append(pair[(u, t)])
                continue
            h = pair.get((t, u))
            if h is None:
                raise GraphFormatError(
                    f"edge {u + 1}-{t + 1} missing from vertex {t + 1}'s list", lineno)
            if h in referenced:
                raise GraphFormatError(f"duplicate edge {u + 1}-{t + 1}", lineno)
            if g.edge_weight[h] != w:
                raise GraphFormatError(f"asymmetric weight on edge {u + 1}-{t + 1}", lineno)
            referenced.add(h)
            adj.append(h + 1)
    for (u, t), h in pair.items():
        if h not in referenced:
            raise GraphFormatError(
                f"edge {u + 1}-{t + 1} missing from vertex {t + 1}'s list", rows[u][0])
    if g.m != m:
        raise GraphFormatError(f"header declares {m} edges but lists contain {g.m}", header_line)
    return g


def read_metis(path) -> DynGraph:
    with open(path) as f:
        return load_metis(f.read())


def _integral(x) -> int:
    if isinstance(x, int):
        return x
    if float(x).is_integer():
        return int(x)
    raise ValueError(f"METIS output requires integral weights, got {x}")


def dump_metis(g: DynGraph) -> str:
    """Serialize the alive part of ``g`` (renumbered densely) as METIS text."""
    nodes = list(g.alive_nodes())
    index = {v: i + 1 for i, v in enumerate(nodes)}
    weights = [_integral(g.node_weight[v]) for v in nodes]
    ea, tg, ew = g.edge_alive, g.target, g.edge_weight
    has_nw = any(w != 1 for w in weights)
    has_ew = any(ea[h] and ew[h] != 1 for h in range(len(tg)))
    fmt = {(False, False): "", (False, True): " 1", (True, False): " 10", (True, True): " 11"}
    out = [f"{len(nodes)} {g.m}{fmt[has_nw, has_ew]}"]
    for i, v in enumerate(nodes):
        toks = [str(weights[i])] if has_nw else []
        for h in g.adj[v]:
            if ea[h]:
                toks.append(str(index[tg[h]]))
                if has_ew:
                    toks.append(str(_integral(ew[h])))
        out.append(" ".join(toks))
    return "\n".join(out) + "\n"


def write_metis(g: DynGraph, path) -> None:
    with open(path, "w") as f:
        f.write(dump_metis(g))
