"""Finite directed multigraphs and the structural predicates on them.

Parallel edges are stored as multiplicities in a dense incidence matrix whose
row/column order is the vertex order.  Everything here is immutable.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import GraphFormatError, PreconditionError

Matrix = tuple[tuple[int, ...], ...]

__all__ = [
    "Matrix",
    "MultiGraph",
    "PropertyReport",
    "parse_graph",
    "graph_to_json",
    "incidence",
    "from_incidence",
    "builtin",
    "BUILTIN_NAMES",
    "cycles",
    "hs_closure",
    "analyze",
    "has_condition_l",
    "to_dot",
]


def _as_matrix(rows: Iterable[Iterable[int]]) -> Matrix:
    return tuple(tuple(int(x) for x in row) for row in rows)


@dataclass(frozen=True)
class MultiGraph:
    """Directed graph with loops and parallel edges.

    Parameters
    ----------
    vertices : tuple of str
        Vertex names.  The order fixes incidence-matrix indexing.
    matrix : tuple of tuple of int
        ``matrix[i][j]`` is the number of edges from ``vertices[i]`` to
        ``vertices[j]``.
    """

    vertices: tuple[str, ...]
    matrix: Matrix

    def __post_init__(self):
        n = len(self.vertices)
        if len(set(self.vertices)) != n:
            raise GraphFormatError("duplicate vertex name")
        if len(self.matrix) != n or any(len(row) != n for row in self.matrix):
            raise GraphFormatError("incidence matrix does not match vertex count")
        for row in self.matrix:
            for x in row:
                if x < 0:
                    raise GraphFormatError("negative edge multiplicity")

    @classmethod
    def from_edges(cls, vertices: Sequence[str], edges: Iterable[tuple[str, str, int]]) -> "MultiGraph":
        vertices = tuple(vertices)
        index = {v: i for i, v in enumerate(vertices)}
        if len(index) != len(vertices):
            raise GraphFormatError("duplicate vertex name")
        rows = [[0] * len(vertices) for _ in vertices]
        seen = set()
        for src, dst, mult in edges:
            for name in (src, dst):
                if name not in index:
                    raise GraphFormatError(f"unknown vertex {name!r}")
            if isinstance(mult, bool) or not isinstance(mult, int) or mult < 1:
                raise GraphFormatError(f"multiplicity must be a positive integer, got {mult!r}")
            if (src, dst) in seen:
                raise GraphFormatError(f"duplicate edge record {src!r} -> {dst!r}")
            seen.add((src, dst))
            rows[index[src]][index[dst]] = mult
        return cls(vertices, _as_matrix(rows))

    @property
    def n(self) -> int:
        return len(self.vertices)

    @property
    def edges(self) -> list[tuple[str, str, int]]:
        return [
            (self.vertices[i], self.vertices[j], m)
            for i, row in enumerate(self.matrix)
            for j, m in enumerate(row)
            if m
        ]

    @property
    def edge_count(self) -> int:
        return sum(map(sum, self.matrix))

    def index(self, vertex: str) -> int:
        try:
            return self.vertices.index(vertex)
        except ValueError:
            raise PreconditionError(f"unknown vertex {vertex!r}") from None

    def row(self, vertex: str) -> tuple[int, ...]:
        return self.matrix[self.index(vertex)]

    def mult(self, src: str, dst: str) -> int:
        return self.matrix[self.index(src)][self.index(dst)]

    def out_degree(self, i: int) -> int:
        return sum(self.matrix[i])

    def successors(self, i: int) -> list[int]:
        return [j for j, m in enumerate(self.matrix[i]) if m]

    def permute(self, order: Sequence[int]) -> "MultiGraph":
        """Reorder vertices so that new position ``k`` holds old vertex ``order[k]``."""
        m = self.matrix
        return MultiGraph(
            tuple(self.vertices[i] for i in order),
            tuple(tuple(m[i][j] for j in order) for i in order),
        )

    def rename(self, names: Sequence[str]) -> "MultiGraph":
        return MultiGraph(tuple(names), self.matrix)

    def to_dict(self) -> dict:
        return {"vertices": list(self.vertices), "edges": [list(e) for e in self.edges]}


def parse_graph(text) -> MultiGraph:
    """Parse a graph JSON document (string, bytes or already-decoded dict).

    The document must be exactly ``{"vertices": [...], "edges": [[src, dst, mult], ...]}``.
    """
    if isinstance(text, (str, bytes)):
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise GraphFormatError(f"malformed JSON: {exc}") from None
    else:
        doc = text
    if not isinstance(doc, dict):
        raise GraphFormatError("graph document must be a JSON object")
    extra = set(doc) - {"vertices", "edges"}
    if extra:
        raise GraphFormatError(f"unknown keys: {sorted(extra)}")
    if "vertices" not in doc or "edges" not in doc:
        raise GraphFormatError("graph document needs 'vertices' and 'edges'")
    vertices = doc["vertices"]
    if not isinstance(vertices, list) or not all(isinstance(v, str) for v in vertices):
        raise GraphFormatError("'vertices' must be a list of strings")
    edges = doc["edges"]
    if not isinstance(edges, list):
        raise GraphFormatError("'edges' must be a list")
    triples = []
    for e in edges:
        if not (isinstance(e, list) and len(e) == 3 and isinstance(e[0], str) and isinstance(e[1], str)):
            raise GraphFormatError(f"edge must be [src, dst, mult], got {e!r}")
        triples.append((e[0], e[1], e[2]))
    return MultiGraph.from_edges(vertices, triples)


def graph_to_json(g: MultiGraph) -> str:
    return json.dumps(g.to_dict())


def incidence(g: MultiGraph) -> Matrix:
    return g.matrix


def from_incidence(A, names: Sequence[str] | None = None) -> MultiGraph:
    """Build the graph whose incidence matrix is ``A``.

    Vertices default to ``v1 .. vn``.
    """
    rows = [list(r) for r in A]
    n = len(rows)
    if any(len(r) != n for r in rows):
        raise GraphFormatError("incidence matrix must be square")
    if any(x < 0 for r in rows for x in r):
        raise GraphFormatError("incidence matrix has a negative entry")
    if names is None:
        names = [f"v{i + 1}" for i in range(n)]
    if len(names) != n:
        raise GraphFormatError("name list does not match matrix size")
    return MultiGraph(tuple(names), _as_matrix(rows))


# -- named families ---------------------------------------------------------

BUILTIN_NAMES = ("R_n", "R_n_k", "A_n_k", "B_n_k", "R2_hat", "S2")


def _rose_with_tails(n: int, rose: str, tails: list[tuple[str, str, int]], names: list[str]) -> MultiGraph:
    return MultiGraph.from_edges(names, [(rose, rose, n)] + tails)


def builtin(name: str, n: int | None = None, k: int | None = None) -> MultiGraph:
    """Return one of the standard graphs.

    ``R_n`` is the rose with ``n`` petals.  ``R_n_k`` has a tail vertex ``v``
    sending ``k - 1`` parallel edges into the rose ``w``; ``A_n_k`` has
    ``k - 1`` tail vertices each sending one edge to ``w``; ``B_n_k`` is the
    oriented line ``v1 -> ... -> vk`` ending in the rose at ``vk``.  For the
    three families the rose is listed first, so ``B_n_k`` with ``n=5, k=2``
    has incidence ``[[5, 0], [1, 0]]``.
    """
    if name in ("R2_hat", "S2"):
        m = ((1, 1), (1, 1)) if name == "R2_hat" else ((1, 1), (1, 0))
        return MultiGraph(("v1", "v2"), m)
    if name not in BUILTIN_NAMES:
        raise PreconditionError(f"unknown builtin graph {name!r}")
    if n is None or n < 1:
        raise PreconditionError(f"{name} needs n >= 1")
    if name == "R_n":
        return MultiGraph(("v",), ((n,),))
    if k is None or k < 1:
        raise PreconditionError(f"{name} needs k >= 1")
    if name == "R_n_k":
        if k == 1:
            return MultiGraph(("w",), ((n,),))
        return _rose_with_tails(n, "w", [("v", "w", k - 1)], ["w", "v"])
    if name == "A_n_k":
        tails = [f"v{i}" for i in range(1, k)]
        return _rose_with_tails(n, "w", [(t, "w", 1) for t in tails], ["w"] + tails)
    line = [f"v{i}" for i in range(k, 0, -1)]
    return _rose_with_tails(n, f"v{k}", [(f"v{i}", f"v{i + 1}", 1) for i in range(1, k)], line)


# -- structure ---------------------------------------------------------------

def cycles(g: MultiGraph) -> list[list[str]]:
    """All vertex-simple cycles, each once, rotated to start at its least vertex index."""
    n = g.n
    succ = [g.successors(i) for i in range(n)]
    found: list[list[int]] = []
    for start in range(n):
        path = [start]
        on_path = {start}

        def extend(u):
            for v in succ[u]:
                if v == start:
                    found.append(list(path))
                elif v > start and v not in on_path:
                    path.append(v)
                    on_path.add(v)
                    extend(v)
                    path.pop()
                    on_path.discard(v)

        extend(start)
    found.sort(key=lambda c: (len(c), c))
    return [[g.vertices[i] for i in c] for c in found]


def _reach(g: MultiGraph, seeds: Iterable[int]) -> set[int]:
    seen = set(seeds)
    queue = deque(seen)
    while queue:
        u = queue.popleft()
        for v in g.successors(u):
            if v not in seen:
                seen.add(v)
                queue.append(v)
    return seen


def _hs_closure_idx(g: MultiGraph, X: set[int]) -> set[int]:
    H = set(X)
    while True:
        H = _reach(g, H)
        added = [
            v for v in range(g.n)
            if v not in H and g.out_degree(v) > 0 and all(w in H for w in g.successors(v))
        ]
        if not added:
            return H
        H.update(added)


def hs_closure(g: MultiGraph, X: Iterable[str]) -> frozenset[str]:
    """Smallest hereditary saturated vertex set containing ``X``."""
    idx = {g.index(x) for x in X}
    return frozenset(g.vertices[i] for i in _hs_closure_idx(g, idx))


def has_condition_l(g: MultiGraph) -> bool:
    """Every cycle has an exit.

    A cycle without exit runs only through vertices of out-degree one, so it
    suffices to look for a cycle in the functional subgraph they span.
    """
    nxt = {}
    for i in range(g.n):
        if g.out_degree(i) == 1:
            nxt[i] = g.successors(i)[0]
    for i in nxt:
        u = i
        for _ in range(len(nxt) + 1):
            if u not in nxt:
                break
            u = nxt[u]
            if u == i:
                return False
    return True


@dataclass(frozen=True)
class PropertyReport:
    sinks: tuple[str, ...]
    sources: tuple[str, ...]
    condition_L: bool
    condition_sing: bool
    cofinal: bool
    all_connect_to_cycle: bool
    purely_infinite_simple: bool

    def to_dict(self) -> dict:
        return {
            "sinks": list(self.sinks),
            "sources": list(self.sources),
            "condition_L": self.condition_L,
            "condition_sing": self.condition_sing,
            "cofinal": self.cofinal,
            "all_connect_to_cycle": self.all_connect_to_cycle,
            "purely_infinite_simple": self.purely_infinite_simple,
        }


def analyze(g: MultiGraph) -> PropertyReport:
    n = g.n
    A = g.matrix
    sinks = tuple(g.vertices[i] for i in range(n) if g.out_degree(i) == 0)
    sources = tuple(g.vertices[j] for j in range(n) if all(A[i][j] == 0 for i in range(n)))
    cond_l = has_condition_l(g)
    sing = all(x <= 1 for row in A for x in row)
    everything = set(range(n))
    cofinal = all(_hs_closure_idx(g, {v}) == everything for v in range(n))
    on_cycle = {v for v in range(n) if v in _reach(g, g.successors(v))}
    connect = all(_reach(g, [v]) & on_cycle for v in range(n))
    return PropertyReport(
        sinks=sinks,
        sources=sources,
        condition_L=cond_l,
        condition_sing=sing,
        cofinal=cofinal,
        all_connect_to_cycle=connect,
        purely_infinite_simple=cond_l and cofinal and connect,
    )


def to_dot(g: MultiGraph) -> str:
    lines = ["digraph G {"]
    for v in g.vertices:
        lines.append(f'  "{v}";')
    for src, dst, m in g.edges:
        label = f' [label="{m}"]' if m > 1 else ""
        lines.append(f'  "{src}" -> "{dst}"{label};')
    lines.append("}")
    return "\n".join(lines) + "\n"
