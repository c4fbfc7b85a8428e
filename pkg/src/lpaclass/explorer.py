"""Canonical forms, exhaustive enumeration, K0 classification and move search."""

from __future__ import annotations

import itertools
import time
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterator, Sequence

import numpy as np

from .errors import PreconditionError, SizeCapExceeded
from .invariants import PointedK0, k0_data, pointed_iso
from .multigraph import Matrix, MultiGraph, analyze, from_incidence
from .moves import MoveCertificate, MoveStep, PartitionSpec, apply_step

__all__ = [
    "CANONICAL_CAP",
    "ENUMERATION_CAP",
    "SearchBounds",
    "SearchResult",
    "ClassificationTable",
    "canonical_form",
    "canonical_labeling",
    "canonical_graph",
    "graph_iso",
    "enumerate_pis_sing",
    "classify",
    "applicable_moves",
    "search_path",
    "find_path",
]

CANONICAL_CAP = 8
ENUMERATION_CAP = 4


@lru_cache(maxsize=None)
def _perms(n: int) -> np.ndarray:
    return np.array(list(itertools.permutations(range(n))), dtype=np.intp).reshape(-1, n)


def _canonical(M: Matrix) -> tuple[Matrix, tuple[int, ...]]:
    n = len(M)
    if n > CANONICAL_CAP:
        raise SizeCapExceeded(f"canonical form needs at most {CANONICAL_CAP} vertices, got {n}")
    if n == 0:
        return (), ()
    A = np.array(M, dtype=object if max(max(r) for r in M) >= 2**62 else np.int64)
    P = _perms(n)
    stacked = A[P[:, :, None], P[:, None, :]].reshape(len(P), n * n)
    # lexsort treats its last key as primary
    best = int(np.lexsort(stacked.T[::-1])[0]) if A.dtype != object else min(
        range(len(P)), key=lambda k: tuple(stacked[k])
    )
    order = tuple(int(x) for x in P[best])
    return tuple(tuple(M[i][j] for j in order) for i in order), order


def canonical_labeling(g: MultiGraph) -> tuple[Matrix, tuple[int, ...]]:
    """Canonical matrix together with the vertex order realizing it.

    ``g.permute(order).matrix == matrix``.
    """
    return _canonical(g.matrix)


def canonical_form(g: MultiGraph) -> Matrix:
    """Lexicographically least row-major incidence matrix over all vertex orders."""
    return _canonical(g.matrix)[0]


def canonical_graph(g: MultiGraph) -> MultiGraph:
    return from_incidence(canonical_form(g))


def graph_iso(g1: MultiGraph, g2: MultiGraph) -> bool:
    """Isomorphism of directed multigraphs (vertex names ignored)."""
    if g1.n != g2.n or g1.edge_count != g2.edge_count:
        return False
    if set(g1.vertices) == set(g2.vertices) and all(
        g1.mult(u, v) == g2.mult(u, v) for u in g1.vertices for v in g1.vertices
    ):
        return True
    degrees = lambda g: Counter((sum(g.matrix[i]), sum(r[i] for r in g.matrix), g.matrix[i][i]) for i in range(g.n))
    if degrees(g1) != degrees(g2):
        return False
    return canonical_form(g1) == canonical_form(g2)


# -- enumeration and classification -------------------------------------------

def enumerate_pis_sing(n: int) -> list[MultiGraph]:
    """All purely infinite simple Condition (Sing) graphs on ``n`` vertices, up to isomorphism.

    Returned as canonical graphs named ``v1 .. vn``, sorted by canonical matrix.
    """
    if n < 0:
        raise PreconditionError("vertex count must be nonnegative")
    if n > ENUMERATION_CAP:
        raise SizeCapExceeded(f"enumeration is capped at {ENUMERATION_CAP} vertices")
    if n == 0:
        return []
    seen: set[Matrix] = set()
    # a sink can never reach a cycle, so every row is a nonzero bit pattern
    for rows in itertools.product(range(1, 2**n), repeat=n):
        M = tuple(tuple((r >> (n - 1 - j)) & 1 for j in range(n)) for r in rows)
        c = _canonical(M)[0]
        if c in seen:
            continue
        rep = analyze(from_incidence(c))
        if rep.purely_infinite_simple and rep.condition_sing:
            seen.add(c)
    return [from_incidence(c) for c in sorted(seen)]


@dataclass
class ClassificationTable:
    """Graphs grouped by pointed K0; ``classes`` holds ``(representative K0, members)``."""

    classes: list[tuple[PointedK0, list[MultiGraph]]] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.classes)

    @property
    def sizes(self) -> list[int]:
        return [len(m) for _, m in self.classes]

    def to_dict(self) -> dict:
        return {
            "classes": [
                {
                    "k0": k0.to_dict(),
                    "size": len(members),
                    "members": [[list(r) for r in canonical_form(g)] for g in members],
                }
                for k0, members in self.classes
            ]
        }


def classify(graphs: Sequence[MultiGraph], workers: int | None = None) -> ClassificationTable:
    """Partition graphs by pointed isomorphism class of their K0 data.

    With ``workers > 1`` the K0 computations run in a process pool; grouping
    stays sequential, so the table is the same either way.
    """
    canon = [from_incidence(canonical_form(g)) for g in graphs]
    if workers and workers > 1 and len(canon) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            data = list(pool.map(k0_data, canon, chunksize=8))
    else:
        data = [k0_data(g) for g in canon]
    groups: list[tuple[PointedK0, list[MultiGraph]]] = []
    for g, k0 in zip(canon, data):
        for rep, members in groups:
            if pointed_iso(rep, k0):
                members.append(g)
                break
        else:
            groups.append((k0, [g]))
    out = []
    for _, members in groups:
        members.sort(key=lambda h: h.matrix)
        out.append((k0_data(members[0]), members))
    out.sort(key=lambda c: (c[0].group.free_rank, c[0].group.invariant_factors, c[1][0].matrix))
    return ClassificationTable(out)


# -- move search --------------------------------------------------------------

@dataclass(frozen=True)
class SearchBounds:
    max_vertices: int = 5
    max_multiplicity: int = 4
    max_steps: int = 20

    def __post_init__(self):
        if min(self.max_vertices, self.max_multiplicity, self.max_steps) < 1:
            raise PreconditionError("search bounds must be positive")

    def admits(self, M: Matrix) -> bool:
        return len(M) <= self.max_vertices and all(x <= self.max_multiplicity for r in M for x in r)


@dataclass
class SearchResult:
    certificate: MoveCertificate | None
    reason: str
    states: int = 0
    seconds: float = 0.0

    def to_dict(self) -> dict:
        return {
            "found": self.certificate is not None,
            "reason": self.reason,
            "states": self.states,
            "certificate": self.certificate.to_dict() if self.certificate else None,
        }


def _vector_partitions(row: tuple[int, ...], m: int) -> Iterator[list[tuple[int, ...]]]:
    """Unordered partitions of ``row`` into ``m`` nonzero vectors, classes in decreasing lex order."""

    def below(rem):
        for vec in itertools.product(*(range(r, -1, -1) for r in rem)):
            if any(vec):
                yield vec

    def rec(rem, k, cap):
        if k == 1:
            if any(rem) and rem <= cap:
                yield [rem]
            return
        for vec in below(rem):
            if vec > cap:
                continue
            rest = tuple(a - b for a, b in zip(rem, vec))
            # k - 1 nonempty classes still have to come out of rest
            if sum(rest) < k - 1:
                continue
            for tail in rec(rest, k - 1, vec):
                yield [vec] + tail

    yield from rec(tuple(row), m, tuple(row))


def _raw_moves(M: Matrix, bounds: SearchBounds) -> Iterator[tuple[tuple, Matrix]]:
    """Index-level moves of ``M`` that stay within ``bounds``, in deterministic order."""
    n = len(M)
    nonsink = [any(r) for r in M]
    # shifts
    for v in range(n):
        for w in range(n):
            if v != w and nonsink[v] and nonsink[w] and all(b <= a for a, b in zip(M[v], M[w])):
                row = [a - b for a, b in zip(M[v], M[w])]
                row[w] += 1
                if row[w] <= bounds.max_multiplicity:
                    yield ("shift", v, w), M[:v] + (tuple(row),) + M[v + 1:]
    # unshifts
    for v in range(n):
        for w in range(n):
            if v != w and M[v][w] >= 1 and nonsink[w]:
                row = [a + b for a, b in zip(M[v], M[w])]
                row[w] -= 1
                if max(row) <= bounds.max_multiplicity:
                    yield ("unshift", v, w), M[:v] + (tuple(row),) + M[v + 1:]
    # out-splits of a single vertex
    for v in range(n):
        for m in range(2, bounds.max_vertices - n + 2):
            if sum(M[v]) < m:
                break
            for classes in _vector_partitions(M[v], m):
                rows = []
                for i in range(n):
                    for vec in (classes if i == v else [M[i]]):
                        row = []
                        for j in range(n):
                            row.extend([vec[j]] * (m if j == v else 1))
                        rows.append(tuple(row))
                yield ("outsplit", v, tuple(classes)), tuple(rows)
    # amalgamations of groups with equal in-columns
    cols = list(zip(*M))
    buckets: dict[tuple, list[int]] = {}
    for i in range(n):
        if nonsink[i]:
            buckets.setdefault(cols[i], []).append(i)
    for members in sorted(buckets.values()):
        for size in range(2, len(members) + 1):
            for group in itertools.combinations(members, size):
                first = group[0]
                keep = [i for i in range(n) if i not in group or i == first]
                rows = []
                for i in keep:
                    src = group if i == first else (i,)
                    rows.append(tuple(sum(M[s][j] for s in src) for j in keep))
                H = tuple(rows)
                if bounds.admits(H):
                    yield ("amalgamate", group), H


def _to_step(move: tuple, g: MultiGraph) -> MoveStep:
    names = g.vertices
    kind = move[0]
    if kind in ("shift", "unshift"):
        return MoveStep(kind, (names[move[1]], names[move[2]]))
    if kind == "outsplit":
        return MoveStep.outsplit(PartitionSpec.from_vectors(g, names[move[1]], move[2]))
    return MoveStep.amalgamate([names[i] for i in move[1]])


def applicable_moves(g: MultiGraph, bounds: SearchBounds | None = None) -> list[MoveStep]:
    """Every single move of ``g``, or only those whose result stays within ``bounds``."""
    if bounds is None:
        # loose enough to admit everything: an out-split adds at most rowsum - 1
        # vertices, an unshift at most doubles an entry, a merge adds up n entries
        top = max((x for r in g.matrix for x in r), default=0)
        widest = max((sum(r) for r in g.matrix), default=0)
        bounds = SearchBounds(max(1, g.n + widest), (g.n + 1) * max(top, 1) * 2, 1)
    return [_to_step(mv, g) for mv, _ in _raw_moves(g.matrix, bounds)]


def _neighbors(key: Matrix, bounds: SearchBounds) -> Iterator[tuple[tuple, Matrix]]:
    for move, H in _raw_moves(key, bounds):
        yield move, _canonical(H)[0]


def search_path(
    g1: MultiGraph,
    g2: MultiGraph,
    bounds: SearchBounds | None = None,
    max_states: int | None = None,
    check_invariants: bool = True,
) -> SearchResult:
    """Bidirectional breadth-first search for a move certificate from ``g1`` to ``g2``.

    States are canonical matrices.  Both frontiers are expanded one level at a
    time, the smaller first, until they meet or their depths add up to
    ``max_steps``.  The returned certificate is expressed on ``g1``'s own
    vertex names.  ``check_invariants=False`` skips the pointed K0
    pre-check and always searches, which makes the search usable as an
    independent witness that two classes stay apart within the bounds.
    """
    bounds = bounds or SearchBounds()
    t0 = time.perf_counter()
    if check_invariants and not pointed_iso(k0_data(g1), k0_data(g2)):
        return SearchResult(None, "invariant mismatch")
    if not (bounds.admits(g1.matrix) and bounds.admits(g2.matrix)):
        return SearchResult(None, "exhausted within bounds: an endpoint lies outside the bounds")
    start, goal = canonical_form(g1), canonical_form(g2)
    parents = [{start: None}, {goal: None}]
    frontiers = [[start], [goal]]
    depth = [0, 0]
    meet = start if start == goal else None
    while meet is None:
        if depth[0] + depth[1] >= bounds.max_steps:
            return SearchResult(None, "exhausted within bounds: step limit reached",
                                sum(map(len, parents)), time.perf_counter() - t0)
        if not frontiers[0] or not frontiers[1]:
            return SearchResult(None, "exhausted within bounds: no further states",
                                sum(map(len, parents)), time.perf_counter() - t0)
        side = 0 if len(frontiers[0]) <= len(frontiers[1]) else 1
        seen, other = parents[side], parents[1 - side]
        nxt = []
        for key in frontiers[side]:
            for _, child in _neighbors(key, bounds):
                if child in seen:
                    continue
                seen[child] = key
                if child in other:
                    meet = child
                    break
                nxt.append(child)
            if meet is not None:
                break
        if max_states is not None and sum(map(len, parents)) > max_states:
            return SearchResult(None, "exhausted within bounds: state limit reached",
                                sum(map(len, parents)), time.perf_counter() - t0)
        frontiers[side] = nxt
        depth[side] += 1
    keys = _chain(parents[0], meet)[::-1] + _chain(parents[1], meet)[1:]
    cert = _realize(g1, g2, keys, bounds)
    return SearchResult(cert, "found", sum(map(len, parents)), time.perf_counter() - t0)


def _chain(parents: dict, key: Matrix) -> list[Matrix]:
    out = [key]
    while parents[key] is not None:
        key = parents[key]
        out.append(key)
    return out


def _realize(g1: MultiGraph, g2: MultiGraph, keys: list[Matrix], bounds: SearchBounds) -> MoveCertificate:
    """Turn a chain of canonical states into concrete moves on ``g1``.

    Every link is reachable by a forward move because each move's inverse is
    itself in the generated move set.
    """
    g = g1
    steps = []
    for here, there in zip(keys, keys[1:]):
        _, order = canonical_labeling(g)
        move = next(mv for mv, child in _neighbors(here, bounds) if child == there)
        step = _to_step(move, g.permute(order))
        g = apply_step(g, step)
        steps.append(step)
    return MoveCertificate(g1, tuple(steps), g2)


def find_path(g1: MultiGraph, g2: MultiGraph, bounds: SearchBounds | None = None) -> MoveCertificate | None:
    """Certificate from ``g1`` to ``g2`` within ``bounds``, or ``None``."""
    return search_path(g1, g2, bounds).certificate
