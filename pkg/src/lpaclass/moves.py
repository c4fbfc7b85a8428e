"""Shift and out-split moves, their inverses, and certificate replay.

A move changes the graph but not its Leavitt path algebra.  Shifts are
represented purely by edge counts: ``apply_shift(g, v, w)`` takes a copy of
``w``'s out-row away from ``v`` and gives ``v`` one new edge to ``w``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .errors import GraphFormatError, MoveError, PreconditionError
from .multigraph import MultiGraph, has_condition_l, parse_graph

__all__ = [
    "PartitionSpec",
    "MoveStep",
    "MoveCertificate",
    "VerificationReport",
    "shift_applicable",
    "apply_shift",
    "apply_unshift",
    "apply_outsplit",
    "apply_amalgamate",
    "maximal_outsplit",
    "maximal_outsplit_steps",
    "apply_step",
    "replay",
    "verify_certificate",
    "parse_certificate",
]


# -- partitions ---------------------------------------------------------------

@dataclass(frozen=True)
class PartitionSpec:
    """A partition of the out-edges of ``vertex`` into nonempty classes.

    Each class maps range vertices to edge counts.  Classes must sum to the
    vertex's out-row.
    """

    vertex: str
    classes: tuple[tuple[tuple[str, int], ...], ...]

    @classmethod
    def from_counts(cls, vertex: str, classes: Iterable[Mapping[str, int]]) -> "PartitionSpec":
        return cls(vertex, tuple(tuple(sorted((k, v) for k, v in c.items() if v)) for c in classes))

    @classmethod
    def from_vectors(cls, g: MultiGraph, vertex: str, vectors: Iterable[Sequence[int]]) -> "PartitionSpec":
        return cls.from_counts(vertex, [dict(zip(g.vertices, vec)) for vec in vectors])

    def vectors(self, g: MultiGraph) -> list[list[int]]:
        out = []
        for c in self.classes:
            vec = [0] * g.n
            for name, count in c:
                vec[g.index(name)] += count
            out.append(vec)
        return out

    def validate(self, g: MultiGraph) -> list[list[int]]:
        i = g.index(self.vertex)
        vecs = self.vectors(g)
        if not vecs:
            raise MoveError(f"partition of {self.vertex!r} has no classes")
        for vec in vecs:
            if any(x < 0 for x in vec) or sum(vec) == 0:
                raise MoveError(f"partition of {self.vertex!r} has an empty class")
        total = [sum(col) for col in zip(*vecs)]
        if total != list(g.matrix[i]):
            raise MoveError(f"partition classes of {self.vertex!r} do not sum to its out-edges")
        return vecs

    def to_dict(self) -> dict:
        return {"vertex": self.vertex, "classes": [dict(c) for c in self.classes]}


# -- single moves -------------------------------------------------------------

def _pair(g: MultiGraph, v: str, w: str) -> tuple[int, int]:
    if v == w:
        raise MoveError("shift needs two distinct vertices")
    try:
        return g.index(v), g.index(w)
    except PreconditionError as exc:
        raise MoveError(str(exc)) from None


def _replace_row(g: MultiGraph, i: int, row) -> MultiGraph:
    m = list(g.matrix)
    m[i] = tuple(row)
    return MultiGraph(g.vertices, tuple(m))


def shift_applicable(g: MultiGraph, v: str, w: str) -> bool:
    """Whether ``w``'s out-edges embed range-preservingly into ``v``'s."""
    i, j = _pair(g, v, w)
    A = g.matrix
    if not any(A[i]) or not any(A[j]):
        return False
    return all(b <= a for a, b in zip(A[i], A[j]))


def apply_shift(g: MultiGraph, v: str, w: str) -> MultiGraph:
    """``row_v <- row_v - row_w + e_w``."""
    if not shift_applicable(g, v, w):
        raise MoveError(f"shift {v!r} -> {w!r} not applicable")
    i, j = g.index(v), g.index(w)
    row = [a - b for a, b in zip(g.matrix[i], g.matrix[j])]
    row[j] += 1
    return _replace_row(g, i, row)


def apply_unshift(g: MultiGraph, v: str, w: str) -> MultiGraph:
    """Inverse of :func:`apply_shift`: ``row_v <- row_v + row_w - e_w``."""
    i, j = _pair(g, v, w)
    if g.matrix[i][j] < 1:
        raise MoveError(f"unshift needs an edge {v!r} -> {w!r}")
    if not any(g.matrix[j]):
        raise MoveError(f"unshift target {w!r} is a sink")
    row = [a + b for a, b in zip(g.matrix[i], g.matrix[j])]
    row[j] -= 1
    out = _replace_row(g, i, row)
    if not shift_applicable(out, v, w) or apply_shift(out, v, w) != g:
        raise MoveError(f"unshift {v!r} -> {w!r} does not round-trip")
    return out


def _fresh(name: str, taken: set[str]) -> str:
    while name in taken:
        name += "'"
    return name


def apply_outsplit(g: MultiGraph, specs) -> MultiGraph:
    """Out-split ``g`` along one or more :class:`PartitionSpec`.

    Vertices without a spec get the one-class partition.  A vertex split into
    ``m >= 2`` classes becomes ``v#1 .. v#m`` in place; every edge into it is
    replicated once into each copy.
    """
    if isinstance(specs, PartitionSpec):
        specs = [specs]
    by_vertex: dict[int, list[list[int]]] = {}
    for spec in specs:
        try:
            i = g.index(spec.vertex)
        except PreconditionError as exc:
            raise MoveError(str(exc)) from None
        if i in by_vertex:
            raise MoveError(f"two partitions given for {spec.vertex!r}")
        if not any(g.matrix[i]):
            raise MoveError(f"cannot split sink {spec.vertex!r}")
        by_vertex[i] = spec.validate(g)
    return _split_matrix(g, by_vertex)


def _split_matrix(g: MultiGraph, by_vertex: Mapping[int, list[list[int]]]) -> MultiGraph:
    n = g.n
    classes = []
    for i in range(n):
        if i in by_vertex:
            classes.append(by_vertex[i])
        elif any(g.matrix[i]):
            classes.append([list(g.matrix[i])])
        else:
            classes.append([])  # sink
    copies = [max(1, len(c)) for c in classes]
    taken = set(g.vertices)
    names: list[str] = []
    for i, v in enumerate(g.vertices):
        if copies[i] == 1:
            names.append(v)
        else:
            taken.discard(v)
            for k in range(copies[i]):
                nm = _fresh(f"{v}#{k + 1}", taken)
                taken.add(nm)
                names.append(nm)
    rows = []
    for i in range(n):
        parts = classes[i] or [list(g.matrix[i])]
        for vec in parts:
            row = []
            for j in range(n):
                row.extend([vec[j]] * copies[j])
            rows.append(tuple(row))
    return MultiGraph(tuple(names), tuple(rows))


def maximal_outsplit(g: MultiGraph) -> MultiGraph:
    """Out-split every non-sink into singleton classes (the dual graph)."""
    return _split_matrix(g, {i: _singletons(g.matrix[i]) for i in range(g.n) if any(g.matrix[i])})


def _singletons(row) -> list[list[int]]:
    out = []
    for j, m in enumerate(row):
        for _ in range(m):
            vec = [0] * len(row)
            vec[j] = 1
            out.append(vec)
    return out


def apply_amalgamate(g: MultiGraph, group: Sequence[str], name: str | None = None) -> MultiGraph:
    """Merge vertices with identical in-columns into one vertex (inverse out-split).

    The merged vertex sits at the position of ``group[0]`` and is called
    ``name`` (default ``group[0]``); its out-row is the sum of the group's rows.
    """
    group = list(group)
    if len(group) < 2 or len(set(group)) != len(group):
        raise MoveError("amalgamation needs at least two distinct vertices")
    try:
        idx = [g.index(v) for v in group]
    except PreconditionError as exc:
        raise MoveError(str(exc)) from None
    A = g.matrix
    n = g.n
    first = idx[0]
    for i in idx[1:]:
        if any(A[u][i] != A[u][first] for u in range(n)):
            raise MoveError(f"in-columns of {g.vertices[first]!r} and {g.vertices[i]!r} differ")
    if any(not any(A[i]) for i in idx):
        raise MoveError("cannot amalgamate a sink")
    gset = set(idx)
    keep = [i for i in range(n) if i not in gset or i == first]
    name = group[0] if name is None else name
    others = {g.vertices[i] for i in keep if i != first}
    if name in others:
        raise MoveError(f"merged name {name!r} clashes with an existing vertex")
    rows = []
    for i in keep:
        src = idx if i == first else [i]
        row = []
        # columns of the group are equal, so the first one stands for all
        for j in keep:
            row.append(sum(A[s][j] for s in src))
        rows.append(tuple(row))
    names = tuple(name if i == first else g.vertices[i] for i in keep)
    return MultiGraph(names, tuple(rows))


# -- steps and certificates ---------------------------------------------------

KINDS = ("shift", "unshift", "outsplit", "amalgamate")


@dataclass(frozen=True)
class MoveStep:
    """One move.

    ``vertices`` is ``(v, w)`` for shift/unshift, ``(v,)`` for an out-split
    (with ``partition``) and the merge group for an amalgamation (optionally
    naming the result ``name``).
    """

    kind: str
    vertices: tuple[str, ...]
    partition: PartitionSpec | None = None
    name: str | None = None

    @classmethod
    def shift(cls, v: str, w: str) -> "MoveStep":
        return cls("shift", (v, w))

    @classmethod
    def unshift(cls, v: str, w: str) -> "MoveStep":
        return cls("unshift", (v, w))

    @classmethod
    def outsplit(cls, spec: PartitionSpec) -> "MoveStep":
        return cls("outsplit", (spec.vertex,), partition=spec)

    @classmethod
    def amalgamate(cls, group: Sequence[str], name: str | None = None) -> "MoveStep":
        return cls("amalgamate", tuple(group), name=name)

    def to_dict(self) -> dict:
        if self.kind in ("shift", "unshift"):
            return {"kind": self.kind, "v": self.vertices[0], "w": self.vertices[1]}
        if self.kind == "outsplit":
            return {"kind": "outsplit", **self.partition.to_dict()}
        out = {"kind": "amalgamate", "vertices": list(self.vertices)}
        if self.name is not None:
            out["name"] = self.name
        return out

    @classmethod
    def from_dict(cls, d: Mapping) -> "MoveStep":
        if not isinstance(d, Mapping) or "kind" not in d:
            raise GraphFormatError(f"step must be an object with a 'kind', got {d!r}")
        kind = d["kind"]
        try:
            if kind in ("shift", "unshift"):
                _exact_keys(d, {"kind", "v", "w"})
                return cls(kind, (str(d["v"]), str(d["w"])))
            if kind == "outsplit":
                _exact_keys(d, {"kind", "vertex", "classes"})
                classes = d["classes"]
                if not isinstance(classes, list) or not all(isinstance(c, Mapping) for c in classes):
                    raise GraphFormatError("outsplit classes must be a list of objects")
                for c in classes:
                    if any(isinstance(x, bool) or not isinstance(x, int) for x in c.values()):
                        raise GraphFormatError("class counts must be integers")
                return cls.outsplit(PartitionSpec.from_counts(str(d["vertex"]), classes))
            if kind == "amalgamate":
                _exact_keys(d, {"kind", "vertices"}, optional={"name"})
                return cls.amalgamate([str(v) for v in d["vertices"]], d.get("name"))
        except KeyError as exc:
            raise GraphFormatError(f"step missing field {exc}") from None
        raise GraphFormatError(f"unknown step kind {kind!r}")


def _exact_keys(d, required, optional=frozenset()):
    keys = set(d)
    if not required <= keys or keys - required - set(optional):
        raise GraphFormatError(f"step fields must be {sorted(required)} (+{sorted(optional)}), got {sorted(keys)}")


def apply_step(g: MultiGraph, step: MoveStep) -> MultiGraph:
    if step.kind == "shift":
        return apply_shift(g, *step.vertices)
    if step.kind == "unshift":
        return apply_unshift(g, *step.vertices)
    if step.kind == "outsplit":
        return apply_outsplit(g, step.partition)
    if step.kind == "amalgamate":
        return apply_amalgamate(g, step.vertices, step.name)
    raise MoveError(f"unknown move kind {step.kind!r}")


def replay(source: MultiGraph, steps: Iterable[MoveStep]) -> MultiGraph:
    g = source
    for step in steps:
        g = apply_step(g, step)
    return g


def maximal_outsplit_steps(g: MultiGraph) -> list[MoveStep]:
    """Single-vertex splits whose composite is :func:`maximal_outsplit`.

    Splitting a vertex replicates its in-edges, so a later vertex keeps each
    of its original edges together as one class covering all the copies.
    """
    copies = {v: [v] for v in g.vertices}
    steps = []
    h = g
    for v in g.vertices:
        row = g.row(v)
        if sum(row) < 2:
            continue
        classes = []
        for u, m in zip(g.vertices, row):
            classes.extend({c: 1 for c in copies[u]} for _ in range(m))
        spec = PartitionSpec.from_counts(v, classes)
        steps.append(MoveStep.outsplit(spec))
        h = apply_outsplit(h, spec)
        copies[v] = [f"{v}#{i}" for i in range(1, len(classes) + 1)]
        if not all(c in h.vertices for c in copies[v]):
            raise MoveError("vertex names collide with split names")
    return steps


@dataclass(frozen=True)
class MoveCertificate:
    source: MultiGraph
    steps: tuple[MoveStep, ...]
    target: MultiGraph

    def to_dict(self) -> dict:
        return {
            "source": self.source.to_dict(),
            "steps": [s.to_dict() for s in self.steps],
            "target": self.target.to_dict(),
        }

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)

    def then(self, other: "MoveCertificate") -> "MoveCertificate":
        """Concatenate; ``other`` must start where this one ends (same labels)."""
        return MoveCertificate(self.source, self.steps + other.steps, other.target)


def parse_certificate(text) -> MoveCertificate:
    if isinstance(text, (str, bytes)):
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise GraphFormatError(f"malformed JSON: {exc}") from None
    else:
        doc = text
    if not isinstance(doc, dict) or set(doc) != {"source", "steps", "target"}:
        raise GraphFormatError("certificate must have exactly source, steps, target")
    if not isinstance(doc["steps"], list):
        raise GraphFormatError("certificate steps must be a list")
    return MoveCertificate(
        parse_graph(doc["source"]),
        tuple(MoveStep.from_dict(s) for s in doc["steps"]),
        parse_graph(doc["target"]),
    )


@dataclass
class VerificationReport:
    valid: bool
    steps: int
    failures: list[dict] = field(default_factory=list)
    field_conditional: bool = False

    def to_dict(self) -> dict:
        return {
            "valid": self.valid,
            "steps": self.steps,
            "failures": self.failures,
            "field_conditional": self.field_conditional,
        }


def verify_certificate(cert: MoveCertificate, allow_infinite_field: bool = False) -> VerificationReport:
    """Replay ``cert`` and check every step.

    Checks per step: the move's precondition; Condition (L) on the graph a
    shift is applied to (the result, for an unshift); preservation of pointed
    K0.  Finally the replayed graph must be isomorphic to ``cert.target``.
    With ``allow_infinite_field`` a Condition (L) violation only marks the
    certificate as valid over infinite fields.
    """
    from .errors import SizeCapExceeded
    from .explorer import graph_iso
    from .invariants import k0_data, pointed_iso

    failures: list[dict] = []
    conditional = False
    g = cert.source
    k0 = k0_data(g)
    for i, step in enumerate(cert.steps):
        try:
            h = apply_step(g, step)
        except (MoveError, PreconditionError) as exc:
            failures.append({"step": i, "check": "precondition", "message": str(exc)})
            break
        shifted = g if step.kind == "shift" else h if step.kind == "unshift" else None
        if shifted is not None and not has_condition_l(shifted):
            if allow_infinite_field:
                conditional = True
            else:
                failures.append({"step": i, "check": "condition_L", "message": "shifted graph violates Condition (L)"})
        k0_next = k0_data(h)
        if not pointed_iso(k0, k0_next):
            failures.append({"step": i, "check": "k0", "message": "pointed K0 changed"})
        g, k0 = h, k0_next
    else:
        try:
            same = graph_iso(g, cert.target)
        except SizeCapExceeded as exc:
            failures.append({"step": len(cert.steps), "check": "endpoint", "message": str(exc)})
        else:
            if not same:
                failures.append({"step": len(cert.steps), "check": "endpoint", "message": "final graph not isomorphic to target"})
    return VerificationReport(not failures, len(cert.steps), failures, conditional)
