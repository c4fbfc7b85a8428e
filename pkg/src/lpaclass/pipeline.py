"""Constructive move certificates.

Each builder replays its moves as it goes, so an illegal step fails at the
point of construction rather than at verification time.  Intermediate
incidence matrices of the long chains are compared against their closed
forms and construction aborts on any mismatch.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd
from typing import Sequence

from .errors import MoveError, PreconditionError
from .intlat import det, identity, matmul
from .multigraph import Matrix, MultiGraph, analyze, builtin, has_condition_l
from .moves import (
    MoveCertificate,
    MoveStep,
    PartitionSpec,
    apply_step,
    maximal_outsplit_steps,
    shift_applicable,
)

__all__ = [
    "phi",
    "elementary_K",
    "EuclidResult",
    "euclid_S",
    "FishPlan",
    "plan_fish",
    "phi_shift_cert",
    "cert_open_tails",
    "cert_stabilize",
    "cert_divides",
    "cert_fish",
    "cert_remove_sources",
    "cert_expand",
]


class ConstructionError(RuntimeError):
    """An intermediate graph did not match its closed form."""


def phi(M: Matrix, A: Matrix) -> Matrix:
    """``M A + I - M``."""
    p = len(M)
    if len(A) != p or any(len(r) != p for r in M) or any(len(r) != p for r in A):
        raise PreconditionError("phi needs square matrices of equal size")
    MA = matmul(M, A)
    I = identity(p)
    return tuple(tuple(MA[i][j] + I[i][j] - M[i][j] for j in range(p)) for i in range(p))


def elementary_K(p: int, s: int, t: int, k: int) -> Matrix:
    """``I_p + k e_st`` with 1-based indices."""
    if s == t:
        raise PreconditionError("elementary_K needs s != t")
    if not (1 <= s <= p and 1 <= t <= p):
        raise PreconditionError("index out of range")
    if k < 1:
        raise PreconditionError("k must be positive")
    return tuple(tuple(int(i == j) + (k if (i, j) == (s - 1, t - 1) else 0) for j in range(p)) for i in range(p))


@dataclass(frozen=True)
class EuclidResult:
    a: int
    b: int
    k_sequence: tuple[int, ...]
    S: Matrix
    x1: int
    y1: int
    x2: int
    y2: int

    def check(self) -> None:
        a, b = self.a, self.b
        ok = (
            self.x1 * b - self.y1 * a == 1
            and self.x2 * b - self.y2 * a == -1
            and self.x1 + self.x2 == a
            and self.y1 + self.y2 == b
            and self.x1 - self.y1 >= 1
            and self.x2 - self.y2 >= 0
            and det(self.S) == 1
        )
        if not ok:
            raise ConstructionError(f"Euclid identities fail for ({a}, {b})")


def euclid_S(a: int, b: int) -> EuclidResult:
    """Euclidean quotients of ``(a, b)`` and the product of alternating elementary matrices.

    The quotient list ends with the extra term ``r_{m-1} - 1`` so that the
    remainder sequence closes with two ones.  Odd-numbered quotients act as
    lower elementary factors, even-numbered ones as upper factors.
    """
    if not (a > b > 1) or gcd(a, b) != 1:
        raise PreconditionError("euclid_S needs a > b > 1 with gcd(a, b) = 1")
    r = [a, b]
    ks = []
    while r[-1] != 1:
        q, rem = divmod(r[-2], r[-1])
        ks.append(q)
        r.append(rem)
    ks.append(r[-2] - 1)
    S = identity(3)
    for i, k in enumerate(ks, start=1):
        K = elementary_K(3, 2, 1, k) if i % 2 else elementary_K(3, 1, 2, k)
        S = matmul(K, S)
    res = EuclidResult(a, b, tuple(ks), S, S[0][0], S[0][1], S[1][0], S[1][1])
    res.check()
    return res


# -- certificate assembly -----------------------------------------------------

class _Chain:
    def __init__(self, g: MultiGraph):
        self.source = g
        self.g = g
        self.steps: list[MoveStep] = []

    def do(self, step: MoveStep, times: int = 1) -> MultiGraph:
        for _ in range(times):
            self.g = apply_step(self.g, step)
            self.steps.append(step)
        return self.g

    def shift(self, v, w, times=1):
        return self.do(MoveStep.shift(v, w), times)

    def unshift(self, v, w, times=1):
        return self.do(MoveStep.unshift(v, w), times)

    def split(self, vertex, classes):
        return self.do(MoveStep.outsplit(PartitionSpec.from_counts(vertex, classes)))

    def merge(self, group, name=None):
        return self.do(MoveStep.amalgamate(group, name))

    def expect(self, order: Sequence[str], M, label: str) -> None:
        got = tuple(tuple(self.g.mult(u, v) for v in order) for u in order)
        if self.g.n != len(order) or got != tuple(map(tuple, M)):
            raise ConstructionError(f"{label}: expected {M}, got {got}")

    def certificate(self, target: MultiGraph | None = None) -> MoveCertificate:
        return MoveCertificate(self.source, tuple(self.steps), target if target is not None else self.g)


def phi_shift_cert(g: MultiGraph, s: str, t: str, k: int) -> MoveCertificate:
    """``k`` unshifts of ``s`` at ``t``: realizes ``A -> Phi_K(A)`` with ``K = I + k e_st``."""
    if k < 1:
        raise PreconditionError("k must be positive")
    i, j = g.index(s), g.index(t)
    if i == j:
        raise PreconditionError("s and t must differ")
    A = g.matrix
    if A[j][j] < 1 or A[i][j] < 1:
        raise PreconditionError("need a_tt >= 1 and a_st >= 1")
    if not has_condition_l(g):
        raise PreconditionError("graph must satisfy Condition (L)")
    chain = _Chain(g)
    chain.unshift(s, t, k)
    want = phi(elementary_K(g.n, i + 1, j + 1, k), A)
    if chain.g.matrix != want or any(x < 0 for r in want for x in r):
        raise ConstructionError("Phi_K endpoint mismatch")
    return chain.certificate()


def _tail_pair(n: int, k: int) -> tuple[MultiGraph, str, str | None]:
    g = builtin("R_n_k", n=n, k=k)
    return g, "w", ("v" if k > 1 else None)


def cert_open_tails(n: int, k: int) -> MoveCertificate:
    """``R_n^k`` -> ``A_n^k`` (singleton split of the tail) -> shift chain -> ``B_n^k``.

    For ``n == 1`` the rose is a single loop without exit, so the shifts only
    verify with ``allow_infinite_field``.
    """
    if n < 1 or k < 1:
        raise PreconditionError("cert_open_tails needs n >= 1, k >= 1")
    g, w, tail = _tail_pair(n, k)
    chain = _Chain(g)
    if k == 1:
        return chain.certificate(builtin("B_n_k", n=n, k=1))
    if k == 2:
        tails = [tail]
    else:
        chain.split(tail, [{w: 1}] * (k - 1))
        tails = [f"{tail}#{i}" for i in range(1, k)]
    for a, b in zip(tails, tails[1:]):
        chain.shift(a, b)
    return chain.certificate(builtin("B_n_k", n=n, k=k))


def _stabilize_once(chain: _Chain, n: int, k: int, t: int, w: str, tail: str) -> str | None:
    """One round ``R_n^{k+t(n-1)} -> R_n^{k+(t-1)(n-1)}``; returns the new tail name."""
    c = (k - 1) + (t - 1) * (n - 1)
    if c > 0:
        chain.split(tail, [{w: c}, {w: n - 1}])
        v1, v2 = f"{tail}#1", f"{tail}#2"
    else:
        v1, v2 = None, tail
    chain.shift(w, v2)
    chain.unshift(v2, w, n - 1)
    if v1 is not None:
        chain.unshift(v1, w, c)
        chain.expect([w, v1, v2], [[1, 0, 1], [c, 0, c], [n - 1, 0, n - 1]], "stabilize E4")
    chain.merge([w, v2], name=w)
    return v1


def cert_stabilize(n: int, k: int, t: int) -> MoveCertificate:
    """``R_n^{k+t(n-1)}`` to ``R_n^k`` in ``t`` rounds, flattened into one certificate."""
    if n < 2 or k < 1 or t < 0:
        raise PreconditionError("cert_stabilize needs n >= 2, k >= 1, t >= 0")
    g, w, tail = _tail_pair(n, k + t * (n - 1))
    chain = _Chain(g)
    for s in range(t, 0, -1):
        tail = _stabilize_once(chain, n, k, s, w, tail)
    return chain.certificate(builtin("R_n_k", n=n, k=k))


def _divides(chain: _Chain, n: int, k: int, w: str, tail: str) -> None:
    l = n // k
    chain.shift(w, tail, l)
    chain.unshift(tail, w, k - 1)
    chain.expect([w, tail], [[l, l], [(k - 1) * l, (k - 1) * l]], "divides E2")
    chain.merge([w, tail], name=w)


def cert_divides(n: int, k: int) -> MoveCertificate:
    """``R_n^k`` to ``R_n`` when ``k`` divides ``n``."""
    if n < 2 or k < 2 or n % k:
        raise PreconditionError("cert_divides needs n >= 2, k >= 2 and k | n")
    g, w, tail = _tail_pair(n, k)
    chain = _Chain(g)
    _divides(chain, n, k, w, tail)
    return chain.certificate(builtin("R_n", n=n))


@dataclass(frozen=True)
class FishPlan:
    """How ``R_n^d -> R_n`` is assembled.

    ``route`` is one of ``trivial``, ``divides``, ``ten-step``; ``d`` is first
    lowered to ``k`` by ``stabilize_rounds`` rounds of :func:`cert_stabilize`.
    For the ten-step route ``n = k*t + r`` and ``n1 + n2 == n``.
    """

    n: int
    d: int
    k: int
    stabilize_rounds: int
    route: str
    t: int | None = None
    r: int | None = None
    euclid: EuclidResult | None = None
    n1: int | None = None
    n2: int | None = None


def plan_fish(n: int, d: int) -> FishPlan:
    if n < 2 or d < 1:
        raise PreconditionError("need n >= 2 and d >= 1")
    if gcd(d, n - 1) != 1:
        raise PreconditionError(f"gcd({d}, {n - 1}) != 1")
    k = (d - 1) % (n - 1) + 1
    rounds = (d - k) // (n - 1)
    if k == 1:
        return FishPlan(n, d, k, rounds, "trivial")
    if n % k == 0:
        return FishPlan(n, d, k, rounds, "divides")
    t, r = divmod(n, k)
    # k >= 3 and r >= 2 here: k == 2 forces n even, r == 1 forces k | n - 1
    if k < 3 or r < 2:
        raise ConstructionError(f"unexpected residue case n={n}, k={k}")
    e = euclid_S(k, k - r + 1)
    n1 = e.x1 * (t + 1) - e.y1
    n2 = e.x2 * (t + 1) + 1 - e.y2
    if n1 + n2 != n:
        raise ConstructionError(f"n1 + n2 = {n1 + n2} != n = {n}")
    return FishPlan(n, d, k, rounds, "ten-step", t, r, e, n1, n2)


def _ten_step(chain: _Chain, plan: FishPlan, v1: str, tail: str) -> None:
    n, d, t, r = plan.n, plan.k, plan.t, plan.r
    e = plan.euclid
    n1, n2 = plan.n1, plan.n2
    # Step 1
    chain.shift(v1, tail, t)
    chain.expect([v1, tail], [[t + r, t], [d - 1, 0]], "step 1")
    # Step 2
    chain.split(tail, [{v1: 1}, {v1: d - 2}])
    v2, v3 = f"{tail}#1", f"{tail}#2"
    order = [v1, v2, v3]
    # Step 3
    chain.shift(v1, v2)
    A = ((t + r - 1, t + 1, t), (1, 0, 0), (d - 2, 0, 0))
    chain.expect(order, A, "step 3")
    # Step 4: Phi_{K_i} for i = 1..m, each as k_i unshifts
    M = A
    for i, k_i in enumerate(e.k_sequence, start=1):
        s, tt = (v2, v1) if i % 2 else (v1, v2)
        sub = phi_shift_cert(chain.g, s, tt, k_i)
        for step in sub.steps:
            chain.do(step)
        K = elementary_K(3, 2, 1, k_i) if i % 2 else elementary_K(3, 1, 2, k_i)
        M = phi(K, M)
        if any(x < 0 for row in M for x in row):
            raise ConstructionError("Phi produced a negative entry")
    B = phi(e.S, A)
    if M != B:
        raise ConstructionError("composite of Phi_{K_i} differs from Phi_S")
    chain.expect(order, B, "step 4")
    # Step 5
    x1, y1, x2, y2 = e.x1, e.y1, e.x2, e.y2
    p, q = x1 - y1, x2 - y2
    checks = [
        B[0][0] - p * B[2][0] == n1,
        B[0][1] - p * B[2][1] == n1,
        B[0][2] - p * B[2][2] + p == n1,
        B[1][0] - q * B[2][0] == n2,
        B[1][1] - q * B[2][1] == n2,
        B[1][2] - q * B[2][2] + q == n2 - 1,
    ]
    if not all(checks):
        raise ConstructionError(f"step 5 identities fail: {checks}")
    chain.shift(v1, v3, p)
    chain.shift(v2, v3, q)
    chain.expect(order, [[n1, n1, n1], [n2, n2, n2 - 1], [d - 2, 0, 0]], "step 5")
    # Step 6
    chain.unshift(v2, v1)
    chain.expect(order, [[n1, n1, n1], [n - 1, n, n - 1], [d - 2, 0, 0]], "step 6")
    # Step 7
    chain.shift(v2, v3)
    chain.expect(order, [[n1, n1, n1], [n - d + 1, n, n], [d - 2, 0, 0]], "step 7")
    # Step 8
    chain.merge([v2, v3], name=tail)
    chain.expect([v1, tail], [[n1, n1], [n - 1, n]], "step 8")
    # Step 9
    chain.shift(tail, v1)
    chain.expect([v1, tail], [[n1, n1], [n2, n2]], "step 9")
    # Step 10
    chain.merge([v1, tail], name=v1)
    chain.expect([v1], [[n]], "step 10")


def cert_fish(n: int, d: int) -> MoveCertificate:
    """``R_n^d`` to ``R_n`` whenever ``gcd(d, n - 1) == 1``."""
    plan = plan_fish(n, d)
    g, w, tail = _tail_pair(n, d)
    chain = _Chain(g)
    for s in range(plan.stabilize_rounds, 0, -1):
        tail = _stabilize_once(chain, n, plan.k, s, w, tail)
    if plan.route == "divides":
        _divides(chain, n, plan.k, w, tail)
    elif plan.route == "ten-step":
        _ten_step(chain, plan, w, tail)
    return chain.certificate(builtin("R_n", n=n))


def _on_cycle(g: MultiGraph) -> set[int]:
    out = set()
    for v in range(g.n):
        seen, stack = set(), list(g.successors(v))
        while stack:
            u = stack.pop()
            if u == v:
                out.add(v)
                break
            if u not in seen:
                seen.add(u)
                stack.extend(g.successors(u))
    return out


def cert_remove_sources(g: MultiGraph) -> tuple[MultiGraph, MoveCertificate]:
    """Shift tree vertices onto cycles, nearest layer first, until no source is left.

    A vertex ``v`` off every cycle but with an edge into the cycle set ``C`` is
    absorbed by shifting some ``u`` in ``C`` towards ``v`` (``u`` gives up a
    copy of ``v``'s out-row and gains the edge ``u -> v``).  Candidates ``u``
    that already hit the same cycle vertex as ``v`` are tried first.
    """
    rep = analyze(g)
    if not (rep.purely_infinite_simple and rep.condition_sing):
        raise PreconditionError("cert_remove_sources needs a purely infinite simple Condition (Sing) graph")
    chain = _Chain(g)
    for _ in range(g.n * g.n + 1):
        h = chain.g
        C = _on_cycle(h)
        T = [v for v in range(h.n) if v not in C]
        if not T:
            return h, chain.certificate()
        layer1 = [v for v in T if any(u in C for u in h.successors(v))]
        done = False
        for v in layer1:
            hits = {u for u in h.successors(v) if u in C}
            preferred = [u for u in sorted(C) if any(h.matrix[u][x] for x in hits)]
            rest = [u for u in sorted(C) if u not in preferred]
            for u in preferred + rest:
                if shift_applicable(h, h.vertices[u], h.vertices[v]):
                    chain.shift(h.vertices[u], h.vertices[v])
                    done = True
                    break
            if done:
                break
        if not done:
            raise MoveError("no source-absorbing shift is applicable")
    raise MoveError("source removal did not terminate")


def cert_expand(g: MultiGraph, n: int) -> tuple[MultiGraph, MoveCertificate]:
    """Maximal out-split, then binary splits, until the graph has ``n`` vertices."""
    if not analyze(g).purely_infinite_simple:
        raise PreconditionError("cert_expand needs a purely infinite simple graph")
    if n < g.edge_count:
        raise PreconditionError(f"n = {n} is below the edge count {g.edge_count}")
    chain = _Chain(g)
    for step in maximal_outsplit_steps(g):
        chain.do(step)
    while chain.g.n < n:
        h = chain.g
        v = next(i for i in range(h.n) if h.out_degree(i) >= 2)
        row = list(h.matrix[v])
        j = next(j for j, m in enumerate(row) if m)
        first = [0] * h.n
        first[j] = 1
        rest = row[:]
        rest[j] -= 1
        chain.do(MoveStep.outsplit(PartitionSpec.from_vectors(h, h.vertices[v], [first, rest])))
    return chain.g, chain.certificate()
