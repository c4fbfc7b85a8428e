"""Exact integer linear algebra: Smith normal form, cokernels, kernels.

Matrices are tuples of tuples of Python ints, so nothing ever overflows.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from math import gcd
from typing import Sequence

from .errors import GraphFormatError, PreconditionError
from .multigraph import Matrix

__all__ = [
    "SmithForm",
    "AbelianGroup",
    "smith_normal_form",
    "cokernel",
    "project",
    "kernel_rank",
    "is_unimodular",
    "det",
    "identity",
    "matmul",
    "matvec",
    "transpose",
    "parse_matrix",
    "matrix_to_dict",
]


def _freeze(rows) -> Matrix:
    return tuple(tuple(int(x) for x in row) for row in rows)


def identity(n: int) -> Matrix:
    return tuple(tuple(int(i == j) for j in range(n)) for i in range(n))


def transpose(A: Matrix) -> Matrix:
    return tuple(zip(*A)) if A else ()


def matmul(A: Matrix, B: Matrix) -> Matrix:
    if A and len(A[0]) != len(B):
        raise PreconditionError("matrix dimensions do not match")
    Bt = transpose(B)
    return tuple(tuple(sum(a * b for a, b in zip(row, col)) for col in Bt) for row in A)


def matvec(A: Matrix, v: Sequence[int]) -> tuple[int, ...]:
    return tuple(sum(a * x for a, x in zip(row, v)) for row in A)


def det(A: Matrix) -> int:
    """Exact determinant by fraction-free (Bareiss) elimination."""
    n = len(A)
    if any(len(r) != n for r in A):
        raise PreconditionError("determinant of a non-square matrix")
    if n == 0:
        return 1
    M = [list(r) for r in A]
    sign, prev = 1, 1
    for k in range(n - 1):
        if M[k][k] == 0:
            for i in range(k + 1, n):
                if M[i][k]:
                    M[k], M[i] = M[i], M[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                M[i][j] = (M[i][j] * M[k][k] - M[i][k] * M[k][j]) // prev
        prev = M[k][k]
    return sign * M[n - 1][n - 1]


def is_unimodular(M: Matrix) -> bool:
    return len(M) > 0 and all(len(r) == len(M) for r in M) and det(M) in (1, -1)


@dataclass(frozen=True)
class SmithForm:
    """``P @ A @ Q == D`` with ``P``, ``Q`` unimodular and ``D`` diagonal."""

    D: Matrix
    P: Matrix
    Q: Matrix

    @property
    def diagonal(self) -> tuple[int, ...]:
        return tuple(self.D[i][i] for i in range(min(len(self.D), len(self.D[0]) if self.D else 0)))

    def to_dict(self) -> dict:
        return {"D": [list(r) for r in self.D], "P": [list(r) for r in self.P], "Q": [list(r) for r in self.Q]}


def smith_normal_form(A) -> SmithForm:
    """Smith normal form with transforms.

    Pivot rule: smallest nonzero absolute value in the untreated block, ties
    broken by row-major position.  Zero diagonal entries end up last and all
    diagonal entries are nonnegative with ``d1 | d2 | ...``.
    """
    M = [list(r) for r in A]
    m = len(M)
    if m == 0 or len(M[0]) == 0:
        raise PreconditionError("smith_normal_form needs a nonempty matrix")
    n = len(M[0])
    if any(len(r) != n for r in M):
        raise PreconditionError("ragged matrix")
    P = [list(r) for r in identity(m)]
    Q = [list(r) for r in identity(n)]

    def swap_rows(i, j):
        if i != j:
            M[i], M[j] = M[j], M[i]
            P[i], P[j] = P[j], P[i]

    def swap_cols(i, j):
        if i != j:
            for R in M:
                R[i], R[j] = R[j], R[i]
            for R in Q:
                R[i], R[j] = R[j], R[i]

    def add_row(src, dst, c):
        # row_dst += c * row_src
        M[dst] = [a + c * b for a, b in zip(M[dst], M[src])]
        P[dst] = [a + c * b for a, b in zip(P[dst], P[src])]

    def add_col(src, dst, c):
        for R in M:
            R[dst] += c * R[src]
        for R in Q:
            R[dst] += c * R[src]

    for t in range(min(m, n)):
        while True:
            best = None
            for i in range(t, m):
                for j in range(t, n):
                    x = abs(M[i][j])
                    if x and (best is None or x < best[0]):
                        best = (x, i, j)
            if best is None:
                return _finish(M, P, Q)
            _, i, j = best
            swap_rows(t, i)
            swap_cols(t, j)
            p = M[t][t]
            dirty = False
            for i in range(t + 1, m):
                if M[i][t]:
                    add_row(t, i, -(M[i][t] // p))
                    dirty |= M[i][t] != 0
            for j in range(t + 1, n):
                if M[t][j]:
                    add_col(t, j, -(M[t][j] // p))
                    dirty |= M[t][j] != 0
            if dirty:
                continue
            bad = next(
                (i for i in range(t + 1, m) for j in range(t + 1, n) if M[i][j] % p),
                None,
            )
            if bad is None:
                break
            add_row(bad, t, 1)
        if M[t][t] < 0:
            M[t] = [-x for x in M[t]]
            P[t] = [-x for x in P[t]]
    return _finish(M, P, Q)


def _finish(M, P, Q) -> SmithForm:
    for t in range(min(len(M), len(M[0]))):
        if M[t][t] < 0:
            M[t] = [-x for x in M[t]]
            P[t] = [-x for x in P[t]]
    return SmithForm(_freeze(M), _freeze(P), _freeze(Q))


@dataclass(frozen=True)
class AbelianGroup:
    """``Z^free_rank`` plus cyclic factors ``Z/f`` with ``f >= 2`` and ``f1 | f2 | ...``."""

    free_rank: int
    invariant_factors: tuple[int, ...] = ()

    def __post_init__(self):
        fs = self.invariant_factors
        if self.free_rank < 0 or any(f < 2 for f in fs):
            raise PreconditionError("invalid abelian group data")
        if any(b % a for a, b in zip(fs, fs[1:])):
            raise PreconditionError("invariant factors must form a divisibility chain")

    @property
    def torsion_order(self) -> int:
        out = 1
        for f in self.invariant_factors:
            out *= f
        return out

    def __str__(self) -> str:
        parts = [f"Z/{f}" for f in self.invariant_factors] + ["Z"] * self.free_rank
        return " + ".join(parts) if parts else "0"


def _rows_of_coker(diag: Sequence[int], m: int) -> list[int]:
    # diagonal entry per row of D; rows past the diagonal behave like 0
    return [diag[i] if i < len(diag) else 0 for i in range(m)]


def cokernel(A) -> AbelianGroup:
    """``Z^m / im(A)`` for an ``m x n`` integer matrix."""
    snf = smith_normal_form(A)
    ds = _rows_of_coker(snf.diagonal, len(snf.D))
    return AbelianGroup(
        free_rank=sum(1 for d in ds if d == 0),
        invariant_factors=tuple(d for d in ds if d >= 2),
    )


def project(A, v: Sequence[int], snf: SmithForm | None = None) -> tuple[int, ...]:
    """Coordinates of ``v + im(A)`` in ``coker(A)``.

    Torsion coordinates first (reduced modulo their factor), then the free
    coordinates as plain integers, matching :func:`cokernel`'s ordering.
    """
    if snf is None:
        snf = smith_normal_form(A)
    m = len(snf.P)
    if len(v) != m:
        raise PreconditionError(f"vector has length {len(v)}, expected {m}")
    w = matvec(snf.P, v)
    ds = _rows_of_coker(snf.diagonal, m)
    torsion = [x % d for x, d in zip(w, ds) if d >= 2]
    free = [x for x, d in zip(w, ds) if d == 0]
    return tuple(torsion + free)


def kernel_rank(A) -> int:
    snf = smith_normal_form(A)
    return len(snf.Q) - sum(1 for d in snf.diagonal if d)


def parse_matrix(text) -> Matrix:
    """Parse ``{"rows": r, "cols": c, "entries": [[...], ...]}``."""
    if isinstance(text, (str, bytes)):
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise GraphFormatError(f"malformed JSON: {exc}") from None
    else:
        doc = text
    if not isinstance(doc, dict) or set(doc) != {"rows", "cols", "entries"}:
        raise GraphFormatError("matrix document must have exactly rows, cols, entries")
    rows, cols, entries = doc["rows"], doc["cols"], doc["entries"]
    if not (isinstance(rows, int) and isinstance(cols, int) and rows > 0 and cols > 0):
        raise GraphFormatError("rows and cols must be positive integers")
    if (
        not isinstance(entries, list)
        or len(entries) != rows
        or any(not isinstance(r, list) or len(r) != cols for r in entries)
        or any(isinstance(x, bool) or not isinstance(x, int) for r in entries for x in r)
    ):
        raise GraphFormatError("entries must be a rows x cols list of integers")
    return _freeze(entries)


def matrix_to_dict(A: Matrix) -> dict:
    return {"rows": len(A), "cols": len(A[0]) if A else 0, "entries": [list(r) for r in A]}


def content(v: Sequence[int]) -> int:
    """gcd of the entries (0 for the zero vector)."""
    g = 0
    for x in v:
        g = gcd(g, x)
    return g
