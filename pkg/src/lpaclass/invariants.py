"""Pointed K0 data of a graph and the pointed-isomorphism decision."""

from __future__ import annotations

import itertools
import os
from dataclasses import dataclass
from math import gcd

from .errors import TorsionCapExceeded
from .intlat import AbelianGroup, cokernel, content, kernel_rank, project, smith_normal_form
from .multigraph import MultiGraph

__all__ = [
    "PointedK0",
    "k0_data",
    "k1_matrix",
    "k1_rank",
    "pointed_iso",
    "group_iso",
    "max_torsion",
    "DEFAULT_MAX_TORSION",
]

DEFAULT_MAX_TORSION = 10_000


def max_torsion() -> int:
    """Brute-force cap on the torsion order, overridable by ``LPACLASS_MAX_TORSION``."""
    raw = os.environ.get("LPACLASS_MAX_TORSION")
    return int(raw) if raw else DEFAULT_MAX_TORSION


@dataclass(frozen=True)
class PointedK0:
    """A finitely generated abelian group with a distinguished element.

    ``unit_class`` holds one residue per invariant factor followed by one
    integer per free summand.  The coordinates depend on the chosen basis, so
    compare two instances with :func:`pointed_iso`, not ``==``.
    """

    group: AbelianGroup
    unit_class: tuple[int, ...]

    @property
    def torsion_part(self) -> tuple[int, ...]:
        return self.unit_class[: len(self.group.invariant_factors)]

    @property
    def free_part(self) -> tuple[int, ...]:
        return self.unit_class[len(self.group.invariant_factors):]

    def to_dict(self) -> dict:
        return {
            "rank": self.group.free_rank,
            "factors": list(self.group.invariant_factors),
            "unit": list(self.unit_class),
        }


def k1_matrix(g: MultiGraph):
    """``A^t - I`` for the incidence matrix ``A`` of ``g``."""
    n = g.n
    A = g.matrix
    return tuple(tuple(A[j][i] - (i == j) for j in range(n)) for i in range(n))


def k0_data(g: MultiGraph) -> PointedK0:
    """``(coker(A^t - I), class of (1, ..., 1))``."""
    M = k1_matrix(g)
    if not M:
        return PointedK0(AbelianGroup(0), ())
    snf = smith_normal_form(M)
    return PointedK0(cokernel(M), project(M, (1,) * g.n, snf=snf))


def k1_rank(g: MultiGraph) -> int:
    M = k1_matrix(g)
    return kernel_rank(M) if M else 0


def group_iso(a: AbelianGroup, b: AbelianGroup) -> bool:
    return a.free_rank == b.free_rank and tuple(a.invariant_factors) == tuple(b.invariant_factors)


def _elements_of_order_dividing(factors, k):
    """All tuples x in prod Z/f with k*x == 0."""
    ranges = []
    for f in factors:
        step = f // gcd(f, k)
        ranges.append(range(0, f, step))
    return itertools.product(*ranges)


def _automorphisms(factors):
    """Yield each automorphism of ``prod Z/f_i`` as the tuple of generator images."""
    order = 1
    for f in factors:
        order *= f
    candidates = [list(_elements_of_order_dividing(factors, f)) for f in factors]
    for images in itertools.product(*candidates):
        if _is_injective(factors, images, order):
            yield images


def _apply(factors, images, x):
    out = [0] * len(factors)
    for coeff, img in zip(x, images):
        if coeff:
            for i, f in enumerate(factors):
                out[i] = (out[i] + coeff * img[i]) % f
    return tuple(out)


def _is_injective(factors, images, order):
    # the image subgroup must have full order; grow it generator by generator
    seen = {tuple(0 for _ in factors)}
    for img in images:
        new = set(seen)
        frontier = set(seen)
        while frontier:
            nxt = set()
            for x in frontier:
                y = tuple((a + b) % f for a, b, f in zip(x, img, factors))
                if y not in new:
                    new.add(y)
                    nxt.add(y)
            frontier = nxt
        seen = new
    return len(seen) == order


def _in_multiple_subgroup(factors, x, c):
    """Whether x lies in c*T for T = prod Z/f_i."""
    # c*Z/f = gcd(c, f)*Z/f
    return all(xi % gcd(c, f) == 0 for xi, f in zip(x, factors))


def pointed_iso(a: PointedK0, b: PointedK0) -> bool:
    """Whether some group isomorphism carries ``a.unit_class`` to ``b.unit_class``.

    Automorphisms of ``Z^r + T`` never map torsion into the free part, so the
    free coordinates must have equal content ``c`` and the torsion coordinates
    must agree modulo ``c*T`` after some automorphism of ``T``.
    """
    if not group_iso(a.group, b.group):
        return False
    c = content(a.free_part)
    if c != content(b.free_part):
        return False
    factors = tuple(a.group.invariant_factors)
    x, y = a.torsion_part, b.torsion_part
    if not factors:
        return True
    if c == 1:
        return True
    if a.group.torsion_order > max_torsion():
        raise TorsionCapExceeded(
            f"undecided, cap exceeded: torsion order {a.group.torsion_order} > {max_torsion()}"
        )

    def matches(z):
        diff = tuple((yi - zi) % f for yi, zi, f in zip(y, z, factors))
        return _in_multiple_subgroup(factors, diff, c) if c else not any(diff)

    if len(factors) == 1:
        f = factors[0]
        return any(matches(((u * x[0]) % f,)) for u in range(1, f) if gcd(u, f) == 1)
    # cheap rejection: automorphisms preserve element order when c == 0
    if c == 0 and _order(factors, x) != _order(factors, y):
        return False
    for images in _automorphisms(factors):
        if matches(_apply(factors, images, x)):
            return True
    return False


def _order(factors, x):
    o = 1
    for xi, f in zip(x, factors):
        oi = f // gcd(xi, f)
        o = o * oi // gcd(o, oi)
    return o

