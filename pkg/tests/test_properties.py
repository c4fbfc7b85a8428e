"""Property tests over random matrices and graphs."""

from hypothesis import assume, given, settings
from hypothesis import strategies as st

from lpaclass.explorer import applicable_moves, graph_iso
from lpaclass.intlat import matmul
from lpaclass.invariants import k0_data, pointed_iso
from lpaclass.moves import (
    PartitionSpec,
    apply_amalgamate,
    apply_outsplit,
    apply_shift,
    apply_step,
    apply_unshift,
    shift_applicable,
)
from lpaclass.multigraph import from_incidence, has_condition_l
from lpaclass.pipeline import phi


def matrices(n, lo, hi):
    return st.lists(st.lists(st.integers(lo, hi), min_size=n, max_size=n), min_size=n, max_size=n).map(
        lambda rows: tuple(map(tuple, rows))
    )


triples = st.integers(1, 4).flatmap(lambda n: st.tuples(matrices(n, -3, 3), matrices(n, -3, 3), matrices(n, -3, 3)))
graphs = st.integers(1, 4).flatmap(lambda n: matrices(n, 0, 2)).map(from_incidence)


@settings(max_examples=1000, deadline=None)
@given(triples)
def test_phi_composition(t):
    M1, M2, A = t
    assert phi(M2, phi(M1, A)) == phi(matmul(M2, M1), A)


@settings(max_examples=500, deadline=None)
@given(graphs, st.data())
def test_shift_unshift_round_trip(g, data):
    v = data.draw(st.sampled_from(g.vertices))
    w = data.draw(st.sampled_from(g.vertices))
    assume(v != w)
    if shift_applicable(g, v, w):
        h = apply_shift(g, v, w)
        assert apply_unshift(h, v, w) == g
        changed = [i for i in range(g.n) if h.matrix[i] != g.matrix[i]]
        assert changed in ([], [g.index(v)])


@settings(max_examples=500, deadline=None)
@given(graphs, st.data())
def test_outsplit_amalgamate_round_trip(g, data):
    i = data.draw(st.integers(0, g.n - 1))
    row = g.matrix[i]
    assume(sum(row) >= 2)
    # cut the row's edges into two nonempty classes
    units = [j for j, m in enumerate(row) for _ in range(m)]
    cut = data.draw(st.integers(1, len(units) - 1))
    first = [0] * g.n
    for j in units[:cut]:
        first[j] += 1
    second = [a - b for a, b in zip(row, first)]
    v = g.vertices[i]
    h = apply_outsplit(g, PartitionSpec.from_vectors(g, v, [first, second]))
    assert h.n == g.n + 1
    back = apply_amalgamate(h, [f"{v}#1", f"{v}#2"], name=v)
    assert back == g


@settings(max_examples=200, deadline=None)
@given(graphs)
def test_moves_preserve_pointed_k0(g):
    assume(has_condition_l(g) and all(any(r) for r in g.matrix))
    k0 = k0_data(g)
    for step in applicable_moves(g)[:40]:
        h = apply_step(g, step)
        assert pointed_iso(k0, k0_data(h))


@settings(max_examples=200, deadline=None)
@given(graphs, st.permutations(range(4)))
def test_graph_iso_under_relabeling(g, perm):
    order = [p for p in perm if p < g.n]
    h = g.permute(order).rename([f"x{i}" for i in range(g.n)])
    assert graph_iso(g, h)
    assert pointed_iso(k0_data(g), k0_data(h))
