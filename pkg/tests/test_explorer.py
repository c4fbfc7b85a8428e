import itertools
import random

import pytest

from lpaclass.errors import PreconditionError, SizeCapExceeded
from lpaclass.explorer import (
    SearchBounds,
    applicable_moves,
    canonical_form,
    canonical_labeling,
    classify,
    enumerate_pis_sing,
    find_path,
    graph_iso,
    search_path,
)
from lpaclass.moves import apply_step, verify_certificate
from lpaclass.multigraph import analyze, builtin, from_incidence

from conftest import E1_6, E6_1, E17_1, R2_SQ


def _brute_canonical(M):
    n = len(M)
    return min(
        tuple(tuple(M[i][j] for j in p) for i in p) for p in itertools.permutations(range(n))
    )


def test_canonical_examples():
    s2 = builtin("S2")
    assert canonical_form(s2) == canonical_form(s2.permute([1, 0]))
    assert canonical_form(from_incidence([[0, 1], [1, 0]])) == ((0, 1), (1, 0))
    assert canonical_form(from_incidence([[2, 0], [1, 0]])) == canonical_form(from_incidence([[0, 1], [0, 2]]))


def test_canonical_matches_brute_force_exhaustively_for_three_vertices():
    for entries in itertools.product(range(2), repeat=9):
        M = (entries[0:3], entries[3:6], entries[6:9])
        g = from_incidence(M)
        c = canonical_form(g)
        assert c == _brute_canonical(M)
        for p in itertools.permutations(range(3)):
            assert canonical_form(g.permute(p)) == c


def test_canonical_labeling_realizes_form():
    rng = random.Random(7)
    for _ in range(50):
        n = rng.randint(1, 5)
        g = from_incidence([[rng.randint(0, 3) for _ in range(n)] for _ in range(n)])
        mat, order = canonical_labeling(g)
        assert g.permute(order).matrix == mat


def test_canonical_handles_large_entries():
    g = from_incidence([[2**70, 1], [0, 3]])
    assert canonical_form(g) == _brute_canonical(g.matrix)


def test_size_cap():
    g = from_incidence([[1] * 9] * 9)
    with pytest.raises(SizeCapExceeded):
        canonical_form(g)


def test_graph_iso_examples():
    g = builtin("B_n_k", n=3, k=3)
    assert graph_iso(g, g.permute([2, 0, 1]).rename(["a", "b", "c"]))
    assert not graph_iso(builtin("R_n", n=2), builtin("R_n", n=3))
    assert graph_iso(E1_6, E1_6.permute([1, 2, 0]))
    assert not graph_iso(E17_1, E6_1)


def test_enumeration_counts():
    assert enumerate_pis_sing(1) == []
    two = enumerate_pis_sing(2)
    assert [g.matrix for g in two] == [((0, 1), (1, 1)), ((1, 1), (1, 1))]
    assert len(enumerate_pis_sing(3)) == 34
    with pytest.raises(SizeCapExceeded):
        enumerate_pis_sing(5)
    with pytest.raises(PreconditionError):
        enumerate_pis_sing(-1)


def test_enumeration_is_sorted_canonical_and_pis(three_vertex):
    mats = [g.matrix for g in three_vertex]
    assert mats == sorted(mats)
    for g in three_vertex:
        assert canonical_form(g) == g.matrix
        rep = analyze(g)
        assert rep.purely_infinite_simple and rep.condition_sing


def test_classify_three_vertices(three_vertex):
    table = classify(three_vertex)
    assert sorted(table.sizes) == sorted([18, 6, 4, 2, 1, 1, 2])
    summary = {(tuple(k.group.invariant_factors), k.group.free_rank, len(m)) for k, m in table.classes}
    assert summary == {
        ((), 0, 18),
        ((2,), 0, 6),
        ((2,), 0, 4),
        ((3,), 0, 2),
        ((4,), 0, 1),
        ((2, 2), 0, 1),
        ((), 1, 2),
    }


def test_classify_small_and_empty():
    assert classify(enumerate_pis_sing(2)).sizes == [2]
    assert len(classify([])) == 0


def test_classify_is_stable_under_shuffling(three_vertex):
    base = classify(three_vertex).to_dict()
    rng = random.Random(3)
    for _ in range(3):
        shuffled = list(three_vertex)
        rng.shuffle(shuffled)
        shuffled = [g.permute(rng.sample(range(3), 3)) for g in shuffled]
        assert classify(shuffled).to_dict() == base


def test_classify_parallel_matches_serial(three_vertex):
    assert classify(three_vertex, workers=2).to_dict() == classify(three_vertex).to_dict()


def test_find_path_examples():
    cert = find_path(builtin("S2"), R2_SQ, SearchBounds(3, 3, 4))
    assert cert is not None and len(cert.steps) == 1
    assert verify_certificate(cert).valid
    cert = find_path(E6_1, E17_1, SearchBounds(4, 3, 12))
    assert cert is not None and verify_certificate(cert).valid
    res = search_path(E1_6, E17_1)
    assert res.certificate is None and res.reason == "invariant mismatch"


def test_find_path_same_graph_is_empty():
    cert = find_path(E17_1, E17_1.permute([2, 1, 0]))
    assert cert.steps == () and verify_certificate(cert).valid


def test_find_path_uses_caller_labels():
    g = E6_1.rename(["a", "b", "c"])
    cert = find_path(g, E17_1)
    assert cert.source == g
    assert verify_certificate(cert).valid


def test_search_exhaustion_is_not_nonexistence():
    # a single step is not enough to reach E17 from E6
    res = search_path(E6_1, E17_1, SearchBounds(4, 3, 1))
    assert res.certificate is None and res.reason.startswith("exhausted within bounds")
    res = search_path(builtin("R_n", n=2), E17_1, SearchBounds(2, 2, 10))
    assert res.certificate is None and "outside the bounds" in res.reason


def test_search_without_invariant_check_stays_apart():
    # different pointed K0: an honest search finds nothing within small bounds
    res = search_path(E1_6, E17_1, SearchBounds(4, 2, 6), check_invariants=False)
    assert res.certificate is None and res.reason.startswith("exhausted")
    assert res.states > 2


def test_search_bounds_validation():
    with pytest.raises(PreconditionError):
        SearchBounds(0, 1, 1)


def test_applicable_moves_are_legal(three_vertex):
    for g in three_vertex[:10]:
        moves = applicable_moves(g)
        assert {m.kind for m in moves} >= {"shift", "unshift", "outsplit"}
        for step in moves:
            apply_step(g, step)
