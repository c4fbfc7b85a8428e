from math import gcd

import pytest

from lpaclass.errors import PreconditionError
from lpaclass.explorer import enumerate_pis_sing, graph_iso
from lpaclass.intlat import det, identity, matmul
from lpaclass.invariants import k0_data, pointed_iso
from lpaclass.moves import replay, verify_certificate
from lpaclass.multigraph import analyze, builtin, from_incidence
from lpaclass.pipeline import (
    cert_divides,
    cert_expand,
    cert_fish,
    cert_open_tails,
    cert_remove_sources,
    cert_stabilize,
    elementary_K,
    euclid_S,
    phi,
    phi_shift_cert,
    plan_fish,
)
from lpaclass.moves import maximal_outsplit


def test_phi_examples():
    A = ((1, 1), (1, 0))
    assert phi(identity(2), A) == A
    # M A = [[1, 1], [2, 1]], plus I - M = [[0, 0], [-1, 0]]
    assert phi(elementary_K(2, 2, 1, 1), A) == ((1, 1), (1, 1))
    M1 = ((1, 2, 0), (0, 1, 0), (3, 0, 1))
    M2 = ((1, 0, -1), (2, 1, 0), (0, 0, 1))
    B = ((2, 0, 1), (1, 1, 1), (0, 3, 0))
    assert phi(M2, phi(M1, B)) == phi(matmul(M2, M1), B)
    with pytest.raises(PreconditionError):
        phi(identity(2), identity(3))


def test_elementary_K():
    assert elementary_K(3, 2, 1, 1) == ((1, 0, 0), (1, 1, 0), (0, 0, 1))
    assert elementary_K(3, 1, 2, 4) == ((1, 4, 0), (0, 1, 0), (0, 0, 1))
    with pytest.raises(PreconditionError):
        elementary_K(2, 1, 1, 1)
    with pytest.raises(PreconditionError):
        elementary_K(2, 1, 3, 1)


def test_euclid_examples():
    e = euclid_S(3, 2)
    assert e.k_sequence == (1, 1)
    assert e.S == ((2, 1, 0), (1, 1, 0), (0, 0, 1))
    assert (e.x1, e.y1, e.x2, e.y2) == (2, 1, 1, 1)
    e = euclid_S(5, 3)
    assert e.x1 * 3 - e.y1 * 5 == 1 and e.x2 * 3 - e.y2 * 5 == -1
    assert e.x1 + e.x2 == 5 and e.y1 + e.y2 == 3
    for bad in ((4, 2), (2, 3), (3, 1)):
        with pytest.raises(PreconditionError):
            euclid_S(*bad)


def test_euclid_identities_up_to_50():
    for a in range(3, 51):
        for b in range(2, a):
            if gcd(a, b) == 1:
                e = euclid_S(a, b)
                assert e.x1 * b - e.y1 * a == 1
                assert e.x2 * b - e.y2 * a == -1
                assert e.x1 + e.x2 == a and e.y1 + e.y2 == b
                assert e.x1 - e.y1 >= 1 and e.x2 - e.y2 >= 0
                assert det(e.S) == 1


def test_phi_shift_cert_matches_phi():
    # the three-vertex graph entering the Euclid step for (n, d) = (8, 3)
    A = ((3, 3, 2), (1, 0, 0), (1, 0, 0))
    g = from_incidence(A)
    cert = phi_shift_cert(g, "v2", "v1", 1)
    assert cert.target.matrix == phi(elementary_K(3, 2, 1, 1), A)
    assert verify_certificate(cert).valid
    with pytest.raises(PreconditionError):
        phi_shift_cert(g, "v2", "v1", 0)
    with pytest.raises(PreconditionError):
        phi_shift_cert(g, "v2", "v3", 1)  # a_tt = 0
    with pytest.raises(PreconditionError):
        phi_shift_cert(from_incidence([[1, 0], [1, 0]]), "v2", "v1", 1)  # no Condition (L)


@pytest.mark.parametrize("n,k", [(2, 3), (5, 2), (3, 1), (2, 5), (1, 3)])
def test_open_tails(n, k):
    cert = cert_open_tails(n, k)
    assert cert.source == builtin("R_n_k", n=n, k=k)
    assert graph_iso(replay(cert.source, cert.steps), builtin("B_n_k", n=n, k=k))
    rep = verify_certificate(cert, allow_infinite_field=n == 1)
    assert rep.valid
    assert rep.field_conditional == (n == 1 and k > 2)
    if k == 1:
        assert cert.steps == ()


def test_open_tails_passes_through_A():
    cert = cert_open_tails(2, 3)
    assert [s.kind for s in cert.steps] == ["outsplit", "shift"]
    assert graph_iso(replay(cert.source, cert.steps[:1]), builtin("A_n_k", n=2, k=3))


@pytest.mark.parametrize("n,k,t", [(3, 1, 1), (4, 2, 1), (3, 2, 3), (2, 1, 2), (5, 3, 0)])
def test_stabilize(n, k, t):
    cert = cert_stabilize(n, k, t)
    assert cert.source.matrix == builtin("R_n_k", n=n, k=k + t * (n - 1)).matrix
    assert verify_certificate(cert).valid
    assert pointed_iso(k0_data(cert.source), k0_data(builtin("R_n_k", n=n, k=k)))
    if t == 0:
        assert cert.steps == ()


def test_stabilize_rejects():
    with pytest.raises(PreconditionError):
        cert_stabilize(1, 1, 1)
    with pytest.raises(PreconditionError):
        cert_stabilize(3, 0, 1)


@pytest.mark.parametrize("n,k", [(4, 2), (6, 3), (2, 2), (9, 3)])
def test_divides(n, k):
    cert = cert_divides(n, k)
    assert verify_certificate(cert).valid
    assert replay(cert.source, cert.steps).matrix == ((n,),)


def test_divides_rejects():
    with pytest.raises(PreconditionError):
        cert_divides(5, 2)


def test_fish_8_3_takes_ten_step_route():
    plan = plan_fish(8, 3)
    assert plan.route == "ten-step"
    assert (plan.t, plan.r) == (2, 2)
    e = plan.euclid
    assert (e.a, e.b) == (3, 2)
    assert (e.x1, e.y1, e.x2, e.y2) == (2, 1, 1, 1)
    assert (plan.n1, plan.n2) == (5, 3)
    cert = cert_fish(8, 3)
    assert verify_certificate(cert).valid
    assert replay(cert.source, cert.steps).matrix == ((8,),)


def test_fish_dispatch():
    assert plan_fish(4, 5).stabilize_rounds == 1
    assert plan_fish(4, 5).route == "divides" and plan_fish(4, 5).k == 2
    assert plan_fish(7, 1).route == "trivial"
    assert cert_fish(7, 1).steps == ()
    with pytest.raises(PreconditionError):
        cert_fish(5, 2)


def test_fish_all_small():
    for n in range(2, 9):
        for d in range(1, 9):
            if gcd(d, n - 1) == 1:
                cert = cert_fish(n, d)
                assert verify_certificate(cert).valid, (n, d)


def test_remove_sources():
    g = maximal_outsplit(builtin("B_n_k", n=2, k=3))
    assert analyze(g).sources
    h, cert = cert_remove_sources(g)
    rep = analyze(h)
    assert rep.sources == () and rep.condition_sing and rep.purely_infinite_simple
    assert h.n == g.n and verify_certificate(cert).valid


def test_remove_sources_noop_and_rejects():
    s2 = builtin("S2")
    h, cert = cert_remove_sources(s2)
    assert h == s2 and cert.steps == ()
    with pytest.raises(PreconditionError):
        cert_remove_sources(builtin("R_n_k", n=2, k=2))


def test_remove_sources_on_catalog(three_vertex):
    for g in three_vertex:
        h, cert = cert_remove_sources(g)
        assert analyze(h).sources == ()
        assert verify_certificate(cert).valid


def test_expand():
    h, cert = cert_expand(builtin("R_n", n=2), 2)
    assert h.n == 2 and analyze(h).condition_sing
    assert any(graph_iso(h, c) for c in enumerate_pis_sing(2))
    h, cert = cert_expand(builtin("R_n", n=2), 3)
    assert any(graph_iso(h, c) for c in enumerate_pis_sing(3))
    assert verify_certificate(cert).valid
    with pytest.raises(PreconditionError):
        cert_expand(builtin("R_n", n=2), 1)
