import itertools

import pytest

from zkipcp import aqc, commit
from zkipcp.errors import DegreeTooLow
from zkipcp.field import enumerate_subset, prime_field
from zkipcp.mpoly import MultiPoly, PrefixQuery, sample_uniform_poly
from zkipcp.rng import DomainRNG

F101 = prime_field(101)
F5 = prime_field(5)


def _params(field, gsize=2, k=1):
    G = enumerate_subset(field, gsize, name="G")
    return commit.CommitmentParams(k, G, 2 * (gsize - 1))


def test_low_degree_rejected():
    G = enumerate_subset(F5, 2, name="G")
    with pytest.raises(DegreeTooLow):
        commit.CommitmentParams(1, G, 1)


def test_commit_element_constraint():
    rng = DomainRNG(1, "ce")
    for a in (0, 3, 77):
        c = commit.commit_element(F101, a, _params(F101), rng.child(str(a)))
        assert c.committed_value() == a


def test_commit_poly_identity():
    rng = DomainRNG(2, "cp")
    Q = sample_uniform_poly(F101, (2,), rng.child("q"))
    params = commit.CommitmentParams(1, enumerate_subset(F101, 2, name="G"), 2,
                                     m=1, d_q=2)
    c = commit.commit_poly(Q, params, rng.child("c"))
    S = c.committed_poly()
    assert S == Q
    for i in range(100):
        pt = (rng.child(f"p{i}").field_element(F101),)
        assert S.eval(pt) == Q.eval(pt)


def test_decommit_honest():
    rng = DomainRNG(3, "open")
    Q = sample_uniform_poly(F101, (2,), rng.child("q"))
    params = commit.CommitmentParams(1, enumerate_subset(F101, 2, name="G"), 2,
                                     m=1, d_q=2)
    c = commit.commit_poly(Q, params, rng.child("c"))
    for i in range(10):
        alpha = (rng.child(f"a{i}").field_element(F101),)
        t, value = commit.decommit(c, alpha, rng.child(f"s{i}"),
                                   compiled=(i % 2 == 0), ldt_reps=2)
        assert t.accepted and value == Q.eval(alpha)


def test_decommit_two_points_two_sessions():
    rng = DomainRNG(4, "open2")
    Q = sample_uniform_poly(F101, (2,), rng.child("q"))
    params = commit.CommitmentParams(1, enumerate_subset(F101, 2, name="G"), 2,
                                     m=1, d_q=2)
    c = commit.commit_poly(Q, params, rng.child("c"))
    a1, a2 = (17,), (42,)
    t1, v1 = commit.decommit(c, a1, rng.child("s1"), compiled=False)
    t2, v2 = commit.decommit(c, a2, rng.child("s2"), compiled=False)
    assert t1.accepted and t2.accepted
    assert (v1, v2) == (Q.eval(a1), Q.eval(a2))


def test_binding_cheat_rate():
    rng = DomainRNG(5, "bind")
    params = commit.CommitmentParams(1, enumerate_subset(F101, 2, name="G"), 2,
                                     m=1, d_q=2)
    wins = 0
    trials = 1000
    for i in range(trials):
        Q = sample_uniform_poly(F101, (2,), rng.child(f"q{i}"))
        c = commit.commit_poly(Q, params, rng.child(f"c{i}"))
        alpha = (rng.child(f"a{i}").field_element(F101),)
        lie = F101.add(Q.eval(alpha), 1)
        t, value = commit.decommit(c, alpha, rng.child(f"s{i}"), compiled=False,
                                   cheat_value=lie)
        if t.accepted and value == lie:
            wins += 1
    envelope = (1 * 2 + 2) / 101  # (k*d' + 2)/|F| flavor
    assert wins / trials <= envelope + 3 * (envelope / trials) ** 0.5 + 0.01


def test_hiding_exact_small_grid():
    for field in (F5, prime_field(7)):
        for gsize in (2, 3):
            params = commit.CommitmentParams(
                1, enumerate_subset(field, gsize, name="G"), 2 * (gsize - 1))
            pts = [(q,) for q in field.elements()]
            for q in pts:
                ok, _ = commit.hiding_independence(field, params, [q])
                assert ok


def test_transparent_to_low_degree_tests():
    from zkipcp.oracles import individual_degree_test
    rng = DomainRNG(6, "ldt")
    c = commit.commit_element(F101, 9, _params(F101), rng.child("c"))
    bounds = (c.params.d_prime,) * c.params.k
    assert individual_degree_test(c.oracle(), bounds, 8, rng.child("t"))


def test_multilinear_attack_witness():
    """d' = 1, G = {0,1}: one query at 2^{-1} recovers the committed value."""
    rng = DomainRNG(7, "attack")
    params = commit.unsafe_multilinear_params(F5, 1)
    inv2 = F5.inv(2)
    ok, witness = aqc.independence_check(F5, 0, 1, 0, 1, params.G, [(inv2,)])
    assert not ok
    for i in range(100):
        a = rng.child(f"a{i}").field_element(F5)
        from zkipcp.sampler import sample_constrained_poly
        Z = sample_constrained_poly(
            F5, (1,), [(PrefixQuery((), (params.G,)), a)], rng.child(f"z{i}"))
        # the witness recovers a from the single query
        lhs = 0
        for c_coef, kpt in zip(witness.c, witness.k_points):
            s = Z.partial_sum(PrefixQuery(kpt, (params.G,)))
            lhs = F5.add(lhs, F5.mul(c_coef, s))
        rhs = 0
        for d_coef, q in zip(witness.d, witness.queries):
            rhs = F5.add(rhs, F5.mul(d_coef, Z.eval(q)))
        assert lhs == rhs
        # and the recovered value: sum = 2 * Z(inv2) for the c-normalized combo
        scale = witness.c[0]
        assert F5.mul(F5.inv(scale), rhs) == a
