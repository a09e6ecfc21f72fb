import pytest

from zkipcp.field import complement_subset, enumerate_subset, prime_field
from zkipcp.mpoly import MultiPoly, PrefixQuery, sample_uniform_poly
from zkipcp.rng import DomainRNG
from zkipcp.session import Transcript
from zkipcp.sumcheck import (
    CheatingStrongProver,
    ConsistentLiar,
    HonestRoundProver,
    HonestStrongProver,
    StrongParams,
    SumcheckInstance,
    strong_zk_prove_verify,
    strong_zk_run,
    strong_zk_simulate,
    sumcheck_reduce,
    weak_zk_sumcheck,
)

F5 = prime_field(5)
F101 = prime_field(101)


def _full_set(field):
    from zkipcp.field import subset_from
    return subset_from(field, tuple(field.elements()), "F")


def _instance(field, m, d, hsize, poly=None, rng=None, true_claim=True):
    H = enumerate_subset(field, hsize)
    if poly is None:
        poly = sample_uniform_poly(field, (d,) * m, rng)
    a = poly.partial_sum(PrefixQuery.over((), H, m))
    if not true_claim:
        a = field.add(a, 1)
    return poly, SumcheckInstance(field, m, d, H, a)


def test_sumcheck_completeness_example():
    # F = X1*X2, H = {0,1} over F_5, a = 1
    p = MultiPoly(F5, (1, 1))
    p.set((1, 1), 1)
    H = enumerate_subset(F5, 2)
    inst = SumcheckInstance(F5, 2, 1, H, 1)
    t, claim = sumcheck_reduce(p, inst, None, DomainRNG(1, "sc"))
    assert t.accepted
    assert p.eval(claim.point) == claim.value
    # round 1 message must be g1(X) = X (coefficients [0, 1])
    g1 = next(d for k, l, d in t.entries if l == "sc.g0")
    assert list(g1) == [0, 1]


def test_sumcheck_completeness_random():
    rng = DomainRNG(2, "rand")
    for i in range(50):
        poly, inst = _instance(F101, 3, 2, 2, rng=rng.child(f"p{i}"))
        t, claim = sumcheck_reduce(poly, inst, None, rng.child(f"v{i}"))
        assert t.accepted
        assert poly.eval(claim.point) == claim.value


def test_sumcheck_degenerate_m0():
    poly = MultiPoly.constant(F5, 3, 0)
    H = enumerate_subset(F5, 2)
    inst = SumcheckInstance(F5, 0, 1, H, 3)
    t, claim = sumcheck_reduce(poly, inst, None, DomainRNG(3, "m0"))
    assert t.accepted and claim.point == () and claim.value == 3


def test_round_consistency_invariant():
    rng = DomainRNG(4, "inv")
    poly, inst = _instance(F101, 2, 2, 2, rng=rng)
    t, claim = sumcheck_reduce(poly, inst, None, rng.child("v"))
    f = F101
    from zkipcp.mpoly import eval_univariate
    coeffs = {l: d for k, l, d in t.entries if k == "prover"}
    chals = {l: d for k, l, d in t.entries if k == "challenge"}
    b = inst.a
    for i in range(inst.m):
        g = coeffs[f"sc.g{i}"]
        total = 0
        for alpha in inst.H.elements:
            total = f.add(total, eval_univariate(f, g, alpha))
        assert total == b
        b = eval_univariate(f, g, chals[f"sc.c{i}"])


def test_consistent_liar_soundness_rate():
    """Measured true-claim rate of the consistent liar stays near m*d/|F|."""
    rng = DomainRNG(5, "liar")
    H = enumerate_subset(F101, 2)
    wins = 0
    trials = 2000
    full = _full_set(F101)
    for i in range(trials):
        poly = sample_uniform_poly(F101, (2, 2), rng.child(f"p{i}"))
        true_a = poly.partial_sum(PrefixQuery.over((), H, 2))
        inst = SumcheckInstance(F101, 2, 2, H, F101.add(true_a, 1))
        inner = HonestRoundProver(poly, inst.sum_sets, inst.d)
        liar = ConsistentLiar(inner, F101, inst.sum_sets, inst.d, full, 1)
        t, claim = sumcheck_reduce(poly, inst, None, rng.child(f"v{i}"), prover=liar)
        if claim is not None and poly.eval(claim.point) == claim.value:
            wins += 1
    rate = wins / trials
    bound = 2 * 2 / 101
    assert rate <= bound + 3 * (bound / trials) ** 0.5 + 0.01


def test_weak_zk_completeness():
    rng = DomainRNG(6, "wzk")
    for i in range(20):
        poly, inst = _instance(F101, 2, 2, 2, rng=rng.child(f"p{i}"))
        t, claim, R = weak_zk_sumcheck(poly, inst, rng.child(f"s{i}"), compiled=(i % 2 == 0),
                                       ldt_reps=2)
        assert t.accepted
        assert poly.eval(claim.point) == claim.value


def _toy_params(field, hsize=2, lam=2, k=1):
    H = enumerate_subset(field, hsize)
    G = enumerate_subset(field, lam, name="G")
    I = complement_subset(field, H)
    return H, StrongParams(lam, k, G, I)


def test_strong_zk_completeness_hybrid_and_compiled():
    rng = DomainRNG(7, "strong")
    H, params = _toy_params(F101)
    for i in range(15):
        poly = sample_uniform_poly(F101, (2, 2), rng.child(f"p{i}"))
        a = poly.partial_sum(PrefixQuery.over((), H, 2))
        inst = SumcheckInstance(F101, 2, 2, H, a)
        t, claim, _ = strong_zk_prove_verify(
            poly, inst, params, rng.child(f"s{i}"), compiled=(i % 2 == 0), ldt_reps=2)
        assert t.accepted, t.reason
        assert poly.eval(claim.point) == claim.value
        assert all(c in params.I.as_set() for c in claim.point)


def test_strong_zk_degenerate_m0():
    rng = DomainRNG(8, "m0s")
    H, params = _toy_params(F101)
    poly = MultiPoly.constant(F101, 9, 0)
    inst = SumcheckInstance(F101, 0, 1, H, 9)
    t, claim, _ = strong_zk_prove_verify(poly, inst, params, rng, compiled=False)
    assert t.accepted and claim.value == 9


def test_strong_zk_prover_aborts_outside_I():
    rng = DomainRNG(9, "abort")
    H, params = _toy_params(F101)
    poly = sample_uniform_poly(F101, (2, 2), rng.child("p"))
    a = poly.partial_sum(PrefixQuery.over((), H, 2))
    inst = SumcheckInstance(F101, 2, 2, H, a)
    prover = HonestStrongProver(poly, inst, params, rng.child("prover"))

    def bad_challenges(label):
        if label == "p1.c0":
            return 1  # 1 is in H, outside I
        return 7

    t, claim, _ = strong_zk_run(inst, params, prover, rng.child("v"),
                                compiled=False, challenge_fn=bad_challenges)
    assert claim is None
    assert "aborted" in t.reason
    assert any(l == "p1.abort" for _, l, *r in t.entries)


def test_strong_zk_cheating_prover_rate():
    rng = DomainRNG(10, "cheat")
    H, params = _toy_params(F101)
    wins = 0
    trials = 1500
    for i in range(trials):
        poly = sample_uniform_poly(F101, (2, 2), rng.child(f"p{i}"))
        true_a = poly.partial_sum(PrefixQuery.over((), H, 2))
        inst = SumcheckInstance(F101, 2, 2, H, F101.add(true_a, 1))
        prover = CheatingStrongProver(poly, inst, params, rng.child(f"pr{i}"), true_a)
        t, claim, _ = strong_zk_run(inst, params, prover, rng.child(f"v{i}"),
                                    compiled=False)
        if t.accepted and poly.eval(claim.point) == claim.value:
            wins += 1
    rate = wins / trials
    m, k, d, lam = 2, 1, 2, 2
    envelope = 6 * (m + k) * (d + lam) / len(params.I)
    assert rate <= envelope


def test_strong_zk_simulator_structure():
    rng = DomainRNG(11, "simstruct")
    H, params = _toy_params(F5)
    poly = sample_uniform_poly(F5, (1,), rng.child("p"))
    a = poly.partial_sum(PrefixQuery.over((), H, 1))
    inst = SumcheckInstance(F5, 1, 1, H, a)
    for i in range(200):
        calls = []

        def F_query(pt):
            calls.append(pt)
            return poly.eval(pt)

        t, claim, sim = strong_zk_simulate(inst, params, F_query,
                                           DomainRNG(i, "sim"), budget=params.query_bound)
        assert t.accepted
        assert len(calls) == 1
        assert all(x in params.I.as_set() for x in calls[0])
        assert sim.answers_consistent()


def test_simulated_transcript_passes_honest_verifier():
    # simulated runs must satisfy every verifier check, including final reads
    rng = DomainRNG(12, "simok")
    H, params = _toy_params(F5)
    poly = sample_uniform_poly(F5, (1,), rng.child("p"))
    a = poly.partial_sum(PrefixQuery.over((), H, 1))
    inst = SumcheckInstance(F5, 1, 1, H, a)
    for i in range(100):
        t, claim, sim = strong_zk_simulate(inst, params, poly.eval, DomainRNG(i, "x"))
        assert t.accepted, t.reason
        assert poly.eval(claim.point) == claim.value
