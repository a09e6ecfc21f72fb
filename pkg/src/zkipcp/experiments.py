"""The named experiments behind the CLI and the acceptance suite: each one
runs a complete measurement from a seed and returns report rows plus a pass
verdict against its declared envelope."""

from __future__ import annotations

import itertools
import math
import time

from . import aqc, commit as commit_mod, frontends as fe, instances as inst, spc
from .field import enumerate_subset, prime_field, subset_from
from .harness import (
    PROTOCOLS,
    SoundnessReport,
    ZkTestReport,
    run_protocol,
    soundness_experiment,
    wilson_interval,
    zk_test,
)
from .mpoly import MultiPoly, PrefixQuery, sample_uniform_poly
from .rng import DomainRNG
from .sampler import ConstraintSet, PolySpace
from .sumcheck import (
    CheatingStrongProver,
    ConsistentLiar,
    HonestRoundProver,
    HonestStrongProver,
    StrongParams,
    SumcheckInstance,
    strong_zk_run,
    strong_zk_simulate,
    sumcheck_reduce,
)


def completeness(runs: int = 1000, seed=0, protocols=PROTOCOLS):
    """Seeded honest runs of every protocol; 100% accept expected."""
    rows = []
    t_start = time.time()
    for name in protocols:
        accepted = 0
        t0 = time.time()
        for i in range(runs):
            _t, ok = run_protocol(name, (seed, i))
            accepted += 1 if ok else 0
        rows.append({
            "label": name, "runs": runs, "accepted": accepted,
            "accept_rate": accepted / runs,
            "seconds": round(time.time() - t0, 2),
            "ok": accepted == runs,
        })
    rows.append({"label": "total", "runs": runs * len(protocols),
                 "accepted": sum(r["accepted"] for r in rows),
                 "accept_rate": min(r["accept_rate"] for r in rows),
                 "seconds": round(time.time() - t_start, 2),
                 "ok": all(r["ok"] for r in rows)})
    return rows


def sumcheck_soundness(trials: int = 10_000, seed=0, p: int = 101, m: int = 2,
                       d: int = 2, hsize: int = 2) -> SoundnessReport:
    """Consistent-liar prover on false instances; envelope md/|F| plus the
    3-sigma margin at the envelope rate."""
    field = prime_field(p)
    H = enumerate_subset(field, hsize)
    full = subset_from(field, tuple(field.elements()), "F")
    master = DomainRNG(seed, "sc-soundness")

    def trial(i):
        rng = master.child(str(i))
        poly = sample_uniform_poly(field, (d,) * m, rng.child("poly"))
        true_a = poly.partial_sum(PrefixQuery.over((), H, m))
        a = field.add(true_a, 1 + rng.child("lie").randrange(field.order - 1))
        sc = SumcheckInstance(field, m, d, H, a)
        liar = ConsistentLiar(HonestRoundProver(poly, sc.sum_sets, d), field,
                              sc.sum_sets, d, full, field.sub(a, true_a))
        t, claim = sumcheck_reduce(poly, sc, None, rng.child("verifier"), prover=liar)
        return claim is not None and poly.eval(claim.point) == claim.value

    envelope = m * d / p
    margin = 3 * math.sqrt(envelope * (1 - envelope) / trials)
    rep = soundness_experiment("standard sumcheck consistent-liar", trial,
                               trials, envelope + margin)
    return rep


def strong_zk_soundness(trials: int = 10_000, seed=0, p: int = 101, m: int = 2,
                        d: int = 2, hsize: int = 2, lam: int = 2,
                        k: int = 1) -> SoundnessReport:
    """Cheating-w prover against the compiled verifier on false instances;
    the envelope is the compiled bound 6(m+k)(d+lambda)/|I|."""
    field = prime_field(p)
    H = enumerate_subset(field, hsize)
    params = inst.strong_params(field, hsize, lam, k)
    master = DomainRNG(seed, "strong-soundness")

    def trial(i):
        rng = master.child(str(i))
        poly = sample_uniform_poly(field, (d,) * m, rng.child("poly"))
        true_a = poly.partial_sum(PrefixQuery.over((), H, m))
        a = field.add(true_a, 1 + rng.child("lie").randrange(field.order - 1))
        sc = SumcheckInstance(field, m, d, H, a)
        prover = CheatingStrongProver(poly, sc, params, rng.child("prover"), true_a)
        t, claim, _ = strong_zk_run(sc, params, prover, rng.child("verifier"),
                                    compiled=True, ldt_reps=2)
        return (t.accepted and claim is not None
                and poly.eval(claim.point) == claim.value)

    envelope = 6 * (m + k) * (d + lam) / len(params.I)
    return soundness_experiment("strong-ZK sumcheck cheating-w", trial,
                                trials, envelope)


def commit_binding(trials: int = 10_000, seed=0, p: int = 101) -> SoundnessReport:
    field = prime_field(p)
    params = inst.commit_params(field, 2, 1, m=1, d_q=2)
    master = DomainRNG(seed, "binding")

    def trial(i):
        rng = master.child(str(i))
        Q = sample_uniform_poly(field, (2,), rng.child("q"))
        com = commit_mod.commit_poly(Q, params, rng.child("commit"))
        alpha = (rng.child("alpha").field_element(field),)
        lie = field.add(Q.eval(alpha), 1 + rng.child("lie").randrange(field.order - 1))
        t, value = commit_mod.decommit(com, alpha, rng.child("open"),
                                       compiled=True, ldt_reps=2, cheat_value=lie)
        return t.accepted and value == lie

    k, dprime = params.k, params.d_prime
    envelope = (k * dprime + 2) / p
    margin = 3 * math.sqrt(envelope * (1 - envelope) / trials)
    return soundness_experiment("commitment binding (cheating decommit)", trial,
                                trials, envelope + margin + 2 * 2 * 2 / p)


def hiding_grid(seed=0, random_sets: int = 1000):
    """Exact perfect-hiding sweep: every query set below the threshold is
    independent of the committed values.  Zero tolerance."""
    master = DomainRNG(seed, "hiding")
    rows = []
    for p in (5, 7):
        field = prime_field(p)
        for gsize in (2, 3):
            for k in (1, 2):
                for m in (0, 1):
                    d_q = 1 if m else 0
                    G = enumerate_subset(field, gsize, name="G")
                    dprime = 2 * (gsize - 1)
                    checked = 0
                    bad = 0
                    if k == 1:
                        points = list(itertools.product(field.elements(), repeat=m + 1))
                        for size in range(1, gsize):
                            for Q in itertools.combinations(points, size):
                                ok, _ = aqc.independence_check(
                                    field, m, k, d_q, dprime, G, list(Q))
                                checked += 1
                                bad += 0 if ok else 1
                    else:
                        rng = master.child(f"{p}.{gsize}.{k}.{m}")
                        for _ in range(random_sets):
                            size = 1 + rng.randrange(gsize ** k - 1)
                            Q = [tuple(rng.field_element(field) for _ in range(m + k))
                                 for _ in range(size)]
                            ok, _ = aqc.independence_check(
                                field, m, k, d_q, dprime, G, Q)
                            checked += 1
                            bad += 0 if ok else 1
                    rows.append({
                        "label": f"F_{p} |G|={gsize} k={k} m={m}",
                        "checked": checked, "dependent": bad, "ok": bad == 0,
                    })
    return rows


def multilinear_attack(trials: int = 100, seed=0):
    """The one-query attack at d' = 1: the dependence witness exists and
    recovers the committed value on random commitments."""
    field = prime_field(5)
    G = enumerate_subset(field, 2, name="G")
    ok, witness = aqc.independence_check(field, 0, 1, 0, 1, G, [(field.inv(2),)])
    if ok:
        return [{"label": "2^-1 attack", "witness_found": False, "ok": False}]
    master = DomainRNG(seed, "attack")
    verified = 0
    from .sampler import sample_constrained_poly
    for i in range(trials):
        rng = master.child(str(i))
        a = rng.field_element(field)
        Z = sample_constrained_poly(field, (1,), [(PrefixQuery((), (G,)), a)], rng)
        rhs = 0
        for d_coef, q in zip(witness.d, witness.queries):
            rhs = field.add(rhs, field.mul(d_coef, Z.eval(q)))
        recovered = field.mul(field.inv(witness.c[0]), rhs)
        verified += 1 if recovered == a else 0
    return [{"label": "2^-1 attack (d'=1, one query)", "witness_found": True,
             "trials": trials, "verified": verified, "ok": verified == trials}]


def appendix_identities(trials: int = 1000, seed=0):
    """The closed-form summation identities against brute force; exact."""
    from .field import binary_field
    master = DomainRNG(seed, "identities")
    rows = []
    cases = [
        ("multilinear", prime_field(5), enumerate_subset(prime_field(5), 3), (1, 1, 1)),
        ("multilinear", prime_field(13), enumerate_subset(prime_field(13), 4), (1, 1)),
        ("multilinear", binary_field(3, 0b1011),
         enumerate_subset(binary_field(3, 0b1011), 3), (1, 1)),
        ("multiplicative", prime_field(7), subset_from(prime_field(7), (1, 2, 4), "H"), (2, 2)),
        ("multiplicative", prime_field(13), subset_from(prime_field(13), (1, 3, 9), "H"), (2, 2)),
        ("multiplicative", prime_field(11), subset_from(prime_field(11), (1, 10), "H"), (1, 1)),
        ("additive", binary_field(2, 0b111), enumerate_subset(binary_field(2, 0b111), 2), (1, 1)),
        ("additive", binary_field(3, 0b1011), enumerate_subset(binary_field(3, 0b1011), 2), (1, 1)),
        ("additive", binary_field(2, 0b111), enumerate_subset(binary_field(2, 0b111), 4), (3, 3)),
    ]
    fns = {"multilinear": aqc.multilinear_sum,
           "multiplicative": aqc.multiplicative_group_sum,
           "additive": aqc.additive_group_sum}
    for kind, field, H, bounds in cases:
        rng = master.child(f"{kind}.{field!r}.{len(H)}")
        mismatches = 0
        for _ in range(trials):
            P = sample_uniform_poly(field, bounds, rng)
            if fns[kind](P, H) != aqc.brute_force_sum(P, H):
                mismatches += 1
        rows.append({"label": f"{kind} over {field!r}, |H|={len(H)}",
                     "trials": trials, "mismatches": mismatches,
                     "ok": mismatches == 0})
    return rows


def _zk_scenario(field, poly, sc, params):
    """Real/simulated/broken samplers for one strong-ZK verifier scenario."""

    def real(i, challenge_fn=None, query_plan=None, final=True):
        rng = DomainRNG(("real", i), "zk8")
        prover = HonestStrongProver(poly, sc, params, rng.child("prover"),
                                    budget=params.query_bound)
        t, _c, _b = strong_zk_run(sc, params, prover, rng.child("verifier"),
                                  compiled=False, challenge_fn=challenge_fn,
                                  query_plan=query_plan, do_final_checks=final)
        return t

    def sim(i, challenge_fn=None, query_plan=None, final=True, offset=0):
        rng = DomainRNG(("sim", i, offset), "zk8")
        t, _c, _s = strong_zk_simulate(sc, params, poly.eval, rng,
                                       challenge_fn=challenge_fn,
                                       query_plan=query_plan,
                                       do_final_checks=final,
                                       budget=params.query_bound,
                                       mask_degree_offset=offset)
        return t

    return real, sim


def zk_structural(runs: int = 10_000, seed=0):
    """Exactly one F query per simulator run, always inside I^m, and all
    emitted oracle answers jointly satisfiable.  Zero tolerance."""
    field = prime_field(5)
    poly, sc, _ = inst.sumcheck_instance(field, 1, 1, 2, (seed, "poly"))
    params = inst.strong_params(field, 2, 2, 1)
    iset = params.I.as_set()
    bad = 0
    for i in range(runs):
        calls = []

        def F_query(pt):
            calls.append(pt)
            return poly.eval(pt)

        t, claim, sim = strong_zk_simulate(sc, params, F_query,
                                           DomainRNG((seed, i), "zk7"),
                                           budget=params.query_bound)
        if len(calls) != 1 or any(x not in iset for x in calls[0]):
            bad += 1
        elif not sim.answers_consistent():
            bad += 1
    return [{"label": "simulator query discipline", "runs": runs,
             "violations": bad, "ok": bad == 0}]


def zk_distributional(samples: int = 200_000, seed=0):
    """Two-sample view comparison at (F_5, m=1, d=1, |H|=2, k=1, lambda=2):
    honest verifier plus two scripted query-heavy verifiers, with the
    real-vs-real noise floor and the broken-simulator negative control."""
    field = prime_field(5)
    poly, sc, _ = inst.sumcheck_instance(field, 1, 1, 2, (seed, "poly"))
    params = inst.strong_params(field, 2, 2, 1)
    real, sim = _zk_scenario(field, poly, sc, params)

    # scripted deterministic verifiers: fixed challenges, one query to each
    # oracle placed adversarially (within the per-oracle budget of lambda^k)
    def challenges_a(label):
        table = {"rho1": 3, "rho2": 2}
        if label.startswith("p1.c"):
            return 4  # in I
        if label.startswith("p2.c"):
            return 1
        return table.get(label, 1)

    def plan_a(stage):
        if stage == "oracle":
            return [("Z", (0, 0)), ("A", (3,))]
        return []

    def challenges_b(label):
        table = {"rho1": 1, "rho2": 4}
        if label.startswith("p1.c"):
            return 2
        if label.startswith("p2.c"):
            return 0
        return table.get(label, 1)

    def plan_b(stage):
        if stage == "after_w":
            return [("Z", (2, 1))]
        if stage == "end":
            return [("A", (0,))]
        return []

    scenarios = [
        ("honest verifier", None, None, True),
        ("scripted A (early queries)", challenges_a, plan_a, False),
        ("scripted B (late queries)", challenges_b, plan_b, False),
    ]
    rows = []
    for idx, (label, cf, qp, final) in enumerate(scenarios):
        def real_s(i, idx=idx, cf=cf, qp=qp, final=final):
            return real((idx, i), cf, qp, final)

        def sim_s(i, idx=idx, cf=cf, qp=qp, final=final):
            return sim((idx, i), cf, qp, final)

        control = None
        if idx == 0:
            def control(i, idx=idx, cf=cf, qp=qp, final=final):
                return sim((idx, i, "broken"), cf, qp, final, offset=-1)

        rep = zk_test(label, real_s, sim_s, samples, control_sampler=control)
        rows.append(rep.row())
    return rows


def sampler_exactness(seed=0):
    """Exhaustive conditional-distribution equality at (F_3, m=1, d=1): for
    every constraint history, the sampler's conditional law (forced value, or
    uniform on independence) equals the brute-force conditional over all nine
    polynomials.  Exact, zero tolerance."""
    field = prime_field(3)
    H = enumerate_subset(field, 2)
    space_queries = [PrefixQuery.point((0,)), PrefixQuery.point((1,)),
                     PrefixQuery.point((2,)), PrefixQuery.over((), H, 1)]
    polys = [MultiPoly(field, (1,), [a, b]) for a in range(3) for b in range(3)]
    failures = 0
    histories = 0
    for ordering in itertools.permutations(range(len(space_queries)), 3):
        for values in itertools.product(range(3), repeat=3):
            history = [(space_queries[q], v) for q, v in zip(ordering, values)]
            for cut in range(3):
                prefix, (q, _v) = history[:cut], history[cut]
                surviving = [p for p in polys
                             if all(p.partial_sum(qq) == vv for qq, vv in prefix)]
                if not surviving:
                    continue
                histories += 1
                dist = {}
                for p in surviving:
                    val = p.partial_sum(q)
                    dist[val] = dist.get(val, 0) + 1
                cs = ConstraintSet(PolySpace(field, (1,)), DomainRNG(seed, "exact"))
                consistent = True
                try:
                    for qq, vv in prefix:
                        cs.constrain(qq, vv)
                except Exception:
                    consistent = False
                if not consistent:
                    failures += 1
                    continue
                forced, _res, _acc = cs.probe(q)
                if forced is not None:
                    # sampler returns the forced value with probability 1
                    if set(dist) != {forced}:
                        failures += 1
                else:
                    # sampler draws uniformly over the whole field; the
                    # exhaustive conditional must be uniform over all of F_3
                    counts = set(dist.values())
                    if set(dist) != {0, 1, 2} or len(counts) != 1:
                        failures += 1
    return [{"label": "sampler exactness (F_3, m=1, d=1)",
             "histories": histories, "failures": failures, "ok": failures == 0}]


def tqbf_agreement(count: int = 200, seed=0):
    """Random regular QBFs: protocol verdicts against brute-force truth; the
    satisfiable side must accept always, the false side is bounded by the
    (possibly vacuous) soundness envelope."""
    master = DomainRNG(seed, "tqbf")
    sat_total = sat_ok = 0
    false_total = false_accepts = 0
    envelope = None
    for i in range(count):
        phi = inst.random_regular_qbf((seed, i))
        p = fe.tqbf_prime(phi.n, phi.c, 4)
        circuit, _y, cinp = fe.tqbf_to_spce(phi, p)
        truth = fe.qbf_eval(phi)
        y_true = spc.value(circuit, cinp)
        assert y_true == (1 if truth else 0)
        envelope = (2 * circuit.d_in * circuit.d_lf
                    * (circuit.arity() + 2) * len(circuit.graph.vertices) / p)
        if truth:
            sat_total += 1
            t, ok = spc.spce_run(circuit, 1, cinp, master.child(f"h{i}"))
            sat_ok += 1 if ok else 0
        else:
            false_total += 1
            t, ok = spc.spce_run(circuit, 1, cinp, master.child(f"c{i}"),
                                 cheat=True)
            false_accepts += 1 if ok else 0
    false_rate = false_accepts / false_total if false_total else 0.0
    return [{
        "label": "TQBF end-to-end",
        "satisfiable": sat_total, "satisfiable_accepted": sat_ok,
        "false": false_total, "false_accepts": false_accepts,
        "false_rate": round(false_rate, 4),
        "envelope": round(min(envelope or 1.0, 1.0), 4),
        "ok": sat_ok == sat_total and false_rate <= min(envelope or 1.0, 1.0),
    }]


def gkr_recurrence(trials: int = 1000, seed=0):
    """The layer recurrence against gate-level evaluation on randomized
    2-3 layer circuits; exact."""
    field = prime_field(101)
    H = enumerate_subset(field, 2)
    failures = 0
    for i in range(trials):
        rng = DomainRNG((seed, i), "gkr")
        depth = 2 + rng.randrange(2)
        circuit = inst.random_layered((seed, i, "c"), depth, 2, 2)
        circuit.validate()
        x = [rng.field_element(field) for _ in range(2)]
        if not fe.layer_recurrence_holds(circuit, field, H, 1, 1, x):
            failures += 1
    return [{"label": "layer recurrence vs gate evaluation", "trials": trials,
             "failures": failures, "ok": failures == 0}]


def aqc_threshold_table(seed=0):
    """The query-threshold scan: parameters -> smallest dependent set size,
    compared with the |G|^k bound in the safe-degree regime."""
    rows = []
    master = DomainRNG(seed, "aqc-scan")
    grid = [
        (5, 0, 1, 0, 2, 2), (5, 0, 1, 0, 1, 2), (7, 0, 1, 0, 4, 3),
        (5, 1, 1, 1, 2, 2), (7, 0, 2, 0, 2, 2),
    ]
    for p, m, k, d, dprime, gsize in grid:
        field = prime_field(p)
        G = enumerate_subset(field, gsize, name="G")
        size, Q, witness = aqc.query_threshold_scan(
            field, m, k, d, dprime, G, rng=master.child(f"{p}{m}{k}{d}{dprime}"),
            random_sets=200)
        bound = gsize ** k
        safe = dprime >= 2 * (gsize - 1)
        ok = size >= bound if safe else size <= bound
        verified = witness.verify(
            field, PolySpace(field, (d,) * m + (dprime,) * k), G, k, 50,
            master.child(f"w{p}{m}{k}{d}{dprime}"))
        rows.append({
            "label": f"F_{p} m={m} k={k} d={d} d'={dprime} |G|={gsize}",
            "threshold": size, "bound": bound,
            "safe_regime": safe, "witness_verified": verified,
            "ok": ok and verified,
        })
    return rows


def spc_zk_distributional(samples: int = 20_000, seed=0):
    """Real-versus-simulated views of the PZK sum-product protocols on the
    tiny instance, honest verifier."""
    field = prime_field(101)
    circuit, cinp = inst.tiny_pzk_spc(field)
    y = spc.value(circuit, cinp)
    params = spc.pzk_params(circuit, k=1)

    def real_e(i):
        t, ok, _ = spc.pzk_spce_run(circuit, y, cinp, params,
                                    DomainRNG(("r", seed, i), "spczk"),
                                    compiled=False, ldt_reps=1)
        assert ok, t.reason
        return t

    def sim_e(i):
        t, ok, _o, _s = spc.pzk_spce_simulate(circuit, y, cinp, params,
                                              DomainRNG(("s", seed, i), "spczk"))
        assert ok, t.reason
        return t

    def broken_e(i):
        t, ok, _o, _s = spc.pzk_spce_simulate(circuit, y, cinp, params,
                                              DomainRNG(("b", seed, i), "spczk"),
                                              mask_degree_offset=-1)
        return t

    rows = [zk_test("pzk-spce tiny instance", real_e, sim_e, samples,
                    control_sampler=broken_e).row()]

    def real_s(i):
        t, ok, _ = spc.pzk_spcs_run(circuit, y, {}, cinp, params,
                                    DomainRNG(("rs", seed, i), "spczk"),
                                    compiled=False, ldt_reps=1)
        assert ok, t.reason
        return t

    def sim_s(i):
        t, ok, _o, _s = spc.pzk_spcs_simulate(circuit, y, {}, params,
                                              DomainRNG(("ss", seed, i), "spczk"))
        assert ok, t.reason
        return t

    rows.append(zk_test("pzk-spcs tiny instance", real_s, sim_s,
                        max(2000, samples // 10)).row())
    return rows


def witness_hiding_exact(seed=0, random_sets: int = 200):
    """PZK-SPCS witness hiding: sub-threshold query sets to a lifted leaf
    oracle are independent of the committed witness (exact rank check,
    G = H and d' = 2|H|)."""
    field = prime_field(101)
    H = enumerate_subset(field, 2)
    master = DomainRNG(seed, "whiding")
    bad = 0
    checked = 0
    # lifted leaf space: (d_lf,) * k_w + (2|H|,) * k with k_w = 1, k = 1
    for i in range(random_sets):
        rng = master.child(str(i))
        Q = [tuple(rng.field_element(field) for _ in range(2))]
        ok, _ = aqc.independence_check(field, 1, 1, 2, 2 * len(H), H, Q)
        checked += 1
        bad += 0 if ok else 1
    return [{"label": "lifted-witness hiding (single queries)",
             "checked": checked, "dependent": bad, "ok": bad == 0}]
