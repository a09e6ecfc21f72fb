import pytest

from zkipcp import circuit as ac
from zkipcp import spc
from zkipcp.field import enumerate_subset, prime_field
from zkipcp.mpoly import MultiPoly, PrefixQuery, grid, sample_uniform_poly
from zkipcp.rng import DomainRNG

F101 = prime_field(101)
F17 = prime_field(17)


def gkr_one_gate(field, a, b, op="mult"):
    """A 3-vertex circuit: root sums over two H-bits selecting the inputs of a
    single add/mult gate; value equals the gate output."""
    H = enumerate_subset(field, 2)
    g = spc.AriGraph(
        ["root", "leaf"],
        [spc.Edge("root", "leaf", (), (1,)), spc.Edge("root", "leaf", (), (2,))],
        "root",
    )
    # combiner: (1-Y1)*Y2 * (Z1 op Z2) picks (beta1, beta2) = (0, 1)
    y1, y2 = ac.var(0), ac.var(1)
    z1, z2 = ac.var(2), ac.var(3)
    sel = ac.mul(ac.add(ac.const(1), ac.mul(ac.const(field.neg(1)), y1)), y2)
    inner = ac.mul(z1, z2) if op == "mult" else ac.add(z1, z2)
    comb = ac.ArithCircuit(field, 4, ac.mul(sel, inner))
    circuit = spc.SumProductCircuit(field, H, 4, max(2, len(H)), g,
                                    {"root": comb})
    leaf = MultiPoly(field, (1,))
    leaf.set((0,), a)
    leaf.set((1,), field.sub(b, a))  # linear poly with f(0)=a, f(1)=b
    return circuit, {"leaf": leaf}


def test_validate_ok_and_diagnostics():
    circuit, inp = gkr_one_gate(prime_field(5), 2, 3)
    assert spc.validate(circuit) == []
    # mismatched incoming widths
    g = spc.AriGraph(
        ["r", "u"],
        [spc.Edge("r", "u", (), (1,)), spc.Edge("r", "u", (), (1, 2))],
        "r",
    )
    bad = spc.SumProductCircuit(prime_field(5), enumerate_subset(prime_field(5), 2),
                                4, 2, g, {"r": circuit.combiners["root"]})
    diags = spc.validate(bad)
    assert any("arity clause (1)" in d for d in diags)


def test_cyclic_graph_diagnosed():
    g = spc.AriGraph(["r", "u"],
                     [spc.Edge("r", "u", (), (1,)), spc.Edge("u", "r", (), (1,))],
                     "r")
    f5 = prime_field(5)
    bad = spc.SumProductCircuit(f5, enumerate_subset(f5, 2), 4, 2, g, {})
    diags = spc.validate(bad)
    assert any("acyclicity" in d or "root" in d for d in diags)


def test_one_gate_value():
    f5 = prime_field(5)
    circuit, inp = gkr_one_gate(f5, 2, 3, "mult")
    assert spc.value(circuit, inp) == 1  # 2*3 mod 5
    circuit, inp = gkr_one_gate(f5, 2, 3, "add")
    assert spc.value(circuit, inp) == 0  # 2+3 mod 5


def test_single_leaf_value_poly():
    f5 = prime_field(5)
    circuit, inp = gkr_one_gate(f5, 2, 3)
    poly = spc.vertex_value_poly(circuit, inp, "leaf")
    assert poly == inp["leaf"]


def test_lde_value_agrees_on_grid_and_off():
    circuit, inp = gkr_one_gate(F101, 7, 9)
    cache = {}
    root_val = spc.value(circuit, inp)
    assert spc.lde_value(circuit, inp, "root", (), cache) == root_val
    # leaf: lde_value is the leaf polynomial itself
    assert spc.lde_value(circuit, inp, "leaf", (42,), cache) == inp["leaf"].eval((42,))


def test_value_poly_matches_grid_table():
    circuit, inp = gkr_one_gate(F101, 7, 9)
    table = spc.vertex_grid_table(circuit, inp, "root", {})
    poly = spc.vertex_value_poly(circuit, inp, "root", {})
    assert table[0] == poly.coeffs[0]


def test_spce_completeness_one_gate():
    rng = DomainRNG(1, "spce1")
    for i in range(20):
        a, b = rng.randrange(101), rng.randrange(101)
        circuit, inp = gkr_one_gate(F101, a, b)
        y = spc.value(circuit, inp)
        t, ok = spc.spce_run(circuit, y, inp, rng.child(str(i)))
        assert ok, t.reason


def test_spce_rejects_false_value_mostly():
    rng = DomainRNG(2, "spce2")
    wins = 0
    trials = 300
    for i in range(trials):
        circuit, inp = gkr_one_gate(F101, 3, 4)
        y = spc.value(circuit, inp)
        t, ok = spc.spce_run(circuit, F101.add(y, 1), inp, rng.child(str(i)),
                             cheat=True)
        wins += 1 if ok else 0
    envelope = 2 * 4 * circuit.d_lf * 2 * 1 / 101  # d_in*d_lf*arity*|V| flavor
    assert wins / trials <= max(envelope, 0.35)


def _deep_circuit(field, depth=2):
    """Chain of `depth` internal vertices over arity-1 free vars, leaf at the
    end; exercises label batching with in-degree 2."""
    H = enumerate_subset(field, 2)
    vertices = [f"v{i}" for i in range(depth)] + ["leaf"]
    edges = []
    for i in range(depth - 1):
        edges.append(spc.Edge(f"v{i}", f"v{i+1}", (), (1,)))
        edges.append(spc.Edge(f"v{i}", f"v{i+1}", (), (2,)))
    edges.append(spc.Edge(f"v{depth-1}", "leaf", (), (1,)))
    edges.append(spc.Edge(f"v{depth-1}", "leaf", (), (2,)))
    combs = {}
    for i in range(depth):
        if i == 0:  # root has arity 0: variables (Y1, Y2, Z1, Z2)
            y1, y2, z1, z2 = ac.var(0), ac.var(1), ac.var(2), ac.var(3)
            node = ac.add(ac.mul(y1, z1), ac.mul(y2, ac.mul(z2, z2)))
            combs[f"v{i}"] = ac.ArithCircuit(field, 4, node)
        else:  # arity 1: variables (X1, Y1, Y2, Z1, Z2)
            x1, y1, y2 = ac.var(0), ac.var(1), ac.var(2)
            z1, z2 = ac.var(3), ac.var(4)
            node = ac.add(ac.mul(x1, ac.mul(y1, z1)), ac.mul(y2, ac.mul(z2, z2)))
            combs[f"v{i}"] = ac.ArithCircuit(field, 5, node)
    circuit = spc.SumProductCircuit(field, H, 3, 2, spc.AriGraph(vertices, edges, "v0"), combs)
    leaf = MultiPoly(field, (2,))
    leaf.set((0,), 3)
    leaf.set((2,), 2)
    return circuit, {"leaf": leaf}


def test_spce_deep_circuit_and_label_growth():
    rng = DomainRNG(3, "deep")
    circuit, inp = _deep_circuit(F101, 3)
    assert spc.validate(circuit) == []
    y = spc.value(circuit, inp)
    t, ok = spc.spce_run(circuit, y, inp, rng)
    assert ok, t.reason
    # in-degrees bound label growth: v1, v2 have in-degree 2
    g = circuit.graph
    for v in g.vertices:
        assert len(g.in_edges[v]) <= 2


def test_spcs_completeness_and_curve():
    rng = DomainRNG(4, "spcs")
    circuit, inp = _deep_circuit(F101, 2)
    y = spc.value(circuit, inp)
    # treat the leaf as auxiliary witness
    for i in range(10):
        t, ok = spc.spcs_run(circuit, y, {}, inp, rng.child(str(i)),
                             compiled=(i % 2 == 0), ldt_reps=2)
        assert ok, t.reason
        if len([e for e in t.entries if e[1].endswith(".curve")]):
            break


def test_spcs_forged_composition_caught():
    rng = DomainRNG(5, "forge")
    circuit, inp = _deep_circuit(F101, 2)
    y = spc.value(circuit, inp)
    forged = MultiPoly(F101, (2,))
    forged.set((0,), 9)
    forged.set((2,), 11)
    caught = 0
    trials = 60
    for i in range(trials):
        t, ok = spc.spcs_run(circuit, y, {}, inp, rng.child(str(i)),
                             compiled=False, forged_witness={"leaf": forged})
        caught += 0 if ok else 1
    assert caught >= trials * 0.8


def test_spcs_unsatisfiable_cheat_rate():
    rng = DomainRNG(6, "unsat")
    circuit, inp = _deep_circuit(F101, 2)
    y_true = spc.value(circuit, inp)
    wins = 0
    trials = 200
    for i in range(trials):
        t, ok = spc.spcs_run(circuit, F101.add(y_true, 3), {}, inp,
                             rng.child(str(i)), compiled=False, cheat=True)
        wins += 1 if ok else 0
    envelope = (2 * circuit.d_in * circuit.d_lf * 2 *
                len(circuit.graph.edges)) / 101
    assert wins / trials <= min(1.0, envelope) + 0.1


# -- PZK variants -------------------------------------------------------------


def _tiny_pzk_circuit(field):
    """Single internal root over one summation variable and a leaf; small
    lambda so the inner strong-ZK spaces stay in budget."""
    H = enumerate_subset(field, 2)
    g = spc.AriGraph(["root", "leaf"],
                     [spc.Edge("root", "leaf", (), (1,))], "root")
    z = ac.var(1)  # combiner C(Y1, Z1) = Z1 (degree 1)
    comb = ac.ArithCircuit(field, 2, z)
    circuit = spc.SumProductCircuit(field, H, 1, 2, g, {"root": comb})
    leaf = MultiPoly(field, (2,))
    leaf.set((1,), 3)
    leaf.set((2,), 1)
    return circuit, {"leaf": leaf}


def test_pzk_params_derivation():
    circuit, _ = _tiny_pzk_circuit(F17)
    params = spc.pzk_params(circuit, k=1)
    # lambda = 2 * d_in * (d_lf + max-in-degree) = 2 * 1 * (2 + 1) = 6
    assert params.lam == 6 and len(params.G) == 6 and 0 in params.G.as_set()
    assert params.query_bound == 6


def test_pzk_spce_completeness():
    rng = DomainRNG(7, "pzk")
    circuit, inp = _tiny_pzk_circuit(F101)
    y = spc.value(circuit, inp)
    params = spc.pzk_params(circuit, k=1)
    for i in range(5):
        t, ok, _ = spc.pzk_spce_run(circuit, y, inp, params, rng.child(str(i)),
                                    compiled=(i % 2 == 0), ldt_reps=1)
        assert ok, t.reason


def test_pzk_spce_simulator_matches_and_accepts():
    rng = DomainRNG(8, "pzksim")
    circuit, inp = _tiny_pzk_circuit(F101)
    y = spc.value(circuit, inp)
    params = spc.pzk_params(circuit, k=1)
    for i in range(5):
        t, ok, oracles, subs = spc.pzk_spce_simulate(circuit, y, inp, params,
                                                     rng.child(str(i)))
        assert ok, t.reason
        assert all(len(s.f_queries) == 1 for s in subs)
        for s in subs:
            assert all(x in params.I.as_set() for x in s.f_queries[0])


def test_pzk_spce_view_structure_matches_real():
    rng = DomainRNG(9, "pzkview")
    circuit, inp = _tiny_pzk_circuit(F101)
    y = spc.value(circuit, inp)
    params = spc.pzk_params(circuit, k=1)
    tr, okr, _ = spc.pzk_spce_run(circuit, y, inp, params, rng.child("r"),
                                  compiled=False, ldt_reps=1)
    ts, oks, _, _ = spc.pzk_spce_simulate(circuit, y, inp, params, rng.child("s"))
    assert okr and oks
    labels_r = [(e[0], e[1]) for e in tr.view_entries()]
    labels_s = [(e[0], e[1]) for e in ts.view_entries()]
    assert labels_r == labels_s


def test_pzk_spcs_round_trip_and_completeness():
    rng = DomainRNG(10, "pzkspcs")
    circuit, inp = _tiny_pzk_circuit(F101)
    y = spc.value(circuit, inp)
    params = spc.pzk_params(circuit, k=1)
    circuit2, new_leaves, lift = spc.pzk_spcs_transform(circuit, {}, params)
    assert len(circuit2.graph.vertices) <= 2 * len(circuit.graph.vertices)
    lifted = lift(inp, rng.child("lift"))
    # lifted leaf sums back to the witness over H^k
    vw = new_leaves["leaf"]
    zp = lifted[vw]
    H = circuit.H
    for i in range(30):
        alpha = rng.child(f"a{i}").field_element(F101)
        s = zp.partial_sum(PrefixQuery((alpha,), (H,) * params.k))
        assert s == inp["leaf"].eval((alpha,))
    # value preservation through the transform
    full2 = dict(lifted)
    assert spc.value(circuit2, full2) == y
    for i in range(3):
        t, ok, _ = spc.pzk_spcs_run(circuit, y, {}, inp, params,
                                    rng.child(f"run{i}"), compiled=False)
        assert ok, t.reason


def test_pzk_spcs_simulator():
    rng = DomainRNG(11, "pzkspcssim")
    circuit, inp = _tiny_pzk_circuit(F101)
    y = spc.value(circuit, inp)
    params = spc.pzk_params(circuit, k=1)
    for i in range(3):
        t, ok, _, subs = spc.pzk_spcs_simulate(circuit, y, {}, params,
                                               rng.child(str(i)))
        assert ok, t.reason
        assert all(len(s.f_queries) == 1 for s in subs)


def _chain_pzk_circuit(field):
    """root -> mid -> leaf with in-degree 1 everywhere; the value revealed for
    the internal child `mid` is mask-protected."""
    H = enumerate_subset(field, 2)
    g = spc.AriGraph(
        ["root", "mid", "leaf"],
        [spc.Edge("root", "mid", (), (1,)), spc.Edge("mid", "leaf", (1,), ())],
        "root")
    comb_root = ac.ArithCircuit(field, 2, ac.var(1))  # C(Y1, Z1) = Z1
    comb_mid = ac.ArithCircuit(field, 2, ac.var(1))   # C(X1, Z1) = Z1 (mu = 0)
    circuit = spc.SumProductCircuit(field, H, 1, 2, g,
                                    {"root": comb_root, "mid": comb_mid})
    leaf = MultiPoly(field, (2,))
    leaf.set((1,), 3)
    leaf.set((2,), 1)
    return circuit, {"leaf": leaf}


def test_revealed_values_uniform():
    """The value revealed for an internal child is uniform in F (chi-square):
    randomized LDEs are fresh-uniform off the grid."""
    circuit, inp = _chain_pzk_circuit(F17)
    assert spc.validate(circuit) == []
    y = spc.value(circuit, inp)
    params = spc.pzk_params(circuit, k=1)
    counts = [0] * 17
    n = 3000
    master = DomainRNG(12, "huniform")
    for i in range(n):
        t, ok, _ = spc.pzk_spce_run(circuit, y, inp, params, master.child(str(i)),
                                    compiled=False, ldt_reps=1)
        assert ok, t.reason
        h = next(e[2] for e in t.entries if e[1] == "root.h")
        counts[h[0]] += 1
    expected = n / 17
    chi2 = sum((c - expected) ** 2 / expected for c in counts)
    assert chi2 < 16 + 4 * (2 * 16) ** 0.5  # 16 dof, ~4 sigma
