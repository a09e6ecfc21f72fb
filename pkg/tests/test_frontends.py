import itertools

import pytest

from zkipcp import frontends as fe
from zkipcp import spc
from zkipcp.errors import FieldTooSmall, WiringMismatch
from zkipcp.field import binary_field, enumerate_subset, prime_field, subset_from
from zkipcp.mpoly import grid
from zkipcp.rng import DomainRNG

F101 = prime_field(101)


# -- QBF ---------------------------------------------------------------------


def test_qbf_eval_brute_force():
    # forall x1 exists x2 (x1 or x2) and (not x1 or x2): true (x2 = 1 works)
    phi = fe.QBF(["A", "E"], [[1, 2], [-1, 2]])
    assert fe.qbf_eval(phi)
    # forall x1: x1 is false
    assert not fe.qbf_eval(fe.QBF(["A"], [[1]]))


def test_normalize_preserves_truth():
    rng = DomainRNG(1, "qbfnorm")
    for trial in range(120):
        n = 1 + rng.randrange(3)
        prefix = [("A", "E")[rng.randrange(2)] for _ in range(n)]
        clauses = []
        for _ in range(1 + rng.randrange(3)):
            width = 1 + rng.randrange(3)
            clause = []
            for _ in range(width):
                v = 1 + rng.randrange(n)
                clause.append(v if rng.randrange(2) else -v)
            clauses.append(clause)
        phi = fe.QBF(prefix, clauses)
        norm = fe.qbf_normalize(phi)
        assert fe.is_regular(norm)
        assert fe.qbf_eval(norm) == fe.qbf_eval(phi)


def test_normalize_idempotent_on_regular():
    phi = fe.QBF(["A", "E"], [[1, 2, 2], [-1, 2, 2]])
    assert fe.is_regular(phi)
    norm = fe.qbf_normalize(phi)
    assert norm.prefix == phi.prefix and norm.clauses == phi.clauses


def test_arithmetize_3cnf_cube_agreement():
    cl = [[1, 2]]
    f = fe.arithmetize_3cnf(cl, 2, F101)
    assert f.eval((0, 0)) == 0
    assert f.eval((1, 0)) == f.eval((0, 1)) == f.eval((1, 1)) == 1
    cl = [[1, 2], [-1, 2]]
    f = fe.arithmetize_3cnf(cl, 2, F101)
    for pt in itertools.product((0, 1), repeat=2):
        want = 1 if fe._clauses_value(cl, [bool(b) for b in pt]) else 0
        assert f.eval(pt) == want
    # empty clause list: constant 1
    assert fe.arithmetize_3cnf([], 1, F101).eval((7,)) == 1


def test_tqbf_prime():
    p = fe.tqbf_prime(2, 1, 4)
    assert fe.is_prime(p) if hasattr(fe, "is_prime") else True
    assert p >= 2 * 1 * 2 ** 3
    assert fe.tqbf_prime(2, 1, 4) == p  # deterministic


def test_tqbf_to_spce_truth():
    phi = fe.QBF(["A", "E"], [[1, 2, 2], [-1, 2, 2]])
    circuit, y, inp = fe.tqbf_to_spce(phi, 101)
    assert spc.validate(circuit) == []
    assert y == 1
    assert spc.value(circuit, inp) == 1
    # a false formula: forall x1 exists (dummy): x1
    false_phi = fe.QBF(["A"], [[1]])
    circuit, y, inp = fe.tqbf_to_spce(false_phi, 101)
    assert spc.value(circuit, inp) == 0


def test_tqbf_induction_identity():
    """The vertex values reproduce the quantified tail on boolean prefixes."""
    phi = fe.QBF(["A", "E", "A", "E"],
                 [[1, 2, 3], [-2, 4, 4], [1, -3, 4]])
    circuit, y, inp = fe.tqbf_to_spce(phi, 101)
    n = 4

    def tail_value(i, prefix_bits):
        # evaluates Q_{i+1} x_{i+1} ... Q_n x_n  phi(prefix, ...)
        def rec(j, assignment):
            if j == n:
                return 1 if fe._clauses_value(phi.clauses, assignment) else 0
            a0 = rec(j + 1, assignment + [False])
            a1 = rec(j + 1, assignment + [True])
            return a0 * a1 if phi.prefix[j] == "A" else 1 - (1 - a0) * (1 - a1)
        return rec(i, [bool(b) for b in prefix_bits])

    cache = {}
    for i in range(0, n + 1, 2):
        for bits in itertools.product((0, 1), repeat=i):
            got = spc.lde_value(circuit, inp, f"v{i}", bits, cache)
            assert got == tail_value(i, bits)


def test_tqbf_end_to_end_protocol():
    rng = DomainRNG(2, "tqbfproto")
    phi = fe.QBF(["A", "E"], [[1, 2, 2], [-1, 2, 2]])
    p = fe.tqbf_prime(phi.n, phi.c, 4)
    circuit, y, inp = fe.tqbf_to_spce(phi, p)
    t, ok = spc.spce_run(circuit, y, inp, rng)
    assert ok, t.reason


# -- layered circuits ----------------------------------------------------------


def _random_layered(rng, depth, width, n, field):
    layers = []
    for i in range(depth):
        w = 1 if i == 0 else width
        below = n if i == depth - 1 else width
        gates = []
        for _ in range(w):
            op = ("add", "mult")[rng.randrange(2)]
            gates.append((op, rng.randrange(below), rng.randrange(below)))
        layers.append(gates)
    return fe.LayeredCircuit(layers, n)


def test_layered_eval_one_gate():
    c = fe.LayeredCircuit([[("mult", 0, 1)]], 2)
    c.validate()
    f5 = prime_field(5)
    tables = fe.eval_layers(c, f5, (2, 3))
    assert tables[0] == [1]


def test_layer_recurrence_randomized():
    rng = DomainRNG(3, "gkrrec")
    H = enumerate_subset(F101, 2)
    for i in range(60):
        depth = 2 + rng.randrange(2)
        circuit = _random_layered(rng.child(str(i)), depth, 2, 2, F101)
        circuit.validate()
        x = [rng.field_element(F101) for _ in range(2)]
        assert fe.layer_recurrence_holds(circuit, F101, H, 1, 1, x)


def test_layered_to_spc_value():
    c = fe.LayeredCircuit([[("mult", 0, 1)]], 2)
    H = enumerate_subset(prime_field(5), 2)
    f5 = prime_field(5)
    wiring = fe.exact_wiring_ldes(c, f5, H, 1, 1)
    sub, inputs = fe.layered_to_spc(c, f5, wiring, H, 1, 1)
    assert spc.validate(sub) == []
    # subcircuit value at x = (2, 3) equals C(x) = 1
    val = spc.lde_value(sub, inputs, "v0", (2, 3))
    assert val == 1
    # hard-code the input: root arity drops to 0 and the value is preserved
    closed, closed_inputs = fe.hardcode_input(sub, inputs, (2, 3))
    assert closed.graph.arity("v0") == 0
    assert spc.validate(closed) == []
    assert spc.value(closed, closed_inputs) == 1


def test_layered_to_spc_deeper_and_protocol():
    rng = DomainRNG(4, "gkrdeep")
    c = fe.LayeredCircuit(
        [[("add", 0, 1)], [("mult", 0, 1), ("add", 0, 1)]], 2)
    c.validate()
    H = enumerate_subset(F101, 2)
    wiring = fe.exact_wiring_ldes(c, F101, H, 1, 1)
    sub, inputs = fe.layered_to_spc(c, F101, wiring, H, 1, 1)
    for i in range(5):
        x = [rng.field_element(F101) for _ in range(2)]
        tables = fe.eval_layers(c, F101, x)
        closed, closed_inputs = fe.hardcode_input(sub, inputs, x)
        assert spc.value(closed, closed_inputs) == tables[0][0]
        t, ok = spc.spce_run(closed, tables[0][0], closed_inputs, rng.child(str(i)))
        assert ok, t.reason


def test_corrupt_wiring_off_grid_accepted_on_grid_rejected():
    c = fe.LayeredCircuit([[("mult", 0, 1)]], 2)
    f5 = prime_field(5)
    H = enumerate_subset(f5, 2)
    wiring = fe.exact_wiring_ldes(c, f5, H, 1, 1)
    # off-grid-only corruption: add a multiple of the vanishing polynomial
    from zkipcp.mpoly import MultiPoly
    key = ("add", 1)
    poly = wiring[key]
    bump = MultiPoly(f5, (2, 0, 0))
    bump.set((2, 0, 0), 1)
    bump.set((1, 0, 0), f5.neg(1))  # X^2 - X vanishes on {0,1}
    wiring_off = dict(wiring)
    wiring_off[key] = poly.add(bump)
    sub, _ = fe.layered_to_spc(c, f5, wiring_off, H, 1, 1)  # accepted
    # on-grid corruption must be rejected
    wiring_bad = dict(wiring)
    bad = poly.copy()
    bad.set((0, 0, 0), f5.add(bad.get((0, 0, 0)), 1))
    wiring_bad[key] = bad
    with pytest.raises(WiringMismatch):
        fe.layered_to_spc(c, f5, wiring_bad, H, 1, 1)


# -- oracle 3-SAT ----------------------------------------------------------------


GF64 = binary_field(6, 0b1011011)


def _o3sat_field():
    H = subset_from(GF64, GF64.subfield_elements(3), "H")
    return GF64, H


def _toy_instance(kind="sat"):
    # r = s = 3; B depends on the first witness value a1 (var index r+3s = 12)
    a1 = ("var", 12)
    if kind == "sat":
        formula = a1  # satisfied by A = all-ones
    else:
        formula = ("const", 0)  # never satisfiable
    return fe.O3SATInstance(3, 3, formula)


def test_o3sat_check_brute_force():
    inst = _toy_instance("sat")
    A_good = {bits: 1 for bits in itertools.product((0, 1), repeat=3)}
    A_bad = dict(A_good)
    A_bad[(0, 0, 0)] = 0
    assert fe.o3sat_check(inst, A_good)
    assert not fe.o3sat_check(inst, A_bad)


def test_arithmetize_negation_convention():
    inst = _toy_instance("sat")
    field, H = _o3sat_field()
    bhat = fe.arithmetize_negation(inst.formula, field, inst.nvars())
    for pt in itertools.product((0, 1), repeat=inst.nvars()):
        want = 1 - fe.bool_eval(inst.formula, list(pt))
        assert bhat.eval(pt) == want


def test_o3sat_requires_large_subfield():
    field, _ = _o3sat_field()
    small = subset_from(field, field.subfield_elements(1), "H")
    with pytest.raises(FieldTooSmall):
        fe.o3sat_to_spcs(_toy_instance(), field, small, (0,) * 12, (0,) * 12)


def test_o3sat_satisfiable_value_zero():
    field, H = _o3sat_field()
    inst = _toy_instance("sat")
    A = {bits: 1 for bits in itertools.product((0, 1), repeat=3)}
    rng = DomainRNG(5, "o3sat")
    witness = fe.o3sat_witness(inst, A, field, H)
    for i in range(5):
        x = [rng.field_element(field) for _ in range(12)]
        y = [rng.field_element(field) for _ in range(12)]
        circuit, target, _ = fe.o3sat_to_spcs(inst, field, H, x, y)
        assert spc.validate(circuit) == []
        assert spc.value(circuit, witness) == target == 0


def test_o3sat_unsat_rarely_zero():
    field, H = _o3sat_field()
    inst = _toy_instance("unsat")
    A = {bits: 1 for bits in itertools.product((0, 1), repeat=3)}
    witness = fe.o3sat_witness(inst, A, field, H)
    rng = DomainRNG(6, "o3satunsat")
    zeros = 0
    trials = 150
    for i in range(trials):
        x = [rng.field_element(field) for _ in range(12)]
        y = [rng.field_element(field) for _ in range(12)]
        circuit, target, _ = fe.o3sat_to_spcs(inst, field, H, x, y)
        if spc.value(circuit, witness) == 0:
            zeros += 1
    bound = (inst.r + 3 * inst.s) / field.order  # 12/64
    assert zeros / trials <= bound + 3 * (bound / trials) ** 0.5 + 0.02


def test_o3sat_nonboolean_witness_caught():
    field, H = _o3sat_field()
    inst = _toy_instance("sat")
    A = {bits: 1 for bits in itertools.product((0, 1), repeat=3)}
    witness = fe.o3sat_witness(inst, A, field, H)
    # plant a non-boolean value on the witness grid
    bad = witness["u"].copy()
    bad.coeffs[0] = field.add(bad.coeffs[0], field.element(5))
    rng = DomainRNG(7, "plant")
    zeros = 0
    trials = 150
    for i in range(trials):
        x = [rng.field_element(field) for _ in range(12)]
        y = [rng.field_element(field) for _ in range(12)]
        circuit, target, _ = fe.o3sat_to_spcs(inst, field, H, x, y)
        if spc.value(circuit, {"u": bad}) == 0:
            zeros += 1
    bound = (inst.r + 3 * inst.s) / field.order
    assert zeros / trials <= bound + 3 * (bound / trials) ** 0.5 + 0.02


def test_o3sat_spcs_protocol():
    field, H = _o3sat_field()
    inst = _toy_instance("sat")
    A = {bits: 1 for bits in itertools.product((0, 1), repeat=3)}
    witness = fe.o3sat_witness(inst, A, field, H)
    rng = DomainRNG(8, "o3satproto")
    x = [rng.field_element(field) for _ in range(12)]
    y = [rng.field_element(field) for _ in range(12)]
    circuit, target, _ = fe.o3sat_to_spcs(inst, field, H, x, y)
    t, ok = spc.spcs_run(circuit, target, {}, witness, rng.child("run"),
                         compiled=False)
    assert ok, t.reason
