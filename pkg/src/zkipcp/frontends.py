"""Reductions into the sum-product framework: quantified boolean formulas via
Shen-style arithmetization, layered arithmetic circuits via wiring-predicate
extensions, and oracle-3SAT via the two-vertex satisfaction circuit."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Sequence

from . import circuit as ac
from .errors import FieldTooSmall, NotPrime, WiringMismatch, ZkipcpError
from .field import Field, SubsetSpec, enumerate_subset, is_prime, prime_field, subset_from
from .mpoly import MultiPoly, grid, lagrange_weights, lde
from .spc import AriGraph, Edge, SumProductCircuit


# -- quantified boolean formulas ----------------------------------------------------


@dataclass
class QBF:
    """prefix: one of 'A' (forall) / 'E' (exists) per variable; matrix: CNF
    clauses as signed 1-based literals, at most 3 per clause."""

    prefix: list
    clauses: list

    @property
    def n(self) -> int:
        return len(self.prefix)

    @property
    def c(self) -> int:
        return len(self.clauses)

    def doc(self) -> dict:
        return {"prefix": list(self.prefix), "clauses": [list(c) for c in self.clauses]}

    @staticmethod
    def from_doc(doc: dict) -> "QBF":
        return QBF(list(doc["prefix"]), [list(c) for c in doc["clauses"]])


def _clauses_value(clauses, assignment) -> bool:
    for clause in clauses:
        ok = False
        for lit in clause:
            v = assignment[abs(lit) - 1]
            if (lit > 0 and v) or (lit < 0 and not v):
                ok = True
                break
        if not ok:
            return False
    return True


def qbf_eval(phi: QBF) -> bool:
    """Brute-force truth of the quantified formula."""

    def rec(i, assignment):
        if i == phi.n:
            return _clauses_value(phi.clauses, assignment)
        branches = (rec(i + 1, assignment + [False]), rec(i + 1, assignment + [True]))
        return all(branches) if phi.prefix[i] == "A" else any(branches)

    return rec(0, [])


def qbf_normalize(phi: QBF) -> QBF:
    """Regular form: strictly alternating prefix starting with 'A', even
    variable count, exactly-3-literal clauses.  Dummy variables are quantified
    harmlessly and never referenced, so truth is preserved."""
    prefix = []
    mapping = {}  # old var -> new var
    next_old = 0
    for q in phi.prefix:
        expected = "A" if len(prefix) % 2 == 0 else "E"
        while q != expected:
            prefix.append(expected)  # dummy slot
            expected = "A" if len(prefix) % 2 == 0 else "E"
        mapping[next_old] = len(prefix)
        prefix.append(q)
        next_old += 1
    if len(prefix) % 2 == 1:
        prefix.append("E" if prefix[-1] == "A" else "A")
    clauses = []
    for clause in phi.clauses:
        lits = [int(math.copysign(mapping[abs(l) - 1] + 1, l)) for l in clause]
        while len(lits) < 3:
            lits.append(lits[-1])
        if len(lits) > 3:
            raise ZkipcpError("clauses must have at most 3 literals")
        clauses.append(lits)
    if not clauses:
        # an empty matrix is true; encode as a tautological clause on x1
        clauses = [[1, -1, 1]]
        if not prefix:
            prefix = ["A", "E"]
    return QBF(prefix, clauses)


def is_regular(phi: QBF) -> bool:
    if phi.n % 2 == 1 or phi.n == 0:
        return False
    for i, q in enumerate(phi.prefix):
        if q != ("A" if i % 2 == 0 else "E"):
            return False
    return all(len(c) == 3 for c in phi.clauses)


def arithmetize_3cnf(clauses, nvars: int, field: Field) -> ac.ArithCircuit:
    """Product-of-clauses polynomial agreeing with the CNF on the cube:
    prod over clauses of (1 - prod (1 - Z_i) * prod Z_j)."""
    factors = []
    for clause in clauses:
        miss = []
        for lit in clause:
            v = ac.var(abs(lit) - 1)
            if lit > 0:
                miss.append(ac.add(ac.const(1), ac.mul(ac.const(field.neg(1)), v)))
            else:
                miss.append(v)
        inner = ac.mul_many(miss)
        factors.append(ac.add(ac.const(1), ac.mul(ac.const(field.neg(1)), inner)))
    node = ac.mul_many(factors) if factors else ac.const(1)
    return ac.ArithCircuit(field, nvars, node)


def tqbf_prime(n: int, c: int, query_bound: int) -> int:
    """Smallest prime in [c*n^3*log2(b), 2*c*n^3*log2(b)], by trial division."""
    low = max(2, c * n ** 3 * max(1, math.ceil(math.log2(max(2, query_bound)))))
    p = low
    while not is_prime(p):
        p += 1
    return p


def tqbf_to_spce(phi: QBF, p: int):
    """The chain circuit whose root value is 1 exactly when the (regular-form)
    formula is true: paired edges carry the two quantifier branches, combiners
    weight them by (1-Y1)*Y2 and apply AND / OR arithmetization."""
    if not is_prime(p):
        raise NotPrime(f"{p} is not prime")
    if not is_regular(phi):
        phi = qbf_normalize(phi)
    field = prime_field(p)
    n, c = phi.n, phi.c
    H = enumerate_subset(field, 2)
    vertices = [f"v{i}" for i in range(n + 1)]
    edges = []
    for i in range(n):
        sigma = tuple(range(1, i + 1))
        edges.append(Edge(f"v{i}", f"v{i+1}", sigma, (1,)))
        edges.append(Edge(f"v{i}", f"v{i+1}", sigma, (2,)))
    combiners = {}
    for i in range(n):
        k = i  # arity of v_i
        y1, y2 = ac.var(k), ac.var(k + 1)
        z, zp = ac.var(k + 2), ac.var(k + 3)
        weight = ac.mul(ac.add(ac.const(1), ac.mul(ac.const(field.neg(1)), y1)), y2)
        if i % 2 == 0:  # forall: product
            inner = ac.mul(z, zp)
        else:  # exists: 1 - (1-Z)(1-Z')
            one_minus = lambda t: ac.add(ac.const(1), ac.mul(ac.const(field.neg(1)), t))
            inner = one_minus(ac.mul(one_minus(z), one_minus(zp)))
        combiners[f"v{i}"] = ac.ArithCircuit(field, k + 4, ac.mul(weight, inner))
    graph = AriGraph(vertices, edges, "v0")
    circuit = SumProductCircuit(field, H, 4, max(3 * c, 2), graph, combiners)
    matrix = arithmetize_3cnf(phi.clauses, n, field)
    return circuit, 1, {f"v{n}": matrix}


# -- layered arithmetic circuits (GKR-style) ------------------------------------------


@dataclass
class LayeredCircuit:
    """layers[i] is the gate list of layer i (i = 0..D-1), each gate a triple
    (op, left, right) with children indexing layer i+1; layer D is the input,
    of width n.  Layer 0 has exactly one gate."""

    layers: list
    n: int

    @property
    def depth(self) -> int:
        return len(self.layers)

    def width(self, i: int) -> int:
        if i == self.depth:
            return self.n
        return len(self.layers[i])

    def validate(self):
        if len(self.layers[0]) != 1:
            raise ZkipcpError("layer 0 must have a single gate")
        for i, gates in enumerate(self.layers):
            below = self.width(i + 1)
            for op, l, r in gates:
                if op not in ("add", "mult"):
                    raise ZkipcpError(f"unknown gate op {op!r}")
                if not (0 <= l < below and 0 <= r < below):
                    raise ZkipcpError(f"gate child out of range in layer {i}")

    def doc(self) -> dict:
        return {"n": self.n, "layers": [[[op, l, r] for op, l, r in g] for g in self.layers]}

    @staticmethod
    def from_doc(doc: dict) -> "LayeredCircuit":
        return LayeredCircuit([[(op, l, r) for op, l, r in g] for g in doc["layers"]],
                              int(doc["n"]))


def eval_layers(circuit: LayeredCircuit, field: Field, x: Sequence[int]) -> list:
    """Gate-by-gate evaluation; returns the value table of every layer,
    index 0 = output layer."""
    tables = [None] * (circuit.depth + 1)
    tables[circuit.depth] = list(x)
    for i in range(circuit.depth - 1, -1, -1):
        below = tables[i + 1]
        row = []
        for op, l, r in circuit.layers[i]:
            if op == "add":
                row.append(field.add(below[l], below[r]))
            else:
                row.append(field.mul(below[l], below[r]))
        tables[i] = row
    return tables


def wiring_tables(circuit: LayeredCircuit, H: SubsetSpec, m: int, mprime: int):
    """Boolean grid tables of the wiring predicates add_i / mult_i for
    i = 1..D, over H^m x H^m x H^m (H^m x H^m' x H^m' for the input layer)."""
    n_h = len(H)
    out = {}
    for i in range(1, circuit.depth + 1):
        m_below = mprime if i == circuit.depth else m
        if n_h ** m < circuit.width(i - 1) or n_h ** m_below < circuit.width(i):
            raise ZkipcpError("H^m too small to index a layer")
        for op in ("add", "mult"):
            table = {}
            for pt in itertools.product(H.elements, repeat=m + 2 * m_below):
                table[pt] = 0
            out[(op, i)] = table
        pts_above = list(grid(H, m))
        pts_below = list(grid(H, m_below))
        for j, (op, l, r) in enumerate(circuit.layers[i - 1]):
            b, c = min(l, r), max(l, r)
            key = pts_above[j] + pts_below[b] + pts_below[c]
            out[(op, i)][key] = 1
    return out


def exact_wiring_ldes(circuit: LayeredCircuit, field: Field, H: SubsetSpec,
                      m: int, mprime: int) -> dict:
    """The exact multilinear-over-H extensions of the wiring predicates."""
    tables = wiring_tables(circuit, H, m, mprime)
    out = {}
    for (op, i), table in tables.items():
        m_below = mprime if i == circuit.depth else m
        out[(op, i)] = lde(field, table, H, m + 2 * m_below)
    return out


def layer_recurrence_holds(circuit: LayeredCircuit, field: Field, H: SubsetSpec,
                           m: int, mprime: int, x: Sequence[int]) -> bool:
    """The defining relation between consecutive layer tables, checked exactly
    through the boolean wiring predicates."""
    tables = eval_layers(circuit, field, x)
    wt = wiring_tables(circuit, H, m, mprime)

    def layer_as_grid(i):
        m_i = mprime if i == circuit.depth else m
        vals = {}
        for idx, pt in enumerate(grid(H, m_i)):
            row = tables[i]
            vals[pt] = row[idx] if idx < len(row) else 0
        return vals

    for i in range(1, circuit.depth + 1):
        m_below = mprime if i == circuit.depth else m
        above = layer_as_grid(i - 1)
        below = layer_as_grid(i)
        for zidx, z in enumerate(grid(H, m)):
            if zidx >= circuit.width(i - 1):
                break
            acc = 0
            for w1 in grid(H, m_below):
                for w2 in grid(H, m_below):
                    a = wt[("add", i)][z + w1 + w2]
                    mm = wt[("mult", i)][z + w1 + w2]
                    if a:
                        acc = field.add(acc, field.mul(a, field.add(below[w1], below[w2])))
                    if mm:
                        acc = field.add(acc, field.mul(mm, field.mul(below[w1], below[w2])))
            if acc != above[z]:
                return False
    return True


def input_extension_poly(field: Field, H: SubsetSpec, n: int, mprime: int) -> MultiPoly:
    """The (n + m')-variate polynomial sum_beta L(z, beta) * x_{index(beta)},
    linear in the x block, degree |H|-1 in the z block."""
    total = MultiPoly(field, (1,) * n + (len(H) - 1,) * mprime)
    for idx, beta in enumerate(grid(H, mprime)):
        if idx >= n:
            break
        kp = MultiPoly.constant(field, 1, mprime)
        for pos, coord in enumerate(beta):
            uni = _kernel_poly(field, H, coord)
            kp = kp.mul(uni.embed(mprime, [pos], tuple(
                len(uni.coeffs) - 1 if q == pos else 0 for q in range(mprime))))
        term = kp.embed(n + mprime, list(range(n, n + mprime)),
                        (0,) * n + kp.actual_degrees())
        xvar = MultiPoly.variable(field, n + mprime, idx)
        total = total.add(term.mul(xvar))
    return total


def _kernel_poly(field: Field, H: SubsetSpec, coord: int) -> MultiPoly:
    """Univariate polynomial t -> L_H(coord, t) as a MultiPoly."""
    from .mpoly import interpolate_univariate
    vals = lagrange_weights(field, H, coord)
    coeffs = interpolate_univariate(field, list(H.elements), vals)
    p = MultiPoly(field, (len(coeffs) - 1,))
    p.coeffs = list(coeffs)
    return p


def layered_to_spc(circuit: LayeredCircuit, field: Field, wiring_ldes: dict,
                   H: SubsetSpec, m: int, mprime: int):
    """The chain-with-side-leaves sum-product subcircuit whose root value is
    C(x): vertices v_0..v_D plus wiring leaves u_add_i / u_mult_i; the
    combiner is Z_add*(Z1+Z2) + Z_mult*Z1*Z2.

    wiring_ldes maps (op, i) to a MultiPoly extension agreeing with the true
    predicate on its grid (checked; WiringMismatch otherwise).
    """
    circuit.validate()
    true_tables = wiring_tables(circuit, H, m, mprime)
    delta = len(H) - 1
    for key, poly in wiring_ldes.items():
        table = true_tables[key]
        for pt, want in table.items():
            if poly.eval(pt) != want:
                raise WiringMismatch(f"extension {key} disagrees on grid point {pt}")
        delta = max(delta, max(poly.actual_degrees()))
    n, D = circuit.n, circuit.depth
    vertices = [f"v{i}" for i in range(D + 1)]
    edges = []
    combiners = {}
    inputs = {}
    for i in range(D):
        m_below = mprime if i == D - 1 else m
        for op in ("add", "mult"):
            u = f"u_{op}{i+1}"
            vertices.append(u)
            sigma = () if i == 0 else tuple(n + j for j in range(1, m + 1))
            edges.append(Edge(f"v{i}", u, sigma, tuple(range(1, 2 * m_below + 1))))
            poly = wiring_ldes[(op, i + 1)]
            if i == 0:
                inputs[u] = poly.bind_prefix((0,) * m)
            else:
                inputs[u] = poly
        edges.append(Edge(f"v{i}", f"v{i+1}", tuple(range(1, n + 1)),
                          tuple(range(1, m_below + 1))))
        edges.append(Edge(f"v{i}", f"v{i+1}", tuple(range(1, n + 1)),
                          tuple(range(m_below + 1, 2 * m_below + 1))))
        k_i = n + (0 if i == 0 else m)
        mu_i = 2 * m_below
        za, zm = ac.var(k_i + mu_i), ac.var(k_i + mu_i + 1)
        z1, z2 = ac.var(k_i + mu_i + 2), ac.var(k_i + mu_i + 3)
        node = ac.add(ac.mul(za, ac.add(z1, z2)), ac.mul(zm, ac.mul(z1, z2)))
        combiners[f"v{i}"] = ac.ArithCircuit(field, k_i + mu_i + 4, node)
    inputs[f"v{D}"] = input_extension_poly(field, H, n, mprime)
    graph = AriGraph(vertices, edges, "v0")
    d_lf = max(delta, len(H))
    spc_circuit = SumProductCircuit(field, H, 3, d_lf, graph, combiners)
    return spc_circuit, inputs


def hardcode_input(circuit: SumProductCircuit, inputs: dict, x: Sequence[int]):
    """Specialize a subcircuit whose root carries the free variables 1..n to a
    fixed x: projection labels drop the carried indices and leaves consuming
    them are partially evaluated, leaving a root of arity 0."""
    g = circuit.graph
    n = len(x)
    carried: dict = {g.root: {i + 1: x[i] for i in range(n)}}
    order = g.topo_order()
    for v in order:
        cv = carried.get(v, {})
        for e in g.out_edges[v]:
            child_map = {}
            for pos, s in enumerate(e.sigma):
                if s in cv:
                    child_map[pos + 1] = cv[s]
            prev = carried.setdefault(e.dst, child_map)
            if prev != child_map:
                raise ZkipcpError(f"inconsistent hard-coding at {e.dst}")
    new_edges = []
    for e in g.edges:
        cv = carried.get(e.src, {})
        keep = [s for s in e.sigma if s not in cv]
        renumber = {}
        rank = 0
        for s in range(1, g.arity(e.src) + 1):
            if s not in cv:
                rank += 1
                renumber[s] = rank
        new_edges.append(Edge(e.src, e.dst, tuple(renumber[s] for s in keep), e.tau))
    new_combiners = {}
    for v in g.internal:
        comb = circuit.combiners[v]
        cv = carried.get(v, {})
        k = g.arity(v)
        if not cv:
            new_combiners[v] = comb
            continue
        new_k = k - len(cv)
        mapping = {}
        rank = 0
        for s in range(1, k + 1):
            if s in cv:
                mapping[s - 1] = ("const", cv[s])
            else:
                mapping[s - 1] = ("var", rank)
                rank += 1
        for j in range(comb.nvars - k):
            mapping[k + j] = ("var", new_k + j)
        new_combiners[v] = _remap_circuit(comb, mapping, comb.nvars - len(cv))
    new_inputs = {}
    for v in g.leaves:
        leaf = inputs[v]
        cv = carried.get(v, {})
        if not cv:
            new_inputs[v] = leaf
            continue
        poly = leaf if isinstance(leaf, MultiPoly) else leaf.compile()
        new_inputs[v] = poly.substitute({s - 1: val for s, val in cv.items()})
    graph = AriGraph(list(g.vertices), new_edges, g.root)
    out = SumProductCircuit(circuit.field, circuit.H, circuit.d_in, circuit.d_lf,
                            graph, new_combiners)
    return out, new_inputs


def _remap_circuit(circ: ac.ArithCircuit, mapping: dict, new_nvars: int) -> ac.ArithCircuit:
    def leaf_const(v):
        return ac.const(v)

    def leaf_var(i):
        kind, val = mapping[i]
        return ac.const(val) if kind == "const" else ac.var(val)

    root = circ._fold(leaf_const, leaf_var, ac.add, ac.mul)
    return ac.ArithCircuit(circ.field, new_nvars, root)


# -- oracle 3-SAT --------------------------------------------------------------------


@dataclass
class O3SATInstance:
    """B is a boolean formula over r + 3s + 3 variables in AND/NOT form:
    nested tuples ('var', i) | ('not', f) | ('and', f, g) | ('const', 0/1)."""

    r: int
    s: int
    formula: tuple

    def nvars(self) -> int:
        return self.r + 3 * self.s + 3


def bool_eval(formula, assignment) -> int:
    op = formula[0]
    if op == "var":
        return assignment[formula[1]]
    if op == "const":
        return formula[1]
    if op == "not":
        return 1 - bool_eval(formula[1], assignment)
    if op == "and":
        return bool_eval(formula[1], assignment) & bool_eval(formula[2], assignment)
    raise ZkipcpError(f"unknown boolean op {op!r}")


def o3sat_check(inst: O3SATInstance, A: dict) -> bool:
    """Brute-force witness check: A maps s-bit tuples to bits."""
    for z in itertools.product((0, 1), repeat=inst.r):
        for bs in itertools.product((0, 1), repeat=3 * inst.s):
            b1 = bs[: inst.s]
            b2 = bs[inst.s: 2 * inst.s]
            b3 = bs[2 * inst.s:]
            point = list(z) + list(bs) + [A[b1], A[b2], A[b3]]
            if bool_eval(inst.formula, point) != 1:
                return False
    return True


def arithmetize_negation(formula, field: Field, nvars: int) -> ac.ArithCircuit:
    """Direct arithmetization of NOT(B): AND -> product, NOT -> 1 - t; the
    result is 0 on boolean points where B holds and 1 where it fails."""

    def rec(f):
        op = f[0]
        if op == "var":
            return ac.var(f[1])
        if op == "const":
            return ac.const(f[1])
        if op == "not":
            return ac.add(ac.const(1), ac.mul(ac.const(field.neg(1)), rec(f[1])))
        if op == "and":
            return ac.mul(rec(f[1]), rec(f[2]))
        raise ZkipcpError(f"unknown boolean op {op!r}")

    negated = ac.add(ac.const(1), ac.mul(ac.const(field.neg(1)), rec(formula)))
    return ac.ArithCircuit(field, nvars, negated)


def index_bit_ldes(field: Field, H: SubsetSpec, m: int, nbits: int) -> list[MultiPoly]:
    """LDEs of the bit coordinates (least significant first) of the
    lexicographic index map on H^m."""
    out = []
    for bit in range(nbits):
        table = {}
        for idx, pt in enumerate(grid(H, m)):
            table[pt] = (idx >> bit) & 1
        out.append(lde(field, table, H, m))
    return out


def o3sat_to_spcs(inst: O3SATInstance, field: Field, H: SubsetSpec,
                  x: Sequence[int], y: Sequence[int]):
    """The two-vertex satisfaction circuit: three parallel edges carry the
    three witness-block summation variables; the combiner couples the
    arithmetized formula with the index-packing products over (x, y).

    H must be (the image of) a subfield of F containing F_2 with |H| >= 8.
    """
    if len(H) < 8:
        raise FieldTooSmall("the reduction requires |H| >= 8")
    hset = H.as_set()
    if field.kind != "binary" or any(field.mul(a, b) not in hset for a in hset for b in hset):
        raise FieldTooSmall("H must be a subfield of a binary extension field")
    logh = int(math.log2(len(H)))
    r, s = inst.r, inst.s
    m1 = max(1, math.ceil(r / logh))
    m2 = max(1, math.ceil(s / logh))
    if len(x) != r + 3 * s or len(y) != r + 3 * s:
        raise ZkipcpError("x and y must have r + 3s coordinates")
    mu = m1 + 3 * m2
    bits1 = index_bit_ldes(field, H, m1, r)
    bits2 = index_bit_ldes(field, H, m2, s)

    # circuit-variable layout: Y block 0..mu-1, then Z1, Z2, Z3
    def bit_node(i: int):
        # coordinate i of the packed index (0-based over r + 3s bits)
        if i < r:
            poly = bits1[i]
            positions = list(range(m1))
        else:
            which, j = divmod(i - r, s)
            poly = bits2[j]
            positions = [m1 + which * m2 + q for q in range(m2)]
        return ac.ArithCircuit.from_multipoly(poly, mu + 3, positions).root

    gamma_nodes = [bit_node(i) for i in range(r + 3 * s)]
    bhat = arithmetize_negation(inst.formula, field, inst.nvars())

    def compose_bhat():
        def leaf_const(v):
            return ac.const(v)

        def leaf_var(i):
            if i < r + 3 * s:
                return gamma_nodes[i]
            return ac.var(mu + (i - (r + 3 * s)))

        return bhat._fold(leaf_const, leaf_var, ac.add, ac.mul)

    def pack_product(values):
        factors = []
        for i in range(r + 3 * s):
            vi = values[i]
            coeff = field.sub(vi, 1)
            factors.append(ac.add(ac.const(1), ac.mul(ac.const(coeff), gamma_nodes[i])))
        return ac.mul_many(factors)

    term1 = ac.mul(compose_bhat(), pack_product(list(x)))
    z1 = ac.var(mu)
    bool_term = ac.mul(z1, ac.add(ac.const(1), ac.mul(ac.const(field.neg(1)), z1)))
    term2 = ac.mul(bool_term, pack_product(list(y)))
    comb = ac.ArithCircuit(field, mu + 3, ac.add(term1, term2))

    edges = [Edge("v", "u", (), tuple(m1 + (i - 1) * m2 + q
                                      for q in range(1, m2 + 1)))
             for i in (1, 2, 3)]
    graph = AriGraph(["v", "u"], edges, "v")
    d_in = comb.total_degree()
    circuit = SumProductCircuit(field, H, d_in, len(H), graph, {"v": comb})
    return circuit, 0, {}


def o3sat_witness(inst: O3SATInstance, A: dict, field: Field, H: SubsetSpec) -> dict:
    """g(A): the auxiliary leaf polynomial, the LDE over H^{m2} of the witness
    composed with the index packing (individual degree < |H|)."""
    logh = int(math.log2(len(H)))
    m2 = max(1, math.ceil(inst.s / logh))
    table = {}
    for idx, pt in enumerate(grid(H, m2)):
        bits = tuple((idx >> b) & 1 for b in range(inst.s))
        table[pt] = A.get(bits, 0)
    return {"u": lde(field, table, H, m2)}


def o3sat_value_fn(inst: O3SATInstance, field: Field, H: SubsetSpec, witness_poly):
    """Precompute the grid structure of the satisfaction circuit once and
    return a fast callable (x, y) -> root value; at grid points the packing
    products collapse to subset products of the drawn coordinates."""
    logh = int(math.log2(len(H)))
    r, s = inst.r, inst.s
    m1 = max(1, math.ceil(r / logh))
    m2 = max(1, math.ceil(s / logh))
    bhat = arithmetize_negation(inst.formula, field, inst.nvars())
    pts2 = list(grid(H, m2))
    zvals = [witness_poly.eval(pt) for pt in pts2]
    n2 = len(pts2)
    rows = []
    for i1, pt1 in enumerate(grid(H, m1)):
        zbits = [(i1 >> b) & 1 for b in range(r)]
        for i2 in range(n2):
            b1 = [(i2 >> b) & 1 for b in range(s)]
            for i3 in range(n2):
                b2 = [(i3 >> b) & 1 for b in range(s)]
                for i4 in range(n2):
                    b3 = [(i4 >> b) & 1 for b in range(s)]
                    bits = zbits + b1 + b2 + b3
                    z1, z2, z3 = zvals[i2], zvals[i3], zvals[i4]
                    a = bhat.eval(bits + [z1, z2, z3])
                    boolterm = field.mul(z1, field.sub(1, z1))
                    support = tuple(i for i, b in enumerate(bits) if b)
                    rows.append((a, boolterm, support))
    add, mul = field.add, field.mul

    def value(x, y):
        acc = 0
        for a, boolterm, support in rows:
            if a:
                prod = a
                for i in support:
                    prod = mul(prod, x[i])
                acc = add(acc, prod)
            if boolterm:
                prod = boolterm
                for i in support:
                    prod = mul(prod, y[i])
                acc = add(acc, prod)
        return acc

    return value
