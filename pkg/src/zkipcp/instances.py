"""Canonical desk-scale instances: the toy families every experiment, CLI
invocation, and acceptance criterion runs against."""

from __future__ import annotations

import itertools

from . import circuit as ac
from . import commit as commit_mod
from . import frontends as fe
from . import spc
from .field import (
    Field,
    binary_field,
    complement_subset,
    enumerate_subset,
    prime_field,
    subset_from,
)
from .mpoly import MultiPoly, PrefixQuery, sample_uniform_poly
from .rng import DomainRNG
from .sumcheck import StrongParams, SumcheckInstance


def parse_field(spec: str) -> Field:
    """'101' or 'p101' for a prime field; '2^6' or 'gf64' for a binary field
    with the lexicographically smallest irreducible polynomial."""
    s = spec.strip().lower()
    if s.startswith("gf"):
        order = int(s[2:])
        degree = order.bit_length() - 1
        if 1 << degree != order:
            raise ValueError(f"gf size must be a power of two: {spec}")
        return binary_field(degree, _smallest_irreducible(degree))
    if s.startswith("2^"):
        degree = int(s[2:])
        return binary_field(degree, _smallest_irreducible(degree))
    if s.startswith("p"):
        s = s[1:]
    return prime_field(int(s))


def _smallest_irreducible(degree: int) -> int:
    from .field import _gf2_poly_is_irreducible
    base = 1 << degree
    for low in range(1, base, 2):  # constant term must be 1
        if _gf2_poly_is_irreducible(base | low, degree):
            return base | low
    raise ValueError(f"no irreducible polynomial of degree {degree}?")


def sumcheck_instance(field: Field, m: int, d: int, hsize: int, seed,
                      true_claim: bool = True):
    """A random dense summand with its (possibly falsified) claimed sum."""
    rng = DomainRNG(seed, "sumcheck-instance")
    H = enumerate_subset(field, hsize)
    poly = sample_uniform_poly(field, (d,) * m, rng)
    a = poly.partial_sum(PrefixQuery.over((), H, m))
    true_a = a
    if not true_claim:
        a = field.add(a, 1 + rng.randrange(field.order - 1))
    return poly, SumcheckInstance(field, m, d, H, a), true_a


def strong_params(field: Field, hsize: int, lam: int, k: int) -> StrongParams:
    H = enumerate_subset(field, hsize)
    G = enumerate_subset(field, lam, name="G")
    I = complement_subset(field, H)
    return StrongParams(lam, k, G, I)


def commit_params(field: Field, gsize: int = 2, k: int = 1,
                  m: int = 0, d_q: int = 0) -> commit_mod.CommitmentParams:
    G = enumerate_subset(field, gsize, name="G")
    return commit_mod.CommitmentParams(k, G, 2 * (gsize - 1), m, d_q)


def one_gate_spc(field: Field, a: int, b: int, op: str = "mult"):
    """The single-gate delegation circuit: root value = a op b."""
    H = enumerate_subset(field, 2)
    g = spc.AriGraph(
        ["root", "leaf"],
        [spc.Edge("root", "leaf", (), (1,)), spc.Edge("root", "leaf", (), (2,))],
        "root")
    y1, y2, z1, z2 = ac.var(0), ac.var(1), ac.var(2), ac.var(3)
    sel = ac.mul(ac.add(ac.const(1), ac.mul(ac.const(field.neg(1)), y1)), y2)
    inner = ac.mul(z1, z2) if op == "mult" else ac.add(z1, z2)
    comb = ac.ArithCircuit(field, 4, ac.mul(sel, inner))
    circuit = spc.SumProductCircuit(field, H, 4, 2, g, {"root": comb})
    leaf = MultiPoly(field, (1,))
    leaf.set((0,), a)
    leaf.set((1,), field.sub(b, a))
    return circuit, {"leaf": leaf}


def chain_spc(field: Field, depth: int = 2):
    """A depth-`depth` chain with in-degree 2 between consecutive vertices:
    exercises label batching."""
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
        if i == 0:
            y1, y2, z1, z2 = ac.var(0), ac.var(1), ac.var(2), ac.var(3)
            node = ac.add(ac.mul(y1, z1), ac.mul(y2, ac.mul(z2, z2)))
            combs[f"v{i}"] = ac.ArithCircuit(field, 4, node)
        else:
            x1, y1, y2 = ac.var(0), ac.var(1), ac.var(2)
            z1, z2 = ac.var(3), ac.var(4)
            node = ac.add(ac.mul(x1, ac.mul(y1, z1)), ac.mul(y2, ac.mul(z2, z2)))
            combs[f"v{i}"] = ac.ArithCircuit(field, 5, node)
    circuit = spc.SumProductCircuit(field, H, 3, 2,
                                    spc.AriGraph(vertices, edges, "v0"), combs)
    leaf = MultiPoly(field, (2,))
    leaf.set((0,), 3)
    leaf.set((2,), 2)
    return circuit, {"leaf": leaf}


def tiny_pzk_spc(field: Field):
    """One internal vertex, one summation variable: lambda stays small enough
    for the dense inner sampler spaces."""
    H = enumerate_subset(field, 2)
    g = spc.AriGraph(["root", "leaf"],
                     [spc.Edge("root", "leaf", (), (1,))], "root")
    comb = ac.ArithCircuit(field, 2, ac.var(1))
    circuit = spc.SumProductCircuit(field, H, 1, 2, g, {"root": comb})
    leaf = MultiPoly(field, (2,))
    leaf.set((1,), 3)
    leaf.set((2,), 1)
    return circuit, {"leaf": leaf}


def chain_pzk_spc(field: Field):
    """root -> mid -> leaf, in-degree 1: the revealed internal value is
    mask-protected (used by the hiding chi-square checks)."""
    H = enumerate_subset(field, 2)
    g = spc.AriGraph(
        ["root", "mid", "leaf"],
        [spc.Edge("root", "mid", (), (1,)), spc.Edge("mid", "leaf", (1,), ())],
        "root")
    comb_root = ac.ArithCircuit(field, 2, ac.var(1))
    comb_mid = ac.ArithCircuit(field, 2, ac.var(1))
    circuit = spc.SumProductCircuit(field, H, 1, 2, g,
                                    {"root": comb_root, "mid": comb_mid})
    leaf = MultiPoly(field, (2,))
    leaf.set((1,), 3)
    leaf.set((2,), 1)
    return circuit, {"leaf": leaf}


def random_regular_qbf(seed, max_n: int = 4, max_c: int = 4) -> fe.QBF:
    rng = DomainRNG(seed, "qbf")
    n = 2 * (1 + rng.randrange(max_n // 2))
    c = 1 + rng.randrange(max_c)
    prefix = [("A" if i % 2 == 0 else "E") for i in range(n)]
    clauses = []
    for _ in range(c):
        clause = []
        for _ in range(3):
            v = 1 + rng.randrange(n)
            clause.append(v if rng.randrange(2) else -v)
        clauses.append(clause)
    return fe.QBF(prefix, clauses)


def example_qbf(true_formula: bool = True) -> fe.QBF:
    if true_formula:
        return fe.QBF(["A", "E"], [[1, 2, 2], [-1, 2, 2]])
    return fe.QBF(["A", "E"], [[1, 1, 1]])


def layered_example() -> fe.LayeredCircuit:
    return fe.LayeredCircuit([[("add", 0, 1)], [("mult", 0, 1), ("add", 0, 1)]], 2)


def random_layered(seed, depth: int = 2, width: int = 2, n: int = 2) -> fe.LayeredCircuit:
    rng = DomainRNG(seed, "layered")
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


def o3sat_field():
    gf64 = binary_field(6, 0b1011011)
    H = subset_from(gf64, gf64.subfield_elements(3), "H")
    return gf64, H


def o3sat_toy(kind: str = "sat") -> fe.O3SATInstance:
    """r = s = 3 toys: 'sat' requires the first witness read to be true
    (satisfied by the all-ones table); 'unsat' is never satisfiable."""
    if kind == "sat":
        return fe.O3SATInstance(3, 3, ("var", 12))
    return fe.O3SATInstance(3, 3, ("const", 0))


def o3sat_all_ones_witness():
    return {bits: 1 for bits in itertools.product((0, 1), repeat=3)}

