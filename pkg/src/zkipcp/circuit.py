"""Arithmetic circuits: expression DAGs over named variables with +, *, const.

Circuits carry a declared total-degree bound (validated against the DAG) and
compile to dense MultiPoly form when the dense budget allows.  Evaluation goes
through a flattened instruction tape so repeated evaluation inside provers is
cheap.
"""

from __future__ import annotations

from typing import Sequence

from .errors import ArityMismatch, DegreeMismatch
from .field import Field
from .mpoly import MultiPoly


class Node:
    __slots__ = ("op", "a", "b", "value")

    def __init__(self, op: str, a=None, b=None, value: int = 0):
        self.op = op
        self.a = a
        self.b = b
        self.value = value


def const(value: int) -> Node:
    return Node("const", value=value)


def var(index: int) -> Node:
    return Node("var", value=index)


def add(a: Node, b: Node) -> Node:
    return Node("add", a, b)


def mul(a: Node, b: Node) -> Node:
    return Node("mul", a, b)


def add_many(nodes: Sequence[Node]) -> Node:
    acc = None
    for n in nodes:
        acc = n if acc is None else add(acc, n)
    return acc if acc is not None else const(0)


def mul_many(nodes: Sequence[Node]) -> Node:
    acc = None
    for n in nodes:
        acc = n if acc is None else mul(acc, n)
    return acc if acc is not None else const(1)


class ArithCircuit:
    """Expression DAG over a fixed field; constants are canonical ints."""

    __slots__ = ("field", "nvars", "root", "declared_degree", "_tape", "_nslots")

    def __init__(self, field: Field, nvars: int, root: Node, declared_degree: int | None = None):
        self.field = field
        self.nvars = nvars
        self.root = root
        self._tape = None
        self._nslots = 0
        computed = self.total_degree()
        if declared_degree is None:
            declared_degree = computed
        if computed > declared_degree:
            raise DegreeMismatch(
                f"circuit degree {computed} exceeds declared bound {declared_degree}")
        self.declared_degree = declared_degree

    # -- structure walks ------------------------------------------------------

    def _topo(self) -> list[Node]:
        order, seen = [], set()
        stack = [(self.root, False)]
        while stack:
            node, expanded = stack.pop()
            if id(node) in seen:
                continue
            if expanded:
                seen.add(id(node))
                order.append(node)
            else:
                stack.append((node, True))
                if node.op in ("add", "mul"):
                    if id(node.a) not in seen:
                        stack.append((node.a, False))
                    if id(node.b) not in seen:
                        stack.append((node.b, False))
        return order

    def _fold(self, leaf_const, leaf_var, f_add, f_mul):
        vals = {}
        for node in self._topo():
            if node.op == "const":
                vals[id(node)] = leaf_const(node.value)
            elif node.op == "var":
                if node.value >= self.nvars:
                    raise ArityMismatch(f"variable {node.value} out of range")
                vals[id(node)] = leaf_var(node.value)
            elif node.op == "add":
                vals[id(node)] = f_add(vals[id(node.a)], vals[id(node.b)])
            else:
                vals[id(node)] = f_mul(vals[id(node.a)], vals[id(node.b)])
        return vals[id(self.root)]

    def total_degree(self) -> int:
        return self._fold(
            lambda _v: 0,
            lambda _i: 1,
            max,
            lambda x, y: x + y,
        )

    def var_degree(self, i: int) -> int:
        """Degree bound in a single variable, by DAG propagation."""
        return self._fold(
            lambda _v: 0,
            lambda j: 1 if j == i else 0,
            max,
            lambda x, y: x + y,
        )

    def var_degrees(self) -> tuple:
        return tuple(self.var_degree(i) for i in range(self.nvars))

    # -- evaluation --------------------------------------------------------------

    def _build_tape(self):
        slots = {}
        tape = []
        for k, node in enumerate(self._topo()):
            slots[id(node)] = k
            if node.op in ("add", "mul"):
                tape.append((node.op, slots[id(node.a)], slots[id(node.b)], 0))
            else:
                tape.append((node.op, 0, 0, node.value))
        self._tape = tape
        self._nslots = len(tape)

    def eval(self, point: Sequence[int]) -> int:
        if len(point) != self.nvars:
            raise ArityMismatch(f"point of length {len(point)} for {self.nvars} variables")
        if self._tape is None:
            self._build_tape()
        fadd, fmul = self.field.add, self.field.mul
        regs = [0] * self._nslots
        for k, (op, ia, ib, v) in enumerate(self._tape):
            if op == "add":
                regs[k] = fadd(regs[ia], regs[ib])
            elif op == "mul":
                regs[k] = fmul(regs[ia], regs[ib])
            elif op == "var":
                regs[k] = point[v]
            else:
                regs[k] = v
        return regs[-1]

    def compile(self, bounds: Sequence[int] | None = None) -> MultiPoly:
        """Expand to dense coefficient form (raises BudgetExceeded if too big)."""
        f = self.field
        n = self.nvars

        def leaf_const(v):
            return MultiPoly.constant(f, v, n)

        def leaf_var(i):
            return MultiPoly.variable(f, n, i)

        poly = self._fold(leaf_const, leaf_var, lambda x, y: x.add(y), lambda x, y: x.mul(y))
        if bounds is not None:
            actual = poly.actual_degrees()
            if any(a > b for a, b in zip(actual, bounds)):
                raise DegreeMismatch(f"compiled degrees {actual} exceed requested bounds {tuple(bounds)}")
            poly = poly.pad(tuple(bounds))
        return poly

    @staticmethod
    def from_multipoly(poly: MultiPoly, nvars: int | None = None,
                       positions: Sequence[int] | None = None) -> "ArithCircuit":
        """Sum-of-monomials circuit equal to the polynomial; old variable i
        maps to circuit variable positions[i]."""
        nvars = poly.m if nvars is None else nvars
        positions = list(range(poly.m)) if positions is None else list(positions)
        terms = []
        for e, c in poly.monomials():
            factors = [const(c)]
            for i, ei in enumerate(e):
                v = var(positions[i])
                for _ in range(ei):
                    factors.append(v)
            terms.append(mul_many(factors))
        return ArithCircuit(poly.field, nvars, add_many(terms))

    # -- serialization -------------------------------------------------------------

    def doc(self) -> dict:
        order = self._topo()
        index = {id(n): k for k, n in enumerate(order)}
        gates = []
        for n in order:
            if n.op == "const":
                gates.append({"op": "const", "value": format(n.value, "x")})
            elif n.op == "var":
                gates.append({"op": "var", "index": n.value})
            else:
                gates.append({"op": n.op, "a": index[id(n.a)], "b": index[id(n.b)]})
        return {"nvars": self.nvars, "degree": self.declared_degree, "gates": gates}

    @staticmethod
    def from_doc(field: Field, doc: dict) -> "ArithCircuit":
        nodes = []
        for g in doc["gates"]:
            if g["op"] == "const":
                nodes.append(const(int(g["value"], 16)))
            elif g["op"] == "var":
                nodes.append(var(g["index"]))
            else:
                nodes.append(Node(g["op"], nodes[g["a"]], nodes[g["b"]]))
        return ArithCircuit(field, doc["nvars"], nodes[-1], doc.get("degree"))
