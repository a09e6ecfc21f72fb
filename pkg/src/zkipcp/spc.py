"""Sum-product circuits: ari-graphs with low-degree combiners at internal
vertices, their evaluation/satisfaction proof systems, and the perfect
zero-knowledge variants built on masked low-degree extensions and the
strong-ZK sumcheck.

Variable conventions.  A vertex v has arity k_v free variables and mu_v
summation variables; an edge e = (v, u) passes (X restricted to sigma_e,
beta restricted to tau_e) to the child, in increasing index order, so the
child's k_u variables are positionally the |sigma_e| free picks followed by
the |tau_e| summation picks.  Combiner circuits take (X, Y, Z) = (k_v free
variables, mu_v summation variables, one value per outgoing edge in edge
order).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field as dc_field
from typing import Sequence

from .circuit import ArithCircuit
from .errors import ArityMismatch, BudgetExceeded, MissingLeaf, ZkipcpError
from .field import Field, SubsetSpec, complement_subset, enumerate_subset, subset_from
from .mpoly import (
    MultiPoly,
    PrefixQuery,
    eval_univariate,
    grid,
    interpolate_univariate,
    lagrange_kernel,
    lagrange_weights,
    mixed_grid,
    sample_uniform_poly,
    vanishing,
)
from .oracles import Oracle, OracleBundle, checked_read, materialize
from .rng import DomainRNG
from .sampler import ConstraintSet, PolySpace, sample_constrained_poly
from .session import OutputClaim, Transcript
from .sumcheck import (
    HonestRoundProver,
    StrongParams,
    StrongZKSimulator,
    SumcheckInstance,
    run_rounds,
    strong_zk_run,
)


@dataclass(frozen=True)
class Edge:
    src: str
    dst: str
    sigma: tuple
    tau: tuple

    def __post_init__(self):
        object.__setattr__(self, "sigma", tuple(sorted(self.sigma)))
        object.__setattr__(self, "tau", tuple(sorted(self.tau)))

    @property
    def width(self) -> int:
        return len(self.sigma) + len(self.tau)


class AriGraph:
    """Directed acyclic multigraph with free/summation projection labels."""

    def __init__(self, vertices: Sequence[str], edges: Sequence[Edge], root: str):
        self.vertices = list(vertices)
        self.edges = list(edges)
        self.root = root
        self.out_edges: dict[str, list[Edge]] = {v: [] for v in self.vertices}
        self.in_edges: dict[str, list[Edge]] = {v: [] for v in self.vertices}
        for e in self.edges:
            self.out_edges[e.src].append(e)
            self.in_edges[e.dst].append(e)

    def is_leaf(self, v: str) -> bool:
        return not self.out_edges[v]

    @property
    def leaves(self) -> list[str]:
        return [v for v in self.vertices if self.is_leaf(v)]

    @property
    def internal(self) -> list[str]:
        return [v for v in self.vertices if not self.is_leaf(v)]

    def arity(self, v: str) -> int:
        if v == self.root:
            best = 0
            for e in self.out_edges[v]:
                if e.sigma:
                    best = max(best, max(e.sigma))
            return best
        ins = self.in_edges[v]
        if not ins:
            return 0
        return ins[0].width

    def mu(self, v: str) -> int:
        best = 0
        for e in self.out_edges[v]:
            if e.tau:
                best = max(best, max(e.tau))
        return best

    def depths(self) -> dict[str, int]:
        depth = {self.root: 0}
        order = self.topo_order()
        for v in order:
            for e in self.out_edges[v]:
                depth[e.dst] = depth[v] + 1
        return depth

    def topo_order(self) -> list[str]:
        """Deterministic topological order: by depth, then vertex id."""
        indeg = {v: len(self.in_edges[v]) for v in self.vertices}
        depth = {self.root: 0}
        frontier = [self.root]
        order = []
        while frontier:
            frontier.sort(key=lambda v: (depth[v], str(v)))
            v = frontier.pop(0)
            order.append(v)
            for e in self.out_edges[v]:
                depth[e.dst] = max(depth.get(e.dst, 0), depth[v] + 1)
                indeg[e.dst] -= 1
                if indeg[e.dst] == 0:
                    frontier.append(e.dst)
        return order

    def max_in_degree(self) -> int:
        return max((len(self.in_edges[v]) for v in self.vertices), default=0)


@dataclass
class SumProductCircuit:
    field: Field
    H: SubsetSpec
    d_in: int
    d_lf: int
    graph: AriGraph
    combiners: dict  # vertex -> ArithCircuit over (k_v, mu_v, outdeg) variables

    def arity(self) -> int:
        return max(self.graph.arity(v) for v in self.graph.vertices)


def normalize_input(circuit: SumProductCircuit, inp: dict) -> dict:
    """Leaf labels may be MultiPoly or ArithCircuit; keep circuits as circuits
    (cheap evaluation) and validate arities."""
    out = {}
    for v, poly in inp.items():
        k = circuit.graph.arity(v)
        if isinstance(poly, MultiPoly):
            if poly.m != k:
                raise ArityMismatch(f"leaf {v}: polynomial arity {poly.m} != {k}")
        elif isinstance(poly, ArithCircuit):
            if poly.nvars != k:
                raise ArityMismatch(f"leaf {v}: circuit arity {poly.nvars} != {k}")
        out[v] = poly
    return out


def leaf_eval(leaf, point) -> int:
    return leaf.eval(tuple(point))


def leaf_var_degree(leaf, i: int) -> int:
    if isinstance(leaf, MultiPoly):
        return leaf.actual_degrees()[i] if leaf.m else 0
    return leaf.var_degree(i)


def validate(circuit: SumProductCircuit) -> list[str]:
    """Check every ari-graph invariant and degree bound; returns diagnostics
    naming the violated clause (empty list when the circuit is well-formed)."""
    g = circuit.graph
    diags = []
    roots = [v for v in g.vertices if not g.in_edges[v]]
    if len(roots) != 1 or roots[0] != g.root:
        diags.append(f"root: expected a single in-degree-0 vertex {g.root!r}, found {roots}")
    # acyclicity and depth well-definedness by longest/shortest path agreement
    order = g.topo_order()
    if len(order) != len(g.vertices):
        diags.append("acyclicity: graph has a directed cycle or unreachable vertices")
        return diags
    shallow = {g.root: 0}
    deep = {g.root: 0}
    for v in order:
        for e in g.out_edges[v]:
            shallow[e.dst] = min(shallow.get(e.dst, 10 ** 9), shallow[v] + 1)
            deep[e.dst] = max(deep.get(e.dst, -1), deep[v] + 1)
    for v in g.vertices:
        if v in shallow and shallow[v] != deep[v]:
            diags.append(f"depth: vertex {v} has root paths of different lengths")
    for v in g.vertices:
        ins = g.in_edges[v]
        if v != g.root and ins:
            widths = {e.width for e in ins}
            if len(widths) != 1:
                diags.append(f"arity clause (1): vertex {v} has incoming widths {sorted(widths)}")
        k = g.arity(v)
        for e in g.out_edges[v]:
            if any(not 1 <= i <= k for i in e.sigma):
                diags.append(f"arity clause (2): edge {e.src}->{e.dst} sigma {e.sigma} "
                             f"outside 1..{k}")
    if circuit.d_lf < len(circuit.H):
        diags.append(f"degree: d_lf = {circuit.d_lf} < |H| = {len(circuit.H)}")
    for v in g.internal:
        comb = circuit.combiners.get(v)
        if comb is None:
            diags.append(f"combiner: internal vertex {v} unlabeled")
            continue
        want = g.arity(v) + g.mu(v) + len(g.out_edges[v])
        if comb.nvars != want:
            diags.append(f"combiner: vertex {v} expects {want} variables, circuit has {comb.nvars}")
        if comb.total_degree() > circuit.d_in:
            diags.append(f"degree: combiner at {v} has total degree {comb.total_degree()} "
                         f"> d_in = {circuit.d_in}")
    return diags


# -- brute-force values ------------------------------------------------------------


def _restrict(point: Sequence[int], beta: Sequence[int], e: Edge) -> tuple:
    return tuple(point[i - 1] for i in e.sigma) + tuple(beta[i - 1] for i in e.tau)


def vertex_grid_table(circuit: SumProductCircuit, inp: dict, v: str,
                      cache: dict | None = None) -> list[int]:
    """Evaluations of the vertex value on H^{k_v}, flat in grid order."""
    if cache is None:
        cache = {}
    if v in cache:
        return cache[v]
    g = circuit.graph
    H = circuit.H
    if g.is_leaf(v):
        if v not in inp:
            raise MissingLeaf(f"no input polynomial for leaf {v}")
        leaf = inp[v]
        table = [leaf_eval(leaf, pt) for pt in grid(H, g.arity(v))]
        cache[v] = table
        return table
    k, mu = g.arity(v), g.mu(v)
    outs = g.out_edges[v]
    child_tables = [vertex_grid_table(circuit, inp, e.dst, cache) for e in outs]
    comb = circuit.combiners[v]
    f = circuit.field
    add = f.add
    n = len(H)
    helems = H.elements
    hindex = {h: i for i, h in enumerate(helems)}
    table = []
    for x in grid(H, k):
        acc = 0
        for beta in grid(H, mu):
            args = list(x) + list(beta)
            for e, tab in zip(outs, child_tables):
                pt = _restrict(x, beta, e)
                idx = 0
                for coord in pt:
                    idx = idx * n + hindex[coord]
                args.append(tab[idx])
            acc = add(acc, comb.eval(args))
        table.append(acc)
    cache[v] = table
    return table


def vertex_value_poly(circuit: SumProductCircuit, inp: dict, v: str,
                      cache: dict | None = None) -> MultiPoly:
    """The recursively defined value polynomial (dense; desk scale only)."""
    if cache is None:
        cache = {}
    if v in cache:
        return cache[v]
    g = circuit.graph
    f = circuit.field
    if g.is_leaf(v):
        if v not in inp:
            raise MissingLeaf(f"no input polynomial for leaf {v}")
        leaf = inp[v]
        poly = leaf if isinstance(leaf, MultiPoly) else leaf.compile()
        cache[v] = poly
        return poly
    k, mu = g.arity(v), g.mu(v)
    outs = g.out_edges[v]
    children = [vertex_value_poly(circuit, inp, e.dst, cache) for e in outs]
    comb = circuit.combiners[v]
    total = MultiPoly.constant(f, 0, k)
    for beta in grid(circuit.H, mu):
        operands = []
        for e, child in zip(outs, children):
            bound = child
            # bind the tau-passed coordinates (the trailing positions)
            for pos in range(len(e.sigma) + len(e.tau) - 1, len(e.sigma) - 1, -1):
                bound = bound.substitute({pos: beta[e.tau[pos - len(e.sigma)] - 1]})
            positions = [i - 1 for i in e.sigma]
            operands.append(bound.embed(k, positions, _embed_bounds(bound, k, positions)))

        def leaf_const(val):
            return MultiPoly.constant(f, val, k)

        def leaf_var(i):
            if i < k:
                return MultiPoly.variable(f, k, i)
            if i < k + mu:
                return MultiPoly.constant(f, beta[i - k], k)
            return operands[i - k - mu]

        term = comb._fold(leaf_const, leaf_var, lambda a, b: a.add(b), lambda a, b: a.mul(b))
        total = total.add(term)
    cache[v] = total
    return total


def _embed_bounds(poly: MultiPoly, k: int, positions) -> tuple:
    bounds = [0] * k
    deg = poly.actual_degrees()
    for i, pos in enumerate(positions):
        bounds[pos] = deg[i]
    return tuple(bounds)


def value(circuit: SumProductCircuit, inp: dict) -> int:
    """Circuit value (root must have arity 0)."""
    table = vertex_grid_table(circuit, inp, circuit.graph.root, {})
    return table[0]


def lde_from_table(field: Field, H: SubsetSpec, k: int, table: list[int],
                   point: Sequence[int]) -> int:
    """Evaluate the degree-(|H|-1) extension of a grid table by axis folding."""
    cur = table
    n = len(H)
    for coord in point:
        w = lagrange_weights(field, H, coord)
        block = len(cur) // n
        nxt = [0] * block
        add, mul = field.add, field.mul
        for i in range(n):
            wi = w[i]
            if wi == 0:
                continue
            seg = cur[i * block:(i + 1) * block]
            for t in range(block):
                if seg[t]:
                    nxt[t] = add(nxt[t], mul(wi, seg[t]))
        cur = nxt
    return cur[0]


def lde_value(circuit: SumProductCircuit, inp: dict, v: str, point: Sequence[int],
              cache: dict | None = None) -> int:
    """The low-degree extension of the vertex value's restriction to the grid,
    evaluated off-grid (leaves return the leaf polynomial directly)."""
    g = circuit.graph
    if g.is_leaf(v):
        return leaf_eval(inp[v], point)
    if len(point) != g.arity(v):
        raise ArityMismatch(f"vertex {v} expects {g.arity(v)} coordinates")
    table = vertex_grid_table(circuit, inp, v, cache if cache is not None else {})
    return lde_from_table(circuit.field, circuit.H, g.arity(v), table, point)


# -- factored summands: the honest prover's round-polynomial engine -----------------
#
# A vertex's sumcheck summand is a short sum of terms, each a product of
# factors over small variable subsets (univariate kernel/monomial factors,
# child-value factors, dense mask factors).  Round polynomials are computed by
# evaluating at degree+1 sample points, with per-term factoring of the
# remaining-grid sum into independent components, so separable structure
# (disjoint blocks) costs per-block work instead of a full grid pass.


class LeafChild:
    """Child evaluator for a leaf vertex: the input polynomial itself
    (evaluations are memoized for the lifetime of the evaluator)."""

    def __init__(self, leaf):
        self.leaf = leaf
        self._memo = {}

    def eval(self, pt):
        v = self._memo.get(pt)
        if v is None:
            v = leaf_eval(self.leaf, pt)
            self._memo[pt] = v
        return v

    def var_degree(self, i):
        return leaf_var_degree(self.leaf, i)


class TableChild:
    """Child evaluator for an internal vertex: the LDE of its grid table."""

    def __init__(self, field, H, k, table):
        self.field = field
        self.H = H
        self.k = k
        self.table = table
        self._memo = {}

    def eval(self, pt):
        v = self._memo.get(pt)
        if v is None:
            v = lde_from_table(self.field, self.H, self.k, self.table, pt)
            self._memo[pt] = v
        return v

    def var_degree(self, i):
        return len(self.H) - 1


class MaskedChild:
    """Randomized LDE of an internal vertex: LDE + vanishing * fiber-summed mask."""

    def __init__(self, base: TableChild, mask_sum: MultiPoly, H):
        self.base = base
        self.mask_sum = mask_sum  # sum over G^k of R_v(X, *), a k_v-variate poly
        self.H = H

    def eval(self, pt):
        f = self.base.field
        van = vanishing(f, self.H, pt)
        if van == 0:
            return self.base.eval(pt)
        return f.add(self.base.eval(pt), f.mul(van, self.mask_sum.eval(pt)))

    def var_degree(self, i):
        deg = self.mask_sum.actual_degrees()[i] if self.mask_sum.m else 0
        return len(self.H) + deg


class UniFactor:
    __slots__ = ("support", "var", "coeffs", "field")

    def __init__(self, field, var: int, coeffs):
        self.field = field
        self.var = var
        self.coeffs = list(coeffs)
        self.support = frozenset((var,))

    def eval(self, assign):
        return eval_univariate(self.field, self.coeffs, assign[self.var])

    def var_degree(self, i):
        return len(self.coeffs) - 1 if i == self.var else 0


class ChildSlotFactor:
    __slots__ = ("support", "child", "positions")

    def __init__(self, child, positions):
        self.child = child
        self.positions = tuple(positions)
        self.support = frozenset(positions)

    def eval(self, assign):
        return self.child.eval(tuple(assign[p] for p in self.positions))

    def var_degree(self, i):
        return sum(self.child.var_degree(j)
                   for j, p in enumerate(self.positions) if p == i)


class PolyFactor:
    __slots__ = ("support", "poly", "positions")

    def __init__(self, poly: MultiPoly, positions):
        self.poly = poly
        self.positions = tuple(positions)
        self.support = frozenset(positions)

    def eval(self, assign):
        return self.poly.eval(tuple(assign[p] for p in self.positions))

    def var_degree(self, i):
        deg = self.poly.actual_degrees()
        return sum(deg[j] for j, p in enumerate(self.positions) if p == i)


class NodeFactor:
    """A combiner subtree with its slot inputs bound to child evaluators."""

    __slots__ = ("field", "node", "nvars", "slot_factors", "support", "_tape", "_degrees")

    def __init__(self, field, node, nvars, slot_factors, support):
        self.field = field
        self.node = node
        self.nvars = nvars
        self.slot_factors = slot_factors  # slot index -> ChildSlotFactor
        self.support = frozenset(support)
        self._tape = None
        self._degrees = {}

    def _circuit(self):
        if self._tape is None:
            self._tape = ArithCircuit(self.field, self.nvars, self.node)
            self._tape._build_tape()
        return self._tape

    def eval(self, assign):
        circ = self._circuit()
        fadd, fmul = self.field.add, self.field.mul
        slots = self.slot_factors
        regs = [0] * circ._nslots
        for idx, (op, ia, ib, v) in enumerate(circ._tape):
            if op == "add":
                regs[idx] = fadd(regs[ia], regs[ib])
            elif op == "mul":
                regs[idx] = fmul(regs[ia], regs[ib])
            elif op == "var":
                sf = slots.get(v)
                regs[idx] = assign[v] if sf is None else sf.eval(assign)
            else:
                regs[idx] = v
        return regs[-1]

    def var_degree(self, i):
        if i not in self._degrees:
            circ = self._circuit()

            def leaf_const(_v):
                return 0

            def leaf_var(j):
                if j in self.slot_factors:
                    return self.slot_factors[j].var_degree(i)
                return 1 if j == i else 0

            self._degrees[i] = circ._fold(leaf_const, leaf_var, max, lambda a, b: a + b)
        return self._degrees[i]


@dataclass
class Term:
    coef: int
    factors: list


EXPANSION_CAP = 512


def build_combiner_terms(field: Field, comb: ArithCircuit, k: int, mu: int,
                         slot_factory) -> list:
    """Split the combiner into terms whose factors have small variable
    support: additions are distributed only while a subtree spans more than
    one summand variable, so block-separable structure survives unexpanded.

    Returns a list of (coefficient, [factor objects]) pairs."""
    nvars = comb.nvars
    nslots = nvars - k - mu
    slot_cache: dict = {}

    def slot(j):
        if j not in slot_cache:
            slot_cache[j] = slot_factory(j)
        return slot_cache[j]

    # variable support per node, with slots mapped to summand variables
    def node_support(node, memo):
        if id(node) in memo:
            return memo[id(node)]
        if node.op == "const":
            out = frozenset()
        elif node.op == "var":
            if node.value < k + mu:
                out = frozenset((node.value,))
            else:
                out = slot(node.value - k - mu).support
        else:
            out = node_support(node.a, memo) | node_support(node.b, memo)
        memo[id(node)] = out
        return out

    memo: dict = {}

    def atom(node, support):
        slots = {}

        def collect(nd, seen):
            if id(nd) in seen:
                return
            seen.add(id(nd))
            if nd.op == "var" and nd.value >= k + mu:
                slots[nd.value] = _SlotView(slot(nd.value - k - mu))
            elif nd.op in ("add", "mul"):
                collect(nd.a, seen)
                collect(nd.b, seen)

        collect(node, set())
        return NodeFactor(field, node, nvars, slots, support)

    def terms_of(node):
        sup = node_support(node, memo)
        if node.op == "const":
            return [(node.value, [])]
        if len(sup) <= 1:
            if node.op == "var" and node.value >= k + mu:
                return [(1, [slot(node.value - k - mu)])]
            return [(1, [atom(node, sup)])]
        if node.op == "add":
            out = terms_of(node.a) + terms_of(node.b)
        elif node.op == "mul":
            ta, tb = terms_of(node.a), terms_of(node.b)
            if len(ta) * len(tb) > EXPANSION_CAP:
                return [(1, [atom(node, sup)])]
            out = [(field.mul(ca, cb), fa + fb) for ca, fa in ta for cb, fb in tb]
        else:
            out = [(1, [atom(node, sup)])]
        if len(out) > EXPANSION_CAP:
            return [(1, [atom(node, sup)])]
        return out

    return [(c, fs) for c, fs in terms_of(comb.root) if c != 0]


class _SlotView:
    """A slot factor wrapper so one child evaluator can appear in several
    factors while sharing its memoized evaluations."""

    __slots__ = ("inner", "support")

    def __init__(self, inner):
        self.inner = inner
        self.support = inner.support

    def eval(self, assign):
        return self.inner.eval(assign)

    def var_degree(self, i):
        return self.inner.var_degree(i)


def _kernel_unipoly(field: Field, H: SubsetSpec, gamma_coord: int) -> list[int]:
    """Coefficients of the univariate t -> L_H(gamma_coord, t)."""
    vals = lagrange_weights(field, H, gamma_coord)
    return interpolate_univariate(field, list(H.elements), vals)


def _shift_poly(field: Field, coeffs: list[int], power: int) -> list[int]:
    return [0] * power + list(coeffs)


class FactoredSummand:
    """sum_j of terms; evaluable pointwise and round-by-round."""

    def __init__(self, field: Field, domains: Sequence[SubsetSpec], terms: list[Term],
                 declared_bound: int):
        self.field = field
        self.domains = list(domains)
        self.nvars = len(self.domains)
        self.terms = terms
        self.declared_bound = declared_bound

    def var_degree(self, i: int) -> int:
        worst = 0
        for t in self.terms:
            worst = max(worst, sum(f.var_degree(i) for f in t.factors))
        return min(worst, self.declared_bound)

    def eval(self, point: Sequence[int]) -> int:
        f = self.field
        assign = list(point)
        acc = 0
        for t in self.terms:
            prod = t.coef
            for factor in t.factors:
                if prod == 0:
                    break
                prod = f.mul(prod, factor.eval(assign))
            acc = f.add(acc, prod)
        return acc

    def fresh_prover(self):
        return FactoredRoundProver(self)


class FactoredRoundProver:
    def __init__(self, summand: FactoredSummand):
        self.s = summand
        self.assign: list = [None] * summand.nvars
        self.i = 0

    def round_poly(self, i: int) -> list[int]:
        s = self.s
        f = s.field
        deg = s.var_degree(i)
        pts = [f.element(j) for j in range(deg + 1)]
        g = [0] * (deg + 1)
        assign = self.assign
        unbound = list(range(i + 1, s.nvars))
        for term in s.terms:
            const = term.coef
            active: list | None = None
            live_factors: list = []
            covered: set = set()
            for factor in term.factors:
                live = [v for v in factor.support if v > i]
                covered.update(live)
                has_active = i in factor.support
                if not live and not has_active:
                    const = f.mul(const, factor.eval(assign))
                elif not live:
                    vec = []
                    for x in pts:
                        assign[i] = x
                        vec.append(factor.eval(assign))
                    assign[i] = None
                    active = vec if active is None else [f.mul(a, b) for a, b in zip(active, vec)]
                else:
                    live_factors.append(factor)
            # unbound variables no factor touches contribute |domain| copies
            for v in unbound:
                if v not in covered:
                    card = 0
                    for _ in s.domains[v].elements:
                        card = f.add(card, 1)
                    const = f.mul(const, card)
            if const == 0:
                continue
            # connected components over shared *summed* variables; the active
            # variable never merges components (per-sample products factorize)
            comp_scalar = 1
            comp_vecs: list[list[int]] = []
            if live_factors:
                for cvars, cfactors, has_active in _components(live_factors, i):
                    cvars = sorted(cvars)
                    doms = [s.domains[v].elements for v in cvars]
                    if has_active:
                        vec = []
                        for x in pts:
                            assign[i] = x
                            tot = 0
                            for combo in itertools.product(*doms):
                                for v, h in zip(cvars, combo):
                                    assign[v] = h
                                prod = 1
                                for factor in cfactors:
                                    prod = f.mul(prod, factor.eval(assign))
                                tot = f.add(tot, prod)
                            vec.append(tot)
                        assign[i] = None
                        for v in cvars:
                            assign[v] = None
                        comp_vecs.append(vec)
                    else:
                        tot = 0
                        for combo in itertools.product(*doms):
                            for v, h in zip(cvars, combo):
                                assign[v] = h
                            prod = 1
                            for factor in cfactors:
                                prod = f.mul(prod, factor.eval(assign))
                            tot = f.add(tot, prod)
                        for v in cvars:
                            assign[v] = None
                        comp_scalar = f.mul(comp_scalar, tot)
            weight = f.mul(const, comp_scalar)
            if weight == 0:
                continue
            for sidx in range(deg + 1):
                w = weight
                if active is not None:
                    w = f.mul(w, active[sidx])
                for vec in comp_vecs:
                    w = f.mul(w, vec[sidx])
                g[sidx] = f.add(g[sidx], w)
        return interpolate_univariate(f, pts, g)

    def receive_challenge(self, i: int, c: int):
        self.assign[i] = c
        self.i = i + 1


def _components(factors: list, active: int):
    """Group factors by shared summed (strictly-after-active) variables;
    returns (vars, factors, touches_active) per component."""
    n = len(factors)
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(a, b):
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[ra] = rb

    var_owner: dict[int, int] = {}
    for idx, factor in enumerate(factors):
        for v in factor.support:
            if v > active:
                if v in var_owner:
                    union(idx, var_owner[v])
                else:
                    var_owner[v] = idx
    groups: dict[int, list[int]] = {}
    for idx in range(n):
        groups.setdefault(find(idx), []).append(idx)
    out = []
    for idxs in groups.values():
        fs = [factors[j] for j in idxs]
        cvars = set()
        has_active = False
        for factor in fs:
            for v in factor.support:
                if v > active:
                    cvars.add(v)
                elif v == active:
                    has_active = True
        out.append((cvars, fs, has_active))
    return out


def build_child_evaluators(circuit: SumProductCircuit, inp: dict, v: str,
                           cache: dict, masks: dict | None = None):
    """One evaluator per outgoing edge of v (leaf circuit, table LDE, or
    randomized LDE when masks are given)."""
    g = circuit.graph
    out = []
    for e in g.out_edges[v]:
        u = e.dst
        if g.is_leaf(u):
            out.append(LeafChild(inp[u]))
        else:
            table = vertex_grid_table(circuit, inp, u, cache)
            base = TableChild(circuit.field, circuit.H, g.arity(u), table)
            if masks is not None:
                out.append(MaskedChild(base, masks[u], circuit.H))
            else:
                out.append(base)
    return out


def spc_summand(circuit: SumProductCircuit, v: str, labels, alphas, children,
                declared_bound: int, pzk: tuple | None = None) -> FactoredSummand:
    """The batched summand for vertex v's sumcheck.

    Without pzk: variables (c1 in H^{k_v}, c2 in H^{mu_v});
      sum_j alpha_j * L(gamma_j, c1) * C_v(c1, c2, children(...)).
    With pzk = (params, R_v): adds c3 in G^k, the G-kernel factor on the
    combiner part, and the mask term
      L((c1,c2), 0) * Z_H(gamma_j) * R_v(gamma_j, c3).
    """
    f = circuit.field
    g = circuit.graph
    k, mu = g.arity(v), g.mu(v)
    H = circuit.H
    outs = g.out_edges[v]
    comb = circuit.combiners[v]
    if pzk is None:
        domains = [H] * (k + mu)
        kk = 0
    else:
        params, R_v = pzk
        kk = params.k
        domains = [H] * (k + mu) + [params.G] * kk

    slot_factors: dict = {}

    def slot_factory(j):
        if j not in slot_factors:
            e = outs[j]
            positions = [i - 1 for i in e.sigma] + [k + i - 1 for i in e.tau]
            slot_factors[j] = ChildSlotFactor(children[j], positions)
        return slot_factors[j]

    comb_terms = build_combiner_terms(f, comb, k, mu, slot_factory)
    terms: list[Term] = []
    zero_kernel = None
    if pzk is not None:
        # per-variable kernel for L_{G^k}(0, c3)
        zero_kernel = _kernel_unipoly(f, pzk[0].G, 0)

    for (gamma, a), alpha in zip(labels, alphas):
        if alpha == 0:
            continue
        kernel_factors = [UniFactor(f, i, _kernel_unipoly(f, H, gamma[i]))
                          for i in range(k)]
        base_factors = list(kernel_factors)
        if pzk is not None:
            for t in range(kk):
                base_factors.append(UniFactor(f, k + mu + t, zero_kernel))
        for coef, factors in comb_terms:
            terms.append(Term(f.mul(alpha, coef), base_factors + factors))
        if pzk is not None:
            # mask term: L_{H^{k+mu}}((c1,c2), 0) * Z_H(gamma) * R_v(gamma, c3)
            params, R_v = pzk
            zk_h = _kernel_unipoly(f, H, 0)
            const = vanishing(f, H, gamma)
            if const != 0:
                factors = [UniFactor(f, i, zk_h) for i in range(k + mu)]
                rv_bound = R_v.bind_prefix(gamma)
                factors.append(PolyFactor(rv_bound, list(range(k + mu, k + mu + kk))))
                terms.append(Term(f.mul(alpha, const), factors))
    return FactoredSummand(f, domains, terms, declared_bound)


# -- the SPCE Interactive Proof ---------------------------------------------------


def _restrict_point(c1, c2, e: Edge):
    return tuple(c1[i - 1] for i in e.sigma) + tuple(c2[i - 1] for i in e.tau)


def _batch_check(circuit, v, labels, alphas, c1, c2, h, b, r=None, c3=None,
                 params=None):
    """The per-vertex verifier identity, with or without the mask term."""
    f = circuit.field
    g = circuit.graph
    comb = circuit.combiners[v]
    k = g.arity(v)
    cv = comb.eval(list(c1) + list(c2) + list(h))
    rhs = 0
    for j, ((gamma, _a), alpha) in enumerate(zip(labels, alphas)):
        kern = lagrange_kernel(f, circuit.H, k, gamma, c1)
        term = f.mul(kern, cv)
        if params is not None:
            gk = lagrange_kernel(f, params.G, params.k, (0,) * params.k, c3)
            term = f.mul(gk, term)
            zero_kern = lagrange_kernel(f, circuit.H, k + len(c2),
                                        tuple(c1) + tuple(c2), (0,) * (k + len(c2)))
            mask = f.mul(zero_kern, f.mul(vanishing(f, circuit.H, gamma), r[j]))
            term = f.add(term, mask)
        rhs = f.add(rhs, f.mul(alpha, term))
    return rhs == b


def _add_label(labels: dict, u: str, pt: tuple, value: int):
    for g, a in labels[u]:
        if g == pt:
            return
    labels[u].append((pt, value))


def spce_run(circuit: SumProductCircuit, y: int, inp: dict, rng: DomainRNG, *,
             transcript: Transcript | None = None, cheat: bool = False):
    """The sum-product circuit evaluation Interactive Proof (honest prover, or
    a consistent-liar prover when cheat=True and the claim is false).

    Returns (transcript, accepted)."""
    t = transcript if transcript is not None else Transcript()
    inp = normalize_input(circuit, inp)
    f = circuit.field
    g = circuit.graph
    H = circuit.H
    bound = 2 * circuit.d_in * circuit.d_lf
    if g.arity(g.root) != 0:
        raise ZkipcpError("SPCE needs a circuit (root arity 0)")
    labels: dict = {v: [] for v in g.vertices}
    labels[g.root] = [((), y)]
    cache: dict = {}
    full = None
    if cheat:
        cap = min(f.order, bound + 1)
        full = SubsetSpec("roots", f, tuple(f.element(i) for i in range(cap)))
    for v in g.topo_order():
        if g.is_leaf(v) or not labels[v]:
            continue
        labs = labels[v]
        k, mu = g.arity(v), g.mu(v)
        arng = rng.child(f"alpha.{v}")
        alphas = [arng.field_element(f) for _ in labs]
        for j, alpha in enumerate(alphas):
            t.challenge(f"{v}.alpha{j}", alpha)
        target = 0
        for (gamma, a), alpha in zip(labs, alphas):
            target = f.add(target, f.mul(alpha, a))
        children = build_child_evaluators(circuit, inp, v, cache)
        summand = spc_summand(circuit, v, labs, alphas, children, bound)
        assert all(summand.var_degree(i) <= bound for i in range(summand.nvars)), \
            "summand degree discipline violated"
        prover = summand.fresh_prover()
        if cheat:
            true_target = 0
            for (gamma, _a), alpha in zip(labs, alphas):
                lv = lde_value(circuit, inp, v, gamma, cache) if gamma else \
                    vertex_grid_table(circuit, inp, v, cache)[0]
                true_target = f.add(true_target, f.mul(alpha, lv))
            deficit = f.sub(target, true_target)
            if deficit != 0:
                prover = _SpcLiar(prover, f, [H] * (k + mu), bound, full, deficit)
        b, chal, ok = run_rounds(prover, (H,) * (k + mu), f, bound, target, None,
                                 rng.child(f"rounds.{v}"), t, f"{v}.sc")
        if not ok:
            return t, False
        c1, c2 = chal[:k], chal[k:]
        h = [children[j].eval(_restrict_point(c1, c2, e))
             for j, e in enumerate(g.out_edges[v])]
        t.prover(f"{v}.h", tuple(h))
        if not _batch_check(circuit, v, labs, alphas, c1, c2, h, b):
            t.reject(f"spce: vertex check failed at {v}")
            return t, False
        for e, hv in zip(g.out_edges[v], h):
            _add_label(labels, e.dst, _restrict_point(c1, c2, e), hv)
    for v in g.leaves:
        for gamma, a in labels[v]:
            if leaf_eval(inp[v], gamma) != a:
                t.reject(f"spce: leaf check failed at {v}")
                return t, False
    t.accept(OutputClaim((), y))
    return t, True


class _SpcLiar:
    """ConsistentLiar over a factored round prover (import-cycle-free copy of
    the correction logic in sumcheck.ConsistentLiar)."""

    def __init__(self, inner, field, sets, bound, roots, deficit):
        from .sumcheck import ConsistentLiar
        self._liar = ConsistentLiar(inner, field, sets, bound, roots, deficit)

    def round_poly(self, i):
        return self._liar.round_poly(i)

    def receive_challenge(self, i, c):
        self._liar.receive_challenge(i, c)


# -- SPCS: satisfaction with witness oracles and the curve trick ----------------------


def curve_through(field: Field, ts: Sequence[int], points: Sequence[tuple]):
    """Per-coordinate univariate polynomials of degree < len(points) with
    Curve(t_i) = points[i]."""
    dim = len(points[0]) if points else 0
    return [interpolate_univariate(field, list(ts), [p[i] for p in points])
            for i in range(dim)]


def eval_curve(field: Field, coords, t: int) -> tuple:
    return tuple(eval_univariate(field, c, t) for c in coords)


def curve_check(field, oracle, bounds, labels, eval_fn, rng: DomainRNG,
                transcript: Transcript, tag: str, compiled: bool, ldt_reps: int,
                claimed=None) -> bool:
    """Verify claimed values of an oracle-backed polynomial at the label
    points with a single (checked) oracle read: interpolation through a curve,
    a prover-sent composition polynomial, and a random evaluation point.

    eval_fn is the prover-side true polynomial (used to produce the composed
    polynomial); claimed overrides the per-label values to verify (defaults to
    the label values)."""
    values = claimed if claimed is not None else [a for _g, a in labels]
    pts = [g for g, _a in labels]
    ell = len(pts)
    if ell == 1:
        v, ok = checked_read(oracle, pts[0], bounds, ldt_reps, rng.child("read"), compiled)
        transcript.oracle(tag, pts[0], v)
        if not ok:
            transcript.reject(f"{tag}: low-degree test failed")
            return False
        if v != values[0]:
            transcript.reject(f"{tag}: oracle value mismatch")
            return False
        return True
    ts = [field.element(i) for i in range(ell)]
    coords = curve_through(field, ts, pts)
    comp_degree = (ell - 1) * sum(bounds)
    if field.order <= comp_degree + 1:
        raise FieldTooSmallForCurve(comp_degree, field.order)
    sample = [field.element(i) for i in range(comp_degree + 1)]
    comp = interpolate_univariate(
        field, sample, [eval_fn(eval_curve(field, coords, s)) for s in sample])
    transcript.prover(f"{tag}.curve", tuple(comp))
    for ti, vi in zip(ts, values):
        if eval_univariate(field, comp, ti) != vi:
            transcript.reject(f"{tag}: curve check failed at interpolation point")
            return False
    tstar = rng.child("t").field_element(field)
    transcript.challenge(f"{tag}.t", tstar)
    pt = eval_curve(field, coords, tstar)
    v, ok = checked_read(oracle, pt, bounds, ldt_reps, rng.child("read"), compiled)
    transcript.oracle(tag, pt, v)
    if not ok:
        transcript.reject(f"{tag}: low-degree test failed")
        return False
    if v != eval_univariate(field, comp, tstar):
        transcript.reject(f"{tag}: curve check failed at random point")
        return False
    return True


class FieldTooSmallForCurve(ZkipcpError):
    def __init__(self, degree, order):
        super().__init__(f"curve composition degree {degree} needs |F| > {degree + 1}, have {order}")


def spcs_run(circuit: SumProductCircuit, y: int, explicit: dict, witness: dict,
             rng: DomainRNG, *, compiled: bool = True, ldt_reps: int = 2,
             transcript: Transcript | None = None, cheat: bool = False,
             forged_witness: dict | None = None):
    """Sum-product circuit satisfaction: auxiliary leaves are served as
    oracles, validated at the end through the curve trick plus low-degree
    testing and self-correction.  Returns (transcript, accepted)."""
    t = transcript if transcript is not None else Transcript()
    f = circuit.field
    g = circuit.graph
    full_inp = dict(explicit)
    full_inp.update(witness)
    full_inp = normalize_input(circuit, full_inp)
    aux = [v for v in g.leaves if v not in explicit]
    oracles = OracleBundle()
    for w in aux:
        poly = full_inp[w]
        poly = poly if isinstance(poly, MultiPoly) else poly.compile()
        oracles[f"z[{w}]"] = materialize(poly, f"z[{w}]")

    # the interactive part is the SPCE protocol on the full input
    labels: dict = {v: [] for v in g.vertices}
    labels[g.root] = [((), y)]
    cache: dict = {}
    H = circuit.H
    bound = 2 * circuit.d_in * circuit.d_lf
    full = None
    if cheat:
        cap = min(f.order, bound + 1)
        full = SubsetSpec("roots", f, tuple(f.element(i) for i in range(cap)))
    for v in g.topo_order():
        if g.is_leaf(v) or not labels[v]:
            continue
        labs = labels[v]
        k, mu = g.arity(v), g.mu(v)
        arng = rng.child(f"alpha.{v}")
        alphas = [arng.field_element(f) for _ in labs]
        for j, alpha in enumerate(alphas):
            t.challenge(f"{v}.alpha{j}", alpha)
        target = 0
        for (gamma, a), alpha in zip(labs, alphas):
            target = f.add(target, f.mul(alpha, a))
        children = build_child_evaluators(circuit, full_inp, v, cache)
        summand = spc_summand(circuit, v, labs, alphas, children, bound)
        prover = summand.fresh_prover()
        if cheat:
            true_target = 0
            for (gamma, _a), alpha in zip(labs, alphas):
                lv = lde_value(circuit, full_inp, v, gamma, cache)
                true_target = f.add(true_target, f.mul(alpha, lv))
            deficit = f.sub(target, true_target)
            if deficit != 0:
                prover = _SpcLiar(prover, f, [H] * (k + mu), bound, full, deficit)
        b, chal, ok = run_rounds(prover, (H,) * (k + mu), f, bound, target, None,
                                 rng.child(f"rounds.{v}"), t, f"{v}.sc")
        if not ok:
            return t, False
        c1, c2 = chal[:k], chal[k:]
        h = [children[j].eval(_restrict_point(c1, c2, e))
             for j, e in enumerate(g.out_edges[v])]
        t.prover(f"{v}.h", tuple(h))
        if not _batch_check(circuit, v, labs, alphas, c1, c2, h, b):
            t.reject(f"spcs: vertex check failed at {v}")
            return t, False
        for e, hv in zip(g.out_edges[v], h):
            _add_label(labels, e.dst, _restrict_point(c1, c2, e), hv)

    for v in g.leaves:
        if not labels[v]:
            continue
        if v in explicit:
            for gamma, a in labels[v]:
                if leaf_eval(full_inp[v], gamma) != a:
                    t.reject(f"spcs: leaf check failed at {v}")
                    return t, False
        else:
            poly = full_inp[v]
            poly = poly if isinstance(poly, MultiPoly) else poly.compile()
            eval_src = poly if forged_witness is None or v not in forged_witness \
                else forged_witness[v]
            bounds = (circuit.d_lf,) * g.arity(v)
            if not curve_check(f, oracles[f"z[{v}]"], bounds, labels[v],
                               eval_src.eval, rng.child(f"curve.{v}"), t,
                               f"z[{v}]", compiled, ldt_reps):
                return t, False
    t.accept(OutputClaim((), y))
    return t, True


# -- perfect zero knowledge variants ------------------------------------------------


@dataclass
class SPCZKParams:
    """lambda = 2 * d_in * (d_lf + max-in-degree); G a size-lambda subset with
    0 in G; I = F minus H; k derived from the query bound."""

    lam: int
    k: int
    G: SubsetSpec
    I: SubsetSpec

    @property
    def query_bound(self) -> int:
        return self.lam ** self.k


def pzk_params(circuit: SumProductCircuit, k: int | None = None,
               query_bound: int | None = None) -> SPCZKParams:
    import math
    lam = 2 * circuit.d_in * (circuit.d_lf + circuit.graph.max_in_degree())
    if lam > circuit.field.order:
        raise ZkipcpError(f"lambda = {lam} exceeds |F| = {circuit.field.order}")
    G = enumerate_subset(circuit.field, lam, name="G", require_zero=True)
    I = complement_subset(circuit.field, circuit.H)
    if k is None:
        if query_bound is None:
            k = 1
        else:
            k = max(1, math.ceil(math.log(query_bound) / math.log(lam)))
    return SPCZKParams(lam, k, G, I)


def _inner_strong_params(circuit: SumProductCircuit, params: SPCZKParams) -> StrongParams:
    return StrongParams(params.lam, params.k, params.G, params.I)


def _pzk_masks(circuit: SumProductCircuit, params: SPCZKParams, rng: DomainRNG):
    """Per-internal-vertex mask R_v (dense) and its fiber sum S_v.

    The root's arity is 0, so its randomized LDE has no vanishing factor
    protecting the public claim; its mask is drawn conditioned to have zero
    fiber sum, which keeps the claim intact and costs nothing (the root's
    in-degree is 0, so no mask values are ever revealed for hiding)."""
    g = circuit.graph
    masks = {}
    mask_sums = {}
    for v in g.internal:
        bounds = (len(g.in_edges[v]),) * g.arity(v) + (2 * params.lam,) * params.k
        if g.in_edges[v]:
            R = sample_uniform_poly(circuit.field, bounds, rng.child(f"R.{v}"))
        else:
            R = sample_constrained_poly(
                circuit.field, bounds,
                [(PrefixQuery((0,) * g.arity(v), (params.G,) * params.k), 0)],
                rng.child(f"R.{v}"))
        masks[v] = R
        S = R
        for _ in range(params.k):
            S = S.sum_last(params.G)
        mask_sums[v] = S
    return masks, mask_sums


def _pzk_engine(circuit: SumProductCircuit, y: int, inp: dict, params: SPCZKParams,
                rng: DomainRNG, *, simulate: bool, compiled: bool, ldt_reps: int,
                transcript: Transcript | None, aux_leaves: Sequence[str] = (),
                witness: dict | None = None, challenge_fn=None, budget: int | None = None,
                mask_degree_offset: int = 0, f_query_log: list | None = None,
                do_final_checks: bool = True):
    """Shared body of the PZK SPCE protocol and its simulator.

    In real mode the prover holds the full input (explicit plus witness) and
    every mask; in simulate mode masks are drawn uniformly, internal child
    values are replaced by cached-or-fresh uniform elements, and auxiliary
    leaf oracles are answered from sampler sessions.
    """
    t = transcript if transcript is not None else Transcript()
    f = circuit.field
    g = circuit.graph
    H = circuit.H
    inner_params = _inner_strong_params(circuit, params)
    full_inp = dict(inp)
    if witness:
        full_inp.update(witness)
    if not simulate:
        full_inp = normalize_input(circuit, full_inp)

    masks, mask_sums = _pzk_masks(circuit, params, rng.child("masks"))
    oracles = OracleBundle()
    for v in g.internal:
        oracles[f"R[{v}]"] = materialize(masks[v], f"R[{v}]", budget)
    aux_sessions: dict = {}
    if simulate:
        for w in aux_leaves:
            space = PolySpace(f, (circuit.d_lf,) * (g.arity(w) - params.k)
                              + (2 * len(H),) * params.k)
            aux_sessions[w] = ConstraintSet(space, rng.child(f"aux.{w}"))
            cs = aux_sessions[w]
            oracles[f"z[{w}]"] = Oracle(
                f, g.arity(w), (lambda cs: lambda pt: cs.sample(PrefixQuery.point(pt)))(cs),
                f"z[{w}]", budget)
    else:
        for w in aux_leaves:
            poly = full_inp[w]
            poly = poly if isinstance(poly, MultiPoly) else poly.compile()
            oracles[f"z[{w}]"] = materialize(poly, f"z[{w}]", budget)

    labels: dict = {v: [] for v in g.vertices}
    labels[g.root] = [((), y)]
    cache: dict = {}
    sub_sims = []

    def leaf_value(w, pt):
        if simulate and w in aux_sessions:
            return aux_sessions[w].sample(PrefixQuery.point(pt))
        return leaf_eval(full_inp[w], pt)

    for v in g.topo_order():
        if g.is_leaf(v) or not labels[v]:
            continue
        labs = labels[v]
        k, mu = g.arity(v), g.mu(v)
        kk = params.k
        arng = rng.child(f"alpha.{v}")
        alphas = []
        for j in range(len(labs)):
            if challenge_fn is not None:
                alpha = challenge_fn(f"{v}.alpha{j}")
            else:
                alpha = arng.field_element(f)
            alphas.append(alpha)
            t.challenge(f"{v}.alpha{j}", alpha)
        target = 0
        for (gamma, a), alpha in zip(labs, alphas):
            target = f.add(target, f.mul(alpha, a))
        inner_inst = SumcheckInstance(
            f, k + mu + kk, 2 * params.lam, H, target,
            sum_sets=(H,) * (k + mu) + (params.G,) * kk, strict=False)

        if not simulate:
            children = build_child_evaluators(circuit, full_inp, v, cache,
                                              masks=mask_sums)
            summand = spc_summand(circuit, v, labs, alphas, children,
                                  2 * params.lam, pzk=(params, masks[v]))
            inner_bounds = _inner_bounds(circuit, params, v, k, mu, kk)
            assert all(summand.var_degree(i) <= inner_bounds[i]
                       for i in range(summand.nvars)), "pzk degree discipline violated"
            inner_inst = SumcheckInstance(
                f, k + mu + kk, 2 * params.lam, H, target,
                sum_sets=(H,) * (k + mu) + (params.G,) * kk, strict=False,
                bounds=_inner_bounds(circuit, params, v, k, mu, kk))
            from .sumcheck import HonestStrongProver
            inner = HonestStrongProver(summand, inner_inst, inner_params,
                                       rng.child(f"inner.{v}"), budget)
            t2, claim, inner_bundle = strong_zk_run(
                inner_inst, inner_params, inner, rng.child(f"vrf.{v}"),
                compiled=compiled, ldt_reps=ldt_reps, transcript=t, tag=f"{v}.",
                challenge_fn=challenge_fn, do_final_checks=do_final_checks)
            if claim is None:
                return t, False, oracles, sub_sims
            c = claim.point
            c1, c2, c3 = c[:k], c[k:k + mu], c[k + mu:]
            h = [children[j].eval(_restrict_point(c1, c2, e))
                 for j, e in enumerate(g.out_edges[v])]
            r = [masks[v].eval(tuple(gamma) + tuple(c3)) for gamma, _a in labs]
        else:
            stash: dict = {}

            def make_query(v, labs, alphas, stash):
                def f_query(c):
                    k = g.arity(v)
                    mu = g.mu(v)
                    c1, c2, c3 = c[:k], c[k:k + mu], c[k + mu:]
                    hs = []
                    for e in g.out_edges[v]:
                        u = e.dst
                        pt = _restrict_point(c1, c2, e)
                        if g.is_leaf(u):
                            hv = leaf_value(u, pt)
                        else:
                            hv = None
                            for gam, val in labels[u]:
                                if gam == pt:
                                    hv = val
                                    break
                            if hv is None:
                                hv = rng.child(f"h.{v}.{u}.{pt}").field_element(f)
                                labels[u].append((pt, hv))
                        hs.append(hv)
                    rs = [masks[v].eval(tuple(gamma) + tuple(c3)) for gamma, _a in labs]
                    stash["h"] = hs
                    stash["r"] = rs
                    stash["c"] = c
                    value = 0
                    comb = circuit.combiners[v]
                    cv = comb.eval(list(c1) + list(c2) + hs)
                    for jj, ((gamma, _a), alpha) in enumerate(zip(labs, alphas)):
                        gk = lagrange_kernel(f, params.G, params.k, (0,) * params.k, c3)
                        kern = lagrange_kernel(f, H, k, gamma, c1)
                        term = f.mul(gk, f.mul(kern, cv))
                        zk = lagrange_kernel(f, H, k + mu, tuple(c1) + tuple(c2),
                                             (0,) * (k + mu))
                        mask_term = f.mul(zk, f.mul(vanishing(f, H, gamma), rs[jj]))
                        value = f.add(value, f.mul(alpha, f.add(term, mask_term)))
                    return value
                return f_query

            inner_inst = SumcheckInstance(
                f, k + mu + kk, 2 * params.lam, H, target,
                sum_sets=(H,) * (k + mu) + (params.G,) * kk, strict=False,
                bounds=_inner_bounds(circuit, params, v, k, mu, kk))
            sub = StrongZKSimulator(inner_inst, inner_params, make_query(v, labs, alphas, stash),
                                    rng.child(f"sub.{v}"), budget=budget,
                                    mask_degree_offset=mask_degree_offset)
            sub_sims.append(sub)
            t2, claim, _ = strong_zk_run(
                inner_inst, inner_params, sub, rng.child(f"vrf.{v}"),
                compiled=False, transcript=t, tag=f"{v}.",
                challenge_fn=challenge_fn, do_final_checks=do_final_checks)
            if claim is None:
                return t, False, oracles, sub_sims
            c = claim.point
            c1, c2, c3 = c[:k], c[k:k + mu], c[k + mu:]
            h, r = stash["h"], stash["r"]

        t.prover(f"{v}.h", tuple(h))
        t.prover(f"{v}.r", tuple(r))
        if not _batch_check(circuit, v, labs, alphas, c1, c2, h, claim.value,
                            r=r, c3=c3, params=params):
            t.reject(f"pzk: vertex identity failed at {v}")
            return t, False, oracles, sub_sims
        if do_final_checks:
            mask_bounds = (len(g.in_edges[v]),) * k + (2 * params.lam,) * kk
            pts = [(tuple(gamma) + tuple(c3)) for gamma, _a in labs]
            pairs = list(zip(pts, r))
            if not curve_check(f, oracles[f"R[{v}]"], mask_bounds, pairs,
                               masks[v].eval, rng.child(f"rcheck.{v}"), t,
                               f"R[{v}]", compiled, ldt_reps):
                return t, False, oracles, sub_sims
        for e, hv in zip(g.out_edges[v], h):
            _add_label(labels, e.dst, _restrict_point(c1, c2, e), hv)

    for v in g.leaves:
        if not labels[v]:
            continue
        if v in aux_leaves:
            if do_final_checks:
                bounds = (circuit.d_lf,) * (g.arity(v) - params.k) \
                    + (2 * len(H),) * params.k
                if simulate:
                    def eval_fn(pt, v=v):
                        return aux_sessions[v].sample(PrefixQuery.point(pt))
                else:
                    poly = full_inp[v]
                    poly = poly if isinstance(poly, MultiPoly) else poly.compile()
                    eval_fn = poly.eval
                if not curve_check(f, oracles[f"z[{v}]"], bounds, labels[v],
                                   eval_fn, rng.child(f"leafcheck.{v}"), t,
                                   f"z[{v}]", compiled, ldt_reps):
                    return t, False, oracles, sub_sims
        else:
            for gamma, a in labels[v]:
                if leaf_value(v, gamma) != a:
                    t.reject(f"pzk: leaf check failed at {v}")
                    return t, False, oracles, sub_sims
    t.accept(OutputClaim((), y))
    return t, True, oracles, sub_sims


def _inner_bounds(circuit: SumProductCircuit, params: SPCZKParams, v: str,
                  k: int, mu: int, kk: int) -> tuple:
    """Public per-variable degree bounds of the vertex summand, derived only
    from the circuit structure so prover and verifier agree: combiner degree
    plus slot-weighted child degrees plus the label kernel, capped by the
    paper's uniform 2*lambda bound (the mask block keeps the full bound)."""
    g = circuit.graph
    H = circuit.H
    comb = circuit.combiners[v]
    outs = g.out_edges[v]

    def child_deg(e: Edge) -> int:
        u = e.dst
        if g.is_leaf(u):
            return circuit.d_lf
        return len(H) + len(g.in_edges[u])

    bounds = []
    for i in range(k + mu):
        a_deg = comb.var_degree(i)
        for j, e in enumerate(outs):
            slot_deg = comb.var_degree(k + mu + j)
            if not slot_deg:
                continue
            positions = [x - 1 for x in e.sigma] + [k + x - 1 for x in e.tau]
            if i in positions:
                a_deg += slot_deg * child_deg(e)
        if i < k:
            a_deg += len(H) - 1  # the label kernel on the free block
        bound_i = max(a_deg, len(H) - 1)  # the mask term's zero kernel
        bounds.append(min(bound_i, 2 * params.lam))
    bounds.extend([2 * params.lam] * kk)  # the mask block carries R_v
    return tuple(bounds)


def pzk_spce_run(circuit, y, inp, params, rng, *, compiled=True, ldt_reps=2,
                 transcript=None, challenge_fn=None, budget=None,
                 do_final_checks=True):
    t, ok, oracles, _ = _pzk_engine(
        circuit, y, inp, params, rng, simulate=False, compiled=compiled,
        ldt_reps=ldt_reps, transcript=transcript, challenge_fn=challenge_fn,
        budget=budget, do_final_checks=do_final_checks)
    return t, ok, oracles


def pzk_spce_simulate(circuit, y, inp, params, rng, *, transcript=None,
                      challenge_fn=None, budget=None, mask_degree_offset=0,
                      do_final_checks=True):
    t, ok, oracles, subs = _pzk_engine(
        circuit, y, inp, params, rng, simulate=True, compiled=False,
        ldt_reps=1, transcript=transcript, challenge_fn=challenge_fn,
        budget=budget, mask_degree_offset=mask_degree_offset,
        do_final_checks=do_final_checks)
    return t, ok, oracles, subs


# -- SPCS -> SPCE witness-commitment transform ----------------------------------------


def pzk_spcs_transform(circuit: SumProductCircuit, explicit: dict,
                       params: SPCZKParams):
    """Add a lifted vertex below each auxiliary leaf; returns (new circuit,
    lift) where lift(witness, rng) samples the hiding auxiliary input."""
    from . import circuit as ac
    g = circuit.graph
    aux = [w for w in g.leaves if w not in explicit]
    vertices = list(g.vertices)
    edges = list(g.edges)
    combiners = dict(circuit.combiners)
    new_leaves = {}
    for w in aux:
        vw = f"{w}#lift"
        k_w = g.arity(w)
        vertices.append(vw)
        edges.append(Edge(w, vw, tuple(range(1, k_w + 1)),
                          tuple(range(1, params.k + 1))))
        # w becomes internal with the identity combiner C(X, Y, Z) = Z
        combiners[w] = ac.ArithCircuit(circuit.field, k_w + params.k + 1,
                                       ac.var(k_w + params.k))
        new_leaves[w] = vw
    d_lf2 = max(circuit.d_lf, 2 * len(circuit.H))
    circuit2 = SumProductCircuit(circuit.field, circuit.H, circuit.d_in, d_lf2,
                                 AriGraph(vertices, edges, g.root), combiners)

    def lift(witness: dict, rng: DomainRNG) -> dict:
        out = {}
        K = enumerate_subset(circuit.field, circuit.d_lf + 1, name="K")
        for w, vw in new_leaves.items():
            z = witness[w]
            z = z if isinstance(z, MultiPoly) else z.compile()
            k_w = g.arity(w)
            bounds = (circuit.d_lf,) * k_w + (2 * len(circuit.H),) * params.k
            constraints = []
            for alpha in grid(K, k_w):
                constraints.append((
                    PrefixQuery(alpha, (circuit.H,) * params.k), z.eval(alpha)))
            out[vw] = sample_constrained_poly(circuit.field, bounds, constraints,
                                              rng.child(f"lift.{w}"))
        return out

    return circuit2, new_leaves, lift


def pzk_spcs_run(circuit, y, explicit, witness, params, rng, *, compiled=True,
                 ldt_reps=2, transcript=None, challenge_fn=None, budget=None,
                 do_final_checks=True):
    circuit2, new_leaves, lift = pzk_spcs_transform(circuit, explicit, params)
    # lambda is prescribed by the transformed circuit (its leaf degree grew)
    params2 = pzk_params(circuit2, k=params.k)
    lifted = lift(witness, rng.child("lift"))
    t, ok, oracles, _ = _pzk_engine(
        circuit2, y, explicit, params2, rng, simulate=False, compiled=compiled,
        ldt_reps=ldt_reps, transcript=transcript,
        aux_leaves=tuple(lifted.keys()), witness=lifted,
        challenge_fn=challenge_fn, budget=budget, do_final_checks=do_final_checks)
    return t, ok, oracles


def pzk_spcs_simulate(circuit, y, explicit, params, rng, *, transcript=None,
                      challenge_fn=None, budget=None, mask_degree_offset=0,
                      do_final_checks=True):
    circuit2, new_leaves, _lift = pzk_spcs_transform(circuit, explicit, params)
    params2 = pzk_params(circuit2, k=params.k)
    t, ok, oracles, subs = _pzk_engine(
        circuit2, y, explicit, params2, rng, simulate=True, compiled=False,
        ldt_reps=1, transcript=transcript,
        aux_leaves=tuple(new_leaves.values()),
        challenge_fn=challenge_fn, budget=budget,
        mask_degree_offset=mask_degree_offset, do_final_checks=do_final_checks)
    return t, ok, oracles, subs


# -- document formats -----------------------------------------------------------------


def circuit_doc(circuit: SumProductCircuit) -> dict:
    return {
        "field": circuit.field.spec_doc(),
        "H": [format(h, "x") for h in circuit.H.elements],
        "d_in": circuit.d_in,
        "d_lf": circuit.d_lf,
        "root": circuit.graph.root,
        "vertices": [
            {"id": v, **({"combiner": circuit.combiners[v].doc()}
                         if v in circuit.combiners else {"leaf": True})}
            for v in circuit.graph.vertices
        ],
        "edges": [
            {"from": e.src, "to": e.dst, "sigma": list(e.sigma), "tau": list(e.tau)}
            for e in circuit.graph.edges
        ],
    }


def circuit_from_doc(doc: dict) -> SumProductCircuit:
    field = Field.from_doc(doc["field"])
    H = subset_from(field, tuple(int(h, 16) for h in doc["H"]), "H")
    vertices = [v["id"] for v in doc["vertices"]]
    combiners = {v["id"]: ArithCircuit.from_doc(field, v["combiner"])
                 for v in doc["vertices"] if "combiner" in v}
    edges = [Edge(e["from"], e["to"], tuple(e["sigma"]), tuple(e["tau"]))
             for e in doc["edges"]]
    graph = AriGraph(vertices, edges, doc["root"])
    return SumProductCircuit(field, H, doc["d_in"], doc["d_lf"], graph, combiners)


def input_doc(inp: dict) -> dict:
    out = {}
    for v, poly in inp.items():
        if isinstance(poly, MultiPoly):
            out[v] = {"poly": poly.doc()}
        else:
            out[v] = {"circuit": poly.doc()}
    return out


def input_from_doc(field: Field, doc: dict) -> dict:
    out = {}
    for v, entry in doc.items():
        if "poly" in entry:
            out[v] = MultiPoly.from_doc(field, entry["poly"])
        else:
            out[v] = ArithCircuit.from_doc(field, entry["circuit"])
    return out
