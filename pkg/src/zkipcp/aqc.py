"""Algebraic query complexity of polynomial summation, checked exactly.

Hiding claims reduce to a rank statement: the fiber-sum functionals
{ Z -> sum_{y in G^k} Z(alpha, y) } must span a subspace meeting the span of
the adversary's point-evaluation functionals only at zero.  We verify this by
Gaussian elimination over the dense monomial basis, and also provide the
closed-form summation identities (multilinear, multiplicative-group,
additive-group) that show the degree thresholds are tight.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

from .errors import DegreeTooHigh, NotMultilinear, NotSubgroup
from .field import Field, SubsetSpec, enumerate_subset, subset_from
from .mpoly import MultiPoly, PrefixQuery, grid
from .sampler import PolySpace


def _rank(field: Field, rows: list[list[int]]) -> int:
    """Rank over F by in-place elimination (rows are copied)."""
    rows = [list(r) for r in rows]
    sub, mul, inv = field.sub, field.mul, field.inv
    rank = 0
    ncols = len(rows[0]) if rows else 0
    pivot_col = 0
    while rank < len(rows) and pivot_col < ncols:
        pivot = next((i for i in range(rank, len(rows)) if rows[i][pivot_col]), None)
        if pivot is None:
            pivot_col += 1
            continue
        rows[rank], rows[pivot] = rows[pivot], rows[rank]
        factor = inv(rows[rank][pivot_col])
        rows[rank] = [mul(factor, c) for c in rows[rank]]
        for i in range(len(rows)):
            if i != rank and rows[i][pivot_col]:
                c = rows[i][pivot_col]
                rows[i] = [sub(a, mul(c, b)) for a, b in zip(rows[i], rows[rank])]
        rank += 1
        pivot_col += 1
    return rank


def _left_nullspace(field: Field, rows: list[list[int]]) -> list[list[int]]:
    """Basis of {c : sum_i c_i * rows[i] = 0} (coefficients over the rows)."""
    n = len(rows)
    ncols = len(rows[0]) if rows else 0
    # augment each row with an identity tag; eliminate on the row space
    aug = [list(rows[i]) + [1 if j == i else 0 for j in range(n)] for i in range(n)]
    sub, mul, inv = field.sub, field.mul, field.inv
    rank = 0
    for col in range(ncols):
        pivot = next((i for i in range(rank, n) if aug[i][col]), None)
        if pivot is None:
            continue
        aug[rank], aug[pivot] = aug[pivot], aug[rank]
        factor = inv(aug[rank][col])
        aug[rank] = [mul(factor, c) for c in aug[rank]]
        for i in range(n):
            if i != rank and aug[i][col]:
                c = aug[i][col]
                aug[i] = [sub(a, mul(c, b)) for a, b in zip(aug[i], aug[rank])]
        rank += 1
        if rank == n:
            break
    return [row[ncols:] for row in aug[rank:]]


@dataclass
class DependenceWitness:
    """Concrete linear combination exhibiting leakage: sum over alpha in K^m of
    c_alpha * (fiber sum at alpha) equals sum over q in Q of d_q * Z(q) for all
    Z in the space, with the left side not identically zero."""

    k_points: list[tuple]
    c: list[int]
    queries: list[tuple]
    d: list[int]

    def verify(self, field: Field, space: PolySpace, G: SubsetSpec, k: int,
               trials: int, rng) -> bool:
        from .mpoly import sample_uniform_poly
        m = space.m - k
        for _ in range(trials):
            Z = sample_uniform_poly(field, space.bounds, rng)
            lhs = 0
            for alpha, c in zip(self.k_points, self.c):
                if c:
                    s = Z.partial_sum(PrefixQuery.over(alpha, G, k))
                    lhs = field.add(lhs, field.mul(c, s))
            rhs = 0
            for q, d in zip(self.queries, self.d):
                if d:
                    rhs = field.add(rhs, field.mul(d, Z.eval(q)))
            if lhs != rhs:
                return False
        return True


def sum_functionals(field: Field, m: int, k: int, d: int, dprime: int,
                    G: SubsetSpec) -> tuple[PolySpace, list[tuple], list[list[int]]]:
    """The fiber-sum functional ensemble, restricted to a spanning set over
    K^m with |K| = d+1 (the map alpha -> functional is degree-d polynomial in
    alpha, so the K^m grid spans the whole ensemble)."""
    space = PolySpace(field, (d,) * m + (dprime,) * k)
    K = enumerate_subset(field, d + 1, name="K")
    pts = list(grid(K, m))
    rows = [space.functional(PrefixQuery.over(alpha, G, k)) for alpha in pts]
    return space, pts, rows


def independence_check(field: Field, m: int, k: int, d: int, dprime: int,
                       G: SubsetSpec, queries: Sequence[tuple]):
    """Return (True, None) if the fiber-sum ensemble is statistically
    independent of the answers at `queries`; else (False, witness)."""
    space, k_points, sum_rows = sum_functionals(field, m, k, d, dprime, G)
    point_rows = [space.point_functional(q) for q in queries]
    if not point_rows:
        # independent iff some sum functional is nonzero, which always holds
        return True, None
    stacked = sum_rows + [row for row in point_rows]
    null = _left_nullspace(field, stacked)
    nsum = len(sum_rows)
    for combo in null:
        c_part = combo[:nsum]
        # nontrivial iff the sum-functional side of the combination is nonzero
        lhs = [0] * space.size
        nonzero = False
        for ci, row in zip(c_part, sum_rows):
            if ci:
                lhs = [field.add(a, field.mul(ci, b)) for a, b in zip(lhs, row)]
        nonzero = any(lhs)
        if nonzero:
            d_part = [field.neg(x) for x in combo[nsum:]]
            return False, DependenceWitness(k_points, c_part, list(queries), d_part)
    return True, None


def query_threshold_scan(field: Field, m: int, k: int, d: int, dprime: int,
                         G: SubsetSpec, rng=None, random_sets: int = 1000):
    """Smallest dependent query-set size found; scans exhaustively for k=1 and
    by random sampling for larger k, always including the full fiber {0}^m x G^k
    (which is dependent by definition)."""
    all_points = list(itertools.product(field.elements(), repeat=m + k))
    target = len(G) ** k
    if k == 1 and len(all_points) <= 512:
        for size in range(1, target):
            for Q in itertools.combinations(all_points, size):
                ok, witness = independence_check(field, m, k, d, dprime, G, list(Q))
                if not ok:
                    return size, list(Q), witness
    else:
        for size in range(1, target):
            for _ in range(random_sets):
                Q = [tuple(rng.field_element(field) for _ in range(m + k))
                     for _ in range(size)]
                ok, witness = independence_check(field, m, k, d, dprime, G, Q)
                if not ok:
                    return size, Q, witness
    fiber = [tuple([0] * m) + beta for beta in itertools.product(G.elements, repeat=k)]
    ok, witness = independence_check(field, m, k, d, dprime, G, fiber)
    assert not ok, "full fiber must be dependent"
    return target, fiber, witness


# -- closed-form summation identities -------------------------------------------


def brute_force_sum(P: MultiPoly, H: SubsetSpec) -> int:
    return P.partial_sum(PrefixQuery.over((), H, P.m))


def multilinear_sum(P: MultiPoly, H: SubsetSpec) -> int:
    """Closed form for multilinear P: a single evaluation at the H-average
    point when char(F) does not divide |H|, else the top coefficient times
    (sum of H)^m."""
    if any(b > 1 for b in P.actual_degrees()):
        raise NotMultilinear(f"degrees {P.actual_degrees()} exceed 1")
    f = P.field
    gamma = 0
    for a in H.elements:
        gamma = f.add(gamma, a)
    if len(H) % f.char != 0:
        centre = f.mul(gamma, f.inv(f.from_int(len(H))))
        value = P.eval([centre] * P.m)
        return f.mul(value, f.pow(f.from_int(len(H)), P.m))
    kappa = P.get((1,) * P.m)
    return f.mul(kappa, f.pow(gamma, P.m))


def _is_multiplicative_subgroup(field: Field, H: SubsetSpec) -> bool:
    s = H.as_set()
    if 0 in s or 1 not in s:
        return False
    return all(field.mul(a, b) in s for a in s for b in s)


def _is_additive_subgroup(field: Field, H: SubsetSpec) -> bool:
    s = H.as_set()
    if 0 not in s:
        return False
    return all(field.add(a, b) in s for a in s for b in s)


def multiplicative_group_sum(P: MultiPoly, H: SubsetSpec) -> int:
    """For a multiplicative subgroup H and individual degree < |H|, the sum
    collapses to P(0,...,0) * |H|^m."""
    f = P.field
    if not _is_multiplicative_subgroup(f, H):
        raise NotSubgroup(f"{H.elements} is not a multiplicative subgroup")
    if max(P.actual_degrees(), default=0) >= len(H):
        raise DegreeTooHigh(f"degree must be < |H| = {len(H)}")
    value = P.eval([0] * P.m)
    return f.mul(value, f.pow(_embed_count(f, len(H)), P.m))


def _embed_count(field: Field, n: int) -> int:
    """n * 1 in the field (characteristic-2 fields reduce mod 2)."""
    acc = 0
    for _ in range(n):
        acc = field.add(acc, 1)
    return acc


def additive_group_sum(P: MultiPoly, H: SubsetSpec) -> int:
    """For an additive subgroup H and individual degree < |H|: kappa * a0^m,
    with kappa the coefficient of prod X_i^{|H|-1} and a0 the linear
    coefficient of the subspace polynomial prod_{h in H}(X - h)."""
    f = P.field
    if not _is_additive_subgroup(f, H):
        raise NotSubgroup(f"{H.elements} is not an additive subgroup")
    if max(P.actual_degrees(), default=0) >= len(H):
        raise DegreeTooHigh(f"degree must be < |H| = {len(H)}")
    # expand the subspace polynomial to read off its linear coefficient
    poly = [1]
    for h in H.elements:
        new = [0] * (len(poly) + 1)
        for i, c in enumerate(poly):
            new[i + 1] = f.add(new[i + 1], c)
            new[i] = f.sub(new[i], f.mul(h, c))
        poly = new
    a0 = poly[1]
    if P.m == 0:
        return P.coeffs[0]
    kappa = P.get((len(H) - 1,) * P.m)
    return f.mul(kappa, f.pow(a0, P.m))


def multiplicative_subgroup(field: Field, generator: int, name: str = "H") -> SubsetSpec:
    elems = []
    x = 1
    while True:
        elems.append(x)
        x = field.mul(x, generator)
        if x == 1:
            break
    return subset_from(field, elems, name)
