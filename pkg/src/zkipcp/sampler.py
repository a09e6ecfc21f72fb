"""Conditional sampling of a uniformly random bounded-degree polynomial under
point and prefix-sum constraints.

Each query (a point evaluation or a partial sum) is a linear functional on the
monomial-coefficient space.  A session keeps a row-reduced basis of the
functionals answered so far: a dependent query has a forced affine value, an
independent one is answered with a fresh uniform element and recorded.  This
is exact (the distribution matches a uniformly drawn polynomial conditioned on
the history) at the price of dense linear algebra in the coefficient space.
"""

from __future__ import annotations

from typing import Sequence

from .errors import BudgetExceeded, InconsistentConstraints
from .field import Field, SubsetSpec
from .mpoly import DENSE_BUDGET, MultiPoly, PrefixQuery, _power_sums
from .rng import DomainRNG


class PolySpace:
    """The space of polynomials with given per-variable degree bounds."""

    __slots__ = ("field", "bounds", "size", "_strides")

    def __init__(self, field: Field, bounds: Sequence[int]):
        self.field = field
        self.bounds = tuple(bounds)
        size = 1
        for b in self.bounds:
            size *= b + 1
            if size > DENSE_BUDGET:
                raise BudgetExceeded(f"functional space of size {size}+ over budget")
        self.size = size
        strides = [1] * len(bounds)
        for i in range(len(bounds) - 2, -1, -1):
            strides[i] = strides[i + 1] * (bounds[i + 1] + 1)
        self._strides = strides

    @property
    def m(self) -> int:
        return len(self.bounds)

    def functional(self, query: PrefixQuery) -> list[int]:
        """Vector v with <v, coeffs(P)> = P answered at `query`, for all P.

        The entry at exponent e is prod_i prefix_i^{e_i} * prod_j S_j-power-sum(e_j).
        """
        prefix, sets = query.prefix, query.sets
        if len(prefix) + len(sets) != self.m:
            raise ValueError(f"query arity {len(prefix)}+{len(sets)} != {self.m}")
        f = self.field
        mul = f.mul
        per_var = []
        for i, x in enumerate(prefix):
            d = self.bounds[i]
            row = [1] * (d + 1)
            for j in range(1, d + 1):
                row[j] = mul(row[j - 1], x)
            per_var.append(row)
        for i, S in enumerate(sets):
            d = self.bounds[len(prefix) + i]
            per_var.append(_power_sums(f, S, d)[: d + 1])
        # tensor product, last variable fastest
        vec = [1]
        for row in per_var:
            vec = [mul(a, b) for a in vec for b in row]
        return vec

    def point_functional(self, pt: Sequence[int]) -> list[int]:
        return self.functional(PrefixQuery.point(pt))


class ConstraintSet:
    """One protocol session's view of a random polynomial in a PolySpace."""

    __slots__ = ("space", "rng", "rows", "entries")

    def __init__(self, space: PolySpace, rng: DomainRNG):
        self.space = space
        self.rng = rng
        # rows: list of (pivot index, normalized vector, value)
        self.rows: list[tuple[int, list[int], int]] = []
        self.entries: list[tuple[PrefixQuery, int]] = []

    def _reduce(self, vec: list[int]):
        """Reduce against the basis; returns (residual, accumulated value)."""
        f = self.space.field
        sub, mul = f.sub, f.mul
        acc = 0
        vec = list(vec)
        for pivot, row, val in self.rows:
            c = vec[pivot]
            if c:
                vec = [sub(a, mul(c, b)) for a, b in zip(vec, row)]
                acc = f.add(acc, mul(c, val))
        return vec, acc

    def _insert(self, vec: list[int], value: int):
        f = self.space.field
        pivot = next(i for i, c in enumerate(vec) if c)
        inv = f.inv(vec[pivot])
        row = [f.mul(inv, c) for c in vec]
        self.rows.append((pivot, row, f.mul(inv, value)))

    def probe(self, query: PrefixQuery):
        """(forced value, None, None) if the query is determined by the
        history, else (None, residual vector, accumulated offset)."""
        vec = self.space.functional(query)
        residual, acc = self._reduce(vec)
        if any(residual):
            return None, residual, acc
        return acc, None, None

    def sample(self, query: PrefixQuery) -> int:
        """Answer the query per the exact conditional distribution and record it."""
        forced, residual, acc = self.probe(query)
        if forced is not None:
            self.entries.append((query, forced))
            return forced
        value = self.rng.randrange(self.space.field.order)
        # <residual, coeffs> = value - acc keeps <original, coeffs> = value
        self._insert(residual, self.space.field.sub(value, acc))
        self.entries.append((query, value))
        return value

    def constrain(self, query: PrefixQuery, value: int):
        """Impose an externally chosen value; error if it contradicts history."""
        forced, residual, acc = self.probe(query)
        if forced is not None:
            if forced != value:
                raise InconsistentConstraints(
                    f"query already forced to {forced}, cannot constrain to {value}")
            self.entries.append((query, value))
            return
        self._insert(residual, self.space.field.sub(value, acc))
        self.entries.append((query, value))

    def is_consistent(self, pairs) -> bool:
        """Check that (query, value) pairs admit a polynomial in the space."""
        probe_set = ConstraintSet(self.space, self.rng)
        try:
            for q, v in pairs:
                probe_set.constrain(q, v)
        except InconsistentConstraints:
            return False
        return True

    def sample_polynomial(self) -> MultiPoly:
        """Draw a full polynomial uniform over the solution coset of the history.

        Free coordinates get fresh uniform values; pivot coordinates are
        back-substituted from the recorded rows.
        """
        f = self.space.field
        n = self.space.size
        coeffs = [0] * n
        pivots = {pivot for pivot, _, _ in self.rows}
        for i in range(n):
            if i not in pivots:
                coeffs[i] = self.rng.randrange(f.order)
        # rows are in insertion order; each row's pivot may appear in later rows'
        # vectors, so solve by elimination over the recorded rows.
        # Build the reduced system: iterate in reverse insertion order is not
        # sufficient in general, so solve the small linear system directly.
        sub, mul = f.sub, f.mul
        system = [(pivot, row, val) for pivot, row, val in self.rows]
        # forward-eliminate so each row has zeros at other rows' pivots
        for idx in range(len(system)):
            pivot, row, val = system[idx]
            for jdx in range(len(system)):
                if jdx == idx:
                    continue
                p2, r2, v2 = system[jdx]
                c = r2[pivot]
                if c:
                    r2 = [sub(a, mul(c, b)) for a, b in zip(r2, row)]
                    v2 = sub(v2, mul(c, val))
                    system[jdx] = (p2, r2, v2)
        for pivot, row, val in system:
            acc = val
            for i, c in enumerate(row):
                if c and i != pivot:
                    acc = sub(acc, mul(c, coeffs[i]))
            coeffs[pivot] = acc
        return MultiPoly(f, self.space.bounds, coeffs)


def conditional_sample(cs: ConstraintSet, query: PrefixQuery, _rng=None) -> int:
    return cs.sample(query)


def sample_constrained_poly(field: Field, bounds: Sequence[int],
                            constraints, rng: DomainRNG) -> MultiPoly:
    """Uniform polynomial in the space subject to (query, value) constraints."""
    cs = ConstraintSet(PolySpace(field, bounds), rng)
    for q, v in constraints:
        cs.constrain(q, v)
    return cs.sample_polynomial()
