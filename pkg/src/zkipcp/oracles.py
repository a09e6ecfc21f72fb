"""Oracles (materialized, lazy, derived), individual-degree testing, and
self-correction: the machinery that turns interactive-proof hybrids with
polynomial oracles into Interactive PCPs."""

from __future__ import annotations

import hashlib
from typing import Callable, Sequence

from .errors import BudgetExhausted, FieldTooSmall, NoMajority
from .field import Field
from .mpoly import MultiPoly, PrefixQuery, eval_univariate, interpolate_univariate
from .rng import DomainRNG
from .sampler import ConstraintSet


class Oracle:
    """A deterministic function from F^m points to field elements, with query
    accounting and an optional budget (strictly fewer than `budget` queries
    are permitted)."""

    __slots__ = ("field", "m", "label", "count", "budget", "_fn", "_poly")

    def __init__(self, field: Field, m: int, fn: Callable, label: str = "",
                 budget: int | None = None, poly: MultiPoly | None = None):
        self.field = field
        self.m = m
        self.label = label
        self.count = 0
        self.budget = budget
        self._fn = fn
        self._poly = poly

    def query(self, point: Sequence[int]) -> int:
        if self.budget is not None and self.count + 1 > self.budget - 1:
            raise BudgetExhausted(
                f"oracle {self.label!r}: query {self.count + 1} with budget {self.budget}")
        self.count += 1
        return self._fn(tuple(point))

    def query_many(self, points) -> list[int]:
        return [self.query(p) for p in points]

    def read_axis_line(self, base: Sequence[int], axis: int) -> list[int]:
        """Values along the axis-parallel line through `base`, in enumeration
        order of the field; counts as |F| queries."""
        if self._poly is not None and self.budget is None:
            self.count += self.field.order
            p = self._poly
            for j in range(p.m - 1, axis, -1):
                p = p.bind_last(base[j])
            for j in range(axis):
                p = p.bind_first(base[j])
            coeffs = p.coeffs
            return [eval_univariate(self.field, coeffs, t) for t in self.field.elements()]
        pt = list(base)
        out = []
        for t in self.field.elements():
            pt[axis] = t
            out.append(self.query(pt))
        return out

    def table(self) -> dict:
        """Materialize the full evaluation table (tiny fields only)."""
        import itertools
        return {pt: self._fn(pt) for pt in itertools.product(self.field.elements(), repeat=self.m)}

    def doc(self) -> dict:
        return {"m": self.m, "entries": [[list(k), format(v, "x")] for k, v in self.table().items()]}


class OracleBundle:
    """Named oracles forming one proof string."""

    def __init__(self, **oracles):
        self.oracles: dict[str, Oracle] = dict(oracles)

    def __getitem__(self, label: str) -> Oracle:
        return self.oracles[label]

    def __setitem__(self, label: str, oracle: Oracle):
        if label in self.oracles:
            raise ValueError(f"duplicate oracle label {label!r}")
        self.oracles[label] = oracle

    def __contains__(self, label):
        return label in self.oracles

    def query_counts(self) -> dict:
        return {k: o.count for k, o in self.oracles.items()}

    def total_queries(self) -> int:
        return sum(o.count for o in self.oracles.values())


def materialize(poly: MultiPoly, label: str = "", budget: int | None = None) -> Oracle:
    return Oracle(poly.field, poly.m, lambda pt: poly.eval(pt), label, budget, poly=poly)


def lazy_oracle(cs: ConstraintSet, label: str = "", budget: int | None = None) -> Oracle:
    """Oracle whose answers are drawn on demand from a sampler session; the
    session's record keeps repeated queries consistent."""
    def fn(pt):
        return cs.sample(PrefixQuery.point(pt))
    return Oracle(cs.space.field, cs.space.m, fn, label, budget)


def oracle_from_fn(field: Field, m: int, fn: Callable, label: str = "") -> Oracle:
    return Oracle(field, m, fn, label)


def corrupted_oracle(base: Oracle, fraction: float, seed: int, label: str = "") -> Oracle:
    """Derived view equal to `base` except on a pseudorandom `fraction` of
    points, where a nonzero offset is added.  Deterministic per point."""
    field = base.field
    denom = 1 << 30
    threshold = int(fraction * denom)

    def fn(pt):
        v = base._fn(pt)
        h = hashlib.sha256(repr((seed, pt)).encode()).digest()
        if int.from_bytes(h[:4], "little") % denom < threshold:
            offset = 1 + int.from_bytes(h[4:12], "little") % (field.order - 1)
            return field.add(v, field.element(offset))
        return v

    return Oracle(field, base.m, fn, label or f"corrupt({base.label})")


def individual_degree_test(oracle: Oracle, bounds: Sequence[int],
                           repetitions: int, rng: DomainRNG) -> bool:
    """Axis-parallel line test: each repetition reads one full random line in a
    random axis and checks it against the per-axis degree bound.  Accepts exact
    low-degree oracles with probability 1."""
    field = oracle.field
    max_bound = max(bounds) if bounds else 0
    if field.order <= max_bound + 1:
        raise FieldTooSmall(f"|F|={field.order} too small for degree bound {max_bound}")
    elements = list(field.elements())
    for _ in range(repetitions):
        axis = rng.randrange(oracle.m)
        base = [rng.field_element(field) for _ in range(oracle.m)]
        values = oracle.read_axis_line(base, axis)
        d = bounds[axis]
        coeffs = interpolate_univariate(field, elements[: d + 1], values[: d + 1])
        for t, v in zip(elements[d + 1:], values[d + 1:]):
            if eval_univariate(field, coeffs, t) != v:
                return False
    return True


def self_correct(oracle: Oracle, point: Sequence[int], total_degree: int,
                 repetitions: int, rng: DomainRNG) -> int:
    """Recover the value at `point` of the low-degree polynomial near the
    oracle, by decoding random lines through the point.  Raises NoMajority
    when no value wins more than half of the repetitions."""
    field = oracle.field
    if field.order < total_degree + 2:
        raise FieldTooSmall(
            f"|F|={field.order} < D+2 for total degree {total_degree}")
    add, mul = field.add, field.mul
    params = [field.element(i + 1) for i in range(total_degree + 1)]
    votes: dict[int, int] = {}
    m = oracle.m
    for _ in range(repetitions):
        while True:
            direction = [rng.field_element(field) for _ in range(m)]
            if any(direction):
                break
        values = []
        for s in params:
            pt = tuple(add(x, mul(s, d)) for x, d in zip(point, direction))
            values.append(oracle.query(pt))
        # Lagrange evaluation at parameter 0 (the centre of the line)
        guess = _lagrange_at_zero(field, params, values)
        votes[guess] = votes.get(guess, 0) + 1
    best, count = max(votes.items(), key=lambda kv: kv[1])
    if 2 * count <= repetitions:
        raise NoMajority(f"no majority among {repetitions} line decodings")
    return best


def default_repetitions(target_error: float, proximity: float = 0.125) -> int:
    """t = ceil(ln(1/eps) / rho)."""
    import math
    return max(1, math.ceil(math.log(1.0 / target_error) / proximity))


def checked_read(oracle: Oracle, point: Sequence[int], bounds: Sequence[int],
                 repetitions: int, rng: DomainRNG, compiled: bool = True):
    """One verifier-side oracle read: direct in the IP-hybrid model, low-degree
    test plus self-correction in the compiled (IPCP) model.  Returns
    (value, accepted) where accepted reports the degree test."""
    if not compiled:
        return oracle.query(point), True
    if not individual_degree_test(oracle, bounds, repetitions, rng):
        return 0, False
    total = sum(bounds)
    try:
        value = self_correct(oracle, point, total, repetitions, rng)
    except NoMajority:
        return 0, False
    return value, True


def _lagrange_at_zero(field: Field, xs, ys) -> int:
    """Value at 0 of the interpolant through (xs, ys), without building it."""
    mul, sub, inv, add = field.mul, field.sub, field.inv, field.add
    full = 1
    for x in xs:
        full = mul(full, field.neg(x))
    acc = 0
    for i, (xi, yi) in enumerate(zip(xs, ys)):
        denom = field.neg(xi)
        for j, xj in enumerate(xs):
            if j != i:
                denom = mul(denom, sub(xi, xj))
        acc = add(acc, mul(yi, mul(full, inv(denom))))
    return acc
