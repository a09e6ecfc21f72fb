"""Dense multivariate polynomials with per-variable degree bounds.

Coefficients are stored flat in row-major order with the *last* variable
fastest, so eliminating or binding the last variable works on contiguous
blocks.  Degree bounds are declared and never inferred upward; the dense
budget prod(d_i + 1) <= 2^22 keeps every desk-scale protocol object small.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import ArityMismatch, BudgetExceeded, DegreeMismatch, FieldMismatch, IncompleteTable
from .field import Field, SubsetSpec

DENSE_BUDGET = 1 << 22


def _size(bounds: Sequence[int]) -> int:
    n = 1
    for b in bounds:
        n *= b + 1
        if n > DENSE_BUDGET:
            raise BudgetExceeded(f"dense size {n}+ exceeds budget 2^22 for bounds {tuple(bounds)}")
    return n


@dataclass(frozen=True)
class PrefixQuery:
    """A query fixing a prefix of the variables; the rest are summed.

    `sets` gives the summation subset for each remaining variable (protocols
    mix H- and G-sums over one polynomial, so the set is per variable).
    """

    prefix: tuple
    sets: tuple  # one SubsetSpec per summed (trailing) variable

    @staticmethod
    def point(pt: Sequence[int]) -> "PrefixQuery":
        return PrefixQuery(tuple(pt), ())

    @staticmethod
    def over(prefix: Sequence[int], H: SubsetSpec, count: int) -> "PrefixQuery":
        return PrefixQuery(tuple(prefix), (H,) * count)


class MultiPoly:
    __slots__ = ("field", "m", "bounds", "coeffs")

    def __init__(self, field: Field, bounds: Sequence[int], coeffs: list[int] | None = None):
        self.field = field
        self.m = len(bounds)
        self.bounds = tuple(bounds)
        n = _size(self.bounds)
        if coeffs is None:
            coeffs = [0] * n
        if len(coeffs) != n:
            raise DegreeMismatch(f"coefficient vector length {len(coeffs)} != {n}")
        self.coeffs = coeffs

    # -- construction -------------------------------------------------------

    @staticmethod
    def constant(field: Field, value: int, m: int = 0, bounds: Sequence[int] | None = None) -> "MultiPoly":
        bounds = tuple(bounds) if bounds is not None else (0,) * m
        p = MultiPoly(field, bounds)
        p.coeffs[0] = value
        return p

    @staticmethod
    def variable(field: Field, m: int, i: int, bounds: Sequence[int] | None = None) -> "MultiPoly":
        bounds = tuple(bounds) if bounds is not None else tuple(1 if j == i else 0 for j in range(m))
        p = MultiPoly(field, bounds)
        stride = 1
        for j in range(m - 1, i, -1):
            stride *= bounds[j] + 1
        p.coeffs[stride] = 1
        return p

    def copy(self) -> "MultiPoly":
        return MultiPoly(self.field, self.bounds, list(self.coeffs))

    # -- indexing helpers -----------------------------------------------------

    def strides(self) -> list[int]:
        s = [1] * self.m
        for i in range(self.m - 2, -1, -1):
            s[i] = s[i + 1] * (self.bounds[i + 1] + 1)
        return s

    def monomials(self):
        """Yield (exponent-vector, coefficient) for nonzero coefficients."""
        ranges = [range(b + 1) for b in self.bounds]
        for i, e in enumerate(itertools.product(*ranges)):
            c = self.coeffs[i]
            if c:
                yield e, c

    def get(self, exponents: Sequence[int]) -> int:
        idx = 0
        for e, b in zip(exponents, self.bounds):
            if e > b:
                return 0
            idx = idx * (b + 1) + e
        return self.coeffs[idx]

    def set(self, exponents: Sequence[int], value: int):
        idx = 0
        for e, b in zip(exponents, self.bounds):
            if e > b:
                raise DegreeMismatch(f"exponent {tuple(exponents)} above bounds {self.bounds}")
            idx = idx * (b + 1) + e
        self.coeffs[idx] = value

    # -- queries ---------------------------------------------------------------

    def eval(self, point: Sequence[int]) -> int:
        if len(point) != self.m:
            raise ArityMismatch(f"point of length {len(point)} for {self.m}-variate polynomial")
        return self.bind_prefix(point).coeffs[0]

    def bind_last(self, value: int) -> "MultiPoly":
        """Substitute the last variable; returns an (m-1)-variate polynomial."""
        d = self.bounds[-1]
        width = d + 1
        c = self.coeffs
        out = []
        if self.field.kind == "prime":
            p = self.field.modulus
            for base in range(0, len(c), width):
                acc = c[base + d]
                for j in range(d - 1, -1, -1):
                    acc = (acc * value + c[base + j]) % p
                out.append(acc)
        else:
            mul = self.field.mul
            add = self.field.add
            for base in range(0, len(c), width):
                acc = c[base + d]
                for j in range(d - 1, -1, -1):
                    acc = add(mul(acc, value), c[base + j])
                out.append(acc)
        return MultiPoly(self.field, self.bounds[:-1], out)

    def bind_first(self, value: int) -> "MultiPoly":
        """Substitute the first variable."""
        d = self.bounds[0]
        block = len(self.coeffs) // (d + 1)
        c = self.coeffs
        out = c[d * block:(d + 1) * block]
        if self.field.kind == "prime":
            p = self.field.modulus
            for j in range(d - 1, -1, -1):
                seg = c[j * block:(j + 1) * block]
                out = [(a * value + b) % p for a, b in zip(out, seg)]
        else:
            mul = self.field.mul
            add = self.field.add
            for j in range(d - 1, -1, -1):
                seg = c[j * block:(j + 1) * block]
                out = [add(mul(a, value), b) for a, b in zip(out, seg)]
        return MultiPoly(self.field, self.bounds[1:], out)

    def bind_prefix(self, values: Sequence[int]) -> "MultiPoly":
        p = self
        for v in values:
            p = p.bind_first(v)
        return p

    def sum_last(self, H: SubsetSpec) -> "MultiPoly":
        """Sum out the last variable over H via precomputed power sums."""
        d = self.bounds[-1]
        width = d + 1
        f = self.field
        pw = _power_sums(f, H, d)
        c = self.coeffs
        out = []
        if f.kind == "prime":
            p = f.modulus
            for base in range(0, len(c), width):
                acc = 0
                for j in range(width):
                    cj = c[base + j]
                    if cj:
                        acc += cj * pw[j]
                out.append(acc % p)
        else:
            add, mul = f.add, f.mul
            for base in range(0, len(c), width):
                acc = 0
                for j in range(width):
                    cj = c[base + j]
                    if cj:
                        acc = add(acc, mul(cj, pw[j]))
                out.append(acc)
        return MultiPoly(self.field, self.bounds[:-1], out)

    def partial_sum(self, q: PrefixQuery) -> int:
        """Sum over the trailing variables (per-variable sets), prefix bound."""
        ell = len(q.prefix)
        if ell + len(q.sets) != self.m:
            raise ArityMismatch(
                f"prefix {ell} + sets {len(q.sets)} != arity {self.m}")
        p = self
        for H in reversed(q.sets):
            p = p.sum_last(H)
        return p.eval(q.prefix)

    def actual_degrees(self) -> tuple:
        """Componentwise degrees of the polynomial as stored (<= bounds)."""
        deg = [0] * self.m
        for e, _ in self.monomials():
            for i, ei in enumerate(e):
                if ei > deg[i]:
                    deg[i] = ei
        return tuple(deg)

    # -- arithmetic --------------------------------------------------------------

    def _aligned(self, other: "MultiPoly") -> tuple:
        if self.field != other.field:
            raise FieldMismatch("polynomials over different fields")
        if self.m != other.m:
            raise ArityMismatch("polynomials with different arity")
        bounds = tuple(max(a, b) for a, b in zip(self.bounds, other.bounds))
        return bounds

    def pad(self, bounds: Sequence[int]) -> "MultiPoly":
        bounds = tuple(bounds)
        if bounds == self.bounds:
            return self
        out = MultiPoly(self.field, bounds)
        for e, c in self.monomials():
            out.set(e, c)
        return out

    def add(self, other: "MultiPoly") -> "MultiPoly":
        bounds = self._aligned(other)
        a = self.pad(bounds)
        b = other.pad(bounds)
        fadd = self.field.add
        return MultiPoly(self.field, bounds, [fadd(x, y) for x, y in zip(a.coeffs, b.coeffs)])

    def sub(self, other: "MultiPoly") -> "MultiPoly":
        bounds = self._aligned(other)
        a = self.pad(bounds)
        b = other.pad(bounds)
        fsub = self.field.sub
        return MultiPoly(self.field, bounds, [fsub(x, y) for x, y in zip(a.coeffs, b.coeffs)])

    def scale(self, c: int) -> "MultiPoly":
        mul = self.field.mul
        return MultiPoly(self.field, self.bounds, [mul(c, x) for x in self.coeffs])

    def mul(self, other: "MultiPoly") -> "MultiPoly":
        if self.field != other.field:
            raise FieldMismatch("polynomials over different fields")
        if self.m != other.m:
            raise ArityMismatch("polynomials with different arity")
        da = self.actual_degrees()
        db = other.actual_degrees()
        bounds = tuple(x + y for x, y in zip(da, db))
        out = MultiPoly(self.field, bounds)
        ostr = out.strides()
        fadd = self.field.add
        fmul = self.field.mul
        oc = out.coeffs
        bm = list(other.monomials())
        for ea, ca in self.monomials():
            base = sum(e * s for e, s in zip(ea, ostr))
            for eb, cb in bm:
                idx = base + sum(e * s for e, s in zip(eb, ostr))
                oc[idx] = fadd(oc[idx], fmul(ca, cb))
        return out

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def __eq__(self, other):
        if not isinstance(other, MultiPoly):
            return NotImplemented
        if self.field != other.field or self.m != other.m:
            return False
        bounds = tuple(max(a, b) for a, b in zip(self.bounds, other.bounds))
        return self.pad(bounds).coeffs == other.pad(bounds).coeffs

    def __hash__(self):
        raise TypeError("MultiPoly is mutable; not hashable")

    # -- reshaping ------------------------------------------------------------------

    def permute(self, order: Sequence[int]) -> "MultiPoly":
        """Reorder variables: new variable i is old variable order[i]."""
        bounds = tuple(self.bounds[j] for j in order)
        out = MultiPoly(self.field, bounds)
        ostr = out.strides()
        for e, c in self.monomials():
            idx = sum(e[order[i]] * ostr[i] for i in range(self.m))
            out.coeffs[idx] = c
        return out

    def embed(self, m_new: int, positions: Sequence[int], bounds_new: Sequence[int]) -> "MultiPoly":
        """View this polynomial in a larger variable space; old var i becomes
        variable positions[i]."""
        out = MultiPoly(self.field, bounds_new)
        ostr = out.strides()
        for e, c in self.monomials():
            idx = sum(e[i] * ostr[positions[i]] for i in range(self.m))
            out.coeffs[idx] = c
        return out

    def substitute(self, assignment: dict) -> "MultiPoly":
        """Bind an arbitrary subset of variables (index -> value); remaining
        variables keep their relative order."""
        p = self
        for i in sorted(assignment, reverse=True):
            # rotate variable i to the end, bind it
            order = [j for j in range(p.m) if j != i] + [i]
            p = p.permute(order).bind_last(assignment[i])
        return p

    def doc(self) -> dict:
        return {
            "m": self.m,
            "bounds": list(self.bounds),
            "coeffs": [[list(e), format(c, "x")] for e, c in self.monomials()],
        }

    @staticmethod
    def from_doc(field: Field, doc: dict) -> "MultiPoly":
        p = MultiPoly(field, doc["bounds"])
        for e, c in doc["coeffs"]:
            p.set(e, int(c, 16))
        return p

    def __repr__(self):
        terms = [f"{self.field.to_hex(c)}*X^{e}" for e, c in itertools.islice(self.monomials(), 6)]
        return f"MultiPoly({self.field}, bounds={self.bounds}, {' + '.join(terms) or '0'})"


# -- subset-derived caches -------------------------------------------------------

_power_sum_cache: dict = {}
_lagrange_denom_cache: dict = {}


def _subset_key(field: Field, H: SubsetSpec):
    return (field, H.elements)


def _power_sums(field: Field, H: SubsetSpec, max_degree: int) -> list[int]:
    """[sum_{a in H} a^j for j = 0..max_degree]."""
    key = _subset_key(field, H)
    cached = _power_sum_cache.get(key)
    if cached is None or len(cached) <= max_degree:
        add, mul = field.add, field.mul
        pws = []
        powers = [1] * len(H.elements)
        for j in range(max_degree + 1):
            if j > 0:
                powers = [mul(p, a) for p, a in zip(powers, H.elements)]
            acc = 0
            for p in powers:
                acc = add(acc, p)
            pws.append(acc)
        _power_sum_cache[key] = pws
        cached = pws
    return cached


def lagrange_denoms(field: Field, H: SubsetSpec) -> list[int]:
    """inv(prod_{g != w} (w - g)) for each w in H."""
    key = _subset_key(field, H)
    if key not in _lagrange_denom_cache:
        out = []
        for w in H.elements:
            acc = 1
            for g in H.elements:
                if g != w:
                    acc = field.mul(acc, field.sub(w, g))
            out.append(field.inv(acc))
        _lagrange_denom_cache[key] = out
    return _lagrange_denom_cache[key]


def lagrange_weights(field: Field, H: SubsetSpec, t: int) -> list[int]:
    """[l_w(t) for w in H] where l_w is the univariate Lagrange basis on H."""
    elems = H.elements
    denoms = lagrange_denoms(field, H)
    mul, sub = field.mul, field.sub
    diffs = [sub(t, g) for g in elems]
    full = 1
    for d in diffs:
        full = mul(full, d)
    out = []
    for i, w in enumerate(elems):
        if diffs[i] == 0:
            out.append(1 if t == w else 0)
            continue
        prod = 1
        for j, d in enumerate(diffs):
            if j != i:
                prod = mul(prod, d)
        out.append(mul(prod, denoms[i]))
    return out


def lagrange_kernel(field: Field, H: SubsetSpec, m: int, x: Sequence[int], y: Sequence[int]) -> int:
    """Product-form kernel: 1 on matching grid points of H^m, 0 on mismatched ones."""
    if len(x) != m or len(y) != m:
        raise ArityMismatch("kernel arguments must have length m")
    acc = 1
    mul, add = field.mul, field.add
    for xi, yi in zip(x, y):
        wx = lagrange_weights(field, H, xi)
        wy = lagrange_weights(field, H, yi)
        s = 0
        for a, b in zip(wx, wy):
            s = add(s, mul(a, b))
        acc = mul(acc, s)
        if acc == 0:
            return 0
    return acc


def vanishing(field: Field, H: SubsetSpec, point: Sequence[int]) -> int:
    """prod_i prod_{a in H} (x_i - a); zero exactly when some x_i lies in H."""
    acc = 1
    mul, sub = field.mul, field.sub
    for xi in point:
        for a in H.elements:
            acc = mul(acc, sub(xi, a))
        if acc == 0:
            return 0
    return acc


def grid(H: SubsetSpec, m: int) -> Iterable[tuple]:
    return itertools.product(H.elements, repeat=m)


def mixed_grid(sets: Sequence[SubsetSpec]) -> Iterable[tuple]:
    return itertools.product(*[s.elements for s in sets])


def lde(field: Field, values, H: SubsetSpec, m: int) -> MultiPoly:
    """Unique individual-degree-(|H|-1) polynomial agreeing with `values` on H^m.

    `values` is a mapping from grid tuples to ints, or a callable.
    """
    getval = values.__getitem__ if hasattr(values, "__getitem__") else values
    table = []
    try:
        for pt in grid(H, m):
            table.append(getval(pt))
    except KeyError as e:
        raise IncompleteTable(f"missing grid value at {e}") from None

    n = len(H.elements)
    # inverse Vandermonde for H: coeffs of l_w as univariate polynomials
    key = (_subset_key(field, H), "invvan")
    inv = _lagrange_denom_cache.get(key)
    if inv is None:
        inv = []
        for w_idx, w in enumerate(H.elements):
            # expand l_w(t) = denom * prod_{g != w} (t - g)
            poly = [1]
            for g_idx, g in enumerate(H.elements):
                if g_idx == w_idx:
                    continue
                poly = _poly_mul_linear(field, poly, g)
            d = lagrange_denoms(field, H)[w_idx]
            inv.append([field.mul(c, d) for c in poly])
        _lagrange_denom_cache[key] = inv

    # fold each axis: table indexed grid-major -> coefficient-major
    coeffs = table
    add, mul = field.add, field.mul
    block = len(coeffs) // n
    for _axis in range(m):
        out = [0] * len(coeffs)
        # current layout: axis to transform is the slowest dimension
        for w_idx in range(n):
            lw = inv[w_idx]
            seg = coeffs[w_idx * block:(w_idx + 1) * block]
            for j in range(n):
                lwj = lw[j] if j < len(lw) else 0
                if lwj == 0:
                    continue
                base = j * block
                for t in range(block):
                    s = seg[t]
                    if s:
                        out[base + t] = add(out[base + t], mul(lwj, s))
        # rotate: move transformed axis to fastest position
        coeffs = _rotate_axis(out, n, block)
    return MultiPoly(field, (n - 1,) * m, coeffs)


def _rotate_axis(flat: list, first_dim: int, block: int) -> list:
    """Move the slowest axis to the fastest position."""
    out = [0] * len(flat)
    for i in range(first_dim):
        seg = flat[i * block:(i + 1) * block]
        out[i::first_dim] = seg
    return out


def _poly_mul_linear(field: Field, poly: list[int], root: int) -> list[int]:
    """Multiply univariate coefficient list by (t - root)."""
    out = [0] * (len(poly) + 1)
    sub, mul = field.sub, field.mul
    for i, c in enumerate(poly):
        out[i + 1] = field.add(out[i + 1], c)
        out[i] = sub(out[i], mul(root, c))
    return out


def interpolate_univariate(field: Field, points: Sequence[int], values: Sequence[int]) -> list[int]:
    """Coefficients (ascending) of the unique degree < len(points) polynomial."""
    coeffs = [0] * len(points)
    add, mul, sub, inv = field.add, field.mul, field.sub, field.inv
    for i, (xi, yi) in enumerate(zip(points, values)):
        basis = [1]
        denom = 1
        for j, xj in enumerate(points):
            if j == i:
                continue
            basis = _poly_mul_linear(field, basis, xj)
            denom = mul(denom, sub(xi, xj))
        scale = mul(yi, inv(denom))
        for j, b in enumerate(basis):
            coeffs[j] = add(coeffs[j], mul(scale, b))
    return coeffs


def eval_univariate(field: Field, coeffs: Sequence[int], t: int) -> int:
    acc = 0
    for c in reversed(coeffs):
        acc = field.add(field.mul(acc, t), c)
    return acc


def sample_uniform_poly(field: Field, bounds: Sequence[int], rng) -> MultiPoly:
    """Every coefficient independently uniform over the field."""
    n = _size(tuple(bounds))
    return MultiPoly(field, tuple(bounds), [rng.randrange(field.order) for _ in range(n)])
