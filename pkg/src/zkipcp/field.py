"""Finite fields: prime fields F_p and binary extension fields GF(2^n).

Internally every element is a canonical int (residue for prime fields, the
coefficient bit pattern for binary fields) and all Field methods operate on
those ints; FieldElement is a thin value wrapper for callers that want
operator syntax.  Canonical enumeration is numeric order for prime fields and
bit-pattern order for binary fields, so index 0 is the additive identity and
index 1 the multiplicative identity in both cases.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import (
    DivideByZero,
    FieldMismatch,
    NotIrreducible,
    NotPrime,
    SubsetTooLarge,
)

MAX_PRIME_MODULUS = 1 << 61
MAX_BINARY_DEGREE = 32
_LOG_TABLE_LIMIT = 1 << 16

_SMALL_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin, valid for all n < 3.3 * 10^24."""
    if n < 2:
        return False
    for p in _SMALL_PRIMES:
        if n % p == 0:
            return n == p
    d, r = n - 1, 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in _SMALL_PRIMES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _gf2_mul_mod(a: int, b: int, poly: int, degree: int) -> int:
    """Carry-less multiply of a and b reduced mod poly (bit-encoded)."""
    res = 0
    while b:
        if b & 1:
            res ^= a
        b >>= 1
        a <<= 1
        if a >> degree & 1:
            a ^= poly
    return res


def _gf2_poly_is_irreducible(poly: int, degree: int) -> bool:
    """x^(2^degree) == x mod poly, and x^(2^(degree/q)) != x for prime q | degree."""
    def sq(a):
        return _gf2_mul_mod(a, a, poly, degree)

    x = 2
    t = x
    for _ in range(degree):
        t = sq(t)
    if t != x:
        return False
    q = 2
    d = degree
    factors = set()
    while q * q <= d:
        if d % q == 0:
            factors.add(q)
            while d % q == 0:
                d //= q
        q += 1
    if d > 1:
        factors.add(d)
    for q in factors:
        t = x
        for _ in range(degree // q):
            t = sq(t)
        if t == x:
            return False
    return True


class Field:
    """A prime field or binary extension field with canonical enumeration."""

    __slots__ = (
        "kind", "modulus", "degree", "poly", "order", "char",
        "_log", "_exp",
    )

    def __init__(self, kind: str, modulus: int = 0, degree: int = 0, poly: int = 0):
        self.kind = kind
        self._log = None
        self._exp = None
        if kind == "prime":
            if modulus < 2 or not is_prime(modulus):
                raise NotPrime(f"{modulus} is not prime")
            if modulus > MAX_PRIME_MODULUS:
                raise NotPrime(f"modulus above supported bound 2^61")
            self.modulus = modulus
            self.degree = 1
            self.poly = 0
            self.order = modulus
            self.char = modulus
        elif kind == "binary":
            if not 1 <= degree <= MAX_BINARY_DEGREE:
                raise NotIrreducible(f"unsupported extension degree {degree}")
            if poly >> degree != 1:
                raise NotIrreducible("irreducible polynomial must be monic of the declared degree")
            if not _gf2_poly_is_irreducible(poly, degree):
                raise NotIrreducible(f"0x{poly:x} is reducible over GF(2)")
            self.modulus = 2
            self.degree = degree
            self.poly = poly
            self.order = 1 << degree
            self.char = 2
            if self.order <= _LOG_TABLE_LIMIT:
                self._build_tables()
        else:
            raise ValueError(f"unknown field kind {kind!r}")

    def _build_tables(self):
        order = self.order
        exp = [0] * (2 * order)
        log = [0] * order
        # find a generator by trial
        for g in range(2, order):
            seen = 1
            x = 1
            ok = True
            for i in range(order - 1):
                x = _gf2_mul_mod(x, g, self.poly, self.degree)
                if x == 1 and i != order - 2:
                    ok = False
                    break
            if ok:
                break
        x = 1
        for i in range(order - 1):
            exp[i] = x
            log[x] = i
            x = _gf2_mul_mod(x, g, self.poly, self.degree)
        for i in range(order - 1, 2 * order):
            exp[i] = exp[i - (order - 1)]
        self._exp = exp
        self._log = log

    # -- arithmetic on canonical ints ------------------------------------

    def add(self, a: int, b: int) -> int:
        if self.kind == "prime":
            return (a + b) % self.modulus
        return a ^ b

    def sub(self, a: int, b: int) -> int:
        if self.kind == "prime":
            return (a - b) % self.modulus
        return a ^ b

    def neg(self, a: int) -> int:
        if self.kind == "prime":
            return -a % self.modulus
        return a

    def mul(self, a: int, b: int) -> int:
        if self.kind == "prime":
            return a * b % self.modulus
        if self._log is not None:
            if a == 0 or b == 0:
                return 0
            return self._exp[self._log[a] + self._log[b]]
        return _gf2_mul_mod(a, b, self.poly, self.degree)

    def inv(self, a: int) -> int:
        if a == 0:
            raise DivideByZero("0 has no multiplicative inverse")
        if self.kind == "prime":
            return pow(a, -1, self.modulus)
        if self._log is not None:
            return self._exp[self.order - 1 - self._log[a]]
        return self.pow(a, self.order - 2)

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def pow(self, a: int, e: int) -> int:
        if e < 0:
            return self.pow(self.inv(a), -e)
        if self.kind == "prime":
            return pow(a, e, self.modulus)
        res = 1
        while e:
            if e & 1:
                res = self.mul(res, a)
            a = self.mul(a, a)
            e >>= 1
        return res

    # -- enumeration -------------------------------------------------------

    def element(self, index: int) -> int:
        if not 0 <= index < self.order:
            raise IndexError(f"enumeration index {index} out of range")
        return index

    def index(self, value: int) -> int:
        return value

    def elements(self):
        return range(self.order)

    def from_int(self, n: int) -> int:
        """Embed a plain integer: reduce mod p, or mod 2 into GF(2^n)."""
        if self.kind == "prime":
            return n % self.modulus
        return n & 1

    def subfield_elements(self, sub_degree: int) -> list[int]:
        """Elements of the subfield GF(2^sub_degree) inside this binary field."""
        if self.kind != "binary" or self.degree % sub_degree != 0:
            raise FieldMismatch("no such subfield")
        out = []
        for x in range(self.order):
            if self.pow(x, 1 << sub_degree) == x:
                out.append(x)
        assert len(out) == 1 << sub_degree
        return out

    # -- misc ----------------------------------------------------------------

    def wrap(self, value: int) -> "FieldElement":
        return FieldElement(self, value)

    def to_hex(self, value: int) -> str:
        return format(value, "x")

    def from_hex(self, s: str) -> int:
        v = int(s, 16)
        if not 0 <= v < self.order:
            raise ValueError(f"hex value {s} outside field")
        return v

    def spec_doc(self) -> dict:
        if self.kind == "prime":
            return {"kind": "prime", "modulus": self.modulus}
        return {"kind": "binary", "degree": self.degree, "poly": format(self.poly, "x")}

    @staticmethod
    def from_doc(doc: dict) -> "Field":
        if doc["kind"] == "prime":
            return Field("prime", modulus=int(doc["modulus"]))
        return Field("binary", degree=int(doc["degree"]), poly=int(doc["poly"], 16))

    def __eq__(self, other):
        return (
            isinstance(other, Field)
            and self.kind == other.kind
            and self.modulus == other.modulus
            and self.degree == other.degree
            and self.poly == other.poly
        )

    def __hash__(self):
        return hash((self.kind, self.modulus, self.degree, self.poly))

    def __repr__(self):
        if self.kind == "prime":
            return f"F_{self.modulus}"
        return f"GF(2^{self.degree})"


class FieldElement:
    """Immutable field element; arithmetic returns new values."""

    __slots__ = ("field", "value")

    def __init__(self, field: Field, value: int):
        self.field = field
        self.value = value

    def _coerce(self, other) -> int:
        if isinstance(other, FieldElement):
            if other.field != self.field:
                raise FieldMismatch("elements from different fields")
            return other.value
        if isinstance(other, int):
            return self.field.from_int(other)
        return NotImplemented

    def __add__(self, other):
        v = self._coerce(other)
        if v is NotImplemented:
            return NotImplemented
        return FieldElement(self.field, self.field.add(self.value, v))

    __radd__ = __add__

    def __sub__(self, other):
        v = self._coerce(other)
        if v is NotImplemented:
            return NotImplemented
        return FieldElement(self.field, self.field.sub(self.value, v))

    def __rsub__(self, other):
        v = self._coerce(other)
        if v is NotImplemented:
            return NotImplemented
        return FieldElement(self.field, self.field.sub(v, self.value))

    def __mul__(self, other):
        v = self._coerce(other)
        if v is NotImplemented:
            return NotImplemented
        return FieldElement(self.field, self.field.mul(self.value, v))

    __rmul__ = __mul__

    def __truediv__(self, other):
        v = self._coerce(other)
        if v is NotImplemented:
            return NotImplemented
        return FieldElement(self.field, self.field.div(self.value, v))

    def __neg__(self):
        return FieldElement(self.field, self.field.neg(self.value))

    def __pow__(self, e: int):
        return FieldElement(self.field, self.field.pow(self.value, e))

    def inverse(self) -> "FieldElement":
        return FieldElement(self.field, self.field.inv(self.value))

    def __eq__(self, other):
        if isinstance(other, FieldElement):
            return self.field == other.field and self.value == other.value
        if isinstance(other, int):
            return self.value == self.field.from_int(other)
        return NotImplemented

    def __hash__(self):
        return hash((self.field, self.value))

    def __repr__(self):
        return f"{self.field}({self.field.to_hex(self.value)})"


@dataclass(frozen=True)
class SubsetSpec:
    """A named, ordered subset of a field (H, G, I, K, L in protocol roles)."""

    name: str
    field: Field
    elements: tuple

    def __post_init__(self):
        if len(set(self.elements)) != len(self.elements):
            raise ValueError("subset elements must be distinct")

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __contains__(self, v):
        return v in self.as_set()

    def as_set(self):
        return frozenset(self.elements)

    def doc(self) -> dict:
        return {"name": self.name, "elements": [format(e, "x") for e in self.elements]}


def make_field(kind: str, *, modulus: int = 0, degree: int = 0, poly: int = 0) -> Field:
    """Construct and validate a field; raises NotPrime / NotIrreducible."""
    return Field(kind, modulus=modulus, degree=degree, poly=poly)


def prime_field(p: int) -> Field:
    return Field("prime", modulus=p)


def binary_field(degree: int, poly: int) -> Field:
    return Field("binary", degree=degree, poly=poly)


def enumerate_subset(field: Field, size: int, name: str = "H",
                     require_zero: bool = False) -> SubsetSpec:
    """First `size` elements in canonical enumeration order."""
    if size > field.order:
        raise SubsetTooLarge(f"requested {size} elements from a field of order {field.order}")
    elems = tuple(field.element(i) for i in range(size))
    if require_zero and 0 not in elems:
        raise ValueError("subset must contain 0")
    return SubsetSpec(name, field, elems)


def complement_subset(field: Field, excluded: SubsetSpec, name: str = "I") -> SubsetSpec:
    """F minus the given subset, in enumeration order (the challenge set I = F \\ H)."""
    ex = excluded.as_set()
    return SubsetSpec(name, field, tuple(x for x in field.elements() if x not in ex))


def subset_from(field: Field, elements, name: str = "S") -> SubsetSpec:
    return SubsetSpec(name, field, tuple(elements))
