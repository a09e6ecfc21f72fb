import pytest

from zkipcp import circuit as ac
from zkipcp.errors import ArityMismatch, BudgetExceeded
from zkipcp.field import binary_field, enumerate_subset, prime_field, subset_from
from zkipcp.mpoly import (
    MultiPoly,
    PrefixQuery,
    grid,
    interpolate_univariate,
    eval_univariate,
    lagrange_kernel,
    lde,
    sample_uniform_poly,
    vanishing,
)
from zkipcp.rng import DomainRNG

F5 = prime_field(5)
F7 = prime_field(7)
H01_5 = enumerate_subset(F5, 2)


def _xy_poly():
    p = MultiPoly(F5, (1, 1))
    p.set((1, 1), 1)  # X*Y
    return p


def test_eval_examples():
    zero = MultiPoly(F5, (2, 2))
    assert zero.eval((3, 4)) == 0
    assert _xy_poly().eval((2, 3)) == 1  # 6 mod 5
    q = MultiPoly(F7, (2,))
    q.set((2,), 1)
    q.set((0,), 3)
    assert q.eval((4,)) == 5  # 19 mod 7
    with pytest.raises(ArityMismatch):
        q.eval((1, 2))


def test_partial_sum_examples():
    p = _xy_poly()
    # full prefix = plain evaluation
    assert p.partial_sum(PrefixQuery.point((2, 3))) == p.eval((2, 3))
    one = MultiPoly.constant(F5, 1, 2)
    assert one.partial_sum(PrefixQuery.over((), H01_5, 2)) == 4
    assert p.partial_sum(PrefixQuery.over((1,), H01_5, 1)) == 1  # 1*0 + 1*1


def test_partial_sum_linearity():
    rng = DomainRNG(3, "linearity")
    for _ in range(50):
        p = sample_uniform_poly(F7, (2, 3), rng)
        q = sample_uniform_poly(F7, (2, 3), rng)
        a, b = rng.field_element(F7), rng.field_element(F7)
        h = enumerate_subset(F7, 3)
        query = PrefixQuery.over((rng.field_element(F7),), h, 1)
        lhs = p.scale(a).add(q.scale(b)).partial_sum(query)
        rhs = F7.add(F7.mul(a, p.partial_sum(query)), F7.mul(b, q.partial_sum(query)))
        assert lhs == rhs


def test_lde_examples():
    table = {pt: 3 for pt in grid(H01_5, 2)}
    p = lde(F5, table, H01_5, 2)
    assert p.eval((4, 2)) == 3
    f = {(0,): 0, (1,): 1}
    p = lde(F5, f, H01_5, 1)
    assert p.bounds == (1,)
    assert p.get((1,)) == 1 and p.get((0,)) == 0  # the polynomial X
    # round trip on a random table over a 3-element H
    h3 = enumerate_subset(F5, 3)
    rng = DomainRNG(4, "lde")
    table = {pt: rng.field_element(F5) for pt in grid(h3, 2)}
    p = lde(F5, table, h3, 2)
    for pt in grid(h3, 2):
        assert p.eval(pt) == table[pt]


def test_lde_uniqueness():
    rng = DomainRNG(5, "unique")
    h3 = enumerate_subset(F7, 3)
    for _ in range(20):
        p = sample_uniform_poly(F7, (2, 2), rng)
        table = {pt: p.eval(pt) for pt in grid(h3, 2)}
        q = lde(F7, table, h3, 2)
        assert q == p


def test_lagrange_kernel():
    h = H01_5
    for a in grid(h, 2):
        for b in grid(h, 2):
            expect = 1 if a == b else 0
            assert lagrange_kernel(F5, h, 2, a, b) == expect
    # off-grid: X*Y + (X-1)(Y-1) at (2, 1) = 2 + 0 = 2
    assert lagrange_kernel(F5, h, 1, (2,), (1,)) == 2


def test_kernel_expansion_matches_lde():
    rng = DomainRNG(6, "kernel")
    h3 = enumerate_subset(F7, 3)
    table = {pt: rng.field_element(F7) for pt in grid(h3, 2)}
    p = lde(F7, table, h3, 2)
    for _ in range(10):
        x = (rng.field_element(F7), rng.field_element(F7))
        acc = 0
        for beta in grid(h3, 2):
            acc = F7.add(acc, F7.mul(lagrange_kernel(F7, h3, 2, x, beta), table[beta]))
        assert acc == p.eval(x)


def test_vanishing():
    h = H01_5
    for pt in grid(h, 3):
        assert vanishing(F5, h, pt) == 0
    assert vanishing(F5, h, (2,)) == 2
    assert vanishing(F5, h, (2, 3)) == 2  # 12 mod 5


def test_compile_circuit():
    x, y = ac.var(0), ac.var(1)
    c = ac.ArithCircuit(F5, 2, ac.add(x, y))
    p = c.compile()
    assert p.get((1, 0)) == 1 and p.get((0, 1)) == 1 and p.get((0, 0)) == 0
    # (X+1)^2 over GF(2) = X^2 + 1
    f2 = prime_field(2)
    xp1 = ac.add(ac.var(0), ac.const(1))
    c = ac.ArithCircuit(f2, 1, ac.mul(xp1, xp1))
    p = c.compile()
    assert p.get((2,)) == 1 and p.get((0,)) == 1 and p.get((1,)) == 0
    # budget overflow
    big = ac.var(0)
    node = big
    for _ in range(25):
        node = ac.mul(node, node)
    c = ac.ArithCircuit(prime_field(101), 1, node)
    with pytest.raises(BudgetExceeded):
        c.compile()


def test_circuit_eval_and_degrees():
    x, y = ac.var(0), ac.var(1)
    node = ac.add(ac.mul(x, ac.mul(x, y)), ac.const(3))
    c = ac.ArithCircuit(F7, 2, node)
    assert c.total_degree() == 3
    assert c.var_degrees() == (2, 1)
    assert c.eval((2, 3)) == (2 * 2 * 3 + 3) % 7
    doc = c.doc()
    c2 = ac.ArithCircuit.from_doc(F7, doc)
    assert c2.eval((2, 3)) == c.eval((2, 3))


def test_sample_uniform_poly_deterministic():
    a = sample_uniform_poly(F5, (1, 1), DomainRNG(42, "s"))
    b = sample_uniform_poly(F5, (1, 1), DomainRNG(42, "s"))
    assert a == b
    c = sample_uniform_poly(F5, (0,) * 0, DomainRNG(1, "t"))
    assert c.m == 0


def test_sample_uniform_poly_distribution():
    # chi-square over coefficients: F_5, m=1, d=1 -> 25 cells
    rng = DomainRNG(9, "chi")
    counts = {}
    n = 10_000
    for _ in range(n):
        p = sample_uniform_poly(F5, (1,), rng)
        key = tuple(p.coeffs)
        counts[key] = counts.get(key, 0) + 1
    cells = 25
    expected = n / cells
    chi2 = sum((counts.get(k, 0) - expected) ** 2 / expected
               for k in [(a, b) for a in range(5) for b in range(5)])
    # 24 dof: mean 24, sd ~ 6.9; 4 sigma ~ 52
    assert chi2 < 52


def test_interpolation_helpers():
    pts = [0, 1, 2, 3]
    vals = [eval_univariate(F7, [1, 2, 0, 3], t) for t in pts]
    coeffs = interpolate_univariate(F7, pts, vals)
    assert coeffs == [1, 2, 0, 3]


def test_substitute_and_permute():
    p = sample_uniform_poly(F7, (2, 1, 2), DomainRNG(11, "sub"))
    q = p.substitute({1: 4})
    for a in range(7):
        for b in range(7):
            assert q.eval((a, b)) == p.eval((a, 4, b))
    r = p.permute([2, 0, 1])
    assert r.eval((1, 2, 3)) == p.eval((2, 3, 1))


def test_compiled_degree_respects_declared_bound():
    x = ac.var(0)
    node = ac.mul(x, ac.mul(x, x))
    c = ac.ArithCircuit(F7, 1, node, declared_degree=3)
    assert c.compile().actual_degrees() == (3,)
    with pytest.raises(Exception):
        ac.ArithCircuit(F7, 1, node, declared_degree=2)
