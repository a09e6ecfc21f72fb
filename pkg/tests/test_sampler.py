import itertools

import pytest

from zkipcp.errors import InconsistentConstraints
from zkipcp.field import enumerate_subset, prime_field
from zkipcp.mpoly import MultiPoly, PrefixQuery
from zkipcp.rng import DomainRNG
from zkipcp.sampler import ConstraintSet, PolySpace, sample_constrained_poly

F3 = prime_field(3)
F5 = prime_field(5)


def test_functional_point_query():
    space = PolySpace(F5, (2,))
    v = space.point_functional((3,))
    assert v == [1, 3, 4]  # 1, x, x^2 at x = 3


def test_functional_sum_query():
    h = enumerate_subset(F5, 2)
    space = PolySpace(F5, (2,))
    v = space.functional(PrefixQuery.over((), h, 1))
    assert v == [2, 1, 1]  # sum over {0,1} of 1, x, x^2


def test_functional_full_prefix_equals_point():
    space = PolySpace(F5, (1, 2))
    pt = (2, 4)
    assert space.functional(PrefixQuery.point(pt)) == space.point_functional(pt)


def test_recorded_query_is_idempotent():
    space = PolySpace(F5, (1, 1))
    cs = ConstraintSet(space, DomainRNG(1, "cs"))
    q = PrefixQuery.point((2, 3))
    v1 = cs.sample(q)
    v2 = cs.sample(q)
    assert v1 == v2


def test_forced_value_from_interpolating_grid():
    # fix R on all of a (d+1)-point grid; the full sum is then determined
    h = enumerate_subset(F5, 2)
    space = PolySpace(F5, (1,))
    rng = DomainRNG(2, "forced")
    cs = ConstraintSet(space, rng)
    cs.constrain(PrefixQuery.point((0,)), 2)
    cs.constrain(PrefixQuery.point((1,)), 4)
    total = cs.sample(PrefixQuery.over((), h, 1))
    assert total == (2 + 4) % 5
    with pytest.raises(InconsistentConstraints):
        cs.constrain(PrefixQuery.point((2,)), 0)  # line through (0,2),(1,4) hits (2,1)


def test_uniform_marginal():
    # empty history, point query: uniform over F_5
    counts = [0] * 5
    n = 10_000
    master = DomainRNG(3, "marginal")
    for i in range(n):
        cs = ConstraintSet(PolySpace(F5, (1,)), master.child(str(i)))
        counts[cs.sample(PrefixQuery.point((2,)))] += 1
    expected = n / 5
    chi2 = sum((c - expected) ** 2 / expected for c in counts)
    assert chi2 < 35  # 4 dof, 4 sigma-ish


def test_exact_conditional_distribution_exhaustive():
    """F_3, m=1, d=1: enumerate all 9 polynomials; for every constraint history
    the sampler's conditional distribution equals the exhaustive one exactly."""
    h = enumerate_subset(F3, 2)
    space = PolySpace(F3, (1,))
    queries = [PrefixQuery.point((0,)), PrefixQuery.point((2,)),
               PrefixQuery.over((), h, 1)]
    all_polys = [MultiPoly(F3, (1,), [a, b]) for a in range(3) for b in range(3)]

    def answer(poly, q):
        return poly.partial_sum(q)

    # all histories: sequences of (query, value) pairs over the 3 queries
    for ordering in itertools.permutations(queries):
        for values in itertools.product(range(3), repeat=len(ordering)):
            history = list(zip(ordering, values))
            for cut in range(len(history)):
                prefix, (next_q, _) = history[:cut], history[cut]
                surviving = [p for p in all_polys
                             if all(answer(p, q) == v for q, v in prefix)]
                if not surviving:
                    continue
                # exhaustive conditional distribution of next_q
                dist = {}
                for p in surviving:
                    v = answer(p, next_q)
                    dist[v] = dist.get(v, 0) + 1
                # sampler distribution over many seeds
                counts = {}
                trials = 600
                for i in range(trials):
                    cs = ConstraintSet(space, DomainRNG(i, "exh"))
                    ok = True
                    try:
                        for q, v in prefix:
                            cs.constrain(q, v)
                    except InconsistentConstraints:
                        ok = False
                    if not ok:
                        continue
                    v = cs.sample(next_q)
                    counts[v] = counts.get(v, 0) + 1
                support = set(dist)
                assert set(counts) == support
                if len(support) == 1:
                    continue
                # uniform over support (all conditionals here are uniform cosets)
                expected = trials / len(support)
                for v in support:
                    assert abs(counts[v] - expected) < 6 * (expected ** 0.5)


def test_determinism():
    space = PolySpace(F5, (2, 1))
    h = enumerate_subset(F5, 2)
    queries = [PrefixQuery.point((1, 2)), PrefixQuery.over((3,), h, 1),
               PrefixQuery.over((), h, 2), PrefixQuery.point((0, 0))]
    streams = []
    for _ in range(2):
        cs = ConstraintSet(space, DomainRNG(77, "det"))
        streams.append([cs.sample(q) for q in queries])
    assert streams[0] == streams[1]


def test_sample_polynomial_respects_constraints():
    h = enumerate_subset(F5, 2)
    rng = DomainRNG(5, "mat")
    for i in range(20):
        constraints = [(PrefixQuery.over((), h, 2), 3),
                       (PrefixQuery.point((2, 2)), 1)]
        p = sample_constrained_poly(F5, (2, 2), constraints, rng.child(str(i)))
        assert p.partial_sum(PrefixQuery.over((), h, 2)) == 3
        assert p.eval((2, 2)) == 1


def test_sample_polynomial_matches_lazy_answers():
    space = PolySpace(F5, (1, 1))
    cs = ConstraintSet(space, DomainRNG(6, "lazy"))
    h = enumerate_subset(F5, 2)
    q1 = PrefixQuery.point((3, 4))
    q2 = PrefixQuery.over((2,), h, 1)
    v1, v2 = cs.sample(q1), cs.sample(q2)
    p = cs.sample_polynomial()
    assert p.eval((3, 4)) == v1
    assert p.partial_sum(q2) == v2
