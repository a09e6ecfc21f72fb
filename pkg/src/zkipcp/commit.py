"""The algebraic commitment scheme: a committed element (or polynomial) is
encoded in the fiber sums of a random low-degree oracle Z; hiding is the exact
independence statement checked by the aqc module, binding rides on sumcheck
soundness, and decommitments run the masked (weak-ZK) sumcheck so that no
partial sums of Z leak."""

from __future__ import annotations

from dataclasses import dataclass

from . import aqc
from .errors import DegreeMismatch, DegreeTooLow
from .field import Field, SubsetSpec, enumerate_subset
from .mpoly import MultiPoly, PrefixQuery, sample_uniform_poly
from .oracles import Oracle, checked_read, materialize
from .rng import DomainRNG
from .sampler import sample_constrained_poly
from .session import OutputClaim, Transcript
from .sumcheck import ConsistentLiar, HonestRoundProver, run_rounds


@dataclass
class CommitmentParams:
    """k extra variables summed over G; the commitment oracle has degree
    d_prime in those variables, which must be at least 2(|G|-1) for hiding."""

    k: int
    G: SubsetSpec
    d_prime: int
    m: int = 0
    d_q: int = 0

    def __post_init__(self):
        if self.d_prime < 2 * (len(self.G) - 1):
            raise DegreeTooLow(
                f"d' = {self.d_prime} < 2(|G|-1) = {2 * (len(self.G) - 1)}; "
                "a single off-grid query would leak the committed value")

    @property
    def query_threshold(self) -> int:
        return len(self.G) ** self.k


@dataclass
class Commitment:
    """Prover-side state: the full oracle polynomial Z.  The verifier sees
    only the oracle handle."""

    params: CommitmentParams
    field: Field
    Z: MultiPoly

    def oracle(self, budget: int | None = None) -> Oracle:
        return materialize(self.Z, "Z", budget)

    def committed_poly(self) -> MultiPoly:
        """The polynomial the oracle binds to: fiber sums over G^k."""
        S = self.Z
        for _ in range(self.params.k):
            S = S.sum_last(self.params.G)
        return S

    def committed_value(self) -> int:
        return self.committed_poly().coeffs[0] if self.params.m == 0 else None


def commit_element(field: Field, a: int, params: CommitmentParams,
                   rng: DomainRNG) -> Commitment:
    """Z uniform in the k-variate degree-d' space conditioned on the G^k sum."""
    bounds = (params.d_prime,) * params.k
    Z = sample_constrained_poly(
        field, bounds, [(PrefixQuery((), (params.G,) * params.k), a)], rng)
    return Commitment(CommitmentParams(params.k, params.G, params.d_prime, 0, 0),
                      field, Z)


def commit_poly(Q: MultiPoly, params: CommitmentParams, rng: DomainRNG) -> Commitment:
    """Z uniform conditioned on sum_{G^k} Z(alpha, .) = Q(alpha) for alpha in
    K^m, |K| = d_q + 1; by degree counting the fiber-sum polynomial then
    equals Q identically."""
    field = Q.field
    d_q = max(params.d_q, max(Q.actual_degrees(), default=0))
    if max(Q.actual_degrees(), default=0) > d_q:
        raise DegreeMismatch("committed polynomial exceeds the declared degree")
    m = Q.m
    K = enumerate_subset(field, d_q + 1, name="K")
    bounds = (d_q,) * m + (params.d_prime,) * params.k
    constraints = []
    import itertools
    for alpha in itertools.product(K.elements, repeat=m):
        constraints.append(
            (PrefixQuery(alpha, (params.G,) * params.k), Q.eval(alpha)))
    Z = sample_constrained_poly(field, bounds, constraints, rng)
    return Commitment(CommitmentParams(params.k, params.G, params.d_prime, m, d_q),
                      field, Z)


def decommit(com: Commitment, alpha, rng: DomainRNG, *, compiled: bool = True,
             ldt_reps: int = 2, transcript: Transcript | None = None,
             cheat_value: int | None = None):
    """Open Q(alpha) through the masked sumcheck over G^k.

    Returns (transcript, claimed value or None).  The prover sends the value,
    a fresh mask oracle, and proves 'sum_{G^k} Z(alpha, .) = value'; the
    verifier resolves both oracles itself at the reduction point (with
    low-degree testing and self-correction in compiled mode)."""
    t = transcript if transcript is not None else Transcript()
    f = com.field
    p = com.params
    alpha = tuple(alpha)
    if len(alpha) != p.m:
        raise DegreeMismatch(f"opening point must have {p.m} coordinates")
    S = com.Z.bind_prefix(alpha)  # the k-variate fiber polynomial
    true_value = S.partial_sum(PrefixQuery((), (p.G,) * p.k))
    value = true_value if cheat_value is None else cheat_value
    t.prover("open", value)

    mask = sample_uniform_poly(f, (p.d_prime,) * p.k, rng.child("mask"))
    mask_oracle = materialize(mask, "mask")
    z = mask.partial_sum(PrefixQuery((), (p.G,) * p.k))
    t.prover("z", z)
    rho = rng.child("rho").nonzero(f)
    t.challenge("rho", rho)
    combined = S.scale(rho).add(mask)
    target = f.add(f.mul(rho, value), z)
    prover = HonestRoundProver(combined, (p.G,) * p.k, p.d_prime)
    if cheat_value is not None:
        full = SubsetSpec("roots", f, tuple(
            f.element(i) for i in range(min(f.order, p.d_prime + 1))))
        deficit = f.mul(rho, f.sub(value, true_value))
        prover = ConsistentLiar(prover, f, (p.G,) * p.k, p.d_prime, full, deficit)
    b, chal, ok = run_rounds(prover, (p.G,) * p.k, f, p.d_prime, target, None,
                             rng.child("rounds"), t, "open")
    if not ok:
        return t, None
    # resolve the mask and the commitment oracle at the reduction point
    ldt = rng.child("ldt")
    rv, ok_r = checked_read(mask_oracle, chal, (p.d_prime,) * p.k,
                            ldt_reps, ldt.child("mask"), compiled)
    t.oracle("mask", tuple(chal), rv)
    if not ok_r:
        t.reject("open: mask low-degree test failed")
        return t, None
    zb = (p.d_q,) * p.m + (p.d_prime,) * p.k
    zv, ok_z = checked_read(com.oracle(), alpha + tuple(chal), zb,
                            ldt_reps, ldt.child("Z"), compiled)
    t.oracle("Z", alpha + tuple(chal), zv)
    if not ok_z:
        t.reject("open: commitment low-degree test failed")
        return t, None
    if f.add(f.mul(rho, zv), rv) != b:
        t.reject("open: final oracle check failed")
        return t, None
    t.accept(OutputClaim(alpha, value))
    return t, value


def hiding_independence(field: Field, params: CommitmentParams, queries):
    """Exact hiding: the fiber-sum ensemble versus the adversary's query set."""
    return aqc.independence_check(field, params.m, params.k, params.d_q,
                                  params.d_prime, params.G, list(queries))


def reconstruct_committed(com: Commitment) -> MultiPoly:
    """Binding helper: the unique polynomial consistent with the oracle,
    rebuilt from K^m fiber sums."""
    return com.committed_poly()


def unsafe_multilinear_params(field: Field, k: int) -> CommitmentParams:
    """The broken d' = 1 parameterization used to demonstrate the one-query
    attack; bypasses the constructor guard on purpose."""
    G = enumerate_subset(field, 2, name="G")
    params = CommitmentParams.__new__(CommitmentParams)
    params.k = k
    params.G = G
    params.d_prime = 1
    params.m = 0
    params.d_q = 0
    return params
