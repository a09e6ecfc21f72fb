"""The sumcheck family.

* the standard reduction (m rounds, challenges from a configurable set),
* the weak-ZK IPCP variant (random mask R, combined claim rho*F + R),
* the strong-ZK construction (mask commitment Z, auxiliary mask A, challenge
  set I with prover aborts) together with its straightline simulator.

All protocols are verifier-centric reductions: they end with an output claim
"F(c) = v" whose truth is checked by the caller against F, matching the
reduction viewpoint the constructions are stated in.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import BudgetExhausted, ZkipcpError
from .field import Field, SubsetSpec
from .mpoly import (
    MultiPoly,
    PrefixQuery,
    eval_univariate,
    interpolate_univariate,
    mixed_grid,
    sample_uniform_poly,
)
from .oracles import Oracle, OracleBundle, checked_read, materialize
from .rng import DomainRNG
from .sampler import ConstraintSet, PolySpace
from .session import ACCEPT, OutputClaim, Transcript


@dataclass
class SumcheckInstance:
    """A claim 'sum over H^m of F equals a' for F of individual degree <= d."""

    field: Field
    m: int
    d: int
    H: SubsetSpec
    a: int
    sum_sets: tuple = None  # per-variable summation sets; defaults to (H,)*m
    strict: bool = True  # enforce the md/|F| < 1/2 relation promise
    bounds: tuple = None  # per-variable degree bounds; defaults to (d,)*m

    def __post_init__(self):
        if self.sum_sets is None:
            self.sum_sets = (self.H,) * self.m
        if self.bounds is None:
            self.bounds = (self.d,) * self.m
        if len(self.sum_sets) != self.m or len(self.bounds) != self.m:
            raise ZkipcpError("need one summation set and degree bound per variable")
        if self.strict and 2 * self.m * self.d >= self.field.order:
            raise ZkipcpError(
                f"md/|F| = {self.m * self.d}/{self.field.order} violates the md/|F| < 1/2 promise")


@dataclass
class StrongParams:
    """Security parameters of the strong-ZK construction: a mask commitment in
    k extra variables over a size-lambda subset G (0 in G), challenge set I."""

    lam: int
    k: int
    G: SubsetSpec
    I: SubsetSpec

    def __post_init__(self):
        if len(self.G) != self.lam:
            raise ZkipcpError("|G| must equal lambda")
        if self.lam > 0 and self.k > 0 and 0 not in self.G.as_set():
            raise ZkipcpError("G must contain 0")

    @property
    def query_bound(self) -> int:
        return self.lam ** self.k


# -- round engine ------------------------------------------------------------------


class HonestRoundProver:
    """Round polynomials of a dense summand by iterated variable elimination."""

    def __init__(self, summand: MultiPoly, sum_sets, degree_bound: int):
        self.current = summand
        self.sets = list(sum_sets)
        self.bound = degree_bound

    def round_poly(self, i: int) -> list[int]:
        tmp = self.current
        for j in range(len(self.sets) - 1, i, -1):
            tmp = tmp.sum_last(self.sets[j])
        return list(tmp.coeffs)

    def receive_challenge(self, i: int, c: int):
        self.current = self.current.bind_first(c)


class OracleRoundProver:
    """Round polynomials of an oracle-backed summand by grid enumeration plus
    interpolation at bound+1 sample points."""

    def __init__(self, field: Field, query_fn, m: int, sum_sets, degree_bound: int):
        self.field = field
        self.query = query_fn
        self.m = m
        self.sets = list(sum_sets)
        self.bound = degree_bound
        self.prefix: list[int] = []

    def round_poly(self, i: int) -> list[int]:
        f = self.field
        pts = [f.element(j) for j in range(self.bound + 1)]
        rest = self.sets[i + 1:]
        values = []
        for x in pts:
            acc = 0
            for gamma in mixed_grid(rest):
                acc = f.add(acc, self.query(tuple(self.prefix) + (x,) + gamma))
            values.append(acc)
        return interpolate_univariate(f, pts, values)

    def receive_challenge(self, i: int, c: int):
        self.prefix.append(c)


class ConsistentLiar:
    """Wraps an honest prover for a *false* claimed sum: each round's message
    is corrected by a degree-d polynomial with d roots in the challenge set,
    so the lie survives a round exactly when the challenge hits a root."""

    def __init__(self, inner, field: Field, sum_sets, degree_bound: int,
                 challenge_set: SubsetSpec, deficit: int):
        self.inner = inner
        self.field = field
        self.sets = list(sum_sets)
        self.bound = degree_bound
        self.roots = challenge_set.elements  # root candidates, best-first
        self.deficit = deficit  # claimed sum minus true sum, before round 0
        self._last_corrections: list[int] | None = None

    def _correction(self, i: int) -> list[int]:
        """Degree-<=d polynomial with sum 1 over the round's set and d roots
        placed in the challenge set but outside the summation set (so the lie
        dies exactly when the challenge hits a root)."""
        from .mpoly import _poly_mul_linear
        f = self.field
        sum_set = self.sets[i].as_set()
        roots = [r for r in self.roots if r not in sum_set][: self.bound]
        if len(roots) < self.bound:
            roots += [r for r in self.roots if r in sum_set][: self.bound - len(roots)]
        while True:
            poly = [1]
            for r in roots:
                poly = _poly_mul_linear(f, poly, r)
            total = 0
            for alpha in self.sets[i].elements:
                total = f.add(total, eval_univariate(f, poly, alpha))
            if total != 0:
                break
            roots.pop()  # a root made the set-sum vanish; use one fewer
        inv = f.inv(total)
        return [f.mul(inv, c) for c in poly]

    def round_poly(self, i: int) -> list[int]:
        f = self.field
        honest = self.inner.round_poly(i)
        corr = self._correction(i)
        self._last_corrections = corr
        out = list(honest) + [0] * (self.bound + 1 - len(honest))
        for j, c in enumerate(corr[: self.bound + 1]):
            out[j] = f.add(out[j], f.mul(self.deficit, c))
        return out

    def receive_challenge(self, i: int, c: int):
        # the surviving deficit scales by the correction's value at c
        f = self.field
        self.deficit = f.mul(self.deficit, eval_univariate(f, self._last_corrections, c))
        self.inner.receive_challenge(i, c)


def run_rounds(prover, inst_sets, field: Field, degree_bound: int, target: int,
               challenge_set: SubsetSpec, rng: DomainRNG, transcript: Transcript,
               tag: str, challenge_fn=None, abort_outside=None):
    """Drive the m rounds of a sumcheck; returns (b, challenges, ok).

    challenge_fn overrides the honest uniform draw (malicious verifiers);
    abort_outside, when set to a subset, makes the prover abort on challenges
    outside it (the strong construction's I-discipline).
    """
    b = target
    challenges = []
    per_round = degree_bound if isinstance(degree_bound, (list, tuple)) \
        else [degree_bound] * len(inst_sets)
    for i, S in enumerate(inst_sets):
        bound_i = per_round[i]
        coeffs = prover.round_poly(i)
        if len(coeffs) > bound_i + 1:
            transcript.reject(f"{tag}: degree violation in round {i}")
            return b, challenges, False
        coeffs = list(coeffs) + [0] * (bound_i + 1 - len(coeffs))
        transcript.prover(f"{tag}.g{i}", tuple(coeffs))
        total = 0
        for alpha in S.elements:
            total = field.add(total, eval_univariate(field, coeffs, alpha))
        if total != b:
            transcript.reject(f"{tag}: round check failed at round {i}")
            return b, challenges, False
        if challenge_fn is not None:
            c = challenge_fn(f"{tag}.c{i}")
        elif challenge_set is None:
            c = rng.field_element(field)
        else:
            c = rng.from_subset(challenge_set)
        transcript.challenge(f"{tag}.c{i}", c)
        if abort_outside is not None and c not in abort_outside.as_set():
            transcript.prover(f"{tag}.abort", 1)
            transcript.reject(f"{tag}: prover aborted on challenge outside I")
            return b, challenges, False
        challenges.append(c)
        prover.receive_challenge(i, c)
        b = eval_univariate(field, coeffs, c)
    return b, challenges, True


# -- standard sumcheck ----------------------------------------------------------------


def sumcheck_reduce(summand, inst: SumcheckInstance, challenge_set: SubsetSpec,
                    rng: DomainRNG, transcript: Transcript | None = None,
                    prover=None):
    """The plain reduction: returns (transcript, claim-or-None).  `summand`
    may be a MultiPoly (honest dense prover) or a callable point -> value."""
    t = transcript if transcript is not None else Transcript()
    if prover is None:
        if isinstance(summand, MultiPoly):
            prover = HonestRoundProver(summand, inst.sum_sets, inst.d)
        else:
            prover = OracleRoundProver(inst.field, summand, inst.m, inst.sum_sets, inst.d)
    b, challenges, ok = run_rounds(
        prover, inst.sum_sets, inst.field, inst.d, inst.a, challenge_set, rng, t, "sc")
    if not ok:
        return t, None
    claim = OutputClaim(tuple(challenges), b)
    t.accept(claim)
    return t, claim


# -- weak-ZK sumcheck --------------------------------------------------------------------


def weak_zk_sumcheck(F_poly: MultiPoly, inst: SumcheckInstance, rng: DomainRNG,
                     compiled: bool = True, ldt_reps: int = 3,
                     transcript: Transcript | None = None,
                     mask: MultiPoly | None = None, prover_factory=None,
                     mask_oracle: Oracle | None = None):
    """BCFGRS-style masked sumcheck: the prover sends a random mask oracle R in
    the instance's space and z = sum(R); the reduction runs on rho*F + R and
    the verifier resolves R(c) itself (self-correction in compiled mode)."""
    t = transcript if transcript is not None else Transcript()
    f = inst.field
    if mask is None:
        mask = sample_uniform_poly(f, (inst.d,) * inst.m, rng.child("mask"))
    R_oracle = mask_oracle if mask_oracle is not None else materialize(mask, "R")
    z = mask.partial_sum(PrefixQuery((), inst.sum_sets))
    t.prover("z", z)
    rho = rng.child("rho").nonzero(f)
    t.challenge("rho", rho)
    combined = F_poly.scale(rho).add(mask)
    target = f.add(f.mul(rho, inst.a), z)
    if prover_factory is not None:
        prover = prover_factory(combined, target)
    else:
        prover = HonestRoundProver(combined, inst.sum_sets, inst.d)
    b, challenges, ok = run_rounds(
        prover, inst.sum_sets, f, inst.d, target, None, rng.child("challenges"), t, "wzk")
    if not ok:
        return t, None, R_oracle
    # resolve the mask at the reduction point
    r_val, test_ok = checked_read(R_oracle, challenges, (inst.d,) * inst.m,
                                  ldt_reps, rng.child("ldt"), compiled)
    t.oracle("R", tuple(challenges), r_val)
    if not test_ok:
        t.reject("wzk: low-degree test failed on the mask oracle")
        return t, None, R_oracle
    value = f.mul(f.sub(b, r_val), f.inv(rho))
    claim = OutputClaim(tuple(challenges), value)
    t.accept(claim)
    return t, claim, R_oracle


# -- strong-ZK sumcheck ---------------------------------------------------------------


class CombinedRoundProver:
    """Weighted sum of round provers over the same variable sequence (used for
    rho1 * F + R when F is not a dense polynomial)."""

    def __init__(self, field, bound: int, weighted):
        self.field = field
        self.bound = bound
        self.weighted = weighted  # list of (weight, prover)

    def round_poly(self, i: int) -> list[int]:
        f = self.field
        parts = [(w, p.round_poly(i)) for w, p in self.weighted]
        out = [0] * max(len(c) for _w, c in parts)
        for weight, coeffs in parts:
            for j, c in enumerate(coeffs):
                out[j] = f.add(out[j], f.mul(weight, c))
        return out

    def receive_challenge(self, i: int, c: int):
        for _, prover in self.weighted:
            prover.receive_challenge(i, c)


class HonestStrongProver:
    """The real prover of the strong construction: holds the summand F (a
    dense polynomial, or any object with .eval and .fresh_prover) and draws
    the mask commitment Z and auxiliary mask A uniformly at random."""

    def __init__(self, F_poly, inst: SumcheckInstance, params: StrongParams,
                 rng: DomainRNG, budget: int | None = None):
        self.F = F_poly
        self.inst = inst
        self.params = params
        f = inst.field
        zb = tuple(inst.bounds) + (2 * params.lam,) * params.k
        ab = (2 * params.lam,) * params.k
        self.Z = sample_uniform_poly(f, zb, rng.child("Z"))
        self.A = sample_uniform_poly(f, ab, rng.child("A"))
        self._budget = budget
        # the committed mask R(X) = sum over G^k of Z(X, *)
        zs = self.Z
        for _ in range(params.k):
            zs = zs.sum_last(params.G)
        self.R = zs
        self.c: tuple = ()

    def bundle(self) -> OracleBundle:
        return OracleBundle(
            Z=materialize(self.Z, "Z", self._budget),
            A=materialize(self.A, "A", self._budget),
        )

    def sums(self):
        inst, params = self.inst, self.params
        z1 = self.Z.partial_sum(PrefixQuery((), inst.sum_sets + (params.G,) * params.k))
        z2 = self.A.partial_sum(PrefixQuery((), (params.G,) * params.k))
        return z1, z2

    def p1_prover(self, rho1: int, z1: int):
        self._rho1 = rho1
        if isinstance(self.F, MultiPoly):
            Q = self.F.scale(rho1).add(self.R)
            return HonestRoundProver(Q, self.inst.sum_sets, self.inst.d)
        return CombinedRoundProver(self.inst.field, self.inst.d, [
            (rho1, self.F.fresh_prover()),
            (1, HonestRoundProver(self.R, self.inst.sum_sets, self.inst.d)),
        ])

    def p1_bounds(self):
        return list(self.inst.bounds)

    def after_p1(self, challenges, b1):
        self.c = tuple(challenges)
        return self.R.eval(self.c)

    def p2_prover(self, rho2: int, w: int, z2: int):
        S2 = self.Z.bind_prefix(self.c).scale(rho2).add(self.A)
        return HonestRoundProver(S2, (self.params.G,) * self.params.k, 2 * self.params.lam)


class CheatingStrongProver(HonestStrongProver):
    """Forces a true output claim on a false instance by lying about w, then
    runs a consistent-liar in the second sumcheck to defend the lie."""

    def __init__(self, F_poly, inst, params, rng, true_sum: int, budget=None):
        super().__init__(F_poly, inst, params, rng, budget)
        self.true_sum = true_sum
        self._rho1 = 0

    def p1_prover(self, rho1, z1):
        f = self.inst.field
        self._rho1 = rho1
        Q = self.F.scale(rho1).add(self.R)
        deficit = f.mul(rho1, f.sub(self.inst.a, self.true_sum))
        inner = HonestRoundProver(Q, self.inst.sum_sets, self.inst.d)
        return ConsistentLiar(inner, f, self.inst.sum_sets, self.inst.d,
                              self.params.I, deficit)

    def after_p1(self, challenges, b1):
        # claim value (b1 - w)/rho1 becomes exactly F(c): always-true claim
        f = self.inst.field
        self.c = tuple(challenges)
        return f.sub(b1, f.mul(self._rho1, self.F.eval(self.c)))

    def p2_prover(self, rho2, w, z2):
        f = self.inst.field
        S2 = self.Z.bind_prefix(self.c).scale(rho2).add(self.A)
        true_w = self.R.eval(self.c)
        deficit = f.mul(rho2, f.sub(w, true_w))
        inner = HonestRoundProver(S2, (self.params.G,) * self.params.k, 2 * self.params.lam)
        full = SubsetSpec("F", f, tuple(f.elements())) if f.order <= 4096 else None
        roots = full if full is not None else self.params.I
        return ConsistentLiar(inner, f, (self.params.G,) * self.params.k,
                              2 * self.params.lam, roots, deficit)


class StrongZKSimulator:
    """Straightline simulator for the strong construction.

    Answers all oracle queries from sampler sessions, makes exactly one query
    to F (at the phase-1 reduction point, which lies in I^m), and produces
    messages whose joint distribution matches the real prover's exactly for
    any verifier within the lambda^k query budget.
    """

    def __init__(self, inst: SumcheckInstance, params: StrongParams, F_query,
                 rng: DomainRNG, budget: int | None = None,
                 mask_degree_offset: int = 0):
        self.inst = inst
        self.params = params
        self.F_query = F_query
        self.rng = rng
        f = inst.field
        dz = 2 * params.lam + mask_degree_offset
        self.zspace = PolySpace(f, tuple(inst.bounds) + (dz,) * params.k)
        self.aspace = PolySpace(f, (dz,) * params.k)
        self.S_Z = ConstraintSet(self.zspace, rng.child("Z"))
        self.S_A = ConstraintSet(self.aspace, rng.child("A"))
        self.S_Zp: ConstraintSet | None = None
        self.S_Qp: ConstraintSet | None = None
        self.S_Q: ConstraintSet | None = None
        self.rho2 = 0
        self.c: tuple = ()
        self.f_queries: list[tuple] = []
        self.z_answers: list[tuple] = []
        self.a_answers: list[tuple] = []
        self._budget = budget
        self._late = False
        self._z1 = 0
        self._z2 = 0
        self._mask_bound = dz

    # oracle answering rules ------------------------------------------------

    def _answer_Z(self, pt):
        if self._late:
            v = self.S_Zp.sample(PrefixQuery.point(pt))
        else:
            v = self.S_Z.sample(PrefixQuery.point(pt))
        self.z_answers.append((pt, v))
        return v

    def _answer_A(self, pt):
        f = self.inst.field
        if self._late:
            q = self.S_Qp.sample(PrefixQuery.point(pt))
            z = self.S_Zp.sample(PrefixQuery.point(self.c + tuple(pt)))
            v = f.sub(q, f.mul(self.rho2, z))
        else:
            v = self.S_A.sample(PrefixQuery.point(pt))
        self.a_answers.append((pt, v))
        return v

    def bundle(self) -> OracleBundle:
        f = self.inst.field
        mk = self.inst.m + self.params.k
        return OracleBundle(
            Z=Oracle(f, mk, lambda pt: self._answer_Z(pt), "Z", self._budget),
            A=Oracle(f, self.params.k, lambda pt: self._answer_A(pt), "A", self._budget),
        )

    def sums(self):
        inst, params = self.inst, self.params
        self._z1 = self.S_Z.sample(
            PrefixQuery((), inst.sum_sets + (params.G,) * params.k))
        self._z2 = self.S_A.sample(PrefixQuery((), (params.G,) * params.k))
        return self._z1, self._z2

    def p1_prover(self, rho1: int, z1: int):
        f = self.inst.field
        self._rho1 = rho1
        self.S_Q = ConstraintSet(PolySpace(f, tuple(self.inst.bounds)),
                                 self.rng.child("Q"))
        target = f.add(f.mul(rho1, self.inst.a), z1)
        self.S_Q.constrain(PrefixQuery((), self.inst.sum_sets), target)
        return SessionRoundProver(self.S_Q, self.inst.sum_sets,
                                  list(self.inst.bounds))

    def p1_bounds(self):
        return list(self.inst.bounds)

    def after_p1(self, challenges, b1):
        f = self.inst.field
        params = self.params
        self.c = tuple(challenges)
        fc = self.F_query(self.c)
        self.f_queries.append(self.c)
        qc = self.S_Q.sample(PrefixQuery.point(self.c))
        w = f.sub(qc, f.mul(self._rho1, fc))
        # redraw: fresh Z session conditioned on the sums and the past answers
        self.S_Zp = ConstraintSet(self.zspace, self.rng.child("Zp"))
        self.S_Zp.constrain(
            PrefixQuery((), self.inst.sum_sets + (params.G,) * params.k), self._z1)
        self.S_Zp.constrain(PrefixQuery(self.c, (params.G,) * params.k), w)
        for pt, v in self.z_answers:
            self.S_Zp.constrain(PrefixQuery.point(pt), v)
        self._w = w
        return w

    def p2_prover(self, rho2: int, w: int, z2: int):
        f = self.inst.field
        params = self.params
        self.rho2 = rho2
        self.S_Qp = ConstraintSet(self.aspace, self.rng.child("Qp"))
        target = f.add(f.mul(rho2, w), z2)
        self.S_Qp.constrain(PrefixQuery((), (params.G,) * params.k), target)
        for pt, v in self.a_answers:
            z = self.S_Zp.sample(PrefixQuery.point(self.c + tuple(pt)))
            self.S_Qp.constrain(PrefixQuery.point(pt),
                                f.add(f.mul(rho2, z), v))
        self._late = True
        return SessionRoundProver(self.S_Qp, (params.G,) * params.k, self._mask_bound)

    # bookkeeping used by the structural ZK checks ----------------------------

    def answers_consistent(self) -> bool:
        """All emitted Z answers fit one polynomial of the declared degrees,
        and likewise for A (fed back through a fresh constraint detector)."""
        from .errors import InconsistentConstraints
        probe_z = ConstraintSet(self.zspace, self.rng.child("probe-z"))
        try:
            for pt, v in self.z_answers:
                probe_z.constrain(PrefixQuery.point(pt), v)
        except InconsistentConstraints:
            return False
        probe_a = ConstraintSet(self.aspace, self.rng.child("probe-a"))
        try:
            for pt, v in self.a_answers:
                probe_a.constrain(PrefixQuery.point(pt), v)
        except InconsistentConstraints:
            return False
        return True

    _rho1 = 0


class SessionRoundProver:
    """Round polynomials determined through a sampler session: the prover-side
    messages of the simulator, drawn by querying its implicit polynomial at
    degree+1 sample points per round."""

    def __init__(self, cs: ConstraintSet, sum_sets, degree_bound):
        self.cs = cs
        self.sets = list(sum_sets)
        if isinstance(degree_bound, int):
            degree_bound = [degree_bound] * len(self.sets)
        self.bounds = list(degree_bound)
        self.prefix: list[int] = []

    def round_poly(self, i: int) -> list[int]:
        f = self.cs.space.field
        pts = [f.element(j) for j in range(self.bounds[i] + 1)]
        rest = tuple(self.sets[i + 1:])
        values = [
            self.cs.sample(PrefixQuery(tuple(self.prefix) + (x,), rest))
            for x in pts
        ]
        return interpolate_univariate(f, pts, values)

    def receive_challenge(self, i: int, c: int):
        self.prefix.append(c)


def strong_zk_run(inst: SumcheckInstance, params: StrongParams, prover_like,
                  rng: DomainRNG, *, compiled: bool = True, ldt_reps: int = 3,
                  challenge_fn=None, query_plan=None, do_final_checks: bool = True,
                  transcript: Transcript | None = None, tag: str = ""):
    """Drive one execution of the strong-ZK sumcheck (oracle round, two
    sumcheck phases, final oracle checks) against an honest verifier, or with
    scripted challenges/queries when challenge_fn / query_plan are given.

    Returns (transcript, claim-or-None, bundle)."""
    f = inst.field
    t = transcript if transcript is not None else Transcript()
    bundle = prover_like.bundle()

    def run_plan(stage: str):
        if query_plan is not None:
            for label, pt in query_plan(stage):
                v = bundle[label].query(pt)
                t.oracle(label, tuple(pt), v)

    def draw(label: str, domain, uniform_fn):
        if challenge_fn is not None:
            c = challenge_fn(label)
        else:
            c = uniform_fn()
        t.challenge(label, c)
        return c

    run_plan("oracle")
    z1, z2 = prover_like.sums()
    t.prover(tag + "sums", (z1, z2))
    run_plan("after_sums")

    rho1 = draw(tag + "rho1", None, lambda: rng.child("rho1").nonzero(f))
    target1 = f.add(f.mul(rho1, inst.a), z1)
    p1 = prover_like.p1_prover(rho1, z1)
    crng = rng.child("p1")
    b1, challenges, ok = run_rounds(
        p1, inst.sum_sets, f, list(inst.bounds), target1, params.I, crng, t,
        tag + "p1", challenge_fn=challenge_fn, abort_outside=params.I)
    if not ok:
        return t, None, bundle
    run_plan("after_p1")

    w = prover_like.after_p1(challenges, b1)
    t.prover(tag + "w", w)
    run_plan("after_w")

    rho2 = draw(tag + "rho2", None, lambda: rng.child("rho2").nonzero(f))
    target2 = f.add(f.mul(rho2, w), z2)
    p2 = prover_like.p2_prover(rho2, w, z2)
    crng2 = rng.child("p2")
    b2, tchal, ok = run_rounds(
        p2, (params.G,) * params.k, f, 2 * params.lam, target2, None, crng2, t, tag + "p2",
        challenge_fn=challenge_fn)
    if not ok:
        return t, None, bundle
    run_plan("end")

    claim_value = f.mul(f.sub(b1, w), f.inv(rho1))
    claim = OutputClaim(tuple(challenges), claim_value)
    if not do_final_checks:
        t.accept(claim)
        return t, claim, bundle

    # final oracle checks: Z at (c, t), A at t
    ldt_rng = rng.child("ldt")
    zb = tuple(inst.bounds) + (2 * params.lam,) * params.k
    ab = (2 * params.lam,) * params.k
    zv, ok_z = checked_read(bundle["Z"], tuple(challenges) + tuple(tchal), zb,
                            ldt_reps, ldt_rng.child("Z"), compiled)
    t.oracle(tag + "Z", tuple(challenges) + tuple(tchal), zv)
    av, ok_a = checked_read(bundle["A"], tuple(tchal), ab,
                            ldt_reps, ldt_rng.child("A"), compiled)
    t.oracle(tag + "A", tuple(tchal), av)
    if not (ok_z and ok_a):
        t.reject("strong: low-degree test failed")
        return t, None, bundle
    if f.add(f.mul(rho2, zv), av) != b2:
        t.reject("strong: final oracle check failed")
        return t, None, bundle
    t.accept(claim)
    return t, claim, bundle


def strong_zk_prove_verify(F_poly: MultiPoly, inst: SumcheckInstance,
                           params: StrongParams, rng: DomainRNG, *,
                           compiled: bool = True, ldt_reps: int = 3):
    """Honest prover against the honest verifier."""
    prover = HonestStrongProver(F_poly, inst, params, rng.child("prover"))
    return strong_zk_run(inst, params, prover, rng.child("verifier"),
                         compiled=compiled, ldt_reps=ldt_reps)


def strong_zk_simulate(inst: SumcheckInstance, params: StrongParams, F_query,
                       rng: DomainRNG, *, challenge_fn=None, query_plan=None,
                       do_final_checks: bool = True, budget: int | None = None,
                       mask_degree_offset: int = 0):
    """Run the simulator in place of the prover; returns
    (transcript, claim, simulator)."""
    sim = StrongZKSimulator(inst, params, F_query, rng.child("sim"),
                            budget=budget, mask_degree_offset=mask_degree_offset)
    t, claim, _ = strong_zk_run(
        inst, params, sim, rng.child("verifier"), compiled=False,
        challenge_fn=challenge_fn, query_plan=query_plan,
        do_final_checks=do_final_checks)
    return t, claim, sim
