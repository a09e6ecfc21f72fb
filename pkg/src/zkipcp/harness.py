"""Empirical measurement: soundness experiments with Wilson intervals, and
two-sample zero-knowledge testing over view fingerprints.

View comparison: each transcript's view is flattened into a canonical list of
scalar coordinates (message elements, challenges, oracle answers, plus a
structure coordinate).  The reported statistic is the maximum over coordinates
of the empirical total-variation distance between the two samples; every
coordinate marginal lower-bounds the view TV, and perfect zero knowledge
predicts zero for all of them, up to sampling noise.  The full-fingerprint TV
is also reported (it saturates once the view space exceeds the sample size,
which is why the acceptance statistic is the marginal maximum; the real-vs-real
noise floor is computed the same way so the two are directly comparable).
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field as dc_field

from .session import Transcript

PAD = "~"


def wilson_interval(successes: int, trials: int, z: float = 3.0):
    """Wilson score interval at z standard errors (z=3 for the 3-sigma margin)."""
    if trials == 0:
        return 0.0, 0.0, 1.0
    p = successes / trials
    denom = 1 + z * z / trials
    centre = (p + z * z / (2 * trials)) / denom
    half = (z / denom) * math.sqrt(p * (1 - p) / trials + z * z / (4 * trials * trials))
    return p, max(0.0, centre - half), min(1.0, centre + half)


@dataclass
class SoundnessReport:
    label: str
    trials: int
    successes: int
    envelope: float
    rate: float
    wilson_low: float
    wilson_high: float

    @property
    def within_envelope(self) -> bool:
        return self.rate <= self.envelope

    def row(self) -> dict:
        return {
            "label": self.label, "trials": self.trials, "successes": self.successes,
            "rate": round(self.rate, 6), "wilson_low": round(self.wilson_low, 6),
            "wilson_high": round(self.wilson_high, 6), "envelope": round(self.envelope, 6),
            "ok": self.within_envelope,
        }


def soundness_experiment(label: str, trial_fn, trials: int, envelope: float,
                         z: float = 3.0) -> SoundnessReport:
    """trial_fn(i) -> bool (True when the adversary wins); compares the Monte
    Carlo rate against the declared envelope."""
    wins = sum(1 for i in range(trials) if trial_fn(i))
    rate, low, high = wilson_interval(wins, trials, z)
    return SoundnessReport(label, trials, wins, envelope, rate, low, high)


# -- view flattening and TV estimation ------------------------------------------------


def flatten_view(transcript: Transcript) -> list:
    """Canonical scalar-coordinate decomposition of a view."""
    coords: list = []
    for entry in transcript.view_entries():
        kind, label = entry[0], entry[1]
        coords.append(f"{kind}:{label}")
        for item in entry[2:]:
            if isinstance(item, (tuple, list)):
                coords.extend(item)
            else:
                coords.append(item)
    return coords


def _pad(views: list[list]) -> list[list]:
    width = max((len(v) for v in views), default=0)
    return [v + [PAD] * (width - len(v)) for v in views]


def marginal_tv(sample_a: list[list], sample_b: list[list]) -> float:
    """Max over coordinates of the empirical TV between the two samples."""
    both = _pad(sample_a + sample_b)
    a, b = both[: len(sample_a)], both[len(sample_a):]
    na, nb = len(a), len(b)
    width = len(both[0]) if both else 0
    worst = 0.0
    for j in range(width):
        ca = Counter(v[j] for v in a)
        cb = Counter(v[j] for v in b)
        tv = sum(abs(ca[x] / na - cb[x] / nb) for x in set(ca) | set(cb)) / 2
        worst = max(worst, tv)
    return worst


def exact_tv(sample_a: list[list], sample_b: list[list]) -> float:
    ca = Counter(tuple(v) for v in sample_a)
    cb = Counter(tuple(v) for v in sample_b)
    na, nb = len(sample_a), len(sample_b)
    return sum(abs(ca[x] / na - cb[x] / nb) for x in set(ca) | set(cb)) / 2


@dataclass
class ZkTestReport:
    label: str
    samples: int
    noise_floor: float
    estimate: float
    exact_estimate: float
    exact_floor: float
    control_estimate: float | None = None

    @property
    def within_floor(self) -> bool:
        return self.estimate <= self.noise_floor + 0.01

    @property
    def control_separated(self) -> bool:
        if self.control_estimate is None:
            return True
        return self.control_estimate >= 5 * max(self.noise_floor, 1e-9)

    def row(self) -> dict:
        return {
            "label": self.label, "samples": self.samples,
            "noise_floor": round(self.noise_floor, 5),
            "estimate": round(self.estimate, 5),
            "exact_floor": round(self.exact_floor, 5),
            "exact_estimate": round(self.exact_estimate, 5),
            "control_estimate": None if self.control_estimate is None
            else round(self.control_estimate, 5),
            "ok": self.within_floor and self.control_separated,
        }


def zk_test(label: str, real_sampler, sim_sampler, samples: int,
            control_sampler=None) -> ZkTestReport:
    """Two-sample comparison of view distributions.

    real_sampler / sim_sampler: callables (index) -> Transcript.  The noise
    floor comes from a real-vs-real split (two fresh real batches); an optional
    control_sampler (a deliberately broken simulator) reports its separation.
    """
    real_a = [flatten_view(real_sampler(i)) for i in range(samples)]
    real_b = [flatten_view(real_sampler(samples + i)) for i in range(samples)]
    sim = [flatten_view(sim_sampler(i)) for i in range(samples)]
    floor = marginal_tv(real_a, real_b)
    est = marginal_tv(real_a, sim)
    xfloor = exact_tv(real_a, real_b)
    xest = exact_tv(real_a, sim)
    control = None
    if control_sampler is not None:
        broken = [flatten_view(control_sampler(i)) for i in range(samples)]
        control = marginal_tv(real_a, broken)
    return ZkTestReport(label, samples, floor, est, xest, xfloor, control)


# -- one-invocation protocol runners ----------------------------------------------
#
# Each runner executes one honest protocol run from a seed and returns
# (transcript, accepted).  These are the rows of the completeness experiment
# and the CLI's `run` subcommands.


def run_protocol(name: str, seed, field_spec: str | None = None):
    from . import commit as commit_mod
    from . import frontends as fe
    from . import instances as inst
    from . import spc
    from .mpoly import PrefixQuery
    from .rng import DomainRNG
    from .sumcheck import (HonestStrongProver, strong_zk_run, sumcheck_reduce,
                           weak_zk_sumcheck)

    rng = DomainRNG(seed, f"run-{name}")
    if name == "sumcheck":
        field = inst.parse_field(field_spec or "101")
        poly, sc, _ = inst.sumcheck_instance(field, 2, 2, 2, seed)
        t, claim = sumcheck_reduce(poly, sc, None, rng)
        ok = t.accepted and poly.eval(claim.point) == claim.value
        return t, ok
    if name == "weak-zk":
        field = inst.parse_field(field_spec or "101")
        poly, sc, _ = inst.sumcheck_instance(field, 2, 2, 2, seed)
        t, claim, _ = weak_zk_sumcheck(poly, sc, rng, compiled=True, ldt_reps=2)
        ok = t.accepted and poly.eval(claim.point) == claim.value
        return t, ok
    if name == "strong-zk":
        field = inst.parse_field(field_spec or "101")
        poly, sc, _ = inst.sumcheck_instance(field, 2, 2, 2, seed)
        params = inst.strong_params(field, 2, 2, 1)
        prover = HonestStrongProver(poly, sc, params, rng.child("prover"))
        t, claim, _ = strong_zk_run(sc, params, prover, rng.child("verifier"),
                                    compiled=True, ldt_reps=2)
        ok = t.accepted and poly.eval(claim.point) == claim.value
        return t, ok
    if name == "commit-open":
        field = inst.parse_field(field_spec or "101")
        from .mpoly import sample_uniform_poly
        Q = sample_uniform_poly(field, (2,), rng.child("Q"))
        params = inst.commit_params(field, 2, 1, m=1, d_q=2)
        com = commit_mod.commit_poly(Q, params, rng.child("commit"))
        alpha = (rng.child("alpha").field_element(field),)
        t, value = commit_mod.decommit(com, alpha, rng.child("open"),
                                       compiled=True, ldt_reps=2)
        return t, t.accepted and value == Q.eval(alpha)
    if name == "spce":
        field = inst.parse_field(field_spec or "101")
        circuit, cinp = inst.chain_spc(field, 2)
        y = spc.value(circuit, cinp)
        return spc.spce_run(circuit, y, cinp, rng)
    if name == "spcs":
        field = inst.parse_field(field_spec or "101")
        circuit, cinp = inst.chain_spc(field, 2)
        y = spc.value(circuit, cinp)
        return spc.spcs_run(circuit, y, {}, cinp, rng, compiled=True, ldt_reps=2)
    if name == "pzk-spce":
        field = inst.parse_field(field_spec or "101")
        circuit, cinp = inst.tiny_pzk_spc(field)
        y = spc.value(circuit, cinp)
        params = spc.pzk_params(circuit, k=1)
        t, ok, _ = spc.pzk_spce_run(circuit, y, cinp, params, rng,
                                    compiled=True, ldt_reps=1)
        return t, ok
    if name == "pzk-spcs":
        field = inst.parse_field(field_spec or "101")
        circuit, cinp = inst.tiny_pzk_spc(field)
        y = spc.value(circuit, cinp)
        params = spc.pzk_params(circuit, k=1)
        t, ok, _ = spc.pzk_spcs_run(circuit, y, {}, cinp, params, rng,
                                    compiled=True, ldt_reps=1)
        return t, ok
    if name == "tqbf":
        phi = inst.random_regular_qbf(seed)
        p = fe.tqbf_prime(phi.n, phi.c, 4)
        circuit, _, cinp = fe.tqbf_to_spce(phi, p)
        y = spc.value(circuit, cinp)
        t, ok = spc.spce_run(circuit, y, cinp, rng)
        truth = fe.qbf_eval(phi)
        return t, ok and (y == (1 if truth else 0))
    if name == "o3sat":
        field, H = inst.o3sat_field()
        o3 = inst.o3sat_toy("sat")
        witness = fe.o3sat_witness(o3, inst.o3sat_all_ones_witness(), field, H)
        x = [rng.child("x").field_element(field) for _ in range(12)]
        y = [rng.child("y").field_element(field) for _ in range(12)]
        circuit, target, _ = fe.o3sat_to_spcs(o3, field, H, x, y)
        return spc.spcs_run(circuit, target, {}, witness, rng.child("run"),
                            compiled=True, ldt_reps=1)
    if name == "circuit":
        field = inst.parse_field(field_spec or "101")
        lc = inst.layered_example()
        H = None
        from .field import enumerate_subset
        H = enumerate_subset(field, 2)
        wiring = fe.exact_wiring_ldes(lc, field, H, 1, 1)
        sub, inputs = fe.layered_to_spc(lc, field, wiring, H, 1, 1)
        x = [rng.child(f"x{i}").field_element(field) for i in range(lc.n)]
        closed, closed_inputs = fe.hardcode_input(sub, inputs, x)
        expected = fe.eval_layers(lc, field, x)[0][0]
        return spc.spce_run(closed, expected, closed_inputs, rng.child("run"))
    raise ValueError(f"unknown protocol {name!r}")


PROTOCOLS = ("sumcheck", "weak-zk", "strong-zk", "commit-open", "spce",
             "pzk-spce", "spcs", "pzk-spcs", "tqbf", "o3sat", "circuit")
