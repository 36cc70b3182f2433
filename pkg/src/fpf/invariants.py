"""Randomized invariant checking for aggregation operators.

``check_quintet`` samples the five required invariants (IDEM, COMM, LOC,
WLNK, MONO); any failure carries a concrete counterexample. The
idempotence collapse check then verifies the uniqueness result: an
operator that is idempotent, monotone, commutative, and identity-bounded
must equal min pointwise, so sampled deviations expose corrupt operators.

Idempotence is checked n-ary (``op([x] * k) == x``): product passes the
singleton form trivially, but repeated evidence must not change the
result.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, replace
from datetime import timedelta

from .graph import Graph
from .operators import GammaOperator
from .times import parse_ts, format_ts
from . import events as ev

TOLERANCE = 1e-12

_BASE_TIME = parse_ts("2026-01-01T00:00:00Z")

_FORMALITY_CEILINGS = {"F0": 0.70, "F1": 0.85, "F2": 0.95, "F3": 1.0}


@dataclass(frozen=True, slots=True)
class InvariantResult:
    passed: bool
    counterexample: str | None = None


@dataclass(frozen=True, slots=True)
class QuintetVerdict:
    operator: str
    idem: InvariantResult
    comm: InvariantResult
    loc: InvariantResult
    wlnk: InvariantResult
    mono: InvariantResult
    samples: int

    @property
    def all_passed(self) -> bool:
        return all(
            r.passed for r in (self.idem, self.comm, self.loc, self.wlnk, self.mono)
        )


@dataclass(frozen=True, slots=True)
class CollapseResult:
    operator: str
    status: str  # "pass" | "fail" | "skipped"
    detail: str
    counterexample: str | None = None


def _random_scores(rng: random.Random, lo: int = 2, hi: int = 8) -> list[float]:
    return [rng.random() for _ in range(rng.randint(lo, hi))]


def check_quintet(op: GammaOperator, sample_count: int, seed: int) -> QuintetVerdict:
    """Sample all five invariants; deterministic for a given seed.

    Graph-based locality trials build and doubly evaluate a small random
    graph each, so they run at 1/20 of ``sample_count`` (min 1).
    """
    rng = random.Random(seed)

    idem = _check_idem(op, rng, sample_count)
    comm = _check_comm(op, rng, sample_count)
    wlnk = _check_wlnk(op, rng, sample_count)
    mono = _check_mono(op, rng, sample_count)
    loc = _check_loc(op, rng, max(1, sample_count // 20))

    return QuintetVerdict(
        operator=op.name,
        idem=idem,
        comm=comm,
        loc=loc,
        wlnk=wlnk,
        mono=mono,
        samples=sample_count,
    )


def _check_idem(op: GammaOperator, rng: random.Random, samples: int) -> InvariantResult:
    for _ in range(samples):
        x = rng.random()
        k = rng.randint(1, 6)
        got = op.fn([x] * k)
        if abs(got - x) > TOLERANCE:
            return InvariantResult(False, f"op([{x!r}] * {k}) = {got!r}, expected {x!r}")
    return InvariantResult(True)


def _check_comm(op: GammaOperator, rng: random.Random, samples: int) -> InvariantResult:
    for _ in range(samples):
        scores = _random_scores(rng)
        shuffled = scores[:]
        rng.shuffle(shuffled)
        a, b = op.fn(scores), op.fn(shuffled)
        if abs(a - b) > TOLERANCE:
            return InvariantResult(
                False, f"op({scores!r}) = {a!r} but op({shuffled!r}) = {b!r}"
            )
    return InvariantResult(True)


def _check_wlnk(op: GammaOperator, rng: random.Random, samples: int) -> InvariantResult:
    for _ in range(samples):
        scores = _random_scores(rng, lo=1)
        got = op.fn(scores)
        if got > min(scores) + TOLERANCE:
            return InvariantResult(
                False, f"op({scores!r}) = {got!r} exceeds min = {min(scores)!r}"
            )
    return InvariantResult(True)


def _check_mono(op: GammaOperator, rng: random.Random, samples: int) -> InvariantResult:
    for _ in range(samples):
        scores = _random_scores(rng)
        index = rng.randrange(len(scores))
        raised = scores[:]
        raised[index] = rng.uniform(scores[index], 1.0)
        before, after = op.fn(scores), op.fn(raised)
        if after < before - TOLERANCE:
            return InvariantResult(
                False,
                f"raising index {index} of {scores!r} to {raised[index]!r} "
                f"dropped the result {before!r} -> {after!r}",
            )
    return InvariantResult(True)


# -- locality over random small graphs --------------------------------------


def _check_loc(op: GammaOperator, rng: random.Random, trials: int) -> InvariantResult:
    for _ in range(trials):
        graph, evidence_ids = _random_graph(rng)
        if not evidence_ids:
            continue
        target = rng.choice(evidence_ids)
        before = _reff_with_operator(graph, op)

        item = graph.evidence[target]
        ceiling = _FORMALITY_CEILINGS[item.formality.value]
        mutated = graph.clone()
        mutated.evidence = dict(mutated.evidence)
        mutated.evidence[target] = replace(item, raw_score=rng.uniform(0.0, ceiling))
        after = _reff_with_operator(mutated, op)

        closure = graph.affected_closure(target)
        for hid in graph.holons:
            if hid in closure:
                continue
            if before[hid] != after[hid]:
                return InvariantResult(
                    False,
                    f"holon {hid} (no dependency on {target}) changed "
                    f"{before[hid]!r} -> {after[hid]!r}",
                )
    return InvariantResult(True)


def _random_graph(rng: random.Random) -> tuple[Graph, list[str]]:
    """A small valid DAG with mixed evidence, built through the event path."""
    graph = Graph()
    n = rng.randint(3, 7)
    seq = 0
    evidence_ids: list[str] = []
    for i in range(n):
        seq += 1
        graph.apply(
            ev.Event(
                seq=seq,
                kind=ev.HOLON_CREATED,
                at=_BASE_TIME,
                payload={
                    "id": f"h{i}",
                    "title": f"claim {i}",
                    "layer": rng.choice(["L0", "L1", "L2"]),
                    "formality": rng.choice(["F0", "F1", "F2", "F3"]),
                    "scope": "*",
                    "proposer": "actor:gen",
                },
            )
        )
        for j in range(i):
            if rng.random() < 0.3:
                seq += 1
                graph.apply(
                    ev.Event(
                        seq=seq,
                        kind=ev.RELATION_ADDED,
                        at=_BASE_TIME,
                        payload={
                            "id": f"rel{seq}",
                            "dependent": f"h{i}",
                            "dependency": f"h{j}",
                            "congruence": rng.choice(["CL1", "CL2", "CL3"]),
                        },
                    )
                )
    for i in range(n):
        for _ in range(rng.randint(0, 3)):
            formality = rng.choice(["F0", "F1", "F2", "F3"])
            days = rng.randint(-30, 90)  # negative: already expired
            seq += 1
            eid = f"e{seq}"
            graph.apply(
                ev.Event(
                    seq=seq,
                    kind=ev.EVIDENCE_ATTACHED,
                    at=_BASE_TIME,
                    payload={
                        "id": eid,
                        "holon": f"h{i}",
                        "description": "generated",
                        "raw_score": rng.uniform(0.0, _FORMALITY_CEILINGS[formality]),
                        "formality": formality,
                        "scope": "*",
                        "congruence": rng.choice(["CL0", "CL1", "CL2", "CL3"]),
                        "valid_until": format_ts(_BASE_TIME + timedelta(days=days)),
                    },
                )
            )
            evidence_ids.append(eid)
    return graph, evidence_ids


def _reff_with_operator(graph: Graph, op: GammaOperator) -> dict[str, float]:
    """Assurance map with the candidate operator in place of min.

    The locality property only needs a pure, deterministic composition;
    ceilings still cap the aggregate.
    """
    cal = graph.calibration
    as_of = _BASE_TIME + timedelta(days=1)
    out: dict[str, float] = {}
    for hid in graph.topological_order():
        holon = graph.holons[hid]
        terms: list[float] = []
        for eid in graph.live_evidence_ids(hid):
            item = graph.evidence[eid]
            decayed = item.raw_score if as_of <= item.valid_until else cal.decay_floor
            adjusted = decayed - cal.congruence_penalty[item.congruence]
            terms.append(adjusted if adjusted > 0.0 else 0.0)
        for dep in graph.dependency_ids(hid):
            penalty = cal.congruence_penalty[graph.relation_for(hid, dep).congruence]
            contrib = out[dep] - penalty
            terms.append(contrib if contrib > 0.0 else 0.0)
        if not terms:
            out[hid] = 0.0
            continue
        value = op.fn(terms)
        value = min(value, cal.layer_ceiling[holon.layer], cal.formality_ceiling[holon.formality])
        out[hid] = max(0.0, value)
    return out


# -- idempotent collapse (uniqueness of min) ---------------------------------


def idempotence_collapse_check(
    op: GammaOperator, sample_count: int, seed: int
) -> CollapseResult:
    """Verify that an idempotent operator collapses to min on sampled pairs.

    Skipped when the operator fails the idempotence precondition (the
    uniqueness result simply does not apply). Violations of monotonicity,
    commutativity, or the identity boundary, and any sampled pair where
    the operator deviates from min, are failures with a counterexample.
    """
    rng = random.Random(seed)

    idem = _check_idem(op, rng, sample_count)
    if not idem.passed:
        return CollapseResult(
            operator=op.name,
            status="skipped",
            detail="fails IDEM precondition",
            counterexample=idem.counterexample,
        )

    for _ in range(sample_count):
        x, y = rng.random(), rng.random()
        a, b = op.fn([x, y]), op.fn([y, x])
        if abs(a - b) > TOLERANCE:
            return CollapseResult(
                op.name, "fail", "commutativity violated", f"op([{x!r}, {y!r}]) = {a!r} != {b!r}"
            )
        bound = op.fn([x, 1.0])
        if abs(bound - x) > TOLERANCE:
            return CollapseResult(
                op.name,
                "fail",
                "identity boundary violated",
                f"op([{x!r}, 1.0]) = {bound!r}, expected {x!r}",
            )
        hi = rng.uniform(x, 1.0)
        if op.fn([hi, y]) < a - TOLERANCE:
            return CollapseResult(
                op.name,
                "fail",
                "monotonicity violated",
                f"op([{hi!r}, {y!r}]) < op([{x!r}, {y!r}])",
            )

    for _ in range(sample_count):
        x, y = rng.random(), rng.random()
        got = op.fn([x, y])
        expected = x if x < y else y
        if abs(got - expected) > TOLERANCE:
            return CollapseResult(
                op.name,
                "fail",
                "deviates from min",
                f"op([{x!r}, {y!r}]) = {got!r}, min = {expected!r}",
            )

    return CollapseResult(op.name, "pass", f"equals min on {sample_count} sampled pairs")
