from __future__ import annotations

from datetime import timedelta

import pytest

from fpf.engine import Engine
from fpf.errors import BlockedError, MandateViolationError, StateError, ValidationError
from fpf.model import Congruence, Formality, Layer
from fpf.times import parse_ts

from conftest import AS_OF, T0

FAR = parse_ts("2026-06-01T00:00:00Z")


def _proposal(engine: Engine) -> str:
    return engine.propose(
        "Redis might be better than Memcached because it supports persistence",
        "cache/redis",
        "agent:llm-1",
        T0,
    )


def test_propose_starts_at_l0_f0(engine: Engine):
    hid = _proposal(engine)
    holon = engine.graph.holons[hid]
    assert holon.layer is Layer.L0
    assert holon.formality is Formality.F0
    assert holon.proposer == "agent:llm-1"


def test_propose_with_declared_formality_keeps_l0(engine: Engine):
    hid = engine.propose("typed claim", "*", "actor:a", T0, formality=Formality.F2)
    holon = engine.graph.holons[hid]
    assert holon.layer is Layer.L0
    assert holon.formality is Formality.F2
    # Layer ceiling still dominates: min(0.35, 0.95) = 0.35.
    engine.attach_evidence(hid, "load test", 0.9, Formality.F2, "*", Congruence.CL3, FAR, T0)
    assert engine.assure(hid, T0).r_eff == 0.35


def test_verify_deduction_promotes_to_l1(engine: Engine):
    hid = _proposal(engine)
    engine.verify_deduction(hid, "SLA requires crash recovery; Redis AOF provides it", "actor:bob", T0)
    assert engine.graph.holons[hid].layer is Layer.L1
    record = engine.graph.promotions[-1]
    assert (record.from_layer, record.to_layer) == (Layer.L0, Layer.L1)
    assert record.note


def test_verify_requires_l0(engine: Engine):
    hid = _proposal(engine)
    engine.verify_deduction(hid, "consistent", "actor:bob", T0)
    with pytest.raises(StateError):
        engine.verify_deduction(hid, "again", "actor:bob", T0)


def test_verify_requires_note(engine: Engine):
    hid = _proposal(engine)
    with pytest.raises(ValidationError):
        engine.verify_deduction(hid, "  ", "actor:bob", T0)


def test_promotion_raises_layer_ceiling(engine: Engine):
    hid = _proposal(engine)
    engine.attach_evidence(hid, "informal", 0.7, Formality.F0, "*", Congruence.CL3, FAR, T0)
    assert engine.assure(hid, T0).r_eff == 0.35
    engine.verify_deduction(hid, "logically consistent", "actor:bob", T0)
    assert engine.assure(hid, T0).r_eff == 0.70  # now the F0 ceiling binds


def test_validate_induction_with_load_test(engine: Engine):
    hid = _proposal(engine)
    engine.verify_deduction(hid, "consistent", "actor:bob", T0)
    eid = engine.attach_evidence(
        hid, "Load test: 12k RPS at p95=8ms", 0.95, Formality.F2, "*", Congruence.CL3, FAR, T0
    )
    engine.validate_induction(hid, [eid], "actor:bob", T0)
    assert engine.graph.holons[hid].layer is Layer.L2
    assert engine.graph.promotions[-1].evidence_refs == (eid,)


def test_validate_blocked_on_informal_evidence_only(engine: Engine):
    hid = _proposal(engine)
    engine.verify_deduction(hid, "consistent", "actor:bob", T0)
    e1 = engine.attach_evidence(
        hid, "Copilot recommended", 0.5, Formality.F0, "*", Congruence.CL3, FAR, T0
    )
    e2 = engine.attach_evidence(
        hid, "3 Stack Overflow mentions", 0.5, Formality.F0, "*", Congruence.CL3, FAR, T0
    )
    with pytest.raises(BlockedError):
        engine.validate_induction(hid, [e1, e2], "actor:bob", T0)
    assert engine.graph.holons[hid].layer is Layer.L1


def test_validate_blocked_without_refs(engine: Engine):
    hid = _proposal(engine)
    engine.verify_deduction(hid, "consistent", "actor:bob", T0)
    with pytest.raises(BlockedError):
        engine.validate_induction(hid, [], "actor:bob", T0)


def test_validate_rejects_expired_refs_naming_them(engine: Engine):
    hid = _proposal(engine)
    engine.verify_deduction(hid, "consistent", "actor:bob", T0)
    eid = engine.attach_evidence(
        hid, "old load test", 0.95, Formality.F2, "*", Congruence.CL3,
        T0 + timedelta(days=10), T0,
    )
    with pytest.raises(ValidationError, match=eid):
        engine.validate_induction(hid, [eid], "actor:bob", AS_OF)


def test_validate_accepts_waived_refs(engine: Engine):
    hid = _proposal(engine)
    engine.verify_deduction(hid, "consistent", "actor:bob", T0)
    eid = engine.attach_evidence(
        hid, "old load test", 0.95, Formality.F2, "*", Congruence.CL3,
        T0 + timedelta(days=10), T0,
    )
    engine.waive(eid, "rerun scheduled", AS_OF + timedelta(days=30), "actor:bob", AS_OF)
    engine.validate_induction(hid, [eid], "actor:bob", AS_OF)
    assert engine.graph.holons[hid].layer is Layer.L2


def test_validate_rejects_foreign_evidence(engine: Engine):
    hid = _proposal(engine)
    engine.verify_deduction(hid, "consistent", "actor:bob", T0)
    other = engine.create_holon("other", Layer.L2, Formality.F2, "*", "actor:a", T0)
    foreign = engine.attach_evidence(
        other, "someone else's test", 0.9, Formality.F2, "*", Congruence.CL3, FAR, T0
    )
    with pytest.raises(ValidationError, match="not attached"):
        engine.validate_induction(hid, [foreign], "actor:bob", T0)


def test_validate_rejects_superseded_refs(engine: Engine):
    hid = _proposal(engine)
    engine.verify_deduction(hid, "consistent", "actor:bob", T0)
    eid = engine.attach_evidence(hid, "t", 0.9, Formality.F2, "*", Congruence.CL3, FAR, T0)
    replacement = engine.revalidate(eid, FAR, T0)
    with pytest.raises(ValidationError, match="superseded"):
        engine.validate_induction(hid, [eid], "actor:bob", T0)
    engine.validate_induction(hid, [replacement], "actor:bob", T0)
    assert engine.graph.holons[hid].layer is Layer.L2


def test_validate_requires_l1(engine: Engine):
    hid = _proposal(engine)
    eid = engine.attach_evidence(hid, "test", 0.9, Formality.F2, "*", Congruence.CL3, FAR, T0)
    with pytest.raises(StateError):
        engine.validate_induction(hid, [eid], "actor:bob", T0)


def test_ladder_history_is_monotone_adjacent(engine: Engine):
    hid = _proposal(engine)
    engine.verify_deduction(hid, "consistent", "actor:bob", T0)
    eid = engine.attach_evidence(hid, "t", 0.9, Formality.F2, "*", Congruence.CL3, FAR, T0)
    engine.validate_induction(hid, [eid], "actor:bob", T0)
    steps = [(p.from_layer.rank, p.to_layer.rank) for p in engine.graph.promotions if p.holon == hid]
    assert steps == [(0, 1), (1, 2)]


# -- DRR finalization -------------------------------------------------------------


def _ready_holon(engine: Engine) -> str:
    hid = _proposal(engine)
    engine.verify_deduction(hid, "consistent", "actor:bob", T0)
    eid = engine.attach_evidence(
        hid, "Load test: 12k RPS", 0.95, Formality.F2, "*", Congruence.CL3, FAR, T0
    )
    engine.validate_induction(hid, [eid], "actor:bob", T0)
    return hid


def test_finalize_external_ratifier_accepted(engine: Engine):
    hid = _ready_holon(engine)
    record = engine.finalize_drr(hid, "persistence requirement settled it", "actor:alice", T0)
    assert record.proposer == "agent:llm-1"
    assert record.ratifier == "actor:alice"
    assert record.r_eff_at_finalization == engine.assure(hid, T0).r_eff
    assert engine.graph.holons[hid].status.value == "active"  # stays live for decay


def test_finalize_mandate_violation(engine: Engine):
    hid = _ready_holon(engine)
    with pytest.raises(MandateViolationError):
        engine.finalize_drr(hid, "self-approval", "agent:llm-1", T0)
    assert not engine.graph.drrs


def test_finalize_rejects_l0(engine: Engine):
    hid = _proposal(engine)
    with pytest.raises(StateError):
        engine.finalize_drr(hid, "too early", "actor:alice", T0)


def test_finalize_requires_rationale(engine: Engine):
    hid = _ready_holon(engine)
    with pytest.raises(ValidationError):
        engine.finalize_drr(hid, "", "actor:alice", T0)


def test_finalize_at_l1_allowed(engine: Engine):
    hid = _proposal(engine)
    engine.verify_deduction(hid, "consistent", "actor:bob", T0)
    record = engine.finalize_drr(hid, "ship it provisionally", "actor:alice", T0)
    assert engine.graph.drrs[record.id].holon == hid


def test_mandate_holds_for_any_actor_pair(engine: Engine):
    import random

    rng = random.Random(77)
    actors = [f"actor:{i}" for i in range(5)] + [f"agent:{i}" for i in range(5)]
    for i in range(60):
        proposer = rng.choice(actors)
        hid = engine.create_holon(f"claim {i}", Layer.L1, Formality.F1, "*", proposer, T0)
        ratifier = rng.choice(actors)
        if ratifier == proposer:
            with pytest.raises(MandateViolationError):
                engine.finalize_drr(hid, "r", ratifier, T0)
        else:
            engine.finalize_drr(hid, "r", ratifier, T0)
    assert all(d.ratifier != d.proposer for d in engine.graph.drrs.values())
