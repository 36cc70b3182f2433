"""In-memory knowledge graph: the single projection of the event log.

``Graph.apply`` is the only mutation path. It validates each event against
the current state (structural invariants, ceilings, lifecycle rules) and
either mutates or raises without side effects, so any replayed prefix of a
log yields a valid state. All queries are pure.
"""

from __future__ import annotations

import hashlib
import heapq
import json
import math
from dataclasses import replace
from datetime import datetime

from . import events as ev
from .config import Calibration, DEFAULT_CALIBRATION
from .errors import (
    CeilingError,
    CycleError,
    IntegrityError,
    MandateViolationError,
    NotFoundError,
    StateError,
    ValidationError,
)
from .errors import BlockedError
from .model import (
    Characteristic,
    Congruence,
    DecisionRecord,
    Evidence,
    Formality,
    Holon,
    HolonStatus,
    Layer,
    PromotionRecord,
    Relation,
    Waiver,
)
from .scope import parse_scope
from .times import ensure_utc, format_ts, parse_ts


def validate_score(raw_score: float, formality: Formality, calibration: Calibration) -> float:
    """Boundary check for reliability scores; rejects NaN/Inf/out-of-range."""
    try:
        score = float(raw_score)
    except (TypeError, ValueError):
        raise ValidationError(f"raw_score must be a real number, got {raw_score!r}") from None
    if not math.isfinite(score):
        raise ValidationError(f"raw_score must be finite, got {score!r}")
    if score < 0.0 or score > 1.0:
        raise ValidationError(f"raw_score must be within [0, 1], got {score!r}")
    ceiling = calibration.formality_ceiling[formality]
    if score > ceiling:
        raise CeilingError(
            f"raw_score {score} exceeds {formality.value} ceiling {ceiling}"
        )
    return score


class Graph:
    """Holons, evidence, relations, and lifecycle records, event-sourced."""

    def __init__(self, calibration: Calibration = DEFAULT_CALIBRATION):
        self.calibration = calibration
        self.holons: dict[str, Holon] = {}
        self.evidence: dict[str, Evidence] = {}
        self.evidence_by_holon: dict[str, tuple[str, ...]] = {}
        self.relations: dict[str, Relation] = {}
        self.deps_of: dict[str, tuple[str, ...]] = {}
        self.dependents_of: dict[str, tuple[str, ...]] = {}
        self.edge_by_pair: dict[tuple[str, str], str] = {}
        self.waivers: dict[str, Waiver] = {}
        self.waivers_by_evidence: dict[str, tuple[str, ...]] = {}
        self.superseded_by: dict[str, str] = {}
        self.promotions: tuple[PromotionRecord, ...] = ()
        self.drrs: dict[str, DecisionRecord] = {}
        self.characteristics: dict[tuple[str, str], Characteristic] = {}

    # -- mutation ------------------------------------------------------

    def apply(self, event: ev.Event) -> None:
        handler = _HANDLERS.get(event.kind)
        if handler is None:
            raise IntegrityError(f"unknown event kind {event.kind!r} at seq {event.seq}")
        handler(self, event)

    def clone(self) -> "Graph":
        """Cheap structural copy; all stored values are immutable."""
        other = Graph(self.calibration)
        other.holons = dict(self.holons)
        other.evidence = dict(self.evidence)
        other.evidence_by_holon = dict(self.evidence_by_holon)
        other.relations = dict(self.relations)
        other.deps_of = dict(self.deps_of)
        other.dependents_of = dict(self.dependents_of)
        other.edge_by_pair = dict(self.edge_by_pair)
        other.waivers = dict(self.waivers)
        other.waivers_by_evidence = dict(self.waivers_by_evidence)
        other.superseded_by = dict(self.superseded_by)
        other.promotions = self.promotions
        other.drrs = dict(self.drrs)
        other.characteristics = dict(self.characteristics)
        return other

    # -- queries -------------------------------------------------------

    def require_holon(self, holon_id: str) -> Holon:
        holon = self.holons.get(holon_id)
        if holon is None:
            raise NotFoundError(f"unknown holon {holon_id!r}")
        return holon

    def require_evidence(self, evidence_id: str) -> Evidence:
        item = self.evidence.get(evidence_id)
        if item is None:
            raise NotFoundError(f"unknown evidence {evidence_id!r}")
        return item

    def effective_status(self, holon_id: str) -> HolonStatus:
        holon = self.require_holon(holon_id)
        if holon.status is HolonStatus.DEPRECATED:
            return HolonStatus.DEPRECATED
        if not self.live_evidence_ids(holon_id) and not self.deps_of.get(holon_id):
            return HolonStatus.UNSUBSTANTIATED
        return HolonStatus.ACTIVE

    def live_evidence_ids(self, holon_id: str) -> list[str]:
        """Non-superseded evidence of a holon, in id order."""
        owned = self.evidence_by_holon.get(holon_id, ())
        return sorted(eid for eid in owned if eid not in self.superseded_by)

    def dependency_ids(self, holon_id: str) -> list[str]:
        return sorted(self.deps_of.get(holon_id, ()))

    def relation_for(self, dependent: str, dependency: str) -> Relation:
        rel_id = self.edge_by_pair[(dependent, dependency)]
        return self.relations[rel_id]

    def waivers_for(self, evidence_id: str) -> list[Waiver]:
        return [self.waivers[wid] for wid in self.waivers_by_evidence.get(evidence_id, ())]

    def effective_until(self, evidence_id: str) -> datetime:
        """Freshness boundary: validity window extended by any waiver."""
        item = self.require_evidence(evidence_id)
        boundary = item.valid_until
        for waiver in self.waivers_for(evidence_id):
            if waiver.waived_until > boundary:
                boundary = waiver.waived_until
        return boundary

    def is_fresh(self, evidence_id: str, as_of: datetime) -> bool:
        return ensure_utc(as_of) <= self.effective_until(evidence_id)

    def affected_closure(self, evidence_id: str) -> set[str]:
        """Owning holon plus all transitive dependents (reverse reachability)."""
        owner = self.require_evidence(evidence_id).holon
        seen = {owner}
        stack = [owner]
        while stack:
            node = stack.pop()
            for dependent in self.dependents_of.get(node, ()):
                if dependent not in seen:
                    seen.add(dependent)
                    stack.append(dependent)
        return seen

    def topological_order(self) -> list[str]:
        """All holons, dependencies before dependents, deterministic.

        Kahn's algorithm over a min-heap: ties always release the
        lexicographically smallest id first.
        """
        indegree = {hid: len(self.deps_of.get(hid, ())) for hid in self.holons}
        ready = [hid for hid, deg in indegree.items() if deg == 0]
        heapq.heapify(ready)
        order: list[str] = []
        while ready:
            node = heapq.heappop(ready)
            order.append(node)
            for dependent in self.dependents_of.get(node, ()):
                indegree[dependent] -= 1
                if indegree[dependent] == 0:
                    heapq.heappush(ready, dependent)
        if len(order) != len(self.holons):
            raise IntegrityError("dependency graph contains a cycle")
        return order

    def evidence_history(self, evidence_id: str) -> list[Evidence]:
        """The supersession chain starting at ``evidence_id``, oldest first."""
        chain = [self.require_evidence(evidence_id)]
        while chain[-1].id in self.superseded_by:
            chain.append(self.evidence[self.superseded_by[chain[-1].id]])
        return chain

    def state_hash(self) -> str:
        """Deterministic digest of the full projected state."""
        body = json.dumps(self._state_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(body.encode("utf-8")).hexdigest()

    def _state_dict(self) -> dict:
        return {
            "holons": {
                hid: {
                    "title": h.title,
                    "layer": h.layer.value,
                    "formality": h.formality.value,
                    "scope": h.scope.serialize(),
                    "status": h.status.value,
                    "proposer": h.proposer,
                    "created_at": format_ts(h.created_at),
                }
                for hid, h in sorted(self.holons.items())
            },
            "evidence": {
                eid: {
                    "holon": e.holon,
                    "description": e.description,
                    "raw_score": e.raw_score,
                    "formality": e.formality.value,
                    "scope": e.scope.serialize(),
                    "congruence": e.congruence.value,
                    "valid_until": format_ts(e.valid_until),
                    "created_at": format_ts(e.created_at),
                }
                for eid, e in sorted(self.evidence.items())
            },
            "relations": {
                rid: {
                    "dependent": r.dependent,
                    "dependency": r.dependency,
                    "congruence": r.congruence.value,
                    "created_at": format_ts(r.created_at),
                }
                for rid, r in sorted(self.relations.items())
            },
            "waivers": {
                wid: {
                    "evidence": w.evidence,
                    "rationale": w.rationale,
                    "waived_until": format_ts(w.waived_until),
                    "approver": w.approver,
                    "created_at": format_ts(w.created_at),
                }
                for wid, w in sorted(self.waivers.items())
            },
            "superseded": dict(sorted(self.superseded_by.items())),
            "promotions": [
                {
                    "holon": p.holon,
                    "from": p.from_layer.value,
                    "to": p.to_layer.value,
                    "actor": p.actor,
                    "note": p.note,
                    "evidence_refs": list(p.evidence_refs),
                    "at": format_ts(p.at),
                }
                for p in self.promotions
            ],
            "drrs": {
                did: {
                    "holon": d.holon,
                    "rationale": d.rationale,
                    "proposer": d.proposer,
                    "ratifier": d.ratifier,
                    "evidence_refs": list(d.evidence_refs),
                    "r_eff": d.r_eff_at_finalization,
                    "finalized_at": format_ts(d.finalized_at),
                }
                for did, d in sorted(self.drrs.items())
            },
            "characteristics": {
                f"{hid}:{name}": {"value": c.value, "units": c.units}
                for (hid, name), c in sorted(self.characteristics.items())
            },
        }

    # -- cycle detection -----------------------------------------------

    def _cycle_path(self, dependent: str, dependency: str) -> list[str] | None:
        """Path dependent -> dependency -> ... -> dependent if the new edge closes a loop."""
        if dependent == dependency:
            return [dependent, dependent]
        parents: dict[str, str] = {}
        stack = [dependency]
        seen = {dependency}
        while stack:
            node = stack.pop()
            for nxt in sorted(self.deps_of.get(node, ())):
                if nxt == dependent:
                    path = [node]
                    while path[-1] != dependency:
                        path.append(parents[path[-1]])
                    path.reverse()
                    return [dependent, *path, dependent]
                if nxt not in seen:
                    seen.add(nxt)
                    parents[nxt] = node
                    stack.append(nxt)
        return None


# -- event handlers ------------------------------------------------------


def _require_str(payload: dict, key: str, seq: int) -> str:
    value = payload.get(key)
    if not isinstance(value, str):
        raise ValidationError(f"event {seq}: field {key!r} must be text")
    return value


def _apply_holon_created(graph: Graph, event: ev.Event) -> None:
    p = event.payload
    hid = _require_str(p, "id", event.seq)
    title = _require_str(p, "title", event.seq)
    if hid in graph.holons:
        raise IntegrityError(f"duplicate holon id {hid!r}")
    if not title.strip():
        raise ValidationError("holon title must be non-empty")
    graph.holons[hid] = Holon(
        id=hid,
        title=title,
        layer=Layer(p["layer"]),
        formality=Formality(p["formality"]),
        scope=parse_scope(_require_str(p, "scope", event.seq)),
        status=HolonStatus.ACTIVE,
        proposer=_require_str(p, "proposer", event.seq),
        created_at=event.at,
    )
    graph.evidence_by_holon.setdefault(hid, ())


def _apply_evidence_attached(graph: Graph, event: ev.Event) -> None:
    p = event.payload
    eid = _require_str(p, "id", event.seq)
    if eid in graph.evidence:
        raise IntegrityError(f"duplicate evidence id {eid!r}")
    holon = graph.require_holon(_require_str(p, "holon", event.seq))
    if holon.status is not HolonStatus.ACTIVE:
        raise StateError(f"holon {holon.id} is {holon.status.value}; cannot attach evidence")
    formality = Formality(p["formality"])
    score = validate_score(p["raw_score"], formality, graph.calibration)
    record = Evidence(
        id=eid,
        holon=holon.id,
        description=_require_str(p, "description", event.seq),
        raw_score=score,
        formality=formality,
        scope=parse_scope(_require_str(p, "scope", event.seq)),
        congruence=Congruence(p["congruence"]),
        valid_until=parse_ts(_require_str(p, "valid_until", event.seq)),
        created_at=event.at,
    )
    graph.evidence[eid] = record
    graph.evidence_by_holon[holon.id] = graph.evidence_by_holon.get(holon.id, ()) + (eid,)


def _apply_relation_added(graph: Graph, event: ev.Event) -> None:
    p = event.payload
    rid = _require_str(p, "id", event.seq)
    dependent = _require_str(p, "dependent", event.seq)
    dependency = _require_str(p, "dependency", event.seq)
    if rid in graph.relations:
        raise IntegrityError(f"duplicate relation id {rid!r}")
    graph.require_holon(dependent)
    graph.require_holon(dependency)
    if dependent == dependency:
        raise ValidationError(f"self-edge on holon {dependent!r}")
    if (dependent, dependency) in graph.edge_by_pair:
        raise ValidationError(f"relation {dependent} -> {dependency} already exists")
    cycle = graph._cycle_path(dependent, dependency)
    if cycle is not None:
        raise CycleError(cycle)
    graph.relations[rid] = Relation(
        id=rid,
        dependent=dependent,
        dependency=dependency,
        congruence=Congruence(p["congruence"]),
        created_at=event.at,
    )
    graph.edge_by_pair[(dependent, dependency)] = rid
    graph.deps_of[dependent] = graph.deps_of.get(dependent, ()) + (dependency,)
    graph.dependents_of[dependency] = graph.dependents_of.get(dependency, ()) + (dependent,)


def _apply_waiver_issued(graph: Graph, event: ev.Event) -> None:
    p = event.payload
    wid = _require_str(p, "id", event.seq)
    if wid in graph.waivers:
        raise IntegrityError(f"duplicate waiver id {wid!r}")
    evidence = graph.require_evidence(_require_str(p, "evidence", event.seq))
    rationale = _require_str(p, "rationale", event.seq)
    if not rationale.strip():
        raise ValidationError("waiver rationale must be non-empty")
    waived_until = parse_ts(_require_str(p, "waived_until", event.seq))
    if waived_until <= event.at:
        raise ValidationError(
            f"waived_until {format_ts(waived_until)} is not after issuing time {format_ts(event.at)}"
        )
    graph.waivers[wid] = Waiver(
        id=wid,
        evidence=evidence.id,
        rationale=rationale,
        waived_until=waived_until,
        approver=_require_str(p, "approver", event.seq),
        created_at=event.at,
    )
    graph.waivers_by_evidence[evidence.id] = graph.waivers_by_evidence.get(evidence.id, ()) + (
        wid,
    )


def _apply_evidence_superseded(graph: Graph, event: ev.Event) -> None:
    p = event.payload
    old_id = _require_str(p, "old", event.seq)
    old = graph.require_evidence(old_id)
    if old_id in graph.superseded_by:
        raise StateError(f"evidence {old_id} is already superseded")
    new_id = _require_str(p, "id", event.seq)
    if new_id in graph.evidence:
        raise IntegrityError(f"duplicate evidence id {new_id!r}")
    formality = Formality(p["formality"])
    score = validate_score(p["raw_score"], formality, graph.calibration)
    record = Evidence(
        id=new_id,
        holon=old.holon,
        description=_require_str(p, "description", event.seq),
        raw_score=score,
        formality=formality,
        scope=parse_scope(_require_str(p, "scope", event.seq)),
        congruence=Congruence(p["congruence"]),
        valid_until=parse_ts(_require_str(p, "valid_until", event.seq)),
        created_at=event.at,
    )
    graph.evidence[new_id] = record
    graph.evidence_by_holon[old.holon] = graph.evidence_by_holon.get(old.holon, ()) + (new_id,)
    graph.superseded_by[old_id] = new_id


def _apply_promotion(graph: Graph, event: ev.Event) -> None:
    p = event.payload
    holon = graph.require_holon(_require_str(p, "holon", event.seq))
    if holon.status is not HolonStatus.ACTIVE:
        raise StateError(f"holon {holon.id} is {holon.status.value}; cannot promote")
    from_layer = Layer(p["from_layer"])
    to_layer = Layer(p["to_layer"])
    if holon.layer is not from_layer:
        raise StateError(
            f"holon {holon.id} is at {holon.layer.value}, promotion starts from {from_layer.value}"
        )
    if to_layer.rank != from_layer.rank + 1:
        raise StateError(f"promotion must climb one layer, got {from_layer.value} -> {to_layer.value}")
    note = _require_str(p, "note", event.seq)
    refs = tuple(p.get("evidence_refs", ()))
    if to_layer is Layer.L1 and not note.strip():
        raise ValidationError("deduction promotion requires a non-empty note")
    if to_layer is Layer.L2:
        _check_induction_refs(graph, holon.id, refs, event.at)
    graph.holons[holon.id] = replace(holon, layer=to_layer)
    graph.promotions = graph.promotions + (
        PromotionRecord(
            holon=holon.id,
            from_layer=from_layer,
            to_layer=to_layer,
            actor=_require_str(p, "actor", event.seq),
            note=note,
            evidence_refs=refs,
            at=event.at,
        ),
    )


def _check_induction_refs(
    graph: Graph, holon_id: str, refs: tuple[str, ...], at: datetime
) -> None:
    if not refs:
        raise BlockedError(
            f"holon {holon_id} blocked: empirical validation requires at least one F2+ evidence reference"
        )
    expired: list[str] = []
    unqualified: list[str] = []
    for ref in refs:
        item = graph.require_evidence(ref)
        if item.holon != holon_id:
            raise ValidationError(f"evidence {ref} is not attached to holon {holon_id}")
        if ref in graph.superseded_by:
            raise ValidationError(f"evidence {ref} is superseded; reference its successor")
        if not graph.is_fresh(ref, at):
            expired.append(ref)
        elif item.formality.rank < Formality.F2.rank:
            unqualified.append(ref)
    if expired:
        raise ValidationError("expired evidence referenced: " + ", ".join(sorted(expired)))
    if unqualified:
        raise BlockedError(
            f"holon {holon_id} blocked: only sub-empirical evidence referenced "
            f"({', '.join(sorted(unqualified))}); needs F2+ to reach L2"
        )


def _apply_drr_finalized(graph: Graph, event: ev.Event) -> None:
    p = event.payload
    did = _require_str(p, "id", event.seq)
    if did in graph.drrs:
        raise IntegrityError(f"duplicate decision record id {did!r}")
    holon = graph.require_holon(_require_str(p, "holon", event.seq))
    if holon.status is not HolonStatus.ACTIVE:
        raise StateError(f"holon {holon.id} is {holon.status.value}; cannot finalize")
    if holon.layer is Layer.L0:
        raise StateError(f"holon {holon.id} is at L0; finalize requires L1 or L2")
    rationale = _require_str(p, "rationale", event.seq)
    if not rationale.strip():
        raise ValidationError("decision rationale must be non-empty")
    ratifier = _require_str(p, "ratifier", event.seq)
    proposer = _require_str(p, "proposer", event.seq)
    if ratifier == proposer:
        raise MandateViolationError(
            f"ratifier {ratifier!r} must be external to proposer {proposer!r}"
        )
    refs = tuple(p.get("evidence_refs", ()))
    for ref in refs:
        item = graph.require_evidence(ref)
        if item.holon != holon.id:
            raise ValidationError(f"evidence {ref} is not attached to holon {holon.id}")
    graph.drrs[did] = DecisionRecord(
        id=did,
        holon=holon.id,
        rationale=rationale,
        proposer=proposer,
        ratifier=ratifier,
        evidence_refs=refs,
        r_eff_at_finalization=float(p["r_eff"]),
        finalized_at=event.at,
    )


def _apply_deprecated(graph: Graph, event: ev.Event) -> None:
    p = event.payload
    holon = graph.require_holon(_require_str(p, "holon", event.seq))
    if holon.status is HolonStatus.DEPRECATED:
        raise StateError(f"holon {holon.id} is already deprecated")
    graph.holons[holon.id] = replace(holon, status=HolonStatus.DEPRECATED)


def _apply_characteristic_set(graph: Graph, event: ev.Event) -> None:
    p = event.payload
    holon = graph.require_holon(_require_str(p, "holon", event.seq))
    name = _require_str(p, "name", event.seq)
    if not name.strip():
        raise ValidationError("characteristic name must be non-empty")
    value = float(p["value"])
    if not math.isfinite(value):
        raise ValidationError(f"characteristic value must be finite, got {value!r}")
    graph.characteristics[(holon.id, name)] = Characteristic(
        holon=holon.id, name=name, value=value, units=str(p.get("units", ""))
    )


_HANDLERS = {
    ev.HOLON_CREATED: _apply_holon_created,
    ev.EVIDENCE_ATTACHED: _apply_evidence_attached,
    ev.RELATION_ADDED: _apply_relation_added,
    ev.WAIVER_ISSUED: _apply_waiver_issued,
    ev.EVIDENCE_SUPERSEDED: _apply_evidence_superseded,
    ev.PROMOTION: _apply_promotion,
    ev.DRR_FINALIZED: _apply_drr_finalized,
    ev.DEPRECATED: _apply_deprecated,
    ev.CHARACTERISTIC_SET: _apply_characteristic_set,
}
