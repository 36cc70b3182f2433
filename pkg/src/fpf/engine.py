"""Single-writer command surface over the graph and event log.

Every mutation validates against a clone of the current state, then
appends the event batch durably and swaps the clone in, so a failed
command leaves no trace. Reads are pure against the current snapshot.
Time is always injected via ``at``/``as_of``; nothing here reads a clock.
"""

from __future__ import annotations

from datetime import datetime, timedelta
from typing import Sequence

from . import events as ev
from .assurance import compute_reff
from .config import Calibration, DEFAULT_CALIBRATION
from .decay import scan as decay_scan
from .errors import FpfError, NotFoundError, StateError, ValidationError
from .graph import Graph
from .model import (
    AlertEvent,
    Congruence,
    DecisionRecord,
    Formality,
    HolonStatus,
    Layer,
    TrustReport,
)
from .scope import Scope, parse_scope
from .store import Store
from .times import ensure_utc, format_ts


class Engine:
    """Facade binding a knowledge graph to an (optional) durable log."""

    def __init__(self, store: Store | None = None, calibration: Calibration | None = None):
        self.store = store
        if store is not None:
            self.calibration = store.calibration
            self.graph = store.replay()
            self._seq = store.last_seq
        else:
            self.calibration = calibration or DEFAULT_CALIBRATION
            self.graph = Graph(self.calibration)
            self._seq = 0

    @classmethod
    def open(cls, path, calibration: Calibration | None = None) -> "Engine":
        return cls(Store(path, calibration or DEFAULT_CALIBRATION))

    # -- transactional core ----------------------------------------------

    def apply_batch(self, pending: Sequence[tuple[str, datetime, dict]]) -> tuple[int, int]:
        """Validate and append a batch atomically; returns the seq range.

        On any validation failure the error names the offending event and
        no state changes (all-or-nothing).
        """
        if not pending:
            raise ValidationError("empty event batch")
        batch: list[ev.Event] = []
        shadow = self.graph.clone()
        for i, (kind, at, payload) in enumerate(pending):
            event = ev.Event(seq=self._seq + i + 1, kind=kind, at=ensure_utc(at), payload=payload)
            try:
                shadow.apply(event)
            except FpfError as exc:
                exc.args = (f"batch event {i + 1}/{len(pending)} ({kind}) rejected: {exc}",)
                raise
            batch.append(event)
        if self.store is not None:
            seq_range = self.store.apply(batch)
        else:
            seq_range = (self._seq + 1, self._seq + len(batch))
        self.graph = shadow
        self._seq += len(batch)
        return seq_range

    def _emit(self, kind: str, at: datetime, payload: dict) -> None:
        self.apply_batch([(kind, at, payload)])

    def _fresh_id(self, prefix: str, table: dict) -> str:
        n = len(table) + 1
        while f"{prefix}{n}" in table:
            n += 1
        return f"{prefix}{n}"

    # -- knowledge graph commands ------------------------------------------

    def create_holon(
        self,
        title: str,
        layer: Layer,
        formality: Formality,
        scope: Scope | str,
        proposer: str,
        at: datetime,
    ) -> str:
        scope_text = _scope_text(scope)
        hid = self._fresh_id("h", self.graph.holons)
        self._emit(
            ev.HOLON_CREATED,
            at,
            {
                "id": hid,
                "title": title,
                "layer": layer.value,
                "formality": formality.value,
                "scope": scope_text,
                "proposer": proposer,
            },
        )
        return hid

    def attach_evidence(
        self,
        holon: str,
        description: str,
        raw_score: float,
        formality: Formality,
        scope: Scope | str,
        congruence: Congruence,
        valid_until: datetime,
        at: datetime,
    ) -> str:
        eid = self._fresh_id("e", self.graph.evidence)
        self._emit(
            ev.EVIDENCE_ATTACHED,
            at,
            {
                "id": eid,
                "holon": holon,
                "description": description,
                "raw_score": raw_score,
                "formality": formality.value,
                "scope": _scope_text(scope),
                "congruence": congruence.value,
                "valid_until": format_ts(ensure_utc(valid_until)),
            },
        )
        return eid

    def add_dependency(
        self, dependent: str, dependency: str, congruence: Congruence, at: datetime
    ) -> str:
        rid = self._fresh_id("rel", self.graph.relations)
        self._emit(
            ev.RELATION_ADDED,
            at,
            {
                "id": rid,
                "dependent": dependent,
                "dependency": dependency,
                "congruence": congruence.value,
            },
        )
        return rid

    def set_characteristic(
        self, holon: str, name: str, value: float, units: str, at: datetime
    ) -> None:
        self._emit(
            ev.CHARACTERISTIC_SET,
            at,
            {"holon": holon, "name": name, "value": value, "units": units},
        )

    # -- temporal validity commands ------------------------------------------

    def waive(
        self, evidence: str, rationale: str, waived_until: datetime, approver: str, at: datetime
    ) -> str:
        wid = self._fresh_id("w", self.graph.waivers)
        self._emit(
            ev.WAIVER_ISSUED,
            at,
            {
                "id": wid,
                "evidence": evidence,
                "rationale": rationale,
                "waived_until": format_ts(ensure_utc(waived_until)),
                "approver": approver,
            },
        )
        return wid

    def revalidate(
        self,
        evidence: str,
        new_valid_until: datetime,
        at: datetime,
        new_raw_score: float | None = None,
    ) -> str:
        old = self.graph.require_evidence(evidence)
        new_id = self._fresh_id("e", self.graph.evidence)
        self._emit(
            ev.EVIDENCE_SUPERSEDED,
            at,
            {
                "old": evidence,
                "id": new_id,
                "description": old.description,
                "raw_score": old.raw_score if new_raw_score is None else new_raw_score,
                "formality": old.formality.value,
                "scope": old.scope.serialize(),
                "congruence": old.congruence.value,
                "valid_until": format_ts(ensure_utc(new_valid_until)),
            },
        )
        return new_id

    def deprecate(self, holon: str, reason: str, at: datetime) -> bool:
        """Returns False (no-op) when the holon is already deprecated."""
        current = self.graph.require_holon(holon)
        if current.status is HolonStatus.DEPRECATED:
            return False
        self._emit(ev.DEPRECATED, at, {"holon": holon, "reason": reason})
        return True

    def scan(self, as_of: datetime, warning_window: timedelta | None = None) -> list[AlertEvent]:
        window = (
            warning_window
            if warning_window is not None
            else timedelta(days=self.calibration.warning_window_days)
        )
        return decay_scan(self.graph, as_of, window)

    # -- ADI lifecycle commands ------------------------------------------

    def propose(
        self,
        title: str,
        scope: Scope | str,
        proposer: str,
        at: datetime,
        formality: Formality = Formality.F0,
    ) -> str:
        return self.create_holon(title, Layer.L0, formality, scope, proposer, at)

    def verify_deduction(self, holon: str, note: str, verifier: str, at: datetime) -> None:
        current = self.graph.require_holon(holon)
        if current.layer is not Layer.L0:
            raise StateError(
                f"holon {holon} is at {current.layer.value}; deduction verifies L0 claims"
            )
        self._emit(
            ev.PROMOTION,
            at,
            {
                "holon": holon,
                "from_layer": "L0",
                "to_layer": "L1",
                "actor": verifier,
                "note": note,
                "evidence_refs": [],
            },
        )

    def validate_induction(
        self, holon: str, evidence_refs: Sequence[str], actor: str, at: datetime
    ) -> None:
        current = self.graph.require_holon(holon)
        if current.layer is not Layer.L1:
            raise StateError(
                f"holon {holon} is at {current.layer.value}; induction validates L1 claims"
            )
        self._emit(
            ev.PROMOTION,
            at,
            {
                "holon": holon,
                "from_layer": "L1",
                "to_layer": "L2",
                "actor": actor,
                "note": "",
                "evidence_refs": list(evidence_refs),
            },
        )

    def finalize_drr(self, holon: str, rationale: str, ratifier: str, at: datetime) -> DecisionRecord:
        current = self.graph.require_holon(holon)
        report = compute_reff(self.graph, holon, ensure_utc(at))
        did = self._fresh_id("drr", self.graph.drrs)
        self._emit(
            ev.DRR_FINALIZED,
            at,
            {
                "id": did,
                "holon": holon,
                "rationale": rationale,
                "proposer": current.proposer,
                "ratifier": ratifier,
                "evidence_refs": self.graph.live_evidence_ids(holon),
                "r_eff": report.r_eff,
            },
        )
        return self.graph.drrs[did]

    # -- reads ------------------------------------------------------------

    def assure(self, holon: str, as_of: datetime) -> TrustReport:
        return compute_reff(self.graph, holon, as_of)

    def drr(self, drr_id: str) -> DecisionRecord:
        record = self.graph.drrs.get(drr_id)
        if record is None:
            raise NotFoundError(f"unknown decision record {drr_id!r}")
        return record


def _scope_text(scope: Scope | str) -> str:
    if isinstance(scope, Scope):
        return scope.serialize()
    return parse_scope(scope).serialize()
