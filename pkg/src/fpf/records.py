"""Canonical record serialization for CLI and wire output.

Records are JSON with sorted keys and every real number printed with six
decimal digits, for golden-file stability. The event log does NOT use
this emitter (it keeps full float precision); this is presentation only.
"""

from __future__ import annotations

import json
from datetime import datetime

from .model import AlertEvent, DecisionRecord, Holon, TrustReport
from .times import format_ts


def canonical(obj) -> str:
    """Render a record as one line of canonical JSON."""
    return _emit(obj)


def _emit(obj) -> str:
    if obj is None:
        return "null"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return f"{obj:.6f}"
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=False)
    if isinstance(obj, datetime):
        return json.dumps(format_ts(obj))
    if isinstance(obj, dict):
        inner = ",".join(f"{json.dumps(str(k), ensure_ascii=False)}:{_emit(v)}" for k, v in sorted(obj.items()))
        return "{" + inner + "}"
    if isinstance(obj, (list, tuple, set, frozenset)):
        items = sorted(obj) if isinstance(obj, (set, frozenset)) else obj
        return "[" + ",".join(_emit(v) for v in items) + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def report_record(report: TrustReport) -> dict:
    return {
        "holon": report.holon,
        "r_eff": report.r_eff,
        "as_of": report.as_of,
        "binding": {
            "kind": report.binding_constraint.kind,
            "ref": report.binding_constraint.ref,
        },
        "per_evidence_adjusted": [[eid, value] for eid, value in report.per_evidence_adjusted],
        "per_dependency_adjusted": [
            [dep, value] for dep, value in report.per_dependency_adjusted
        ],
        "layer_ceiling": report.layer_ceiling,
        "formality_ceiling": report.formality_ceiling,
        "waived": list(report.waived),
    }


def alert_record(alert: AlertEvent) -> dict:
    return {
        "kind": alert.kind,
        "evidence": alert.evidence,
        "holon": alert.holon,
        "affected_decisions": alert.affected_decisions,
        "as_of": alert.as_of,
        "valid_until": alert.valid_until,
    }


def holon_record(holon: Holon, status: str, evidence_ids: list[str], deps: list[str]) -> dict:
    return {
        "id": holon.id,
        "title": holon.title,
        "layer": holon.layer.value,
        "formality": holon.formality.value,
        "scope": holon.scope.serialize(),
        "status": status,
        "proposer": holon.proposer,
        "created_at": holon.created_at,
        "evidence": evidence_ids,
        "depends_on": deps,
    }


def drr_record(record: DecisionRecord) -> dict:
    return {
        "id": record.id,
        "holon": record.holon,
        "rationale": record.rationale,
        "proposer": record.proposer,
        "ratifier": record.ratifier,
        "evidence_refs": list(record.evidence_refs),
        "r_eff_at_finalization": record.r_eff_at_finalization,
        "finalized_at": record.finalized_at,
    }


def error_record(code: str, message: str) -> dict:
    return {"error": {"code": code, "message": message}}
