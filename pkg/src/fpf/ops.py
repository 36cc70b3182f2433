"""Shared operation handlers behind both the CLI and the stdio server.

Each handler takes (engine, params) and returns a JSON-able result record,
so the two front ends produce identical records by construction.
"""

from __future__ import annotations

from datetime import datetime, timedelta, timezone

from . import assurance, invariants, operators, records
from .engine import Engine
from .errors import FpfError, ValidationError
from .model import Congruence, Formality
from .times import ensure_utc, format_ts, parse_ts


def _now() -> datetime:
    # Wall clock is read only at the front-end boundary, never inside the
    # engine; requests carry as_of for determinism.
    return ensure_utc(datetime.now(timezone.utc))


def _as_of(params: dict) -> datetime:
    raw = params.get("as_of")
    if raw is None:
        return _now()
    if isinstance(raw, datetime):
        return ensure_utc(raw)
    return parse_ts(str(raw))


def _req(params: dict, key: str) -> str:
    value = params.get(key)
    if value is None or (isinstance(value, str) and not value):
        raise ValidationError(f"missing required parameter {key!r}")
    return str(value)


def _formality(params: dict, key: str = "formality", default: str | None = None) -> Formality:
    raw = params.get(key, default)
    if raw is None:
        raise ValidationError(f"missing required parameter {key!r}")
    try:
        return Formality(str(raw))
    except ValueError:
        raise ValidationError(f"unknown formality {raw!r}") from None


def _congruence(params: dict, key: str = "congruence") -> Congruence:
    raw = _req(params, key)
    try:
        return Congruence(raw)
    except ValueError:
        raise ValidationError(f"unknown congruence {raw!r}") from None


def _layer(params: dict):
    from .model import Layer

    raw = _req(params, "layer")
    try:
        return Layer(raw)
    except ValueError:
        raise ValidationError(f"unknown layer {raw!r}") from None


def holon_add(engine: Engine, params: dict) -> dict:
    hid = engine.create_holon(
        title=_req(params, "title"),
        layer=_layer(params),
        formality=_formality(params),
        scope=_req(params, "scope"),
        proposer=_req(params, "proposer"),
        at=_as_of(params),
    )
    return {"holon": hid}


def holon_list(engine: Engine, params: dict) -> dict:
    graph = engine.graph
    out = []
    for hid in sorted(graph.holons):
        holon = graph.holons[hid]
        out.append(
            records.holon_record(
                holon,
                status=graph.effective_status(hid).value,
                evidence_ids=graph.live_evidence_ids(hid),
                deps=graph.dependency_ids(hid),
            )
        )
    return {"holons": out}


def holon_show(engine: Engine, params: dict) -> dict:
    graph = engine.graph
    hid = _req(params, "holon")
    holon = graph.require_holon(hid)
    return records.holon_record(
        holon,
        status=graph.effective_status(hid).value,
        evidence_ids=graph.live_evidence_ids(hid),
        deps=graph.dependency_ids(hid),
    )


def evidence_add(engine: Engine, params: dict) -> dict:
    if "raw_score" not in params:
        raise ValidationError("missing required parameter 'raw_score'")
    eid = engine.attach_evidence(
        holon=_req(params, "holon"),
        description=_req(params, "description"),
        raw_score=params["raw_score"],
        formality=_formality(params),
        scope=params.get("scope", "*"),
        congruence=_congruence(params),
        valid_until=parse_ts(_req(params, "valid_until")),
        at=_as_of(params),
    )
    return {"evidence": eid}


def waive(engine: Engine, params: dict) -> dict:
    wid = engine.waive(
        evidence=_req(params, "evidence"),
        rationale=_req(params, "rationale"),
        waived_until=parse_ts(_req(params, "waived_until")),
        approver=_req(params, "approver"),
        at=_as_of(params),
    )
    return {"waiver": wid}


def revalidate(engine: Engine, params: dict) -> dict:
    new_id = engine.revalidate(
        evidence=_req(params, "evidence"),
        new_valid_until=parse_ts(_req(params, "valid_until")),
        at=_as_of(params),
        new_raw_score=params.get("raw_score"),
    )
    return {"evidence": new_id, "supersedes": params["evidence"]}


def relate(engine: Engine, params: dict) -> dict:
    rid = engine.add_dependency(
        dependent=_req(params, "dependent"),
        dependency=_req(params, "dependency"),
        congruence=_congruence(params),
        at=_as_of(params),
    )
    return {"relation": rid}


def assure(engine: Engine, params: dict) -> dict:
    report = engine.assure(_req(params, "holon"), _as_of(params))
    return records.report_record(report)


def explain(engine: Engine, params: dict) -> dict:
    report = engine.assure(_req(params, "holon"), _as_of(params))
    return {"holon": report.holon, "tree": assurance.explain(engine.graph, report)}


def decay_scan(engine: Engine, params: dict) -> dict:
    window = params.get("window_days")
    alerts = engine.scan(
        as_of=_as_of(params),
        warning_window=None if window is None else timedelta(days=float(window)),
    )
    return {"alerts": [records.alert_record(a) for a in alerts]}


def propose(engine: Engine, params: dict) -> dict:
    hid = engine.propose(
        title=_req(params, "title"),
        scope=params.get("scope", "*"),
        proposer=_req(params, "proposer"),
        at=_as_of(params),
        formality=_formality(params, default="F0"),
    )
    return {"holon": hid}


def verify(engine: Engine, params: dict) -> dict:
    hid = _req(params, "holon")
    engine.verify_deduction(hid, _req(params, "note"), _req(params, "verifier"), _as_of(params))
    return {"holon": hid, "layer": engine.graph.holons[hid].layer.value}


def validate(engine: Engine, params: dict) -> dict:
    hid = _req(params, "holon")
    refs = params.get("evidence_refs")
    if isinstance(refs, str):
        refs = [part.strip() for part in refs.split(",") if part.strip()]
    engine.validate_induction(hid, refs or [], _req(params, "actor"), _as_of(params))
    return {"holon": hid, "layer": engine.graph.holons[hid].layer.value}


def finalize(engine: Engine, params: dict) -> dict:
    record = engine.finalize_drr(
        holon=_req(params, "holon"),
        rationale=_req(params, "rationale"),
        ratifier=_req(params, "ratifier"),
        at=_as_of(params),
    )
    return records.drr_record(record)


def drr_export(engine: Engine, params: dict) -> dict:
    record = engine.drr(_req(params, "drr"))
    return {"drr": record.id, "document": render_drr_document(engine, record.id)}


def deprecate(engine: Engine, params: dict) -> dict:
    hid = _req(params, "holon")
    changed = engine.deprecate(hid, _req(params, "reason"), _as_of(params))
    return {"holon": hid, "deprecated": True, "changed": changed}


def check_operator(engine: Engine, params: dict) -> dict:
    name = _req(params, "name")
    samples = int(params.get("samples", 10000))
    seed = int(params.get("seed", 0))
    op = operators.by_name(name)
    verdict = invariants.check_quintet(op, samples, seed)
    collapse = invariants.idempotence_collapse_check(op, samples, seed)

    def result(res: invariants.InvariantResult) -> dict:
        return {"passed": res.passed, "counterexample": res.counterexample}

    return {
        "operator": verdict.operator,
        "samples": verdict.samples,
        "idem": result(verdict.idem),
        "comm": result(verdict.comm),
        "loc": result(verdict.loc),
        "wlnk": result(verdict.wlnk),
        "mono": result(verdict.mono),
        "all_passed": verdict.all_passed,
        "collapse": {
            "status": collapse.status,
            "detail": collapse.detail,
            "counterexample": collapse.counterexample,
        },
    }


def render_drr_document(engine: Engine, drr_id: str) -> str:
    """Structured text export: rationale, evidence windows, explanation tree."""
    graph = engine.graph
    record = engine.drr(drr_id)
    lines = [
        f"decision-record {record.id}",
        f"holon: {record.holon}",
        f"title: {graph.holons[record.holon].title}",
        f"proposer: {record.proposer}",
        f"ratifier: {record.ratifier}",
        f"finalized_at: {format_ts(record.finalized_at)}",
        f"r_eff_at_finalization: {record.r_eff_at_finalization:.6f}",
        "rationale: " + record.rationale,
        "evidence:",
    ]
    for eid in record.evidence_refs:
        item = graph.evidence[eid]
        lines.append(
            f"  {eid} score={item.raw_score:.6f} {item.formality.value}"
            f" {item.congruence.value} valid_until={format_ts(item.valid_until)}"
            f" {item.description!r}"
        )
    lines.append("explanation:")
    try:
        report = engine.assure(record.holon, record.finalized_at)
        tree = assurance.explain(graph, report)
        lines.extend("  " + line for line in tree.splitlines())
    except FpfError as exc:
        lines.append(f"  unavailable: {exc}")
    return "\n".join(lines)


# Server/CLI shared op registry.
HANDLERS = {
    "holon-add": holon_add,
    "holon-list": holon_list,
    "holon-show": holon_show,
    "evidence-add": evidence_add,
    "waive": waive,
    "revalidate": revalidate,
    "relate": relate,
    "assure": assure,
    "explain": explain,
    "decay-scan": decay_scan,
    "propose": propose,
    "verify": verify,
    "validate": validate,
    "finalize": finalize,
    "drr-export": drr_export,
    "deprecate": deprecate,
    "check-operator": check_operator,
}
