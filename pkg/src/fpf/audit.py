"""Decision-corpus auditing: ADR ingestion, staleness metrics, curves.

ADR files (``*.adr.md``) carry front matter between ``---`` fences:
``key: value`` lines, plus repeated evidence blocks opened by
``- evidence:`` with two-space-indented subkeys (``desc``, ``formality``,
``score``, ``valid_until``, ``congruence``). Dates are ISO-8601. Unknown
keys are preserved but ignored. Ingestion never crashes on bad input;
every failure becomes a per-file diagnostic.
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import datetime, timedelta
from pathlib import Path
from typing import Mapping

from . import events as ev
from .decay import effective_until
from .errors import FpfError, NotFoundError, ValidationError
from .graph import Graph
from .model import Congruence, Formality
from .times import ensure_utc, format_ts, parse_ts

REACTIVE = "reactive"
DORMANT = "dormant"


@dataclass(frozen=True, slots=True)
class AdrEvidence:
    desc: str
    formality: Formality
    score: float
    valid_until: datetime
    congruence: Congruence


@dataclass(frozen=True, slots=True)
class AdrDocument:
    id: str
    title: str
    status: str
    decision_date: datetime
    evidence: tuple[AdrEvidence, ...]
    depends_on: tuple[str, ...]
    extras: dict[str, str]
    source_path: str


@dataclass(frozen=True, slots=True)
class IngestResult:
    graph: Graph
    documents: dict[str, AdrDocument]
    diagnostics: tuple[str, ...]


@dataclass(frozen=True, slots=True)
class DecisionStaleness:
    decision: str
    expired: tuple[tuple[str, int], ...]  # (evidence id, days overdue)
    mode: str | None


@dataclass(frozen=True, slots=True)
class StalenessReport:
    as_of: datetime
    total_decisions: int
    stale_count: int
    stale_fraction: float
    details: tuple[DecisionStaleness, ...]
    reactive_count: int
    dormant_count: int
    proactive_count: int  # every stale decision is proactively detectable


# -- front-matter parsing ----------------------------------------------------


def parse_adr_text(text: str, source: str = "<memory>") -> AdrDocument:
    lines = text.splitlines()
    if not lines or lines[0].strip() != "---":
        raise ValidationError(f"{source}: missing opening front-matter fence")

    fields: dict[str, str] = {}
    evidence: list[AdrEvidence] = []
    current: dict[str, str] | None = None
    closed = False

    def flush() -> None:
        nonlocal current
        if current is not None:
            evidence.append(_evidence_from(current, source))
            current = None

    for raw in lines[1:]:
        if raw.strip() == "---":
            closed = True
            break
        if not raw.strip():
            continue
        if raw.strip() == "- evidence:":
            flush()
            current = {}
            continue
        if raw.startswith("  ") and current is not None:
            key, value = _split_kv(raw.strip(), source)
            current[key] = value
            continue
        if raw.startswith((" ", "\t")):
            raise ValidationError(f"{source}: stray indented line {raw!r}")
        flush()
        key, value = _split_kv(raw.strip(), source)
        fields[key] = value
    if not closed:
        raise ValidationError(f"{source}: missing closing front-matter fence")
    flush()

    for required in ("id", "title", "decision_date"):
        if required not in fields:
            raise ValidationError(f"{source}: missing required key {required!r}")

    depends_raw = fields.pop("depends_on", "")
    depends = tuple(part.strip() for part in depends_raw.split(",") if part.strip())
    doc_id = fields.pop("id")
    title = fields.pop("title")
    status = fields.pop("status", "accepted")
    decision_date = parse_ts(fields.pop("decision_date"))
    return AdrDocument(
        id=doc_id,
        title=title,
        status=status,
        decision_date=decision_date,
        evidence=tuple(evidence),
        depends_on=depends,
        extras=fields,
        source_path=source,
    )


def _split_kv(line: str, source: str) -> tuple[str, str]:
    key, sep, value = line.partition(":")
    if not sep or not key.strip():
        raise ValidationError(f"{source}: malformed line {line!r}")
    return key.strip(), value.strip()


def _evidence_from(block: dict[str, str], source: str) -> AdrEvidence:
    for required in ("desc", "score", "valid_until"):
        if required not in block:
            raise ValidationError(f"{source}: evidence block missing {required!r}")
    try:
        formality = Formality(block.get("formality", "F1"))
        congruence = Congruence(block.get("congruence", "CL3"))
    except ValueError as exc:
        raise ValidationError(f"{source}: {exc}") from None
    try:
        score = float(block["score"])
    except ValueError:
        raise ValidationError(f"{source}: bad evidence score {block['score']!r}") from None
    return AdrEvidence(
        desc=block["desc"],
        formality=formality,
        score=score,
        valid_until=parse_ts(block["valid_until"]),
        congruence=congruence,
    )


# -- ingestion ----------------------------------------------------------------


def ingest_adr_dir(path: str | Path) -> IngestResult:
    """One holon per parseable document, with evidence and dependency edges."""
    root = Path(path)
    if not root.is_dir():
        raise NotFoundError(f"ADR directory {root} does not exist")

    documents: dict[str, AdrDocument] = {}
    diagnostics: list[str] = []
    for file in sorted(root.glob("*.adr.md")):
        try:
            doc = parse_adr_text(file.read_text(encoding="utf-8"), source=file.name)
        except FpfError as exc:
            diagnostics.append(str(exc))
            continue
        except (OSError, UnicodeDecodeError) as exc:
            diagnostics.append(f"{file.name}: unreadable ({exc})")
            continue
        if doc.id in documents:
            diagnostics.append(f"{file.name}: duplicate decision id {doc.id!r}; file skipped")
            continue
        documents[doc.id] = doc

    graph = Graph()
    seq = 0

    def emit(kind: str, at: datetime, payload: dict) -> None:
        nonlocal seq
        seq += 1
        graph.apply(ev.Event(seq=seq, kind=kind, at=at, payload=payload))

    for doc_id, doc in sorted(documents.items()):
        emit(
            ev.HOLON_CREATED,
            doc.decision_date,
            {
                "id": doc_id,
                "title": doc.title,
                "layer": "L1",
                "formality": "F1",
                "scope": "*",
                "proposer": "actor:adr-ingest",
            },
        )
        for k, entry in enumerate(doc.evidence, start=1):
            try:
                emit(
                    ev.EVIDENCE_ATTACHED,
                    doc.decision_date,
                    {
                        "id": f"{doc_id}:e{k}",
                        "holon": doc_id,
                        "description": entry.desc,
                        "raw_score": entry.score,
                        "formality": entry.formality.value,
                        "scope": "*",
                        "congruence": entry.congruence.value,
                        "valid_until": format_ts(entry.valid_until),
                    },
                )
            except FpfError as exc:
                diagnostics.append(f"{doc.source_path}: evidence {k} skipped: {exc}")

    for doc_id, doc in sorted(documents.items()):
        for dep in doc.depends_on:
            if dep not in documents:
                diagnostics.append(
                    f"{doc.source_path}: dangling dependency {dep!r}; edge skipped"
                )
                continue
            try:
                emit(
                    ev.RELATION_ADDED,
                    doc.decision_date,
                    {
                        "id": f"rel:{doc_id}->{dep}",
                        "dependent": doc_id,
                        "dependency": dep,
                        "congruence": "CL3",
                    },
                )
            except FpfError as exc:
                diagnostics.append(f"{doc.source_path}: edge to {dep!r} skipped: {exc}")

    return IngestResult(graph=graph, documents=documents, diagnostics=tuple(diagnostics))


# -- staleness metrics ---------------------------------------------------------


def _stale_evidence(graph: Graph, holon_id: str, as_of: datetime) -> list[tuple[str, int]]:
    """Expired, unwaived live evidence of one decision with days overdue."""
    out: list[tuple[str, int]] = []
    for eid in graph.live_evidence_ids(holon_id):
        boundary = effective_until(graph.evidence[eid], graph.waivers_for(eid))
        if as_of > boundary:
            out.append((eid, (as_of - boundary).days))
    return out


def staleness_curve(
    graph: Graph, start: datetime, end: datetime, step: timedelta
) -> list[tuple[datetime, float]]:
    """Fraction of decisions with >= 1 expired unwaived evidence per sample date."""
    start, end = ensure_utc(start), ensure_utc(end)
    if start > end:
        raise ValidationError("curve range is inverted (from > to)")
    if step <= timedelta(0):
        raise ValidationError("curve step must be positive")
    total = len(graph.holons)
    points: list[tuple[datetime, float]] = []
    t = start
    while t <= end:
        if total == 0:
            points.append((t, 0.0))
        else:
            stale = sum(1 for hid in graph.holons if _stale_evidence(graph, hid, t))
            points.append((t, stale / total))
        t += step
    return points


def discovery_report(
    graph: Graph,
    as_of: datetime,
    annotations: Mapping[str, str] | None = None,
) -> StalenessReport:
    """Staleness tally with optional discovery-mode annotations.

    Unannotated stale decisions count as proactively detectable, since the
    scanner found them mechanically.
    """
    moment = ensure_utc(as_of)
    notes = dict(annotations or {})
    for decision, mode in notes.items():
        if decision not in graph.holons:
            raise ValidationError(f"annotation references unknown decision {decision!r}")
        if mode not in (REACTIVE, DORMANT):
            raise ValidationError(f"unknown discovery mode {mode!r} for {decision!r}")

    details: list[DecisionStaleness] = []
    for hid in sorted(graph.holons):
        expired = _stale_evidence(graph, hid, moment)
        if expired:
            details.append(
                DecisionStaleness(
                    decision=hid, expired=tuple(expired), mode=notes.get(hid)
                )
            )
    stale_count = len(details)
    total = len(graph.holons)
    return StalenessReport(
        as_of=moment,
        total_decisions=total,
        stale_count=stale_count,
        stale_fraction=(stale_count / total) if total else 0.0,
        details=tuple(details),
        reactive_count=sum(1 for d in details if d.mode == REACTIVE),
        dormant_count=sum(1 for d in details if d.mode == DORMANT),
        proactive_count=stale_count,
    )
