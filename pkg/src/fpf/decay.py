"""Evidence decay: step-function scoring, staleness scanning, alerts.

An expired, unwaived evidence item scores exactly the uncertainty floor
(0.1 by default) regardless of its original value: expiry means "we no
longer know", not "slightly less reliable". Waivers extend freshness to
their ``waived_until``; the latest waiver governs.
"""

from __future__ import annotations

from datetime import datetime, timedelta
from typing import TYPE_CHECKING, Iterable

from .errors import ValidationError
from .model import AlertEvent, Evidence, Waiver
from .times import ensure_utc

if TYPE_CHECKING:
    from .graph import Graph

APPROACHING = "approaching"
STALE = "stale"


def effective_until(evidence: Evidence, waivers: Iterable[Waiver] = ()) -> datetime:
    boundary = evidence.valid_until
    for waiver in waivers:
        if waiver.waived_until > boundary:
            boundary = waiver.waived_until
    return boundary


def decayed_score(
    evidence: Evidence,
    as_of: datetime,
    waivers: Iterable[Waiver] = (),
    floor: float = 0.1,
) -> float:
    """Raw score while fresh (or waived); exactly ``floor`` afterwards."""
    if ensure_utc(as_of) <= effective_until(evidence, waivers):
        return evidence.raw_score
    return floor


def scan(graph: "Graph", as_of: datetime, warning_window: timedelta) -> list[AlertEvent]:
    """One alert per live evidence crossing a staleness threshold.

    ``stale`` when the effective boundary (validity window or governing
    waiver) has passed; ``approaching`` when it falls within the warning
    window. Ordering is deterministic: (kind, valid_until, evidence id).
    """
    if warning_window < timedelta(0):
        raise ValidationError("warning_window must be non-negative")
    moment = ensure_utc(as_of)
    alerts: list[AlertEvent] = []
    for eid in sorted(graph.evidence):
        if eid in graph.superseded_by:
            continue
        item = graph.evidence[eid]
        boundary = effective_until(item, graph.waivers_for(eid))
        if moment > boundary:
            kind = STALE
        elif boundary - moment <= warning_window:
            kind = APPROACHING
        else:
            continue
        alerts.append(
            AlertEvent(
                kind=kind,
                evidence=eid,
                holon=item.holon,
                affected_decisions=frozenset(graph.affected_closure(eid)),
                as_of=moment,
                valid_until=item.valid_until,
            )
        )
    alerts.sort(key=lambda a: (a.kind, a.valid_until, a.evidence))
    return alerts
