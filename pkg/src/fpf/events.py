"""Event kinds and the one record type every mutation is expressed as."""

from __future__ import annotations

from dataclasses import dataclass
from datetime import datetime
from typing import Any

HOLON_CREATED = "holon-created"
EVIDENCE_ATTACHED = "evidence-attached"
RELATION_ADDED = "relation-added"
WAIVER_ISSUED = "waiver-issued"
EVIDENCE_SUPERSEDED = "evidence-superseded"
PROMOTION = "promotion"
DRR_FINALIZED = "drr-finalized"
DEPRECATED = "deprecated"
CHARACTERISTIC_SET = "characteristic-set"

KINDS = frozenset(
    {
        HOLON_CREATED,
        EVIDENCE_ATTACHED,
        RELATION_ADDED,
        WAIVER_ISSUED,
        EVIDENCE_SUPERSEDED,
        PROMOTION,
        DRR_FINALIZED,
        DEPRECATED,
        CHARACTERISTIC_SET,
    }
)


@dataclass(frozen=True, slots=True)
class Event:
    """One appended mutation. ``seq`` is assigned by the store, gapless from 1."""

    seq: int
    kind: str
    at: datetime
    payload: dict[str, Any]
