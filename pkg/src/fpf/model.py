"""Domain entities: holons, evidence, relations, waivers, and decision records."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from datetime import datetime

from .scope import Scope


class Layer(enum.Enum):
    """Epistemic status: conjecture, substantiated, corroborated."""

    L0 = "L0"
    L1 = "L1"
    L2 = "L2"

    @property
    def rank(self) -> int:
        return int(self.value[1])


class Formality(enum.Enum):
    """Rigor of expression, informal note through formal proof."""

    F0 = "F0"
    F1 = "F1"
    F2 = "F2"
    F3 = "F3"

    @property
    def rank(self) -> int:
        return int(self.value[1])


class Congruence(enum.Enum):
    """Context match for cross-context evidence transfer."""

    CL0 = "CL0"
    CL1 = "CL1"
    CL2 = "CL2"
    CL3 = "CL3"


class HolonStatus(enum.Enum):
    ACTIVE = "active"
    DEPRECATED = "deprecated"
    # Derived, never persisted: active with no live evidence and no deps.
    UNSUBSTANTIATED = "unsubstantiated-flagged"


@dataclass(frozen=True, slots=True)
class Holon:
    id: str
    title: str
    layer: Layer
    formality: Formality
    scope: Scope
    status: HolonStatus
    proposer: str
    created_at: datetime


@dataclass(frozen=True, slots=True)
class Evidence:
    id: str
    holon: str
    description: str
    raw_score: float
    formality: Formality
    scope: Scope
    congruence: Congruence
    valid_until: datetime
    created_at: datetime
    waiver: str | None = None


@dataclass(frozen=True, slots=True)
class Relation:
    id: str
    dependent: str
    dependency: str
    congruence: Congruence
    created_at: datetime


@dataclass(frozen=True, slots=True)
class Characteristic:
    holon: str
    name: str
    value: float
    units: str


@dataclass(frozen=True, slots=True)
class Waiver:
    id: str
    evidence: str
    rationale: str
    waived_until: datetime
    approver: str
    created_at: datetime


@dataclass(frozen=True, slots=True)
class PromotionRecord:
    holon: str
    from_layer: Layer
    to_layer: Layer
    actor: str
    note: str
    evidence_refs: tuple[str, ...]
    at: datetime


@dataclass(frozen=True, slots=True)
class DecisionRecord:
    id: str
    holon: str
    rationale: str
    proposer: str
    ratifier: str
    evidence_refs: tuple[str, ...]
    r_eff_at_finalization: float
    finalized_at: datetime


@dataclass(frozen=True, slots=True)
class AlertEvent:
    """One staleness threshold crossing found by a decay scan."""

    kind: str  # "approaching" | "stale"
    evidence: str
    holon: str
    affected_decisions: frozenset[str]
    as_of: datetime
    valid_until: datetime


@dataclass(frozen=True, slots=True)
class BindingConstraint:
    """Which min-term capped r_eff: evidence/dependency ref or a ceiling."""

    kind: str  # "evidence" | "dependency" | "layer_ceiling" | "formality_ceiling" | "unsubstantiated"
    ref: str | None = None


@dataclass(frozen=True, slots=True)
class TrustReport:
    holon: str
    r_eff: float
    as_of: datetime
    binding_constraint: BindingConstraint
    per_evidence_adjusted: tuple[tuple[str, float], ...]
    per_dependency_adjusted: tuple[tuple[str, float], ...]
    layer_ceiling: float
    formality_ceiling: float
    waived: tuple[str, ...] = field(default=())
