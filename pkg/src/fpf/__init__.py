"""Epistemic decision-tracking engine.

A knowledge graph of claims (holons) and scored evidence with computed
assurance: weakest-link aggregation under formality/layer ceilings and
congruence penalties, mechanical evidence decay, an auditable
propose/verify/validate/finalize lifecycle, and an append-only event log.
"""

from .assurance import adjust_evidence, compute_reff, compute_reff_all, compute_reff_map, explain
from .config import Calibration, DEFAULT_CALIBRATION
from .decay import decayed_score, scan
from .engine import Engine
from .errors import (
    BlockedError,
    CeilingError,
    CycleError,
    DependencyDeprecatedError,
    FpfError,
    IntegrityError,
    MandateViolationError,
    NotFoundError,
    ScopeParseError,
    StateError,
    ValidationError,
)
from .graph import Graph
from .invariants import check_quintet, idempotence_collapse_check
from .model import (
    AlertEvent,
    BindingConstraint,
    Congruence,
    DecisionRecord,
    Evidence,
    Formality,
    Holon,
    HolonStatus,
    Layer,
    PromotionRecord,
    Relation,
    TrustReport,
    Waiver,
)
from .operators import GammaOperator, aggregate, by_name, make_min, make_owa, make_owa_last, make_owa_mean, make_product
from .scope import Scope, parse_scope
from .store import Store
from .synth import BenchReport, SynthSpec, bench, synth_events, synth_graph

__version__ = "0.1.0"

__all__ = [
    "AlertEvent",
    "BenchReport",
    "BindingConstraint",
    "BlockedError",
    "Calibration",
    "CeilingError",
    "Congruence",
    "CycleError",
    "DEFAULT_CALIBRATION",
    "DecisionRecord",
    "DependencyDeprecatedError",
    "Engine",
    "Evidence",
    "Formality",
    "FpfError",
    "GammaOperator",
    "Graph",
    "Holon",
    "HolonStatus",
    "IntegrityError",
    "Layer",
    "MandateViolationError",
    "NotFoundError",
    "PromotionRecord",
    "Relation",
    "Scope",
    "ScopeParseError",
    "StateError",
    "Store",
    "SynthSpec",
    "TrustReport",
    "ValidationError",
    "Waiver",
    "adjust_evidence",
    "aggregate",
    "bench",
    "by_name",
    "check_quintet",
    "compute_reff",
    "compute_reff_all",
    "compute_reff_map",
    "decayed_score",
    "explain",
    "idempotence_collapse_check",
    "make_min",
    "make_owa",
    "make_owa_last",
    "make_owa_mean",
    "make_product",
    "parse_scope",
    "scan",
    "synth_events",
    "synth_graph",
]
