from __future__ import annotations

import random
from datetime import timedelta

import pytest

from fpf import events as ev
from fpf.engine import Engine
from fpf.graph import Graph
from fpf.model import Congruence, Formality, Layer
from fpf.times import format_ts, parse_ts

T0 = parse_ts("2025-07-01T00:00:00Z")
AS_OF = parse_ts("2026-01-01T00:00:00Z")

LAYERS = ["L0", "L1", "L2"]
FORMALITIES = ["F0", "F1", "F2", "F3"]
CONGRUENCES = ["CL0", "CL1", "CL2", "CL3"]
CEILING = {"F0": 0.70, "F1": 0.85, "F2": 0.95, "F3": 1.0}


class GraphBuilder:
    """Direct event-path construction helper for test graphs."""

    def __init__(self, graph: Graph | None = None):
        self.graph = graph if graph is not None else Graph()
        self.seq = 0

    def emit(self, kind: str, payload: dict, at=T0) -> None:
        self.seq += 1
        self.graph.apply(ev.Event(seq=self.seq, kind=kind, at=at, payload=payload))

    def holon(self, hid: str, layer="L2", formality="F2", title=None, at=T0) -> str:
        self.emit(
            ev.HOLON_CREATED,
            {
                "id": hid,
                "title": title or f"claim {hid}",
                "layer": layer,
                "formality": formality,
                "scope": "*",
                "proposer": "actor:test",
            },
            at=at,
        )
        return hid

    def evidence(
        self,
        eid: str,
        holon: str,
        score: float,
        formality="F2",
        congruence="CL3",
        valid_until=None,
        at=T0,
    ) -> str:
        self.emit(
            ev.EVIDENCE_ATTACHED,
            {
                "id": eid,
                "holon": holon,
                "description": f"evidence {eid}",
                "raw_score": score,
                "formality": formality,
                "scope": "*",
                "congruence": congruence,
                "valid_until": format_ts(valid_until if valid_until else AS_OF + timedelta(days=90)),
            },
            at=at,
        )
        return eid

    def relate(self, dependent: str, dependency: str, congruence="CL3", at=T0) -> None:
        self.emit(
            ev.RELATION_ADDED,
            {
                "id": f"rel{self.seq + 1}",
                "dependent": dependent,
                "dependency": dependency,
                "congruence": congruence,
            },
            at=at,
        )


def random_graph(
    rng: random.Random,
    max_holons: int = 8,
    max_evidence_per_holon: int = 3,
    edge_prob: float = 0.3,
    allow_expired: bool = True,
) -> Graph:
    """Random valid DAG; evidence scores honor formality ceilings."""
    b = GraphBuilder()
    n = rng.randint(1, max_holons)
    for i in range(n):
        b.holon(f"h{i}", layer=rng.choice(LAYERS), formality=rng.choice(FORMALITIES))
        for j in range(i):
            if rng.random() < edge_prob:
                b.relate(f"h{i}", f"h{j}", congruence=rng.choice(CONGRUENCES))
    eid = 0
    for i in range(n):
        for _ in range(rng.randint(0, max_evidence_per_holon)):
            eid += 1
            formality = rng.choice(FORMALITIES)
            lo = -40 if allow_expired else 1
            b.evidence(
                f"e{eid}",
                f"h{i}",
                score=rng.uniform(0.0, CEILING[formality]),
                formality=formality,
                congruence=rng.choice(CONGRUENCES),
                valid_until=AS_OF + timedelta(days=rng.randint(lo, 90)),
            )
    return b.graph


@pytest.fixture
def builder() -> GraphBuilder:
    return GraphBuilder()


@pytest.fixture
def engine() -> Engine:
    return Engine()


def redis_fixture(engine: Engine, upgraded: bool = False) -> tuple[str, dict[str, str]]:
    """The session-storage worked example; returns (holon id, evidence ids).

    The 0.90 clustering-docs item is attached at F2: its Fig-style F1
    labeling would violate the F1 ceiling (0.85) the engine enforces.
    """
    far = parse_ts("2026-06-01T00:00:00Z")
    hid = engine.create_holon(
        "Use Redis for session storage",
        Layer.L2,
        Formality.F2,
        "cache/redis [api/users]",
        "actor:alice",
        T0,
    )
    ids = {}
    ids["benchmark"] = engine.attach_evidence(
        hid, "Benchmark: 12k RPS at p95=8ms", 0.95, Formality.F2, "*", Congruence.CL3, far, T0
    )
    if upgraded:
        ids["traffic"] = engine.attach_evidence(
            hid,
            "Traffic model: load test on production traffic",
            0.95,
            Formality.F2,
            "*",
            Congruence.CL3,
            far,
            T0,
        )
    else:
        ids["traffic"] = engine.attach_evidence(
            hid,
            "Traffic model: peak 10k RPS (blog extrapolation)",
            0.70,
            Formality.F1,
            "*",
            Congruence.CL3,
            far,
            T0,
        )
    ids["clustering"] = engine.attach_evidence(
        hid, "Redis clustering documentation", 0.90, Formality.F2, "*", Congruence.CL3, far, T0
    )
    return hid, ids
