"""Synthetic knowledge-graph generator and scalability benchmark.

Graphs are deterministic per seed: a fixed topology mix (40% serial
chains, 40% parallel fan-ins, 20% isolated), Poisson(5) evidence per
holon, scores uniform in [0.3, 0.99] clipped to formality ceilings, and
validity windows uniform in [30, 90] days from a fixed epoch.
"""

from __future__ import annotations

import math
import random
import time
from dataclasses import dataclass, field
from datetime import timedelta

from . import _kernels
from . import events as ev
from .assurance import compute_reff_all
from .errors import ValidationError
from .graph import Graph
from .times import format_ts, parse_ts

SYNTH_EPOCH = parse_ts("2026-01-01T00:00:00Z")

_LAYERS = ["L0", "L1", "L2"]
_FORMALITIES = ["F0", "F1", "F2", "F3"]
_CONGRUENCES = ["CL0", "CL1", "CL2", "CL3"]
_CEILING = {"F0": 0.70, "F1": 0.85, "F2": 0.95, "F3": 1.0}


@dataclass(frozen=True, slots=True)
class SynthSpec:
    holon_count: int
    seed: int = 0
    evidence_mean: float = 5.0
    serial_fraction: float = 0.4
    parallel_fraction: float = 0.4


@dataclass(frozen=True, slots=True)
class BenchRow:
    backend: str
    holons: int
    evidence: int
    build_seconds: float
    compute_seconds: float  # end-to-end full-graph recompute, median
    kernel_seconds: float  # inner kernel only (shared flattening excluded), median
    per_holon_us: float


@dataclass(frozen=True, slots=True)
class BenchReport:
    spec: SynthSpec
    repetitions: int
    rows: tuple[BenchRow, ...] = field(default=())


def _poisson(rng: random.Random, lam: float) -> int:
    # Knuth's method; stdlib RNG keeps seeds stable across library versions.
    threshold = math.exp(-lam)
    k, p = 0, 1.0
    while True:
        p *= rng.random()
        if p <= threshold:
            return k
        k += 1


def synth_graph(spec: SynthSpec) -> Graph:
    graph = Graph()
    for event in synth_events(spec):
        graph.apply(event)
    return graph


def synth_events(spec: SynthSpec) -> list[ev.Event]:
    """The deterministic event stream a synthetic graph is built from."""
    if spec.holon_count < 1:
        raise ValidationError("holon_count must be >= 1")
    rng = random.Random(spec.seed)
    out: list[ev.Event] = []
    n = spec.holon_count
    seq = 0

    def emit(kind: str, payload: dict) -> None:
        nonlocal seq
        seq += 1
        out.append(ev.Event(seq=seq, kind=kind, at=SYNTH_EPOCH, payload=payload))

    for i in range(1, n + 1):
        emit(
            ev.HOLON_CREATED,
            {
                "id": f"h{i}",
                "title": f"synthetic claim {i}",
                "layer": rng.choice(_LAYERS),
                "formality": rng.choice(_FORMALITIES),
                "scope": "*",
                "proposer": "actor:synth",
            },
        )

    n_serial = round(spec.serial_fraction * n)
    n_parallel = round(spec.parallel_fraction * n)

    def relate(dependent: int, dependency: int) -> None:
        emit(
            ev.RELATION_ADDED,
            {
                "id": f"rel{seq + 1}",
                "dependent": f"h{dependent}",
                "dependency": f"h{dependency}",
                "congruence": rng.choice(_CONGRUENCES),
            },
        )

    # Serial chains of 3-7; a short leftover still chains together.
    i = 1
    while i <= n_serial:
        length = min(rng.randint(3, 7), n_serial - i + 1)
        for k in range(i + 1, i + length):
            relate(k, k - 1)
        i += length

    # Parallel fan-ins: sibling dependencies sharing one dependent hub.
    i = n_serial + 1
    limit = n_serial + n_parallel
    while i <= limit:
        group = min(1 + rng.randint(2, 5), limit - i + 1)
        hub = i
        for sibling in range(i + 1, i + group):
            relate(hub, sibling)
        i += group
    # Remaining holons above `limit` stay isolated.

    evidence_count = 0
    for i in range(1, n + 1):
        for _ in range(_poisson(rng, spec.evidence_mean)):
            evidence_count += 1
            formality = rng.choice(_FORMALITIES)
            score = min(rng.uniform(0.3, 0.99), _CEILING[formality])
            window_s = int(rng.uniform(30.0, 90.0) * 86400)
            emit(
                ev.EVIDENCE_ATTACHED,
                {
                    "id": f"e{evidence_count}",
                    "holon": f"h{i}",
                    "description": f"synthetic evidence {evidence_count}",
                    "raw_score": score,
                    "formality": formality,
                    "scope": "*",
                    "congruence": rng.choice(_CONGRUENCES),
                    "valid_until": format_ts(SYNTH_EPOCH + timedelta(seconds=window_s)),
                },
            )
    return out


def bench(spec: SynthSpec, repetitions: int, backends: list[str] | None = None) -> BenchReport:
    """Time the full-graph recompute; reports the median of repetitions.

    ``compute_seconds`` is the end-to-end recompute; ``kernel_seconds``
    isolates the aggregation kernel so the compiled and Python backends
    compare without the shared array-marshalling cost.
    """
    if repetitions < 1:
        raise ValidationError("repetitions must be >= 1")
    import numpy as np

    from .assurance import flatten_graph
    from .times import to_epoch

    t0 = time.perf_counter()
    graph = synth_graph(spec)
    build_seconds = time.perf_counter() - t0
    evidence = len(graph.evidence)
    as_of = SYNTH_EPOCH

    order = graph.topological_order()
    arrays = flatten_graph(graph, order)
    out = np.empty(len(order), dtype=np.float64)
    kernel_args = (
        arrays["ev_start"],
        arrays["ev_raw"],
        arrays["ev_penalty"],
        arrays["ev_until"],
        arrays["dep_start"],
        arrays["dep_index"],
        arrays["dep_penalty"],
        arrays["layer_ceiling"],
        arrays["formality_ceiling"],
        to_epoch(as_of),
        graph.calibration.decay_floor,
        out,
    )

    def median_of(fn) -> float:
        timings = []
        for _ in range(repetitions):
            t0 = time.perf_counter()
            fn()
            timings.append(time.perf_counter() - t0)
        timings.sort()
        return timings[len(timings) // 2]

    rows: list[BenchRow] = []
    for backend in backends if backends is not None else _kernels.available_backends():
        kernel = _kernels.get_backend(backend)
        total = median_of(lambda: compute_reff_all(graph, as_of, backend=backend))
        inner = median_of(lambda: kernel.reff_batch(*kernel_args))
        rows.append(
            BenchRow(
                backend=backend,
                holons=spec.holon_count,
                evidence=evidence,
                build_seconds=build_seconds,
                compute_seconds=total,
                kernel_seconds=inner,
                per_holon_us=total / spec.holon_count * 1e6,
            )
        )
    return BenchReport(spec=spec, repetitions=repetitions, rows=tuple(rows))
