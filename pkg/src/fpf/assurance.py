"""Effective-reliability computation by weakest-link aggregation.

A holon's score is the minimum over its adjusted evidence scores, its
penalty-adjusted dependency scores, and the layer/formality ceilings;
evaluation is memoized in topological order. Every report records which
term bound the minimum, making the remediation path explicit.
"""

from __future__ import annotations

from datetime import datetime
from typing import Iterable

import numpy as np

from . import _kernels
from .config import Calibration, DEFAULT_CALIBRATION
from .decay import decayed_score
from .errors import DependencyDeprecatedError, NotFoundError, StateError, ValidationError
from .graph import Graph
from .model import BindingConstraint, Evidence, HolonStatus, TrustReport, Waiver
from .times import ensure_utc, to_epoch


def adjust_evidence(
    evidence: Evidence,
    as_of: datetime,
    waivers: Iterable[Waiver] = (),
    calibration: Calibration | None = None,
) -> float:
    """Decayed score minus the congruence penalty, floored at zero."""
    cal = calibration or DEFAULT_CALIBRATION
    decayed = decayed_score(evidence, as_of, waivers, floor=cal.decay_floor)
    adjusted = decayed - cal.congruence_penalty[evidence.congruence]
    return adjusted if adjusted > 0.0 else 0.0


def compute_reff(graph: Graph, holon_id: str, as_of: datetime) -> TrustReport:
    """Trust report for one holon; errors if its subgraph is deprecated."""
    moment = ensure_utc(as_of)
    holon = graph.require_holon(holon_id)
    if holon.status is HolonStatus.DEPRECATED:
        raise StateError(f"holon {holon_id} is deprecated")
    memo: dict[str, TrustReport] = {}
    _evaluate_into(graph, holon_id, moment, memo)
    return memo[holon_id]


def compute_reff_map(graph: Graph, as_of: datetime) -> dict[str, TrustReport]:
    """Reports for every holon not deprecated and not downstream of one."""
    moment = ensure_utc(as_of)
    memo: dict[str, TrustReport] = {}
    excluded: set[str] = set()
    for hid in graph.topological_order():
        if graph.holons[hid].status is HolonStatus.DEPRECATED:
            excluded.add(hid)
            continue
        if any(dep in excluded for dep in graph.deps_of.get(hid, ())):
            excluded.add(hid)
            continue
        _single_report(graph, hid, moment, memo)
    return memo


def _evaluate_into(
    graph: Graph, target: str, moment: datetime, memo: dict[str, TrustReport]
) -> None:
    # Iterative post-order so 10k-deep chains cannot exhaust the stack.
    stack: list[tuple[str, bool]] = [(target, False)]
    while stack:
        hid, expanded = stack.pop()
        if hid in memo:
            continue
        holon = graph.holons.get(hid)
        if holon is None:
            raise NotFoundError(f"unknown holon {hid!r}")
        if holon.status is HolonStatus.DEPRECATED and hid != target:
            raise DependencyDeprecatedError(hid)
        if expanded:
            _single_report(graph, hid, moment, memo)
            continue
        stack.append((hid, True))
        for dep in graph.dependency_ids(hid):
            if dep not in memo:
                stack.append((dep, False))


def _single_report(
    graph: Graph, hid: str, moment: datetime, memo: dict[str, TrustReport]
) -> None:
    cal = graph.calibration
    holon = graph.holons[hid]
    layer_ceiling = cal.layer_ceiling[holon.layer]
    formality_ceiling = cal.formality_ceiling[holon.formality]

    per_evidence: list[tuple[str, float]] = []
    waived: list[str] = []
    for eid in graph.live_evidence_ids(hid):
        item = graph.evidence[eid]
        waivers = graph.waivers_for(eid)
        per_evidence.append((eid, adjust_evidence(item, moment, waivers, cal)))
        if moment > item.valid_until and graph.is_fresh(eid, moment):
            waived.append(eid)

    per_dependency: list[tuple[str, float]] = []
    for dep in graph.dependency_ids(hid):
        penalty = cal.congruence_penalty[graph.relation_for(hid, dep).congruence]
        contrib = memo[dep].r_eff - penalty
        per_dependency.append((dep, contrib if contrib > 0.0 else 0.0))

    if not per_evidence and not per_dependency:
        memo[hid] = TrustReport(
            holon=hid,
            r_eff=0.0,
            as_of=moment,
            binding_constraint=BindingConstraint(kind="unsubstantiated"),
            per_evidence_adjusted=(),
            per_dependency_adjusted=(),
            layer_ceiling=layer_ceiling,
            formality_ceiling=formality_ceiling,
            waived=(),
        )
        return

    best = 2.0
    for _, value in per_evidence:
        if value < best:
            best = value
    for _, value in per_dependency:
        if value < best:
            best = value
    if layer_ceiling < best:
        best = layer_ceiling
    if formality_ceiling < best:
        best = formality_ceiling

    # Ties resolve in deterministic order: evidence, dependencies, layer, formality.
    binding = None
    for eid, value in per_evidence:
        if value == best:
            binding = BindingConstraint(kind="evidence", ref=eid)
            break
    if binding is None:
        for dep, value in per_dependency:
            if value == best:
                binding = BindingConstraint(kind="dependency", ref=dep)
                break
    if binding is None:
        if layer_ceiling == best:
            binding = BindingConstraint(kind="layer_ceiling")
        else:
            binding = BindingConstraint(kind="formality_ceiling")

    memo[hid] = TrustReport(
        holon=hid,
        r_eff=best,
        as_of=moment,
        binding_constraint=binding,
        per_evidence_adjusted=tuple(per_evidence),
        per_dependency_adjusted=tuple(per_dependency),
        layer_ceiling=layer_ceiling,
        formality_ceiling=formality_ceiling,
        waived=tuple(waived),
    )


# -- bulk kernel path ------------------------------------------------------


def compute_reff_all(
    graph: Graph, as_of: datetime, backend: str | None = None
) -> dict[str, float]:
    """Effective reliability for every holon via the batch kernel.

    Requires a deprecation-free graph (the bulk path serves benchmarks and
    audits over clean graphs; the rich evaluator owns deprecation errors).
    """
    moment = ensure_utc(as_of)
    for holon in graph.holons.values():
        if holon.status is HolonStatus.DEPRECATED:
            raise ValidationError(
                f"bulk evaluation requires a deprecation-free graph (holon {holon.id})"
            )
    order = graph.topological_order()
    arrays = flatten_graph(graph, order)
    out = np.empty(len(order), dtype=np.float64)
    kernel = _kernels.get_backend(backend)
    kernel.reff_batch(
        arrays["ev_start"],
        arrays["ev_raw"],
        arrays["ev_penalty"],
        arrays["ev_until"],
        arrays["dep_start"],
        arrays["dep_index"],
        arrays["dep_penalty"],
        arrays["layer_ceiling"],
        arrays["formality_ceiling"],
        to_epoch(moment),
        graph.calibration.decay_floor,
        out,
    )
    return {hid: float(out[i]) for i, hid in enumerate(order)}


def flatten_graph(graph: Graph, order: list[str]) -> dict[str, np.ndarray]:
    """CSR-style arrays for the batch kernel, holons in ``order``."""
    cal = graph.calibration
    position = {hid: i for i, hid in enumerate(order)}
    n = len(order)

    ev_start = np.zeros(n + 1, dtype=np.int64)
    dep_start = np.zeros(n + 1, dtype=np.int64)
    ev_raw: list[float] = []
    ev_penalty: list[float] = []
    ev_until: list[int] = []
    dep_index: list[int] = []
    dep_penalty: list[float] = []
    layer_ceiling = np.empty(n, dtype=np.float64)
    formality_ceiling = np.empty(n, dtype=np.float64)

    for i, hid in enumerate(order):
        holon = graph.holons[hid]
        layer_ceiling[i] = cal.layer_ceiling[holon.layer]
        formality_ceiling[i] = cal.formality_ceiling[holon.formality]
        for eid in graph.live_evidence_ids(hid):
            item = graph.evidence[eid]
            ev_raw.append(item.raw_score)
            ev_penalty.append(cal.congruence_penalty[item.congruence])
            # Stored datetimes are already aware UTC at second precision.
            ev_until.append(int(graph.effective_until(eid).timestamp()))
        ev_start[i + 1] = len(ev_raw)
        for dep in graph.dependency_ids(hid):
            dep_index.append(position[dep])
            dep_penalty.append(cal.congruence_penalty[graph.relation_for(hid, dep).congruence])
        dep_start[i + 1] = len(dep_index)

    return {
        "ev_start": ev_start,
        "ev_raw": np.asarray(ev_raw, dtype=np.float64),
        "ev_penalty": np.asarray(ev_penalty, dtype=np.float64),
        "ev_until": np.asarray(ev_until, dtype=np.int64),
        "dep_start": dep_start,
        "dep_index": np.asarray(dep_index, dtype=np.int64),
        "dep_penalty": np.asarray(dep_penalty, dtype=np.float64),
        "layer_ceiling": layer_ceiling,
        "formality_ceiling": formality_ceiling,
    }


# -- explanation -----------------------------------------------------------


def explain(graph: Graph, report: TrustReport) -> str:
    """Human-readable tree: each node names the min-term that bound it."""
    memo: dict[str, TrustReport] = {}
    _evaluate_into(graph, report.holon, report.as_of, memo)
    lines: list[str] = []
    _render(graph, memo, report.holon, indent=0, lines=lines, seen=set())
    return "\n".join(lines)


def _render(
    graph: Graph,
    memo: dict[str, TrustReport],
    hid: str,
    indent: int,
    lines: list[str],
    seen: set[str],
) -> None:
    pad = "  " * indent
    rep = memo[hid]
    holon = graph.holons[hid]
    binding = rep.binding_constraint
    bound = binding.kind if binding.ref is None else f"{binding.kind} {binding.ref}"
    lines.append(f"{pad}{hid} {holon.title!r} r_eff={rep.r_eff:.6f} <- {bound}")
    if hid in seen:
        lines[-1] += " (expanded above)"
        return
    seen.add(hid)
    for eid, value in rep.per_evidence_adjusted:
        marker = " *binding*" if binding == BindingConstraint("evidence", eid) else ""
        flag = " (waived)" if eid in rep.waived else ""
        desc = graph.evidence[eid].description
        lines.append(f"{pad}  evidence {eid} adj={value:.6f}{flag}{marker} {desc!r}")
    lines.append(
        f"{pad}  ceilings: layer {holon.layer.value}={rep.layer_ceiling:.6f}"
        f" formality {holon.formality.value}={rep.formality_ceiling:.6f}"
    )
    for dep, value in rep.per_dependency_adjusted:
        marker = " *binding*" if binding == BindingConstraint("dependency", dep) else ""
        lines.append(f"{pad}  dependency {dep} contrib={value:.6f}{marker}")
        _render(graph, memo, dep, indent + 2, lines, seen)
