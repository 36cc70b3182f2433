"""Command-line front end.

Exit codes: 0 success, 1 validation/request error, 2 state or integrity
error. All errors go to stderr as single-line records. ``--as-of`` makes
every command deterministic; without it the wall clock is read once at
this boundary. The store path comes from ``--store`` or ``FPF_STORE``.
"""

from __future__ import annotations

import sys
from datetime import timedelta
from pathlib import Path

import click

from . import __version__, audit as audit_mod, ops, synth as synth_mod
from .config import Calibration, DEFAULT_CALIBRATION
from .engine import Engine
from .errors import FpfError, ValidationError
from .records import canonical, error_record
from .store import Store
from .times import format_ts, parse_ts


def _engine(ctx: click.Context) -> Engine:
    if ctx.obj.get("engine") is None:
        ctx.obj["engine"] = Engine(Store(ctx.obj["store_path"], ctx.obj["calibration"]))
    return ctx.obj["engine"]


def _emit(record) -> None:
    click.echo(canonical(record))


@click.group()
@click.option(
    "--store",
    "store_path",
    envvar="FPF_STORE",
    default="fpf.log",
    show_default=True,
    help="Event log path (FPF_STORE overrides the default; --store wins).",
)
@click.option("--calibration", "calibration_path", default=None, help="Nonstandard calibration JSON.")
@click.version_option(__version__, prog_name="fpf")
@click.pass_context
def cli(ctx: click.Context, store_path: str, calibration_path: str | None) -> None:
    ctx.ensure_object(dict)
    ctx.obj["store_path"] = store_path
    ctx.obj["calibration"] = (
        Calibration.from_file(calibration_path) if calibration_path else DEFAULT_CALIBRATION
    )


@cli.command()
@click.pass_context
def init(ctx: click.Context) -> None:
    """Create a fresh event log."""
    path = Path(ctx.obj["store_path"])
    if path.exists():
        raise ValidationError(f"store {path} already exists")
    Store(path, ctx.obj["calibration"]).close()
    _emit({"store": str(path), "initialized": True})


# -- holon ------------------------------------------------------------------


@cli.group()
def holon() -> None:
    """Create and inspect knowledge units."""


@holon.command("add")
@click.option("--title", required=True)
@click.option("--layer", default="L0", show_default=True)
@click.option("--formality", default="F0", show_default=True)
@click.option("--scope", default="*", show_default=True)
@click.option("--proposer", required=True)
@click.option("--as-of", "as_of", default=None)
@click.pass_context
def holon_add(ctx, title, layer, formality, scope, proposer, as_of) -> None:
    _emit(
        ops.holon_add(
            _engine(ctx),
            {
                "title": title,
                "layer": layer,
                "formality": formality,
                "scope": scope,
                "proposer": proposer,
                "as_of": as_of,
            },
        )
    )


@holon.command("list")
@click.pass_context
def holon_list(ctx) -> None:
    for record in ops.holon_list(_engine(ctx), {})["holons"]:
        _emit(record)


@holon.command("show")
@click.argument("holon_id")
@click.pass_context
def holon_show(ctx, holon_id) -> None:
    _emit(ops.holon_show(_engine(ctx), {"holon": holon_id}))


# -- evidence -----------------------------------------------------------------


@cli.group()
def evidence() -> None:
    """Attach, waive, and refresh evidence."""


@evidence.command("add")
@click.argument("holon_id")
@click.option("--desc", "description", required=True)
@click.option("--score", "raw_score", type=float, required=True)
@click.option("--formality", default="F1", show_default=True)
@click.option("--scope", default="*", show_default=True)
@click.option("--congruence", default="CL3", show_default=True)
@click.option("--valid-until", required=True)
@click.option("--as-of", "as_of", default=None)
@click.pass_context
def evidence_add(ctx, holon_id, description, raw_score, formality, scope, congruence, valid_until, as_of) -> None:
    _emit(
        ops.evidence_add(
            _engine(ctx),
            {
                "holon": holon_id,
                "description": description,
                "raw_score": raw_score,
                "formality": formality,
                "scope": scope,
                "congruence": congruence,
                "valid_until": valid_until,
                "as_of": as_of,
            },
        )
    )


@evidence.command("waive")
@click.argument("evidence_id")
@click.option("--rationale", required=True)
@click.option("--until", "waived_until", required=True)
@click.option("--approver", required=True)
@click.option("--as-of", "as_of", default=None)
@click.pass_context
def evidence_waive(ctx, evidence_id, rationale, waived_until, approver, as_of) -> None:
    _emit(
        ops.waive(
            _engine(ctx),
            {
                "evidence": evidence_id,
                "rationale": rationale,
                "waived_until": waived_until,
                "approver": approver,
                "as_of": as_of,
            },
        )
    )


@evidence.command("revalidate")
@click.argument("evidence_id")
@click.option("--valid-until", required=True)
@click.option("--score", "raw_score", type=float, default=None)
@click.option("--as-of", "as_of", default=None)
@click.pass_context
def evidence_revalidate(ctx, evidence_id, valid_until, raw_score, as_of) -> None:
    params = {"evidence": evidence_id, "valid_until": valid_until, "as_of": as_of}
    if raw_score is not None:
        params["raw_score"] = raw_score
    _emit(ops.revalidate(_engine(ctx), params))


# -- relations and assurance ---------------------------------------------------


@cli.command()
@click.argument("dependent")
@click.argument("dependency")
@click.option("--congruence", default="CL3", show_default=True)
@click.option("--as-of", "as_of", default=None)
@click.pass_context
def relate(ctx, dependent, dependency, congruence, as_of) -> None:
    """Record that DEPENDENT depends on DEPENDENCY."""
    _emit(
        ops.relate(
            _engine(ctx),
            {
                "dependent": dependent,
                "dependency": dependency,
                "congruence": congruence,
                "as_of": as_of,
            },
        )
    )


@cli.command()
@click.argument("holon_id")
@click.option("--as-of", "as_of", default=None)
@click.option("--explain", "show_tree", is_flag=True, help="Print the binding-constraint tree.")
@click.pass_context
def assure(ctx, holon_id, as_of, show_tree) -> None:
    """Compute the effective reliability of a holon."""
    engine = _engine(ctx)
    _emit(ops.assure(engine, {"holon": holon_id, "as_of": as_of}))
    if show_tree:
        click.echo(ops.explain(engine, {"holon": holon_id, "as_of": as_of})["tree"])


@cli.group()
def decay() -> None:
    """Temporal-validity tooling."""


@decay.command("scan")
@click.option("--as-of", "as_of", default=None)
@click.option("--window", "window_days", type=float, default=None, help="Warning window in days.")
@click.pass_context
def decay_scan(ctx, as_of, window_days) -> None:
    params = {"as_of": as_of}
    if window_days is not None:
        params["window_days"] = window_days
    for record in ops.decay_scan(_engine(ctx), params)["alerts"]:
        _emit(record)


# -- ADI lifecycle ---------------------------------------------------------------


@cli.group()
def adi() -> None:
    """Abduction -> Deduction -> Induction lifecycle."""


@adi.command("propose")
@click.option("--title", required=True)
@click.option("--scope", default="*", show_default=True)
@click.option("--proposer", required=True)
@click.option("--formality", default="F0", show_default=True)
@click.option("--as-of", "as_of", default=None)
@click.pass_context
def adi_propose(ctx, title, scope, proposer, formality, as_of) -> None:
    _emit(
        ops.propose(
            _engine(ctx),
            {
                "title": title,
                "scope": scope,
                "proposer": proposer,
                "formality": formality,
                "as_of": as_of,
            },
        )
    )


@adi.command("verify")
@click.argument("holon_id")
@click.option("--note", required=True)
@click.option("--verifier", required=True)
@click.option("--as-of", "as_of", default=None)
@click.pass_context
def adi_verify(ctx, holon_id, note, verifier, as_of) -> None:
    _emit(
        ops.verify(
            _engine(ctx),
            {"holon": holon_id, "note": note, "verifier": verifier, "as_of": as_of},
        )
    )


@adi.command("validate")
@click.argument("holon_id")
@click.option("--evidence", "evidence_refs", required=True, help="Comma-separated evidence ids.")
@click.option("--actor", required=True)
@click.option("--as-of", "as_of", default=None)
@click.pass_context
def adi_validate(ctx, holon_id, evidence_refs, actor, as_of) -> None:
    _emit(
        ops.validate(
            _engine(ctx),
            {"holon": holon_id, "evidence_refs": evidence_refs, "actor": actor, "as_of": as_of},
        )
    )


@adi.command("finalize")
@click.argument("holon_id")
@click.option("--rationale", required=True)
@click.option("--ratifier", required=True)
@click.option("--as-of", "as_of", default=None)
@click.pass_context
def adi_finalize(ctx, holon_id, rationale, ratifier, as_of) -> None:
    _emit(
        ops.finalize(
            _engine(ctx),
            {"holon": holon_id, "rationale": rationale, "ratifier": ratifier, "as_of": as_of},
        )
    )


@adi.command("export")
@click.argument("drr_id")
@click.pass_context
def adi_export(ctx, drr_id) -> None:
    """Print the structured DRR export document."""
    click.echo(ops.drr_export(_engine(ctx), {"drr": drr_id})["document"])


@cli.command()
@click.argument("holon_id")
@click.option("--reason", required=True)
@click.option("--as-of", "as_of", default=None)
@click.pass_context
def deprecate(ctx, holon_id, reason, as_of) -> None:
    """Retire a decision; dependents fail closed."""
    _emit(ops.deprecate(_engine(ctx), {"holon": holon_id, "reason": reason, "as_of": as_of}))


# -- audit, synth, bench ----------------------------------------------------------


@cli.group()
def audit() -> None:
    """Staleness auditing over ADR corpora."""


@audit.command("scan")
@click.argument("directory", type=click.Path(exists=True, file_okay=False))
@click.option("--as-of", "as_of", default=None, help="Defaults to the current time.")
@click.option(
    "--format",
    "fmt",
    type=click.Choice(["records", "table"]),
    default="records",
    show_default=True,
)
@click.option("--annotations", "annotations_path", default=None, help="JSON map decision -> reactive|dormant.")
def audit_scan(directory, as_of, fmt, annotations_path) -> None:
    import json as _json

    from datetime import datetime, timezone

    result = audit_mod.ingest_adr_dir(directory)
    annotations = None
    if annotations_path:
        annotations = _json.loads(Path(annotations_path).read_text(encoding="utf-8"))
    moment = parse_ts(as_of) if as_of else datetime.now(timezone.utc)
    report = audit_mod.discovery_report(result.graph, moment, annotations)
    if fmt == "records":
        _emit(
            {
                "as_of": report.as_of,
                "total_decisions": report.total_decisions,
                "stale_count": report.stale_count,
                "stale_fraction": report.stale_fraction,
                "reactive": report.reactive_count,
                "dormant": report.dormant_count,
                "proactively_detectable": report.proactive_count,
                "diagnostics": list(result.diagnostics),
            }
        )
        for row in report.details:
            _emit(
                {
                    "decision": row.decision,
                    "mode": row.mode,
                    "expired": [[eid, days] for eid, days in row.expired],
                }
            )
    else:
        pct = 100.0 * report.stale_fraction
        click.echo(f"staleness report as of {format_ts(report.as_of)}")
        click.echo(f"decisions audited: {report.total_decisions}")
        click.echo(f"stale: {report.stale_count} ({pct:.1f}%)")
        if report.stale_count:
            click.echo(
                f"discovery modes: reactive {report.reactive_count}, dormant {report.dormant_count},"
                f" proactively detectable {report.proactive_count}"
            )
            for row in report.details:
                overdue = ", ".join(f"{eid} overdue {days}d" for eid, days in row.expired)
                mode = f" [{row.mode}]" if row.mode else ""
                click.echo(f"  {row.decision}{mode}: {overdue}")
        for diag in result.diagnostics:
            click.echo(f"  diagnostic: {diag}")


@audit.command("curve")
@click.argument("directory", type=click.Path(exists=True, file_okay=False))
@click.option("--from", "start", required=True)
@click.option("--to", "end", required=True)
@click.option("--step", type=float, default=7.0, show_default=True, help="Sample step in days.")
def audit_curve(directory, start, end, step) -> None:
    """Two-column CSV: sample date, stale fraction."""
    result = audit_mod.ingest_adr_dir(directory)
    points = audit_mod.staleness_curve(
        result.graph, parse_ts(start), parse_ts(end), timedelta(days=step)
    )
    click.echo("date,stale_fraction")
    for when, fraction in points:
        click.echo(f"{when.strftime('%Y-%m-%dT%H:%M:%SZ')},{fraction:.6f}")


@cli.command()
@click.option("--n", "holon_count", type=int, required=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", "out_path", default=None, help="Also write the event log to this path.")
def synth(holon_count, seed, out_path) -> None:
    """Generate a deterministic synthetic graph; print its summary."""
    spec = synth_mod.SynthSpec(holon_count=holon_count, seed=seed)
    events = synth_mod.synth_events(spec)
    graph = synth_mod.synth_graph(spec)
    if out_path is not None:
        path = Path(out_path)
        if path.exists():
            raise ValidationError(f"output {path} already exists")
        store = Store(path)
        store.apply(events)
        store.close()
    _emit(
        {
            "holons": len(graph.holons),
            "evidence": len(graph.evidence),
            "relations": len(graph.relations),
            "seed": seed,
            "state_hash": graph.state_hash(),
        }
    )


@cli.command()
@click.option("--n", "holon_count", type=int, required=True)
@click.option("--repetitions", type=int, default=3, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
def bench(holon_count, repetitions, seed) -> None:
    """Time the full-graph recompute on every available kernel backend."""
    report = synth_mod.bench(
        synth_mod.SynthSpec(holon_count=holon_count, seed=seed), repetitions
    )
    for row in report.rows:
        _emit(
            {
                "backend": row.backend,
                "holons": row.holons,
                "evidence": row.evidence,
                "build_seconds": row.build_seconds,
                "compute_seconds": row.compute_seconds,
                "kernel_seconds": row.kernel_seconds,
                "per_holon_us": row.per_holon_us,
            }
        )


@cli.command("check-operator")
@click.argument("name")
@click.option("--samples", type=int, default=10000, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.pass_context
def check_operator(ctx, name, samples, seed) -> None:
    """Run the invariant quintet and collapse check on an operator."""
    _emit(ops.check_operator(None, {"name": name, "samples": samples, "seed": seed}))


@cli.command()
@click.pass_context
def serve(ctx) -> None:
    """Serve the line-delimited request/response protocol on stdio."""
    from .server import serve as run_serve

    if hasattr(sys.stdin, "reconfigure"):
        sys.stdin.reconfigure(errors="replace")
    run_serve(_engine(ctx), sys.stdin, sys.stdout)


def main(argv=None) -> int:
    try:
        cli.main(args=argv, standalone_mode=False, obj={})
    except click.exceptions.Exit as exc:
        return int(exc.exit_code)
    except click.UsageError as exc:
        sys.stderr.write(canonical(error_record("usage", exc.format_message())) + "\n")
        return 1
    except click.ClickException as exc:
        sys.stderr.write(canonical(error_record("cli", exc.format_message())) + "\n")
        return 1
    except FpfError as exc:
        sys.stderr.write(canonical(error_record(exc.code, str(exc))) + "\n")
        return exc.exit_code
    return 0


if __name__ == "__main__":
    sys.exit(main())
