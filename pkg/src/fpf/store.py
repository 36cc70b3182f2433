"""Durable append-only event log with snapshot replay.

On-disk format (UTF-8, diff-friendly, bit-exact for golden tests):

    fpf-log v1
    seq<TAB>kind<TAB>timestamp<TAB>payload

Payload is canonical JSON (sorted keys, no spaces). A partial trailing
record (torn write) is truncated with a warning on open; corruption
anywhere earlier is an integrity error naming the first bad seq.
"""

from __future__ import annotations

import json
import logging
import os
from datetime import datetime
from pathlib import Path

from . import events as ev
from .config import Calibration, DEFAULT_CALIBRATION
from .errors import IntegrityError, ValidationError
from .graph import Graph
from .times import ensure_utc, format_ts, parse_ts

logger = logging.getLogger(__name__)

HEADER = "fpf-log v1"


def encode_event(event: ev.Event) -> str:
    payload = json.dumps(event.payload, sort_keys=True, separators=(",", ":"), ensure_ascii=False)
    return f"{event.seq}\t{event.kind}\t{format_ts(event.at)}\t{payload}\n"


def decode_event(line: str, expected_seq: int) -> ev.Event:
    parts = line.split("\t", 3)
    if len(parts) != 4:
        raise IntegrityError(f"corrupt record at seq {expected_seq}: wrong field count")
    seq_text, kind, ts_text, payload_text = parts
    try:
        seq = int(seq_text)
    except ValueError:
        raise IntegrityError(f"corrupt record at seq {expected_seq}: bad seq {seq_text!r}") from None
    if seq != expected_seq:
        raise IntegrityError(f"gap in log: expected seq {expected_seq}, found {seq}")
    if kind not in ev.KINDS:
        raise IntegrityError(f"corrupt record at seq {expected_seq}: unknown kind {kind!r}")
    try:
        at = parse_ts(ts_text)
    except ValidationError as exc:
        raise IntegrityError(f"corrupt record at seq {expected_seq}: {exc}") from None
    try:
        payload = json.loads(payload_text)
    except json.JSONDecodeError as exc:
        raise IntegrityError(f"corrupt record at seq {expected_seq}: bad payload ({exc})") from None
    if not isinstance(payload, dict):
        raise IntegrityError(f"corrupt record at seq {expected_seq}: payload is not an object")
    return ev.Event(seq=seq, kind=kind, at=at, payload=payload)


class Store:
    """Single-writer log handle; all reads replay into immutable snapshots."""

    def __init__(self, path: str | Path, calibration: Calibration = DEFAULT_CALIBRATION):
        self.path = Path(path)
        self.calibration = calibration
        self._events: list[ev.Event] = []
        self._fh = None
        self._load()

    # -- lifecycle -------------------------------------------------------

    def _load(self) -> None:
        if not self.path.exists():
            self.path.parent.mkdir(parents=True, exist_ok=True)
            with open(self.path, "wb") as fh:
                fh.write((HEADER + "\n").encode("utf-8"))
                fh.flush()
                os.fsync(fh.fileno())
        else:
            self._recover()
        self._fh = open(self.path, "ab")

    def _recover(self) -> None:
        blob = self.path.read_bytes()
        keep = len(blob)
        lines = blob.split(b"\n")
        torn = None
        if lines and lines[-1] != b"":
            # No trailing newline: the final record is a torn write.
            torn = lines.pop()
            keep -= len(torn)
        else:
            lines = lines[:-1]

        if not lines:
            # Nothing but (at most) a torn header: reinitialize the file.
            if torn is not None:
                logger.warning("%s: truncating torn header", self.path)
            with open(self.path, "wb") as fh:
                fh.write((HEADER + "\n").encode("utf-8"))
                fh.flush()
                os.fsync(fh.fileno())
            return
        header = lines[0].decode("utf-8", errors="replace")
        if header != HEADER:
            raise IntegrityError(f"{self.path}: bad header {header!r}")

        parsed: list[ev.Event] = []
        offset = len(lines[0]) + 1
        for raw in lines[1:]:
            text = raw.decode("utf-8", errors="replace")
            try:
                parsed.append(decode_event(text, expected_seq=len(parsed) + 1))
            except IntegrityError:
                if offset + len(raw) + 1 >= keep:
                    # Complete-looking final line that does not parse: torn write.
                    torn = raw
                    keep = offset
                    break
                raise
            offset += len(raw) + 1

        if torn is not None:
            logger.warning(
                "%s: truncating torn trailing record (%d bytes) after seq %d",
                self.path,
                len(torn),
                len(parsed),
            )
            with open(self.path, "r+b") as fh:
                fh.truncate(keep)
                fh.flush()
                os.fsync(fh.fileno())
        self._events = parsed

    def close(self) -> None:
        if self._fh is not None:
            self._fh.close()
            self._fh = None

    def __enter__(self) -> "Store":
        return self

    def __exit__(self, *exc) -> None:
        self.close()

    # -- append ----------------------------------------------------------

    @property
    def last_seq(self) -> int:
        return len(self._events)

    @property
    def events(self) -> tuple[ev.Event, ...]:
        return tuple(self._events)

    def apply(self, batch: list[ev.Event]) -> tuple[int, int]:
        """Durable all-or-nothing append of an already-validated batch.

        Returns the (first, last) seq range. The batch is written in a
        single buffer write and fsynced before the in-memory view updates.
        """
        if not batch:
            raise ValidationError("empty event batch")
        expected = self.last_seq + 1
        for i, event in enumerate(batch):
            if event.seq != expected + i:
                raise IntegrityError(
                    f"batch seq {event.seq} out of order (expected {expected + i})"
                )
            if event.kind not in ev.KINDS:
                raise ValidationError(f"unknown event kind {event.kind!r}")
        try:
            blob = "".join(encode_event(event) for event in batch).encode("utf-8")
        except (TypeError, ValueError) as exc:
            raise ValidationError(f"unencodable event payload: {exc}") from None
        self._fh.write(blob)
        self._fh.flush()
        os.fsync(self._fh.fileno())
        self._events.extend(batch)
        return (expected, self.last_seq)

    # -- replay ----------------------------------------------------------

    def replay(
        self,
        up_to_seq: int | None = None,
        up_to_time: datetime | None = None,
    ) -> Graph:
        """Pure snapshot of historical state at a seq or time bound."""
        if up_to_seq is not None:
            if up_to_seq < 0 or up_to_seq > self.last_seq:
                raise ValidationError(
                    f"up_to_seq {up_to_seq} outside log range 0..{self.last_seq}"
                )
        bound_time = ensure_utc(up_to_time) if up_to_time is not None else None
        graph = Graph(self.calibration)
        for event in self._events:
            if up_to_seq is not None and event.seq > up_to_seq:
                break
            if bound_time is not None and event.at > bound_time:
                continue
            try:
                graph.apply(event)
            except Exception as exc:
                raise IntegrityError(f"event {event.seq} failed to apply: {exc}") from exc
        return graph
