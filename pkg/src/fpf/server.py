"""Line-delimited stdio request/response service.

One JSON request per line: ``{"id": int, "op": text, "params": record}``;
one response per line with a matching id. Requests are processed strictly
in arrival order. Protocol violations never terminate the loop: malformed
lines answer with id 0, unknown ops with code ``unknown-op``.
"""

from __future__ import annotations

import json
from typing import IO, Iterable

from .engine import Engine
from .errors import FpfError
from .ops import HANDLERS
from .records import canonical


def handle_line(engine: Engine, line: str) -> dict:
    request_id = 0
    try:
        message = json.loads(line)
    except json.JSONDecodeError as exc:
        return _error(request_id, "parse", f"malformed request line: {exc}")
    if not isinstance(message, dict):
        return _error(request_id, "parse", "request must be a JSON object")

    raw_id = message.get("id", 0)
    if isinstance(raw_id, bool) or not isinstance(raw_id, int):
        raw_id = 0
    request_id = raw_id

    op = message.get("op")
    if not isinstance(op, str):
        return _error(request_id, "parse", "missing op")
    handler = HANDLERS.get(op)
    if handler is None:
        return _error(request_id, "unknown-op", f"unknown op {op!r}")

    params = message.get("params") or {}
    if not isinstance(params, dict):
        return _error(request_id, "parse", "params must be an object")
    try:
        result = handler(engine, params)
    except FpfError as exc:
        return _error(request_id, exc.code, str(exc))
    except Exception as exc:  # total: protocol errors never kill the loop
        return _error(request_id, "internal", f"{type(exc).__name__}: {exc}")
    return {"id": request_id, "ok": True, "result": result}


def _error(request_id: int, code: str, message: str) -> dict:
    return {"id": request_id, "ok": False, "error": {"code": code, "message": message}}


def serve(engine: Engine, lines: Iterable[str], out: IO[str]) -> None:
    """Run the loop until end-of-input; one response line per request line."""
    for line in lines:
        line = line.rstrip("\n").rstrip("\r")
        response = handle_line(engine, line)
        out.write(canonical(response) + "\n")
        out.flush()
