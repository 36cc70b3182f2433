"""Scope parsing and canonical serialization.

Text form: ``segment/segment [tag, tag]``, or ``*`` for the universal
scope. Canonical output uses a single space before the bracket group and
lexicographically sorted, comma-space separated tags, so that
``serialize(parse(s))`` is a fixpoint.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ScopeParseError

_FORBIDDEN = set("[],")


@dataclass(frozen=True, slots=True)
class Scope:
    path: tuple[str, ...]
    tags: frozenset[str]
    universal: bool = False

    def serialize(self) -> str:
        head = "*" if self.universal else "/".join(self.path)
        if self.tags:
            return f"{head} [{', '.join(sorted(self.tags))}]"
        return head

    def __str__(self) -> str:
        return self.serialize()


def parse_scope(text: str) -> Scope:
    """Parse a scope string, rejecting malformed bracket groups."""
    raw = text.strip()
    if not raw:
        raise ScopeParseError("empty scope")

    head, tags_part = raw, None
    if "[" in raw:
        if not raw.endswith("]"):
            raise ScopeParseError(f"unbalanced brackets in scope {text!r}")
        head, _, tags_part = raw[:-1].partition("[")
        head = head.strip()
    elif "]" in raw:
        raise ScopeParseError(f"unbalanced brackets in scope {text!r}")

    tags: set[str] = set()
    if tags_part is not None:
        if "[" in tags_part or "]" in tags_part:
            raise ScopeParseError(f"nested brackets in scope {text!r}")
        for chunk in tags_part.split(","):
            tag = chunk.strip()
            if not tag and len(tags_part.strip()) > 0:
                raise ScopeParseError(f"empty tag in scope {text!r}")
            if tag:
                _check_token(tag, "tag", text)
                tags.add(tag)

    if head == "*":
        return Scope(path=(), tags=frozenset(tags), universal=True)
    if not head:
        raise ScopeParseError(f"empty path in non-universal scope {text!r}")

    segments = []
    for segment in head.split("/"):
        segment = segment.strip()
        if not segment:
            raise ScopeParseError(f"empty path segment in scope {text!r}")
        _check_token(segment, "path segment", text, allow_slash=False)
        segments.append(segment)
    return Scope(path=tuple(segments), tags=frozenset(tags))


def _check_token(token: str, what: str, source: str, allow_slash: bool = True) -> None:
    bad = _FORBIDDEN if allow_slash else _FORBIDDEN | {"/"}
    for ch in token:
        if ch in bad or ch.isspace():
            raise ScopeParseError(f"illegal character {ch!r} in {what} of scope {source!r}")


def serialize_scope(scope: Scope) -> str:
    return scope.serialize()
