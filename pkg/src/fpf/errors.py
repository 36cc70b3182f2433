"""Exception taxonomy shared by the engine, CLI, and wire protocol.

Every error carries a stable ``code`` used verbatim in protocol responses
and an ``exit_code`` for the CLI (1 = request/validation, 2 = state or
integrity).
"""

from __future__ import annotations


class FpfError(Exception):
    code = "error"
    exit_code = 1


class ValidationError(FpfError):
    code = "validation"
    exit_code = 1


class ScopeParseError(ValidationError):
    code = "scope-parse"


class CeilingError(ValidationError):
    """Raw score exceeds the reliability ceiling of its formality level."""

    code = "ceiling"


class NotFoundError(FpfError):
    code = "not-found"
    exit_code = 1


class CycleError(FpfError):
    """Adding the relation would make the dependency graph cyclic."""

    code = "cycle"
    exit_code = 1

    def __init__(self, path: list[str]):
        self.path = list(path)
        super().__init__("relation would create a cycle: " + " -> ".join(self.path))


class MandateViolationError(FpfError):
    """Ratifier and proposer must be distinct actors."""

    code = "mandate-violation"
    exit_code = 1


class StateError(FpfError):
    """Operation not applicable in the holon's current lifecycle state."""

    code = "state"
    exit_code = 2


class BlockedError(StateError):
    """Promotion gate not met: no qualifying empirical evidence."""

    code = "blocked"


class DependencyDeprecatedError(StateError):
    code = "dependency-deprecated"

    def __init__(self, holon_id: str):
        self.holon_id = holon_id
        super().__init__(f"dependency subgraph contains deprecated holon {holon_id}")


class IntegrityError(FpfError):
    """The event log is corrupt or internally inconsistent."""

    code = "integrity"
    exit_code = 2
