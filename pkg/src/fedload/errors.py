"""Exception hierarchy shared by all fedload modules.

Every error carries a short machine-parseable ``code`` used by the CLI for
its one-line error output.
"""

from __future__ import annotations


class FedloadError(Exception):
    """Base class for all errors raised by this package."""

    code = "error"


class UnknownEntityError(FedloadError):
    """An id does not name a declared user, server or room."""

    code = "unknown-entity"

    def __init__(self, kind: str, entity: str):
        super().__init__(f"unknown {kind}: {entity!r}")
        self.kind = kind
        self.entity = entity


class FormatError(FedloadError):
    """A file could not be parsed in the requested format."""

    code = "format"

    def __init__(self, path: str, message: str, line: int | None = None, column: int | None = None):
        where = path
        if line is not None:
            where += f":{line}"
            if column is not None:
                where += f":{column}"
        super().__init__(f"{where}: {message}")
        self.path = path
        self.line = line
        self.column = column


class UnknownFormatError(FedloadError):
    code = "unknown-format"


class StructureInvalidError(FedloadError):
    """A structure failed validation where a valid one is required."""

    code = "structure-invalid"

    def __init__(self, report):
        shown = [f"{v.invariant}: {v.detail}" for v in report.violations[:5]]
        more = len(report.violations) - len(shown)
        if more > 0:
            shown.append(f"... and {more} more")
        super().__init__("; ".join(shown) or "invalid structure")
        self.report = report


class InternalConsistencyError(FedloadError):
    """Two computation routes that must agree did not (implementation bug)."""

    code = "internal-consistency"


class MismatchedLoadError(FedloadError):
    """A load profile was combined with a structure it was not computed on."""

    code = "mismatched-load"


class UnassignedRoomError(FedloadError):
    code = "unassigned-room"

    def __init__(self, room: str):
        super().__init__(f"federated room {room!r} has no mechanism assigned")
        self.room = room


class NoEligibleUsersError(FedloadError):
    code = "no-eligible-users"


class LocalRoomError(FedloadError):
    """The operation requires a room with at least two participating servers."""

    code = "local-room"


class OriginNotInRoomError(FedloadError):
    code = "origin-not-in-room"


class NonFullMeshError(FedloadError):
    """The analytical model only covers full-mesh distribution."""

    code = "non-full-mesh"


class InfeasibleConfigError(FedloadError):
    code = "infeasible-config"


class DegenerateStructureError(FedloadError):
    code = "degenerate-structure"
