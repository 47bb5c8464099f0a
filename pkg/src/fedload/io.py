"""Loading and saving network structures.

Two formats are supported:

* canonical JSON (``fedload/1``): a single strict document with keys
  ``version``, ``servers``, ``users`` and ``rooms``.  Ids are sorted on save,
  so saving is byte-deterministic and save/load round-trips exactly.
* membership CSV: RFC-4180 with header ``user_id,server_id,room_id``, one row
  per membership.  Duplicate rows collapse silently; users in zero rooms and
  empty rooms cannot be expressed in this format.

Loading always validates: a file that parses but violates the structural
invariants raises ``StructureInvalidError`` instead of returning.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

from .errors import FormatError, StructureInvalidError, UnknownFormatError
from .structure import NetworkStructure, ValidationReport, Violation, validate

CANONICAL_VERSION = "fedload/1"

FORMAT_CANONICAL = "canonical-json"
FORMAT_CSV = "membership-csv"
FORMAT_AUTO = "auto"

CSV_HEADER = ("user_id", "server_id", "room_id")


def save(structure: NetworkStructure, path: str | Path) -> None:
    """Write the canonical JSON document. The structure must be valid."""
    report = validate(structure)
    if not report.ok:
        raise StructureInvalidError(report)
    doc = {
        "version": CANONICAL_VERSION,
        "servers": sorted(structure.servers),
        "users": [{"id": u, "server": structure.users[u]} for u in sorted(structure.users)],
        "rooms": [
            {"id": r, "members": sorted(structure.rooms[r])} for r in sorted(structure.rooms)
        ],
    }
    Path(path).write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def load(path: str | Path, fmt: str = FORMAT_AUTO, check: bool = True) -> NetworkStructure:
    """Load a structure; with ``check`` (the default) invalid data raises.

    ``check=False`` skips the validation step so that a broken structure can
    be loaded for inspection; parse errors still raise.
    """
    path = Path(path)
    if fmt == FORMAT_AUTO:
        suffix = path.suffix.lower()
        if suffix == ".json":
            fmt = FORMAT_CANONICAL
        elif suffix == ".csv":
            fmt = FORMAT_CSV
        else:
            raise UnknownFormatError(f"cannot infer format from suffix {suffix!r} of {path}")
    if fmt == FORMAT_CANONICAL:
        structure = _load_canonical(path)
    elif fmt == FORMAT_CSV:
        structure = _load_csv(path)
    else:
        raise UnknownFormatError(f"unknown format {fmt!r}")
    if check:
        report = validate(structure)
        if not report.ok:
            raise StructureInvalidError(report)
    return structure


def _require_keys(path: Path, obj: dict, keys: set[str], context: str) -> None:
    got = set(obj)
    unknown = got - keys
    if unknown:
        raise FormatError(str(path), f"unknown field(s) {sorted(unknown)} in {context}")
    missing = keys - got
    if missing:
        raise FormatError(str(path), f"missing field(s) {sorted(missing)} in {context}")


def _load_canonical(path: Path) -> NetworkStructure:
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise FormatError(str(path), str(exc)) from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(str(path), exc.msg, exc.lineno, exc.colno) from exc
    if not isinstance(doc, dict):
        raise FormatError(str(path), "top-level value must be an object")
    _require_keys(path, doc, {"version", "servers", "users", "rooms"}, "document")
    if doc["version"] != CANONICAL_VERSION:
        raise FormatError(
            str(path), f"unsupported version {doc['version']!r}, expected {CANONICAL_VERSION!r}"
        )
    if not isinstance(doc["servers"], list):
        raise FormatError(str(path), "'servers' must be a list")
    users: dict[str, str] = {}
    if not isinstance(doc["users"], list):
        raise FormatError(str(path), "'users' must be a list")
    for entry in doc["users"]:
        if not isinstance(entry, dict):
            raise FormatError(str(path), "user entries must be objects")
        _require_keys(path, entry, {"id", "server"}, "user entry")
        if entry["id"] in users:
            raise FormatError(str(path), f"duplicate user id {entry['id']!r}")
        users[entry["id"]] = entry["server"]
    rooms: dict[str, list[str]] = {}
    if not isinstance(doc["rooms"], list):
        raise FormatError(str(path), "'rooms' must be a list")
    for entry in doc["rooms"]:
        if not isinstance(entry, dict):
            raise FormatError(str(path), "room entries must be objects")
        _require_keys(path, entry, {"id", "members"}, "room entry")
        if entry["id"] in rooms:
            raise FormatError(str(path), f"duplicate room id {entry['id']!r}")
        if not isinstance(entry["members"], list):
            raise FormatError(str(path), f"members of room {entry['id']!r} must be a list")
        rooms[entry["id"]] = entry["members"]
    try:
        return NetworkStructure(doc["servers"], users, rooms)
    except ValueError as exc:
        raise FormatError(str(path), str(exc)) from exc


def _load_csv(path: Path) -> NetworkStructure:
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise FormatError(str(path), str(exc)) from exc
    reader = csv.reader(text.splitlines())
    try:
        header = next(reader)
    except StopIteration:
        raise FormatError(str(path), "empty file, expected header row", 1) from None
    if tuple(header) != CSV_HEADER:
        raise FormatError(
            str(path), f"bad header {header!r}, expected {','.join(CSV_HEADER)!r}", 1
        )
    servers: set[str] = set()
    users: dict[str, str] = {}
    rooms: dict[str, set[str]] = {}
    conflicts: list[Violation] = []
    for lineno, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != 3 or not all(row):
            raise FormatError(str(path), f"expected 3 non-empty fields, got {row!r}", lineno)
        user, server, room = row
        if users.get(user, server) != server:
            conflicts.append(
                Violation(
                    "user-home-unique",
                    user,
                    f"user {user!r} listed with servers {users[user]!r} and {server!r}",
                )
            )
            continue
        users[user] = server
        servers.add(server)
        rooms.setdefault(room, set()).add(user)
    if conflicts:
        raise StructureInvalidError(ValidationReport(tuple(conflicts)))
    try:
        return NetworkStructure(servers, users, rooms)
    except ValueError as exc:
        raise FormatError(str(path), str(exc)) from exc
