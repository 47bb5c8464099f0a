"""Tripartite user/room/server network structure and its derived views.

A structure is a frozen snapshot of a federation: each user is homed on
exactly one server, each room is a set of member users, and a server takes
part in a room exactly when at least one of its users is a member.  The
server-room relation is always derived from memberships, never stored, so it
cannot drift out of sync with the user-room and user-server relations.
"""

from __future__ import annotations

from dataclasses import dataclass
from types import MappingProxyType
from typing import Iterable, Mapping

from .errors import UnknownEntityError

EntityId = str


def _checked_id(kind: str, value) -> str:
    if not isinstance(value, str) or not value:
        raise ValueError(f"{kind} id must be a non-empty string, got {value!r}")
    return value


@dataclass(frozen=True)
class Violation:
    """One broken invariant (or, in warnings, a legal but unusual shape)."""

    invariant: str
    subject: EntityId
    detail: str


@dataclass(frozen=True)
class ValidationReport:
    """Result of checking a structure against the relational invariants.

    Violations are data, not exceptions: an inconsistent structure can be
    inspected, and every broken invariant is listed.  Warnings flag legal
    oddities (empty rooms, servers without users) that never fail validation.
    """

    violations: tuple[Violation, ...] = ()
    warnings: tuple[Violation, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations


class NetworkStructure:
    """Immutable tripartite graph of servers, users and rooms.

    ``users`` maps each user id to its homeserver id; ``rooms`` maps each
    room id to the set of its member user ids.  Derived views (rooms of a
    server, servers of a room, ...) are precomputed once; the structure is
    safe for concurrent reads and is never mutated after construction.

    A structure may hold dangling references (a member id that is not a
    declared user, a home that is not a declared server).  ``validate``
    reports those; derived views skip unknown ids so that inspection of an
    invalid structure never crashes.
    """

    def __init__(
        self,
        servers: Iterable[EntityId],
        users: Mapping[EntityId, EntityId],
        rooms: Mapping[EntityId, Iterable[EntityId]],
    ):
        self._servers = frozenset(_checked_id("server", s) for s in servers)
        self._users = {
            _checked_id("user", u): _checked_id("server", s) for u, s in dict(users).items()
        }
        self._rooms = {
            _checked_id("room", r): frozenset(_checked_id("user", m) for m in members)
            for r, members in dict(rooms).items()
        }

        self._rooms_of_user: dict[str, set[str]] = {u: set() for u in self._users}
        self._users_of_server: dict[str, set[str]] = {s: set() for s in self._servers}
        self._rooms_of_server: dict[str, set[str]] = {s: set() for s in self._servers}
        self._servers_of_room: dict[str, frozenset[str]] = {}
        for u, s in self._users.items():
            if s in self._users_of_server:
                self._users_of_server[s].add(u)
        for r, members in self._rooms.items():
            homes = set()
            for m in members:
                home = self._users.get(m)
                if home is None:
                    continue  # dangling member, reported by validate()
                self._rooms_of_user[m].add(r)
                if home in self._rooms_of_server:
                    homes.add(home)
                    self._rooms_of_server[home].add(r)
            self._servers_of_room[r] = frozenset(homes)

    @property
    def servers(self) -> frozenset[str]:
        return self._servers

    @property
    def users(self) -> Mapping[str, str]:
        return MappingProxyType(self._users)

    @property
    def rooms(self) -> Mapping[str, frozenset[str]]:
        return MappingProxyType(self._rooms)

    @property
    def server_room_edges(self) -> frozenset[tuple[str, str]]:
        """Derived (server, room) participation pairs."""
        return frozenset(
            (s, r) for r, servers in self._servers_of_room.items() for s in servers
        )

    def home(self, user: str) -> str:
        """Homeserver of ``user``."""
        try:
            return self._users[user]
        except KeyError:
            raise UnknownEntityError("user", user) from None

    def rooms_of(self, entity: str) -> frozenset[str]:
        """Rooms of a user, or of a server (rooms any of its users are in).

        If an id names both a user and a server, the user reading wins.
        """
        if entity in self._rooms_of_user:
            return frozenset(self._rooms_of_user[entity])
        if entity in self._rooms_of_server:
            return frozenset(self._rooms_of_server[entity])
        raise UnknownEntityError("user or server", entity)

    def users_of(self, entity: str) -> frozenset[str]:
        """Members of a room, or all users homed on a server.

        If an id names both a room and a server, the room reading wins.
        """
        if entity in self._rooms:
            return self._rooms[entity]
        if entity in self._users_of_server:
            return frozenset(self._users_of_server[entity])
        raise UnknownEntityError("room or server", entity)

    def servers_of_room(self, room: str) -> frozenset[str]:
        """Home servers of the room's (declared) members."""
        try:
            return self._servers_of_room[room]
        except KeyError:
            raise UnknownEntityError("room", room) from None

    def federated_rooms(self, server: str) -> frozenset[str]:
        """Rooms of ``server`` shared with at least one other server."""
        if server not in self._rooms_of_server:
            raise UnknownEntityError("server", server)
        return frozenset(
            r for r in self._rooms_of_server[server] if len(self._servers_of_room[r]) > 1
        )

    def room_degree(self, user: str) -> int:
        """Number of rooms the user is a member of."""
        try:
            return len(self._rooms_of_user[user])
        except KeyError:
            raise UnknownEntityError("user", user) from None

    def __eq__(self, other) -> bool:
        if not isinstance(other, NetworkStructure):
            return NotImplemented
        return (
            self._servers == other._servers
            and self._users == other._users
            and self._rooms == other._rooms
        )

    __hash__ = None  # content-equal but not hashable

    def __repr__(self) -> str:
        return (
            f"NetworkStructure(servers={len(self._servers)}, "
            f"users={len(self._users)}, rooms={len(self._rooms)})"
        )


def validate(structure: NetworkStructure) -> ValidationReport:
    """Check all relational invariants; an empty report means a valid structure."""
    violations: list[Violation] = []
    warnings: list[Violation] = []
    for u in sorted(structure.users):
        s = structure.users[u]
        if s not in structure.servers:
            violations.append(
                Violation("user-home-declared", u, f"user {u!r} homed on undeclared server {s!r}")
            )
    for r in sorted(structure.rooms):
        members = structure.rooms[r]
        for m in sorted(members):
            if m not in structure.users:
                violations.append(
                    Violation("member-declared", r, f"room {r!r} contains unknown user {m!r}")
                )
        # Holds by construction (participation is derived); kept as a guard.
        if len(structure.servers_of_room(r)) > len(members):
            violations.append(
                Violation("room-server-bound", r, f"room {r!r} has more servers than users")
            )
        if not members:
            warnings.append(Violation("empty-room", r, f"room {r!r} has no members"))
    for s in sorted(structure.servers):
        if not structure.users_of(s):
            warnings.append(Violation("empty-server", s, f"server {s!r} has no users"))
    return ValidationReport(tuple(violations), tuple(warnings))
