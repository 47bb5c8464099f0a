"""Analytical transaction-load model over a network structure.

Each user emits messages at a fixed rate, spread uniformly over their rooms.
Delivering an event to a room costs the origin server one transaction per
other participating server (full-mesh distribution), while every receiving
server takes exactly one transaction per foreign event in its rooms.  This
asymmetry is the heart of the model: outgoing load scales with the number of
foreign servers in a room, incoming load only with the number of foreign
users.

All rates are exact rationals, so conservation (total sent = total received)
and sender/receiver symmetry hold as equalities, not within tolerances.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from types import MappingProxyType
from typing import Mapping

from .errors import InternalConsistencyError, UnknownEntityError
from .structure import NetworkStructure

#: Prefix for servers minted by split_user / full_decentralization.
SPLIT_SERVER_PREFIX = "split::"


@dataclass(frozen=True)
class ModelParams:
    """Traffic model parameters: the per-user message rate (events per unit time)."""

    message_rate: Fraction = Fraction(1)

    def __post_init__(self):
        rate = Fraction(self.message_rate)
        if rate <= 0:
            raise ValueError(f"message_rate must be positive, got {rate}")
        object.__setattr__(self, "message_rate", rate)


@dataclass(frozen=True)
class TrafficMatrix:
    """Pairwise send rates; only nonzero ordered pairs are stored."""

    servers: frozenset[str]
    entries: Mapping[tuple[str, str], Fraction]

    def rate(self, sender: str, receiver: str) -> Fraction:
        return self.entries.get((sender, receiver), Fraction(0))

    def tx_totals(self) -> dict[str, Fraction]:
        """Row sums: total send rate per server."""
        totals = {s: Fraction(0) for s in self.servers}
        for (a, _), r in self.entries.items():
            totals[a] += r
        return totals

    def rx_totals(self) -> dict[str, Fraction]:
        """Column sums: total receive rate per server."""
        totals = {s: Fraction(0) for s in self.servers}
        for (_, b), r in self.entries.items():
            totals[b] += r
        return totals


@dataclass(frozen=True)
class LoadProfile:
    """Per-server send/receive rates plus federation totals."""

    tx: Mapping[str, Fraction]
    rx: Mapping[str, Fraction]

    def sum_of(self, server: str) -> Fraction:
        return self.tx[server] + self.rx[server]

    @property
    def total_tx(self) -> Fraction:
        return sum(self.tx.values(), Fraction(0))

    @property
    def total_rx(self) -> Fraction:
        return sum(self.rx.values(), Fraction(0))

    def scaled(self, factor: Fraction) -> "LoadProfile":
        factor = Fraction(factor)
        return LoadProfile(
            {s: v * factor for s, v in self.tx.items()},
            {s: v * factor for s, v in self.rx.items()},
        )


def _require_server(structure: NetworkStructure, server: str) -> None:
    if server not in structure.servers:
        raise UnknownEntityError("server", server)


def _room_weights(structure: NetworkStructure, room: str) -> dict[str, Fraction]:
    """Per-server event rate of a room at unit message rate.

    Weight of server s is the sum of 1/|rooms(u)| over the room's members
    homed on s; members in zero rooms cannot occur (they are in this room).
    """
    weights: dict[str, Fraction] = {}
    for member in structure.rooms[room]:
        if member not in structure.users:
            continue
        home = structure.users[member]
        share = Fraction(1, structure.room_degree(member))
        weights[home] = weights.get(home, Fraction(0)) + share
    return weights


def pairwise_rate(
    structure: NetworkStructure, params: ModelParams, sender: str, receiver: str
) -> Fraction:
    """Average transaction rate from ``sender`` to ``receiver``.

    Sums, over the rooms shared by both servers, the message rate of the
    sender's users in those rooms (each user's rate splits evenly across
    their rooms).
    """
    _require_server(structure, sender)
    _require_server(structure, receiver)
    if sender == receiver:
        raise ValueError(f"sender and receiver must differ, got {sender!r} twice")
    shared = structure.rooms_of(sender) & structure.rooms_of(receiver)
    rate = Fraction(0)
    for room in shared:
        for member in structure.rooms[room]:
            if structure.users.get(member) == sender:
                rate += Fraction(1, structure.room_degree(member))
    return rate * params.message_rate


def traffic_matrix(structure: NetworkStructure, params: ModelParams) -> TrafficMatrix:
    """All pairwise send rates, accumulated room by room."""
    entries: dict[tuple[str, str], Fraction] = {}
    for room in structure.rooms:
        servers = structure.servers_of_room(room)
        if len(servers) < 2:
            continue
        weights = _room_weights(structure, room)
        for a in servers:
            wa = weights[a] * params.message_rate
            for b in servers:
                if b == a:
                    continue
                key = (a, b)
                entries[key] = entries.get(key, Fraction(0)) + wa
    return TrafficMatrix(structure.servers, MappingProxyType(entries))


def load_profile(
    structure: NetworkStructure, params: ModelParams, verify: bool = True
) -> LoadProfile:
    """Per-server send and receive rates.

    A server's send rate counts one transaction per foreign server per event
    from its own users in shared rooms; its receive rate counts one
    transaction per event from foreign users in shared rooms, independent of
    how those users are spread over servers.

    With ``verify`` the result is checked against the pairwise matrix
    marginals and the conservation identity; disagreement raises
    ``InternalConsistencyError`` (it would indicate a bug, not bad data).
    """
    lam = params.message_rate
    tx = {s: Fraction(0) for s in structure.servers}
    rx = {s: Fraction(0) for s in structure.servers}
    for room in structure.rooms:
        servers = structure.servers_of_room(room)
        if len(servers) < 2:
            continue
        weights = _room_weights(structure, room)
        room_total = sum(weights.values(), Fraction(0))
        foreign_servers = len(servers) - 1
        for s in servers:
            tx[s] += lam * weights[s] * foreign_servers
            rx[s] += lam * (room_total - weights[s])
    profile = LoadProfile(MappingProxyType(tx), MappingProxyType(rx))
    if verify:
        verify_profile(profile, traffic_matrix(structure, params))
    return profile


def verify_profile(profile: LoadProfile, matrix: TrafficMatrix) -> None:
    """Check a profile against matrix marginals and conservation; raise on mismatch."""
    if dict(profile.tx) != matrix.tx_totals() or dict(profile.rx) != matrix.rx_totals():
        raise InternalConsistencyError("per-server loads disagree with pairwise matrix marginals")
    if profile.total_tx != profile.total_rx:
        raise InternalConsistencyError("total sent and total received rates differ")


def split_user(structure: NetworkStructure, user: str) -> NetworkStructure:
    """Move ``user`` onto a fresh single-user server; memberships unchanged.

    Models one user of a large server migrating to a personal homeserver.
    The new server id is the user id behind a reserved prefix; the input
    structure is not modified.
    """
    if user not in structure.users:
        raise UnknownEntityError("user", user)
    new_server = SPLIT_SERVER_PREFIX + user
    if new_server in structure.servers:
        raise ValueError(f"server id {new_server!r} already exists")
    users = dict(structure.users)
    users[user] = new_server
    return NetworkStructure(structure.servers | {new_server}, users, structure.rooms)


def full_decentralization(structure: NetworkStructure) -> NetworkStructure:
    """Re-home every user onto its own dedicated server.

    The result has exactly one server per user (original servers are
    dropped); room memberships are unchanged.
    """
    users = {u: SPLIT_SERVER_PREFIX + u for u in structure.users}
    return NetworkStructure(set(users.values()), users, structure.rooms)
