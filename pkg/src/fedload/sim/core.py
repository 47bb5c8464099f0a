"""Seeded stochastic event simulation over a network structure.

Each event picks an eligible user uniformly (all users share one message
rate, so uniform user sampling is rate-proportional), then one of the user's
rooms uniformly, and distributes the event to the room's servers per the
room's mechanism.  Time is abstracted away: per-server counts over a fixed
event budget are distribution-equal to counting Poisson arrivals conditioned
on that budget.

Replications are independent PRNG streams derived from (seed, replication
index); results are deterministic for a given seed and identical across
kernel backends and any parallel schedule.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import numpy as np

from ..errors import (
    LocalRoomError,
    NoEligibleUsersError,
    NonFullMeshError,
    OriginNotInRoomError,
    UnassignedRoomError,
    UnknownEntityError,
)
from ..loadmodel import ModelParams, load_profile
from ..mechanisms import FullMesh, Gossip, Hub, MechanismSpec, SpanningTree
from ..rng import Splitmix64, stream_origin
from ..structure import NetworkStructure
from ._backend import run_events

Assignment = Mapping[str, MechanismSpec] | MechanismSpec | None

_KIND_CODE = {FullMesh: 0, Hub: 1, SpanningTree: 2, Gossip: 3}


@dataclass(frozen=True)
class SimReport:
    """Transaction counts of one replication."""

    seed: int
    replication: int
    events: int
    tx: Mapping[str, int]
    rx: Mapping[str, int]
    room_events: Mapping[str, int]
    incomplete_deliveries: int = 0

    @property
    def total_tx(self) -> int:
        return sum(self.tx.values())

    @property
    def total_rx(self) -> int:
        return sum(self.rx.values())


def resolve_assignment(
    structure: NetworkStructure, assignment: Assignment
) -> dict[str, MechanismSpec]:
    """Mechanism per federated room; local rooms take no mechanism.

    ``None`` means full mesh everywhere.  A single spec applies to every
    federated room.  A mapping must name only declared rooms and must cover
    every federated room; entries for local rooms are ignored.
    """
    federated = {r for r in structure.rooms if len(structure.servers_of_room(r)) > 1}
    if assignment is None:
        assignment = FullMesh()
    if isinstance(assignment, (FullMesh, Hub, SpanningTree, Gossip)):
        return {r: assignment for r in federated}
    resolved: dict[str, MechanismSpec] = {}
    for room in assignment:
        if room not in structure.rooms:
            raise UnknownEntityError("room", room)
    for room in federated:
        if room not in assignment:
            raise UnassignedRoomError(room)
        resolved[room] = assignment[room]
    return resolved


def _hub_position(structure: NetworkStructure, room: str, room_servers: Sequence[str]) -> int:
    counts: dict[str, int] = {}
    for member in structure.rooms[room]:
        home = structure.users.get(member)
        if home is not None:
            counts[home] = counts.get(home, 0) + 1
    best = min(room_servers, key=lambda s: (-counts.get(s, 0), s))
    return room_servers.index(best)


class _Compiled:
    """Array form of (structure, assignment) consumed by the kernels."""

    def __init__(self, structure: NetworkStructure, assignment: Assignment):
        mechanisms = resolve_assignment(structure, assignment)
        self.server_ids: list[str] = sorted(structure.servers)
        self.room_ids: list[str] = sorted(structure.rooms)
        server_index = {s: i for i, s in enumerate(self.server_ids)}
        room_index = {r: i for i, r in enumerate(self.room_ids)}

        eligible = sorted(u for u in structure.users if structure.room_degree(u) > 0)
        self.n_eligible = len(eligible)
        self.user_home = np.array(
            [server_index[structure.users[u]] for u in eligible], dtype=np.int32
        )
        uroom_off = [0]
        uroom_ids: list[int] = []
        for u in eligible:
            uroom_ids.extend(sorted(room_index[r] for r in structure.rooms_of(u)))
            uroom_off.append(len(uroom_ids))
        self.uroom_off = np.array(uroom_off, dtype=np.int64)
        self.uroom_ids = np.array(uroom_ids, dtype=np.int32)

        rsrv_off = [0]
        rsrv_ids: list[int] = []
        n_rooms = len(self.room_ids)
        self.rkind = np.zeros(n_rooms, dtype=np.int8)
        self.rparam = np.zeros(n_rooms, dtype=np.int32)
        self.rcap = np.full(n_rooms, -1, dtype=np.int64)
        self.rhub = np.full(n_rooms, -1, dtype=np.int32)
        max_room = 1
        for i, room in enumerate(self.room_ids):
            room_servers = sorted(structure.servers_of_room(room))
            rsrv_ids.extend(server_index[s] for s in room_servers)
            rsrv_off.append(len(rsrv_ids))
            max_room = max(max_room, len(room_servers))
            spec = mechanisms.get(room)
            if spec is None:
                continue  # local room, kernel skips it
            self.rkind[i] = _KIND_CODE[type(spec)]
            if isinstance(spec, SpanningTree):
                self.rparam[i] = spec.k
            elif isinstance(spec, Gossip):
                self.rparam[i] = spec.fanout
                self.rcap[i] = -1 if spec.rounds is None else spec.rounds
            elif isinstance(spec, Hub):
                self.rhub[i] = _hub_position(structure, room, room_servers)
        self.rsrv_off = np.array(rsrv_off, dtype=np.int64)
        self.rsrv_ids = np.array(rsrv_ids, dtype=np.int32)
        self.max_room = max_room


def simulate(
    structure: NetworkStructure,
    params: ModelParams,
    assignment: Assignment = None,
    n_events: int = 0,
    seed: int = 0,
    replications: int = 1,
) -> list[SimReport]:
    """Run ``replications`` independent simulations of ``n_events`` events each.

    Deterministic for fixed (structure, assignment, n_events, seed,
    replications).  ``params`` carries the per-user message rate; with equal
    rates it only affects how counts are normalized downstream, not the
    event sampling itself.
    """
    if n_events < 0:
        raise ValueError("n_events must be >= 0")
    if replications < 1:
        raise ValueError("replications must be >= 1")
    compiled = _Compiled(structure, assignment)
    if compiled.n_eligible == 0 and n_events > 0:
        raise NoEligibleUsersError("no user is a member of any room; cannot originate events")
    n_servers = len(compiled.server_ids)
    n_rooms = len(compiled.room_ids)
    reports = []
    for rep in range(replications):
        tx = np.zeros(n_servers, dtype=np.int64)
        rx = np.zeros(n_servers, dtype=np.int64)
        room_events = np.zeros(n_rooms, dtype=np.int64)
        peers = np.zeros(compiled.max_room, dtype=np.int32)
        informed = np.zeros(compiled.max_room, dtype=np.uint8)
        incomplete = run_events(
            n_events,
            stream_origin(seed, rep),
            compiled.user_home,
            compiled.uroom_off,
            compiled.uroom_ids,
            compiled.rsrv_off,
            compiled.rsrv_ids,
            compiled.rkind,
            compiled.rparam,
            compiled.rcap,
            compiled.rhub,
            tx,
            rx,
            room_events,
            peers,
            informed,
        )
        reports.append(
            SimReport(
                seed=seed,
                replication=rep,
                events=n_events,
                tx={s: int(tx[i]) for i, s in enumerate(compiled.server_ids)},
                rx={s: int(rx[i]) for i, s in enumerate(compiled.server_ids)},
                room_events={r: int(room_events[i]) for i, r in enumerate(compiled.room_ids)},
                incomplete_deliveries=int(incomplete),
            )
        )
    return reports


def per_event_cost(
    room_servers: Iterable[str],
    origin: str,
    mech: MechanismSpec,
    seed: int = 0,
) -> dict[str, tuple[int, int]]:
    """Per-server (tx, rx) increments of a single event.

    Reference implementation of the mechanism semantics, shared by the
    advisor; the kernels implement the same rules on index arrays.  Gossip
    draws from a stream seeded by ``seed``; the other mechanisms are
    deterministic.
    """
    servers = sorted(set(room_servers))
    if len(servers) < 2:
        raise LocalRoomError("per-event cost requires at least two servers")
    if origin not in servers:
        raise OriginNotInRoomError(f"origin {origin!r} is not in the room")
    m = len(servers)
    p = servers.index(origin)
    cost = {s: [0, 0] for s in servers}

    if isinstance(mech, FullMesh):
        cost[origin][0] += m - 1
        for s in servers:
            if s != origin:
                cost[s][1] += 1
    elif isinstance(mech, Hub):
        raise ValueError("hub cost needs the room's hub; use per_event_cost_hub")
    elif isinstance(mech, SpanningTree):
        arranged = list(servers)
        arranged[0], arranged[p] = arranged[p], arranged[0]
        for j in range(m):
            first = mech.k * j + 1
            if first >= m:
                break
            for c in range(first, min(first + mech.k, m)):
                cost[arranged[j]][0] += 1
                cost[arranged[c]][1] += 1
    elif isinstance(mech, Gossip):
        rng = Splitmix64(seed)
        informed = [False] * m
        informed[p] = True
        n_informed = 1
        rounds_done = 0
        f_eff = min(mech.fanout, m - 1)
        cap = -1 if mech.rounds is None else mech.rounds
        while n_informed < m and (cap < 0 or rounds_done < cap):
            senders = [i for i in range(m) if informed[i]]
            newly: list[int] = []
            for sender in senders:
                peers = [q for q in range(m) if q != sender]
                for j in range(f_eff):
                    t = j + rng.below(len(peers) - j)
                    peers[j], peers[t] = peers[t], peers[j]
                    target = peers[j]
                    cost[servers[sender]][0] += 1
                    cost[servers[target]][1] += 1
                    if not informed[target] and target not in newly:
                        newly.append(target)
            for target in newly:
                informed[target] = True
                n_informed += 1
            rounds_done += 1
    else:
        raise TypeError(f"not a mechanism spec: {mech!r}")
    return {s: (t, r) for s, (t, r) in cost.items()}


def per_event_cost_hub(
    room_servers: Iterable[str], origin: str, hub: str
) -> dict[str, tuple[int, int]]:
    """Hub-mechanism variant of :func:`per_event_cost` (hub chosen per room)."""
    servers = sorted(set(room_servers))
    if len(servers) < 2:
        raise LocalRoomError("per-event cost requires at least two servers")
    if origin not in servers:
        raise OriginNotInRoomError(f"origin {origin!r} is not in the room")
    if hub not in servers:
        raise UnknownEntityError("server", hub)
    m = len(servers)
    cost = {s: [0, 0] for s in servers}
    if origin == hub:
        cost[origin][0] += m - 1
        for s in servers:
            if s != origin:
                cost[s][1] += 1
    else:
        cost[origin][0] += 1
        cost[hub][1] += 1
        cost[hub][0] += m - 2
        for s in servers:
            if s not in (origin, hub):
                cost[s][1] += 1
    return {s: (t, r) for s, (t, r) in cost.items()}


def select_hub(structure: NetworkStructure, room: str) -> str:
    """Hub of a room: most users in the room, ties by smallest id."""
    room_servers = sorted(structure.servers_of_room(room))
    if not room_servers:
        raise LocalRoomError(f"room {room!r} has no servers")
    return room_servers[_hub_position(structure, room, room_servers)]


@dataclass(frozen=True)
class CrossCheckRow:
    server: str
    quantity: str  # "tx" or "rx"
    expected: Fraction
    observed_mean: float
    rel_error: float
    within_tolerance: bool
    degenerate: bool


@dataclass(frozen=True)
class CrossCheckTable:
    tolerance: float
    rows: tuple[CrossCheckRow, ...]

    @property
    def ok(self) -> bool:
        return all(r.within_tolerance for r in self.rows)


def cross_check(
    structure: NetworkStructure,
    params: ModelParams,
    reports: Sequence[SimReport],
    assignment: Assignment = None,
    tolerance: float = 0.01,
) -> CrossCheckTable:
    """Compare simulated counts with the analytical model, per server.

    Only full-mesh assignments can be checked (the analytical model covers
    nothing else).  Expected counts are the analytical rates scaled by the
    simulated time horizon ``n_events / (eligible_users * message_rate)``.
    Rows with zero expectation are flagged degenerate; they pass only when
    the observation is also zero.
    """
    resolved = resolve_assignment(structure, assignment)
    for room, spec in resolved.items():
        if not isinstance(spec, FullMesh):
            raise NonFullMeshError(f"room {room!r} uses {type(spec).__name__}, not full mesh")
    if not reports:
        raise ValueError("no reports to check")
    events = {r.events for r in reports}
    if len(events) != 1:
        raise ValueError("reports have differing event counts")
    n_events = events.pop()
    eligible = sum(1 for u in structure.users if structure.room_degree(u) > 0)
    profile = load_profile(structure, params, verify=False)
    if eligible:
        horizon = Fraction(n_events, eligible) / params.message_rate
    else:
        horizon = Fraction(0)
    n = len(reports)
    rows = []
    for server in sorted(structure.servers):
        for quantity, rates, counts in (
            ("tx", profile.tx, [r.tx[server] for r in reports]),
            ("rx", profile.rx, [r.rx[server] for r in reports]),
        ):
            expected = rates[server] * horizon
            mean = sum(counts) / n
            if expected == 0:
                degenerate = True
                rel = 0.0 if mean == 0 else float("inf")
            else:
                degenerate = False
                rel = abs(mean - float(expected)) / float(expected)
            rows.append(
                CrossCheckRow(
                    server, quantity, expected, mean, rel, rel <= tolerance, degenerate
                )
            )
    return CrossCheckTable(tolerance, tuple(rows))
