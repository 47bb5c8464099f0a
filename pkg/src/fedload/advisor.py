"""Per-room mechanism selection.

For each room the advisor evaluates candidate mechanisms against a load
objective and picks the best, so a federation can broadcast in small rooms
and gossip in large many-server rooms instead of using one mechanism
everywhere.

Two objectives are supported.  ``min-max-server-load`` minimizes the worst
per-server cost (tx + rx) that any single event can inflict, over all
possible origin servers — the bottleneck measure that makes relaying
attractive in rooms with many servers.  ``min-total-transactions`` minimizes
the expected number of transmissions per event.  Gossip costs are estimated
by seeded sampling, so recommendations stay deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .errors import LocalRoomError, UnknownEntityError
from .loadmodel import ModelParams, _room_weights
from .mechanisms import Gossip, Hub, MechanismSpec, mechanism_label
from .rng import Splitmix64
from .sim.core import per_event_cost, per_event_cost_hub, select_hub
from .structure import NetworkStructure

OBJECTIVES = ("min-max-server-load", "min-total-transactions")


@dataclass(frozen=True)
class RoomCost:
    """Expected cost of running one mechanism in one room."""

    room: str
    mechanism: MechanismSpec
    event_rate: Fraction
    tx_rate: Mapping[str, Fraction]
    rx_rate: Mapping[str, Fraction]
    max_event_load: Fraction
    mean_total_per_event: Fraction
    estimate_halfwidth: Mapping[str, float] | None = None  # gossip only, 95% CI

    @property
    def total_tx_rate(self) -> Fraction:
        return sum(self.tx_rate.values(), Fraction(0))

    def objective_value(self, objective: str) -> Fraction:
        if objective == "min-max-server-load":
            return self.max_event_load
        if objective == "min-total-transactions":
            return self.mean_total_per_event
        raise ValueError(f"unknown objective {objective!r}; choose from {OBJECTIVES}")


def _event_costs_per_origin(
    structure: NetworkStructure,
    room: str,
    servers: Sequence[str],
    mech: MechanismSpec,
    eval_seed: int,
    samples: int,
) -> tuple[dict[str, dict[str, tuple[Fraction, Fraction]]], Fraction, dict[str, float] | None]:
    """Per-origin expected per-event (tx, rx) increments.

    Exact for deterministic mechanisms; for gossip, the mean over ``samples``
    seeded runs per origin (an exact rational of the observed tallies).
    Returns (costs[origin][server], worst single-event load, CI halfwidths).
    """
    per_origin: dict[str, dict[str, tuple[Fraction, Fraction]]] = {}
    worst = Fraction(0)
    if not isinstance(mech, Gossip):
        hub = select_hub(structure, room) if isinstance(mech, Hub) else None
        for origin in servers:
            if hub is not None:
                cost = per_event_cost_hub(servers, origin, hub)
            else:
                cost = per_event_cost(servers, origin, mech)
            per_origin[origin] = {s: (Fraction(t), Fraction(r)) for s, (t, r) in cost.items()}
            worst = max(worst, max(Fraction(t + r) for t, r in cost.values()))
        return per_origin, worst, None

    seed_rng = Splitmix64(eval_seed, stream=997)
    sums_sq: dict[str, float] = {s: 0.0 for s in servers}
    count = len(servers) * samples
    for origin in servers:
        tallies = {s: [0, 0] for s in servers}
        for _ in range(samples):
            cost = per_event_cost(servers, origin, mech, seed=seed_rng.next_u64())
            for s, (t, r) in cost.items():
                tallies[s][0] += t
                tallies[s][1] += r
                sums_sq[s] += float(t + r) ** 2
                worst = max(worst, Fraction(t + r))
        per_origin[origin] = {
            s: (Fraction(t, samples), Fraction(r, samples)) for s, (t, r) in tallies.items()
        }
    halfwidth = {}
    for s in servers:
        mean = sum(float(t + r) for t, r in (per_origin[o][s] for o in servers)) / len(servers)
        variance = max(sums_sq[s] / count - mean * mean, 0.0)
        halfwidth[s] = 1.96 * (variance / count) ** 0.5
    return per_origin, worst, halfwidth


def expected_room_cost(
    structure: NetworkStructure,
    params: ModelParams,
    room: str,
    mech: MechanismSpec,
    eval_seed: int = 0,
    samples: int = 200,
) -> RoomCost:
    """Expected per-server (tx, rx) rates for running ``mech`` in ``room``.

    Each server originates events at the combined split rate of its users in
    the room; the mechanism's per-event increments are weighted by those
    origin rates.  With full mesh this reproduces the analytical per-room
    load exactly.
    """
    if room not in structure.rooms:
        raise UnknownEntityError("room", room)
    servers = sorted(structure.servers_of_room(room))
    if len(servers) < 2:
        raise LocalRoomError(f"room {room!r} is not federated")
    rho = {
        s: w * params.message_rate for s, w in _room_weights(structure, room).items()
    }
    event_rate = sum(rho.values(), Fraction(0))
    per_origin, worst, halfwidth = _event_costs_per_origin(
        structure, room, servers, mech, eval_seed, samples
    )
    tx_rate = {s: Fraction(0) for s in servers}
    rx_rate = {s: Fraction(0) for s in servers}
    mean_total = Fraction(0)
    for origin in servers:
        for s, (t, r) in per_origin[origin].items():
            tx_rate[s] += rho[origin] * t
            rx_rate[s] += rho[origin] * r
            mean_total += rho[origin] * t
    return RoomCost(
        room=room,
        mechanism=mech,
        event_rate=event_rate,
        tx_rate=tx_rate,
        rx_rate=rx_rate,
        max_event_load=worst,
        mean_total_per_event=mean_total / event_rate,
        estimate_halfwidth=halfwidth,
    )


@dataclass(frozen=True)
class MechanismAssignment:
    """Chosen mechanism per federated room, with the cost evidence."""

    objective: str
    rooms: Mapping[str, MechanismSpec]
    costs: Mapping[str, RoomCost]
    objective_values: Mapping[str, tuple[tuple[str, Fraction], ...]]


def recommend(
    structure: NetworkStructure,
    params: ModelParams,
    rooms: Iterable[str],
    candidates: Sequence[MechanismSpec],
    objective: str = "min-max-server-load",
    eval_seed: int = 0,
    samples: int = 200,
) -> MechanismAssignment:
    """Pick, per room, the candidate minimizing the objective.

    Ties go to the earlier candidate in the list.  Rooms must be federated;
    the candidate list must not be empty.
    """
    candidates = list(candidates)
    if not candidates:
        raise ValueError("candidate list must not be empty")
    if objective not in OBJECTIVES:
        raise ValueError(f"unknown objective {objective!r}; choose from {OBJECTIVES}")
    chosen: dict[str, MechanismSpec] = {}
    chosen_cost: dict[str, RoomCost] = {}
    values: dict[str, tuple[tuple[str, Fraction], ...]] = {}
    for room in sorted(set(rooms)):
        best: tuple[Fraction, int] | None = None
        room_values = []
        room_costs = []
        for idx, mech in enumerate(candidates):
            cost = expected_room_cost(
                structure, params, room, mech, eval_seed=eval_seed, samples=samples
            )
            value = cost.objective_value(objective)
            room_values.append((mechanism_label(mech), value))
            room_costs.append(cost)
            if best is None or value < best[0]:
                best = (value, idx)
        chosen[room] = candidates[best[1]]
        chosen_cost[room] = room_costs[best[1]]
        values[room] = tuple(room_values)
    return MechanismAssignment(objective, chosen, chosen_cost, values)
