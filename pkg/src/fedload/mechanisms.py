"""Group-communication mechanism specifications.

A mechanism decides how one event originating at a server reaches the other
servers of a room.  Full mesh is the status quo (origin sends one
transaction per other server); the hub, spanning-tree and gossip variants
trade origin load for forwarding hops.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

FULL_MESH = "full_mesh"
HUB = "hub"
SPANNING_TREE = "spanning_tree"
GOSSIP = "gossip"


@dataclass(frozen=True)
class FullMesh:
    """Origin sends one transaction to every other server of the room."""

    kind: str = FULL_MESH

    def __post_init__(self):
        if self.kind != FULL_MESH:
            raise ValueError("kind is fixed")


@dataclass(frozen=True)
class Hub:
    """Origin sends to a per-room hub which forwards to everyone else.

    The only selection rule is ``most-users``: the server with the most
    users in the room, ties broken by lexicographically smallest id.
    """

    rule: str = "most-users"
    kind: str = HUB

    def __post_init__(self):
        if self.kind != HUB:
            raise ValueError("kind is fixed")
        if self.rule != "most-users":
            raise ValueError(f"unknown hub selection rule {self.rule!r}")


@dataclass(frozen=True)
class SpanningTree:
    """Forwarding along a complete k-ary tree over the room's sorted servers.

    The tree is laid over the lexicographically sorted server list with the
    origin swapped to the front, so it is deterministic per (room, origin).
    """

    k: int = 2
    kind: str = SPANNING_TREE

    def __post_init__(self):
        if self.kind != SPANNING_TREE:
            raise ValueError("kind is fixed")
        if self.k < 2:
            raise ValueError(f"tree arity must be >= 2, got {self.k}")


@dataclass(frozen=True)
class Gossip:
    """Synchronous push rounds: every informed server pushes to ``fanout``
    distinct peers per round; duplicate deliveries are real transactions.

    ``rounds`` caps the number of rounds; ``None`` keeps pushing until every
    server is informed (this terminates with probability one).
    """

    fanout: int = 2
    rounds: int | None = None
    kind: str = GOSSIP

    def __post_init__(self):
        if self.kind != GOSSIP:
            raise ValueError("kind is fixed")
        if self.fanout < 1:
            raise ValueError(f"fanout must be >= 1, got {self.fanout}")
        if self.rounds is not None and self.rounds < 1:
            raise ValueError(f"round cap must be >= 1 or None, got {self.rounds}")


MechanismSpec = Union[FullMesh, Hub, SpanningTree, Gossip]


def mechanism_label(spec: MechanismSpec) -> str:
    """Compact text form used in CSV output and on the command line."""
    if isinstance(spec, FullMesh):
        return FULL_MESH
    if isinstance(spec, Hub):
        return HUB
    if isinstance(spec, SpanningTree):
        return f"{SPANNING_TREE}:k={spec.k}"
    if isinstance(spec, Gossip):
        cap = "inf" if spec.rounds is None else str(spec.rounds)
        return f"{GOSSIP}:f={spec.fanout},rounds={cap}"
    raise TypeError(f"not a mechanism spec: {spec!r}")


def parse_mechanism(text: str) -> MechanismSpec:
    """Inverse of :func:`mechanism_label`; parameters may be omitted."""
    name, _, params = text.strip().partition(":")
    fields: dict[str, str] = {}
    if params:
        for item in params.split(","):
            key, _, value = item.partition("=")
            if not value:
                raise ValueError(f"bad mechanism parameter {item!r} in {text!r}")
            fields[key.strip()] = value.strip()
    if name == FULL_MESH:
        if fields:
            raise ValueError("full_mesh takes no parameters")
        return FullMesh()
    if name == HUB:
        spec = Hub(rule=fields.pop("rule", "most-users"))
        return _no_extra(fields, spec)
    if name == SPANNING_TREE:
        spec = SpanningTree(k=int(fields.pop("k", 2)))
        return _no_extra(fields, spec)
    if name == GOSSIP:
        cap_text = fields.pop("rounds", "inf")
        cap = None if cap_text in ("inf", "none") else int(cap_text)
        spec = Gossip(fanout=int(fields.pop("f", fields.pop("fanout", 2))), rounds=cap)
        return _no_extra(fields, spec)
    raise ValueError(f"unknown mechanism {name!r}")


def _no_extra(fields: dict[str, str], spec: MechanismSpec) -> MechanismSpec:
    if fields:
        raise ValueError(f"unknown mechanism parameter(s) {sorted(fields)}")
    return spec
