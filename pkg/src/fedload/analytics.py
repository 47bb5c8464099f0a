"""Descriptive statistics of a structure and cumulative load fractions.

Rank tables order entities ascending by a primary and a secondary count
(ties broken by id, so output is byte-stable).  Histograms use half-decade
bins with edges at powers 10^(k/2); bin membership is decided in exact
integer arithmetic, never via floating-point logarithms.  Cumulative series
normalize each quantity by its own total and accumulate in rank order, in
exact rational arithmetic, so every series ends at exactly 1.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

from .errors import InternalConsistencyError, MismatchedLoadError
from .loadmodel import LoadProfile
from .structure import NetworkStructure


@dataclass(frozen=True)
class RankRow:
    rank: int
    entity: str
    primary: int
    secondary: int


@dataclass(frozen=True)
class RankTable:
    primary_label: str
    secondary_label: str
    rows: tuple[RankRow, ...]


def server_rank_table(structure: NetworkStructure) -> RankTable:
    """Servers ranked ascending by user count, then room count, then id."""
    keyed = sorted(
        (len(structure.users_of(s)), len(structure.rooms_of(s)), s) for s in structure.servers
    )
    rows = tuple(
        RankRow(i, server, users, rooms) for i, (users, rooms, server) in enumerate(keyed, 1)
    )
    return RankTable("users", "rooms", rows)


def room_rank_table(structure: NetworkStructure) -> RankTable:
    """Rooms ranked ascending by server count, then user count, then id."""
    keyed = sorted(
        (len(structure.servers_of_room(r)), len(structure.rooms[r]), r) for r in structure.rooms
    )
    rows = tuple(
        RankRow(i, room, servers, users) for i, (servers, users, room) in enumerate(keyed, 1)
    )
    return RankTable("servers", "users", rows)


@dataclass(frozen=True)
class HistogramBin:
    lower: float
    upper: float
    count: int


@dataclass(frozen=True)
class LogHistogram:
    bins: tuple[HistogramBin, ...]

    @property
    def total(self) -> int:
        return sum(b.count for b in self.bins)


def _half_decade_index(value: int) -> int:
    # value is in [10^(k/2), 10^((k+1)/2)) iff value^2 is in [10^k, 10^(k+1)),
    # i.e. k is the number of decimal digits of value^2 minus one.  Exact in
    # integers; lower edges are inclusive.
    return len(str(value * value)) - 1


def log_histogram(values: Iterable[int]) -> LogHistogram:
    """Counts per half-order-of-magnitude bin; values must be integers >= 1."""
    counts: dict[int, int] = {}
    for v in values:
        if not isinstance(v, int) or isinstance(v, bool) or v < 1:
            raise ValueError(f"histogram values must be integers >= 1, got {v!r}")
        k = _half_decade_index(v)
        counts[k] = counts.get(k, 0) + 1
    if not counts:
        return LogHistogram(())
    kmax = max(counts)
    bins = tuple(
        HistogramBin(10.0 ** (k / 2), 10.0 ** ((k + 1) / 2), counts.get(k, 0))
        for k in range(kmax + 1)
    )
    return LogHistogram(bins)


@dataclass(frozen=True)
class CumulativeRow:
    """Per-server shares of each quantity and their running totals."""

    rank: int
    server: str
    users: int
    users_share: Fraction
    tx_share: Fraction
    rx_share: Fraction
    sum_share: Fraction
    users_cum: Fraction
    tx_cum: Fraction
    rx_cum: Fraction
    sum_cum: Fraction


@dataclass(frozen=True)
class CumulativeSeries:
    rows: tuple[CumulativeRow, ...]
    total_tx: Fraction
    total_rx: Fraction


def cumulative_fractions(load: LoadProfile, structure: NetworkStructure) -> CumulativeSeries:
    """Rank-ordered cumulative fractions of users, tx, rx and tx+rx.

    Servers are ordered ascending by user count, then by send rate, then by
    id.  Each quantity is normalized by its own total (the combined series
    by total tx + total rx), so the curves are comparable but a combined
    value can sit below the rx value at the same rank.
    """
    if set(load.tx) != structure.servers or set(load.rx) != structure.servers:
        raise MismatchedLoadError("load profile servers do not match the structure")
    total_tx = load.total_tx
    total_rx = load.total_rx
    if total_tx != total_rx:
        raise InternalConsistencyError("total tx and rx differ; profile is inconsistent")
    total_users = len(structure.users)
    if total_users == 0:
        raise ValueError("cumulative fractions are undefined without users")
    if total_tx == 0:
        raise ValueError("cumulative fractions are undefined for an all-local structure")
    order = sorted(
        (len(structure.users_of(s)), load.tx[s], s) for s in structure.servers
    )
    total_sum = total_tx + total_rx
    rows = []
    cum_u = cum_tx = cum_rx = cum_sum = Fraction(0)
    for rank, (users, _, server) in enumerate(order, 1):
        share_u = Fraction(users, total_users)
        share_tx = load.tx[server] / total_tx
        share_rx = load.rx[server] / total_rx
        share_sum = load.sum_of(server) / total_sum
        cum_u += share_u
        cum_tx += share_tx
        cum_rx += share_rx
        cum_sum += share_sum
        rows.append(
            CumulativeRow(
                rank, server, users, share_u, share_tx, share_rx, share_sum,
                cum_u, cum_tx, cum_rx, cum_sum,
            )
        )
    return CumulativeSeries(tuple(rows), total_tx, total_rx)


@dataclass(frozen=True)
class SummaryConfig:
    """Cut points for the share statistics (defaults mirror common reporting)."""

    top_server_share: Fraction = Fraction(1, 100)
    rooms_with_servers_below: tuple[int, ...] = (10,)
    rooms_with_users_below: tuple[int, ...] = (10,)
    rooms_with_users_at_most: tuple[int, ...] = (100,)
    users_with_rooms_at_most: tuple[int, ...] = (3,)


@dataclass(frozen=True)
class ShareStat:
    name: str
    value: Fraction


@dataclass(frozen=True)
class SummaryStats:
    servers: int
    users: int
    rooms: int
    shares: tuple[ShareStat, ...]

    def share(self, name: str) -> Fraction:
        for stat in self.shares:
            if stat.name == name:
                return stat.value
        raise KeyError(name)


def _share(num: int, den: int) -> Fraction:
    return Fraction(num, den) if den else Fraction(0)


def summary(structure: NetworkStructure, config: SummaryConfig = SummaryConfig()) -> SummaryStats:
    """Totals plus configured share statistics."""
    n_servers = len(structure.servers)
    n_users = len(structure.users)
    n_rooms = len(structure.rooms)
    shares: list[ShareStat] = []

    top_count = max(1, int(Fraction(n_servers) * config.top_server_share)) if n_servers else 0
    by_users = sorted(
        structure.servers, key=lambda s: (-len(structure.users_of(s)), s)
    )[:top_count]
    top_users = sum(len(structure.users_of(s)) for s in by_users)
    pct = float(config.top_server_share * 100)
    shares.append(
        ShareStat(f"users_on_top_{pct:g}pct_servers", _share(top_users, n_users))
    )

    server_counts = [len(structure.servers_of_room(r)) for r in structure.rooms]
    user_counts = [len(structure.rooms[r]) for r in structure.rooms]
    for n in config.rooms_with_servers_below:
        shares.append(
            ShareStat(
                f"rooms_with_servers_lt_{n}",
                _share(sum(1 for c in server_counts if c < n), n_rooms),
            )
        )
    for n in config.rooms_with_users_below:
        shares.append(
            ShareStat(
                f"rooms_with_users_lt_{n}",
                _share(sum(1 for c in user_counts if c < n), n_rooms),
            )
        )
    for n in config.rooms_with_users_at_most:
        shares.append(
            ShareStat(
                f"rooms_with_users_le_{n}",
                _share(sum(1 for c in user_counts if c <= n), n_rooms),
            )
        )
    for n in config.users_with_rooms_at_most:
        shares.append(
            ShareStat(
                f"users_with_rooms_le_{n}",
                _share(
                    sum(1 for u in structure.users if structure.room_degree(u) <= n), n_users
                ),
            )
        )
    return SummaryStats(n_servers, n_users, n_rooms, tuple(shares))
