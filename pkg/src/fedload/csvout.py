"""CSV emitters for every analysis result.

All emitters write deterministic byte-identical output for equal inputs:
rows are sorted, floats are written with ``repr``, and exact rationals are
written as canonical fraction literals ("3", "1/2") so no precision is lost
in the artifact files.  Column schemas are documented in the README and
consumed by the separate figures package.
"""

from __future__ import annotations

import csv
from fractions import Fraction
from pathlib import Path
from typing import Sequence

from .advisor import MechanismAssignment
from .analytics import CumulativeSeries, LogHistogram, RankTable, SummaryStats
from .loadmodel import LoadProfile, TrafficMatrix
from .mechanisms import mechanism_label
from .sim.core import CrossCheckTable, SimReport
from .structure import ValidationReport


def _open(path):
    return open(path, "w", encoding="utf-8", newline="")


def _frac(value: Fraction) -> str:
    return str(value)


def write_rank_table(table: RankTable, path: str | Path, entity_label: str) -> None:
    """Columns: rank,<entity_label>,<primary>,<secondary>."""
    with _open(path) as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["rank", entity_label, table.primary_label, table.secondary_label])
        for row in table.rows:
            w.writerow([row.rank, row.entity, row.primary, row.secondary])


def write_histogram(hist: LogHistogram, path: str | Path) -> None:
    """Columns: bin_lower,bin_upper,count (half-decade bins, lower inclusive)."""
    with _open(path) as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["bin_lower", "bin_upper", "count"])
        for b in hist.bins:
            w.writerow([repr(b.lower), repr(b.upper), b.count])


def write_cumulative(series: CumulativeSeries, path: str | Path) -> None:
    """Columns: rank,server_id,users, per-server shares and running totals.

    Shares and cumulative values are exact fraction literals; the final
    cumulative value of every quantity is exactly 1.
    """
    with _open(path) as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(
            [
                "rank", "server_id", "users",
                "users_share", "tx_share", "rx_share", "sum_share",
                "users_cum", "tx_cum", "rx_cum", "sum_cum",
            ]
        )
        for r in series.rows:
            w.writerow(
                [
                    r.rank, r.server, r.users,
                    _frac(r.users_share), _frac(r.tx_share), _frac(r.rx_share),
                    _frac(r.sum_share),
                    _frac(r.users_cum), _frac(r.tx_cum), _frac(r.rx_cum), _frac(r.sum_cum),
                ]
            )


def write_load_profile(profile: LoadProfile, path: str | Path) -> None:
    """Columns: server_id,tx,rx,sum as exact fraction literals."""
    with _open(path) as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["server_id", "tx", "rx", "sum"])
        for server in sorted(profile.tx):
            w.writerow(
                [server, _frac(profile.tx[server]), _frac(profile.rx[server]),
                 _frac(profile.sum_of(server))]
            )


def write_traffic_matrix(matrix: TrafficMatrix, path: str | Path) -> None:
    """Columns: sender,receiver,rate; only nonzero pairs, sorted."""
    with _open(path) as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["sender", "receiver", "rate"])
        for (a, b) in sorted(matrix.entries):
            w.writerow([a, b, _frac(matrix.entries[(a, b)])])


def write_summary(stats: SummaryStats, path: str | Path) -> None:
    """Columns: metric,value,value_float (totals then share statistics)."""
    with _open(path) as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["metric", "value", "value_float"])
        w.writerow(["servers", stats.servers, repr(float(stats.servers))])
        w.writerow(["users", stats.users, repr(float(stats.users))])
        w.writerow(["rooms", stats.rooms, repr(float(stats.rooms))])
        for share in stats.shares:
            w.writerow([share.name, _frac(share.value), repr(float(share.value))])


def write_sim_reports(reports: Sequence[SimReport], path: str | Path) -> None:
    """Columns: replication,server_id,tx,rx."""
    with _open(path) as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["replication", "server_id", "tx", "rx"])
        for report in reports:
            for server in sorted(report.tx):
                w.writerow([report.replication, server, report.tx[server], report.rx[server]])


def write_sim_summary(reports: Sequence[SimReport], path: str | Path) -> None:
    """Columns: replication,events,total_tx,total_rx,incomplete_deliveries.

    ``incomplete_deliveries`` counts events that did not reach every room
    server before a gossip round cap; it is 0 for the other mechanisms and
    for uncapped gossip.
    """
    with _open(path) as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["replication", "events", "total_tx", "total_rx", "incomplete_deliveries"])
        for report in reports:
            w.writerow(
                [report.replication, report.events, report.total_tx, report.total_rx,
                 report.incomplete_deliveries]
            )


def write_room_events(reports: Sequence[SimReport], path: str | Path) -> None:
    """Columns: replication,room_id,events."""
    with _open(path) as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["replication", "room_id", "events"])
        for report in reports:
            for room in sorted(report.room_events):
                w.writerow([report.replication, room, report.room_events[room]])


def write_cross_check(table: CrossCheckTable, path: str | Path) -> None:
    """Columns: server_id,quantity,expected,observed_mean,rel_error,within_tolerance,degenerate."""
    with _open(path) as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(
            ["server_id", "quantity", "expected", "observed_mean",
             "rel_error", "within_tolerance", "degenerate"]
        )
        for r in table.rows:
            w.writerow(
                [r.server, r.quantity, _frac(r.expected), repr(r.observed_mean),
                 repr(r.rel_error), int(r.within_tolerance), int(r.degenerate)]
            )


def write_assignment(assignment: MechanismAssignment, path: str | Path) -> None:
    """Columns: room_id,mechanism,objective,objective_value."""
    with _open(path) as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["room_id", "mechanism", "objective", "objective_value"])
        for room in sorted(assignment.rooms):
            cost = assignment.costs[room]
            w.writerow(
                [room, mechanism_label(assignment.rooms[room]), assignment.objective,
                 _frac(cost.objective_value(assignment.objective))]
            )


def write_room_costs(assignment: MechanismAssignment, path: str | Path) -> None:
    """Columns: room_id,mechanism,server_id,tx_rate,rx_rate (chosen mechanism)."""
    with _open(path) as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["room_id", "mechanism", "server_id", "tx_rate", "rx_rate"])
        for room in sorted(assignment.rooms):
            cost = assignment.costs[room]
            for server in sorted(cost.tx_rate):
                w.writerow(
                    [room, mechanism_label(cost.mechanism), server,
                     _frac(cost.tx_rate[server]), _frac(cost.rx_rate[server])]
                )


def write_validation(report: ValidationReport, path: str | Path) -> None:
    """Columns: kind,invariant,subject,detail."""
    with _open(path) as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["kind", "invariant", "subject", "detail"])
        for v in report.violations:
            w.writerow(["violation", v.invariant, v.subject, v.detail])
        for v in report.warnings:
            w.writerow(["warning", v.invariant, v.subject, v.detail])
