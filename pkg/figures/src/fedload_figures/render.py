"""Figure rendering over fedload CSV artifacts.

Strictly presentation-layer: every number comes from the input CSV (exact
fraction literals are parsed with ``fractions.Fraction``), nothing is
recomputed or re-sorted, and inputs are never modified.  A CSV whose header
does not match the figure kind raises ``SchemaMismatchError`` naming the
expected and found columns.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

KINDS = ("server-rank", "room-rank", "histogram", "cumulative", "top-servers-bar")

_CUMULATIVE_COLUMNS = [
    "rank", "server_id", "users",
    "users_share", "tx_share", "rx_share", "sum_share",
    "users_cum", "tx_cum", "rx_cum", "sum_cum",
]

SCHEMAS = {
    "server-rank": ["rank", "server_id", "users", "rooms"],
    "room-rank": ["rank", "room_id", "servers", "users"],
    "histogram": ["bin_lower", "bin_upper", "count"],
    "cumulative": _CUMULATIVE_COLUMNS,
    "top-servers-bar": _CUMULATIVE_COLUMNS,  # same input artifact
}


class SchemaMismatchError(ValueError):
    """Input CSV columns do not match the figure kind."""

    def __init__(self, kind: str, expected: list[str], found: list[str]):
        missing = [c for c in expected if c not in found]
        super().__init__(
            f"{kind}: expected columns {expected}, found {found}"
            + (f"; missing {missing}" if missing else "")
        )
        self.expected = expected
        self.found = found
        self.missing = missing


@dataclass(frozen=True)
class FigureRequest:
    kind: str
    input_path: str | Path
    output_path: str | Path
    log_scale: bool = True
    top_count: int = 4  # top-servers-bar only

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown figure kind {self.kind!r}; choose from {KINDS}")


def read_table(path: str | Path, kind: str) -> list[dict[str, str]]:
    """Rows of a CSV artifact, in file order, after checking the schema."""
    with open(path, newline="", encoding="utf-8") as f:
        reader = csv.reader(f)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaMismatchError(kind, SCHEMAS[kind], []) from None
        if header != SCHEMAS[kind]:
            raise SchemaMismatchError(kind, SCHEMAS[kind], header)
        return [dict(zip(header, row)) for row in reader]


def _number(text: str) -> float:
    # artifacts carry ints, repr floats and exact fraction literals
    return float(Fraction(text))


def _new_axes():
    fig, ax = plt.subplots(figsize=(8, 4.5), dpi=110)
    return fig, ax


def _finish(fig, ax, request: FigureRequest, title: str) -> Path:
    ax.set_title(title)
    ax.grid(True, which="both", alpha=0.3)
    fig.tight_layout()
    out = Path(request.output_path)
    fig.savefig(out)
    plt.close(fig)
    return out


def _render_rank(request: FigureRequest, entity: str, primary: str, secondary: str) -> Path:
    rows = read_table(request.input_path, request.kind)
    ranks = [int(r["rank"]) for r in rows]
    fig, ax = _new_axes()
    ax.step(ranks, [_number(r[primary]) for r in rows], where="mid", label=primary)
    ax.step(ranks, [_number(r[secondary]) for r in rows], where="mid", label=secondary)
    ax.set_xlabel(f"{entity} rank (ascending)")
    ax.set_ylabel("count")
    if request.log_scale:
        ax.set_yscale("log")
    ax.legend()
    return _finish(fig, ax, request, f"{primary} and {secondary} per {entity}")


def _render_histogram(request: FigureRequest) -> Path:
    rows = read_table(request.input_path, request.kind)
    fig, ax = _new_axes()
    lefts = [_number(r["bin_lower"]) for r in rows]
    widths = [_number(r["bin_upper"]) - _number(r["bin_lower"]) for r in rows]
    counts = [int(r["count"]) for r in rows]
    ax.bar(lefts, counts, width=widths, align="edge", edgecolor="black", alpha=0.7)
    ax.set_xlabel("value (half-decade bins)")
    ax.set_ylabel("count")
    if request.log_scale:
        ax.set_xscale("log")
    return _finish(fig, ax, request, "half-decade histogram")


def _render_cumulative(request: FigureRequest) -> Path:
    rows = read_table(request.input_path, request.kind)
    ranks = [int(r["rank"]) for r in rows]
    fig, ax = _new_axes()
    for column, style in (
        ("users_cum", ":"), ("tx_cum", "-"), ("rx_cum", "--"), ("sum_cum", "-.")
    ):
        ax.plot(ranks, [_number(r[column]) for r in rows], style, label=column)
    ax.set_xlabel("server rank (ascending by users, then tx)")
    ax.set_ylabel("cumulative fraction")
    ax.set_ylim(0.0, 1.05)
    ax.legend()
    return _finish(fig, ax, request, "cumulative fraction of load per server")


def _render_top_servers(request: FigureRequest) -> Path:
    rows = read_table(request.input_path, request.kind)
    top = rows[-request.top_count:] if len(rows) > request.top_count else rows
    top = list(reversed(top))  # largest first
    labels = [r["server_id"] for r in top]
    fig, ax = _new_axes()
    width = 0.27
    xs = range(len(top))
    for offset, column in ((-width, "tx_share"), (0.0, "rx_share"), (width, "sum_share")):
        ax.bar(
            [x + offset for x in xs],
            [100.0 * _number(r[column]) for r in top],
            width=width,
            label=column.replace("_share", ""),
        )
    ax.set_xticks(list(xs), labels, rotation=20)
    ax.set_xlabel("largest servers (by users, then tx)")
    ax.set_ylabel("share of total load [%]")
    ax.legend()
    return _finish(fig, ax, request, f"load share of the largest {len(top)} servers")


def render(request: FigureRequest) -> Path:
    """Render the requested figure; returns the written image path."""
    if request.kind == "server-rank":
        return _render_rank(request, "server", "users", "rooms")
    if request.kind == "room-rank":
        return _render_rank(request, "room", "servers", "users")
    if request.kind == "histogram":
        return _render_histogram(request)
    if request.kind == "cumulative":
        return _render_cumulative(request)
    return _render_top_servers(request)
