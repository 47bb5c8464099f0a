"""Command-line interface.

Every subcommand reads a structure (or generator config), writes its CSV/JSON
artifacts into the output directory, and records a ``manifest.json`` with the
tool version, the full parameter set and SHA-256 digests of the inputs.
Identical invocations on identical inputs produce byte-identical artifacts.

Exit codes: 0 success, 1 data error (one machine-parseable line on stderr),
2 usage error.
"""

from __future__ import annotations

import functools
import hashlib
import json
import sys
from fractions import Fraction
from pathlib import Path

import click

from . import __version__, analytics, csvout, io, loadmodel
from .advisor import OBJECTIVES, recommend
from .errors import FedloadError, StructureInvalidError
from .generate import GeneratorConfig, Zipf, fit as fit_config, generate as generate_structure, load_config, save_config
from .mechanisms import FullMesh, parse_mechanism
from .sim import cross_check, simulate
from .structure import validate


def _digest(path: Path) -> str:
    return "sha256:" + hashlib.sha256(path.read_bytes()).hexdigest()


def _write_manifest(out_dir: Path, subcommand: str, parameters: dict, inputs: list[Path]) -> None:
    manifest = {
        "tool": "fedload",
        "version": __version__,
        "subcommand": subcommand,
        "parameters": parameters,
        "inputs": {str(p): _digest(p) for p in inputs},
    }
    (out_dir / "manifest.json").write_text(
        json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )


def _out_dir(path: str) -> Path:
    out = Path(path)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _parse_rate(text: str) -> Fraction:
    try:
        rate = Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise click.BadParameter(f"not a rational number: {text!r}") from exc
    if rate <= 0:
        raise click.BadParameter("message rate must be positive")
    return rate


def _handle_errors(f):
    @functools.wraps(f)
    def wrapper(*args, **kwargs):
        try:
            return f(*args, **kwargs)
        except FedloadError as exc:
            click.echo(f"error: {exc.code}: {exc}", err=True)
            sys.exit(1)

    return wrapper


input_argument = click.argument("input_path", type=click.Path(exists=True, dir_okay=False))
format_option = click.option(
    "--format", "fmt", default=io.FORMAT_AUTO,
    type=click.Choice([io.FORMAT_AUTO, io.FORMAT_CANONICAL, io.FORMAT_CSV]),
    help="Input format (default: by file suffix).",
)
out_option = click.option(
    "-o", "--out", "out", required=True, type=click.Path(file_okay=False),
    help="Output directory for artifacts and manifest.",
)
rate_option = click.option(
    "--lambda", "rate", default="1", show_default=True, metavar="RATIONAL",
    help="Per-user message rate, a rational literal like 3/2.",
)
seed_option = click.option(
    "--seed", default=0, show_default=True, envvar="FEDLOAD_SEED",
    help="PRNG seed (env fallback: FEDLOAD_SEED).",
)


@click.group()
@click.version_option(__version__, prog_name="fedload")
def main():
    """Network-load analysis for federated history-synchronization messaging."""


@main.command("validate")
@input_argument
@format_option
@out_option
@_handle_errors
def cmd_validate(input_path, fmt, out):
    """Check a structure file against the relational invariants."""
    out_dir = _out_dir(out)
    try:
        structure = io.load(input_path, fmt, check=False)
        report = validate(structure)
    except StructureInvalidError as exc:  # pre-structure conflicts (CSV homes)
        report = exc.report
    csvout.write_validation(report, out_dir / "validation.csv")
    _write_manifest(out_dir, "validate", {"format": fmt}, [Path(input_path)])
    if not report.ok:
        for v in report.violations:
            click.echo(f"violation: {v.invariant}: {v.detail}", err=True)
        click.echo(f"error: structure-invalid: {len(report.violations)} violation(s)", err=True)
        sys.exit(1)
    click.echo(f"ok: valid structure ({len(report.warnings)} warning(s))")


@main.command("stats")
@input_argument
@format_option
@out_option
@_handle_errors
def cmd_stats(input_path, fmt, out):
    """Rank tables, histograms and summary shares of a structure."""
    out_dir = _out_dir(out)
    structure = io.load(input_path, fmt)
    csvout.write_rank_table(
        analytics.server_rank_table(structure), out_dir / "server_rank.csv", "server_id"
    )
    csvout.write_rank_table(
        analytics.room_rank_table(structure), out_dir / "room_rank.csv", "room_id"
    )
    server_counts = [
        len(structure.servers_of_room(r)) for r in structure.rooms
        if structure.servers_of_room(r)
    ]
    user_counts = [len(m) for m in structure.rooms.values() if m]
    csvout.write_histogram(
        analytics.log_histogram(server_counts), out_dir / "room_servers_hist.csv"
    )
    csvout.write_histogram(analytics.log_histogram(user_counts), out_dir / "room_users_hist.csv")
    csvout.write_summary(analytics.summary(structure), out_dir / "summary.csv")
    _write_manifest(out_dir, "stats", {"format": fmt}, [Path(input_path)])
    click.echo(f"ok: wrote stats for {structure!r}")


@main.command("load")
@input_argument
@format_option
@out_option
@rate_option
@click.option("--matrix/--no-matrix", default=True, show_default=True,
              help="Also write the pairwise traffic matrix.")
@_handle_errors
def cmd_load(input_path, fmt, out, rate, matrix):
    """Analytical per-server load profile and cumulative fractions."""
    out_dir = _out_dir(out)
    structure = io.load(input_path, fmt)
    params = loadmodel.ModelParams(_parse_rate(rate))
    profile = loadmodel.load_profile(structure, params, verify=False)
    if matrix:
        pairwise = loadmodel.traffic_matrix(structure, params)
        loadmodel.verify_profile(profile, pairwise)  # one matrix build, reused
        csvout.write_traffic_matrix(pairwise, out_dir / "traffic_matrix.csv")
    elif profile.total_tx != profile.total_rx:
        raise loadmodel.InternalConsistencyError("total sent and received rates differ")
    csvout.write_load_profile(profile, out_dir / "load_profile.csv")
    if profile.total_tx > 0 and structure.users:
        csvout.write_cumulative(
            analytics.cumulative_fractions(profile, structure), out_dir / "cumulative.csv"
        )
    else:
        click.echo("note: no federated traffic; cumulative.csv not written")
    _write_manifest(
        out_dir, "load", {"format": fmt, "lambda": rate, "matrix": matrix}, [Path(input_path)]
    )
    click.echo(f"ok: total tx rate {profile.total_tx} = total rx rate {profile.total_rx}")


@main.command("simulate")
@input_argument
@format_option
@out_option
@rate_option
@seed_option
@click.option("--events", default=100_000, show_default=True, help="Events per replication.")
@click.option("--replications", default=1, show_default=True)
@click.option("--mechanism", default="full_mesh", show_default=True,
              help="Mechanism for every federated room, e.g. spanning_tree:k=2.")
@click.option("--cross-check/--no-cross-check", "check", default=None,
              help="Compare against the analytical model (default: only for full_mesh).")
@click.option("--tolerance", default=0.01, show_default=True,
              help="Relative tolerance for the cross-check.")
@_handle_errors
def cmd_simulate(input_path, fmt, out, rate, seed, events, replications, mechanism, check, tolerance):
    """Seeded event simulation with per-server transaction counts."""
    out_dir = _out_dir(out)
    structure = io.load(input_path, fmt)
    params = loadmodel.ModelParams(_parse_rate(rate))
    spec = parse_mechanism(mechanism)
    reports = simulate(
        structure, params, spec, n_events=events, seed=seed, replications=replications
    )
    csvout.write_sim_reports(reports, out_dir / "sim_report.csv")
    csvout.write_room_events(reports, out_dir / "room_events.csv")
    csvout.write_sim_summary(reports, out_dir / "sim_summary.csv")
    if check is None:
        check = isinstance(spec, FullMesh)
    if check:
        table = cross_check(structure, params, reports, spec, tolerance=tolerance)
        csvout.write_cross_check(table, out_dir / "cross_check.csv")
        status = "within" if table.ok else "OUTSIDE"
        click.echo(f"cross-check: {status} {tolerance:g} relative tolerance")
    _write_manifest(
        out_dir,
        "simulate",
        {
            "format": fmt, "lambda": rate, "seed": seed, "events": events,
            "replications": replications, "mechanism": mechanism,
            "cross_check": check, "tolerance": tolerance,
        },
        [Path(input_path)],
    )
    total = sum(r.total_tx for r in reports)
    click.echo(f"ok: {replications} replication(s) x {events} events, {total} transactions")


@main.command("generate")
@out_option
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False),
              help="Generator config (fedload-gen/1 JSON).")
@click.option("--servers", type=int, help="Override target server count.")
@click.option("--users", type=int, help="Override nominal user count.")
@click.option("--rooms", type=int, help="Override target room count.")
@seed_option
@_handle_errors
def cmd_generate(out, config_path, servers, users, rooms, seed):
    """Generate a synthetic structure from a config (or built-in defaults)."""
    out_dir = _out_dir(out)
    if config_path:
        config = load_config(config_path)
    else:
        if not (servers and users and rooms):
            raise click.UsageError("--servers, --users and --rooms are required without --config")
        config = GeneratorConfig(
            servers=servers, users=users, rooms=rooms,
            users_per_server=Zipf(alpha=1.6, max_value=100_000),
            rooms_per_user=Zipf(alpha=2.2, max_value=1_000),
            room_size=Zipf(alpha=1.4, max_value=100_000),
        )
    overrides = {
        "servers": servers or config.servers,
        "users": users or config.users,
        "rooms": rooms or config.rooms,
        "seed": seed,
    }
    config = GeneratorConfig(
        servers=overrides["servers"], users=overrides["users"], rooms=overrides["rooms"],
        users_per_server=config.users_per_server, rooms_per_user=config.rooms_per_user,
        room_size=config.room_size, seed=overrides["seed"], fill_policy=config.fill_policy,
    )
    structure = generate_structure(config)
    io.save(structure, out_dir / "structure.json")
    save_config(config, out_dir / "gen_config.json")
    inputs = [Path(config_path)] if config_path else []
    _write_manifest(out_dir, "generate", overrides | {"config": config_path}, inputs)
    click.echo(f"ok: generated {structure!r}")


@main.command("fit")
@input_argument
@format_option
@out_option
@_handle_errors
def cmd_fit(input_path, fmt, out):
    """Fit a generator config to a structure's marginal distributions."""
    out_dir = _out_dir(out)
    structure = io.load(input_path, fmt)
    config = fit_config(structure)
    save_config(config, out_dir / "gen_config.json")
    _write_manifest(out_dir, "fit", {"format": fmt}, [Path(input_path)])
    click.echo(f"ok: fitted config for {structure!r}")


@main.command("recommend")
@input_argument
@format_option
@out_option
@rate_option
@click.option("--candidates", default="full_mesh,hub,spanning_tree:k=2", show_default=True,
              help="Comma-separated mechanism labels, in tie-break order.")
@click.option("--objective", default="min-max-server-load", show_default=True,
              type=click.Choice(list(OBJECTIVES)))
@click.option("--eval-seed", default=0, show_default=True,
              help="Seed for gossip cost estimation.")
@click.option("--samples", default=200, show_default=True,
              help="Gossip cost samples per origin server.")
@_handle_errors
def cmd_recommend(input_path, fmt, out, rate, candidates, objective, eval_seed, samples):
    """Choose the best mechanism per federated room."""
    out_dir = _out_dir(out)
    structure = io.load(input_path, fmt)
    params = loadmodel.ModelParams(_parse_rate(rate))
    try:
        specs = [parse_mechanism(c) for c in candidates.split(",") if c.strip()]
    except ValueError as exc:
        raise click.BadParameter(str(exc)) from exc
    federated = sorted(
        r for r in structure.rooms if len(structure.servers_of_room(r)) > 1
    )
    assignment = recommend(
        structure, params, federated, specs, objective, eval_seed=eval_seed, samples=samples
    )
    csvout.write_assignment(assignment, out_dir / "assignment.csv")
    csvout.write_room_costs(assignment, out_dir / "room_costs.csv")
    _write_manifest(
        out_dir,
        "recommend",
        {
            "format": fmt, "lambda": rate, "candidates": candidates,
            "objective": objective, "eval_seed": eval_seed, "samples": samples,
        },
        [Path(input_path)],
    )
    click.echo(f"ok: assigned mechanisms to {len(federated)} federated room(s)")


@main.command("decentralize")
@input_argument
@format_option
@out_option
@_handle_errors
def cmd_decentralize(input_path, fmt, out):
    """Re-home every user onto a dedicated single-user server."""
    out_dir = _out_dir(out)
    structure = io.load(input_path, fmt)
    io.save(loadmodel.full_decentralization(structure), out_dir / "structure.json")
    _write_manifest(out_dir, "decentralize", {"format": fmt}, [Path(input_path)])
    click.echo("ok: wrote fully decentralized structure")


@main.command("split-user")
@input_argument
@format_option
@out_option
@click.option("--user", "user_id", required=True, help="User to move onto a fresh server.")
@_handle_errors
def cmd_split_user(input_path, fmt, out, user_id):
    """Move one user onto a fresh single-user server."""
    out_dir = _out_dir(out)
    structure = io.load(input_path, fmt)
    io.save(loadmodel.split_user(structure, user_id), out_dir / "structure.json")
    _write_manifest(out_dir, "split-user", {"format": fmt, "user": user_id}, [Path(input_path)])
    click.echo(f"ok: split {user_id!r} onto its own server")


if __name__ == "__main__":
    main()
