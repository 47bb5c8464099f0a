"""Fixtures that drive the real fedload CLI to produce input artifacts.

The figures package consumes the primary tool only through its documented
external interfaces: the canonical structure JSON and the CSV artifacts the
CLI writes.
"""

import json
import subprocess
import sys

import pytest

FIXTURE_A = {
    "version": "fedload/1",
    "servers": ["a", "b", "c"],
    "users": [
        {"id": "u1", "server": "a"},
        {"id": "u2", "server": "b"},
        {"id": "u3", "server": "c"},
    ],
    "rooms": [
        {"id": "r1", "members": ["u1", "u2"]},
        {"id": "r2", "members": ["u1", "u3"]},
    ],
}


def run_fedload(*args: str) -> None:
    subprocess.run([sys.executable, "-m", "fedload", *args], check=True, capture_output=True)


def emit_artifacts(structure_path, out_dir) -> None:
    run_fedload("stats", str(structure_path), "-o", str(out_dir))
    run_fedload("load", str(structure_path), "-o", str(out_dir), "--no-matrix")


@pytest.fixture(scope="session")
def fixture_a_artifacts(tmp_path_factory):
    root = tmp_path_factory.mktemp("fixture_a")
    structure = root / "net.json"
    structure.write_text(json.dumps(FIXTURE_A))
    out = root / "out"
    emit_artifacts(structure, out)
    return out


@pytest.fixture(scope="session")
def large_artifacts(tmp_path_factory):
    root = tmp_path_factory.mktemp("large")
    gen = root / "gen"
    run_fedload(
        "generate", "-o", str(gen),
        "--servers", "2000", "--users", "4000", "--rooms", "1000", "--seed", "1",
    )
    out = root / "out"
    emit_artifacts(gen / "structure.json", out)
    return out
