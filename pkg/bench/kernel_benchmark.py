"""Benchmark the compiled event kernel against the pure-Python fallback.

Both kernels produce bit-identical results (asserted here); the point of the
comparison is throughput.  Run from the repository root:

    python bench/kernel_benchmark.py [--events N]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from fedload import Empirical, GeneratorConfig, generate
from fedload.mechanisms import FullMesh, Gossip, Hub, SpanningTree
from fedload.rng import stream_origin
from fedload.sim.core import _Compiled


def run(kernel, compiled, n_events: int, seed: int):
    n_servers = len(compiled.server_ids)
    tx = np.zeros(n_servers, np.int64)
    rx = np.zeros(n_servers, np.int64)
    ev = np.zeros(len(compiled.room_ids), np.int64)
    peers = np.zeros(compiled.max_room, np.int32)
    informed = np.zeros(compiled.max_room, np.uint8)
    started = time.perf_counter()
    kernel.run_events(
        n_events, stream_origin(seed, 0),
        compiled.user_home, compiled.uroom_off, compiled.uroom_ids,
        compiled.rsrv_off, compiled.rsrv_ids,
        compiled.rkind, compiled.rparam, compiled.rcap, compiled.rhub,
        tx, rx, ev, peers, informed,
    )
    return time.perf_counter() - started, (tx.tolist(), rx.tolist(), ev.tolist())


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--events", type=int, default=500_000)
    parser.add_argument("--seed", type=int, default=7)
    args = parser.parse_args()

    from fedload.sim import _kernel_py

    try:
        from fedload.sim import _kernel
    except ImportError:
        print("compiled kernel not built; run pip install -e . --no-build-isolation")
        return

    structure = generate(
        GeneratorConfig(
            servers=50, users=200, rooms=24,
            users_per_server=Empirical((2, 4, 8)),
            rooms_per_user=Empirical((1, 2, 3)),
            room_size=Empirical((5, 20)),
            seed=1,
        )
    )
    scenarios = [
        ("full_mesh", FullMesh()),
        ("hub", Hub()),
        ("spanning_tree k=2", SpanningTree(k=2)),
        ("gossip f=2", Gossip(fanout=2)),
    ]
    print(f"{args.events} events on {structure!r}\n")
    print(f"{'mechanism':<20} {'cython':>12} {'python':>12} {'speedup':>9}")
    for name, mech in scenarios:
        compiled = _Compiled(structure, mech)
        t_cy, out_cy = run(_kernel, compiled, args.events, args.seed)
        t_py, out_py = run(_kernel_py, compiled, args.events, args.seed)
        assert out_cy == out_py, f"backends disagree for {name}"
        print(
            f"{name:<20} {args.events / t_cy:>10.0f}/s {args.events / t_py:>10.0f}/s "
            f"{t_py / t_cy:>8.1f}x"
        )
    print("\nbackends produced identical counts for every scenario")


if __name__ == "__main__":
    main()
