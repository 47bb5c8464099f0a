"""Synthetic federation generator.

Generates structures of configurable scale whose marginal distributions
(users per server, rooms per user, room sizes) follow configured
distribution specs.  Memberships are always sampled user-first and the
server-room relation derived from them, so every generated structure is
valid by construction.

The three marginals are not independently realizable in general; users per
server and rooms per user are honored exactly (per-entity draws from their
specs), room sizes approximately via the fill policy.  The default policy is
preferential attachment on current room size, which reproduces heavy-tailed
room sizes; ``target-size`` tracks sizes drawn from the room-size spec,
``uniform`` ignores it.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence, Union

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import DegenerateStructureError, FormatError, InfeasibleConfigError
from .rng import Splitmix64
from .structure import NetworkStructure

CONFIG_VERSION = "fedload-gen/1"

FILL_POLICIES = ("preferential", "target-size", "uniform")


@dataclass(frozen=True)
class Zipf:
    """Truncated discrete power law on 1..max_value with exponent alpha."""

    alpha: float
    max_value: int = 100_000
    family: str = "zipf"

    def __post_init__(self):
        if not (self.alpha > 0 and math.isfinite(self.alpha)):
            raise ValueError(f"zipf alpha must be positive and finite, got {self.alpha}")
        if self.max_value < 1:
            raise ValueError(f"zipf max_value must be >= 1, got {self.max_value}")


@dataclass(frozen=True)
class LogNormal:
    """round(exp(N(mu, sigma))) clipped to >= 0."""

    mu: float
    sigma: float
    family: str = "lognormal"

    def __post_init__(self):
        if self.sigma < 0 or not math.isfinite(self.sigma) or not math.isfinite(self.mu):
            raise ValueError(f"bad lognormal parameters mu={self.mu}, sigma={self.sigma}")


@dataclass(frozen=True)
class Empirical:
    """Resample uniformly from an observed multiset of counts."""

    values: tuple[int, ...]
    family: str = "empirical-resample"

    def __post_init__(self):
        if not self.values:
            raise ValueError("empirical-resample needs at least one value")
        if any(v < 0 for v in self.values):
            raise ValueError("empirical values must be >= 0")
        object.__setattr__(self, "values", tuple(sorted(self.values)))


DistributionSpec = Union[Zipf, LogNormal, Empirical]


@dataclass(frozen=True)
class ParametricFit:
    family: str
    params: tuple[float, ...]
    ks_distance: float


@dataclass(frozen=True)
class MarginalDiagnostics:
    zipf: ParametricFit | None
    lognormal: ParametricFit | None


@dataclass(frozen=True)
class FitDiagnostics:
    users_per_server: MarginalDiagnostics
    rooms_per_user: MarginalDiagnostics
    room_size: MarginalDiagnostics


@dataclass(frozen=True)
class GeneratorConfig:
    """Targets, one distribution spec per marginal, fill policy and seed.

    ``servers`` and ``rooms`` are exact; ``users`` is nominal — the realized
    user count is the sum of the sampled per-server counts, which matches the
    target in expectation when the spec was fitted at the same scale.
    """

    servers: int
    users: int
    rooms: int
    users_per_server: DistributionSpec
    rooms_per_user: DistributionSpec
    room_size: DistributionSpec
    seed: int = 0
    fill_policy: str = "preferential"
    diagnostics: FitDiagnostics | None = None

    def __post_init__(self):
        if self.servers < 1 or self.users < 1 or self.rooms < 1:
            raise InfeasibleConfigError(
                f"targets must be >= 1, got servers={self.servers}, "
                f"users={self.users}, rooms={self.rooms}"
            )
        if self.fill_policy not in FILL_POLICIES:
            raise ValueError(f"unknown fill policy {self.fill_policy!r}")


class _Sampler:
    """Draws integer counts from a distribution spec using one PRNG stream."""

    def __init__(self, spec: DistributionSpec, rng: Splitmix64):
        self._spec = spec
        self._rng = rng
        if isinstance(spec, Zipf):
            weights = np.arange(1, spec.max_value + 1, dtype=np.float64) ** (-spec.alpha)
            self._cdf = np.cumsum(weights / weights.sum())

    def draw(self) -> int:
        spec = self._spec
        if isinstance(spec, Empirical):
            return spec.values[self._rng.below(len(spec.values))]
        if isinstance(spec, Zipf):
            u = self._rng.unit()
            return int(np.searchsorted(self._cdf, u, side="right")) + 1
        # lognormal via Box-Muller; 1-unit() keeps the log argument positive
        u1 = 1.0 - self._rng.unit()
        u2 = self._rng.unit()
        z = math.sqrt(-2.0 * math.log(u1)) * math.cos(2.0 * math.pi * u2)
        return max(0, round(math.exp(spec.mu + spec.sigma * z)))


class _Fenwick:
    """Prefix-sum tree for weighted sampling with updates (target-size policy)."""

    def __init__(self, n: int):
        self.n = n
        self.tree = [0] * (n + 1)
        self.total = 0

    def add(self, i: int, delta: int) -> None:
        self.total += delta
        i += 1
        while i <= self.n:
            self.tree[i] += delta
            i += i & (-i)

    def find(self, x: int) -> int:
        """Largest index whose prefix sum is <= x (x in [0, total))."""
        pos = 0
        bit = 1 << (self.n.bit_length())
        while bit:
            nxt = pos + bit
            if nxt <= self.n and self.tree[nxt] <= x:
                pos = nxt
                x -= self.tree[nxt]
            bit >>= 1
        return pos


def _pick_distinct(chosen: set[int], draw_once, n_rooms: int) -> int:
    """One room not already chosen; bounded retries, then deterministic scan."""
    for _ in range(48):
        room = draw_once()
        if room not in chosen:
            return room
    for room in range(n_rooms):
        if room not in chosen:
            return room
    raise AssertionError("caller must ensure chosen < n_rooms")


def generate(config: GeneratorConfig) -> NetworkStructure:
    """Generate a structure; deterministic for a fixed config (incl. seed)."""
    counts_rng = Splitmix64(config.seed, 1)
    degree_rng = Splitmix64(config.seed, 2)
    fill_rng = Splitmix64(config.seed, 3)
    size_rng = Splitmix64(config.seed, 4)

    counts_sampler = _Sampler(config.users_per_server, counts_rng)
    per_server = [counts_sampler.draw() for _ in range(config.servers)]
    n_users = sum(per_server)

    sw = len(str(config.servers - 1)) if config.servers > 1 else 1
    servers = [f"s{i:0{sw}d}" for i in range(config.servers)]
    uw = len(str(n_users - 1)) if n_users > 1 else 1
    users: dict[str, str] = {}
    uid = 0
    for i, count in enumerate(per_server):
        for _ in range(count):
            users[f"u{uid:0{uw}d}"] = servers[i]
            uid += 1
    rw = len(str(config.rooms - 1)) if config.rooms > 1 else 1
    room_ids = [f"r{i:0{rw}d}" for i in range(config.rooms)]
    members: list[list[str]] = [[] for _ in room_ids]

    degree_sampler = _Sampler(config.rooms_per_user, degree_rng)
    degrees = [min(degree_sampler.draw(), config.rooms) for _ in range(n_users)]

    if config.fill_policy == "preferential":
        # one base entry per room, one per membership: weight = size + 1
        attach: list[int] = list(range(config.rooms))
        for user_id, k in zip(sorted(users), degrees):
            chosen: set[int] = set()
            for _ in range(k):
                room = _pick_distinct(
                    chosen, lambda: attach[fill_rng.below(len(attach))], config.rooms
                )
                chosen.add(room)
                members[room].append(user_id)
                attach.append(room)
    elif config.fill_policy == "target-size":
        size_sampler = _Sampler(config.room_size, size_rng)
        targets = [size_sampler.draw() for _ in range(config.rooms)]
        fenwick = _Fenwick(config.rooms)
        for i, t in enumerate(targets):
            fenwick.add(i, t)
        for user_id, k in zip(sorted(users), degrees):
            chosen = set()
            for _ in range(k):
                if fenwick.total > 0:
                    room = _pick_distinct(
                        chosen, lambda: fenwick.find(fill_rng.below(fenwick.total)), config.rooms
                    )
                else:
                    room = _pick_distinct(
                        chosen, lambda: fill_rng.below(config.rooms), config.rooms
                    )
                chosen.add(room)
                members[room].append(user_id)
                if len(members[room]) <= targets[room]:
                    fenwick.add(room, -1)
    else:  # uniform
        for user_id, k in zip(sorted(users), degrees):
            chosen = set()
            for _ in range(k):
                room = _pick_distinct(
                    chosen, lambda: fill_rng.below(config.rooms), config.rooms
                )
                chosen.add(room)
                members[room].append(user_id)

    rooms = {rid: ms for rid, ms in zip(room_ids, members)}
    return NetworkStructure(servers, users, rooms)


def _ks_ecdf_vs_cdf(values: Sequence[int], cdf) -> float:
    """sup |ECDF - CDF| over the sample points (diagnostic use only)."""
    xs = sorted(values)
    n = len(xs)
    worst = 0.0
    for i, x in enumerate(xs):
        model = cdf(x)
        worst = max(worst, abs((i + 1) / n - model), abs(i / n - model))
    return worst


def _fit_zipf(values: Sequence[int]) -> ParametricFit | None:
    vs = np.array([v for v in values if v >= 1], dtype=np.float64)
    if vs.size == 0:
        return None
    vmax = int(vs.max())
    support = np.arange(1, vmax + 1, dtype=np.float64)
    sum_log = float(np.log(vs).sum())

    def nll(alpha: float) -> float:
        return alpha * sum_log + vs.size * math.log(np.power(support, -alpha).sum())

    result = minimize_scalar(nll, bounds=(1e-3, 8.0), method="bounded")
    alpha = float(result.x)
    pmf = support ** (-alpha)
    cdf = np.cumsum(pmf / pmf.sum())
    ks = _ks_ecdf_vs_cdf([int(v) for v in vs], lambda v: float(cdf[min(v, vmax) - 1]))
    return ParametricFit("zipf", (alpha, float(vmax)), ks)


def _fit_lognormal(values: Sequence[int]) -> ParametricFit | None:
    logs = np.log([v for v in values if v >= 1])
    if logs.size == 0:
        return None
    mu = float(logs.mean())
    sigma = float(logs.std())
    if sigma == 0:
        cdf = lambda v: 1.0 if math.log(v) >= mu else 0.0
    else:
        cdf = lambda v: 0.5 * (1.0 + math.erf((math.log(v) - mu) / (sigma * math.sqrt(2))))
    ks = _ks_ecdf_vs_cdf([v for v in values if v >= 1], cdf)
    return ParametricFit("lognormal", (mu, sigma), ks)


def _diagnose(values: Sequence[int]) -> MarginalDiagnostics:
    return MarginalDiagnostics(_fit_zipf(values), _fit_lognormal(values))


def fit(structure: NetworkStructure, seed: int = 0) -> GeneratorConfig:
    """Extract a config whose empirical specs reproduce the source marginals.

    Parametric maximum-likelihood fits (zipf, lognormal) are attached as
    diagnostics with their KS goodness-of-fit; the returned specs are always
    empirical-resample.
    """
    if len(structure.servers) < 2:
        raise DegenerateStructureError("fitting needs at least two servers")
    users_per_server = [len(structure.users_of(s)) for s in sorted(structure.servers)]
    rooms_per_user = [structure.room_degree(u) for u in sorted(structure.users)]
    room_size = [len(structure.rooms[r]) for r in sorted(structure.rooms)]
    if not rooms_per_user or not room_size:
        raise DegenerateStructureError("fitting needs at least one user and one room")
    return GeneratorConfig(
        servers=len(structure.servers),
        users=len(structure.users),
        rooms=len(structure.rooms),
        users_per_server=Empirical(tuple(users_per_server)),
        rooms_per_user=Empirical(tuple(rooms_per_user)),
        room_size=Empirical(tuple(room_size)),
        seed=seed,
        diagnostics=FitDiagnostics(
            _diagnose(users_per_server), _diagnose(rooms_per_user), _diagnose(room_size)
        ),
    )


def _spec_to_json(spec: DistributionSpec) -> dict:
    if isinstance(spec, Zipf):
        return {"family": spec.family, "alpha": spec.alpha, "max_value": spec.max_value}
    if isinstance(spec, LogNormal):
        return {"family": spec.family, "mu": spec.mu, "sigma": spec.sigma}
    return {"family": spec.family, "values": list(spec.values)}


def _spec_from_json(path: str, obj: dict) -> DistributionSpec:
    if not isinstance(obj, dict) or "family" not in obj:
        raise FormatError(path, f"bad distribution spec {obj!r}")
    family = obj["family"]
    keys = set(obj) - {"family"}
    try:
        if family == "zipf":
            if keys != {"alpha", "max_value"}:
                raise FormatError(path, f"zipf spec fields must be alpha,max_value, got {sorted(keys)}")
            return Zipf(alpha=obj["alpha"], max_value=obj["max_value"])
        if family == "lognormal":
            if keys != {"mu", "sigma"}:
                raise FormatError(path, f"lognormal spec fields must be mu,sigma, got {sorted(keys)}")
            return LogNormal(mu=obj["mu"], sigma=obj["sigma"])
        if family == "empirical-resample":
            if keys != {"values"}:
                raise FormatError(path, f"empirical spec field must be values, got {sorted(keys)}")
            return Empirical(values=tuple(obj["values"]))
    except ValueError as exc:
        raise FormatError(path, str(exc)) from exc
    raise FormatError(path, f"unknown distribution family {family!r}")


def _fit_to_json(f: ParametricFit | None) -> dict | None:
    if f is None:
        return None
    return {"family": f.family, "params": list(f.params), "ks_distance": f.ks_distance}


def save_config(config: GeneratorConfig, path: str | Path) -> None:
    doc = {
        "version": CONFIG_VERSION,
        "targets": {"servers": config.servers, "users": config.users, "rooms": config.rooms},
        "seed": config.seed,
        "fill_policy": config.fill_policy,
        "distributions": {
            "users_per_server": _spec_to_json(config.users_per_server),
            "rooms_per_user": _spec_to_json(config.rooms_per_user),
            "room_size": _spec_to_json(config.room_size),
        },
        "diagnostics": None
        if config.diagnostics is None
        else {
            name: {
                "zipf": _fit_to_json(getattr(config.diagnostics, name).zipf),
                "lognormal": _fit_to_json(getattr(config.diagnostics, name).lognormal),
            }
            for name in ("users_per_server", "rooms_per_user", "room_size")
        },
    }
    Path(path).write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def load_config(path: str | Path) -> GeneratorConfig:
    path = Path(path)
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise FormatError(str(path), exc.msg, exc.lineno, exc.colno) from exc
    except OSError as exc:
        raise FormatError(str(path), str(exc)) from exc
    if not isinstance(doc, dict) or doc.get("version") != CONFIG_VERSION:
        raise FormatError(str(path), f"expected a {CONFIG_VERSION!r} document")
    allowed = {"version", "targets", "seed", "fill_policy", "distributions", "diagnostics"}
    unknown = set(doc) - allowed
    if unknown:
        raise FormatError(str(path), f"unknown field(s) {sorted(unknown)}")
    targets = doc.get("targets", {})
    dists = doc.get("distributions", {})
    missing = {"users_per_server", "rooms_per_user", "room_size"} - set(dists)
    if missing:
        raise FormatError(str(path), f"missing distribution(s) {sorted(missing)}")
    try:
        return GeneratorConfig(
            servers=targets["servers"],
            users=targets["users"],
            rooms=targets["rooms"],
            users_per_server=_spec_from_json(str(path), dists["users_per_server"]),
            rooms_per_user=_spec_from_json(str(path), dists["rooms_per_user"]),
            room_size=_spec_from_json(str(path), dists["room_size"]),
            seed=doc.get("seed", 0),
            fill_policy=doc.get("fill_policy", "preferential"),
        )
    except KeyError as exc:
        raise FormatError(str(path), f"missing target {exc}") from exc
