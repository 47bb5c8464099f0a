from fractions import Fraction

import pytest
from hypothesis import given

from fedload import (
    ModelParams,
    NetworkStructure,
    full_decentralization,
    load_profile,
    pairwise_rate,
    split_user,
    traffic_matrix,
    validate,
)
from fedload.errors import UnknownEntityError

from oracles import brute_pair_rate, brute_rx, brute_rx_matrix, brute_tx, structures

UNIT = ModelParams()


def test_params_require_positive_rate():
    assert ModelParams(Fraction(3, 2)).message_rate == Fraction(3, 2)
    assert ModelParams("3/2").message_rate == Fraction(3, 2)
    with pytest.raises(ValueError):
        ModelParams(0)
    with pytest.raises(ValueError):
        ModelParams(Fraction(-1, 2))


def test_pairwise_rates_fixture_a(fixture_a):
    assert pairwise_rate(fixture_a, UNIT, "a", "b") == Fraction(1, 2)
    assert pairwise_rate(fixture_a, UNIT, "b", "a") == Fraction(1)
    assert pairwise_rate(fixture_a, UNIT, "b", "c") == Fraction(0)


def test_pairwise_rate_errors(fixture_a):
    with pytest.raises(ValueError):
        pairwise_rate(fixture_a, UNIT, "a", "a")
    with pytest.raises(UnknownEntityError):
        pairwise_rate(fixture_a, UNIT, "a", "nope")


def test_traffic_matrix_fixture_a(fixture_a):
    matrix = traffic_matrix(fixture_a, UNIT)
    assert dict(matrix.entries) == {
        ("a", "b"): Fraction(1, 2),
        ("a", "c"): Fraction(1, 2),
        ("b", "a"): Fraction(1),
        ("c", "a"): Fraction(1),
    }


def test_traffic_matrix_single_server():
    st = NetworkStructure({"a"}, {"u1": "a", "u2": "a"}, {"r1": {"u1", "u2"}})
    assert dict(traffic_matrix(st, UNIT).entries) == {}


def test_doubling_rate_doubles_every_entry(fixture_a):
    base = traffic_matrix(fixture_a, UNIT)
    doubled = traffic_matrix(fixture_a, ModelParams(2))
    assert set(doubled.entries) == set(base.entries)
    for pair, rate in base.entries.items():
        assert doubled.entries[pair] == 2 * rate


def test_load_profile_fixture_a(fixture_a):
    profile = load_profile(fixture_a, UNIT)
    assert dict(profile.tx) == {"a": Fraction(1), "b": Fraction(1), "c": Fraction(1)}
    assert dict(profile.rx) == {"a": Fraction(2), "b": Fraction(1, 2), "c": Fraction(1, 2)}
    assert profile.total_tx == profile.total_rx == Fraction(3)


def test_load_profile_all_local():
    st = NetworkStructure({"a"}, {"u1": "a", "u2": "a"}, {"r1": {"u1", "u2"}})
    profile = load_profile(st, UNIT)
    assert profile.tx == {"a": Fraction(0)}
    assert profile.rx == {"a": Fraction(0)}


def test_load_profile_fixture_c(fixture_c):
    profile = load_profile(fixture_c, UNIT)
    for s in fixture_c.servers:
        assert profile.tx[s] == Fraction(3)
        assert profile.rx[s] == Fraction(3)


@given(structures())
def test_profile_matches_brute_force_oracle(st):
    users, rooms = dict(st.users), {r: set(m) for r, m in st.rooms.items()}
    profile = load_profile(st, ModelParams(Fraction(2, 3)))
    for s in st.servers:
        assert profile.tx[s] == brute_tx(users, rooms, Fraction(2, 3), s)
        assert profile.rx[s] == brute_rx(users, rooms, Fraction(2, 3), s)


@given(structures())
def test_pairwise_matches_brute_force_oracle(st):
    users, rooms = dict(st.users), {r: set(m) for r, m in st.rooms.items()}
    matrix = traffic_matrix(st, UNIT)
    for a in st.servers:
        for b in st.servers:
            if a != b:
                assert matrix.rate(a, b) == brute_pair_rate(users, rooms, 1, a, b)


@given(structures())
def test_conservation_and_pair_symmetry(st):
    profile = load_profile(st, UNIT)
    assert profile.total_tx == profile.total_rx
    matrix = traffic_matrix(st, UNIT)
    received = brute_rx_matrix(dict(st.users), {r: set(m) for r, m in st.rooms.items()}, 1)
    assert set(received) == {(b, a) for (a, b) in matrix.entries}
    for (a, b), rate in received.items():
        assert rate == matrix.entries[(b, a)]


@given(structures())
def test_rate_linearity(st):
    base = load_profile(st, UNIT)
    scaled = load_profile(st, ModelParams(Fraction(3, 2)))
    assert dict(scaled.tx) == {s: v * Fraction(3, 2) for s, v in base.tx.items()}
    assert dict(scaled.rx) == {s: v * Fraction(3, 2) for s, v in base.rx.items()}


def test_receive_rate_ignores_foreign_user_distribution():
    # two foreign users on one server vs split over two servers: rx of "big"
    # is identical because receiving counts foreign users, not servers
    together = NetworkStructure(
        {"big", "x"},
        {"b1": "big", "b2": "big", "f1": "x", "f2": "x"},
        {"r": {"b1", "b2", "f1", "f2"}},
    )
    apart = NetworkStructure(
        {"big", "x", "y"},
        {"b1": "big", "b2": "big", "f1": "x", "f2": "y"},
        {"r": {"b1", "b2", "f1", "f2"}},
    )
    assert load_profile(together, UNIT).rx["big"] == load_profile(apart, UNIT).rx["big"]
    # while its tx strictly grows with the extra foreign server
    assert load_profile(apart, UNIT).tx["big"] > load_profile(together, UNIT).tx["big"]


def test_split_user_moves_user_to_fresh_server(fixture_a):
    split = split_user(fixture_a, "u2")
    assert split.users["u2"] == "split::u2"
    assert "b" in split.servers and split.users_of("b") == frozenset()
    report = validate(split)
    assert report.ok
    assert any(w.invariant == "empty-server" and w.subject == "b" for w in report.warnings)
    # original untouched
    assert fixture_a.users["u2"] == "b"


def test_split_bridging_user_joins_both_rooms(fixture_a):
    split = split_user(fixture_a, "u1")
    assert "split::u1" in split.servers_of_room("r1")
    assert "split::u1" in split.servers_of_room("r2")


def test_split_user_unknown(fixture_a):
    with pytest.raises(UnknownEntityError):
        split_user(fixture_a, "u9")


def test_split_user_increases_large_server_tx():
    users = {f"u{i}": "big" for i in range(10)}
    users["v"] = "small"
    st = NetworkStructure({"big", "small"}, users, {"r": set(users)})
    before = load_profile(st, UNIT)
    after = load_profile(split_user(st, "u0"), UNIT)
    assert after.tx["big"] > before.tx["big"]
    assert before.tx["big"] == Fraction(10)  # 10 users x 1 foreign server
    assert after.tx["big"] == Fraction(18)  # 9 users x 2 foreign servers


def test_full_decentralization_fixture_a(fixture_a):
    flat = full_decentralization(fixture_a)
    assert len(flat.servers) == 3
    assert all(len(flat.users_of(s)) == 1 for s in flat.servers)
    assert {frozenset(flat.rooms[r]) for r in flat.rooms} == {
        frozenset(m) for m in fixture_a.rooms.values()
    }


def test_full_decentralization_creates_load():
    k = 5
    users = {f"u{i}": "mono" for i in range(k)}
    st = NetworkStructure({"mono"}, users, {"r": set(users)})
    assert load_profile(st, UNIT).total_tx == 0
    flat = full_decentralization(st)
    profile = load_profile(flat, UNIT)
    assert len(flat.servers) == k
    for s in flat.servers:
        assert profile.tx[s] == Fraction(k - 1)  # each user in exactly one room
    assert profile.total_tx > 0
