import pytest
from hypothesis import HealthCheck, given, settings

from fedload import NetworkStructure, load, save, validate
from fedload.errors import FormatError, StructureInvalidError, UnknownFormatError
from fedload.io import FORMAT_CANONICAL, FORMAT_CSV

from oracles import structures


def test_round_trip_fixture_a(tmp_path, fixture_a):
    path = tmp_path / "net.json"
    save(fixture_a, path)
    assert load(path) == fixture_a


def test_save_is_byte_deterministic(tmp_path, fixture_a):
    p1, p2 = tmp_path / "one.json", tmp_path / "two.json"
    save(fixture_a, p1)
    save(fixture_a, p2)
    assert p1.read_bytes() == p2.read_bytes()


@settings(suppress_health_check=[HealthCheck.function_scoped_fixture], max_examples=30)
@given(structures())
def test_round_trip_property(tmp_path, st):
    path = tmp_path / "net.json"
    save(st, path)
    loaded = load(path)
    assert loaded == st
    assert validate(loaded).ok


def test_round_trip_2003_server_generated_structure(tmp_path):
    from fedload import GeneratorConfig, Zipf, generate

    st = generate(
        GeneratorConfig(
            servers=2003, users=4000, rooms=900,
            users_per_server=Zipf(alpha=1.8, max_value=100),
            rooms_per_user=Zipf(alpha=2.5, max_value=20),
            room_size=Zipf(alpha=1.5, max_value=200),
            seed=2003,
        )
    )
    path = tmp_path / "big.json"
    save(st, path)
    loaded = load(path)
    assert loaded == st
    assert validate(loaded).ok


def test_save_rejects_invalid_structure(tmp_path):
    bad = NetworkStructure({"a"}, {"u1": "ghost"}, {})
    with pytest.raises(StructureInvalidError):
        save(bad, tmp_path / "bad.json")


def test_membership_csv_assembles_fixture_a(tmp_path, fixture_a):
    path = tmp_path / "members.csv"
    path.write_text(
        "user_id,server_id,room_id\nu1,a,r1\nu2,b,r1\nu1,a,r2\nu3,c,r2\n"
    )
    assert load(path) == fixture_a


def test_membership_csv_duplicate_rows_collapse(tmp_path):
    path = tmp_path / "members.csv"
    path.write_text("user_id,server_id,room_id\nu1,a,r1\nu1,a,r1\n")
    st = load(path)
    assert st.rooms["r1"] == {"u1"}


def test_membership_csv_conflicting_home_servers(tmp_path):
    path = tmp_path / "members.csv"
    path.write_text("user_id,server_id,room_id\nu1,a,r1\nu1,b,r2\n")
    with pytest.raises(StructureInvalidError) as err:
        load(path)
    assert any(v.subject == "u1" for v in err.value.report.violations)


def test_membership_csv_bad_header(tmp_path):
    path = tmp_path / "members.csv"
    path.write_text("user,server,room\nu1,a,r1\n")
    with pytest.raises(FormatError) as err:
        load(path)
    assert err.value.line == 1


def test_membership_csv_short_row_reports_line(tmp_path):
    path = tmp_path / "members.csv"
    path.write_text("user_id,server_id,room_id\nu1,a,r1\nu2,b\n")
    with pytest.raises(FormatError) as err:
        load(path)
    assert err.value.line == 3


def test_canonical_rejects_unknown_fields(tmp_path):
    path = tmp_path / "net.json"
    path.write_text(
        '{"version": "fedload/1", "servers": [], "users": [], "rooms": [], "extra": 1}'
    )
    with pytest.raises(FormatError, match="extra"):
        load(path)


def test_canonical_rejects_unknown_entry_fields(tmp_path):
    path = tmp_path / "net.json"
    path.write_text(
        '{"version": "fedload/1", "servers": ["a"],'
        ' "users": [{"id": "u", "server": "a", "nick": "x"}], "rooms": []}'
    )
    with pytest.raises(FormatError, match="nick"):
        load(path)


def test_canonical_rejects_wrong_version(tmp_path):
    path = tmp_path / "net.json"
    path.write_text('{"version": "fedload/2", "servers": [], "users": [], "rooms": []}')
    with pytest.raises(FormatError, match="version"):
        load(path)


def test_parse_error_carries_position(tmp_path):
    path = tmp_path / "net.json"
    path.write_text('{"version": "fedload/1",\n  broken')
    with pytest.raises(FormatError) as err:
        load(path)
    assert err.value.line == 2


def test_load_validates(tmp_path):
    path = tmp_path / "net.json"
    path.write_text(
        '{"version": "fedload/1", "servers": ["a"],'
        ' "users": [{"id": "u1", "server": "ghost"}], "rooms": []}'
    )
    with pytest.raises(StructureInvalidError):
        load(path)
    loaded = load(path, check=False)
    assert not validate(loaded).ok


def test_unknown_format(tmp_path, fixture_a):
    path = tmp_path / "net.json"
    save(fixture_a, path)
    with pytest.raises(UnknownFormatError):
        load(path, "parquet")
    weird = tmp_path / "net.dat"
    weird.write_text("")
    with pytest.raises(UnknownFormatError):
        load(weird)


def test_explicit_format_overrides_suffix(tmp_path, fixture_a):
    path = tmp_path / "net.data"
    save(fixture_a, path)
    assert load(path, FORMAT_CANONICAL) == fixture_a
    csv_path = tmp_path / "members.data"
    csv_path.write_text("user_id,server_id,room_id\nu1,a,r1\n")
    assert "u1" in load(csv_path, FORMAT_CSV).users
