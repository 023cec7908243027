import pytest

from solenoids import ParseError, PreconditionError, load_fixture, parse_map_file, verify_shift_equivalence
from solenoids.fixtures import fixture_path
from solenoids.orbits import _successors
from solenoids.shift_equivalence import (GraphMapPair, composite_failures, identity_pair,
                                         lift_block_map, make_pair, periodic_sequences,
                                         verify_elementary_sse)

MAP_TEXT = fixture_path("refined_to_eight_edge.map").read_text()


@pytest.fixture
def lag_one_pair():
    PX, PY = load_fixture("wedge_efff_refined"), load_fixture("eight_edge")
    return PX, PY, parse_map_file(MAP_TEXT, PX, PY)


def test_lag_one_pair_all_identities(lag_one_pair):
    PX, PY, pair = lag_one_pair
    rep = verify_shift_equivalence(PX, PY, pair)
    assert rep.passed and len(rep.checks) == 10 and rep.failures == []


def test_reversed_pair_verifies(lag_one_pair):
    PX, PY, pair = lag_one_pair
    back = GraphMapPair(pair.s, pair.r, pair.svert, pair.rvert, pair.lag)
    assert verify_shift_equivalence(PY, PX, back).passed


def test_map_file_roundtrip(lag_one_pair):
    PX, PY, pair = lag_one_pair
    assert parse_map_file(pair.to_text(), PX, PY) == pair


@pytest.mark.parametrize("name", ["wedge_aab", "pair_g1", "swap_four_edge", "wedge_conjugate"])
def test_identity_pair(name):
    P = load_fixture(name)
    assert verify_shift_equivalence(P, P, identity_pair(P)).passed


def test_lag_two_pair():
    P = load_fixture("wedge_aab")
    pair = make_pair(P, P, dict(P.rule), dict(P.rule), lag=2)
    assert verify_shift_equivalence(P, P, pair).passed
    assert not verify_shift_equivalence(P, P, make_pair(P, P, dict(P.rule), dict(P.rule), lag=1)).passed
    lift = lift_block_map(P, P, pair)
    assert composite_failures(P, P, lift.phi, lift.psi, 2) == []


def test_perturbed_map_reports_word_diff():
    PX, PY = load_fixture("wedge_efff_refined"), load_fixture("eight_edge")
    pair = parse_map_file(MAP_TEXT.replace("rmap f2 = 6 7\n", "rmap f2 = 2 3 5 7\n"), PX, PY)
    rep = verify_shift_equivalence(PX, PY, pair)
    assert not rep.passed and rep.checks["r f = g r"] is False
    first = rep.failures[0]
    assert first["identity"] == "r f = g r" and first["lhs"] != first["rhs"]


@pytest.mark.parametrize("text, fragment", [
    ("rmap e1 = 1\n", "lag"),
    ("lag 1\nfoo\n", "unexpected"),
    ("lag x\n", "lag"),
    ("lag 1\nrmap e1 = 1\n", "every edge"),
])
def test_map_file_errors(text, fragment):
    """Malformed lines and incomplete maps are input errors."""
    PX, PY = load_fixture("wedge_efff_refined"), load_fixture("eight_edge")
    with pytest.raises(ParseError, match=fragment):
        parse_map_file(text, PX, PY)


def test_elementary_sse():
    R = [[0, 1, 1, 0], [0, 0, 0, 1], [1, 0, 0, 1]]
    S = [[1, 0, 0], [0, 1, 0], [0, 1, 1], [1, 0, 1]]
    Mxy = [[0, 2, 1], [1, 0, 1], [2, 0, 1]]
    Muv = [[0, 1, 1, 0], [0, 0, 0, 1], [1, 0, 0, 2], [1, 1, 1, 1]]
    assert verify_elementary_sse(Mxy, Muv, R, S)
    off = [row[:] for row in Mxy]
    off[0][0] += 1
    assert not verify_elementary_sse(off, Muv, R, S)
    with pytest.raises(PreconditionError):
        verify_elementary_sse(Muv, Mxy, R, S)


def test_lift_composites_are_central_projection(lag_one_pair):
    PX, PY, pair = lag_one_pair
    lift = lift_block_map(PX, PY, pair)
    assert (len(lift.phi.table), len(lift.psi.table)) == (42, 50)
    assert composite_failures(PX, PY, lift.phi, lift.psi, 1) == []
    assert composite_failures(PY, PX, lift.psi, lift.phi, 1) == []


@pytest.mark.parametrize("name", ["wedge_aab", "pair_g1", "wedge_conjugate"])
def test_identity_lift_is_one_block_projection(name):
    P = load_fixture(name)
    lift = lift_block_map(P, P, identity_pair(P))
    assert all(lift.phi(b) == b[0] for b in lift.phi.table)
    assert composite_failures(P, P, lift.phi, lift.psi, 1) == []


def test_lift_maps_periodic_points_bijectively(lag_one_pair):
    PX, PY, pair = lag_one_pair
    lift = lift_block_map(PX, PY, pair)
    for p in (1, 2, 3, 4):
        src, dst = periodic_sequences(PX, p), set(periodic_sequences(PY, p))
        images = {lift.phi.apply_periodic(c) for c in src}
        assert len(images) == len(src) == len(dst)
        assert images == dst


def test_lift_output_is_allowed(lag_one_pair):
    PX, PY, pair = lag_one_pair
    lift = lift_block_map(PX, PY, pair)
    for c in periodic_sequences(PX, 3):
        img = lift.phi.apply_periodic(c)
        assert all(img[(k + 1) % 3] in _successors(PY, img[k]) for k in range(3))


def test_lift_requires_verified_pair():
    PX, PY = load_fixture("wedge_efff_refined"), load_fixture("eight_edge")
    bad = parse_map_file(MAP_TEXT.replace("rmap f2 = 6 7\n", "rmap f2 = 2 3 5 7\n"), PX, PY)
    with pytest.raises(PreconditionError):
        lift_block_map(PX, PY, bad)


def test_block_table_text(lag_one_pair):
    PX, PY, pair = lag_one_pair
    lines = lift_block_map(PX, PY, pair).phi.to_text().splitlines()
    assert lines[0].startswith("block ") and " -> " in lines[0]
    assert len(lines) == 42
