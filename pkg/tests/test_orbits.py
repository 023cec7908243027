import itertools

import networkx as nx
import numpy as np
import pytest

from solenoids import PreconditionError, PresentationError, load_fixture, natural_lengths, parse_orbit_spec
from solenoids.orbits import (EQUAL, GREATER, LESS, compare_positions, enumerate_orbits,
                              excluded_cycles, image_edge, image_sign, letter_transition_graph,
                              primitive_cycles)

SOLENOIDS = ["circle_square", "swap_four_edge", "wedge_aab", "swap_fixed_point", "wedge_conjugate",
             "pair_g1", "pair_g2", "wedge_efff", "eight_edge", "swap_smooth", "wedge_branched"]


def divisors(p):
    return [d for d in range(1, p + 1) if p % d == 0]


@pytest.mark.parametrize("name", SOLENOIDS)
def test_cycle_counts_match_traces(name):
    P = load_fixture(name)
    G = letter_transition_graph(P)
    T = nx.to_numpy_array(G, nodelist=sorted(G.nodes), dtype=np.int64)
    for p in range(1, 5):
        counted = sum(d * len(primitive_cycles(P, d)) for d in divisors(p))
        assert counted == np.trace(np.linalg.matrix_power(T, p))


def test_g1_period_two():
    P = load_fixture("pair_g1")
    assert [o.name for o in enumerate_orbits(P, 2)] == [
        "cycle(a.1 a.2)", "cycle(a.1 a.5)", "cycle(a.2 a.5)", "cycle(a.3 b.1)", "cycle(a.4 b.1)"]


def test_g1_period_one_boundary_cycles_are_vertices():
    P = load_fixture("pair_g1")
    assert [o.name for o in enumerate_orbits(P, 1)] == ["vertex(p)", "cycle(a.2)"]
    assert [tuple(map(str, c)) for c in excluded_cycles(P, 1)] == [("a.1",), ("a.5",)]


def test_g2_orbits():
    P = load_fixture("pair_g2")
    assert [o.name for o in enumerate_orbits(P, 1)] == ["vertex(p)", "cycle(a.3)"]
    assert len(enumerate_orbits(P, 2)) == 5


def test_enumeration_rejects_invalid():
    with pytest.raises(PreconditionError):
        enumerate_orbits(load_fixture("circle_fold"), 1)
    with pytest.raises(PreconditionError):
        enumerate_orbits(load_fixture("pair_g1"), 0)


def test_orbit_spec_parsing():
    P = load_fixture("wedge_aab")
    orbits = parse_orbit_spec(P, "a.2 a.1; @p")
    assert [o.name for o in orbits] == ["cycle(a.1 a.2)", "vertex(p)"]
    with pytest.raises(PresentationError, match="@"):
        parse_orbit_spec(P, "a.1")
    with pytest.raises(PresentationError):
        parse_orbit_spec(P, "a.1 a.3")


# ---------------------------------------------------------------- float oracle

def float_position(P, lengths, lam, address, depth=40):
    """Coordinate of a point, measured from the initial end of its host edge.

    Each partition letter occupies a subinterval of length |image edge| / lam;
    the recursion follows the address and flips when the letter reverses.
    """
    letters = list(itertools.islice(_stream(address), depth))

    def pos(k):
        x = letters[k]
        e = x.edge
        if k == depth - 1:
            return lengths[e] / 2
        image = P.rule[e]
        offset = sum(lengths[y.edge] for y in image[: x.index - 1]) / lam
        inner = pos(k + 1)
        nxt = image_edge(P, x)
        if image_sign(P, x) < 0:
            inner = lengths[nxt] - inner
        return offset + inner / lam

    return pos(0)


def _stream(address):
    pre, cyc = address
    yield from pre
    while True:
        yield from cyc


@pytest.mark.parametrize("name", ["pair_g1", "pair_g2", "swap_four_edge", "wedge_conjugate", "eight_edge"])
def test_compare_positions_matches_float_oracle(name):
    P = load_fixture(name)
    rep = natural_lengths(P)
    points = [m for p in (1, 2, 3) for o in enumerate_orbits(P, p) if not o.is_vertex
              for m in o.marked_points()]
    checked = 0
    for m1, m2 in itertools.combinations(points, 2):
        if m1.host_edge != m2.host_edge:
            continue
        x1 = float_position(P, rep.lengths, rep.lam, m1.address)
        x2 = float_position(P, rep.lengths, rep.lam, m2.address)
        assert abs(x1 - x2) > 1e-9
        assert compare_positions(P, m1, m2) == (LESS if x1 < x2 else GREATER)
        assert compare_positions(P, m2, m1) == -compare_positions(P, m1, m2)
        checked += 1
    assert checked > 0
    assert all(compare_positions(P, m, m) == EQUAL for m in points)


def test_compare_positions_rejects_different_edges():
    P = load_fixture("pair_g1")
    o = parse_orbit_spec(P, "a.3 b.1")[0]
    m1, m2 = o.marked_points()
    with pytest.raises(PreconditionError):
        compare_positions(P, m1, m2)
