import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from solenoids import (Letter, ParseError, PresentationError, abelianization, apply_rule,
                       build_presentation, load_fixture, parse_presentation,
                       presentations_isomorphic, serialize, word)
from solenoids.fixtures import names
from solenoids.presentation import has_backtrack, inverse, iterate_rule, power

ALL = names()


def random_wedge(rng, n_edges=2, max_len=3):
    """A wedge of circles with random backtrack-free images (possibly with inverses)."""
    edges = [chr(ord("a") + i) for i in range(n_edges)]
    rule = {}
    for e in edges:
        while True:
            w = tuple(Letter(rng.choice(edges), rng.choice((1, -1)))
                      for _ in range(rng.randint(1, max_len)))
            if not has_backtrack(w):
                break
        rule[e] = w
    return build_presentation(["v"], [(e, "v", "v") for e in edges], rule)


@pytest.mark.parametrize("name", ALL)
def test_serialize_roundtrip(name):
    P = load_fixture(name)
    Q = parse_presentation(serialize(P))
    assert Q == P
    assert serialize(Q) == serialize(P)


def test_word_parsing():
    assert word("a b^-1") == (Letter("a", 1), Letter("b", -1))
    assert word("a", "b^-1") == word("a b^-1")


def test_apply_rule_on_inverse_letter():
    P = load_fixture("wedge_aab")
    assert apply_rule(P, word("a^-1")) == word("b^-1 a^-1 a^-1")


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10**6), st.lists(st.tuples(st.sampled_from("ab"), st.sampled_from((1, -1))),
                                       min_size=1, max_size=6))
def test_apply_rule_commutes_with_inverse(seed, letters):
    P = random_wedge(random.Random(seed))
    w = tuple(Letter(*x) for x in letters)
    assert apply_rule(P, inverse(w)) == inverse(apply_rule(P, w))


@pytest.mark.parametrize("name", [n for n in ALL if n != "circle_fold"])
def test_abelianization_of_powers(name):
    P = load_fixture(name)
    M = abelianization(P)
    for n in range(1, 5):
        assert abelianization(power(P, n)) == M ** n


def test_iterate_rule_lengths():
    P = load_fixture("circle_square")
    assert [len(iterate_rule(P, "e1", n)) for n in range(5)] == [1, 2, 4, 8, 16]


@pytest.mark.parametrize("text, line, fragment", [
    ("presentation X\nvertices: p\nedge a p q\nmap a = a\n", 3, "unknown vertex"),
    ("presentation X\nvertices: p\nedge a p p\n", 3, "no map line"),
    ("presentation X\nvertices: p\nedge a p p\nmap a = a a^-1\n", None, "backtrack"),
    ("presentation X\nvertices: p\nedge a p p\nmap a = b\n", 4, "unknown edge"),
    ("presentation X\nvertices: p\nedge a p p\nbogus\n", 4, "unexpected token"),
])
def test_parse_errors_carry_location(text, line, fragment):
    with pytest.raises(PresentationError) as info:
        parse_presentation(text)
    assert fragment in str(info.value)
    if line is not None:
        assert isinstance(info.value, ParseError) and info.value.line == line


def test_endpoint_mismatch_rejected():
    with pytest.raises(PresentationError, match="endpoint"):
        build_presentation(["p", "q"], [("a", "p", "q"), ("b", "q", "p")], {"a": "a a", "b": "b"})


def test_isomorphism_finds_relabeling():
    P = load_fixture("wedge_aab")
    Q = build_presentation(["w"], [("x", "w", "w"), ("y", "w", "w")], {"x": "y x x", "y": "y x"})
    iso = presentations_isomorphic(P, Q)
    assert iso is not None
    assert iso.edges == {"a": Letter("x", -1), "b": Letter("y", -1)}


def test_folding_power_is_rejected():
    with pytest.raises(PresentationError, match="backtrack"):
        power(load_fixture("circle_fold"), 2)


def test_isomorphism_rejects_different_rules():
    P = load_fixture("pair_g1")
    assert presentations_isomorphic(P, load_fixture("pair_g2")) is None
