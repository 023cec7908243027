"""Symbolic periodic orbits.

An interior periodic point is coded by the cycle of partition letters its
forward orbit visits.  A vertex is coded from inside each of its half-edges
by an eventually periodic letter stream; an interior cycle whose stream
coincides with such a boundary stream is really a vertex and is dropped.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from math import lcm
from typing import Sequence

import networkx as nx

from .axioms import INIT, TERM, Germ, germ_image, validate
from .errors import AlgorithmAssumptionViolated, PreconditionError, PresentationError
from .presentation import PartitionLetter, Presentation

LESS, EQUAL, GREATER = -1, 0, 1

PREPERIODIC_MESSAGE = (
    "only unions of periodic orbits are accepted; a forward-invariant set "
    "with preperiodic points gives the same rebased presentation as the "
    "periodic orbits it eventually lands on, so pass those instead")


def letter_key(P: Presentation, x: PartitionLetter):
    return P.edge_position(x.edge), x.index


def image_edge(P: Presentation, x: PartitionLetter) -> str:
    """Edge containing the image of the subinterval ``x``."""
    return P.rule[x.edge][x.index - 1].edge


def image_sign(P: Presentation, x: PartitionLetter) -> int:
    return P.rule[x.edge][x.index - 1].sign


def letter_transition_graph(P: Presentation) -> nx.DiGraph:
    """Arc (e, j) -> (e', j') whenever letter j of f̃(e) runs along e'."""
    G = nx.DiGraph()
    letters = P.partition_letters()
    G.add_nodes_from(letters)
    for x in letters:
        target = image_edge(P, x)
        for j in range(1, len(P.rule[target]) + 1):
            G.add_edge(x, PartitionLetter(target, j))
    return G


def _successors(P: Presentation, x: PartitionLetter):
    target = image_edge(P, x)
    return [PartitionLetter(target, j) for j in range(1, len(P.rule[target]) + 1)]


# ---------------------------------------------------------------- orbit values

def _min_rotation(seq: Sequence, key) -> tuple:
    n = len(seq)
    rots = [tuple(seq[i:]) + tuple(seq[:i]) for i in range(n)]
    return min(rots, key=lambda r: [key(x) for x in r])


def _is_primitive(seq: Sequence) -> bool:
    n = len(seq)
    return all(tuple(seq[d:]) + tuple(seq[:d]) != tuple(seq)
               for d in range(1, n) if n % d == 0)


@dataclass(frozen=True)
class Orbit:
    """A periodic orbit: ``kind`` is ``"interior"`` or ``"vertex"``.

    ``points`` lists partition letters (interior) or vertex names in orbit
    order, rotated to the canonical starting point.
    """

    kind: str
    points: tuple

    @property
    def period(self) -> int:
        return len(self.points)

    @property
    def is_vertex(self) -> bool:
        return self.kind == "vertex"

    @property
    def name(self) -> str:
        if self.is_vertex:
            return "vertex(" + " ".join(self.points) + ")"
        return "cycle(" + " ".join(str(x) for x in self.points) + ")"

    def spec(self) -> str:
        """The orbit in command-line syntax (``a.1 a.2`` or ``@p @q``)."""
        if self.is_vertex:
            return " ".join("@" + v for v in self.points)
        return " ".join(str(x) for x in self.points)

    def marked_points(self) -> list["MarkedPoint"]:
        return [MarkedPoint(self, i) for i in range(self.period)]

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class MarkedPoint:
    """The point of ``orbit`` at position ``phase``."""

    orbit: Orbit
    phase: int

    @property
    def host_edge(self) -> str | None:
        if self.orbit.is_vertex:
            return None
        return self.orbit.points[self.phase].edge

    @property
    def letter(self) -> PartitionLetter:
        return self.orbit.points[self.phase]

    @property
    def vertex(self) -> str | None:
        return self.orbit.points[self.phase] if self.orbit.is_vertex else None

    @cached_property
    def address(self) -> tuple[tuple, tuple]:
        """(preperiod, period) of the letter stream; interior points are purely periodic."""
        if self.orbit.is_vertex:
            raise PreconditionError("vertex points have one address per half-edge")
        pts = self.orbit.points
        return (), tuple(pts[self.phase:]) + tuple(pts[:self.phase])

    def image(self) -> "MarkedPoint":
        return MarkedPoint(self.orbit, (self.phase + 1) % self.orbit.period)


def make_interior_orbit(P: Presentation, letters: Sequence[PartitionLetter]) -> Orbit:
    """Validate a cycle of partition letters and return it in canonical rotation."""
    letters = [PartitionLetter(*x) for x in letters]
    if not letters:
        raise PresentationError("empty orbit")
    for x in letters:
        if x.edge not in P.rule or not 1 <= x.index <= len(P.rule[x.edge]):
            raise PresentationError(f"no partition letter {x}")
    for k, x in enumerate(letters):
        nxt = letters[(k + 1) % len(letters)]
        if image_edge(P, x) != nxt.edge:
            raise PresentationError(
                f"{x} maps into edge {image_edge(P, x)}, not {nxt.edge}: not a periodic cycle")
    if not _is_primitive(letters):
        raise PresentationError("orbit cycle is a proper power of a shorter cycle")
    return Orbit("interior", _min_rotation(letters, lambda x: letter_key(P, x)))


def make_vertex_orbit(P: Presentation, vertices: Sequence[str]) -> Orbit:
    vertices = list(vertices)
    for v in vertices:
        if v not in P.vmap:
            raise PresentationError(f"unknown vertex {v!r}")
    if len(set(vertices)) != len(vertices):
        raise PresentationError("repeated vertex in orbit")
    for k, v in enumerate(vertices):
        if P.vmap[v] != vertices[(k + 1) % len(vertices)]:
            raise PreconditionError(
                f"F({v}) = {P.vmap[v]} does not continue the orbit; " + PREPERIODIC_MESSAGE)
    order = {v: i for i, v in enumerate(P.vertices)}
    return Orbit("vertex", _min_rotation(vertices, order.__getitem__))


# ---------------------------------------------------------------- boundary addresses

def germ_letter(P: Presentation, g: Germ) -> PartitionLetter:
    return PartitionLetter(g.edge, 1 if g.end == INIT else len(P.rule[g.edge]))


def vertex_boundary_addresses(P: Presentation) -> dict[Germ, tuple[tuple, tuple]]:
    """Map each germ to the (preperiod, period) letter stream of its base vertex."""
    out = {}
    for e in P.edge_names:
        for end in (INIT, TERM):
            g = Germ(e, end)
            seen: dict[Germ, int] = {}
            seq = []
            while g not in seen:
                seen[g] = len(seq)
                seq.append(g)
                g = germ_image(P, g)
            k = seen[g]
            letters = [germ_letter(P, h) for h in seq]
            out[Germ(e, end)] = (tuple(letters[:k]), tuple(letters[k:]))
    return out


def stream_prefix(address, n: int) -> tuple:
    pre, cyc = address
    out = list(pre[:n])
    while len(out) < n:
        out.extend(cyc)
    return tuple(out[:n])


def same_stream(a, b) -> bool:
    n = max(len(a[0]), len(b[0])) + lcm(len(a[1]), len(b[1]))
    return stream_prefix(a, n) == stream_prefix(b, n)


def boundary_coincidence(P: Presentation, letters: Sequence[PartitionLetter], boundary=None):
    """Return a germ whose boundary stream equals some rotation of the cycle, else None."""
    boundary = vertex_boundary_addresses(P) if boundary is None else boundary
    letters = tuple(letters)
    rotations = [((), letters[i:] + letters[:i]) for i in range(len(letters))]
    for g, addr in boundary.items():
        for r in rotations:
            if same_stream(addr, r):
                return g
    return None


# ---------------------------------------------------------------- enumeration

def primitive_cycles(P: Presentation, p: int) -> list[tuple]:
    """All primitive closed walks of length ``p`` in canonical rotation."""
    letters = sorted(P.partition_letters(), key=lambda x: letter_key(P, x))
    rank = {x: i for i, x in enumerate(letters)}
    found = []
    for start in letters:
        r0 = rank[start]
        path = [start]

        def extend():
            if len(path) == p:
                if start in _successors(P, path[-1]):
                    cyc = tuple(path)
                    if _is_primitive(cyc) and _min_rotation(cyc, rank.__getitem__) == cyc:
                        found.append(cyc)
                return
            for y in _successors(P, path[-1]):
                if rank[y] >= r0:
                    path.append(y)
                    extend()
                    path.pop()

        extend()
    return sorted(found, key=lambda c: [rank[x] for x in c])


def vertex_cycles(P: Presentation, p: int) -> list[tuple]:
    order = {v: i for i, v in enumerate(P.vertices)}
    out = set()
    for v in P.vertices:
        cyc, w = [v], P.vmap[v]
        while w != v and len(cyc) <= p:
            cyc.append(w)
            w = P.vmap[w]
        if w == v and len(cyc) == p:
            out.add(_min_rotation(cyc, order.__getitem__))
    return sorted(out, key=lambda c: [order[x] for x in c])


def enumerate_orbits(P: Presentation, p: int, check: bool = True) -> list[Orbit]:
    """Periodic orbits of exact period ``p``: vertex orbits first, then interior cycles.

    Interior cycles whose letter stream equals a vertex boundary stream are
    excluded, since those points are vertices.
    """
    if p < 1:
        raise PreconditionError("period must be at least 1")
    if check:
        cls = validate(P).classification
        if cls == "invalid":
            raise PreconditionError("orbit enumeration needs a solenoid or branched solenoid")
    boundary = vertex_boundary_addresses(P)
    orbits = [Orbit("vertex", c) for c in vertex_cycles(P, p)]
    for cyc in primitive_cycles(P, p):
        if boundary_coincidence(P, cyc, boundary) is None:
            orbits.append(Orbit("interior", cyc))
    return orbits


def excluded_cycles(P: Presentation, p: int) -> list[tuple]:
    """Primitive length-``p`` cycles that coincide with vertices."""
    boundary = vertex_boundary_addresses(P)
    return [c for c in primitive_cycles(P, p) if boundary_coincidence(P, c, boundary) is not None]


# ---------------------------------------------------------------- ordering

def compare_addresses(P: Presentation, a, b, budget: int = 10_000) -> int:
    """Order two points of one edge given their (preperiod, period) letter streams.

    Letters are compared depth by depth; once the accumulated orientation
    of the images traversed so far is reversed, index order flips.
    """
    if stream_prefix(a, 1)[0].edge != stream_prefix(b, 1)[0].edge:
        raise PreconditionError("points lie on different edges")
    n = max(len(a[0]), len(b[0])) + lcm(len(a[1]), len(b[1]))
    limit = min(n, budget)
    sa, sb = stream_prefix(a, limit), stream_prefix(b, limit)
    sigma = 1
    for x, y in zip(sa, sb):
        if x.edge != y.edge:
            raise AssertionError("address streams diverge in edge without diverging in index")
        if x.index != y.index:
            less = x.index < y.index
            return (LESS if less else GREATER) * sigma
        sigma *= image_sign(P, x)
    if n > budget:
        raise AlgorithmAssumptionViolated("depth budget exhausted while comparing distinct periodic points")
    return EQUAL


def compare_positions(P: Presentation, m1: MarkedPoint, m2: MarkedPoint, budget: int = 10_000) -> int:
    if m1.host_edge is None or m2.host_edge is None:
        raise PreconditionError("only interior marked points have positions")
    if m1.host_edge != m2.host_edge:
        raise PreconditionError(f"marked points lie on different edges ({m1.host_edge}, {m2.host_edge})")
    return compare_addresses(P, m1.address, m2.address, budget)


# ---------------------------------------------------------------- orbit syntax

def parse_orbit_spec(P: Presentation, text: str) -> list[Orbit]:
    """Parse ``a.1 a.2; @p @q`` into orbits of ``P``."""
    orbits = []
    boundary = vertex_boundary_addresses(P)
    for chunk in text.split(";"):
        toks = chunk.split()
        if not toks:
            continue
        if all(t.startswith("@") for t in toks):
            orbits.append(make_vertex_orbit(P, [t[1:] for t in toks]))
            continue
        letters = []
        for t in toks:
            edge, dot, idx = t.rpartition(".")
            if not dot or not edge or not idx.isdigit():
                raise PresentationError(f"bad orbit token {t!r}; expected EDGE.INDEX or @VERTEX")
            letters.append(PartitionLetter(edge, int(idx)))
        orb = make_interior_orbit(P, letters)
        g = boundary_coincidence(P, orb.points, boundary)
        if g is not None:
            raise PresentationError(
                f"{orb.name} is the vertex {P.edge(g.edge).init if g.end == INIT else P.edge(g.edge).term}; "
                "name it with @VERTEX")
        orbits.append(orb)
    if len(set(orbits)) != len(orbits):
        raise PresentationError("duplicate orbit")
    if not orbits:
        raise PresentationError("no orbit given")
    return orbits
