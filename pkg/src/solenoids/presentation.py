"""Graphs with wrapping rules: value types, word algebra and the text format.

A presentation is a finite directed graph together with a vertex map ``F``
and a wrapping rule that sends every edge to a nonempty signed edge path.
Words are tuples of :class:`Letter` and are never freely reduced, so a fold
``x x^-1`` survives every operation in this module.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Mapping, NamedTuple, Sequence

from .errors import ParseError, PresentationError
from .intmatrix import IntMatrix

RESERVED = set("^.,:;#()")


class Letter(NamedTuple):
    """An oriented edge; ``sign`` is +1 or -1."""

    edge: str
    sign: int = 1

    def inverse(self) -> "Letter":
        return Letter(self.edge, -self.sign)

    def __str__(self) -> str:
        return self.edge if self.sign > 0 else f"{self.edge}^-1"


class PartitionLetter(NamedTuple):
    """The ``index``-th (1-based) piece of the partition of ``edge``."""

    edge: str
    index: int

    def __str__(self) -> str:
        return f"{self.edge}.{self.index}"


class Edge(NamedTuple):
    name: str
    init: str
    term: str


Word = tuple  # tuple[Letter, ...]


def word(*tokens) -> tuple[Letter, ...]:
    """Build a word from tokens such as ``"a"``, ``"b^-1"`` or letters.

    >>> word("a", "b^-1")
    (Letter(edge='a', sign=1), Letter(edge='b', sign=-1))
    """
    out = []
    for t in tokens:
        if isinstance(t, Letter):
            out.append(t)
        elif isinstance(t, str):
            out.extend(parse_letter(s) for s in t.split())
        else:
            out.append(Letter(*t))
    return tuple(out)


def parse_letter(token: str) -> Letter:
    if token.endswith("^-1"):
        return Letter(token[:-3], -1)
    return Letter(token, 1)


def inverse(w: Sequence[Letter]) -> tuple[Letter, ...]:
    """Reverse ``w`` and flip every sign."""
    return tuple(Letter(x.edge, -x.sign) for x in reversed(w))


def word_str(w: Iterable[Letter]) -> str:
    return " ".join(str(x) for x in w)


def has_backtrack(w: Sequence[Letter]) -> bool:
    """True when ``w`` contains an adjacent pair ``x^s x^-s``."""
    return any(a.edge == b.edge and a.sign == -b.sign for a, b in zip(w, w[1:]))


def check_name(name: str, what: str = "name") -> str:
    if not isinstance(name, str) or not name:
        raise PresentationError(f"{what} must be a nonempty string")
    if any(c.isspace() for c in name) or RESERVED & set(name):
        raise PresentationError(f"{what} {name!r} contains whitespace or a reserved character")
    return name


@dataclass(frozen=True)
class Presentation:
    """A directed graph with vertex map and wrapping rule.

    Use :func:`build_presentation` or :func:`parse_presentation` rather than
    the constructor when the vertex map should be derived from the rule.

    Parameters
    ----------
    vertices : tuple of str
        Vertex names in declaration order.
    edges : tuple of Edge
        Edges in declaration order; this order indexes every matrix.
    vmap : mapping
        The vertex map ``F``.
    rule : mapping
        Edge name to nonempty word.
    name : str
    """

    vertices: tuple[str, ...]
    edges: tuple[Edge, ...]
    vmap: Mapping[str, str]
    rule: Mapping[str, tuple[Letter, ...]]
    name: str = "P"
    _edge_index: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(self.vertices))
        object.__setattr__(self, "edges", tuple(Edge(*e) for e in self.edges))
        object.__setattr__(self, "vmap", dict(self.vmap))
        object.__setattr__(self, "rule", {k: word(v) if isinstance(v, str) else word(*v)
                                          for k, v in self.rule.items()})
        object.__setattr__(self, "_edge_index", {e.name: i for i, e in enumerate(self.edges)})
        self._validate()

    def _validate(self):
        check_name(self.name, "presentation name")
        if len(set(self.vertices)) != len(self.vertices):
            raise PresentationError("duplicate vertex name")
        if len(self._edge_index) != len(self.edges):
            raise PresentationError("duplicate edge name")
        if not self.edges:
            raise PresentationError("a presentation needs at least one edge")
        vset = set(self.vertices)
        for v in self.vertices:
            check_name(v, "vertex name")
        if vset & set(self._edge_index):
            raise PresentationError("vertex and edge names must be distinct")
        touched = set()
        for e in self.edges:
            check_name(e.name, "edge name")
            for v in (e.init, e.term):
                if v not in vset:
                    raise PresentationError(f"edge {e.name} uses unknown vertex {v!r}")
                touched.add(v)
        isolated = vset - touched
        if isolated:
            raise PresentationError(f"isolated vertices: {sorted(isolated)}")
        if set(self.vmap) != vset or not set(self.vmap.values()) <= vset:
            raise PresentationError("vertex map must be a total map on the vertices")
        if set(self.rule) != set(self._edge_index):
            missing = set(self._edge_index) - set(self.rule)
            extra = set(self.rule) - set(self._edge_index)
            raise PresentationError(f"rule must cover every edge (missing {sorted(missing)}, unknown {sorted(extra)})")
        for e in self.edges:
            img = self.rule[e.name]
            if not img:
                raise PresentationError(f"empty image word for edge {e.name}")
            for x in img:
                if x.edge not in self._edge_index:
                    raise PresentationError(f"image of {e.name} uses unknown edge {x.edge!r}")
                if x.sign not in (1, -1):
                    raise PresentationError("letter signs must be +1 or -1")
            self._check_path(img, self.vmap[e.init], self.vmap[e.term], e.name)
            if has_backtrack(img):
                raise PresentationError(f"image of {e.name} contains an immediate backtrack")

    def _check_path(self, w, start, end, label):
        if self.start(w[0]) != start:
            raise PresentationError(
                f"endpoint mismatch: image of {label} starts at {self.start(w[0])}, expected {start}")
        for a, b in zip(w, w[1:]):
            if self.end(a) != self.start(b):
                raise PresentationError(
                    f"endpoint mismatch: image of {label} is not a path between {a} and {b}")
        if self.end(w[-1]) != end:
            raise PresentationError(
                f"endpoint mismatch: image of {label} ends at {self.end(w[-1])}, expected {end}")

    # graph helpers
    @property
    def edge_names(self) -> tuple[str, ...]:
        return tuple(e.name for e in self.edges)

    def edge(self, name: str) -> Edge:
        try:
            return self.edges[self._edge_index[name]]
        except KeyError:
            raise PresentationError(f"unknown edge {name!r}") from None

    def edge_position(self, name: str) -> int:
        return self._edge_index[name]

    def start(self, x: Letter) -> str:
        e = self.edge(x.edge)
        return e.init if x.sign > 0 else e.term

    def end(self, x: Letter) -> str:
        e = self.edge(x.edge)
        return e.term if x.sign > 0 else e.init

    def is_path(self, w: Sequence[Letter]) -> bool:
        return all(self.end(a) == self.start(b) for a, b in zip(w, w[1:]))

    def image(self, name: str) -> tuple[Letter, ...]:
        try:
            return self.rule[name]
        except KeyError:
            raise PresentationError(f"unknown edge {name!r}") from None

    def partition_letters(self) -> list[PartitionLetter]:
        return [PartitionLetter(e.name, j)
                for e in self.edges for j in range(1, len(self.rule[e.name]) + 1)]

    def __str__(self) -> str:
        return serialize(self)


def derive_vmap(vertices, edges, rule) -> dict[str, str]:
    """Read the vertex map off the edge images, checking consistency."""
    edges = [Edge(*e) for e in edges]
    by_name = {e.name: e for e in edges}
    out: dict[str, str] = {}

    def endpoint(x: Letter, first: bool) -> str:
        if x.edge not in by_name:
            raise PresentationError(f"unknown edge {x.edge!r} in an image")
        e = by_name[x.edge]
        return (e.init if x.sign > 0 else e.term) if first else (e.term if x.sign > 0 else e.init)

    for e in edges:
        img = rule.get(e.name)
        if not img:
            raise PresentationError(f"empty image word for edge {e.name}")
        for v, w in ((e.init, endpoint(img[0], True)), (e.term, endpoint(img[-1], False))):
            if out.setdefault(v, w) != w:
                raise PresentationError(
                    f"endpoint mismatch: images force F({v}) to be both {out[v]} and {w}")
    return out


def build_presentation(vertices, edges, rule, vmap=None, name="P") -> Presentation:
    """Construct a presentation, deriving ``vmap`` when it is not given.

    ``rule`` values may be words or whitespace separated strings such as
    ``"a b^-1"``.
    """
    rule = {k: word(v) if isinstance(v, str) else word(*v) for k, v in rule.items()}
    derived = derive_vmap(vertices, edges, rule)
    if vmap is None:
        vmap = derived
    else:
        vmap = dict(vmap)
        for v, w in derived.items():
            if vmap.get(v, w) != w:
                raise PresentationError(
                    f"endpoint mismatch: declared F({v}) = {vmap[v]} but images give {w}")
        for v, w in derived.items():
            vmap.setdefault(v, w)
    return Presentation(tuple(vertices), tuple(Edge(*e) for e in edges), vmap, rule, name)


# ---------------------------------------------------------------- algebra

def apply_rule(P: Presentation, w: Sequence[Letter]) -> tuple[Letter, ...]:
    """Substitute every letter of ``w``; a letter ``x^-1`` contributes the inverse image."""
    out: list[Letter] = []
    for x in w:
        img = P.image(x.edge)
        out.extend(img if x.sign > 0 else inverse(img))
    return tuple(out)


def apply_map(mapping: Mapping[str, Sequence[Letter]], w: Sequence[Letter]) -> tuple[Letter, ...]:
    """Like :func:`apply_rule` for a bare edge-to-word mapping."""
    out: list[Letter] = []
    for x in w:
        try:
            img = mapping[x.edge]
        except KeyError:
            raise PresentationError(f"unknown edge {x.edge!r}") from None
        out.extend(img if x.sign > 0 else inverse(img))
    return tuple(out)


def iterate_rule(P: Presentation, e: str, n: int) -> tuple[Letter, ...]:
    if n < 0:
        raise ValueError("n must be nonnegative")
    P.edge(e)
    w: tuple[Letter, ...] = (Letter(e, 1),)
    for _ in range(n):
        w = apply_rule(P, w)
    return w


def power(P: Presentation, n: int, name=None) -> Presentation:
    """The presentation with rule f̃^n and vertex map F^n."""
    if n < 1:
        raise ValueError("n must be positive")
    vmap = {v: v for v in P.vertices}
    for _ in range(n):
        vmap = {v: P.vmap[w] for v, w in vmap.items()}
    rule = {e: iterate_rule(P, e, n) for e in P.edge_names}
    return Presentation(P.vertices, P.edges, vmap, rule, name or P.name)


def abelianization(P: Presentation) -> IntMatrix:
    """Unsigned occurrence counts: entry (i, j) counts e_j in f̃(e_i)."""
    names = P.edge_names
    rows = []
    for e in names:
        row = [0] * len(names)
        for x in P.rule[e]:
            row[P.edge_position(x.edge)] += 1
        rows.append(tuple(row))
    return IntMatrix(tuple(rows), names, names)


# ---------------------------------------------------------------- isomorphism

@dataclass(frozen=True)
class Isomorphism:
    """Vertex bijection and signed edge bijection between two presentations."""

    vertices: dict
    edges: dict  # edge of P1 -> Letter of P2

    def map_word(self, w):
        return apply_map({e: (x,) for e, x in self.edges.items()}, w)


def presentations_isomorphic(P1: Presentation, P2: Presentation, max_edges: int = 10):
    """Search for a relabelling (with orientation flips) carrying P1 onto P2.

    Choosing the image of one edge forces the images of every edge in its
    wrapping word, so the search propagates assignments and only branches
    on edges not yet forced.

    Returns
    -------
    Isomorphism or None
    """
    n = len(P1.edges)
    if max(n, len(P2.edges)) > max_edges:
        raise PresentationError(f"isomorphism search limited to {max_edges} edges")
    if n != len(P2.edges) or len(P1.vertices) != len(P2.vertices):
        return None
    len2 = {}
    for e in P2.edge_names:
        len2.setdefault(len(P2.rule[e]), []).append(e)
    if sorted(len(P1.rule[e]) for e in P1.edge_names) != sorted(len(P2.rule[e]) for e in P2.edge_names):
        return None

    def propagate(assign: dict, e: str, target: Letter):
        stack = [(e, target)]
        assign = dict(assign)
        used = {x.edge for x in assign.values()}
        while stack:
            a, t = stack.pop()
            if a in assign:
                if assign[a] != t:
                    return None
                continue
            if t.edge in used:
                return None
            assign[a] = t
            used.add(t.edge)
            src = P1.rule[a]
            dst = P2.rule[t.edge] if t.sign > 0 else inverse(P2.rule[t.edge])
            if len(src) != len(dst):
                return None
            for x, y in zip(src, dst):
                stack.append((x.edge, Letter(y.edge, y.sign * x.sign)))
        return assign

    order = sorted(P1.edge_names, key=lambda e: len(P1.rule[e]))

    def search(assign):
        free = [e for e in order if e not in assign]
        if not free:
            return assign
        e = free[0]
        used = {x.edge for x in assign.values()}
        for f in len2.get(len(P1.rule[e]), ()):
            if f in used:
                continue
            for s in (1, -1):
                nxt = propagate(assign, e, Letter(f, s))
                if nxt is not None:
                    done = search(nxt)
                    if done is not None and _vertex_bijection(P1, P2, done) is not None:
                        return done
        return None

    assign = search({})
    if assign is None:
        return None
    return Isomorphism(_vertex_bijection(P1, P2, assign), assign)


def _vertex_bijection(P1, P2, assign):
    vb: dict[str, str] = {}
    for e in P1.edges:
        t = assign[e.name]
        for v, w in ((e.init, P2.start(t)), (e.term, P2.end(t))):
            if vb.setdefault(v, w) != w:
                return None
    if len(set(vb.values())) != len(vb) or len(vb) != len(P1.vertices):
        return None
    if any(vb[P1.vmap[v]] != P2.vmap[vb[v]] for v in P1.vertices):
        return None
    return vb


# ---------------------------------------------------------------- text format

_TOKEN = re.compile(r"\S+")


def _tokens(line: str):
    return [(m.group(), m.start() + 1) for m in _TOKEN.finditer(line)]


def _name(tok, lineno, what):
    text, col = tok
    try:
        return check_name(text, what)
    except PresentationError as exc:
        raise ParseError(str(exc), lineno, col) from None


def parse_presentation(text) -> Presentation:
    """Parse the line-oriented presentation format.

    Raises
    ------
    ParseError
        With line and column on syntax errors, and with the line number for
        semantic errors (unknown names, endpoint mismatches, duplicates).
    """
    if isinstance(text, bytes):
        try:
            text = text.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ParseError(f"input is not UTF-8: {exc}") from None
    name = None
    vertices: list[str] | None = None
    edges: list[Edge] = []
    vmap: dict[str, str] = {}
    rule: dict[str, tuple[Letter, ...]] = {}
    edge_line: dict[str, int] = {}
    map_line: dict[str, int] = {}

    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0]
        toks = _tokens(line)
        if not toks:
            continue
        head, hcol = toks[0]
        if head == "presentation":
            if len(toks) != 2:
                raise ParseError("expected 'presentation NAME'", lineno, hcol)
            if name is not None:
                raise ParseError("duplicate 'presentation' line", lineno, hcol)
            name = _name(toks[1], lineno, "presentation name")
        elif head == "vertices:" or (head == "vertices" and len(toks) > 1 and toks[1][0] == ":"):
            rest = toks[1:] if head == "vertices:" else toks[2:]
            if vertices is not None:
                raise ParseError("duplicate 'vertices:' line", lineno, hcol)
            vertices = [_name(t, lineno, "vertex name") for t in rest]
            if not vertices:
                raise ParseError("empty vertex list", lineno, hcol)
            seen = set()
            for v, t in zip(vertices, rest):
                if v in seen:
                    raise ParseError(f"duplicate vertex {v!r}", lineno, t[1])
                seen.add(v)
        elif head == "edge":
            if len(toks) != 4:
                raise ParseError("expected 'edge NAME INIT TERM'", lineno, hcol)
            e = _name(toks[1], lineno, "edge name")
            if e in edge_line:
                raise ParseError(f"duplicate edge {e!r} (first declared on line {edge_line[e]})",
                                 lineno, toks[1][1])
            if vertices is None:
                raise ParseError("'edge' before 'vertices:'", lineno, hcol)
            for t in toks[2:]:
                if t[0] not in vertices:
                    raise ParseError(f"unknown vertex {t[0]!r}", lineno, t[1])
            edges.append(Edge(e, toks[2][0], toks[3][0]))
            edge_line[e] = lineno
        elif head == "vmap":
            if len(toks) != 4 or toks[2][0] != "->":
                raise ParseError("expected 'vmap V -> W'", lineno, hcol)
            if vertices is None:
                raise ParseError("'vmap' before 'vertices:'", lineno, hcol)
            for t in (toks[1], toks[3]):
                if t[0] not in vertices:
                    raise ParseError(f"unknown vertex {t[0]!r}", lineno, t[1])
            if toks[1][0] in vmap:
                raise ParseError(f"duplicate vmap for {toks[1][0]!r}", lineno, toks[1][1])
            vmap[toks[1][0]] = toks[3][0]
        elif head == "map":
            if len(toks) < 3 or toks[2][0] != "=":
                raise ParseError("expected 'map EDGE = L1 ... Lk'", lineno, hcol)
            e, ecol = toks[1]
            if e not in edge_line:
                raise ParseError(f"unknown edge {e!r}", lineno, ecol)
            if e in map_line:
                raise ParseError(f"duplicate map for {e!r}", lineno, ecol)
            if len(toks) == 3:
                raise ParseError(f"empty image word for edge {e!r}", lineno, toks[2][1])
            letters = []
            for t, col in toks[3:]:
                x = parse_letter(t)
                if x.edge not in edge_line:
                    raise ParseError(f"unknown edge {x.edge!r}", lineno, col)
                letters.append(x)
            rule[e] = tuple(letters)
            map_line[e] = lineno
        else:
            raise ParseError(f"unexpected token {head!r}", lineno, hcol)

    if vertices is None:
        raise ParseError("missing 'vertices:' line")
    if not edges:
        raise ParseError("no edges declared")
    for e in edges:
        if e.name not in rule:
            raise ParseError(f"edge {e.name!r} has no map line", edge_line[e.name])
    try:
        return build_presentation(vertices, edges, rule, vmap or None, name or "P")
    except PresentationError as exc:
        # attach the line of the offending map when we can find it
        where = next((map_line[e] for e in map_line if f" {e} " in f" {exc} "), None)
        raise ParseError(str(exc), where) from None


def serialize(P: Presentation) -> str:
    lines = [f"presentation {P.name}", "vertices: " + " ".join(P.vertices)]
    lines += [f"edge {e.name} {e.init} {e.term}" for e in P.edges]
    lines += [f"vmap {v} -> {P.vmap[v]}" for v in P.vertices]
    lines += [f"map {e} = {word_str(P.rule[e])}" for e in P.edge_names]
    return "\n".join(lines) + "\n"


def load_presentation(path) -> Presentation:
    with open(path, "rb") as fh:
        return parse_presentation(fh.read())
