"""Canonical presentation of a solenoid at a finite invariant set.

The pipeline is

1. :func:`refine_at_orbits` inserts the marked interior points as vertices;
2. :func:`path_closure` closes the set of pieces of iterated images, cut at
   marked vertices;
3. :func:`extract_P_O` picks the unique minimal closed family of paths;
4. :func:`rebase` turns that family into a presentation whose edges are the
   paths, together with the projection ``rho`` back to the refined graph.
"""

from __future__ import annotations

import logging
from collections import deque
from dataclasses import dataclass, field
from typing import Sequence

import networkx as nx

from .axioms import matrix_irreducibility, validate
from .errors import AlgorithmAssumptionViolated, BudgetExceeded, PreconditionError
from .intmatrix import IntMatrix
from .orbits import LESS, EQUAL, MarkedPoint, Orbit, compare_positions
from .presentation import (Edge, Letter, Presentation, apply_map, apply_rule,
                           has_backtrack, inverse, iterate_rule, word_str)

log = logging.getLogger(__name__)

CERTIFIED = "conjugacy certified via rho-intertwining + covering + output validation"


# ---------------------------------------------------------------- refinement

@dataclass(frozen=True)
class RefinedPresentation:
    """``presentation`` is the original graph with the orbit points added as vertices.

    Attributes
    ----------
    presentation : Presentation
    original : Presentation
    table : dict
        Original edge to the tuple of its sub-edges, in order along the edge.
    marked : tuple of str
        The vertices making up the invariant set, orbit by orbit.
    point_names : dict
        (orbit index, phase) to vertex name.
    orbits : tuple of Orbit
    """

    presentation: Presentation
    original: Presentation
    table: dict
    marked: tuple
    point_names: dict
    orbits: tuple

    def refine_word(self, w: Sequence[Letter]) -> tuple[Letter, ...]:
        return apply_map({e: tuple(Letter(s) for s in subs) for e, subs in self.table.items()}, w)


def _fresh(name: str, taken: set) -> str:
    while name in taken:
        name += "'"
    taken.add(name)
    return name


def refine_at_orbits(P: Presentation, orbits: Sequence[Orbit]) -> RefinedPresentation:
    """Split edges at the interior orbit points and recompute the rule blockwise."""
    orbits = tuple(orbits)
    if not orbits:
        raise PreconditionError("at least one orbit is needed")
    if len(set(orbits)) != len(orbits):
        raise PreconditionError("duplicate orbits")
    taken = set(P.vertices) | set(P.edge_names)
    point_names: dict[tuple[int, int], str] = {}
    marked: list[str] = []
    on_edge: dict[str, list[MarkedPoint]] = {e: [] for e in P.edge_names}
    index_of: dict[Orbit, int] = {o: k for k, o in enumerate(orbits)}
    for k, orb in enumerate(orbits):
        for i, m in enumerate(orb.marked_points()):
            if orb.is_vertex:
                name = m.vertex
                if name in marked:
                    raise PreconditionError(f"vertex {name} lies on two orbits")
            else:
                base = f"o{k + 1}" if orb.period == 1 else f"o{k + 1}_{i + 1}"
                name = _fresh(base, taken)
                on_edge[m.host_edge].append(m)
            point_names[k, i] = name
            marked.append(name)

    # order the points along each edge
    for e, pts in on_edge.items():
        ordered: list[MarkedPoint] = []
        for m in pts:
            pos = 0
            while pos < len(ordered):
                c = compare_positions(P, m, ordered[pos])
                if c == EQUAL:
                    raise PreconditionError(f"duplicate marked point on edge {e}")
                if c == LESS:
                    break
                pos += 1
            ordered.insert(pos, m)
        on_edge[e] = ordered

    def sub_name(e: str, j: int) -> str:
        base = f"{e}[{j}]" if e[-1].isdigit() else f"{e}{j}"
        return _fresh(base, taken)

    table: dict[str, tuple[str, ...]] = {}
    edges: list[Edge] = []
    for e in P.edges:
        pts = on_edge[e.name]
        if not pts:
            table[e.name] = (e.name,)
            edges.append(e)
            continue
        names = tuple(sub_name(e.name, j) for j in range(1, len(pts) + 2))
        table[e.name] = names
        stops = [e.init] + [point_names[index_of[m.orbit], m.phase] for m in pts] + [e.term]
        edges.extend(Edge(n, a, b) for n, a, b in zip(names, stops, stops[1:]))

    def refined(x: Letter) -> tuple[Letter, ...]:
        w = tuple(Letter(s) for s in table[x.edge])
        return w if x.sign > 0 else inverse(w)

    rank = {(index_of[m.orbit], m.phase): r + 1
            for pts in on_edge.values() for r, m in enumerate(pts)}
    rule: dict[str, tuple[Letter, ...]] = {}
    for e in P.edges:
        img = P.rule[e.name]
        W: list[Letter] = []
        block_start = []
        for x in img:
            block_start.append(len(W))
            W.extend(refined(x))
        cuts = [0]
        for m in on_edge[e.name]:
            j = m.letter.index
            x = img[j - 1]
            fm = m.image()
            key = (index_of[m.orbit], fm.phase)
            if fm.host_edge != x.edge:
                raise AlgorithmAssumptionViolated(f"image of a marked point is not in block {j} of {e.name}")
            k = rank[key]
            n = len(table[x.edge]) - 1
            cuts.append(block_start[j - 1] + (k if x.sign > 0 else n + 1 - k))
        cuts.append(len(W))
        if any(a >= b for a, b in zip(cuts, cuts[1:])):
            raise AlgorithmAssumptionViolated(f"marked point images out of order in the image of {e.name}")
        for name, a, b in zip(table[e.name], cuts, cuts[1:]):
            rule[name] = tuple(W[a:b])

    vmap = dict(P.vmap)
    for (k, i), name in point_names.items():
        orb = orbits[k]
        if not orb.is_vertex:
            vmap[name] = point_names[k, (i + 1) % orb.period]
    vertices = tuple(P.vertices) + tuple(n for n in marked if n not in P.vertices)
    Q = Presentation(vertices, tuple(edges), vmap, rule, P.name + "_refined")
    return RefinedPresentation(Q, P, table, tuple(marked), point_names, orbits)


# ---------------------------------------------------------------- closure

def _letter_key(Q: Presentation, x: Letter):
    return Q.edge_position(x.edge), 0 if x.sign > 0 else 1


def word_key(Q: Presentation, w):
    return len(w), tuple(_letter_key(Q, x) for x in w)


def canonical(Q: Presentation, w, orientation: str = "min") -> tuple[tuple[Letter, ...], int]:
    """Representative of {w, w^-1} and the sign carrying it to ``w``."""
    w = tuple(w)
    v = inverse(w)
    pick = min if orientation == "min" else max
    rep = pick(w, v, key=lambda u: word_key(Q, u))
    return rep, 1 if rep == w else -1


@dataclass
class ClosureItem:
    word: tuple
    complete: bool
    pieces: list = field(default_factory=list)  # (canonical word, sign, complete)
    pure: bool = False


@dataclass
class Closure:
    refined: RefinedPresentation
    items: dict
    orientation: str
    steps: int

    @property
    def path_classes(self) -> list[tuple]:
        return [w for w, it in self.items.items() if it.complete]


def split_at_marked(Q: Presentation, W: Sequence[Letter], marked: set) -> list[tuple[tuple, bool]]:
    """Cut ``W`` at interior occurrences of marked vertices.

    Returns (piece, complete) pairs; a piece is complete when both of its
    end vertices are marked.
    """
    if not W:
        return []
    pieces, start = [], 0
    for t in range(1, len(W)):
        if Q.start(W[t]) in marked:
            pieces.append(tuple(W[start:t]))
            start = t
    pieces.append(tuple(W[start:]))
    return [(p, Q.start(p[0]) in marked and Q.end(p[-1]) in marked) for p in pieces]


def path_closure(R: RefinedPresentation, orientation: str = "min",
                 max_classes: int = 100_000, max_steps: int = 1_000_000,
                 seed_budget: int | None = None) -> Closure:
    """Close the refined edges under "take the image and cut at marked vertices".

    Every piece of every iterated edge image appears, including pieces with an
    unmarked end; only backtrack-free pieces are kept.  A complete item is pure
    when each piece of its image is complete and backtrack-free.

    Pieces with an unmarked end only serve to find seeds, so they are expanded
    up to ``seed_budget`` image iterations (default four times the number of
    refined edges).  Complete pieces are always expanded.
    """
    Q = R.presentation
    marked = set(R.marked)
    if not marked:
        raise PreconditionError("no marked vertices")
    if seed_budget is None:
        seed_budget = 4 * len(Q.edges)
    items: dict[tuple, ClosureItem] = {}
    depth: dict[tuple, int] = {}
    queue: deque = deque()

    def add(w, d):
        rep, _ = canonical(Q, w, orientation)
        if rep not in items:
            if len(items) >= max_classes:
                raise BudgetExceeded(f"path closure exceeded {max_classes} classes")
            items[rep] = ClosureItem(rep, Q.start(rep[0]) in marked and Q.end(rep[-1]) in marked)
            depth[rep] = d
            queue.append(rep)
        return rep

    for e in Q.edge_names:
        add((Letter(e),), 0)
    steps = 0
    while queue:
        w = queue.popleft()
        item = items[w]
        if not item.complete and depth[w] >= seed_budget:
            continue
        steps += 1
        if steps > max_steps:
            raise BudgetExceeded(f"path closure exceeded {max_steps} steps")
        pure = item.complete
        for piece, complete in split_at_marked(Q, apply_rule(Q, w), marked):
            if has_backtrack(piece):
                pure = False
                item.pieces.append((piece, 0, complete))
                continue
            rep = add(piece, depth[w] + 1)
            sign = 1 if rep == piece else -1
            item.pieces.append((rep, sign, complete))
            pure = pure and complete
        item.pure = pure
    return Closure(R, items, orientation, steps)


# ---------------------------------------------------------------- P_O

@dataclass
class Extraction:
    classes: list
    candidates: int
    primitive: bool
    warnings: list


def extract_P_O(closure: Closure) -> Extraction:
    """The unique closed, pure, strongly connected family of path classes."""
    Q = closure.refined.presentation
    paths = closure.path_classes
    if not paths:
        raise AlgorithmAssumptionViolated("closure contains no path between marked points")
    G = nx.DiGraph()
    G.add_nodes_from(paths)
    for w in paths:
        for rep, sign, complete in closure.items[w].pieces:
            if sign and complete:
                G.add_edge(w, rep)
    candidates = []
    for comp in nx.strongly_connected_components(G):
        nodes = set(comp)
        if len(nodes) == 1:
            (w,) = nodes
            if not G.has_edge(w, w):
                continue
        ok = all(closure.items[w].pure for w in nodes) and all(
            rep in nodes for w in nodes for rep, _, _ in closure.items[w].pieces)
        if ok:
            candidates.append(nodes)
    if len(candidates) != 1:
        raise AlgorithmAssumptionViolated(
            f"expected exactly one closed pure family of paths, found {len(candidates)}")
    S = candidates[0]
    covered = {x.edge for w in S for x in w}
    missing = set(Q.edge_names) - covered
    if missing:
        raise AlgorithmAssumptionViolated(f"minimal path family misses edges {sorted(missing)}")
    classes = sorted(S, key=lambda w: word_key(Q, w))
    idx = {w: i for i, w in enumerate(classes)}
    rows = [[0] * len(classes) for _ in classes]
    for w in classes:
        for rep, _, _ in closure.items[w].pieces:
            rows[idx[w]][idx[rep]] += 1
    primitive = matrix_irreducibility(IntMatrix.of(rows))[1]
    warnings = []
    if not primitive:
        warnings.append("occurrence matrix of the minimal path family is not primitive")
        log.warning(warnings[-1])
    return Extraction(classes, len(candidates), primitive, warnings)


# ---------------------------------------------------------------- rebase

@dataclass
class RebaseResult:
    """Output presentation, projection and diagnostics.

    ``rho`` maps each output edge to a word in the refined graph; ``psi``
    (when present) maps original edges to output words with
    ``rho(psi(e)) = f̃^psi_lag(e)``.
    """

    output: Presentation
    rho: dict
    refined: RefinedPresentation
    diagnostics: dict
    psi: dict | None = None
    psi_lag: int | None = None

    def rho_text(self) -> str:
        return "".join(f"rho {e} = {word_str(self.rho[e])}\n" for e in self.output.edge_names)

    def report(self) -> dict:
        d = dict(self.diagnostics)
        d["output"] = self.output.name
        d["rho"] = {e: word_str(w) for e, w in self.rho.items()}
        if self.psi is not None:
            d["psi"] = {e: word_str(w) for e, w in self.psi.items()}
            d["psi_lag"] = self.psi_lag
        return d


def _match_pieces(Q, w, rep_names, marked):
    out = []
    for piece, complete in split_at_marked(Q, apply_rule(Q, w), marked):
        if piece in rep_names:
            out.append(Letter(rep_names[piece], 1))
        elif inverse(piece) in rep_names:
            out.append(Letter(rep_names[inverse(piece)], -1))
        else:
            raise AlgorithmAssumptionViolated(f"image piece {word_str(piece)} matches no path class")
    return tuple(out)


def _factor(Q, W, rep_names, marked):
    out = []
    for piece, complete in split_at_marked(Q, W, marked):
        if not complete:
            return None
        if piece in rep_names:
            out.append(Letter(rep_names[piece], 1))
        elif inverse(piece) in rep_names:
            out.append(Letter(rep_names[inverse(piece)], -1))
        else:
            return None
    return tuple(out)


def _graph_map_psi(P, out, rho, rep_names, marked, max_lag=8):
    """Factor f̃^N(e) through the output edges for the smallest workable N."""
    for N in range(1, max_lag + 1):
        psi = {}
        for e in P.edge_names:
            f = _factor(P, iterate_rule(P, e, N), rep_names, marked)
            if f is None:
                break
            psi[e] = f
        else:
            ok = all(apply_map(rho, psi[e]) == iterate_rule(P, e, N) for e in P.edge_names)
            ok = ok and all(apply_map(psi, rho[E]) == iterate_rule(out, E, N) for E in out.edge_names)
            if ok:
                return psi, N
    return None, None


def rebase(P: Presentation, orbits: Sequence[Orbit], *, force: bool = False,
           orientation: str = "min", closure_budget: int = 100_000,
           step_budget: int = 1_000_000, seed_budget: int | None = None,
           name: str | None = None) -> RebaseResult:
    """Build the canonical presentation of ``P`` at the union of ``orbits``.

    Parameters
    ----------
    P : Presentation
        Must be a solenoid presentation unless ``force`` is set.
    orbits : sequence of Orbit
        Periodic orbits of ``P`` (see :func:`solenoids.orbits.enumerate_orbits`).
    force : bool
        Allow branched inputs; the conjugacy guarantee is then withdrawn.
    orientation : {"min", "max"}
        Which of a path and its inverse becomes the edge direction.
    closure_budget, step_budget, seed_budget : int
        Limits passed to :func:`path_closure`.

    Returns
    -------
    RebaseResult
    """
    if orientation not in ("min", "max"):
        raise ValueError("orientation must be 'min' or 'max'")
    report_in = validate(P)
    warnings = []
    if not report_in.is_solenoid:
        if not force:
            raise PreconditionError(
                f"rebasing needs a solenoid presentation (input is {report_in.classification}); "
                "the conjugacy with the rebased presentation requires the flattening axiom; "
                "use force to study branched inputs")
        if report_in.classification == "invalid":
            raise PreconditionError("input presentation is invalid")
        warnings.append("input is a branched solenoid: conjugacy guarantee withdrawn")

    R = refine_at_orbits(P, orbits)
    Q = R.presentation
    marked = set(R.marked)
    closure = path_closure(R, orientation, closure_budget, step_budget, seed_budget)
    ext = extract_P_O(closure)
    warnings += ext.warnings

    vorder = {v: i for i, v in enumerate(R.marked)}
    classes = sorted(ext.classes, key=lambda w: (vorder[Q.start(w[0])], word_key(Q, w)))
    rep_names = {w: f"E{i + 1}" for i, w in enumerate(classes)}
    edges = tuple(Edge(rep_names[w], Q.start(w[0]), Q.end(w[-1])) for w in classes)
    rule = {rep_names[w]: _match_pieces(Q, w, rep_names, marked) for w in classes}
    vmap = {v: Q.vmap[v] for v in R.marked}
    out = Presentation(tuple(R.marked), edges, vmap, rule, name or f"{P.name}_rebased")
    rho = {rep_names[w]: w for w in classes}

    for E in out.edge_names:
        if apply_map(rho, out.rule[E]) != apply_rule(Q, rho[E]):
            raise AlgorithmAssumptionViolated(f"rho does not intertwine on {E}")
    covered = {x.edge for w in rho.values() for x in w}
    if covered != set(Q.edge_names):
        raise AlgorithmAssumptionViolated("rho words do not cover the refined graph")

    report_out = validate(out)
    if not report_out.is_solenoid:
        msg = f"output presentation is {report_out.classification}"
        if not force:
            raise AlgorithmAssumptionViolated(msg)
        warnings.append(msg)
    drift = None
    if report_in.lam is not None and report_out.lam is not None:
        drift = abs(report_out.lam - report_in.lam)

    psi = lag = None
    if all(o.is_vertex for o in R.orbits):
        psi, lag = _graph_map_psi(P, out, rho, rep_names, marked)
    statement = (f"shift equivalence (rho, psi) of lag {lag} verified" if psi is not None
                 else CERTIFIED)
    if warnings and report_in.classification != "solenoid":
        statement = "no conjugacy guarantee (branched input)"

    diagnostics = {
        "orbits": [o.name for o in R.orbits],
        "refined_edges": len(Q.edges),
        "closure_size": len(closure.items),
        "closure_steps": closure.steps,
        "path_classes": len(closure.path_classes),
        "candidate_families": ext.candidates,
        "primitive": ext.primitive,
        "lambda_in": report_in.lam,
        "lambda_out": report_out.lam,
        "lambda_drift": drift,
        "output_classification": report_out.classification,
        "conjugacy": statement,
        "warnings": warnings,
    }
    return RebaseResult(out, rho, R, diagnostics, psi, lag)


def elementary_presentation(P: Presentation, fixed_point: Orbit, **kw) -> RebaseResult:
    """Rebase at one fixed point; the result is a wedge of circles."""
    if fixed_point.period != 1:
        raise PreconditionError("an elementary presentation needs a fixed point")
    res = rebase(P, [fixed_point], **kw)
    out = res.output
    if len(out.vertices) != 1 or any(e.init != e.term for e in out.edges):
        raise AlgorithmAssumptionViolated("rebasing at a fixed point did not give a wedge of circles")
    return res


def all_vertex_orbits(P: Presentation) -> list[Orbit]:
    """Every periodic vertex orbit of ``P`` (vertices on F-cycles)."""
    from .orbits import vertex_cycles

    out = []
    for p in range(1, len(P.vertices) + 1):
        out.extend(Orbit("vertex", c) for c in vertex_cycles(P, p))
    return out
