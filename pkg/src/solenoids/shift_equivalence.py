"""Shift equivalences by graph maps and their lifts to the SFT covers.

A lag-``m`` shift equivalence between presentations (X, f) and (Y, g) is a
pair of graph maps r: X -> Y and s: Y -> X with

    r f = g r,    s g = f s,    s r = f^m,    r s = g^m.

Given such a pair, :func:`lift_block_map` builds the sliding block codes
``Phi_r`` (from the X cover to the Y cover) and ``Psi_s`` (back), each with
memory ``m``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

from .axioms import check_expansion, check_nonfolding, PASS
from .errors import ParseError, PreconditionError, PresentationError
from .intmatrix import IntMatrix
from .orbits import _successors
from .presentation import (Letter, PartitionLetter, Presentation, apply_map,
                           apply_rule, check_name, iterate_rule, parse_letter, word_str)


@dataclass(frozen=True)
class GraphMapPair:
    """Edge maps ``r`` (X to Y words) and ``s`` (Y to X words), vertex maps, and lag."""

    r: Mapping[str, tuple]
    s: Mapping[str, tuple]
    rvert: Mapping[str, str]
    svert: Mapping[str, str]
    lag: int = 1

    def to_text(self) -> str:
        lines = [f"lag {self.lag}"]
        lines += [f"rmap {e} = {word_str(w)}" for e, w in self.r.items()]
        lines += [f"rvert {v} -> {w}" for v, w in self.rvert.items()]
        lines += [f"smap {e} = {word_str(w)}" for e, w in self.s.items()]
        lines += [f"svert {v} -> {w}" for v, w in self.svert.items()]
        return "\n".join(lines) + "\n"


def identity_pair(P: Presentation) -> GraphMapPair:
    """r = identity, s = f̃: a lag-one shift equivalence of P with itself."""
    return GraphMapPair({e: (Letter(e),) for e in P.edge_names}, dict(P.rule),
                        {v: v for v in P.vertices}, dict(P.vmap), 1)


def _derive_vertices(src: Presentation, dst: Presentation, emap, given, label):
    out = dict(given)
    for e in src.edges:
        w = emap[e.name]
        for v, u in ((e.init, dst.start(w[0])), (e.term, dst.end(w[-1]))):
            if out.setdefault(v, u) != u:
                raise PresentationError(
                    f"{label}: images force vertex {v} to both {out[v]} and {u}")
    return out


def make_pair(PX: Presentation, PY: Presentation, r, s, rvert=None, svert=None, lag=1) -> GraphMapPair:
    """Check a candidate pair for well-formedness and fill in vertex maps."""
    if lag < 1:
        raise PresentationError("lag must be at least 1")
    r = {k: tuple(parse_letter(t) for t in v.split()) if isinstance(v, str) else tuple(v)
         for k, v in r.items()}
    s = {k: tuple(parse_letter(t) for t in v.split()) if isinstance(v, str) else tuple(v)
         for k, v in s.items()}
    for emap, src, dst, label in ((r, PX, PY, "rmap"), (s, PY, PX, "smap")):
        if set(emap) != set(src.edge_names):
            missing = sorted(set(src.edge_names) - set(emap))
            extra = sorted(set(emap) - set(src.edge_names))
            raise PresentationError(f"{label} must cover every edge (missing {missing}, unknown {extra})")
        for e, w in emap.items():
            if not w:
                raise PresentationError(f"{label} {e}: empty image word")
            for x in w:
                if x.edge not in dst.rule:
                    raise PresentationError(f"{label} {e}: unknown edge {x.edge!r}")
            if not dst.is_path(w):
                raise PresentationError(f"{label} {e}: image is not a path")
    rvert = _derive_vertices(PX, PY, r, rvert or {}, "rvert")
    svert = _derive_vertices(PY, PX, s, svert or {}, "svert")
    return GraphMapPair(r, s, rvert, svert, lag)


def parse_map_file(text, PX: Presentation, PY: Presentation) -> GraphMapPair:
    """Parse ``lag``/``rmap``/``smap``/``rvert``/``svert`` lines."""
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    lag = None
    r, s, rvert, svert = {}, {}, {}, {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        toks = raw.split("#", 1)[0].split()
        if not toks:
            continue
        head = toks[0]
        if head == "lag":
            if len(toks) != 2 or not toks[1].isdigit():
                raise ParseError("expected 'lag M'", lineno, 1)
            lag = int(toks[1])
        elif head in ("rmap", "smap"):
            if len(toks) < 4 or toks[2] != "=":
                raise ParseError(f"expected '{head} EDGE = L1 ... Lk'", lineno, 1)
            target = r if head == "rmap" else s
            if toks[1] in target:
                raise ParseError(f"duplicate {head} for {toks[1]!r}", lineno, 1)
            try:
                check_name(toks[1], "edge name")
            except PresentationError as exc:
                raise ParseError(str(exc), lineno, 1) from None
            target[toks[1]] = tuple(parse_letter(t) for t in toks[3:])
        elif head in ("rvert", "svert"):
            if len(toks) != 4 or toks[2] != "->":
                raise ParseError(f"expected '{head} V -> W'", lineno, 1)
            (rvert if head == "rvert" else svert)[toks[1]] = toks[3]
        else:
            raise ParseError(f"unexpected token {head!r}", lineno, 1)
    if lag is None:
        raise ParseError("missing 'lag' line")
    try:
        return make_pair(PX, PY, r, s, rvert, svert, lag)
    except PresentationError as exc:
        raise ParseError(str(exc)) from None


# ---------------------------------------------------------------- verification

@dataclass
class SEReport:
    """Identity-by-identity outcome; ``failures`` lists each violated instance."""

    checks: dict = field(default_factory=dict)  # identity name -> bool
    failures: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures

    def to_dict(self) -> dict:
        return {"passed": self.passed, "identities": self.checks, "failures": self.failures}


def _vpow(vmap, n):
    out = {v: v for v in vmap}
    for _ in range(n):
        out = {v: vmap[w] for v, w in out.items()}
    return out


def verify_shift_equivalence(PX: Presentation, PY: Presentation, pair: GraphMapPair) -> SEReport:
    """Check the four word identities and their vertex-map counterparts exactly."""
    m = pair.lag
    rep = SEReport()

    def check(name, edge, lhs, rhs):
        ok = lhs == rhs
        rep.checks[name] = rep.checks.get(name, True) and ok
        if not ok:
            show = word_str if isinstance(lhs, tuple) else str
            rep.failures.append({"identity": name, "edge": edge, "lhs": show(lhs), "rhs": show(rhs)})

    for e in PX.edge_names:
        check("r f = g r", e, apply_map(pair.r, PX.rule[e]), apply_rule(PY, pair.r[e]))
        check("s r = f^m", e, apply_map(pair.s, pair.r[e]), iterate_rule(PX, e, m))
    for e in PY.edge_names:
        check("s g = f s", e, apply_map(pair.s, PY.rule[e]), apply_rule(PX, pair.s[e]))
        check("r s = g^m", e, apply_map(pair.r, pair.s[e]), iterate_rule(PY, e, m))

    FX, FY = _vpow(PX.vmap, m), _vpow(PY.vmap, m)
    for v in PX.vertices:
        check("rvert F = G rvert", v, pair.rvert[PX.vmap[v]], PY.vmap[pair.rvert[v]])
        check("svert rvert = F^m", v, pair.svert[pair.rvert[v]], FX[v])
    for v in PY.vertices:
        check("svert G = F svert", v, pair.svert[PY.vmap[v]], PX.vmap[pair.svert[v]])
        check("rvert svert = G^m", v, pair.rvert[pair.svert[v]], FY[v])

    for emap, src, dst, vm, name in ((pair.r, PX, PY, pair.rvert, "r is a graph map"),
                                     (pair.s, PY, PX, pair.svert, "s is a graph map")):
        for e in src.edges:
            w = emap[e.name]
            check(name, e.name, (dst.start(w[0]), dst.end(w[-1])), (vm[e.init], vm[e.term]))
    return rep


def verify_elementary_sse(A, B, R, S) -> bool:
    """True when ``A = R S`` and ``B = S R`` exactly."""
    A, B, R, S = (IntMatrix.of(x) for x in (A, B, R, S))
    if R.ncols != S.nrows or S.ncols != R.nrows:
        raise PreconditionError(f"R {R.shape} and S {S.shape} do not compose both ways")
    if A.shape != (R.nrows, S.ncols) or B.shape != (S.nrows, R.ncols):
        raise PreconditionError("A or B has the wrong shape for R S / S R")
    if not (R.is_nonnegative() and S.is_nonnegative()):
        raise PreconditionError("R and S must be nonnegative")
    return R @ S == A and S @ R == B


# ---------------------------------------------------------------- block maps

@dataclass(frozen=True)
class BlockMap:
    """Sliding block code with memory ``window - 1`` and no anticipation."""

    window: int
    table: dict  # tuple of PartitionLetter -> PartitionLetter

    def __call__(self, block) -> PartitionLetter:
        return self.table[tuple(block)]

    def apply_periodic(self, cycle) -> tuple:
        """Image of the periodic sequence with period word ``cycle``."""
        n, w = len(cycle), self.window
        return tuple(self.table[tuple(cycle[(i - w + 1 + k) % n] for k in range(w))]
                     for i in range(n))

    def to_text(self) -> str:
        return "".join("block " + " ".join(str(x) for x in blk) + f" -> {J}\n"
                       for blk, J in sorted(self.table.items(), key=lambda kv: [str(x) for x in kv[0]]))


def allowed_blocks(P: Presentation, n: int) -> list[tuple]:
    """Allowed words of length ``n`` in the cover of ``P``."""
    blocks = [(x,) for x in P.partition_letters()]
    for _ in range(n - 1):
        blocks = [b + (y,) for b in blocks for y in _successors(P, b[-1])]
    return blocks


def nested_position(P: Presentation, block) -> int:
    """0-based index of the block's nested interval in f̃^len(block)(edge of block[0])."""
    e = block[0].edge
    W = (Letter(e),)
    p = 0
    for x in block:
        if W[p].edge != x.edge:
            raise PreconditionError(f"block {' '.join(map(str, block))} is not allowed")
        img_len = len(P.rule[x.edge])
        offset = sum(len(P.rule[W[i].edge]) for i in range(p))
        p = offset + (x.index - 1 if W[p].sign > 0 else img_len - x.index)
        W = apply_rule(P, W)
    return p


def _segments(PY: Presentation, word, depth: int) -> list[tuple[int, PartitionLetter]]:
    """Depth-``depth`` pieces along ``word``, each labelled by (letter index, depth-1 letter)."""
    out = []
    for i, y in enumerate(word):
        labels = []
        for j, z in enumerate(PY.rule[y.edge], 1):
            labels += [PartitionLetter(y.edge, j)] * len(iterate_rule(PY, z.edge, depth - 1))
        if y.sign < 0:
            labels.reverse()
        out += [(i, lab) for lab in labels]
    return out


def _lift(PX: Presentation, PY: Presentation, emap, m: int) -> BlockMap:
    depth = m + 1
    seg_cache, table = {}, {}
    for block in allowed_blocks(PX, depth):
        e = block[0].edge
        t = nested_position(PX, block)
        W = iterate_rule(PX, e, depth)
        if e not in seg_cache:
            segs = _segments(PY, emap[e], depth)
            expected = sum(len(emap[x.edge]) for x in W)
            if len(segs) != expected:
                raise PreconditionError(
                    f"segment count mismatch on edge {e}: {len(segs)} pieces vs {expected} "
                    "(the pair does not satisfy the lifting hypotheses)")
            seg_cache[e] = segs
        segs = seg_cache[e]
        start = sum(len(emap[W[i].edge]) for i in range(t))
        run = segs[start:start + len(emap[W[t].edge])]
        if len({s for s in run}) != 1:
            raise PreconditionError(
                f"block {' '.join(map(str, block))} straddles several target letters")
        table[block] = run[0][1]
    return BlockMap(depth, table)


@dataclass(frozen=True)
class Lift:
    phi: BlockMap
    psi: BlockMap
    lag: int


def lift_block_map(PX: Presentation, PY: Presentation, pair: GraphMapPair) -> Lift:
    """Sliding block codes ``Phi_r`` and ``Psi_s`` between the two covers.

    ``Phi_r`` sends an (m+1)-block of X letters, read as the nested interval of
    its first letter at depth m+1, to the Y letter containing the r-image of
    that interval.  ``Psi_s`` is built the same way from s.
    """
    report = verify_shift_equivalence(PX, PY, pair)
    if not report.passed:
        raise PreconditionError("the pair is not a shift equivalence: " +
                                "; ".join(f"{f['identity']} fails on {f['edge']}" for f in report.failures[:3]))
    for P in (PX, PY):
        if check_expansion(P) != PASS or not check_nonfolding(P).passed:
            raise PreconditionError(f"{P.name} must satisfy expansion, nonfolding and Markov axioms")
    return Lift(_lift(PX, PY, pair.r, pair.lag), _lift(PY, PX, pair.s, pair.lag), pair.lag)


def composite_failures(P_src: Presentation, P_dst: Presentation, there: BlockMap, back: BlockMap, m: int):
    """(2m+1)-blocks on which back∘there differs from the central letter."""
    bad = []
    for block in allowed_blocks(P_src, 2 * m + 1):
        image = tuple(there(block[k:k + m + 1]) for k in range(m + 1))
        for a, b in zip(image, image[1:]):
            if b not in _successors(P_dst, a):
                bad.append((block, "image not allowed"))
                break
        else:
            if back.table.get(image) != block[m]:
                bad.append((block, back.table.get(image)))
    return bad


def periodic_sequences(P: Presentation, p: int) -> list[tuple]:
    """All closed walks of length ``p`` in the cover (as period words)."""
    return [b for b in allowed_blocks(P, p) if b[0] in _successors(P, b[-1])]
