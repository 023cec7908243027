"""Exact combinatorial checks of the solenoid axioms.

All verdicts are decided with integer or set arithmetic.  Floating point
only enters through :func:`natural_lengths`, which is a diagnostic.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import networkx as nx
import numpy as np

from .errors import AlgorithmAssumptionViolated, PreconditionError
from .intmatrix import IntMatrix
from .presentation import Letter, Presentation, abelianization

INIT, TERM = "Init", "Term"
PASS, FAIL, INDETERMINATE = "pass", "fail", "indeterminate"


class Germ(NamedTuple):
    """Half-edge at the initial (``Init``) or terminal (``Term``) end of an edge."""

    edge: str
    end: str

    def __str__(self):
        return f"{self.edge}:{self.end}"


def germ_base(P: Presentation, g: Germ) -> str:
    e = P.edge(g.edge)
    return e.init if g.end == INIT else e.term


def germ_image(P: Presentation, g: Germ) -> Germ:
    """Germ of the image of ``g``: read off the first or last letter of f̃(edge)."""
    img = P.rule[g.edge]
    if g.end == INIT:
        x = img[0]
        return Germ(x.edge, INIT if x.sign > 0 else TERM)
    x = img[-1]
    return Germ(x.edge, TERM if x.sign > 0 else INIT)


def vertex_germs(P: Presentation) -> dict[str, frozenset]:
    out: dict[str, set] = {v: set() for v in P.vertices}
    for e in P.edges:
        out[e.init].add(Germ(e.name, INIT))
        out[e.term].add(Germ(e.name, TERM))
    return {v: frozenset(s) for v, s in out.items()}


# ---------------------------------------------------------------- nonfolding

@dataclass(frozen=True)
class NonfoldingResult:
    passed: bool
    witness: tuple[Letter, Letter] | None = None
    pairs: int = 0


def check_nonfolding(P: Presentation) -> NonfoldingResult:
    """Close the set of adjacent letter pairs under the rule and look for folds.

    A pair ``(x^s, y^t)`` seen inside some image produces, one iteration
    later, the pair (last letter of the image of x^s, first letter of the
    image of y^t).  A reachable pair ``(z^u, z^-u)`` is a fold.
    """
    def last(x: Letter) -> Letter:
        img = P.rule[x.edge]
        return img[-1] if x.sign > 0 else img[0].inverse()

    def first(x: Letter) -> Letter:
        img = P.rule[x.edge]
        return img[0] if x.sign > 0 else img[-1].inverse()

    seen: dict[tuple, tuple | None] = {}
    queue = []
    for e in P.edge_names:
        img = P.rule[e]
        for pair in zip(img, img[1:]):
            if pair not in seen:
                seen[pair] = None
                queue.append(pair)
    while queue:
        a, b = queue.pop()
        if a.edge == b.edge and a.sign == -b.sign:
            return NonfoldingResult(False, (a, b), len(seen))
        nxt = (last(a), first(b))
        if nxt not in seen:
            seen[nxt] = (a, b)
            queue.append(nxt)
    return NonfoldingResult(True, None, len(seen))


# ---------------------------------------------------------------- flattening

@dataclass(frozen=True)
class FlatteningResult:
    passed: bool
    exponents: dict  # vertex -> first k >= 1 with two germs left, or None
    stable_sizes: dict  # vertex -> stabilized cardinality

    @property
    def exponent(self):
        if not self.passed:
            return None
        return max(self.exponents.values())

    @property
    def failing_vertices(self):
        return [v for v, n in self.stable_sizes.items() if n != 2]


def check_flattening(P: Presentation) -> FlatteningResult:
    """Iterate the germ map on each vertex's germ set until its size settles.

    A vertex passes when the size settles at exactly two germs, i.e. some
    iterate of a small neighbourhood of the vertex is an open arc.
    """
    germs = vertex_germs(P)
    total = sum(len(s) for s in germs.values())
    exponents, sizes = {}, {}
    for v, start in germs.items():
        current, k, first_two = start, 0, None
        while k <= total:
            k += 1
            nxt = frozenset(germ_image(P, g) for g in current)
            assert len(nxt) <= len(current), "germ image cardinality increased"
            current = nxt
            if first_two is None and len(current) == 2:
                first_two = k
        sizes[v] = len(current)
        exponents[v] = first_two if len(current) == 2 else None
    passed = all(n == 2 for n in sizes.values())
    return FlatteningResult(passed, exponents, sizes)


# ---------------------------------------------------------------- irreducibility

def _digraph(M: IntMatrix) -> nx.DiGraph:
    G = nx.DiGraph()
    G.add_nodes_from(range(M.nrows))
    G.add_edges_from((i, j) for i in range(M.nrows) for j in range(M.ncols) if M[i, j])
    return G


def matrix_irreducibility(M: IntMatrix) -> tuple[bool, bool]:
    """(irreducible, primitive) for a square nonnegative integer matrix."""
    M = IntMatrix.of(M)
    if not M.is_square or M.nrows == 0:
        raise PreconditionError("irreducibility needs a nonempty square matrix")
    if M.nrows == 1:
        return M[0, 0] > 0, M[0, 0] > 0
    G = _digraph(M)
    irreducible = nx.is_strongly_connected(G)
    return irreducible, irreducible and nx.is_aperiodic(G)


@dataclass(frozen=True)
class IrreducibilityResult:
    irreducible: bool
    primitive: bool


def check_irreducibility(P) -> IrreducibilityResult:
    M = abelianization(P) if isinstance(P, Presentation) else IntMatrix.of(P)
    return IrreducibilityResult(*matrix_irreducibility(M))


def is_permutation_matrix(M: IntMatrix) -> bool:
    return (all(x in (0, 1) for r in M.rows for x in r)
            and all(sum(r) == 1 for r in M.rows)
            and all(sum(M.column(j)) == 1 for j in range(M.ncols)))


def check_expansion(P) -> str:
    """Exact verdict: irreducible and not a permutation matrix."""
    M = abelianization(P) if isinstance(P, Presentation) else IntMatrix.of(P)
    if not matrix_irreducibility(M)[0]:
        return INDETERMINATE
    return FAIL if is_permutation_matrix(M) else PASS


# ---------------------------------------------------------------- Perron data

@dataclass(frozen=True)
class ExpansionReport:
    """Perron root and natural edge lengths.

    Attributes
    ----------
    lam : float
        Perron root of the occurrence matrix (the expansion factor).
    lengths : dict
        Edge name to positive length, summing to 1, with
        ``lam * length(e) = sum of lengths of the letters of f̃(e)``.
    exact_verdict : bool
        The integer expansion verdict.
    iterations : int
    """

    lam: float
    lengths: dict
    exact_verdict: bool
    iterations: int = 0


def natural_lengths(P, tol: float = 1e-12, max_iter: int = 1_000_000) -> ExpansionReport:
    """Power iteration for the Perron eigenvector.

    Iterates with ``M + I`` so that periodic irreducible matrices converge
    too; the eigenvector is unchanged by the shift.
    """
    if isinstance(P, Presentation):
        M, labels = abelianization(P), P.edge_names
    else:
        M = IntMatrix.of(P)
        labels = M.row_labels or tuple(str(i) for i in range(M.nrows))
    if not matrix_irreducibility(M)[0]:
        raise PreconditionError("natural lengths need an irreducible occurrence matrix")
    A = np.array(M.rows, dtype=float)
    B = A + np.eye(len(A))
    v = np.full(len(A), 1.0 / len(A))
    for it in range(1, max_iter + 1):
        w = B @ v
        w /= w.sum()
        if np.max(np.abs(w - v)) <= tol * np.max(np.abs(w)):
            v = w
            break
        v = w
    else:
        raise AlgorithmAssumptionViolated(f"power iteration did not converge in {max_iter} steps")
    lam = float(v @ (A @ v) / (v @ v))
    exact = not is_permutation_matrix(M)
    return ExpansionReport(lam, dict(zip(labels, (float(x) for x in v))), exact, it)


# ---------------------------------------------------------------- report

@dataclass
class AxiomReport:
    """Aggregated verdicts; ``witnesses`` holds an entry for every failing axiom."""

    irreducible: bool
    primitive: bool
    flattening: str
    flattening_exponents: dict
    expansion: str
    nonfolding: str
    markov: str = PASS
    lam: float | None = None
    lengths: dict | None = None
    witnesses: dict = field(default_factory=dict)

    @property
    def indecomposable_nonwandering(self) -> str:
        return PASS if self.irreducible else FAIL

    @property
    def mixing(self) -> bool:
        return self.primitive

    @property
    def flattening_exponent(self):
        if self.flattening != PASS:
            return None
        return max(self.flattening_exponents.values())

    @property
    def classification(self) -> str:
        others = (self.indecomposable_nonwandering, self.expansion, self.nonfolding, self.markov)
        if all(v == PASS for v in others):
            return "solenoid" if self.flattening == PASS else "branched solenoid"
        return "invalid"

    @property
    def is_solenoid(self) -> bool:
        return self.classification == "solenoid"

    def to_dict(self) -> dict:
        return {
            "classification": self.classification,
            "axioms": {
                "indecomposable_nonwandering": self.indecomposable_nonwandering,
                "flattening": self.flattening,
                "expansion": self.expansion,
                "nonfolding": self.nonfolding,
                "markov": self.markov,
            },
            "mixing": self.primitive,
            "flattening_exponent": self.flattening_exponent,
            "lambda": self.lam,
            "lengths": self.lengths,
            "witnesses": self.witnesses,
            "notes": [
                "indecomposability and nonwandering are decided as irreducibility of the occurrence matrix",
                "expansion certified via Perron data",
            ],
        }


def validate(P: Presentation) -> AxiomReport:
    """Run every check and classify ``P``.

    Examples
    --------
    >>> from solenoids.fixtures import load_fixture
    >>> validate(load_fixture("swap_four_edge")).classification
    'solenoid'
    """
    irr = check_irreducibility(P)
    nf = check_nonfolding(P)
    fl = check_flattening(P)
    exp = check_expansion(P)
    witnesses: dict = {}
    if not irr.irreducible:
        M = abelianization(P)
        comps = [sorted(P.edge_names[i] for i in c)
                 for c in nx.strongly_connected_components(_digraph(M))]
        witnesses["indecomposable_nonwandering"] = {"components": sorted(comps)}
    if not nf.passed:
        witnesses["nonfolding"] = [str(x) for x in nf.witness]
    if not fl.passed:
        witnesses["flattening"] = {v: fl.stable_sizes[v] for v in fl.failing_vertices}
    if exp == FAIL:
        witnesses["expansion"] = "occurrence matrix is a permutation matrix"
    lam = lengths = None
    if irr.irreducible:
        rep = natural_lengths(P)
        lam, lengths = rep.lam, rep.lengths
    return AxiomReport(
        irreducible=irr.irreducible,
        primitive=irr.primitive,
        flattening=PASS if fl.passed else FAIL,
        flattening_exponents=fl.exponents,
        expansion=exp,
        nonfolding=PASS if nf.passed else FAIL,
        lam=lam,
        lengths=lengths,
        witnesses=witnesses,
    )
