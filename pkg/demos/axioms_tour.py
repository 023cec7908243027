"""
Checking the solenoid axioms
============================

A presentation is a graph with an edge substitution.  Below we load the
bundled examples, classify each one and look at the evidence behind the
verdicts that fail.
"""

from solenoids import load_fixture, validate
from solenoids.fixtures import names

# One line per bundled presentation.
for name in names():
    report = validate(load_fixture(name))
    lam = "undefined" if report.lam is None else f"{report.lam:.6f}"
    print(f"{name:20s} {report.classification:18s} lambda={lam}")

# %%
# The doubling-with-a-fold circle: its square folds an edge back on itself,
# and the witness is the pair of letters that meet head to head.
fold = validate(load_fixture("circle_fold"))
print(fold.witnesses["nonfolding"])

# %%
# The split wedge has a reducible occurrence matrix; the expansion check
# is then undecided rather than failed.
split = validate(load_fixture("wedge_split"))
print(split.irreducible, split.expansion)

# %%
# A presentation that needs two iterates before every vertex looks like an arc.
print(validate(load_fixture("swap_fixed_point")).flattening_exponent)

# %%
# Natural lengths: lam * l = M l, normalised to total length one.
rep = validate(load_fixture("swap_four_edge"))
print(rep.lam, rep.lengths)
