"""
Shift equivalent covers that are not one-sided conjugate
========================================================

Two presentations joined by a lag-one shift equivalence of graph maps.
The graph maps lift to sliding block codes between the SFT covers, but
the covers attached to corresponding period-two orbits have different
total column amalgamations.
"""

from solenoids import (abelianization, enumerate_orbits, lift_block_map, load_fixture,
                       parse_map_file, rebase, total_column_amalgamation, verify_shift_equivalence)
from solenoids.fixtures import fixture_path
from solenoids.invariants import matrices_permutation_equivalent
from solenoids.shift_equivalence import composite_failures

X, Y = load_fixture("wedge_efff_refined"), load_fixture("eight_edge")
pair = parse_map_file(fixture_path("refined_to_eight_edge.map").read_bytes(), X, Y)

report = verify_shift_equivalence(X, Y, pair)
for identity, ok in report.checks.items():
    print(f"{identity:24s} {ok}")

# %%
# The lift: Phi reads two letters of the X cover, Psi two letters of the Y cover.
lift = lift_block_map(X, Y, pair)
print(len(lift.phi.table), len(lift.psi.table))
print(lift.phi.to_text().splitlines()[:5])
print(composite_failures(X, Y, lift.phi, lift.psi, 1), composite_failures(Y, X, lift.psi, lift.phi, 1))

# %%
# The period-two orbits whose covers we compare.
Yp = load_fixture("wedge_efff")
xy = rebase(Yp, [enumerate_orbits(Yp, 2)[0]])
uv = rebase(Y, [o for o in enumerate_orbits(Y, 2) if o.name == "cycle(1.3 3.1)"])
Mxy, Muv = abelianization(xy.output), abelianization(uv.output)
print(Mxy.literal(), Muv.literal())

# %%
# Two-sided the covers agree (same Bowen-Franks group, elementary strong
# shift equivalence); one-sided they do not.
Txy, Tuv = total_column_amalgamation(Mxy), total_column_amalgamation(Muv)
print(Txy.literal(), Tuv.literal())
print("same amalgamation:", matrices_permutation_equivalent(Txy, Tuv) is not None)
