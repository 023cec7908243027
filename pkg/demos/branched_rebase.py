"""
Rebasing a branched solenoid
============================

The wedge below does not flatten at its branch point.  Rebasing at the
interior fixed point in b produces a presentation that does flatten, so
the two inverse limits cannot be conjugate.
"""

from solenoids import load_fixture, parse_orbit_spec, rebase, validate

P = load_fixture("wedge_branched")
print(P)
print(validate(P).classification, validate(P).witnesses)

res = rebase(P, parse_orbit_spec(P, "b.2"), force=True)
print(res.output)
print(res.rho_text())
print(validate(res.output).classification)
print(res.diagnostics["warnings"])
