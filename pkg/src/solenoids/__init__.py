"""Symbolic presentations of one-dimensional solenoids.

A presentation is a finite graph with an edge substitution.  The package
checks the solenoid axioms, enumerates periodic orbits, builds the canonical
presentation at a set of orbits, and computes invariants of the resulting
shift of finite type.
"""

from .axioms import AxiomReport, natural_lengths, validate
from .errors import (AlgorithmAssumptionViolated, BudgetExceeded, ParseError,
                     PreconditionError, PresentationError, SolenoidError)
from .intmatrix import IntMatrix
from .invariants import (AbelianGroup, bf_group, build_cover, entropy, is_mixing,
                         smith_normal_form, total_column_amalgamation)
from .orbits import Orbit, compare_addresses, enumerate_orbits, parse_orbit_spec
from .presentation import (Letter, Presentation, abelianization, apply_rule,
                           build_presentation, load_presentation, parse_presentation,
                           presentations_isomorphic, serialize, word)
from .rebase import RebaseResult, rebase
from .shift_equivalence import (GraphMapPair, lift_block_map, parse_map_file,
                                verify_shift_equivalence)
from .fixtures import load_fixture

__all__ = [
    "AbelianGroup", "AlgorithmAssumptionViolated", "AxiomReport", "BudgetExceeded",
    "GraphMapPair", "IntMatrix", "Letter", "Orbit", "ParseError", "PreconditionError",
    "Presentation", "PresentationError", "RebaseResult", "SolenoidError",
    "abelianization", "apply_rule", "bf_group", "build_cover", "build_presentation",
    "compare_addresses", "entropy", "enumerate_orbits", "is_mixing", "lift_block_map",
    "load_fixture", "load_presentation", "natural_lengths", "parse_map_file",
    "parse_orbit_spec", "parse_presentation", "presentations_isomorphic", "rebase",
    "serialize", "smith_normal_form", "total_column_amalgamation", "validate",
    "verify_shift_equivalence", "word",
]
