"""mosipcert: certification toolkit for convex multiobjective semi-infinite programs.

Given a problem (finitely many convex objectives, an infinite — truncated —
family of convex constraints) and a candidate feasible point, the toolkit
decides which data qualifications hold, searches for weak/strong/perturbed
KKT multiplier certificates and gap-function zero witnesses, classifies the
point (weak efficient / efficient / isolated efficient) with theorem-backed
justifications, and cross-validates everything against a floating-point
sampling oracle.  All certification arithmetic is exact rational.
"""

from __future__ import annotations

from mosipcert.gap import gap_eval, gap_zero_search, perturbed_gap_check
from mosipcert.instances import available_fixtures, load_fixture
from mosipcert.kkt import assemble_claims, perturbed_kkt, strong_kkt, weak_kkt
from mosipcert.oracle import classify_grid
from mosipcert.problem import CandidatePoint, MosipProblem, load_problem
from mosipcert.quals import check_all, diagram_validate
from mosipcert.rationals import Q

__version__ = "0.1.0"

__all__ = [
    "CandidatePoint",
    "MosipProblem",
    "Q",
    "assemble_claims",
    "available_fixtures",
    "check_all",
    "classify_grid",
    "diagram_validate",
    "gap_eval",
    "gap_zero_search",
    "load_fixture",
    "load_problem",
    "perturbed_gap_check",
    "perturbed_kkt",
    "strong_kkt",
    "weak_kkt",
    "__version__",
]
