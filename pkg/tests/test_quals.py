"""Qualification checkers: fixture truth tables, witness re-verification,
implication-diagram sweeps, and the span-rank/definitional divergence."""

from __future__ import annotations

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers_instances import random_polyhedral_problem
from mosipcert.cones import FGCone, HCone, HPoly, dd_convert, span_rank
from mosipcert.funcs import Affine, MaxAffine, evaluate, subdiff_set
from mosipcert.instances import FIXTURE_BUILDERS, load_fixture
from mosipcert.problem import CandidatePoint, FiniteFamily, MosipProblem, active_set
from mosipcert.quals import (
    ARROWS,
    FAILS,
    HOLDS,
    QUAL_IDS,
    UNDECIDABLE,
    QualOptions,
    _min_max_direction,
    _subgradient_union,
    check,
    check_all,
    diagram_validate,
    report_to_json,
    reports_to_json,
    truth_table_text,
)
from mosipcert.rationals import Q, qdot


def _candidate(p):
    return CandidatePoint.build(p, [0] * p.dimension)


def _expected_status(entry):
    return entry["status"] if isinstance(entry, dict) else entry


def test_fixture_tables_match_reference_verdicts():
    for name, build in FIXTURE_BUILDERS.items():
        p = build()
        cp = _candidate(p)
        reports = check_all(p, cp)
        table = p.annotations["reference_verdicts"]
        for r in reports:
            assert r.status == _expected_status(table[r.qual]), (name, r.qual, r.notes)


def test_fixture_diagrams_have_no_violations():
    for build in FIXTURE_BUILDERS.values():
        p = build()
        cp = _candidate(p)
        assert diagram_validate(p, cp, check_all(p, cp)) == []


def test_linear_fixture_specifics():
    p = load_fixture("alternating-affine")
    cp = _candidate(p)
    by = {r.qual: r for r in check_all(p, cp)}
    # pinned-exact constraint data at the origin
    assert by["CCCQ"].provenance == "exact"
    assert by["MFCQ"].provenance == "exact"
    # the documented-discrepancy entry: definition-literal containment holds
    assert by["PLVCQ"].status == HOLDS
    assert p.annotations["reference_verdicts"]["PLVCQ"]["documented_status"] == FAILS
    slater = by["SCQ"].witness
    assert slater["kind"] == "slater_point" and slater["slack"] > 0


def test_octagon_fixture_specifics():
    p = load_fixture("octagon-support")
    cp = _candidate(p)
    by = {r.qual: r for r in check_all(p, cp)}
    assert by["CCCQ"].status == UNDECIDABLE
    assert by["CCCQ"].provenance == "approximated-subdifferentials"
    assert by["PMFCQ"].status == UNDECIDABLE
    # grid values are recorded and non-increasing as eps decreases
    values = [Q(v[1][0]) / Q(v[1][1]) if isinstance(v[1], list) else v[1] for v in by["PMFCQ"].witness["values"]]
    assert all(b <= a for a, b in zip(values, values[1:]))
    # Slater refutation survives any family extension: member 0 never negative
    assert by["SCQ"].witness == {"kind": "nonnegative_member", "index": 0}
    assert by["KTCQ"].status == HOLDS and by["KTCQ"].provenance == "exact"


def test_semicircle_fixture_specifics():
    p = load_fixture("neg-semicircle")
    cp = _candidate(p)
    by = {r.qual: r for r in check_all(p, cp)}
    assert cp.G_is_empty
    assert by["MFCQ"].status == FAILS and by["ACQ"].status == FAILS
    assert by["PMFCQ"].witness["kind"] == "empty_subgradient_union"
    assert by["PLVCQ"].witness == {"kind": "empty_subdifferential"}
    assert by["COCQ"].witness["direction"] == (1,)
    # empty active data is pinned exact by annotation
    assert by["CCCQ"].status == HOLDS


def test_missing_feasible_set_degrades_to_undecidable():
    p = MosipProblem(1, [Affine([1], 0)], FiniteFamily([MaxAffine([([1], 0), ([2], 0)])]))
    cp = CandidatePoint.build(p, [0])
    for qual in ("LFMCQ", "KTCQ", "ACQ", "WADQ", "EADQ"):
        assert check(qual, p, cp).status == UNDECIDABLE
    assert check("MFCQ", p, cp).status == HOLDS  # needs no S representation


def test_pmfcq_grid_values_monotone_on_linear_fixture():
    p = load_fixture("alternating-affine")
    values = []
    for eps in QualOptions().eps_grid:
        base, rec = _subgradient_union(p, (Q(0),), eps)
        value, _ = _min_max_direction(base, rec, 1)
        values.append(value)
    assert all(b <= a for a, b in zip(values, values[1:]))
    assert values[0] == -1 and values[-1] == -2


def test_active_set_eps_pattern_matches_subgradients():
    p = load_fixture("alternating-affine")
    base, _ = _subgradient_union(p, (Q(0),), Q(1, 2))
    assert set(base) == {(Q(1),), (Q(2),), (Q(3),)}
    assert active_set(p, [0], Q(1, 2))[:2] == [0, 3]


# ---------------------------------------------------------------------------
# witness re-verification


def _verify_witness(p, cp, r) -> None:
    w = r.witness
    if w is None:
        return
    kind = w["kind"]
    if kind == "slater_point":
        worst = max(evaluate(p.constraint(k), w["point"]) for k in p.indices())
        assert worst <= -w["slack"] < 0
    elif kind == "nonnegative_member":
        f = p.constraint(w["index"])
        for probe in ([Q(0)] * p.dimension, [Q(1)] * p.dimension, [Q(-5)] * p.dimension):
            assert evaluate(f, probe) >= 0
    elif kind == "direction":
        base, rec = _subgradient_union(p, cp.x, 0)
        if r.qual == "MFCQ":
            assert all(qdot(v, w["direction"]) < 0 for v in base)
            assert all(qdot(g, w["direction"]) <= 0 for g in rec)
    elif kind == "zero_decomposition":
        pts, alpha = w["points"], w["alpha"]
        gens, mu = w["generators"], w["mu"]
        assert sum(alpha) == 1 and all(a >= 0 for a in alpha) and all(m >= 0 for m in mu)
        for i in range(p.dimension):
            total = sum(a * v[i] for a, v in zip(alpha, pts))
            total += sum(m * g[i] for m, g in zip(mu, gens))
            assert total == 0
    elif kind == "grid_certificate":
        base, rec = _subgradient_union(p, cp.x, w["eps"])
        assert max(qdot(v, w["direction"]) for v in base) == w["value"] < 0
        assert all(qdot(g, w["direction"]) <= 0 for g in rec)
    elif kind == "memberships":
        for entry in w["entries"]:
            target, coeffs = entry["vertex"], entry["coefficients"]
            gens = cp.G_star.generators
            assert all(c >= 0 for c in coeffs)
            for i in range(p.dimension):
                assert sum(c * g[i] for c, g in zip(coeffs, gens)) == target[i]
    elif kind == "non_member_vertex":
        from mosipcert.cones import cone_member

        assert cone_member(w["vertex"], cp.G_star) is None
    elif kind == "span_rank":
        assert span_rank(w["points"]) == w["rank"]
        assert (w["rank"] == w["needed"]) == (r.status == HOLDS)
    elif kind == "escaping_direction":
        d = w["direction"]
        assert cp.C is not None and not cp.C.member(d)
    elif kind == "escaping_generator" and r.qual == "LFMCQ":
        d = w["direction"]
        if w["escapes"] == "active-gradient cone":
            assert cp.N.member(d) is not None  # direction came from N
            from mosipcert.cones import cone_member

            assert cone_member(d, cp.G_star) is None


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(min_value=0, max_value=10**9))
def test_generated_instances_witnesses_verify(seed):
    p, x = random_polyhedral_problem(random.Random(seed))
    cp = CandidatePoint.build(p, x)
    for r in check_all(p, cp):
        assert r.status in (HOLDS, FAILS)  # finite exact data decides everything
        assert r.provenance == "exact"
        _verify_witness(p, cp, r)


@settings(max_examples=150, deadline=None)
@given(seed=st.integers(min_value=0, max_value=10**9))
def test_generated_instances_diagram_clean(seed):
    p, x = random_polyhedral_problem(random.Random(seed))
    cp = CandidatePoint.build(p, x)
    reports = check_all(p, cp)
    violations = diagram_validate(p, cp, reports)
    assert violations == [], [v.detail for v in violations]


# ---------------------------------------------------------------------------
# the span-rank shortcut vs the definitional generator test


def _definitional_moq(p, cp) -> bool:
    """F^0 inside {0} union the strict-descent sets of the objectives,
    evaluated on double-description generators of F^0."""
    f0 = dd_convert(HCone(p.dimension, cp.F))
    for g in f0.generators:
        decreasing = False
        for f in p.objectives:
            sd = subdiff_set(f, cp.x)
            if max(qdot(v, g) for v in sd.base.vertices) < 0 and all(
                qdot(r, g) <= 0 for r in sd.recession.generators
            ):
                decreasing = True
                break
        if not decreasing:
            return False
    return True


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(min_value=0, max_value=10**9))
def test_moq_matches_definitional_test_for_singleton_subdifferentials(seed):
    rng = random.Random(seed)
    n = rng.randint(1, 3)
    objectives = [
        Affine([Q(rng.randint(-3, 3)) for _ in range(n)], 0)
        for _ in range(rng.randint(1, 3))
    ]
    if all(all(c == 0 for c in f.a) for f in objectives):
        objectives[0] = Affine([Q(1)] + [Q(0)] * (n - 1), 0)
    p = MosipProblem(
        n,
        objectives,
        FiniteFamily([Affine([Q(0)] * n, Q(-1))]),
        feasible_set=HPoly(n, []),
    )
    cp = CandidatePoint.build(p, [0] * n)
    rank_test = span_rank(cp.F) == n
    assert rank_test == _definitional_moq(p, cp)


def test_span_rank_diverges_from_definitional_test_on_multi_vertex_subdifferentials():
    # conv{(1,0),(0,-1)} and {(-1,0)} together span the plane, yet the
    # direction (0,1) lies in F^0 with no objective strictly decreasing along
    # it: the span-rank shortcut is only equivalent to the definitional test
    # when every objective subdifferential is a singleton.
    p = MosipProblem(
        2,
        [MaxAffine([([1, 0], 0), ([0, -1], 0)]), Affine([-1, 0], 0)],
        FiniteFamily([Affine([0, 0], -1)]),
        feasible_set=HPoly(2, []),
    )
    cp = CandidatePoint.build(p, [0, 0])
    assert span_rank(cp.F) == 2  # the rank test reports Holds
    assert not _definitional_moq(p, cp)  # the definitional test disagrees
    assert check("MOQ", p, cp).status == HOLDS  # the checker follows the rank test


# ---------------------------------------------------------------------------
# serialization and table rendering


def test_reports_serialize_to_plain_json():
    import json

    p = load_fixture("alternating-affine")
    cp = _candidate(p)
    doc = reports_to_json(check_all(p, cp))
    text = json.dumps(doc, sort_keys=True)
    assert json.loads(text) == doc  # only plain JSON types survive the dump
    kinds = {r["witness"]["kind"] for r in doc if r["witness"]}
    assert {"slater_point", "span_rank", "mutual_containment"} <= kinds
    scq = next(r for r in doc if r["qual"] == "SCQ")
    num, den = scq["witness"]["slack"]
    assert isinstance(num, int) and isinstance(den, int) and num > 0


def test_truth_table_text_shape():
    p = load_fixture("neg-semicircle")
    cp = _candidate(p)
    text = truth_table_text(check_all(p, cp))
    lines = text.strip().splitlines()
    assert len(lines) == 2 + len(QUAL_IDS)
    assert lines[0].startswith("QUAL")
    assert lines[2].startswith("SCQ    Holds")


def test_arrow_labels_and_count():
    assert len(ARROWS) == 16
    labels = [a.label() for a in ARROWS]
    assert "SSCQ => SCQ" in labels
    assert "ACQ => EADQ [single_objective]" in labels
