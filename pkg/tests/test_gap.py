from __future__ import annotations

import json
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mosipcert import gap, instances
from mosipcert.errors import ModelError, ParseError, UnsupportedOperationError
from mosipcert.funcs import Affine, HPoly, MaxAffine, subdiff
from mosipcert.rationals import ONE, POS_INF, ZERO, Q
from mosipcert.problem import CandidatePoint, FiniteFamily, MosipProblem

from helpers_instances import random_polyhedral_problem


@pytest.fixture(scope="module")
def ex1():
    p = instances.linear_tail_problem()
    return p, CandidatePoint.build(p, [0])


@pytest.fixture(scope="module")
def ex2():
    p = instances.octagon_problem()
    return p, CandidatePoint.build(p, [0, 0])


def _unit_interval() -> tuple:
    """minimize x over [0, 1], evaluated at the wrong endpoint x = 1."""
    p = MosipProblem(
        dimension=1,
        objectives=[Affine([1], 0)],
        constraints=FiniteFamily([Affine([1], -1), Affine([-1], 0)]),
        feasible_set=HPoly(1, [((Q(1),), Q(1)), ((Q(-1),), Q(0))]),
        annotations={"name": "unit-interval"},
    )
    return p, CandidatePoint.build(p, [1])


def _halfline_descent() -> tuple:
    """minimize -x over [0, inf): the gap value is +inf at the origin."""
    p = MosipProblem(
        dimension=1,
        objectives=[Affine([-1], 0)],
        constraints=FiniteFamily([Affine([-1], 0)]),
        feasible_set=HPoly(1, [((Q(-1),), Q(0))]),
        annotations={"name": "halfline"},
    )
    return p, CandidatePoint.build(p, [0])


SIMPLEX_2 = [
    (ONE, ZERO),
    (ZERO, ONE),
    (Q(1, 2), Q(1, 2)),
    (Q(1, 3), Q(2, 3)),
    (Q(2, 3), Q(1, 3)),
    (Q(1, 4), Q(3, 4)),
    (Q(3, 4), Q(1, 4)),
    (Q(1, 5), Q(4, 5)),
    (Q(4, 5), Q(1, 5)),
    (Q(9, 10), Q(1, 10)),
    (Q(1, 10), Q(9, 10)),
]


# ---------------------------------------------------------------------------
# evaluation


class TestEval:
    def test_zero_at_the_documented_solution(self, ex1):
        p, cp = ex1
        for lam in SIMPLEX_2:
            assert gap.gap_eval(p, cp.x, [(Q(-2),), (Q(-1),)], lam) == ZERO

    def test_closed_form_away_from_the_solution(self, ex1):
        # sup_{y <= 0} c(x - y) with c = -(2 lam1 + lam2) equals -c * (-x)
        p, _ = ex1
        for lam in SIMPLEX_2:
            expected = (2 * lam[0] + lam[1]) * ONE
            assert gap.gap_eval(p, (Q(-1),), [(Q(-2),), (Q(-1),)], lam) == expected

    def test_closed_form_on_octagon(self, ex2):
        p, _ = ex2
        xi = [(Q(-1), ZERO), (Q(-1), ZERO)]
        assert gap.gap_eval(p, (Q(-1), Q(-1)), xi, (Q(1, 2), Q(1, 2))) == ONE
        assert gap.gap_eval(p, (ZERO, ZERO), xi, (Q(1, 2), Q(1, 2))) == ZERO

    def test_positive_at_refuted_candidate(self):
        p, cp = _unit_interval()
        for lam in ((ONE,), (Q(2),), (Q(1, 3),)):
            assert gap.gap_eval(p, cp.x, [(ONE,)], lam) == lam[0]

    def test_unbounded_value_is_positive_infinity(self):
        p, cp = _halfline_descent()
        assert gap.gap_eval(p, cp.x, [(Q(-1),)], (ONE,)) is POS_INF

    def test_rejects_selection_outside_subdifferential(self, ex1):
        p, cp = ex1
        with pytest.raises(gap.SubgradientPreconditionError) as exc:
            gap.gap_eval(p, cp.x, [(Q(5),), (Q(-1),)], (Q(1, 2), Q(1, 2)))
        assert exc.value.index == 0
        assert exc.value.separator is not None

    def test_rejects_negative_weights(self, ex1):
        p, cp = ex1
        with pytest.raises(ModelError):
            gap.gap_eval(p, cp.x, [(Q(-2),), (Q(-1),)], (Q(2), Q(-1)))

    def test_rejects_length_mismatch(self, ex1):
        p, cp = ex1
        with pytest.raises(ModelError):
            gap.gap_eval(p, cp.x, [(Q(-2),)], (ONE,))

    def test_zero_subgradient_gives_zero_everywhere(self):
        p = MosipProblem(
            dimension=1,
            objectives=[MaxAffine([([1], 0), ([-1], 0)])],
            constraints=FiniteFamily([Affine([1], -1)]),
            feasible_set=HPoly(1, [((Q(1),), Q(1))]),
            annotations={"name": "abs"},
        )
        assert gap.gap_eval(p, (ZERO,), [(ZERO,)], (ONE,)) == ZERO

    @settings(max_examples=40, deadline=None)
    @given(
        lam1=st.fractions(min_value=0, max_value=3),
        lam2=st.fractions(min_value=0, max_value=3),
        scale=st.fractions(min_value=0, max_value=5),
    )
    def test_positive_homogeneity_in_the_weights(self, ex1, lam1, lam2, scale):
        p, _ = ex1
        lam = (Q(lam1), Q(lam2))
        scaled = tuple(Q(scale) * l for l in lam)
        base = gap.gap_eval(p, (Q(-1),), [(Q(-2),), (Q(-1),)], lam)
        assert gap.gap_eval(p, (Q(-1),), [(Q(-2),), (Q(-1),)], scaled) == Q(scale) * base


# ---------------------------------------------------------------------------
# zero search


class TestZeroSearch:
    def test_weak_witness_on_linear_tail(self, ex1):
        p, cp = ex1
        w = gap.gap_zero_search(p, cp)
        assert isinstance(w, gap.GapWitness)
        assert w.mode == gap.WEAK_MODE
        assert w.value == ZERO
        assert w.lam == (ONE, ZERO)
        assert gap.witness_issues(p, cp, w) == []

    def test_strong_witness_on_linear_tail_is_balanced(self, ex1):
        # the maximal margin is 1/2, which pins lam = (1/2, 1/2) uniquely
        p, cp = ex1
        w = gap.gap_zero_search(p, cp, gap.STRONG_MODE)
        assert isinstance(w, gap.GapWitness)
        assert w.lam == (Q(1, 2), Q(1, 2))
        assert all(l > 0 for l in w.lam)
        assert gap.witness_issues(p, cp, w) == []

    def test_octagon_witnesses_match_documented_selection(self, ex2):
        p, cp = ex2
        for mode in (gap.WEAK_MODE, gap.STRONG_MODE):
            w = gap.gap_zero_search(p, cp, mode)
            assert isinstance(w, gap.GapWitness)
            assert w.xi == ((Q(-1), ZERO), (Q(-1), ZERO))
            assert gap.witness_issues(p, cp, w) == []

    def test_refusal_at_wrong_endpoint(self):
        p, cp = _unit_interval()
        for mode in (gap.WEAK_MODE, gap.STRONG_MODE):
            out = gap.gap_zero_search(p, cp, mode)
            assert isinstance(out, gap.GapRefusal)
            assert out.mode == mode
            assert out.reason

    def test_zero_tilt_matches_plain_search(self, ex1):
        p, cp = ex1
        plain = gap.gap_zero_search(p, cp)
        tilted = gap._zero_search(p, cp, gap.WEAK_MODE, tilt=(ZERO,))
        assert tilted.lam == plain.lam
        assert tilted.xi == plain.xi

    def test_search_requires_feasible_set_data(self):
        p = MosipProblem(
            dimension=1,
            objectives=[Affine([1], 0)],
            constraints=FiniteFamily([Affine([-1], 0)]),
            feasible_set=None,
            annotations={"name": "no-set"},
        )
        cp = CandidatePoint.build(p, [0])
        with pytest.raises(UnsupportedOperationError):
            gap.gap_zero_search(p, cp)
        with pytest.raises(UnsupportedOperationError):
            gap.gap_eval(p, cp.x, [(ONE,)], (ONE,))


class TestWitnessChecks:
    def test_round_trip_preserves_validity(self, ex1):
        p, cp = ex1
        w = gap.gap_zero_search(p, cp, gap.STRONG_MODE)
        text = json.dumps(gap.witness_to_json(w), sort_keys=True, indent=2)
        back = gap.witness_from_json(json.loads(text))
        assert back == w
        assert gap.witness_issues(p, cp, back) == []

    def test_malformed_documents_are_rejected(self, ex1):
        p, cp = ex1
        doc = gap.witness_to_json(gap.gap_zero_search(p, cp))
        with pytest.raises(ParseError):
            gap.witness_from_json({**doc, "mode": "weakest"})
        broken = json.loads(json.dumps(doc))
        del broken["lambda"]
        with pytest.raises(ParseError):
            gap.witness_from_json(broken)

    def test_issues_flag_tampered_weights(self, ex1):
        p, cp = ex1
        w = gap.gap_zero_search(p, cp)
        doc = json.loads(json.dumps(gap.witness_to_json(w)))
        doc["lambda"] = [[1, 1], [1, 1]]
        tampered = gap.witness_from_json(doc)
        assert gap.witness_issues(p, cp, tampered) != []

    def test_issues_flag_strongness_violation(self, ex1):
        p, cp = ex1
        w = gap.gap_zero_search(p, cp)  # weak witness: lam = (1, 0)
        doc = json.loads(json.dumps(gap.witness_to_json(w)))
        doc["mode"] = gap.STRONG_MODE
        relabeled = gap.witness_from_json(doc)
        assert any("positive" in m for m in gap.witness_issues(p, cp, relabeled))


# ---------------------------------------------------------------------------
# perturbed sweep


class TestPerturbedSweep:
    def test_linear_tail_inside_certified_radius(self, ex1):
        p, cp = ex1
        report = gap.perturbed_gap_check(p, cp, Q(2))
        assert report.all_sampled_succeed
        assert report.exact_equivalence is True
        assert report.exact_certified is True
        assert report.hypotheses_met is True
        assert report.note == ""
        # dimension one: only the two axis tilts are sampled
        assert sorted(o.w[0] for o in report.per_w) == [Q(-2), Q(2)]

    def test_linear_tail_beyond_certified_radius(self, ex1):
        p, cp = ex1
        report = gap.perturbed_gap_check(p, cp, Q(2) + Q(1, 100))
        assert report.exact_equivalence is False
        axis = [o for o in report.per_w if o.w[0] == -(Q(2) + Q(1, 100))]
        assert len(axis) == 1 and not axis[0].success
        assert not report.all_sampled_succeed

    def test_linear_tail_smaller_radius_still_succeeds(self, ex1):
        p, cp = ex1
        report = gap.perturbed_gap_check(p, cp, ONE)
        assert report.all_sampled_succeed
        assert report.exact_equivalence is True

    def test_octagon_flagged_outside_hypotheses(self, ex2):
        p, cp = ex2
        report = gap.perturbed_gap_check(p, cp, Q(1, 2))
        assert report.hypotheses_met is False
        assert "outside theorem hypotheses" in report.note
        assert len(report.per_w) > 4  # axis tilts plus sphere samples

    def test_requires_positive_radius(self, ex1):
        p, cp = ex1
        with pytest.raises(ModelError):
            gap.perturbed_gap_check(p, cp, ZERO)

    def test_every_sampled_tilt_has_norm_at_most_nu(self, ex2):
        p, cp = ex2
        nu = Q(3, 4)
        report = gap.perturbed_gap_check(p, cp, nu, sample_count=12)
        for outcome in report.per_w:
            assert sum(c * c for c in outcome.w) <= nu * nu

    def test_report_serialization(self, ex1):
        p, cp = ex1
        report = gap.perturbed_gap_check(p, cp, Q(2))
        doc = gap.report_to_json(report)
        text = json.dumps(doc, sort_keys=True)
        assert json.loads(text) == doc
        assert doc["mode"] == "perturbed"
        assert doc["exact_certified"] is True

    def test_refusal_serialization(self):
        p, cp = _unit_interval()
        out = gap.gap_zero_search(p, cp)
        doc = gap.report_to_json(out)
        assert doc["witness"] is None
        assert doc["reason"]


# ---------------------------------------------------------------------------
# randomized structural soundness


@settings(max_examples=50, deadline=None)
@given(st.integers(min_value=0, max_value=10**6))
def test_nonnegativity_and_witness_validity_on_random_instances(seed):
    rng = random.Random(seed)
    p, x = random_polyhedral_problem(rng)
    cp = CandidatePoint.build(p, x)
    # gap_eval is nonnegative at feasible points (y = x is always admissible)
    lam = tuple(Q(1, len(p.objectives)) for _ in p.objectives)
    sel = [subdiff(f, x).vertices[0] for f in p.objectives]
    value = gap.gap_eval(p, x, sel, lam)
    assert value is POS_INF or value >= 0

    out = gap.gap_zero_search(p, cp)
    if isinstance(out, gap.GapWitness):
        assert gap.witness_issues(p, cp, out) == []
    else:
        assert out.reason
