"""Convex-function calculus: frozen values, subgradient inequality, the
max-formula for directional derivatives, and serialization round trips."""

from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mosipcert.cones import FGCone, HPoly, Polytope
from mosipcert.errors import ModelError, UnsupportedOperationError
from mosipcert.funcs import (
    Affine,
    MaxAffine,
    NegSqrtParabola1D,
    Scaled2Norm,
    ScaledNormInf,
    SupportPolygon,
    dir_derivative,
    eval_float,
    evaluate,
    func_from_json,
    func_to_json,
    subdiff,
    subdiff_set,
)
from mosipcert.rationals import NEG_INF, POS_INF, NegSqrt, Q, ext_float, qdot


def test_affine_basics():
    f = Affine([2, -1], Q(3))
    assert evaluate(f, [1, 1]) == Q(4)
    assert subdiff(f, [1, 1]).vertices == ((Q(2), Q(-1)),)
    assert dir_derivative(f, [1, 1], [1, 0]) == Q(2)


def test_max_affine_kink_recovers_interval():
    f = MaxAffine([([1], Q(0)), ([3], Q(0))])
    sd = subdiff(f, [0])
    assert sd.vertices == ((Q(1),), (Q(3),))
    assert dir_derivative(f, [0], [1]) == Q(3)
    assert dir_derivative(f, [0], [-1]) == Q(-1)
    # off the kink only one piece is active
    assert subdiff(f, [1]).vertices == ((Q(3),),)
    assert subdiff(f, [-1]).vertices == ((Q(1),),)


def test_support_polygon_at_origin_is_whole_polygon():
    verts = [[1, 0], [0, 1], [-1, -1]]
    f = SupportPolygon(verts)
    assert evaluate(f, [0, 0]) == Q(0)
    sd = subdiff(f, [0, 0])
    assert set(sd.vertices) == {(Q(1), Q(0)), (Q(0), Q(1)), (Q(-1), Q(-1))}
    # away from the origin the maximizing vertex is unique
    assert subdiff(f, [1, 0]).vertices == ((Q(1), Q(0)),)


def test_support_polygon_value_is_support_function():
    f = SupportPolygon([[2, 1], [-1, 3]])
    assert evaluate(f, [1, 1]) == Q(3)
    assert evaluate(f, [-1, 0]) == Q(1)


def test_scaled_norm_inf_matches_expansion():
    f = ScaledNormInf([1, -1], Q(3, 2))
    g = f.as_max_affine()
    for x in ([0, 0], [1, -1], [2, 5], [-3, Q(1, 2)]):
        assert evaluate(f, x) == evaluate(g, x)
        assert subdiff(f, x).vertices == subdiff(g, x).vertices
    # at the center every signed axis gradient is active
    assert len(subdiff(f, [1, -1]).vertices) == 4


def test_scaled_2norm_exact_only_on_rational_points():
    f = Scaled2Norm([0, 0], Q(1))
    assert evaluate(f, [3, 4]) == Q(5)
    sd = subdiff(f, [3, 4])
    assert sd.vertices == ((Q(3, 5), Q(4, 5)),)
    with pytest.raises(UnsupportedOperationError):
        evaluate(f, [1, 1])
    with pytest.raises(UnsupportedOperationError):
        subdiff(f, [0, 0])
    assert eval_float(f, [1, 1]) == pytest.approx(2**0.5)
    assert dir_derivative(f, [0, 0], [3, 4]) == Q(5)


def test_neg_sqrt_parabola_values_and_domain():
    g = NegSqrtParabola1D(Q(1))
    assert evaluate(g, [1]) == Q(-1)  # bottom of the arc
    assert evaluate(g, [0]) == Q(0)
    assert evaluate(g, [2]) == Q(0)
    assert evaluate(g, [-1]) is POS_INF
    assert evaluate(g, [3]) is POS_INF
    val = evaluate(g, [Q(1, 2)])
    assert isinstance(val, NegSqrt) and val.radicand == Q(3, 4)
    assert val < 0 and val > Q(-1)


def test_neg_sqrt_parabola_boundary_subdifferential_is_empty():
    g = NegSqrtParabola1D(Q(1))
    for point in ([0], [2]):
        sd = subdiff_set(g, point)
        assert sd.is_empty
    with pytest.raises(ModelError):
        subdiff_set(g, [-1])


def test_neg_sqrt_parabola_boundary_directional_derivatives():
    g = NegSqrtParabola1D(Q(1))
    assert dir_derivative(g, [0], [1]) is NEG_INF
    assert dir_derivative(g, [0], [-1]) is POS_INF
    assert dir_derivative(g, [0], [0]) == Q(0)
    assert dir_derivative(g, [2], [-1]) is NEG_INF
    assert dir_derivative(g, [2], [1]) is POS_INF


def test_neg_sqrt_parabola_interior_slopes():
    g = NegSqrtParabola1D(Q(1))
    # (x - t)^2 / (x (2t - x)) = 16/9 at x = 1/5, so the slope is -4/3
    sd = subdiff(g, [Q(1, 5)])
    assert sd.vertices == ((Q(-4, 3),),)
    assert dir_derivative(g, [Q(1, 5)], [1]) == Q(-4, 3)
    # mirrored point: slope +4/3
    assert subdiff(g, [Q(9, 5)]).vertices == ((Q(4, 3),),)
    with pytest.raises(UnsupportedOperationError):
        subdiff(g, [Q(1, 2)])  # slope -1/sqrt(3) is irrational


def test_neg_sqrt_parabola_subgradient_inequality_exact():
    g = NegSqrtParabola1D(Q(1))
    x, slope = Q(1, 5), Q(-4, 3)
    fx = evaluate(g, [x])
    for y in (Q(0), Q(1, 10), Q(1, 2), Q(1), Q(3, 2), Q(2)):
        fy = evaluate(g, [y])
        assert fy >= fx + slope * (y - x)


def test_domain_indicator_changes_the_calculus():
    # f = 0 restricted to the nonpositive orthant: at the origin the
    # subdifferential is the normal cone spanned by the axes.
    dom = HPoly(2, [((Q(1), Q(0)), Q(0)), ((Q(0), Q(1)), Q(0))])
    f = Affine([0, 0], Q(0), domain=dom)
    assert evaluate(f, [1, 1]) is POS_INF
    sd = subdiff_set(f, [0, 0])
    assert sd.base.vertices == ((Q(0), Q(0)),)
    assert set(sd.recession.generators) == {(Q(1), Q(0)), (Q(0), Q(1))}
    with pytest.raises(UnsupportedOperationError):
        subdiff(f, [0, 0])
    assert dir_derivative(f, [0, 0], [1, 0]) is POS_INF
    assert dir_derivative(f, [0, 0], [-1, -2]) == Q(0)
    # interior of the domain: plain calculus again
    assert subdiff(f, [-1, -1]).vertices == ((Q(0), Q(0)),)


rational = st.fractions(min_value=-4, max_value=4, max_denominator=6)
vec2 = st.lists(rational, min_size=2, max_size=2)


@st.composite
def max_affines(draw):
    k = draw(st.integers(min_value=1, max_value=4))
    pieces = [
        (draw(vec2), Q(draw(rational))) for _ in range(k)
    ]
    return MaxAffine([([Q(c) for c in a], b) for a, b in pieces])


@settings(max_examples=80, deadline=None)
@given(f=max_affines(), x=vec2, y=vec2)
def test_subgradient_inequality_exact(f, x, y):
    x = [Q(c) for c in x]
    y = [Q(c) for c in y]
    fx, fy = evaluate(f, x), evaluate(f, y)
    step = [b - a for a, b in zip(x, y)]
    for g in subdiff(f, x).vertices:
        assert fy >= fx + qdot(g, step)


@settings(max_examples=80, deadline=None)
@given(f=max_affines(), x=vec2, d=vec2)
def test_max_formula_for_directional_derivative(f, x, d):
    x = [Q(c) for c in x]
    d = [Q(c) for c in d]
    want = max(qdot(g, d) for g in subdiff(f, x).vertices)
    assert dir_derivative(f, x, d) == want


@settings(max_examples=60, deadline=None)
@given(f=max_affines(), x=vec2)
def test_float_path_tracks_exact_path(f, x):
    x = [Q(c) for c in x]
    assert eval_float(f, x) == pytest.approx(ext_float(evaluate(f, x)), abs=1e-9)


def test_neg_sqrt_parabola_float_convexity_spot_check():
    g = NegSqrtParabola1D(Q(2))
    xs = [0.1 + 0.15 * k for k in range(25) if 0.1 + 0.15 * k < 4.0]
    for a in xs:
        for b in xs:
            mid = eval_float(g, [(a + b) / 2])
            assert mid <= (eval_float(g, [a]) + eval_float(g, [b])) / 2 + 1e-9


def test_parabola_family_is_pointwise_monotone_in_t():
    # deeper arcs for larger t on the shared domain
    g1, g2 = NegSqrtParabola1D(Q(1)), NegSqrtParabola1D(Q(3, 2))
    for x in (Q(1, 5), Q(1, 2), Q(1), Q(3, 2)):
        assert evaluate(g2, [x]) <= evaluate(g1, [x])


def test_serialization_round_trip():
    dom = HPoly(1, [((Q(1),), Q(0))])
    funcs = [
        Affine([2, -1], Q(3, 2)),
        Affine([1], Q(0), domain=dom),
        MaxAffine([([1, 0], Q(0)), ([0, 1], Q(-1, 3))]),
        SupportPolygon([[1, 2], [-1, 0]]),
        ScaledNormInf([1, -1], Q(3, 2)),
        Scaled2Norm([0, 1], Q(2)),
        NegSqrtParabola1D(Q(5, 4)),
    ]
    for f in funcs:
        assert func_from_json(func_to_json(f)) == f


def test_unknown_kind_rejected():
    with pytest.raises(ModelError):
        func_from_json({"kind": "mystery"})
