"""Convex function calculus: exact evaluation (extended-real), subdifferentials
as polytopes (plus a recession cone when a domain boundary makes them
unbounded), and directional derivatives.

The function classes are a closed enumeration so that every class carries an
exact subdifferential rule — certification must not depend on a user oracle.
An optional polyhedral `domain` turns f into f + indicator(domain): evaluation
is +inf outside, the subdifferential gains the domain's normal cone at active
boundary points, and directional derivatives become +inf outside the feasible
direction cone.

Exactness boundaries (by design):
* Scaled2Norm exists for the floating-point search oracle; exact calls succeed
  only where the values are rational (perfect squares) and raise
  UnsupportedOperationError otherwise.
* NegSqrtParabola1D(t) is g(x) = -sqrt(2tx - x^2) on [0, 2t], +inf outside;
  at the domain boundary the subdifferential is exactly empty and the
  directional derivative is the closed-form +-inf.  Interior subgradients are
  returned when rational, refused otherwise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Union

from .cones import FGCone, HPoly, Polytope
from .errors import ModelError, UnsupportedOperationError
from .rationals import (
    NEG_INF,
    POS_INF,
    NegSqrt,
    Q,
    ZERO,
    as_q,
    is_finite,
    qdot,
    sqrt_exact,
    vec_q,
)


@dataclass(frozen=True)
class SubdiffSet:
    """base + recession: the (possibly unbounded) subdifferential at a point."""

    base: Polytope
    recession: FGCone

    @property
    def is_empty(self) -> bool:
        return self.base.is_empty

    @property
    def is_bounded(self) -> bool:
        return self.recession.is_zero

    def vertices(self) -> tuple:
        return self.base.vertices


@dataclass(frozen=True)
class Affine:
    a: tuple
    b: Q
    domain: Optional[HPoly] = None

    def __init__(self, a, b, domain: Optional[HPoly] = None):
        object.__setattr__(self, "a", tuple(vec_q(a)))
        object.__setattr__(self, "b", as_q(b))
        object.__setattr__(self, "domain", domain)

    @property
    def dim(self) -> int:
        return len(self.a)

    def pieces_at(self, x) -> list:
        return [self.a]


@dataclass(frozen=True)
class MaxAffine:
    pieces: tuple  # ((a: tuple, b: Q), ...)
    domain: Optional[HPoly] = None

    def __init__(self, pieces, domain: Optional[HPoly] = None):
        cleaned = tuple((tuple(vec_q(a)), as_q(b)) for a, b in pieces)
        if not cleaned:
            raise ValueError("MaxAffine needs at least one piece")
        object.__setattr__(self, "pieces", cleaned)
        object.__setattr__(self, "domain", domain)

    @property
    def dim(self) -> int:
        return len(self.pieces[0][0])

    def pieces_at(self, x) -> list:
        vals = [qdot(a, x) + b for a, b in self.pieces]
        top = max(vals)
        return [a for (a, _), v in zip(self.pieces, vals) if v == top]


@dataclass(frozen=True)
class SupportPolygon:
    """Support function of conv(vertices): f(x) = max_v v'x."""

    vertices: tuple
    domain: Optional[HPoly] = None

    def __init__(self, vertices, domain: Optional[HPoly] = None):
        cleaned = tuple(tuple(vec_q(v)) for v in vertices)
        if not cleaned:
            raise ValueError("SupportPolygon needs at least one vertex")
        object.__setattr__(self, "vertices", cleaned)
        object.__setattr__(self, "domain", domain)

    @property
    def dim(self) -> int:
        return len(self.vertices[0])

    def pieces_at(self, x) -> list:
        vals = [qdot(v, x) for v in self.vertices]
        top = max(vals)
        return [v for v, val in zip(self.vertices, vals) if val == top]


@dataclass(frozen=True)
class ScaledNormInf:
    """weight * |x - center|_inf (polyhedral; expands to 2n affine pieces)."""

    center: tuple
    weight: Q

    def __init__(self, center, weight):
        w = as_q(weight)
        if w <= 0:
            raise ValueError("weight must be positive")
        object.__setattr__(self, "center", tuple(vec_q(center)))
        object.__setattr__(self, "weight", w)

    @property
    def dim(self) -> int:
        return len(self.center)

    @property
    def domain(self) -> None:
        return None

    def as_max_affine(self) -> MaxAffine:
        n = self.dim
        pieces = []
        for j in range(n):
            for sign in (self.weight, -self.weight):
                a = [ZERO] * n
                a[j] = sign
                pieces.append((a, -sign * self.center[j]))
        return MaxAffine(pieces)

    def pieces_at(self, x) -> list:
        return self.as_max_affine().pieces_at(x)


@dataclass(frozen=True)
class Scaled2Norm:
    """weight * |x - center|_2 — oracle family; exact calls only off-center
    with rational norms."""

    center: tuple
    weight: Q

    def __init__(self, center, weight):
        w = as_q(weight)
        if w <= 0:
            raise ValueError("weight must be positive")
        object.__setattr__(self, "center", tuple(vec_q(center)))
        object.__setattr__(self, "weight", w)

    @property
    def dim(self) -> int:
        return len(self.center)

    @property
    def domain(self) -> None:
        return None


@dataclass(frozen=True)
class NegSqrtParabola1D:
    """g(x) = -sqrt(2tx - x^2) on [0, 2t], +inf outside (t > 0)."""

    t: Q

    def __init__(self, t):
        t = as_q(t)
        if t <= 0:
            raise ValueError("t must be positive")
        object.__setattr__(self, "t", t)

    @property
    def dim(self) -> int:
        return 1

    @property
    def domain(self) -> None:  # intrinsic: [0, 2t] is part of the formula
        return None


@dataclass(frozen=True)
class Precomputed:
    """Exact lookup tables for test fixtures."""

    dim: int
    values: tuple  # ((point, value), ...)
    subdiffs: tuple  # ((point, SubdiffSet), ...)

    def __init__(self, dim: int, values, subdiffs=()):
        object.__setattr__(self, "dim", dim)
        object.__setattr__(
            self, "values", tuple((tuple(vec_q(p)), v) for p, v in values)
        )
        object.__setattr__(
            self, "subdiffs", tuple((tuple(vec_q(p)), s) for p, s in subdiffs)
        )

    @property
    def domain(self) -> None:
        return None

    def lookup(self, table, x):
        x = tuple(vec_q(x))
        for p, v in table:
            if p == x:
                return v
        raise ModelError(f"point {x} not in precomputed table")


ConvexFunc = Union[
    Affine, MaxAffine, SupportPolygon, ScaledNormInf, Scaled2Norm, NegSqrtParabola1D, Precomputed
]

_PIECEWISE = (Affine, MaxAffine, SupportPolygon, ScaledNormInf)


def fn_dim(f: ConvexFunc) -> int:
    return f.dim


# ---------------------------------------------------------------------------
# evaluation


def evaluate(f: ConvexFunc, x):
    """Exact extended-real value of f (with its domain) at x."""
    x = vec_q(x)
    if len(x) != f.dim:
        raise ModelError("evaluation dimension mismatch")
    if f.domain is not None and not f.domain.contains_point(x):
        return POS_INF
    if isinstance(f, Affine):
        return qdot(f.a, x) + f.b
    if isinstance(f, MaxAffine):
        return max(qdot(a, x) + b for a, b in f.pieces)
    if isinstance(f, SupportPolygon):
        return max(qdot(v, x) for v in f.vertices)
    if isinstance(f, ScaledNormInf):
        return f.weight * max(abs(xi - ci) for xi, ci in zip(x, f.center))
    if isinstance(f, Scaled2Norm):
        r = f.weight * f.weight * qdot(
            [xi - ci for xi, ci in zip(x, f.center)],
            [xi - ci for xi, ci in zip(x, f.center)],
        )
        val = sqrt_exact(r)
        if val is None:
            raise UnsupportedOperationError(
                "Scaled2Norm value is irrational here; use the float path"
            )
        return val
    if isinstance(f, NegSqrtParabola1D):
        v = x[0]
        if v < 0 or v > 2 * f.t:
            return POS_INF
        return NegSqrt(v * (2 * f.t - v))
    if isinstance(f, Precomputed):
        return f.lookup(f.values, x)
    raise TypeError(f"unknown function kind {type(f).__name__}")


def eval_float(f: ConvexFunc, x) -> float:
    """Floating-point value for the search oracle (never certifies anything)."""
    xs = [float(v) for v in x]
    if f.domain is not None:
        for a, b in f.domain.rows:
            if sum(float(c) * v for c, v in zip(a, xs)) > float(b) + 1e-12:
                return math.inf
    if isinstance(f, Affine):
        return sum(float(c) * v for c, v in zip(f.a, xs)) + float(f.b)
    if isinstance(f, MaxAffine):
        return max(
            sum(float(c) * v for c, v in zip(a, xs)) + float(b) for a, b in f.pieces
        )
    if isinstance(f, SupportPolygon):
        return max(sum(float(c) * v for c, v in zip(vtx, xs)) for vtx in f.vertices)
    if isinstance(f, ScaledNormInf):
        return float(f.weight) * max(
            abs(v - float(c)) for v, c in zip(xs, f.center)
        )
    if isinstance(f, Scaled2Norm):
        return float(f.weight) * math.sqrt(
            sum((v - float(c)) ** 2 for v, c in zip(xs, f.center))
        )
    if isinstance(f, NegSqrtParabola1D):
        t = float(f.t)
        v = xs[0]
        if v < 0 or v > 2 * t:
            return math.inf
        return -math.sqrt(max(v * (2 * t - v), 0.0))
    if isinstance(f, Precomputed):
        raise UnsupportedOperationError("precomputed tables have no float path")
    raise TypeError(f"unknown function kind {type(f).__name__}")


# ---------------------------------------------------------------------------
# subdifferentials


def subdiff_set(f: ConvexFunc, x) -> SubdiffSet:
    """Exact subdifferential of f (+ its domain indicator) at x, split into a
    bounded base polytope and a recession cone (the domain's normal cone)."""
    x = vec_q(x)
    val = evaluate(f, x)
    if not is_finite(val):
        raise ModelError("subdifferential requested outside the domain")
    n = f.dim
    if isinstance(f, _PIECEWISE):
        base = Polytope(n, f.pieces_at(x))
        rec = (
            f.domain.normal_cone(x) if f.domain is not None else FGCone(n, [])
        )
        return SubdiffSet(base, rec)
    if isinstance(f, NegSqrtParabola1D):
        v = x[0]
        if v == 0 or v == 2 * f.t:
            return SubdiffSet(Polytope(1, []), FGCone(1, []))
        # interior: g'(x) = (x - t)/sqrt(x(2t - x)), rational only sometimes
        rad = v * (2 * f.t - v)
        slope_sq = (v - f.t) * (v - f.t) / rad
        root = sqrt_exact(slope_sq)
        if root is None:
            raise UnsupportedOperationError(
                "irrational interior subgradient has no rational representation"
            )
        slope = root if v > f.t else -root
        return SubdiffSet(Polytope(1, [[slope]]), FGCone(1, []))
    if isinstance(f, Scaled2Norm):
        diff = [xi - ci for xi, ci in zip(x, f.center)]
        if all(d == 0 for d in diff):
            raise UnsupportedOperationError(
                "subdifferential of a 2-norm at its center is a ball, not a polytope"
            )
        norm = sqrt_exact(qdot(diff, diff))
        if norm is None:
            raise UnsupportedOperationError(
                "irrational 2-norm gradient has no rational representation"
            )
        grad = [f.weight * d / norm for d in diff]
        return SubdiffSet(Polytope(n, [grad]), FGCone(n, []))
    if isinstance(f, Precomputed):
        return f.lookup(f.subdiffs, x)
    raise TypeError(f"unknown function kind {type(f).__name__}")


def subdiff(f: ConvexFunc, x) -> Polytope:
    """Subdifferential as a polytope; raises when a domain boundary makes it
    unbounded (use subdiff_set there)."""
    ss = subdiff_set(f, x)
    if not ss.is_bounded:
        raise UnsupportedOperationError(
            "subdifferential is unbounded here; use subdiff_set for base + recession"
        )
    return ss.base


# ---------------------------------------------------------------------------
# directional derivatives


def dir_derivative(f: ConvexFunc, x, d):
    """f'(x; d) for f + indicator(domain), exact extended-real."""
    x, d = vec_q(x), vec_q(d)
    val = evaluate(f, x)
    if not is_finite(val):
        raise ModelError("directional derivative requested outside the domain")
    if f.domain is not None:
        for i in f.domain.active_rows(x):
            if qdot(f.domain.rows[i][0], d) > 0:
                return POS_INF
    if isinstance(f, _PIECEWISE):
        return max(qdot(a, d) for a in f.pieces_at(x))
    if isinstance(f, NegSqrtParabola1D):
        v, dd = x[0], d[0]
        if dd == 0:
            return ZERO
        if v == 0:
            return NEG_INF if dd > 0 else POS_INF
        if v == 2 * f.t:
            return NEG_INF if dd < 0 else POS_INF
        ss = subdiff_set(f, x)  # rational-slope interior or a refusal
        return qdot(ss.base.vertices[0], d)
    if isinstance(f, Scaled2Norm):
        diff = [xi - ci for xi, ci in zip(x, f.center)]
        if all(c == 0 for c in diff):
            norm_d = sqrt_exact(qdot(d, d))
            if norm_d is None:
                raise UnsupportedOperationError("irrational directional derivative")
            return f.weight * norm_d
        ss = subdiff_set(f, x)
        return qdot(ss.base.vertices[0], d)
    if isinstance(f, Precomputed):
        ss = f.lookup(f.subdiffs, x)
        if ss.is_empty:
            raise UnsupportedOperationError(
                "directional derivative of an empty-subdifferential table entry"
            )
        if any(qdot(g, d) > 0 for g in ss.recession.generators):
            return POS_INF
        return max(qdot(v, d) for v in ss.base.vertices)
    raise TypeError(f"unknown function kind {type(f).__name__}")


# ---------------------------------------------------------------------------
# serialization ([num, den] rationals throughout)


def _q_out(q) -> list:
    q = as_q(q)
    return [int(q.numerator), int(q.denominator)]


def _vec_out(v) -> list:
    return [_q_out(c) for c in v]


def _domain_out(domain: Optional[HPoly]):
    if domain is None:
        return None
    return {"rows": [_vec_out(list(a) + [b]) for a, b in domain.rows]}


def domain_from_json(obj, dim: int) -> Optional[HPoly]:
    if obj is None:
        return None
    rows = []
    for row in obj["rows"]:
        vals = [as_q(c) for c in row]
        if len(vals) != dim + 1:
            raise ModelError("domain row length mismatch")
        rows.append((vals[:dim], vals[dim]))
    return HPoly(dim, rows)


def func_to_json(f: ConvexFunc) -> dict:
    if isinstance(f, Affine):
        out = {"kind": "affine", "a": _vec_out(f.a), "b": _q_out(f.b)}
    elif isinstance(f, MaxAffine):
        out = {
            "kind": "max_affine",
            "pieces": [{"a": _vec_out(a), "b": _q_out(b)} for a, b in f.pieces],
        }
    elif isinstance(f, SupportPolygon):
        out = {"kind": "support_polygon", "vertices": [_vec_out(v) for v in f.vertices]}
    elif isinstance(f, ScaledNormInf):
        out = {"kind": "scaled_norm_inf", "center": _vec_out(f.center), "weight": _q_out(f.weight)}
    elif isinstance(f, Scaled2Norm):
        out = {"kind": "scaled_2norm", "center": _vec_out(f.center), "weight": _q_out(f.weight)}
    elif isinstance(f, NegSqrtParabola1D):
        out = {"kind": "neg_sqrt_parabola_1d", "t": _q_out(f.t)}
    else:
        raise UnsupportedOperationError(f"{type(f).__name__} does not serialize")
    dom = _domain_out(f.domain)
    if dom is not None:
        out["domain"] = dom
    return out


def func_from_json(obj: dict, dim: Optional[int] = None) -> ConvexFunc:
    kind = obj.get("kind")
    if kind == "affine":
        a = [as_q(c) for c in obj["a"]]
        domain = domain_from_json(obj.get("domain"), len(a))
        return Affine(a, as_q(obj["b"]), domain)
    if kind == "max_affine":
        pieces = [([as_q(c) for c in p["a"]], as_q(p["b"])) for p in obj["pieces"]]
        domain = domain_from_json(obj.get("domain"), len(pieces[0][0]))
        return MaxAffine(pieces, domain)
    if kind == "support_polygon":
        verts = [[as_q(c) for c in v] for v in obj["vertices"]]
        domain = domain_from_json(obj.get("domain"), len(verts[0]))
        return SupportPolygon(verts, domain)
    if kind == "scaled_norm_inf":
        return ScaledNormInf([as_q(c) for c in obj["center"]], as_q(obj["weight"]))
    if kind == "scaled_2norm":
        return Scaled2Norm([as_q(c) for c in obj["center"]], as_q(obj["weight"]))
    if kind == "neg_sqrt_parabola_1d":
        return NegSqrtParabola1D(as_q(obj["t"]))
    raise ModelError(f"unknown function kind {kind!r}")
