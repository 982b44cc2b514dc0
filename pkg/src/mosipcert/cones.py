"""Exact polyhedral geometry: polytopes, finitely generated cones, halfspace
cones, polar duality via double description, membership / containment /
interior tests.

Everything is exact rational.  All types are immutable values canonicalized on
construction (primitive integer scaling for rays and normals, redundancy
pruning via small LPs, lexicographic sorting), so structural equality of two
objects built through the public constructors is semantic equality of the
canonical representations.  Halfspace representations of lower-dimensional
cones are not unique even canonically; use `cone_equal` for set equality.

Conventions:
* HCone(normals) is {d : a'd <= 0 for every normal a}; no normals = all space.
* FGCone(generators) is cone(generators) including 0; no generators = {0}.
* GenConvexSet(base, recession) is base + recession (Minkowski sum), empty iff
  the base polytope is empty.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from math import gcd
from typing import Optional, Sequence

from . import lp
from .errors import UnsupportedDimensionError
from .rationals import Q, ZERO, ONE, as_q, qdot, sqrt_exact, sqrt_lower_bound

DEFAULT_DIM_CAP = 6


def dd_dim_cap() -> int:
    raw = os.environ.get("MOSIP_DD_DIM_CAP", "")
    try:
        return int(raw) if raw else DEFAULT_DIM_CAP
    except ValueError:
        return DEFAULT_DIM_CAP


def vec(values) -> tuple:
    return tuple(as_q(v) for v in values)


def primitive(v: Sequence) -> tuple:
    """Scale a nonzero rational vector to coprime integers (sign preserved)."""
    denom_lcm = 1
    for c in v:
        d = as_q(c).denominator
        denom_lcm = denom_lcm * d // gcd(denom_lcm, d)
    ints = [int(as_q(c) * denom_lcm) for c in v]
    g = 0
    for c in ints:
        g = gcd(g, abs(c))
    if g == 0:
        return tuple(ZERO for _ in v)
    return tuple(Q(c, g) for c in ints)


def _unit(dim: int, j: int, scale=ONE) -> tuple:
    return tuple(scale if i == j else ZERO for i in range(dim))


def _box_rows(dim: int, bound=ONE) -> list:
    rows = []
    for j in range(dim):
        e = [ZERO] * dim
        e[j] = ONE
        rows.append((list(e), lp.LE, bound))
        rows.append((list(e), lp.GE, -bound))
    return rows


def _convex_combination(target, points) -> Optional[list]:
    """alpha >= 0, sum alpha = 1, sum alpha*p = target; None if impossible."""
    if not points:
        return None
    dim = len(target)
    k = len(points)
    rows = [([p[i] for p in points], lp.EQ, target[i]) for i in range(dim)]
    rows.append(([ONE] * k, lp.EQ, ONE))
    rows.extend((_unit(k, j), lp.GE, ZERO) for j in range(k))
    res = lp.feasible_point(k, rows)
    return None if isinstance(res, lp.Infeasible) else res


def _conic_combination(target, gens) -> Optional[list]:
    """mu >= 0 with sum mu*g = target; None if impossible ({0} needs no gens)."""
    if all(c == 0 for c in target):
        return [ZERO] * len(gens)
    if not gens:
        return None
    dim = len(target)
    k = len(gens)
    rows = [([g[i] for g in gens], lp.EQ, target[i]) for i in range(dim)]
    rows.extend((_unit(k, j), lp.GE, ZERO) for j in range(k))
    res = lp.feasible_point(k, rows)
    return None if isinstance(res, lp.Infeasible) else res


# ---------------------------------------------------------------------------
# Types


@dataclass(frozen=True)
class Polytope:
    """Convex hull of finitely many points; canonical form keeps extreme points only."""

    dim: int
    vertices: tuple

    def __init__(self, dim: int, vertices):
        points = sorted(set(vec(v) for v in vertices))
        for p in points:
            if len(p) != dim:
                raise ValueError("vertex dimension mismatch")
        kept = list(points)
        i = 0
        while i < len(kept):
            others = kept[:i] + kept[i + 1 :]
            if others and _convex_combination(kept[i], others) is not None:
                del kept[i]
            else:
                i += 1
        object.__setattr__(self, "dim", dim)
        object.__setattr__(self, "vertices", tuple(kept))

    @property
    def is_empty(self) -> bool:
        return not self.vertices

    def contains_point(self, p) -> bool:
        return _convex_combination(vec(p), self.vertices) is not None

    def support(self, d):
        """max d'v over the polytope; raises on empty."""
        if self.is_empty:
            raise ValueError("support of empty polytope")
        return max(qdot(d, v) for v in self.vertices)


@dataclass(frozen=True)
class FGCone:
    """cone(generators), always closed; no generators means {0}."""

    dim: int
    generators: tuple

    def __init__(self, dim: int, generators):
        gens = set()
        for g in generators:
            g = vec(g)
            if len(g) != dim:
                raise ValueError("generator dimension mismatch")
            if any(c != 0 for c in g):
                gens.add(primitive(g))
        kept = sorted(gens)
        i = 0
        while i < len(kept):
            if _conic_combination(kept[i], kept[:i] + kept[i + 1 :]) is not None:
                del kept[i]
            else:
                i += 1
        object.__setattr__(self, "dim", dim)
        object.__setattr__(self, "generators", tuple(kept))

    @property
    def is_zero(self) -> bool:
        return not self.generators

    def member(self, p) -> bool:
        return _conic_combination(vec(p), self.generators) is not None


@dataclass(frozen=True)
class HCone:
    """{d : a'd <= 0 for all normals a}; no normals means all of n-space."""

    dim: int
    normals: tuple

    def __init__(self, dim: int, normals):
        norms = set()
        for a in normals:
            a = vec(a)
            if len(a) != dim:
                raise ValueError("normal dimension mismatch")
            if any(c != 0 for c in a):
                norms.add(primitive(a))
        kept = sorted(norms)
        i = 0
        while i < len(kept):
            if self._implied(kept[i], kept[:i] + kept[i + 1 :], dim):
                del kept[i]
            else:
                i += 1
        object.__setattr__(self, "dim", dim)
        object.__setattr__(self, "normals", tuple(kept))

    @staticmethod
    def _implied(a, others, dim) -> bool:
        """Is a'd <= 0 implied by the other normals?  max a'd over the others'
        cone, capped by a'd <= 1 to stay bounded."""
        rows = [(list(b), lp.LE, ZERO) for b in others]
        rows.append((list(a), lp.LE, ONE))
        res = lp.solve(lp.LinearProgram(dim, list(a), rows))
        return isinstance(res, lp.Optimal) and res.value <= 0

    def member(self, d) -> bool:
        return all(qdot(a, d) <= 0 for a in self.normals)


@dataclass(frozen=True)
class HPoly:
    """H-polyhedron {x : a'x <= b per row}.  Rows are kept exactly as given
    (order and scaling included) so problem files round-trip bit-exactly."""

    dim: int
    rows: tuple  # ((a: tuple, b: Q), ...)

    def __init__(self, dim: int, rows):
        cleaned = []
        for a, b in rows:
            a = vec(a)
            if len(a) != dim:
                raise ValueError("row dimension mismatch")
            cleaned.append((a, as_q(b)))
        object.__setattr__(self, "dim", dim)
        object.__setattr__(self, "rows", tuple(cleaned))

    def contains_point(self, x) -> bool:
        return all(qdot(a, x) <= b for a, b in self.rows)

    def active_rows(self, x) -> list:
        return [i for i, (a, b) in enumerate(self.rows) if qdot(a, x) == b]

    def tangent_cone(self, x) -> HCone:
        """Feasible-direction/contingent cone at a point of the polyhedron."""
        return HCone(self.dim, [self.rows[i][0] for i in self.active_rows(x)])

    def normal_cone(self, x) -> FGCone:
        """Cone of active row normals (polar of the tangent cone)."""
        return FGCone(self.dim, [self.rows[i][0] for i in self.active_rows(x)])

    def lp_rows(self) -> list:
        return [(list(a), lp.LE, b) for a, b in self.rows]


@dataclass(frozen=True)
class GenConvexSet:
    """base + recession (Minkowski sum of a polytope and a cone)."""

    base: Polytope
    recession: FGCone

    def __post_init__(self):
        if self.base.dim != self.recession.dim:
            raise ValueError("base/recession dimension mismatch")

    @property
    def dim(self) -> int:
        return self.base.dim

    @property
    def is_empty(self) -> bool:
        return self.base.is_empty


# ---------------------------------------------------------------------------
# Polars and double description


def polar(c: FGCone) -> HCone:
    """Negative polar cone: {d : g'd <= 0 for every generator g}."""
    return HCone(c.dim, c.generators)


def polar_of_points(points, dim: int) -> HCone:
    """Negative polar M^0 of a finite point set (equals (cone M)^0)."""
    return HCone(dim, [vec(p) for p in points])


def dd_convert(h: HCone) -> FGCone:
    """Generators of {d : a'd <= 0 for all normals} (double description).

    Starts from +-axis generators of all space and slices one halfspace at a
    time; new rays come from all sign-crossing pairs and redundancy is pruned
    by LP after each slice, which keeps counts small at these dimensions.
    """
    n = h.dim
    cap = dd_dim_cap()
    if n > cap:
        raise UnsupportedDimensionError(
            f"double description in dimension {n} exceeds cap {cap} "
            f"(set MOSIP_DD_DIM_CAP to raise it)"
        )
    gens = [_unit(n, j) for j in range(n)] + [_unit(n, j, -ONE) for j in range(n)]
    for a in h.normals:
        vals = [qdot(a, g) for g in gens]
        keep = [g for g, v in zip(gens, vals) if v <= 0]
        new = []
        for gp, vp in zip(gens, vals):
            if vp <= 0:
                continue
            for gn, vn in zip(gens, vals):
                if vn < 0:
                    # positive combination lying exactly on a'd = 0
                    w = tuple(vp * cn - vn * cp for cp, cn in zip(gp, gn))
                    if any(c != 0 for c in w):
                        new.append(primitive(w))
        merged = sorted(set(keep) | set(new))
        i = 0
        while i < len(merged):
            if _conic_combination(merged[i], merged[:i] + merged[i + 1 :]) is not None:
                del merged[i]
            else:
                i += 1
        gens = merged
    return FGCone(n, gens)


# ---------------------------------------------------------------------------
# Membership and separation


@dataclass(frozen=True)
class Member:
    """p = sum alpha_v * v + sum mu_r * r with alpha a convex combination."""

    alpha: tuple
    mu: tuple


@dataclass(frozen=True)
class NotMember:
    """Separator h: h'p > sup over the set (sup finite along h)."""

    separator: tuple
    gap: Q  # h'p - sup_s h


def membership(p, s: GenConvexSet):
    """Exact decomposition of p over s's vertices and generators, or a
    verified separating functional."""
    p = vec(p)
    if s.is_empty:
        return NotMember(separator=tuple(ZERO for _ in p), gap=ZERO)
    verts, gens = s.base.vertices, s.recession.generators
    nv, ng = len(verts), len(gens)
    dim = s.dim
    rows = [
        ([v[i] for v in verts] + [g[i] for g in gens], lp.EQ, p[i]) for i in range(dim)
    ]
    rows.append(([ONE] * nv + [ZERO] * ng, lp.EQ, ONE))
    rows.extend((_unit(nv + ng, j), lp.GE, ZERO) for j in range(nv + ng))
    res = lp.feasible_point(nv + ng, rows)
    if not isinstance(res, lp.Infeasible):
        return Member(alpha=tuple(res[:nv]), mu=tuple(res[nv:]))
    # Separating functional: max s with h'p - h'v >= s for all vertices,
    # h'r <= 0 for all generators, |h|_inf <= 1.  Positive optimum exists
    # because s is closed convex and p is outside.
    hv = dim
    rows = []
    for v in verts:
        rows.append(([p[i] - v[i] for i in range(dim)] + [-ONE], lp.GE, ZERO))
    for g in gens:
        rows.append((list(g) + [ZERO], lp.LE, ZERO))
    rows.extend(_pad_rows(_box_rows(dim), 1))
    out = lp.solve(lp.LinearProgram(hv + 1, [ZERO] * hv + [ONE], rows))
    assert isinstance(out, lp.Optimal) and out.value > 0, "separator LP must certify exclusion"
    h = tuple(out.primal[:dim])
    sup = max(qdot(h, v) for v in verts)
    return NotMember(separator=h, gap=qdot(h, p) - sup)


def _pad_rows(rows, extra: int) -> list:
    return [(coeffs + [ZERO] * extra, rel, rhs) for coeffs, rel, rhs in rows]


def cone_member(p, c: FGCone) -> Optional[list]:
    """Nonnegative coefficients writing p over c's generators, or None."""
    return _conic_combination(vec(p), c.generators)


# ---------------------------------------------------------------------------
# Interior, triviality, containment


def nontrivial_direction(h: HCone) -> Optional[tuple]:
    """A nonzero member of {d : a'd <= 0 for all normals}, or None when the
    cone is {0}.  Decided by 2n LPs maximizing +-d_i over the cone
    intersected with the unit box."""
    n = h.dim
    base_rows = [(list(a), lp.LE, ZERO) for a in h.normals] + _box_rows(n)
    for j in range(n):
        for sign in (ONE, -ONE):
            obj = [ZERO] * n
            obj[j] = sign
            res = lp.solve(lp.LinearProgram(n, obj, list(base_rows)))
            assert isinstance(res, lp.Optimal)
            if res.value > 0:
                return tuple(res.primal)
    return None


def cone_is_trivial(h: HCone) -> bool:
    """Is {d : a'd <= 0 for all normals} just {0}?"""
    return nontrivial_direction(h) is None


@dataclass(frozen=True)
class ZeroInterior:
    inside: bool
    radius_lower_bound: Q
    exact: bool
    note: str = ""
    # when not inside: a nonzero direction with support <= 0 (exact counter-witness)
    witness_direction: Optional[tuple] = None


def zero_interior(s: GenConvexSet) -> ZeroInterior:
    """Is 0 in the interior of base + recession, with a certified ball radius.

    The interior test reduces to triviality of {d : sigma_s(d) <= 0}
    = {d : v'd <= 0 for all vertices, r'd <= 0 for all generators}: the support
    function of a closed convex set is positive away from 0 exactly when 0 is
    interior.  The radius is exact (min facet distance) in dimension <= 3 via
    a lifted double description; above that, certified axis-point stepping
    scaled by 1/sqrt(n).
    """
    if s.is_empty:
        return ZeroInterior(False, ZERO, True, "empty set")
    support_normals = list(s.base.vertices) + list(s.recession.generators)
    direction = nontrivial_direction(HCone(s.dim, support_normals))
    if direction is not None:
        return ZeroInterior(False, ZERO, True, witness_direction=direction)
    if s.dim <= 3:
        return _radius_by_facets(s)
    return _radius_by_axis_points(s)


def _facets(s: GenConvexSet) -> list:
    """Facet rows (a, b) with s = {x : a'x <= b}, via the lifted-cone polar:
    (a, -b) ranges over the generators of {(v,1), (r,0)}^0."""
    dim = s.dim
    lifted = HCone(
        dim + 1,
        [tuple(v) + (ONE,) for v in s.base.vertices]
        + [tuple(g) + (ZERO,) for g in s.recession.generators],
    )
    facets = []
    for gen in dd_convert(lifted).generators:
        a, neg_b = gen[:dim], gen[dim]
        if any(c != 0 for c in a):
            facets.append((a, -neg_b))
    return facets


def _radius_by_facets(s: GenConvexSet) -> ZeroInterior:
    facets = _facets(s)
    if not facets:
        return ZeroInterior(
            True, ONE, False, "set is all of space; any radius certifies"
        )
    best, best_exact = None, True
    for a, b in facets:
        assert b > 0, "0 must be strictly inside every facet"
        ratio = b * b / qdot(a, a)  # squared facet distance
        exact = sqrt_exact(ratio)
        dist = exact if exact is not None else sqrt_lower_bound(ratio)
        if best is None or dist < best:
            best, best_exact = dist, exact is not None
    return ZeroInterior(True, best, best_exact)


def _radius_by_axis_points(s: GenConvexSet) -> ZeroInterior:
    """Largest t with +-t*e_i in s for each axis (2n LPs); the cross-polytope
    they span contains the ball of radius t/sqrt(n)."""
    dim = s.dim
    verts, gens = s.base.vertices, s.recession.generators
    nv, ng = len(verts), len(gens)
    t_min = None
    for j in range(dim):
        for sign in (ONE, -ONE):
            # max t s.t. t*sign*e_j = sum alpha v + sum mu g, convex alpha
            k = nv + ng + 1
            rows = []
            for i in range(dim):
                coeffs = [v[i] for v in verts] + [g[i] for g in gens]
                coeffs.append(-sign if i == j else ZERO)
                rows.append((coeffs, lp.EQ, ZERO))
            rows.append(([ONE] * nv + [ZERO] * (ng + 1), lp.EQ, ONE))
            rows.extend((_unit(k, idx), lp.GE, ZERO) for idx in range(nv + ng))
            rows.append((_unit(k, k - 1), lp.LE, Q(2**20)))  # cap: recession may allow any step
            res = lp.solve(lp.LinearProgram(k, _unit(k, k - 1), rows))
            assert isinstance(res, lp.Optimal), "0 interior guarantees axis feasibility"
            t = res.value
            assert t > 0
            if t_min is None or t < t_min:
                t_min = t
    ratio = t_min * t_min / s.dim
    exact = sqrt_exact(ratio)
    radius = exact if exact is not None else sqrt_lower_bound(ratio)
    return ZeroInterior(
        True, radius, exact is not None, "axis-point bound scaled by 1/sqrt(n)"
    )


@dataclass(frozen=True)
class ContainsResult:
    holds: bool
    witness: Optional[tuple] = None  # a point of the first set outside the second


def contains(a, b) -> ContainsResult:
    """Is a a subset of b?  When not, witness lies in a and outside b."""
    if a.dim != b.dim:
        raise ValueError("dimension mismatch")
    if isinstance(a, FGCone):
        if isinstance(b, HCone):
            for g in a.generators:
                bad = next((n for n in b.normals if qdot(n, g) > 0), None)
                if bad is not None:
                    return ContainsResult(False, g)
            return ContainsResult(True)
        for g in a.generators:
            if _conic_combination(g, b.generators) is None:
                return ContainsResult(False, g)
        return ContainsResult(True)
    if isinstance(b, HCone):
        # every halfspace of b must be valid over the cone a
        dim = a.dim
        base_rows = [(list(m), lp.LE, ZERO) for m in a.normals] + _box_rows(dim)
        for target in b.normals:
            res = lp.solve(lp.LinearProgram(dim, list(target), list(base_rows)))
            assert isinstance(res, lp.Optimal)
            if res.value > 0:
                return ContainsResult(False, tuple(res.primal))
        return ContainsResult(True)
    return contains(dd_convert(a), b)


def cone_equal(a, b) -> bool:
    """Set equality across representations (mutual containment)."""
    return contains(a, b).holds and contains(b, a).holds


# ---------------------------------------------------------------------------
# Directions and rank


@dataclass(frozen=True)
class StrictlyNegative:
    direction: Optional[tuple]
    vacuous: bool = False  # empty input: no points to be negative against


def strictly_negative_polar(points, dim: int) -> StrictlyNegative:
    """A direction d with v'd < 0 for every point, or none.

    LP: max s subject to v'd + s <= 0 (all v), |d|_inf <= 1, s <= 1; the
    optimum is 0 exactly when no strictly negative direction exists.
    """
    pts = [vec(p) for p in points]
    if not pts:
        return StrictlyNegative(None, vacuous=True)
    rows = [(list(v) + [ONE], lp.LE, ZERO) for v in pts]
    rows.extend(_pad_rows(_box_rows(dim), 1))
    rows.append((_unit(dim + 1, dim), lp.LE, ONE))
    res = lp.solve(lp.LinearProgram(dim + 1, _unit(dim + 1, dim), rows))
    assert isinstance(res, lp.Optimal) and res.value >= 0
    if res.value == 0:
        return StrictlyNegative(None)
    return StrictlyNegative(tuple(res.primal[:dim]))


def span_rank(points) -> int:
    """Rank of the span of the points (exact Gaussian elimination)."""
    rows = [list(vec(p)) for p in points]
    if not rows:
        return 0
    ncols = len(rows[0])
    rank = 0
    for col in range(ncols):
        piv = next((r for r in range(rank, len(rows)) if rows[r][col] != 0), -1)
        if piv < 0:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        inv = 1 / rows[rank][col]
        rows[rank] = [v * inv for v in rows[rank]]
        for r in range(len(rows)):
            if r != rank and rows[r][col] != 0:
                f = rows[r][col]
                rows[r] = [v - f * w for v, w in zip(rows[r], rows[rank])]
        rank += 1
    return rank


@dataclass(frozen=True)
class RelativeInterior:
    member: bool
    coefficients: Optional[tuple] = None


def relative_interior_member(p, q: Polytope) -> RelativeInterior:
    """Is p a strictly positive convex combination of q's extreme points?
    (That set is exactly the relative interior of q.)  LP maximizes the
    minimum coefficient."""
    p = vec(p)
    if q.is_empty:
        return RelativeInterior(False)
    verts = q.vertices
    k = len(verts)
    # variables: alpha_1..alpha_k, tau; maximize tau
    rows = [([v[i] for v in verts] + [ZERO], lp.EQ, p[i]) for i in range(q.dim)]
    rows.append(([ONE] * k + [ZERO], lp.EQ, ONE))
    for j in range(k):
        coeffs = [ZERO] * (k + 1)
        coeffs[j], coeffs[k] = ONE, -ONE
        rows.append((coeffs, lp.GE, ZERO))  # alpha_j >= tau
    rows.append((_unit(k + 1, k), lp.LE, ONE))
    res = lp.solve(lp.LinearProgram(k + 1, _unit(k + 1, k), rows))
    if isinstance(res, lp.Infeasible):
        return RelativeInterior(False)
    assert isinstance(res, lp.Optimal)
    if res.value <= 0:
        return RelativeInterior(False)
    return RelativeInterior(True, tuple(res.primal[:k]))
