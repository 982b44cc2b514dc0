"""The MOSIP model: vector objectives, a constraint family over an index set
(finite, or an infinite builtin family materialized up to an explicit
truncation), the feasible set S, the envelope functions psi/iota, active index
sets, and the derived sets F, F*, G, G*, Q^i, C(S, x), N(S, x) at a candidate
point.

Truncation is a first-class, user-visible parameter: every value that depends
on a truncated family carries a "truncated" provenance marker, because no
finite slice of an infinite family can silently stand in for the whole.  For
the same reason S may be supplied directly as an H-polyhedron — for infinite
families the exact feasible set is typically known in closed form while no
truncation reproduces it — and an optional psi_override supplies the exact
upper envelope where a closed form exists.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional, Union

from . import funcs
from .cones import FGCone, HCone, HPoly, Polytope, contains
from .errors import (
    InfeasiblePointError,
    InternalInconsistencyError,
    ModelError,
    ParseError,
    UnsupportedOperationError,
)
from .funcs import (
    Affine,
    ConvexFunc,
    MaxAffine,
    NegSqrtParabola1D,
    ScaledNormInf,
    SubdiffSet,
    SupportPolygon,
    evaluate,
    is_finite,
    subdiff,
    subdiff_set,
)
from .rationals import ExtReal, Q, as_q, q_pair, qdot, vec_q

EXACT = "exact"
TRUNCATED = "truncated"
APPROXIMATED = "approximated-subdifferentials"

_SEVERITY = {EXACT: 0, TRUNCATED: 1, APPROXIMATED: 2}


def worst_provenance(*tags: str) -> str:
    return max(tags, key=_SEVERITY.__getitem__)

#: annotation keys the loader accepts; anything else is rejected so problem
#: files stay honest about what the toolkit actually consumes.
ANNOTATION_KEYS = frozenset(
    {
        "name",
        "notes",
        "flags",
        "documented_g_polar",
        "reference_verdicts",
        "g_sets_exact",
        "subdifferentials_approximated",
        "isolation",
    }
)
FLAG_KEYS = frozenset({"continuous", "differentiable"})


# ---------------------------------------------------------------------------
# constraint families


@dataclass(frozen=True)
class FiniteFamily:
    functions: tuple

    def __init__(self, functions):
        fns = tuple(functions)
        if not fns:
            raise ModelError("a constraint family needs at least one function")
        object.__setattr__(self, "functions", fns)

    @property
    def size(self) -> int:
        return len(self.functions)

    @property
    def truncated(self) -> bool:
        return False

    def member(self, k: int) -> ConvexFunc:
        return self.functions[k]


def _alternating_affine(params: dict, truncation: int) -> tuple:
    """One-variable family: 2x, then the interleaved tails x - 1/(j+1) at odd
    indices and 3x - 1/j at even indices; sup envelope max(x, 3x)."""
    out = []
    for k in range(truncation):
        if k == 0:
            out.append(Affine([2], 0))
        elif k % 2 == 1:
            j = (k - 1) // 2
            out.append(Affine([1], Q(-1, j + 1)))
        else:
            j = k // 2
            out.append(Affine([3], Q(-1, j)))
    return tuple(out)


#: rational slopes marking points on the circle of radius r centred at (0, r):
#: u -> (2ru, 2ru^2)/(1 + u^2), with None standing for the top point (0, 2r).
_OCTAGON_SLOPES = (
    Q(0),
    Q(1, 4),
    Q(1, 2),
    Q(2, 3),
    Q(3, 2),
    Q(2),
    Q(4),
    None,
)


def octagon_vertices(t) -> list:
    r = 1 + as_q(t)
    verts = []
    for u in _OCTAGON_SLOPES:
        if u is None:
            verts.append([Q(0), 2 * r])
        else:
            d = 1 + u * u
            verts.append([2 * r * u / d, 2 * r * u * u / d])
    return verts


def _octagon_support(params: dict, truncation: int) -> tuple:
    """Support functions of an expanding sequence of octagons inscribed in the
    circles through the origin of radius 1 + t centred on the vertical axis."""
    return tuple(SupportPolygon(octagon_vertices(t)) for t in range(truncation))


def _neg_semicircle(params: dict, truncation: int) -> tuple:
    """Lower semicircular arcs -sqrt(2tx - x^2) for a rational grid of t in
    [1, 2] (the grid has `truncation` points, endpoints included)."""
    if truncation == 1:
        return (NegSqrtParabola1D(1),)
    step = Q(1, truncation - 1)
    return tuple(NegSqrtParabola1D(1 + k * step) for k in range(truncation))


BUILTIN_FAMILIES = {
    "alternating_affine": _alternating_affine,
    "octagon_support": _octagon_support,
    "neg_semicircle": _neg_semicircle,
}


@dataclass(frozen=True)
class IndexedFamily:
    """A builtin infinite family materialized on indices 0 .. truncation-1."""

    family: str
    params: dict
    truncation: int
    functions: tuple = field(compare=False)

    def __init__(self, family: str, params: Optional[dict] = None, truncation: int = 1):
        if family not in BUILTIN_FAMILIES:
            raise ModelError(f"unknown constraint family {family!r}")
        if truncation < 1:
            raise ModelError("truncation must be at least 1")
        params = dict(params or {})
        fns = BUILTIN_FAMILIES[family](params, truncation)
        object.__setattr__(self, "family", family)
        object.__setattr__(self, "params", params)
        object.__setattr__(self, "truncation", truncation)
        object.__setattr__(self, "functions", fns)

    @property
    def size(self) -> int:
        return self.truncation

    @property
    def truncated(self) -> bool:
        return True

    def member(self, k: int) -> ConvexFunc:
        return self.functions[k]


ConstraintFamily = Union[FiniteFamily, IndexedFamily]


# ---------------------------------------------------------------------------
# problem


@dataclass(frozen=True)
class MosipProblem:
    dimension: int
    objectives: tuple
    constraints: ConstraintFamily
    feasible_set: Optional[HPoly] = None
    psi_override: Optional[ConvexFunc] = None
    annotations: dict = field(default_factory=dict)

    def __init__(
        self,
        dimension: int,
        objectives,
        constraints: ConstraintFamily,
        feasible_set: Optional[HPoly] = None,
        psi_override: Optional[ConvexFunc] = None,
        annotations: Optional[dict] = None,
    ):
        objectives = tuple(objectives)
        if not objectives:
            raise ModelError("at least one objective is required")
        for f in objectives:
            if funcs.fn_dim(f) != dimension:
                raise ModelError("objective dimension mismatch")
        for k in range(constraints.size):
            if funcs.fn_dim(constraints.member(k)) != dimension:
                raise ModelError(f"constraint {k} dimension mismatch")
        if feasible_set is not None and feasible_set.dim != dimension:
            raise ModelError("feasible_set dimension mismatch")
        if psi_override is not None and funcs.fn_dim(psi_override) != dimension:
            raise ModelError("psi_override dimension mismatch")
        annotations = dict(annotations or {})
        unknown = set(annotations) - ANNOTATION_KEYS
        if unknown:
            raise ModelError(f"unknown annotation keys: {sorted(unknown)}")
        bad_flags = set(annotations.get("flags", {})) - FLAG_KEYS
        if bad_flags:
            raise ModelError(f"unknown flags: {sorted(bad_flags)}")
        object.__setattr__(self, "dimension", dimension)
        object.__setattr__(self, "objectives", objectives)
        object.__setattr__(self, "constraints", constraints)
        object.__setattr__(self, "feasible_set", feasible_set)
        object.__setattr__(self, "psi_override", psi_override)
        object.__setattr__(self, "annotations", annotations)

    @property
    def num_objectives(self) -> int:
        return len(self.objectives)

    @property
    def truncated(self) -> bool:
        return self.constraints.truncated

    def constraint(self, k: int) -> ConvexFunc:
        return self.constraints.member(k)

    def indices(self) -> range:
        return range(self.constraints.size)

    def flag(self, name: str) -> bool:
        return bool(self.annotations.get("flags", {}).get(name, False))

    def validate_sample(self, points) -> None:
        """Exact spot checks of the declared closed forms against the
        truncated family: S-membership implies every g_k <= 0, and
        psi_override dominates every g_k."""
        for x in points:
            x = vec_q(x)
            if self.feasible_set is not None and self.feasible_set.contains_point(x):
                for k in self.indices():
                    if evaluate(self.constraint(k), x) > 0:
                        raise ModelError(
                            f"feasible_set point {x} violates constraint {k}"
                        )
            if self.psi_override is not None:
                bound = evaluate(self.psi_override, x)
                for k in self.indices():
                    if evaluate(self.constraint(k), x) > bound:
                        raise ModelError(
                            f"psi_override undercuts constraint {k} at {x}"
                        )


# ---------------------------------------------------------------------------
# envelope functions and active sets


@dataclass(frozen=True)
class ExtValue:
    value: ExtReal
    provenance: str  # EXACT or TRUNCATED


def psi(p: MosipProblem, x) -> ExtValue:
    """Upper envelope sup_t g_t(x): the exact override when present, else the
    max over the truncated family (marked as such)."""
    x = vec_q(x)
    if p.psi_override is not None:
        return ExtValue(evaluate(p.psi_override, x), EXACT)
    vals = [evaluate(p.constraint(k), x) for k in p.indices()]
    prov = TRUNCATED if p.truncated else EXACT
    return ExtValue(max(vals), prov)


def iota(p: MosipProblem, x) -> ExtValue:
    """Lower envelope inf_t g_t(x) over the (possibly truncated) family."""
    x = vec_q(x)
    vals = [evaluate(p.constraint(k), x) for k in p.indices()]
    prov = TRUNCATED if p.truncated else EXACT
    return ExtValue(min(vals), prov)


def check_feasible(p: MosipProblem, x) -> None:
    """Exact feasibility of x against the truncated family and, when supplied,
    the closed-form S; raises naming the first violated index or row."""
    x = vec_q(x)
    if len(x) != p.dimension:
        raise ModelError("candidate point dimension mismatch")
    for k in p.indices():
        if evaluate(p.constraint(k), x) > 0:
            raise InfeasiblePointError(
                f"infeasible point: constraint index {k} is violated"
            )
    if p.feasible_set is not None:
        for j, (a, b) in enumerate(p.feasible_set.rows):
            if qdot(a, x) > b:
                raise InfeasiblePointError(
                    f"infeasible point: feasible_set row {j} is violated"
                )


def active_set(p: MosipProblem, x, eps=0) -> list:
    """epsilon-active indices {k : g_k(x) >= -eps} over the truncated family."""
    eps = as_q(eps)
    if eps < 0:
        raise ModelError("epsilon must be nonnegative")
    check_feasible(p, x)
    x = vec_q(x)
    return [k for k in p.indices() if evaluate(p.constraint(k), x) >= -eps]


# ---------------------------------------------------------------------------
# derived sets at a candidate point


@dataclass(frozen=True)
class FSets:
    F: tuple  # union of objective subdifferential vertex sets
    F_star: Polytope  # conv(F)


def f_sets(p: MosipProblem, x) -> FSets:
    x = vec_q(x)
    points = []
    for i, f in enumerate(p.objectives):
        sd = subdiff(f, x)
        if sd.is_empty:
            raise ModelError(
                f"objective {i} has empty subdifferential at {x}; objectives "
                "must be finite-valued convex functions"
            )
        points.extend(v for v in sd.vertices if v not in points)
    return FSets(tuple(points), Polytope(p.dimension, points))


@dataclass(frozen=True)
class GSets:
    G: tuple  # union of active-constraint subdifferential vertex sets
    is_empty: bool
    G_star: FGCone  # cone(G), including recession directions of unbounded parts


def g_sets(p: MosipProblem, x) -> GSets:
    x = vec_q(x)
    points: list = []
    extra: list = []
    for k in active_set(p, x, 0):
        ss = subdiff_set(p.constraint(k), x)
        points.extend(v for v in ss.base.vertices if v not in points)
        extra.extend(g for g in ss.recession.generators if g not in extra)
    empty = not points and not extra
    return GSets(tuple(points), empty, FGCone(p.dimension, points + extra))


# ---------------------------------------------------------------------------
# data provenance


def pinned_exact(p: MosipProblem, x) -> bool:
    """Does an annotation certify that the truncated constraint data at x
    (active set, subdifferential union) already equals the full family's?"""
    note = p.annotations.get("g_sets_exact")
    if not note:
        return False
    x = list(vec_q(x))
    for pt in note.get("points", []):
        if [Q(c[0], c[1]) for c in pt] == x:
            return True
    return False


def g_data_provenance(p: MosipProblem, x) -> str:
    """Trust level of constraint-derived data (G, G*, active sets) at x."""
    if p.annotations.get("subdifferentials_approximated"):
        return APPROXIMATED
    if not p.truncated or pinned_exact(p, x):
        return EXACT
    return TRUNCATED


def psi_data_provenance(p: MosipProblem) -> str:
    """Trust level of envelope-derived data (psi values, its subdifferential)."""
    if p.psi_override is not None:
        return EXACT
    if p.annotations.get("subdifferentials_approximated"):
        return APPROXIMATED
    return TRUNCATED if p.truncated else EXACT


def psi_subdiff(p: MosipProblem, x) -> Optional[SubdiffSet]:
    """Subdifferential of the upper envelope at x, when representable.

    The override's subdifferential is exact by the model contract.  Without
    an override, a finite family admits the max rule (convex hull of the
    argmax members' subdifferentials); a truncated family does not pin down
    the envelope near x, so the result is None (undecidable downstream).
    """
    x = vec_q(x)
    if p.psi_override is not None:
        return subdiff_set(p.psi_override, x)
    if p.truncated:
        return None
    vals = [evaluate(p.constraint(k), x) for k in p.indices()]
    top = max(vals)
    if not is_finite(top):
        return None
    base: list = []
    rec: list = []
    for k in p.indices():
        if vals[k] != top:
            continue
        ss = subdiff_set(p.constraint(k), x)
        if ss.is_empty:
            return None  # max rule needs every argmax subdifferential
        base.extend(ss.base.vertices)
        rec.extend(ss.recession.generators)
    return SubdiffSet(Polytope(p.dimension, base), FGCone(p.dimension, rec))


def sublevel_Q(p: MosipProblem, x, i: int) -> HPoly:
    """Q^i(x) = {y in S : f_l(y) <= f_l(x) for all l != i} as an
    H-polyhedron (polyhedral objectives only); Q^1 = S when p = 1."""
    if p.feasible_set is None:
        raise ModelError(
            "sublevel sets need an H-representation of S; supply feasible_set"
        )
    if not 0 <= i < p.num_objectives:
        raise ModelError(f"objective index {i} out of range")
    x = vec_q(x)
    if p.num_objectives == 1:
        return p.feasible_set
    rows = list(p.feasible_set.rows)
    for l, f in enumerate(p.objectives):
        if l == i:
            continue
        level = evaluate(f, x)
        for a, b in _affine_pieces(f):
            rows.append((tuple(a), level - b))
    return HPoly(p.dimension, rows)


def _affine_pieces(f: ConvexFunc) -> list:
    if getattr(f, "domain", None) is not None:
        raise UnsupportedOperationError(
            "sublevel rows are only built for domain-free polyhedral objectives"
        )
    if isinstance(f, Affine):
        return [(f.a, f.b)]
    if isinstance(f, MaxAffine):
        return list(f.pieces)
    if isinstance(f, SupportPolygon):
        return [(v, as_q(0)) for v in f.vertices]
    if isinstance(f, ScaledNormInf):
        return list(f.as_max_affine().pieces)
    raise UnsupportedOperationError(
        f"{type(f).__name__} objectives have no polyhedral sublevel sets"
    )


@dataclass(frozen=True)
class TangentNormal:
    C: HCone  # contingent cone to S
    N: FGCone  # normal cone to S


def tangent_normal(p: MosipProblem, x) -> TangentNormal:
    if p.feasible_set is None:
        raise ModelError(
            "tangent/normal cones need an H-representation of S; supply feasible_set"
        )
    x = vec_q(x)
    if not p.feasible_set.contains_point(x):
        raise ModelError("point lies outside S")
    return TangentNormal(
        p.feasible_set.tangent_cone(x), p.feasible_set.normal_cone(x)
    )


@dataclass(frozen=True)
class CandidatePoint:
    """A feasible point with its derived sets, computed eagerly so reads are
    pure lookups."""

    problem: MosipProblem
    x: tuple
    T: tuple
    F: tuple
    F_star: Polytope
    G: tuple
    G_is_empty: bool
    G_star: FGCone
    C: Optional[HCone]
    N: Optional[FGCone]
    Q: Optional[tuple]  # per-objective H-polyhedra when constructible

    @staticmethod
    def build(p: MosipProblem, x) -> "CandidatePoint":
        x = tuple(vec_q(x))
        check_feasible(p, x)
        T = tuple(active_set(p, x, 0))
        fs = f_sets(p, x)
        gs = g_sets(p, x)
        C = N = None
        Q = None
        if p.feasible_set is not None:
            tn = tangent_normal(p, x)
            C, N = tn.C, tn.N
            try:
                Q = tuple(sublevel_Q(p, x, i) for i in range(p.num_objectives))
            except UnsupportedOperationError:
                Q = None
            if not contains(gs.G_star, N).holds:
                raise InternalInconsistencyError(
                    "active-gradient cone escapes the normal cone to S"
                )
        return CandidatePoint(
            problem=p,
            x=x,
            T=T,
            F=fs.F,
            F_star=fs.F_star,
            G=gs.G,
            G_is_empty=gs.is_empty,
            G_star=gs.G_star,
            C=C,
            N=N,
            Q=Q,
        )

    def active(self, eps) -> list:
        return active_set(self.problem, self.x, eps)


# ---------------------------------------------------------------------------
# problem files (JSON, [num, den] rationals, bit-exact for canonical docs)


def _rows_out(poly: HPoly) -> dict:
    return {"rows": [[q_pair(c) for c in list(a) + [b]] for a, b in poly.rows]}


def _rows_in(obj, dim: int) -> HPoly:
    rows = []
    for row in obj["rows"]:
        vals = [as_q(c) for c in row]
        if len(vals) != dim + 1:
            raise ParseError("feasible_set row length mismatch")
        rows.append((vals[:dim], vals[dim]))
    return HPoly(dim, rows)


def problem_to_json(p: MosipProblem) -> dict:
    if isinstance(p.constraints, FiniteFamily):
        constraints = {"finite": [funcs.func_to_json(f) for f in p.constraints.functions]}
    else:
        constraints = {
            "indexed": {
                "family": p.constraints.family,
                "params": p.constraints.params,
                "truncation": p.constraints.truncation,
            }
        }
    out = {
        "dimension": p.dimension,
        "objectives": [funcs.func_to_json(f) for f in p.objectives],
        "constraints": constraints,
    }
    if p.feasible_set is not None:
        out["feasible_set"] = _rows_out(p.feasible_set)
    if p.psi_override is not None:
        out["psi_override"] = funcs.func_to_json(p.psi_override)
    if p.annotations:
        out["annotations"] = p.annotations
    return out


def problem_from_json(doc: dict) -> MosipProblem:
    try:
        dim = int(doc["dimension"])
        objectives = [funcs.func_from_json(o) for o in doc["objectives"]]
        cdoc = doc["constraints"]
        if "finite" in cdoc:
            constraints: ConstraintFamily = FiniteFamily(
                funcs.func_from_json(f) for f in cdoc["finite"]
            )
        elif "indexed" in cdoc:
            idoc = cdoc["indexed"]
            constraints = IndexedFamily(
                idoc["family"], idoc.get("params"), int(idoc["truncation"])
            )
        else:
            raise ParseError("constraints must be 'finite' or 'indexed'")
        feasible = (
            _rows_in(doc["feasible_set"], dim) if "feasible_set" in doc else None
        )
        override = (
            funcs.func_from_json(doc["psi_override"])
            if "psi_override" in doc
            else None
        )
        annotations = doc.get("annotations", {})
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"malformed problem document: {exc}") from exc
    return MosipProblem(dim, objectives, constraints, feasible, override, annotations)


def load_problem(path) -> MosipProblem:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON: {exc}") from exc
    return problem_from_json(doc)


def dump_problem(p: MosipProblem) -> str:
    return json.dumps(problem_to_json(p), sort_keys=True, indent=2) + "\n"
