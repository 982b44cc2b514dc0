"""The gap function sup_{y in S} sum_i lambda_i xi_i'(x - y) and its zero set.

A zero of the gap at a feasible candidate certifies weak efficiency for
lambda >= 0 and efficiency for lambda > 0.  The search does not scan lambda:
it solves one exact LP placing -sum_i lambda_i xi_i inside the normal cone
N(S, x), which is equivalent to a zero value, and every emitted witness is
re-validated against the direct sup-LP.  The perturbed check runs the same
search on tilted objective subdifferentials (each shifted by -w) for w ranging
over axis points and deterministic near-sphere samples of a nu-ball.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from . import lp
from .cones import GenConvexSet, NotMember, membership, zero_interior
from .errors import (
    InternalInconsistencyError,
    ModelError,
    ParseError,
    UnsupportedOperationError,
)
from .funcs import subdiff, subdiff_set
from .problem import CandidatePoint, MosipProblem
from .quals import jsonify
from .rationals import (
    NEG_INF,
    ONE,
    POS_INF,
    Q,
    ZERO,
    as_q,
    float_to_q,
    qdot,
    sqrt_lower_bound,
    vec_q,
)

WEAK_MODE = "weak"
STRONG_MODE = "strong"


class SubgradientPreconditionError(ModelError):
    """A proposed xi_i lies outside the i-th objective subdifferential."""

    def __init__(self, index: int, separator):
        self.index = index
        self.separator = tuple(separator)
        super().__init__(
            f"xi[{index}] is not a subgradient of objective {index} at the "
            f"evaluation point; separating functional {tuple(separator)}"
        )


# ---------------------------------------------------------------------------
# Evaluation


def _sup_lp(p: MosipProblem, x, c):
    """sup_{y in S} c'(x - y), exactly, over the halfspace rows of S."""
    if p.feasible_set is None:
        raise UnsupportedOperationError(
            "the gap function needs a halfspace representation of the "
            "feasible set"
        )
    n = p.dimension
    res = lp.solve(lp.LinearProgram(n, [-ck for ck in c], p.feasible_set.lp_rows()))
    if isinstance(res, lp.Unbounded):
        return POS_INF
    if isinstance(res, lp.Infeasible):
        return NEG_INF  # sup over an empty set
    return qdot(c, x) + res.value


def gap_eval(p: MosipProblem, x, xi, lam):
    """Gap value at x for verified subgradient selections and lambda >= 0.

    lambda is not forced onto the simplex here: the value is positively
    homogeneous in lambda and the scaling property is worth keeping testable.
    """
    x = tuple(vec_q(x))
    lam = tuple(as_q(l) for l in lam)
    if len(lam) != p.num_objectives or len(xi) != p.num_objectives:
        raise ModelError(
            f"expected {p.num_objectives} lambda entries and selections"
        )
    if any(l < 0 for l in lam):
        raise ModelError("lambda must be componentwise nonnegative")
    selections = [tuple(vec_q(s)) for s in xi]
    for i, sel in enumerate(selections):
        ss = subdiff_set(p.objectives[i], x)
        out = membership(sel, GenConvexSet(ss.base, ss.recession))
        if isinstance(out, NotMember):
            raise SubgradientPreconditionError(i, out.separator)
    c = [
        sum((lam[i] * selections[i][k] for i in range(len(lam))), ZERO)
        for k in range(p.dimension)
    ]
    return _sup_lp(p, x, c)


# ---------------------------------------------------------------------------
# Zero search


@dataclass(frozen=True)
class GapWitness:
    mode: str  # weak (lambda >= 0) or strong (lambda > 0)
    lam: tuple
    xi: tuple  # per-objective subgradient selections
    xi_coeffs: tuple  # per-objective convex coefficients over the vertex tables
    xi_vertices: tuple  # per-objective subdifferential vertex tables
    value: object  # recomputed gap value; ZERO on every emitted witness


@dataclass(frozen=True)
class GapRefusal:
    mode: str
    reason: str
    farkas: Optional[tuple] = None


def _objective_tables(p: MosipProblem, x) -> list:
    tables = []
    for i, f in enumerate(p.objectives):
        poly = subdiff(f, x)
        if poly.is_empty:
            raise ModelError(
                f"objective {i} has an empty subdifferential at the candidate"
            )
        tables.append(poly.vertices)
    return tables


def _zero_search(p: MosipProblem, cp: CandidatePoint, mode: str, tilt=None):
    """Joint LP over per-objective coefficients mu_ij and normal-cone weights:
    sum_ij mu_ij (v_ij - tilt) + sum_m eta_m g_m = 0 with sum mu = 1.

    The reduction: the gap vanishes at cp.x iff -sum_i lambda_i xi_i lies in
    N(S, cp.x)."""
    if mode not in (WEAK_MODE, STRONG_MODE):
        raise ModelError(f"unknown gap search mode {mode!r}")
    if cp.N is None:
        raise UnsupportedOperationError(
            "the zero search needs the normal cone of the represented "
            "feasible set"
        )
    n = p.dimension
    tables = _objective_tables(p, cp.x)
    shifted = [
        [tuple(v[k] - (tilt[k] if tilt else ZERO) for k in range(n)) for v in verts]
        for verts in tables
    ]
    gens = cp.N.generators
    num_mu = sum(len(t) for t in tables)
    strong = mode == STRONG_MODE
    num_vars = num_mu + len(gens) + (1 if strong else 0)
    columns = [v for verts in shifted for v in verts] + [tuple(g) for g in gens]
    rows = [
        (
            [col[k] for col in columns] + ([ZERO] if strong else []),
            lp.EQ,
            ZERO,
        )
        for k in range(n)
    ]
    simplex = [ONE] * num_mu + [ZERO] * (num_vars - num_mu)
    rows.append((simplex, lp.EQ, ONE))
    for j in range(num_mu + len(gens)):
        unit = [ZERO] * num_vars
        unit[j] = ONE
        rows.append((unit, lp.GE, ZERO))
    if strong:
        pos = 0
        for verts in tables:
            margin = [ZERO] * num_vars
            for _ in verts:
                margin[pos] = ONE
                pos += 1
            margin[-1] = -ONE
            rows.append((margin, lp.GE, ZERO))
        cap = [ZERO] * num_vars
        cap[-1] = ONE
        rows.append((cap, lp.LE, ONE))
        res = lp.solve(lp.LinearProgram(num_vars, [ZERO] * (num_vars - 1) + [ONE], rows))
        if isinstance(res, lp.Infeasible):
            return GapRefusal(
                mode,
                "no multiplier vector places the weighted subgradient sum "
                "inside the polar of the feasible directions",
                farkas=getattr(res, "farkas", None),
            )
        assert isinstance(res, lp.Optimal)
        if res.value <= 0:
            return GapRefusal(
                mode,
                "every zero of the gap drives some lambda component to zero",
            )
        values = list(res.primal[:num_mu])
    else:
        res = lp.feasible_point(num_vars, rows)
        if isinstance(res, lp.Infeasible):
            return GapRefusal(
                mode,
                "no multiplier vector places the weighted subgradient sum "
                "inside the polar of the feasible directions",
                farkas=getattr(res, "farkas", None),
            )
        values = list(res[:num_mu])
    lam = []
    selections = []
    coeff_rows = []
    pos = 0
    for verts in tables:
        mus = values[pos : pos + len(verts)]
        pos += len(verts)
        li = sum(mus, ZERO)
        lam.append(li)
        if li > 0:
            coeffs = tuple(m / li for m in mus)
        else:
            coeffs = (ONE,) + (ZERO,) * (len(verts) - 1)
        selections.append(
            tuple(
                sum((c * v[k] for c, v in zip(coeffs, verts)), ZERO) for k in range(n)
            )
        )
        coeff_rows.append(coeffs)
    tilt_vec = tuple(tilt) if tilt else tuple(ZERO for _ in range(n))
    c = [
        sum((lam[i] * (selections[i][k] - tilt_vec[k]) for i in range(len(lam))), ZERO)
        for k in range(n)
    ]
    value = _sup_lp(p, cp.x, c)
    if value != 0:
        raise InternalInconsistencyError(
            "the normal-cone reduction produced multipliers whose gap value "
            f"is {value}, not zero"
        )
    return GapWitness(
        mode=mode,
        lam=tuple(lam),
        xi=tuple(selections),
        xi_coeffs=tuple(coeff_rows),
        xi_vertices=tuple(tuple(t) for t in tables),
        value=value,
    )


def gap_zero_search(p: MosipProblem, cp: CandidatePoint, mode: str = WEAK_MODE):
    """GapWitness with an exactly-zero recomputed value, or a GapRefusal."""
    return _zero_search(p, cp, mode, tilt=None)


def witness_issues(p: MosipProblem, cp: CandidatePoint, w: GapWitness) -> list:
    """Exactness defects of a (possibly deserialized) witness."""
    issues = []
    n = p.dimension
    if len(w.lam) != p.num_objectives:
        return [f"{len(w.lam)} lambda entries for {p.num_objectives} objectives"]
    if any(l < 0 for l in w.lam):
        issues.append("negative lambda component")
    if sum(w.lam, ZERO) != 1:
        issues.append("lambda is not on the simplex")
    if w.mode == STRONG_MODE and any(l <= 0 for l in w.lam):
        issues.append("strong witness needs every lambda component positive")
    for i in range(p.num_objectives):
        ref = subdiff(p.objectives[i], cp.x).vertices
        if tuple(w.xi_vertices[i]) != tuple(ref):
            issues.append(f"objective {i}: vertex table drifted")
            continue
        coeffs = w.xi_coeffs[i]
        if len(coeffs) != len(ref) or any(c < 0 for c in coeffs):
            issues.append(f"objective {i}: bad convex coefficients")
            continue
        if sum(coeffs, ZERO) != 1:
            issues.append(f"objective {i}: coefficients do not sum to 1")
        rebuilt = tuple(
            sum((c * v[k] for c, v in zip(coeffs, ref)), ZERO) for k in range(n)
        )
        if rebuilt != tuple(w.xi[i]):
            issues.append(f"objective {i}: xi does not match its coefficients")
    if not issues:
        value = gap_eval(p, cp.x, w.xi, w.lam)
        if value != w.value:
            issues.append(f"recorded value {w.value} but recomputed {value}")
        if value != 0:
            issues.append(f"gap value is {value}, not zero")
    return issues


# ---------------------------------------------------------------------------
# Perturbed (tilted) check


@dataclass(frozen=True)
class TiltOutcome:
    w: tuple
    success: bool
    witness: Optional[GapWitness]
    reason: str = ""


@dataclass(frozen=True)
class PerturbedGapReport:
    nu: Q
    per_w: tuple  # TiltOutcome per probed tilt (axis points first)
    exact_equivalence: bool  # interior test: nu-ball inside F* + G*
    exact_certified: bool  # the interior radius was computed exactly
    hypotheses_met: bool  # continuity + differentiability flags
    note: str = ""

    @property
    def all_sampled_succeed(self) -> bool:
        return all(t.success for t in self.per_w)


_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29)


def _van_der_corput(k: int, base: int) -> float:
    value, denom = 0.0, 1.0
    while k:
        denom *= base
        k, rem = divmod(k, base)
        value += rem / denom
    return value


def _sphere_directions(n: int, count: int) -> list:
    """Deterministic low-discrepancy unit directions (floats)."""
    out = []
    k = 1
    while len(out) < count:
        u = [2.0 * _van_der_corput(k, _PRIMES[j % len(_PRIMES)]) - 1.0 for j in range(n)]
        k += 1
        norm = math.sqrt(sum(c * c for c in u))
        if norm < 1e-6:
            continue
        out.append(tuple(c / norm for c in u))
    return out


def _rational_ball_point(direction, nu: Q) -> Optional[tuple]:
    """A rational point of norm <= nu along (approximately) `direction`."""
    v = [float_to_q(c) for c in direction]
    length_sq = sum((c * c for c in v), ZERO)
    if length_sq == 0:
        return None
    rho = nu * sqrt_lower_bound(1 / length_sq)
    return tuple(rho * c for c in v)


def perturbed_gap_check(
    p: MosipProblem, cp: CandidatePoint, nu, sample_count: int = 8
) -> PerturbedGapReport:
    """Two tracks.  Exact: is the closed nu-ball inside F*(x) + G*(x) (the
    interior condition the tilted family is equivalent to for continuous
    problems with continuously differentiable constraints).  Sampled: run the
    tilted zero search at the 2n axis points of radius nu and `sample_count`
    deterministic near-sphere rational tilts."""
    nu = as_q(nu)
    if nu <= 0:
        raise ModelError("the tilt radius must be positive")
    n = p.dimension
    zi = zero_interior(GenConvexSet(cp.F_star, cp.G_star))
    exact_equiv = bool(zi.inside and zi.radius_lower_bound >= nu)
    tilts = []
    for j in range(n):
        for sign in (ONE, -ONE):
            w = [ZERO] * n
            w[j] = sign * nu
            tilts.append(tuple(w))
    if n > 1:
        for direction in _sphere_directions(n, sample_count):
            w = _rational_ball_point(direction, nu)
            if w is not None and w not in tilts:
                tilts.append(w)
    outcomes = []
    for w in tilts:
        result = _zero_search(p, cp, WEAK_MODE, tilt=w)
        if isinstance(result, GapWitness):
            outcomes.append(TiltOutcome(w=w, success=True, witness=result))
        else:
            outcomes.append(
                TiltOutcome(w=w, success=False, witness=None, reason=result.reason)
            )
    hypotheses = bool(p.flag("continuous") and p.flag("differentiable"))
    note = "" if hypotheses else "outside theorem hypotheses"
    if not zi.exact and not exact_equiv:
        note = (note + "; " if note else "") + (
            "interior radius is a lower bound only; the exact track may "
            "under-report"
        )
    return PerturbedGapReport(
        nu=nu,
        per_w=tuple(outcomes),
        exact_equivalence=exact_equiv,
        exact_certified=zi.exact,
        hypotheses_met=hypotheses,
        note=note,
    )


# ---------------------------------------------------------------------------
# Serialization


def witness_to_json(w: GapWitness) -> dict:
    return jsonify(
        {
            "mode": w.mode,
            "lambda": list(w.lam),
            "xi": [list(s) for s in w.xi],
            "xi_coeffs": [list(c) for c in w.xi_coeffs],
            "xi_vertices": [[list(v) for v in t] for t in w.xi_vertices],
            "value": w.value,
        }
    )


def _q_in(obj) -> Q:
    if not (isinstance(obj, (list, tuple)) and len(obj) == 2):
        raise ParseError(f"expected a [num, den] pair, got {obj!r}")
    return Q(int(obj[0]), int(obj[1]))


def witness_from_json(doc: dict) -> GapWitness:
    try:
        mode = doc["mode"]
        if mode not in (WEAK_MODE, STRONG_MODE):
            raise ParseError(f"unknown gap witness mode {mode!r}")
        return GapWitness(
            mode=mode,
            lam=tuple(_q_in(l) for l in doc["lambda"]),
            xi=tuple(tuple(_q_in(c) for c in s) for s in doc["xi"]),
            xi_coeffs=tuple(tuple(_q_in(c) for c in s) for s in doc["xi_coeffs"]),
            xi_vertices=tuple(
                tuple(tuple(_q_in(c) for c in v) for v in t) for t in doc["xi_vertices"]
            ),
            value=_q_in(doc["value"]),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"malformed gap witness document: {exc}") from exc


def report_to_json(obj) -> dict:
    """The shared report shape: {mode, witness?, per_w?, exact_equivalence_verdict?}."""
    if isinstance(obj, GapWitness):
        return {"mode": obj.mode, "witness": witness_to_json(obj)}
    if isinstance(obj, GapRefusal):
        return jsonify(
            {
                "mode": obj.mode,
                "witness": None,
                "reason": obj.reason,
                "farkas": None if obj.farkas is None else list(obj.farkas),
            }
        )
    if isinstance(obj, PerturbedGapReport):
        return jsonify(
            {
                "mode": "perturbed",
                "nu": obj.nu,
                "per_w": [{"w": list(t.w), "success": t.success} for t in obj.per_w],
                "exact_equivalence_verdict": obj.exact_equivalence,
                "exact_certified": obj.exact_certified,
                "hypotheses_met": obj.hypotheses_met,
                "note": obj.note,
            }
        )
    raise ModelError(f"no report form for {type(obj).__name__}")
