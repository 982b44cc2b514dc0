"""Thirteen data-qualification checkers plus the implication-diagram
validator.

Every checker returns a three-valued status — Holds, Fails, Undecidable —
together with a provenance tag and a machine-verifiable witness (or
counter-witness) whenever the underlying decision is a linear program.  The
third value is not a cop-out: with an infinite index family sliced at a
truncation, or constraint subdifferentials that are polygonal stand-ins for
curved sets, some verdicts are honestly unreachable from the data, and the
checkers say so instead of guessing.

A few checkers are decision procedures over the *given* data rather than the
underlying infinite family; the provenance tag records how far the data can
be trusted:

* ``exact`` — finite family, or an annotation pins the truncated computation
  to the full one at this point, or a closed-form envelope override is used;
* ``truncated`` — an infinite tail was cut off;
* ``approximated-subdifferentials`` — the data itself stands in for curved
  originals.

Refutations that survive any extension of the family (a zero decomposition
over a *subset* of the true subgradient union, say) carry a note saying so.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from . import lp
from .cones import (
    FGCone,
    GenConvexSet,
    HCone,
    Polytope,
    Member,
    cone_member,
    contains,
    dd_convert,
    membership,
    span_rank,
)
from .errors import (
    ModelError,
    UnsupportedDimensionError,
    UnsupportedOperationError,
)
from .funcs import (
    Affine,
    MaxAffine,
    NegSqrtParabola1D,
    ScaledNormInf,
    SupportPolygon,
    dir_derivative,
    evaluate,
    subdiff_set,
)
from .problem import (
    EXACT,
    TRUNCATED,
    CandidatePoint,
    MosipProblem,
    active_set,
    g_data_provenance,
    psi_data_provenance,
    psi_subdiff,
    worst_provenance,
)
from .rationals import (
    NEG_INF,
    NegSqrt,
    ONE,
    Q,
    ZERO,
    as_q,
    q_pair,
    qdot,
    sqrt_lower_bound,
)

QUAL_IDS = (
    "SCQ",
    "SSCQ",
    "MFCQ",
    "PMFCQ",
    "LFMCQ",
    "COCQ",
    "KTCQ",
    "PLVCQ",
    "CCCQ",
    "ACQ",
    "WADQ",
    "EADQ",
    "MOQ",
)

HOLDS = "Holds"
FAILS = "Fails"
UNDECIDABLE = "Undecidable"

DEFAULT_EPS_GRID = tuple(Q(1, 2**k) for k in range(11))

# probe fan for envelope directional derivatives when the subdifferential is
# empty (vertical tangents); complete for n = 1, best-effort for n = 2
_FAN_2D = tuple(
    (Q(a), Q(b))
    for a, b in (
        (1, 0), (1, 1), (0, 1), (-1, 1),
        (-1, 0), (-1, -1), (0, -1), (1, -1),
        (2, 1), (1, 2), (-1, 2), (-2, 1),
        (-2, -1), (-1, -2), (1, -2), (2, -1),
    )
)


@dataclass(frozen=True)
class QualOptions:
    eps_grid: tuple = DEFAULT_EPS_GRID
    refutation_member_cap: int = 8  # per-member Slater refutation attempts


@dataclass(frozen=True)
class QualReport:
    qual: str
    status: str
    provenance: str
    witness: Optional[dict] = None
    notes: str = ""


# ---------------------------------------------------------------------------
# shared machinery


def _subgradient_union(p: MosipProblem, x, eps) -> tuple:
    """Union of the eps-active constraint subdifferentials at x, split into
    base vertices and recession generators; empty subdifferentials contribute
    nothing (their members impose no subgradient inequality here)."""
    base: list = []
    rec: list = []
    for k in active_set(p, x, eps):
        ss = subdiff_set(p.constraint(k), x)
        base.extend(v for v in ss.base.vertices if v not in base)
        rec.extend(g for g in ss.recession.generators if g not in rec)
    return base, rec


def _min_max_direction(points, rec_gens, dim: int) -> tuple:
    """min over d in the unit box of max_v v'd subject to r'd <= 0 for the
    recession generators.  Returns (value, d).  The value is <= 0 (d = 0 is
    feasible), and it is < 0 exactly when a strictly separating direction
    exists (positive homogeneity makes the box harmless)."""
    if not points:
        raise ValueError("min-max over an empty point set")
    rows = [(list(v) + [-ONE], lp.LE, ZERO) for v in points]
    rows += [(list(r) + [ZERO], lp.LE, ZERO) for r in rec_gens]
    for j in range(dim):
        e = [ZERO] * (dim + 1)
        e[j] = ONE
        rows.append((list(e), lp.LE, ONE))
        rows.append(([-c for c in e], lp.LE, ONE))
    obj = [ZERO] * dim + [-ONE]
    res = lp.solve(lp.LinearProgram(dim + 1, obj, rows))
    assert isinstance(res, lp.Optimal), "min-max LP is always solvable"
    return -res.value, tuple(res.primal[:dim])


def _zero_decomposition(points, rec_gens, dim: int) -> dict:
    """Write 0 as a convex combination of the (canonicalized) points plus a
    conic one of the generators; exists exactly when no strictly negative
    direction does, and persists under any extension of the point set."""
    poly = Polytope(dim, points)
    cone = FGCone(dim, rec_gens)
    out = membership(ZERO_POINT(dim), GenConvexSet(poly, cone))
    assert isinstance(out, Member), "no strict direction implies 0 in the hull"
    return {
        "kind": "zero_decomposition",
        "points": poly.vertices,
        "alpha": out.alpha,
        "generators": cone.generators,
        "mu": out.mu,
    }


def ZERO_POINT(dim: int) -> tuple:
    return tuple(ZERO for _ in range(dim))


def _pl_rows(f) -> Optional[tuple]:
    """Affine pieces and domain rows of a piecewise-linear function, or None
    when f is not piecewise linear."""
    if isinstance(f, Affine):
        pieces = [(f.a, f.b)]
    elif isinstance(f, MaxAffine):
        pieces = list(f.pieces)
    elif isinstance(f, SupportPolygon):
        pieces = [(v, ZERO) for v in f.vertices]
    elif isinstance(f, ScaledNormInf):
        pieces = list(f.as_max_affine().pieces)
    else:
        return None
    dom = list(f.domain.rows) if getattr(f, "domain", None) is not None else []
    return pieces, dom


def _rational_slack(value) -> Q:
    """A positive rational epsilon with value <= -epsilon, for a negative
    extended-real value."""
    if isinstance(value, NegSqrt):
        return sqrt_lower_bound(value.radicand)
    if value is NEG_INF:
        return ONE
    return -as_q(value)


def jsonify(obj):
    """Recursive JSON form: rationals become [num, den] pairs."""
    if obj is None or isinstance(obj, (bool, str, int)):
        return obj
    if isinstance(obj, Q):
        return q_pair(obj)
    if isinstance(obj, dict):
        return {k: jsonify(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonify(v) for v in obj]
    raise TypeError(f"cannot serialize {type(obj).__name__}")


# ---------------------------------------------------------------------------
# Slater-type conditions


def _slater_lp(members, n: int):
    """Global LP minimizing the pointwise max of piecewise-linear members
    (with their domain rows).  Returns ("optimal", tau*, x), ("none", ...)
    when some member is not piecewise linear, or a strictly negative witness
    found by walking an unbounded ray."""
    rows = []
    for f in members:
        pd = _pl_rows(f)
        if pd is None:
            return ("none", None, None)
        pieces, dom = pd
        for a, b in pieces:
            rows.append((list(a) + [-ONE], lp.LE, -as_q(b)))
        for a, c in dom:
            rows.append((list(a) + [ZERO], lp.LE, c))
    obj = [ZERO] * n + [-ONE]
    res = lp.solve(lp.LinearProgram(n + 1, obj, rows))
    if isinstance(res, lp.Infeasible):
        return ("infeasible", None, None)
    if isinstance(res, lp.Unbounded):
        point, ray = list(res.feasible_point), list(res.ray)
        scale = ONE
        for _ in range(80):
            x = [point[i] + scale * ray[i] for i in range(n)]
            tau = point[n] + scale * ray[n]
            if tau < 0:
                return ("optimal", tau, tuple(x))
            scale *= 2
        raise AssertionError("unbounded ray never went negative")
    return ("optimal", -res.value, tuple(res.primal[:n]))


def _verify_negative(p: MosipProblem, x) -> Optional[Q]:
    """Evaluate every truncated member at x exactly; a positive rational
    slack when all are strictly negative, else None."""
    worst = max(evaluate(p.constraint(k), x) for k in p.indices())
    if p.psi_override is not None:
        worst = max(worst, evaluate(p.psi_override, x))
    if not (worst < 0):
        return None
    return _rational_slack(worst)


def _member_nonnegative_everywhere(p: MosipProblem, cap: int) -> Optional[int]:
    """Index of a constraint whose global minimum is >= 0 (so no point makes
    it strictly negative), or None.  Such a member refutes the Slater
    condition for any extension of the family."""
    n = p.dimension
    for k in p.indices():
        if k >= cap:
            break
        pd = _pl_rows(p.constraint(k))
        if pd is None:
            continue  # built-in curved members all dip below zero
        state, tau, _ = _slater_lp([p.constraint(k)], n)
        if state == "optimal" and tau >= 0:
            return k
    return None


def _slater_pair(p: MosipProblem, cp: CandidatePoint, opts: QualOptions) -> tuple:
    """SCQ and SSCQ together: both reduce to making the envelope strictly
    negative somewhere, and every certificate is re-verified by exact
    evaluation over the truncated family."""
    n = p.dimension
    finite = not p.truncated

    def reports(status, prov, witness, notes, scq_status=None, scq_witness=None, scq_notes=None):
        return (
            QualReport("SCQ", scq_status or status, prov, scq_witness or witness, scq_notes or notes),
            QualReport("SSCQ", status, prov, witness, notes),
        )

    # 1. hunt for a strictly-negative point of the envelope
    if isinstance(p.psi_override, NegSqrtParabola1D):
        apex = (as_q(p.psi_override.t),)
        slack = _verify_negative(p, apex)
        assert slack is not None, "parabola apex is strictly negative"
        witness = {"kind": "slater_point", "point": apex, "slack": slack}
        return reports(HOLDS, EXACT, witness, "envelope minimum at the apex; verified by evaluation")

    search = [p.psi_override] if p.psi_override is not None else [
        p.constraint(k) for k in p.indices()
    ]
    state, tau, x0 = _slater_lp(search, n)
    if state == "optimal" and tau < 0:
        slack = _verify_negative(p, x0)
        if slack is not None:
            prov = EXACT if (p.psi_override is not None or finite) else TRUNCATED
            witness = {"kind": "slater_point", "point": tuple(x0), "slack": slack}
            note = (
                "strictly negative envelope point; verified by evaluating every member"
                if prov == EXACT
                else "strictly negative over the truncated family only; the tail is unseen"
            )
            return reports(HOLDS, prov, witness, note)

    if state == "infeasible":
        witness = {"kind": "empty_domain_intersection"}
        return reports(FAILS, EXACT, witness, "the member domains have empty intersection")

    # 2. no Slater point; decide Fails where the data allows
    if state == "optimal" and tau is not None and tau >= 0:
        if p.psi_override is not None:
            # the envelope's global minimum is >= 0: SSCQ fails outright
            k = _member_nonnegative_everywhere(p, opts.refutation_member_cap)
            sscq_w = {"kind": "envelope_minimum", "value": tau}
            if k is not None:
                scq_w = {"kind": "nonnegative_member", "index": k}
                return reports(
                    FAILS,
                    EXACT,
                    sscq_w,
                    "the envelope never goes strictly negative",
                    scq_status=FAILS,
                    scq_witness=scq_w,
                    scq_notes=f"constraint {k} is nonnegative everywhere; refutation survives any family extension",
                )
            return reports(
                FAILS,
                EXACT,
                sscq_w,
                "the envelope never goes strictly negative",
                scq_status=UNDECIDABLE,
                scq_witness=None,
                scq_notes="envelope infimum is 0 but members could each dip strictly negative",
            )
        if finite:
            witness = {"kind": "envelope_minimum", "value": tau}
            return reports(FAILS, EXACT, witness, "finite family: the pointwise max has nonnegative global minimum")
        k = _member_nonnegative_everywhere(p, opts.refutation_member_cap)
        if k is not None:
            witness = {"kind": "nonnegative_member", "index": k}
            return reports(FAILS, EXACT, witness, f"constraint {k} is nonnegative everywhere; refutation survives any family extension")
        return reports(UNDECIDABLE, TRUNCATED, None, "no Slater point among the truncated members; the tail is unseen")

    return reports(
        UNDECIDABLE,
        psi_data_provenance(p),
        None,
        "family mixes non-polyhedral members without an envelope override",
    )


def _check_scq(p, cp, opts):
    return _slater_pair(p, cp, opts)[0]


def _check_sscq(p, cp, opts):
    return _slater_pair(p, cp, opts)[1]


# ---------------------------------------------------------------------------
# active-gradient conditions


def _check_mfcq(p, cp, opts):
    prov = g_data_provenance(p, cp.x)
    if cp.G_is_empty:
        return QualReport(
            "MFCQ",
            FAILS,
            prov,
            {"kind": "empty_active_union"},
            "the active subgradient union is empty; the definition's fallback clause applies",
        )
    base, rec = _subgradient_union(p, cp.x, ZERO)
    value, d = _min_max_direction(base, rec, p.dimension)
    if value < 0:
        witness = {"kind": "direction", "direction": d, "max_inner": value}
        note = "strictly negative direction against every active subgradient"
        if prov != EXACT:
            note += "; union taken over the truncated data"
        return QualReport("MFCQ", HOLDS, prov, witness, note)
    witness = _zero_decomposition(base, rec, p.dimension)
    return QualReport(
        "MFCQ",
        FAILS,
        prov,
        witness,
        "0 is a convex combination of active subgradients; the refutation survives any family extension",
    )


def _check_pmfcq(p, cp, opts):
    x, n = cp.x, p.dimension
    prov = g_data_provenance(p, x)
    finite = not p.truncated
    grid = (ZERO,) if finite else tuple(opts.eps_grid)
    values = []
    for eps in grid:
        base, rec = _subgradient_union(p, x, eps)
        if not base and not rec:
            witness = {"kind": "empty_subgradient_union", "eps": eps}
            return QualReport(
                "PMFCQ",
                HOLDS,
                prov,
                witness,
                "the eps-active subgradient union is empty, so its supremum is -infinity",
            )
        value, d = _min_max_direction(base, rec, n)
        values.append((eps, value))
        if value < 0:
            witness = {"kind": "grid_certificate", "eps": eps, "direction": d, "value": value}
            note = "supremum over the eps-active subgradient union is strictly negative"
            if prov != EXACT:
                note += " (truncated union)"
            return QualReport("PMFCQ", HOLDS, prov, witness, note)
    if finite:
        eps, value = values[-1]
        witness = {"kind": "stabilized_value", "value": value}
        return QualReport(
            "PMFCQ",
            FAILS,
            prov,
            witness,
            "finite family: the active set is stable for small eps and the min-max value is nonnegative",
        )
    return QualReport(
        "PMFCQ",
        UNDECIDABLE,
        prov,
        {"kind": "grid_values", "values": [[e, v] for e, v in values]},
        "every grid epsilon gave a nonnegative value; the infimum over eps cannot be exhausted",
    )


def _check_lfmcq(p, cp, opts):
    if cp.N is None:
        return QualReport("LFMCQ", UNDECIDABLE, g_data_provenance(p, cp.x), None, "needs an H-representation of S for the normal cone")
    prov = g_data_provenance(p, cp.x)
    fwd = contains(cp.G_star, cp.N)
    if not fwd.holds:
        witness = {"kind": "escaping_generator", "direction": fwd.witness, "escapes": "normal cone"}
        return QualReport("LFMCQ", FAILS, prov, witness, "an active-subgradient direction leaves the normal cone")
    back = contains(cp.N, cp.G_star)
    if not back.holds:
        witness = {"kind": "escaping_generator", "direction": back.witness, "escapes": "active-gradient cone"}
        return QualReport("LFMCQ", FAILS, prov, witness, "a normal direction is not conically generated by active subgradients")
    witness = {"kind": "mutual_containment", "normal_generators": cp.N.generators, "active_generators": cp.G_star.generators}
    return QualReport("LFMCQ", HOLDS, prov, witness, "normal cone and active-gradient cone coincide")


# ---------------------------------------------------------------------------
# envelope-derivative conditions


def _envelope_halfspace_set(p, cp) -> Optional[HCone]:
    """{d : psi'(x; d) <= 0} as an H-cone when the envelope subdifferential is
    available and nonempty: the negative polar of base vertices plus recession
    generators."""
    ss = psi_subdiff(p, cp.x)
    if ss is None or ss.is_empty:
        return None
    return HCone(p.dimension, list(ss.base.vertices) + list(ss.recession.generators))


def _probe_fan(n: int) -> tuple:
    if n == 1:
        return ((ONE,), (-ONE,))
    return _FAN_2D


def _check_cocq(p, cp, opts):
    prov = psi_data_provenance(p)
    ss = psi_subdiff(p, cp.x)
    if ss is None:
        return QualReport("COCQ", UNDECIDABLE, prov, None, "envelope subdifferential unavailable under truncation")
    n = p.dimension
    if not ss.is_empty:
        value, d = _min_max_direction(list(ss.base.vertices), list(ss.recession.generators), n)
        if value < 0:
            witness = {"kind": "direction", "direction": d, "derivative_bound": value}
            return QualReport("COCQ", HOLDS, prov, witness, "direction with strictly negative envelope derivative")
        witness = _zero_decomposition(
            list(ss.base.vertices), list(ss.recession.generators), n
        )
        return QualReport("COCQ", FAILS, prov, witness, "0 lies in the envelope subdifferential, so no descent direction exists")
    # empty subdifferential: fall back to the closed-form directional derivative
    if p.psi_override is None or n > 2:
        return QualReport("COCQ", UNDECIDABLE, prov, None, "empty envelope subdifferential without a closed-form derivative")
    for d in _probe_fan(n):
        if dir_derivative(p.psi_override, cp.x, d) < 0:
            witness = {"kind": "direction", "direction": d, "note": "closed-form derivative"}
            return QualReport("COCQ", HOLDS, prov, witness, "closed-form envelope derivative is strictly negative along the witness")
    return QualReport("COCQ", UNDECIDABLE, prov, None, "no probe direction certified descent; the derivative has no finite representation")


def _check_ktcq(p, cp, opts):
    prov = psi_data_provenance(p)
    if cp.C is None:
        return QualReport("KTCQ", UNDECIDABLE, prov, None, "needs an H-representation of S for the contingent cone")
    n = p.dimension
    hs = _envelope_halfspace_set(p, cp)
    if hs is not None:
        res = contains(hs, cp.C)
        if res.holds:
            witness = {"kind": "containment", "lhs_normals": hs.normals, "rhs_normals": cp.C.normals}
            return QualReport("KTCQ", HOLDS, prov, witness, "every envelope-descent direction is a feasible direction")
        witness = {"kind": "escaping_direction", "direction": res.witness}
        return QualReport("KTCQ", FAILS, prov, witness, "an envelope-descent direction leaves the contingent cone")
    ss = psi_subdiff(p, cp.x)
    if ss is None or p.psi_override is None or n > 2:
        return QualReport("KTCQ", UNDECIDABLE, prov, None, "envelope subdifferential unavailable; no closed-form fallback applies")
    if n == 1:
        # the descent set is a cone in one variable: classify by probing both
        # axis directions (the excluded ones become halfspace normals)
        normals = []
        for d in ((ONE,), (-ONE,)):
            if dir_derivative(p.psi_override, cp.x, d) > 0:
                normals.append(d)
        hs = HCone(1, normals)
        res = contains(hs, cp.C)
        if res.holds:
            witness = {"kind": "containment", "lhs_normals": hs.normals, "rhs_normals": cp.C.normals}
            return QualReport("KTCQ", HOLDS, prov, witness, "descent set classified by the closed-form derivative; contained in the contingent cone")
        witness = {"kind": "escaping_direction", "direction": res.witness}
        return QualReport("KTCQ", FAILS, prov, witness, "a closed-form descent direction leaves the contingent cone")
    for d in _probe_fan(n):
        if dir_derivative(p.psi_override, cp.x, d) <= 0 and not cp.C.member(d):
            witness = {"kind": "escaping_direction", "direction": d}
            return QualReport("KTCQ", FAILS, prov, witness, "a probed descent direction leaves the contingent cone")
    return QualReport("KTCQ", UNDECIDABLE, prov, None, "probing cannot certify the containment in two variables")


def _check_plvcq(p, cp, opts):
    prov = worst_provenance(psi_data_provenance(p), g_data_provenance(p, cp.x))
    ss = psi_subdiff(p, cp.x)
    if ss is None:
        return QualReport("PLVCQ", UNDECIDABLE, prov, None, "envelope subdifferential unavailable under truncation")
    if ss.is_empty:
        return QualReport(
            "PLVCQ",
            HOLDS,
            prov,
            {"kind": "empty_subdifferential"},
            "the envelope subdifferential is empty, so the containment is vacuous",
        )
    memberships = []
    for v in ss.base.vertices:
        coeffs = cone_member(v, cp.G_star)
        if coeffs is None:
            witness = {"kind": "non_member_vertex", "vertex": v, "cone_generators": cp.G_star.generators}
            return QualReport("PLVCQ", FAILS, prov, witness, "an envelope subgradient is not conically generated by active subgradients")
        memberships.append({"vertex": v, "coefficients": tuple(coeffs)})
    for g in ss.recession.generators:
        coeffs = cone_member(g, cp.G_star)
        if coeffs is None:
            witness = {"kind": "non_member_direction", "direction": g, "cone_generators": cp.G_star.generators}
            return QualReport("PLVCQ", FAILS, prov, witness, "an envelope recession direction is not conically generated by active subgradients")
        memberships.append({"vertex": g, "coefficients": tuple(coeffs)})
    witness = {"kind": "memberships", "entries": memberships}
    return QualReport("PLVCQ", HOLDS, prov, witness, "every envelope subgradient decomposes over the active-gradient cone")


# ---------------------------------------------------------------------------
# closedness, polar and directional conditions


def _check_cccq(p, cp, opts):
    prov = g_data_provenance(p, cp.x)
    if prov == EXACT:
        witness = {"kind": "finitely_generated", "generators": cp.G_star.generators}
        return QualReport("CCCQ", HOLDS, prov, witness, "a finitely generated cone is closed")
    return QualReport(
        "CCCQ",
        UNDECIDABLE,
        prov,
        None,
        "closedness of the true conical hull is beyond finitely generated data",
    )


def _g_polar(p, cp) -> tuple:
    """The negative polar of the active-subgradient union, preferring a
    documented closed form over the polar of the truncated cone."""
    doc = p.annotations.get("documented_g_polar")
    if doc:
        normals = [tuple(Q(c[0], c[1]) for c in row) for row in doc["normals"]]
        return HCone(p.dimension, normals), EXACT, "documented closed-form polar"
    prov = g_data_provenance(p, cp.x)
    return HCone(p.dimension, cp.G_star.generators), prov, "polar of the truncated active-gradient cone" if prov != EXACT else "polar of the active-gradient cone"


def _check_acq(p, cp, opts):
    if cp.G_is_empty:
        return QualReport("ACQ", FAILS, g_data_provenance(p, cp.x), {"kind": "empty_active_union"}, "the active subgradient union is empty; the definition's fallback clause applies")
    if cp.C is None:
        return QualReport("ACQ", UNDECIDABLE, g_data_provenance(p, cp.x), None, "needs an H-representation of S for the contingent cone")
    g0, prov, source = _g_polar(p, cp)
    res = contains(g0, cp.C)
    if res.holds:
        witness = {"kind": "containment", "lhs_normals": g0.normals, "rhs_normals": cp.C.normals}
        return QualReport("ACQ", HOLDS, prov, witness, f"{source} lies inside the contingent cone")
    witness = {"kind": "escaping_direction", "direction": res.witness}
    return QualReport("ACQ", FAILS, prov, witness, f"a direction of the {source} leaves the contingent cone")


def _fg_polar_cone(p, cp) -> tuple:
    """F^0 intersect G^0 as generators (double description), with provenance."""
    g0, gprov, source = _g_polar(p, cp)
    rows = list(cp.F) + list(g0.normals)
    cone = dd_convert(HCone(p.dimension, rows))
    return cone, gprov, source


def _check_wadq(p, cp, opts):
    if cp.G_is_empty:
        return QualReport("WADQ", FAILS, g_data_provenance(p, cp.x), {"kind": "empty_active_union"}, "the active subgradient union is empty; the definition's fallback clause applies")
    if cp.C is None:
        return QualReport("WADQ", UNDECIDABLE, g_data_provenance(p, cp.x), None, "needs an H-representation of S for the contingent cone")
    cone, prov, source = _fg_polar_cone(p, cp)
    tested = []
    for g in cone.generators:
        if max(qdot(v, g) for v in cp.F) < 0:  # strictly objective-decreasing
            if not cp.C.member(g):
                witness = {"kind": "escaping_generator", "generator": g}
                return QualReport("WADQ", FAILS, prov, witness, "an objective-decreasing polar generator leaves the contingent cone")
            tested.append(g)
    witness = {"kind": "generator_memberships", "generators": tested}
    note = "every objective-decreasing generator of the polar intersection is a feasible direction"
    if not tested:
        note = "no polar generator is strictly objective-decreasing; the containment is vacuous on generators"
    return QualReport("WADQ", HOLDS, prov, witness, note + f" ({source})")


def _check_eadq(p, cp, opts):
    if cp.G_is_empty:
        return QualReport("EADQ", FAILS, g_data_provenance(p, cp.x), {"kind": "empty_active_union"}, "the active subgradient union is empty; the definition's fallback clause applies")
    if cp.Q is None:
        return QualReport("EADQ", UNDECIDABLE, g_data_provenance(p, cp.x), None, "needs sublevel-set H-representations for every objective")
    cone, prov, source = _fg_polar_cone(p, cp)
    for g in cone.generators:
        for i, qi in enumerate(cp.Q):
            ci = qi.tangent_cone(cp.x)
            if not ci.member(g):
                witness = {"kind": "escaping_generator", "generator": g, "objective": i}
                return QualReport("EADQ", FAILS, prov, witness, "a polar generator leaves a sublevel contingent cone")
    witness = {"kind": "generator_memberships", "generators": cone.generators}
    return QualReport("EADQ", HOLDS, prov, witness, f"every generator of the polar intersection is tangent to every sublevel set ({source})")


def _check_moq(p, cp, opts):
    rank = span_rank(cp.F)
    n = p.dimension
    witness = {"kind": "span_rank", "rank": rank, "needed": n, "points": cp.F}
    if rank == n:
        return QualReport("MOQ", HOLDS, EXACT, witness, "objective subgradients span the whole space")
    return QualReport("MOQ", FAILS, EXACT, witness, "objective subgradients span a proper subspace")


_CHECKERS = {
    "SCQ": _check_scq,
    "SSCQ": _check_sscq,
    "MFCQ": _check_mfcq,
    "PMFCQ": _check_pmfcq,
    "LFMCQ": _check_lfmcq,
    "COCQ": _check_cocq,
    "KTCQ": _check_ktcq,
    "PLVCQ": _check_plvcq,
    "CCCQ": _check_cccq,
    "ACQ": _check_acq,
    "WADQ": _check_wadq,
    "EADQ": _check_eadq,
    "MOQ": _check_moq,
}


def check(qual: str, p: MosipProblem, cp: CandidatePoint, opts: Optional[QualOptions] = None) -> QualReport:
    """Run one checker; missing prerequisites surface as Undecidable, never a
    crash."""
    if qual not in _CHECKERS:
        raise ModelError(f"unknown qualification {qual!r}")
    opts = opts or QualOptions()
    try:
        return _CHECKERS[qual](p, cp, opts)
    except (UnsupportedOperationError, UnsupportedDimensionError) as exc:
        return QualReport(qual, UNDECIDABLE, g_data_provenance(p, cp.x), None, f"prerequisite unavailable: {exc}")


def check_all(p: MosipProblem, cp: CandidatePoint, opts: Optional[QualOptions] = None) -> list:
    """All thirteen reports, in canonical order.  SCQ and SSCQ share one
    analysis, so the pair is computed once."""
    opts = opts or QualOptions()
    scq, sscq = _slater_pair(p, cp, opts)
    out = [scq, sscq]
    for qual in QUAL_IDS[2:]:
        out.append(check(qual, p, cp, opts))
    return out


# ---------------------------------------------------------------------------
# implication diagram


@dataclass(frozen=True)
class Arrow:
    antecedents: tuple
    consequents: tuple
    side: tuple  # of {"continuous", "nonempty_active", "single_objective"}

    def label(self) -> str:
        pre = " and ".join(self.antecedents)
        post = " and ".join(self.consequents)
        side = f" [{', '.join(self.side)}]" if self.side else ""
        return f"{pre} => {post}{side}"


ARROWS = (
    Arrow(("SSCQ",), ("SCQ",), ()),
    Arrow(("SCQ",), ("SSCQ",), ("continuous",)),
    Arrow(("SCQ",), ("MFCQ",), ("nonempty_active",)),
    Arrow(("SCQ",), ("MFCQ", "PLVCQ"), ("continuous", "nonempty_active")),
    Arrow(("PMFCQ",), ("MFCQ",), ("nonempty_active",)),
    Arrow(("MFCQ",), ("LFMCQ",), ("continuous",)),
    Arrow(("MFCQ", "PLVCQ"), ("COCQ",), ("continuous",)),
    Arrow(("COCQ",), ("KTCQ",), ("continuous",)),
    Arrow(("KTCQ", "PLVCQ"), ("ACQ",), ("nonempty_active",)),
    Arrow(("MFCQ", "PLVCQ"), ("ACQ",), ("continuous",)),
    Arrow(("LFMCQ",), ("ACQ",), ("nonempty_active",)),
    Arrow(("LFMCQ",), ("CCCQ",), ()),
    Arrow(("ACQ", "CCCQ"), ("LFMCQ",), ()),
    Arrow(("ACQ",), ("EADQ",), ("single_objective",)),
    Arrow(("ACQ",), ("WADQ",), ()),
    Arrow(("EADQ",), ("WADQ",), ()),
)


@dataclass(frozen=True)
class DiagramViolation:
    arrow: Arrow
    detail: str


def _side_met(p: MosipProblem, cp: CandidatePoint, side) -> bool:
    for s in side:
        if s == "continuous" and not p.flag("continuous"):
            return False
        if s == "nonempty_active" and cp.G_is_empty:
            return False
        if s == "single_objective" and p.num_objectives != 1:
            return False
    return True


def diagram_validate(p: MosipProblem, cp: CandidatePoint, reports) -> list:
    """Check every implication arrow whose side conditions the instance
    meets; arrows touching an Undecidable report are skipped (no verdict to
    propagate).  A non-empty result indicates a checker bug, not a property
    of the instance."""
    by = {r.qual: r for r in reports}
    violations = []
    for arrow in ARROWS:
        if not _side_met(p, cp, arrow.side):
            continue
        involved = arrow.antecedents + arrow.consequents
        if any(by[q].status == UNDECIDABLE for q in involved):
            continue
        if all(by[q].status == HOLDS for q in arrow.antecedents):
            bad = [q for q in arrow.consequents if by[q].status != HOLDS]
            if bad:
                violations.append(
                    DiagramViolation(arrow, f"{' and '.join(arrow.antecedents)} hold but {', '.join(bad)} do not")
                )
    return violations


# ---------------------------------------------------------------------------
# serialization


def report_to_json(r: QualReport) -> dict:
    return {
        "qual": r.qual,
        "status": r.status,
        "provenance": r.provenance,
        "witness": jsonify(r.witness),
        "notes": r.notes,
    }


def reports_to_json(reports) -> list:
    return [report_to_json(r) for r in reports]


def truth_table_text(reports) -> str:
    """Fixed-width summary table, one row per qualification."""
    header = f"{'QUAL':<7}{'STATUS':<13}{'PROVENANCE':<32}NOTES"
    lines = [header, "-" * len(header)]
    for r in reports:
        lines.append(f"{r.qual:<7}{r.status:<13}{r.provenance:<32}{r.notes}")
    return "\n".join(lines) + "\n"
