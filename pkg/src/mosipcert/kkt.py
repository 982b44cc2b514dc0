"""Weak, strong, and perturbed KKT certificates and the claims they license.

The three certificate searches share one exact decomposition engine: a target
vector w is written as sum_i alpha_i xi_i + sum_t beta_t zeta_t with
xi_i in the i-th objective subdifferential and zeta_t in the subdifferential
of the t-th active constraint.  Weak takes w = 0, strong additionally pushes
every alpha_i above a maximized margin, perturbed decomposes the scaled axis
points of a certified ball inside F*(x) + G*(x).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Optional, Sequence

from . import lp
from .cones import (
    FGCone,
    GenConvexSet,
    NotMember,
    membership,
    zero_interior,
)
from .errors import InternalInconsistencyError, ModelError, ParseError
from .funcs import subdiff, subdiff_set
from .problem import (
    EXACT,
    CandidatePoint,
    MosipProblem,
    g_data_provenance,
)
from .quals import DEFAULT_EPS_GRID, HOLDS, QualReport, jsonify
from .rationals import ONE, ZERO, Q, as_q

WEAK = "Weak"
STRONG = "Strong"
PERTURBED = "Perturbed"

WEAK_EFFICIENT = "WeakEfficient"
EFFICIENT = "Efficient"
ISOLATED_EFFICIENT = "IsolatedEfficient"

SUFFICIENT = "sufficient"
NECESSARY_GIVEN = "necessary-given"


# ---------------------------------------------------------------------------
# Certificate records


@dataclass(frozen=True)
class ObjectiveTerm:
    """alpha_i together with the selection xi_i = sum_j coeffs_j * vertices_j."""

    index: int
    alpha: Q
    xi: tuple
    coeffs: tuple
    vertices: tuple


@dataclass(frozen=True)
class ConstraintTerm:
    """beta_t and zeta_t = sum_j coeffs_j * vertices_j + sum_k ray_coeffs_k * rays_k.

    zeta is None only for a pure recession contribution (beta_t = 0 with
    nonzero ray weights); then `ray_coeffs` hold the raw conic weights and the
    term contributes sum_k ray_coeffs_k * rays_k directly.
    """

    index: int
    beta: Q
    zeta: Optional[tuple]
    coeffs: tuple
    vertices: tuple
    ray_coeffs: tuple = ()
    rays: tuple = ()

    def contribution(self) -> tuple:
        if self.zeta is not None:  # ray parts are already folded into zeta
            return tuple(self.beta * z for z in self.zeta)
        n = len(self.rays[0])
        return tuple(
            sum((w * r[k] for w, r in zip(self.ray_coeffs, self.rays)), ZERO)
            for k in range(n)
        )


@dataclass(frozen=True)
class KktCertificate:
    kind: str
    target: tuple
    objective_terms: tuple
    constraint_terms: tuple

    @property
    def alpha(self) -> tuple:
        return tuple(t.alpha for t in self.objective_terms)

    @property
    def beta(self) -> tuple:
        return tuple((t.index, t.beta) for t in self.constraint_terms)

    def residual(self) -> tuple:
        n = len(self.target)
        out = [-v for v in self.target]
        for term in self.objective_terms:
            for k in range(n):
                out[k] += term.alpha * term.xi[k]
        for term in self.constraint_terms:
            c = term.contribution()
            for k in range(n):
                out[k] += c[k]
        return tuple(out)


@dataclass(frozen=True)
class KktSeparator:
    """h with h'0 > sup over F* + G* of h (weak KKT refuted)."""

    direction: tuple
    gap: Q


# ---------------------------------------------------------------------------
# Shared decomposition engine


def _objective_vertex_tables(p: MosipProblem, x) -> list:
    tables = []
    for i, f in enumerate(p.objectives):
        poly = subdiff(f, x)
        if poly.is_empty:
            raise ModelError(
                f"objective {i} has an empty subdifferential at the candidate"
            )
        tables.append(poly.vertices)
    return tables


def _active_subdiff_tables(p: MosipProblem, cp: CandidatePoint) -> list:
    """(t, vertices, rays) per active constraint, skipping empty subdifferentials."""
    out = []
    for t in cp.T:
        ss = subdiff_set(p.constraint(t), cp.x)
        if ss.is_empty:
            continue
        out.append((t, ss.base.vertices, ss.recession.generators))
    return out


def _decomposition_rows(obj_tables, active_tables, target, num_vars):
    n = len(target)
    columns = []
    for verts in obj_tables:
        columns.extend(verts)
    for _, verts, rays in active_tables:
        columns.extend(verts)
        columns.extend(rays)
    rows = [
        ([v[k] for v in columns] + [ZERO] * (num_vars - len(columns)), lp.EQ, target[k])
        for k in range(n)
    ]
    simplex_row = [ZERO] * num_vars
    pos = 0
    for verts in obj_tables:
        for _ in verts:
            simplex_row[pos] = ONE
            pos += 1
    rows.append((simplex_row, lp.EQ, ONE))
    for j in range(num_vars):
        unit = [ZERO] * num_vars
        unit[j] = ONE
        rows.append((unit, lp.GE, ZERO))
    return rows


def _group_terms(values, obj_tables, active_tables, n):
    pos = 0
    oterms = []
    for i, verts in enumerate(obj_tables):
        mus = values[pos : pos + len(verts)]
        pos += len(verts)
        alpha = sum(mus, ZERO)
        if alpha > 0:
            coeffs = tuple(m / alpha for m in mus)
            xi = tuple(
                sum((c * v[k] for c, v in zip(coeffs, verts)), ZERO) for k in range(n)
            )
        else:
            # the selection is immaterial at weight zero; pin the first vertex
            coeffs = (ONE,) + (ZERO,) * (len(verts) - 1)
            xi = tuple(verts[0])
        oterms.append(ObjectiveTerm(i, alpha, xi, coeffs, tuple(verts)))
    cterms = []
    for t, verts, rays in active_tables:
        nus = values[pos : pos + len(verts)]
        pos += len(verts)
        sigmas = values[pos : pos + len(rays)]
        pos += len(rays)
        beta = sum(nus, ZERO)
        if beta == 0 and all(s == 0 for s in sigmas):
            continue
        if beta > 0:
            coeffs = tuple(m / beta for m in nus)
            ray_coeffs = tuple(s / beta for s in sigmas)
            zeta = tuple(
                sum((c * v[k] for c, v in zip(coeffs, verts)), ZERO)
                + sum((w * r[k] for w, r in zip(ray_coeffs, rays)), ZERO)
                for k in range(n)
            )
            cterms.append(
                ConstraintTerm(t, beta, zeta, coeffs, tuple(verts), ray_coeffs, tuple(rays))
            )
        else:
            cterms.append(
                ConstraintTerm(t, ZERO, None, (), tuple(verts), tuple(sigmas), tuple(rays))
            )
    return tuple(oterms), tuple(cterms)


def _decompose_target(p: MosipProblem, cp: CandidatePoint, target):
    """Exact multipliers writing `target` over the objective and active
    constraint subdifferentials; the caller guarantees target in F* + G*."""
    obj_tables = _objective_vertex_tables(p, cp.x)
    active_tables = _active_subdiff_tables(p, cp)
    num_vars = sum(len(v) for v in obj_tables) + sum(
        len(v) + len(r) for _, v, r in active_tables
    )
    rows = _decomposition_rows(obj_tables, active_tables, target, num_vars)
    res = lp.feasible_point(num_vars, rows)
    if isinstance(res, lp.Infeasible):
        raise InternalInconsistencyError(
            "membership certified the target but the grouped decomposition "
            "has no solution"
        )
    return _group_terms(list(res), obj_tables, active_tables, p.dimension)


# ---------------------------------------------------------------------------
# Weak KKT


def weak_kkt(p: MosipProblem, cp: CandidatePoint):
    """KktCertificate with target 0, or the separating functional."""
    if cp.F_star.is_empty:
        raise ModelError("no objectives: F*(x) is empty")
    zero = tuple(ZERO for _ in range(p.dimension))
    out = membership(zero, GenConvexSet(cp.F_star, cp.G_star))
    if isinstance(out, NotMember):
        return KktSeparator(direction=out.separator, gap=out.gap)
    oterms, cterms = _decompose_target(p, cp, zero)
    return KktCertificate(WEAK, zero, oterms, cterms)


# ---------------------------------------------------------------------------
# Strong KKT


@dataclass(frozen=True)
class StrongKktResult:
    certificate: Optional[KktCertificate]
    tau: Optional[Q]  # maximized lower margin on the alpha_i (None if weak fails)
    separator: Optional[tuple]
    ri_zero: Optional[bool]  # the separate geometric test 0 in ri(F* + G*)
    refusal: str = ""


def relative_interior_zero(s: GenConvexSet) -> bool:
    """0 in ri(base + recession), exactly.

    0 is relative-interior iff it belongs to the set and the support cone
    {d : sigma(d) <= 0} is a linear subspace, i.e. no support normal can be
    strictly decreased over it.
    """
    zero = tuple(ZERO for _ in range(s.dim))
    if isinstance(membership(zero, s), NotMember):
        return False
    normals = [tuple(v) for v in s.base.vertices]
    normals.extend(tuple(g) for g in s.recession.generators)
    n = s.dim
    cone_rows = [(list(a), lp.LE, ZERO) for a in normals]
    for j in range(n):
        unit = [ZERO] * n
        unit[j] = ONE
        cone_rows.append((list(unit), lp.LE, ONE))
        cone_rows.append(([-u for u in unit], lp.LE, ONE))
    for a in normals:
        res = lp.solve(lp.LinearProgram(n, [-ai for ai in a], list(cone_rows)))
        assert isinstance(res, lp.Optimal)
        if res.value > 0:
            return False
    return True


def strong_kkt(p: MosipProblem, cp: CandidatePoint) -> StrongKktResult:
    """Maximize the smallest objective weight subject to exact stationarity;
    a Strong certificate needs optimum > 0.  The relative-interior sufficient
    test is evaluated independently and reported alongside."""
    if cp.F_star.is_empty:
        raise ModelError("no objectives: F*(x) is empty")
    zero = tuple(ZERO for _ in range(p.dimension))
    gs = GenConvexSet(cp.F_star, cp.G_star)
    ri = relative_interior_zero(gs)
    out = membership(zero, gs)
    if isinstance(out, NotMember):
        return StrongKktResult(
            certificate=None,
            tau=None,
            separator=KktSeparator(direction=out.separator, gap=out.gap),
            ri_zero=ri,
            refusal="the weak KKT condition already fails",
        )
    obj_tables = _objective_vertex_tables(p, cp.x)
    active_tables = _active_subdiff_tables(p, cp)
    base_vars = sum(len(v) for v in obj_tables) + sum(
        len(v) + len(r) for _, v, r in active_tables
    )
    num_vars = base_vars + 1  # trailing tau
    rows = [
        (coeffs + [ZERO], rel, rhs)
        for coeffs, rel, rhs in _decomposition_rows(
            obj_tables, active_tables, zero, base_vars
        )
    ]
    pos = 0
    for verts in obj_tables:
        margin = [ZERO] * num_vars
        for _ in verts:
            margin[pos] = ONE
            pos += 1
        margin[-1] = -ONE
        rows.append((margin, lp.GE, ZERO))
    tau_cap = [ZERO] * num_vars
    tau_cap[-1] = ONE
    rows.append((tau_cap, lp.LE, ONE))
    objective = [ZERO] * base_vars + [ONE]
    res = lp.solve(lp.LinearProgram(num_vars, objective, rows))
    assert isinstance(res, lp.Optimal), "stationarity is feasible and tau is capped"
    tau = res.value
    if tau <= 0:
        return StrongKktResult(
            certificate=None,
            tau=tau,
            separator=None,
            ri_zero=ri,
            refusal="every exact multiplier vector drives some objective "
            "weight to zero",
        )
    oterms, cterms = _group_terms(
        list(res.primal[:base_vars]), obj_tables, active_tables, p.dimension
    )
    return StrongKktResult(
        certificate=KktCertificate(STRONG, zero, oterms, cterms),
        tau=tau,
        separator=None,
        ri_zero=ri,
    )


# ---------------------------------------------------------------------------
# Perturbed KKT


@dataclass(frozen=True)
class PerturbedKktReport:
    holds: bool
    nu_lb: Q
    exact: bool  # is nu_lb the exact interior radius
    axis_certificates: tuple  # decompositions of the 2n points nu_lb * (+-e_j)
    witness_direction: Optional[tuple] = None  # support direction <= 0 when it fails
    note: str = ""


def perturbed_kkt(p: MosipProblem, cp: CandidatePoint) -> PerturbedKktReport:
    """0 in int(F*(x) + G*(x)) with a certified ball radius; each scaled axis
    point gets its own exact multiplier decomposition."""
    if cp.F_star.is_empty:
        raise ModelError("no objectives: F*(x) is empty")
    zi = zero_interior(GenConvexSet(cp.F_star, cp.G_star))
    if not zi.inside:
        return PerturbedKktReport(
            holds=False,
            nu_lb=ZERO,
            exact=zi.exact,
            axis_certificates=(),
            witness_direction=zi.witness_direction,
            note=zi.note,
        )
    nu = zi.radius_lower_bound
    axes = []
    for j in range(p.dimension):
        for sign in (ONE, -ONE):
            target = [ZERO] * p.dimension
            target[j] = sign * nu
            oterms, cterms = _decompose_target(p, cp, tuple(target))
            axes.append(KktCertificate(PERTURBED, tuple(target), oterms, cterms))
    return PerturbedKktReport(
        holds=True,
        nu_lb=nu,
        exact=zi.exact,
        axis_certificates=tuple(axes),
        note=zi.note,
    )


def isolation_inclusion_report(
    p: MosipProblem, cp: CandidatePoint, nu, eps_grid=DEFAULT_EPS_GRID
) -> Optional[dict]:
    """Finite-grid report on nu*B being covered by F* plus the cone of
    eps-active constraint gradients.

    Report only: the eps -> 0 limit is not finitely computable.  Requires the
    differentiability flag and singleton constraint subdifferentials at the
    candidate; suppressed (None) otherwise.
    """
    if not p.flag("differentiable"):
        return None
    nu = as_q(nu)
    rows = []
    for eps in eps_grid:
        grads = []
        for t in cp.active(eps):
            ss = subdiff_set(p.constraint(t), cp.x)
            if ss.is_empty or len(ss.base.vertices) != 1 or ss.recession.generators:
                return None
            grads.append(ss.base.vertices[0])
        zi = zero_interior(GenConvexSet(cp.F_star, FGCone(p.dimension, grads)))
        rows.append(
            {
                "eps": eps,
                "included": bool(zi.inside and zi.radius_lower_bound >= nu),
                "radius_lower_bound": zi.radius_lower_bound,
                "exact": zi.exact,
            }
        )
    return {
        "nu": nu,
        "rows": rows,
        "note": "finite eps grid; the intersection over all eps > 0 is reported, "
        "not decided",
    }


# ---------------------------------------------------------------------------
# Certificate verification (used by tests and the --verify CLI path)


def certificate_issues(p: MosipProblem, cp: CandidatePoint, cert: KktCertificate) -> list:
    """Every exactness defect of `cert` against freshly recomputed data."""
    issues = []
    n = p.dimension
    if len(cert.target) != n:
        return [f"target has {len(cert.target)} coordinates, problem has {n}"]
    if cert.kind in (WEAK, STRONG) and any(c != 0 for c in cert.target):
        issues.append(f"{cert.kind} certificate must decompose the origin")
    if len(cert.objective_terms) != p.num_objectives:
        issues.append(
            f"{len(cert.objective_terms)} objective terms for "
            f"{p.num_objectives} objectives"
        )
        return issues
    total = sum((t.alpha for t in cert.objective_terms), ZERO)
    if total != 1:
        issues.append(f"objective weights sum to {total}, not 1")
    for term in cert.objective_terms:
        if term.alpha < 0:
            issues.append(f"objective {term.index}: negative weight {term.alpha}")
        if cert.kind == STRONG and term.alpha <= 0:
            issues.append(f"objective {term.index}: strong certificate needs alpha > 0")
        ref = subdiff(p.objectives[term.index], cp.x).vertices
        if tuple(term.vertices) != tuple(ref):
            issues.append(f"objective {term.index}: vertex table drifted")
            continue
        if len(term.coeffs) != len(ref) or any(c < 0 for c in term.coeffs):
            issues.append(f"objective {term.index}: bad convex coefficients")
            continue
        if sum(term.coeffs, ZERO) != 1:
            issues.append(f"objective {term.index}: coefficients do not sum to 1")
        rebuilt = tuple(
            sum((c * v[k] for c, v in zip(term.coeffs, ref)), ZERO) for k in range(n)
        )
        if rebuilt != tuple(term.xi):
            issues.append(f"objective {term.index}: xi does not match its coefficients")
    active = set(cp.T)
    for term in cert.constraint_terms:
        if term.index not in active:
            issues.append(f"constraint {term.index}: not active at the candidate")
            continue
        ss = subdiff_set(p.constraint(term.index), cp.x)
        if tuple(term.vertices) != tuple(ss.base.vertices) or tuple(term.rays) != tuple(
            ss.recession.generators
        ):
            issues.append(f"constraint {term.index}: subdifferential table drifted")
            continue
        if term.beta < 0:
            issues.append(f"constraint {term.index}: negative multiplier {term.beta}")
        if term.zeta is None:
            if term.beta != 0 or not term.ray_coeffs:
                issues.append(f"constraint {term.index}: malformed recession-only term")
            continue
        if any(c < 0 for c in term.coeffs) or any(w < 0 for w in term.ray_coeffs):
            issues.append(f"constraint {term.index}: negative coefficients")
            continue
        if sum(term.coeffs, ZERO) != 1:
            issues.append(f"constraint {term.index}: coefficients do not sum to 1")
        rebuilt = tuple(
            sum((c * v[k] for c, v in zip(term.coeffs, term.vertices)), ZERO)
            + sum((w * r[k] for w, r in zip(term.ray_coeffs, term.rays)), ZERO)
            for k in range(n)
        )
        if rebuilt != tuple(term.zeta):
            issues.append(f"constraint {term.index}: zeta does not match its coefficients")
    if any(r != 0 for r in cert.residual()):
        issues.append("stationarity residual is nonzero")
    return issues


# ---------------------------------------------------------------------------
# Serialization ([num, den] rationals throughout)


def _q_in(obj) -> Q:
    if not (isinstance(obj, (list, tuple)) and len(obj) == 2):
        raise ParseError(f"expected a [num, den] pair, got {obj!r}")
    return Q(int(obj[0]), int(obj[1]))


def _vec_in(obj) -> tuple:
    return tuple(_q_in(c) for c in obj)


def certificate_to_json(cert: KktCertificate) -> dict:
    return jsonify(
        {
            "kind": cert.kind,
            "target": list(cert.target),
            "objectives": [
                {
                    "index": t.index,
                    "alpha": t.alpha,
                    "xi": list(t.xi),
                    "coeffs": list(t.coeffs),
                    "vertices": [list(v) for v in t.vertices],
                }
                for t in cert.objective_terms
            ],
            "constraints": [
                {
                    "index": t.index,
                    "beta": t.beta,
                    "zeta": None if t.zeta is None else list(t.zeta),
                    "coeffs": list(t.coeffs),
                    "vertices": [list(v) for v in t.vertices],
                    "ray_coeffs": list(t.ray_coeffs),
                    "rays": [list(r) for r in t.rays],
                }
                for t in cert.constraint_terms
            ],
        }
    )


def certificate_from_json(doc: dict) -> KktCertificate:
    try:
        kind = doc["kind"]
        if kind not in (WEAK, STRONG, PERTURBED):
            raise ParseError(f"unknown certificate kind {kind!r}")
        oterms = tuple(
            ObjectiveTerm(
                index=int(t["index"]),
                alpha=_q_in(t["alpha"]),
                xi=_vec_in(t["xi"]),
                coeffs=_vec_in(t["coeffs"]),
                vertices=tuple(_vec_in(v) for v in t["vertices"]),
            )
            for t in doc["objectives"]
        )
        cterms = tuple(
            ConstraintTerm(
                index=int(t["index"]),
                beta=_q_in(t["beta"]),
                zeta=None if t["zeta"] is None else _vec_in(t["zeta"]),
                coeffs=_vec_in(t["coeffs"]),
                vertices=tuple(_vec_in(v) for v in t["vertices"]),
                ray_coeffs=_vec_in(t["ray_coeffs"]),
                rays=tuple(_vec_in(r) for r in t["rays"]),
            )
            for t in doc["constraints"]
        )
        return KktCertificate(kind, _vec_in(doc["target"]), oterms, cterms)
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"malformed certificate document: {exc}") from exc


def perturbed_to_json(report: PerturbedKktReport) -> dict:
    return jsonify(
        {
            "holds": report.holds,
            "nu_lb": report.nu_lb,
            "exact": report.exact,
            "axis_certificates": [
                certificate_to_json(c) for c in report.axis_certificates
            ],
            "witness_direction": None
            if report.witness_direction is None
            else list(report.witness_direction),
            "note": report.note,
        }
    )


def perturbed_from_json(doc: dict) -> PerturbedKktReport:
    try:
        return PerturbedKktReport(
            holds=bool(doc["holds"]),
            nu_lb=_q_in(doc["nu_lb"]),
            exact=bool(doc["exact"]),
            axis_certificates=tuple(
                certificate_from_json(c) for c in doc["axis_certificates"]
            ),
            witness_direction=None
            if doc["witness_direction"] is None
            else _vec_in(doc["witness_direction"]),
            note=doc.get("note", ""),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"malformed perturbed report: {exc}") from exc


# ---------------------------------------------------------------------------
# Efficiency claims


@dataclass(frozen=True)
class EfficiencyClaim:
    level: str  # WeakEfficient | Efficient | IsolatedEfficient
    asserted: bool  # False: the claim is the negation of `level`
    direction: str  # sufficient | necessary-given
    theorem: str
    certificate: str  # key of the certificate bundle entry the claim rests on
    relies_on: tuple  # qualification ids backing a necessary-direction claim
    provenance: str
    note: str = ""


def _qual_holds_exact(quals: Mapping[str, QualReport], qual: str) -> bool:
    report = quals.get(qual)
    return report is not None and report.status == HOLDS and report.provenance == EXACT


def assemble_claims(
    p: MosipProblem,
    cp: CandidatePoint,
    certs: Mapping,
    quals: Mapping[str, QualReport],
    oracle_report=None,
) -> tuple:
    """Only theorem-licensed claims, in a fixed order.

    Sufficient directions fire on a certificate alone.  Necessary directions
    (the negations) additionally need their qualifications to hold with exact
    provenance and the constraint data itself to be exact: a truncated or
    approximated family can hide active constraints, so a failed search over
    it refutes nothing.
    """
    tag = g_data_provenance(p, cp.x)
    claims = []
    weak = certs.get("weak")
    if isinstance(weak, KktCertificate):
        claims.append(
            EfficiencyClaim(
                WEAK_EFFICIENT,
                True,
                SUFFICIENT,
                "weak KKT sufficient condition",
                "weak",
                (),
                tag,
            )
        )
    gap_weak = certs.get("gap_weak")
    if getattr(gap_weak, "lam", None) is not None:
        claims.append(
            EfficiencyClaim(
                WEAK_EFFICIENT,
                True,
                SUFFICIENT,
                "characterization of weak efficiency via the gap function "
                "(sufficiency part)",
                "gap_weak",
                (),
                tag,
            )
        )
    strong = certs.get("strong")
    strong_cert = strong.certificate if isinstance(strong, StrongKktResult) else None
    if strong_cert is not None:
        claims.append(
            EfficiencyClaim(
                EFFICIENT,
                True,
                SUFFICIENT,
                "strong KKT sufficient condition",
                "strong",
                (),
                tag,
            )
        )
    gap_strong = certs.get("gap_strong")
    lam = getattr(gap_strong, "lam", None)
    if lam is not None and all(l > 0 for l in lam):
        claims.append(
            EfficiencyClaim(
                EFFICIENT,
                True,
                SUFFICIENT,
                "characterization of efficiency via the gap function "
                "(sufficiency part)",
                "gap_strong",
                (),
                tag,
            )
        )
    perturbed = certs.get("perturbed")
    if isinstance(perturbed, PerturbedKktReport) and perturbed.holds:
        claims.append(
            EfficiencyClaim(
                ISOLATED_EFFICIENT,
                True,
                SUFFICIENT,
                "perturbed KKT sufficient condition",
                "perturbed",
                (),
                tag,
            )
        )
    if tag == EXACT:
        if isinstance(weak, KktSeparator) and _qual_holds_exact(quals, "LFMCQ"):
            claims.append(
                EfficiencyClaim(
                    WEAK_EFFICIENT,
                    False,
                    NECESSARY_GIVEN,
                    "characterization of weak efficiency via the weak KKT "
                    "condition under LFMCQ",
                    "weak",
                    ("LFMCQ",),
                    tag,
                )
            )
        if (
            isinstance(strong, StrongKktResult)
            and strong.certificate is None
            and _qual_holds_exact(quals, "EADQ")
            and _qual_holds_exact(quals, "MOQ")
        ):
            claims.append(
                EfficiencyClaim(
                    EFFICIENT,
                    False,
                    NECESSARY_GIVEN,
                    "strong KKT necessary condition under EADQ and MOQ",
                    "strong",
                    ("EADQ", "MOQ"),
                    tag,
                )
            )
        if (
            isinstance(perturbed, PerturbedKktReport)
            and not perturbed.holds
            and p.flag("continuous")
            and p.flag("differentiable")
            and _qual_holds_exact(quals, "MFCQ")
        ):
            claims.append(
                EfficiencyClaim(
                    ISOLATED_EFFICIENT,
                    False,
                    NECESSARY_GIVEN,
                    "perturbed KKT necessary condition under MFCQ for "
                    "continuously differentiable constraints",
                    "perturbed",
                    ("MFCQ",),
                    tag,
                )
            )
    if oracle_report is not None:
        _check_against_oracle(claims, oracle_report)
    return tuple(claims)


def _check_against_oracle(claims: Sequence[EfficiencyClaim], oracle_report) -> None:
    weak_refuted = getattr(oracle_report, "weak_refuted", None)
    eff_refuted = getattr(oracle_report, "eff_refuted", None)
    for claim in claims:
        if not claim.asserted:
            continue
        if weak_refuted is not None:
            raise InternalInconsistencyError(
                f"claim {claim.level} contradicts a strict dominator found by "
                "the grid oracle"
            )
        if claim.level in (EFFICIENT, ISOLATED_EFFICIENT) and eff_refuted is not None:
            raise InternalInconsistencyError(
                f"claim {claim.level} contradicts a dominator found by the "
                "grid oracle"
            )


def claims_to_json(claims: Sequence[EfficiencyClaim]) -> list:
    return [
        {
            "level": c.level,
            "asserted": c.asserted,
            "direction": c.direction,
            "theorem": c.theorem,
            "certificate": c.certificate,
            "relies_on": list(c.relies_on),
            "provenance": c.provenance,
            "note": c.note,
        }
        for c in claims
    ]
