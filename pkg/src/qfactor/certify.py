"""Top-level certifiers and the constructive separating-hypersurface pipeline.

Three variants are supported: a hypersurface in P^4 (target degree 2n-5,
defect criterion is an equivalence), a complete intersection of two
hypersurfaces in P^5 (target 2n+k-6, sufficiency only), and a double cover
of a hypersurface in P^4 branched in a surface (target 3r+n-5, equivalence),
plus a double-solid mode for branch surfaces in P^3 (target 3r-4).
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field as dc_field
from math import comb

from . import conditions, planar
from .conditions import DefectReport, defect, defect_mod_primes, restricted_conditions
from .errors import (
    CenterHitsPoint,
    DegenerateProjection,
    GateFailed,
    HypothesisViolated,
    NodesMissing,
    NotInjectiveOnSet,
    PositiveDimensionalBaseLocus,
    SeparationFailed,
    TooLarge,
    UnverifiedNodes,
)
from .planar import StarParams, cluster_partition, separating_curve
from .polyform import HomogeneousForm, monomial_basis, substitute_linear
from .pointgeom import (
    PointSet,
    ProjectionMap,
    ProjectivePoint,
    find_nodes_enumerate,
    project,
    verify_node,
    _field_rank,
)
from .scalar import FieldSpec

DEFAULT_SEED = 0xB4

QFACTORIAL = "QFactorial"
NOT_QFACTORIAL = "NotQFactorial"
INCONCLUSIVE = "Inconclusive"

# exact-rank cutoff: beyond this many matrix entries over Q, switch to the
# multi-prime backend
_EXACT_ENTRY_LIMIT = 100_000


@dataclass
class ThreefoldSpec:
    variant: str  # "hypersurface" | "complete_intersection" | "double_cover"
    f: HomogeneousForm
    g: HomogeneousForm | None = None
    n: int = 0
    k: int = 0
    r: int = 0
    nodes: PointSet | None = None
    smooth_attested: bool = False
    double_solid: bool = False  # branch surface lives in P^3

    @classmethod
    def hypersurface(cls, f, nodes=None):
        return cls("hypersurface", f, n=f.degree, nodes=nodes)

    @classmethod
    def complete_intersection(cls, f, g, nodes=None, smooth_attested=False):
        if f.degree < g.degree:
            f, g = g, f
        return cls("complete_intersection", f, g, n=f.degree, k=g.degree,
                   nodes=nodes, smooth_attested=smooth_attested)

    @classmethod
    def double_cover(cls, f, branch, nodes=None, smooth_attested=False,
                     double_solid=False):
        if branch.degree % 2:
            raise ValueError("branch surface degree must be even")
        return cls("double_cover", f, branch, n=f.degree if f is not None else 1,
                   r=branch.degree // 2, nodes=nodes,
                   smooth_attested=smooth_attested, double_solid=double_solid)

    def target_degree(self) -> int:
        if self.variant == "hypersurface":
            return 2 * self.n - 5
        if self.variant == "complete_intersection":
            return 2 * self.n + self.k - 6
        if self.double_solid:
            return 3 * self.r - 4
        return 3 * self.r + self.n - 5


@dataclass
class Certificate:
    verdict: str
    route: str
    target_degree: int
    evidence: DefectReport | None = None
    bundle: "SeparatorBundle | None" = None
    hypothesis_log: list = dc_field(default_factory=list)

    def exit_code(self) -> int:
        return {QFACTORIAL: 0, NOT_QFACTORIAL: 10, INCONCLUSIVE: 20}[self.verdict]

    def to_json(self) -> dict:
        out = {
            "verdict": self.verdict,
            "route": self.route,
            "target_degree": self.target_degree,
            "hypothesis_log": self.hypothesis_log,
        }
        if self.evidence is not None:
            out["evidence"] = self.evidence.to_json()
        if self.bundle is not None:
            out["bundle"] = self.bundle.to_json()
        return out


# -- separator factors ----------------------------------------------------------------


class DirectFactor:
    """A hypersurface given by an explicit form."""

    def __init__(self, form: HomogeneousForm, kind: str):
        self.form = form
        self.kind = kind

    @property
    def degree(self):
        return self.form.degree

    def evaluate(self, coords):
        return self.form.evaluate(coords)

    def describe(self):
        return {"kind": self.kind, "degree": self.degree}


class ConeFactor:
    """The cone over a plane curve, evaluated by composing with the
    projection instead of expanding the pullback."""

    def __init__(self, curve: HomogeneousForm, psi: ProjectionMap, kind: str):
        self.curve = curve
        self.psi = psi
        self.kind = kind

    @property
    def degree(self):
        return self.curve.degree

    def evaluate(self, coords):
        img = [l.evaluate(coords) for l in self.psi.target_forms]
        return self.curve.evaluate(img)

    def expand(self) -> HomogeneousForm:
        return substitute_linear(self.curve, self.psi.target_forms)

    def describe(self):
        return {"kind": self.kind, "degree": self.degree, "cone": True}


@dataclass
class SeparatorEntry:
    node_index: int
    factors: list
    target_degree: int
    gates: list
    verified: bool = False

    def total_degree(self):
        return sum(f.degree for f in self.factors)

    def evaluate(self, coords, field):
        v = field.one
        for f in self.factors:
            v = v * f.evaluate(coords)
        return v

    def verify(self, S: PointSet, P: ProjectivePoint) -> bool:
        """Factorwise check: some factor vanishes at every other node, no
        factor vanishes at P, degrees sum to the target."""
        field = S.field
        if self.total_degree() != self.target_degree:
            return False
        for f in self.factors:
            if field.is_zero(f.evaluate(P.coords)):
                return False
        for Q in S:
            if Q == P:
                continue
            if not any(field.is_zero(f.evaluate(Q.coords)) for f in self.factors):
                return False
        self.verified = True
        return True

    def to_json(self):
        return {
            "node": self.node_index,
            "target_degree": self.target_degree,
            "factors": [f.describe() for f in self.factors],
            "gates": self.gates,
            "verified": self.verified,
        }


@dataclass
class SeparatorBundle:
    entries: list

    def to_json(self):
        return {"per_node": [e.to_json() for e in self.entries]}


# -- shared helpers ---------------------------------------------------------------------


def _require_nodes(spec: ThreefoldSpec) -> PointSet:
    if spec.nodes is None or len(spec.nodes) == 0:
        raise NodesMissing("the spec carries no singular points")
    return spec.nodes


def _verify_all_nodes(spec: ThreefoldSpec, trust: bool):
    if trust:
        return
    if spec.variant == "hypersurface":
        forms = [spec.f]
    elif spec.variant == "complete_intersection":
        forms = [spec.f, spec.g]
    else:
        forms = [spec.g]  # nodes live on the branch surface
    for P in spec.nodes:
        rep = verify_node(P, forms)
        if not rep.ordinary:
            raise UnverifiedNodes(f"{P} is not an ordinary double point")


def _smart_defect(S: PointSet, d: int) -> DefectReport:
    if S.field.tag in ("rational", "quadratic"):
        entries = len(S) * comb(S.ambient + d, S.ambient)
        if entries > _EXACT_ENTRY_LIMIT:
            return defect_mod_primes(S, d)
    return defect(S, d)


def _quadric_rank(g: HomogeneousForm) -> int:
    field = g.field
    nv = g.num_vars
    half = field.inv(field.coerce(2))

    def coef(i, j):
        exp = [0] * nv
        exp[i] += 1
        exp[j] += 1
        c = g.terms.get(tuple(exp), field.zero)
        return c if i == j else c * half

    m = [[coef(i, j) for j in range(nv)] for i in range(nv)]
    return _field_rank(m, field)


def _smoothness_gate(form: HomogeneousForm, attested: bool, log: list, name: str):
    if form.degree == 2:
        rank = _quadric_rank(form)
        log.append({"gate": f"{name} smooth", "method": "quadric rank",
                    "rank": rank, "full": form.num_vars, "pass": rank == form.num_vars})
        if rank < form.num_vars:
            raise HypothesisViolated(
                f"{name} not smooth", f"quadric of rank {rank} < {form.num_vars}"
            )
        return
    if form.field.tag == "prime" and form.num_vars <= 5:
        try:
            sing = find_nodes_enumerate([form] + form.partials(), form.num_vars - 1)
            ok = len(sing) == 0
            log.append({"gate": f"{name} smooth", "method": f"enumeration mod {form.field.p}",
                        "singular_points": len(sing), "pass": ok})
            if not ok:
                raise HypothesisViolated(f"{name} not smooth",
                                         f"{len(sing)} singular points mod {form.field.p}")
            return
        except TooLarge:
            pass
    log.append({"gate": f"{name} smooth", "method": "attestation",
                "attested": attested, "pass": attested})
    if not attested:
        raise HypothesisViolated(f"{name} smoothness", "not attested and not checkable")


# -- certifiers ---------------------------------------------------------------------------


def certify_hypersurface(spec: ThreefoldSpec, route: str = "auto",
                         trust_nodes: bool = False,
                         base_locus_system: list | None = None,
                         budget_enum: int = 2_000_000) -> Certificate:
    S = _require_nodes(spec)
    _verify_all_nodes(spec, trust_nodes)
    n = spec.n
    d = spec.target_degree()
    log = []

    if route in ("auto", "bound"):
        bound = 2 * n - 4
        ok = len(S) <= bound
        log.append({"gate": "|Sing| <= 2n-4", "size": len(S), "bound": bound, "pass": ok})
        if ok:
            return Certificate(QFACTORIAL, "BoundOnly", d, hypothesis_log=log)
        if route == "bound":
            return Certificate(INCONCLUSIVE, "BoundOnly", d, hypothesis_log=log)

    if base_locus_system is not None:
        # zero-dimensional base locus of a low-degree system through the nodes
        k = base_locus_system[0].degree
        ok_deg = 2 * k < n
        log.append({"gate": "system degree k < n/2", "k": k, "n": n, "pass": ok_deg})
        field = S.field
        through = all(
            field.is_zero(h.evaluate(P.coords)) for h in base_locus_system for P in S
        )
        log.append({"gate": "system vanishes on Sing", "pass": through})
        if ok_deg and through and field.tag == "prime":
            base = find_nodes_enumerate(base_locus_system, S.ambient, budget_enum)
            bezout = k ** (S.ambient)
            if len(base) > bezout:
                raise PositiveDimensionalBaseLocus(
                    f"{len(base)} base points exceed the Bezout bound {bezout}"
                )
            log.append({"gate": "base locus zero-dimensional (sampled mod p)",
                        "points": len(base), "bezout": bezout, "pass": True})
            return Certificate(QFACTORIAL, "BaseLocusRoute", d, hypothesis_log=log)

    rep = _smart_defect(S, d)
    verdict = QFACTORIAL if rep.independent else NOT_QFACTORIAL
    return Certificate(verdict, "DirectRank", d, evidence=rep, hypothesis_log=log)


def certify_complete_intersection(spec: ThreefoldSpec, route: str = "auto",
                                  trust_nodes: bool = False,
                                  seed: int = DEFAULT_SEED,
                                  budget_subsets: int = 200_000) -> Certificate:
    n, k = spec.n, spec.k
    if n < k:
        raise HypothesisViolated("n >= k", f"n = {n} < k = {k}")
    d = spec.target_degree()
    log = []
    _smoothness_gate(spec.g, spec.smooth_attested, log, "G")
    S = _require_nodes(spec)
    _verify_all_nodes(spec, trust_nodes)

    shortcut = 2 * n + k - 5
    main_bound = (n + k - 2) * (n - 1) / 5
    log.append({"gate": "|Sing| <= 2n+k-5", "size": len(S), "bound": shortcut,
                "pass": len(S) <= shortcut})
    log.append({"gate": "|Sing| <= (n+k-2)(n-1)/5", "size": len(S),
                "bound": main_bound, "pass": len(S) <= main_bound})
    if route in ("auto", "bound"):
        if len(S) <= shortcut or len(S) <= main_bound:
            return Certificate(QFACTORIAL, "BoundOnly", d, hypothesis_log=log)
        if route == "bound":
            return Certificate(INCONCLUSIVE, "BoundOnly", d, hypothesis_log=log)

    if route == "constructive":
        try:
            bundle = _separator_bundle(S, n + k - 2, 5, d, seed, budget_subsets)
            return Certificate(QFACTORIAL, "Constructive", d, bundle=bundle,
                               hypothesis_log=log)
        except (GateFailed, SeparationFailed) as e:
            log.append({"gate": "constructive pipeline", "pass": False,
                        "detail": str(e)})
            return Certificate(INCONCLUSIVE, "Constructive", d, hypothesis_log=log)

    if S.field.tag in ("rational", "quadratic") or S.field.tag == "prime":
        rep = restricted_conditions(S, spec.g, d) if _restriction_cheap(S, d) \
            else _smart_defect(S, d)
    else:
        rep = _smart_defect(S, d)
    if rep.independent:
        return Certificate(QFACTORIAL, "DirectRank", d, evidence=rep, hypothesis_log=log)
    # the criterion is stated as sufficiency only for this variant: a
    # positive defect is reported, never flipped to NotQFactorial
    log.append({"gate": "defect criterion", "defect": rep.defect,
                "note": "sufficiency only for complete intersections"})
    return Certificate(INCONCLUSIVE, "DirectRank", d, evidence=rep, hypothesis_log=log)


def _restriction_cheap(S: PointSet, d: int) -> bool:
    if S.field.tag == "prime":
        return True
    return len(S) * comb(S.ambient + d, S.ambient) <= _EXACT_ENTRY_LIMIT


def certify_double_cover(spec: ThreefoldSpec, route: str = "auto",
                         trust_nodes: bool = False,
                         seed: int = DEFAULT_SEED,
                         budget_subsets: int = 200_000) -> Certificate:
    r = spec.r
    d = spec.target_degree()
    log = []
    S = _require_nodes(spec)

    if spec.double_solid:
        # branch surface in P^3; outside the n >= 2 hypotheses, so only the
        # defect criterion (an equivalence) is applied
        log.append({"gate": "mode", "double_solid": True,
                    "note": "outside the n >= 2 theorem; defect criterion only"})
        _verify_all_nodes(spec, trust_nodes)
        rep = _smart_defect(S, d)
        verdict = QFACTORIAL if rep.independent else NOT_QFACTORIAL
        return Certificate(verdict, "DirectRank", d, evidence=rep, hypothesis_log=log)

    n = spec.n
    if not (2 * r >= n >= 2):
        raise HypothesisViolated("2r >= n >= 2", f"r = {r}, n = {n}")
    _smoothness_gate(spec.f, spec.smooth_attested, log, "F")
    _verify_all_nodes(spec, trust_nodes)

    shortcut = 3 * r + n - 4
    main_bound = (2 * r + n - 2) * r / 4
    log.append({"gate": "|Sing| <= 3r+n-4", "size": len(S), "bound": shortcut,
                "pass": len(S) <= shortcut})
    log.append({"gate": "|Sing| <= (2r+n-2)r/4", "size": len(S),
                "bound": main_bound, "pass": len(S) <= main_bound})
    if route in ("auto", "bound"):
        if len(S) <= shortcut or len(S) <= main_bound:
            return Certificate(QFACTORIAL, "BoundOnly", d, hypothesis_log=log)
        if route == "bound":
            return Certificate(INCONCLUSIVE, "BoundOnly", d, hypothesis_log=log)

    if route == "constructive":
        try:
            bundle = _separator_bundle(S, 2 * r + n - 2, 4, d, seed, budget_subsets)
            return Certificate(QFACTORIAL, "Constructive", d, bundle=bundle,
                               hypothesis_log=log)
        except (GateFailed, SeparationFailed) as e:
            log.append({"gate": "constructive pipeline", "pass": False,
                        "detail": str(e)})
            return Certificate(INCONCLUSIVE, "Constructive", d, hypothesis_log=log)

    rep = restricted_conditions(S, spec.f, d) if _restriction_cheap(S, d) \
        else _smart_defect(S, d)
    verdict = QFACTORIAL if rep.independent else NOT_QFACTORIAL
    return Certificate(verdict, "DirectRank", d, evidence=rep, hypothesis_log=log)


# -- non-vanishing oracle ------------------------------------------------------------------


def nonvanishing_check(system: list, n: int, k: int,
                       budget_enum: int = 2_000_000) -> dict:
    """Base locus of a degree-k linear system on P^n, then the independence
    of its points at degree n(k-1).  A failure of independence would
    contradict the backing lemma and is flagged as such."""
    if any(h.degree != k or h.num_vars != n + 1 for h in system):
        raise ValueError("system must consist of degree-k forms on P^n")
    base = find_nodes_enumerate(system, n, budget_enum)
    if len(base) > k**n:
        raise PositiveDimensionalBaseLocus(
            f"{len(base)} base points exceed the Bezout bound {k**n}"
        )
    d = n * (k - 1)
    rep = defect(base, d)
    return {
        "base_points": len(base),
        "degree": d,
        "rank": rep.rank,
        "independent": rep.independent,
        "theorem_violation": not rep.independent,
        "report": rep,
    }


# -- constructive separator pipeline --------------------------------------------------------


def _spans_plane(S: PointSet) -> bool:
    rows = [list(P.coords) for P in S]
    return _field_rank(rows, S.field) <= 3


def _draw_projection(S: PointSet, rng, projection=None):
    if projection is not None:
        return projection, project(projection, S)
    last = None
    for _ in range(32):
        psi = ProjectionMap.random(S.ambient + 1, S.field, rng)
        try:
            return psi, project(psi, S)
        except (CenterHitsPoint, NotInjectiveOnSet) as e:
            last = e
    raise DegenerateProjection(f"no usable projection center in 32 draws: {last}")


def _padding(entry_factors, D, P, field, rng, num_vars):
    total = sum(f.degree for f in entry_factors)
    while total < D:
        for _ in range(64):
            h = HomogeneousForm.linear(
                [field.random(rng) for _ in range(num_vars)], field
            )
            if not h.is_zero() and not field.is_zero(h.evaluate(P.coords)):
                entry_factors.append(DirectFactor(h, "padding hyperplane"))
                total += 1
                break
        else:
            raise SeparationFailed("could not draw a padding hyperplane missing P")
    if total != D:
        raise GateFailed("degree bookkeeping", f"factors sum to {total} != {D}")


def constructive_separator(S: PointSet, P: ProjectivePoint, m: int, s: int, D: int,
                           seed: int = DEFAULT_SEED, budget_subsets: int = 200_000,
                           projection: ProjectionMap | None = None,
                           node_index: int | None = None) -> SeparatorEntry:
    """Build a degree-D hypersurface through S minus P that misses P, as a
    product of cluster factors (degree s*(j-1) each), a cone over a plane
    curve on the residual, and padding hyperplanes.

    m is the star-property multiplier, s the cluster separator scale (5 for
    complete intersections, 4 for double covers).  The factors are kept
    unexpanded and verified by evaluation at every point of S.
    """
    field = S.field
    rng = random.Random(seed)
    idx = node_index if node_index is not None else S.index_of(P)
    gates = []

    # (0) coplanar shortcut: the projection restricts to an isomorphism of
    # the spanned plane, so a single separating curve of degree D suffices
    if _spans_plane(S):
        psi, S_proj = _draw_projection(S, rng, projection)
        curve = separating_curve(S_proj, psi.apply(P), D, budget_subsets)
        entry = SeparatorEntry(idx, [ConeFactor(curve, psi, "coplanar separator")], D,
                               gates=[{"gate": "coplanar shortcut", "pass": True}])
        if not entry.verify(S, P):
            raise SeparationFailed("coplanar cone failed point verification")
        return entry

    psi, S_proj = _draw_projection(S, rng, projection)
    part = cluster_partition(S_proj, StarParams(m=m), preimage=S, budget=budget_subsets)

    if any(c.degree == 1 for c in part.clusters):
        # a line cluster (> m collinear projections) contradicts the star
        # bound that the calling theorem guarantees: refuse, do not build
        raise GateFailed("r >= 2", "more than m projected points on a line")

    factors = []
    spent = 0
    for c in part.clusters:
        fac_deg = s * (c.degree - 1)
        spent += fac_deg
        if any(Q == P for Q in c.preimage):
            sep = conditions.separating_form(c.preimage, P, fac_deg)
            if sep is None:
                raise SeparationFailed(
                    f"cluster of {len(c.preimage)} points does not separate "
                    f"{P} at degree {fac_deg}"
                )
            factors.append(DirectFactor(sep, f"cluster separator (j={c.degree})"))
        else:
            # the cone over the cluster curve contains the cluster and, since
            # P's projection is off the curve, misses P; pad to degree s(j-1)
            cone = ConeFactor(c.curve, psi, f"cluster cone (j={c.degree})")
            factors.append(cone)
            sub = [cone]
            _padding(sub, fac_deg, P, field, rng, S.ambient + 1)
            factors.extend(sub[1:])

    d = D - spent
    min_d = 5 if s == 5 else 3
    gates.append({"gate": f"d >= {min_d}", "d": d, "pass": d >= min_d})
    if d < min_d:
        raise GateFailed(f"d >= {min_d}", f"residual degree {d}")

    residual = part.residual
    res_pre = part.residual_preimage
    if len(residual) > 0:
        size_ok = 6 * len(residual) <= d * d + 9 * d + 10
        gates.append({"gate": "|residual| <= (d^2+9d+10)/6", "size": len(residual),
                      "bound": planar.bese_size_bound(d), "pass": size_ok})
        if not size_ok:
            raise GateFailed("|residual| <= (d^2+9d+10)/6",
                             f"{len(residual)} > {planar.bese_size_bound(d)}")
        fail = planar._curve_conditions(residual, d, budget_subsets)
        gates.append({"gate": "t(d+3-t)-2 incidence bounds", "pass": fail is None,
                      "detail": fail})
        if fail is not None:
            raise GateFailed("incidence bounds", fail)
        p_img = psi.apply(P)
        if any(Q == P for Q in res_pre):
            curve = separating_curve(residual, p_img, d, budget_subsets)
        else:
            with_p = PointSet(residual.points + [p_img], 2)
            curve = separating_curve(with_p, p_img, d, budget_subsets)
        factors.append(ConeFactor(curve, psi, "residual separator"))
    # empty residual: the slack d is absorbed by padding below

    _padding(factors, D, P, field, rng, S.ambient + 1)
    entry = SeparatorEntry(idx, factors, D, gates=gates)
    if not entry.verify(S, P):
        raise SeparationFailed("assembled product failed point verification")
    return entry


def _separator_bundle(S: PointSet, m: int, s: int, D: int, seed: int,
                      budget_subsets: int) -> SeparatorBundle:
    entries = []
    for i, P in enumerate(S):
        entries.append(
            constructive_separator(S, P, m, s, D, seed=seed,
                                   budget_subsets=budget_subsets, node_index=i)
        )
    return SeparatorBundle(entries)


def verify_certificate(cert: Certificate, S: PointSet) -> tuple[bool, list]:
    """Replay the evidence of a certificate without recomputing the route."""
    issues = []
    if cert.verdict == QFACTORIAL:
        if cert.route == "BoundOnly":
            ok = any(
                g.get("pass") and "bound" in g for g in cert.hypothesis_log
            )
            if not ok:
                issues.append("BoundOnly verdict without a passing bound gate")
        elif cert.route == "DirectRank":
            if cert.evidence is None or not cert.evidence.independent:
                issues.append("DirectRank QFactorial without a zero-defect report")
            elif cert.evidence.set_size != len(S):
                issues.append("defect report size does not match the node set")
        elif cert.route == "Constructive":
            if cert.bundle is None or len(cert.bundle.entries) != len(S):
                issues.append("Constructive verdict without a full bundle")
            else:
                for e in cert.bundle.entries:
                    if not e.verify(S, S[e.node_index]):
                        issues.append(f"bundle entry {e.node_index} fails re-verification")
        elif cert.route == "BaseLocusRoute":
            ok = any(
                g.get("gate", "").startswith("base locus") and g.get("pass")
                for g in cert.hypothesis_log
            )
            if not ok:
                issues.append("BaseLocusRoute verdict without the sampled gate")
    elif cert.verdict == NOT_QFACTORIAL:
        if cert.evidence is None or cert.evidence.defect <= 0:
            issues.append("NotQFactorial without a positive-defect report")
    return (not issues), issues
