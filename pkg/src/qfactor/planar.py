"""Plane-curve incidence analysis on P^2.

Exact maximum-points-on-a-curve searches for lines and conics, budgeted
branch-and-bound for higher degrees, the hypothesis predicates for the
base-point-freeness theorems, separating plane curves, and the greedy
cluster partition used by the constructive separator pipeline.
"""
from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from itertools import combinations
from math import comb

from .conditions import separating_form
from .errors import (
    HypothesisViolated,
    InternalContradiction,
    UnverifiableDegree,
)
from .polyform import HomogeneousForm, monomial_basis, _field_rank
from .pointgeom import PointSet, ProjectivePoint, _kernel_basis


@dataclass(frozen=True)
class StarParams:
    """m is the per-degree multiplier: property holds when at most t*m points
    lie on any degree-t curve."""

    m: int
    t_max: int = 4


# -- incidence plumbing -----------------------------------------------------------


def _mono_vals(P: ProjectivePoint, basis):
    field = P.field
    out = []
    for exp in basis:
        v = field.one
        for c, e in zip(P.coords, exp):
            if e:
                v = v * c**e
        out.append(v)
    return out


def _curve_mask(curve_vec, point_vals, field) -> int:
    mask = 0
    for i, vals in enumerate(point_vals):
        v = sum((a * b for a, b in zip(curve_vec, vals)), start=field.zero)
        if field.is_zero(v):
            mask |= 1 << i
    return mask


def _cross(a, b):
    return [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]


def _all_lines(S: PointSet):
    """Every line through >= 2 points of S, as {line point key: bitmask}."""
    field = S.field
    lin_vals = [list(P.coords) for P in S]
    seen: dict = {}
    for i, j in combinations(range(len(S)), 2):
        coeffs = _cross(S[i].coords, S[j].coords)
        key = ProjectivePoint(coeffs, field)
        if key in seen:
            continue
        mask = _curve_mask(key.coords, lin_vals, field)
        seen[key] = mask
    return seen


def _members(mask: int):
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return out


def _vec_to_form(vec, degree, field) -> HomogeneousForm:
    basis = monomial_basis(2, degree)
    return HomogeneousForm(3, degree, dict(zip(basis, vec)), field)


def conic_is_irreducible(curve: HomogeneousForm) -> bool:
    """Rank of the symmetric matrix of a ternary quadratic form is 3 exactly
    for irreducible conics (needs characteristic != 2)."""
    field = curve.field
    t = curve.terms
    half = field.inv(field.coerce(2))

    def g(e):
        return t.get(e, field.zero)

    m = [
        [g((2, 0, 0)), g((1, 1, 0)) * half, g((1, 0, 1)) * half],
        [g((1, 1, 0)) * half, g((0, 2, 0)), g((0, 1, 1)) * half],
        [g((1, 0, 1)) * half, g((0, 1, 1)) * half, g((0, 0, 2))],
    ]
    return _field_rank(m, field) == 3


def _fit_curves(S: PointSet, indices, degree):
    """Null-space basis of the degree-d evaluation matrix on the subset."""
    field = S.field
    basis = monomial_basis(2, degree)
    rows = [_mono_vals(S[i], basis) for i in indices]
    return _kernel_basis(rows, field)


def _best(candidates):
    """Pick (count, members, vec) maximizing count; ties by lexicographic
    order of the sorted member indices (determinism)."""
    best = None
    for count, members, vec in candidates:
        key = (-count, tuple(sorted(members)))
        if best is None or key < best[0]:
            best = (key, count, members, vec)
    if best is None:
        return None
    return best[1], best[2], best[3]


# -- maximum points on a curve -----------------------------------------------------


def max_points_on_curve(S: PointSet, t: int, budget: int = 200_000):
    """(count, witness form or None, exact flag).

    t=1 and t=2 are exact (all-pairs lines; all 5-subset conic fits plus
    two-line covers).  t>=3 uses branch-and-bound from (C(t+2,2)-1)-subsets,
    exact only while the budget lasts.
    """
    field = S.field
    n = len(S)
    D = comb(t + 2, 2)
    if n < D:
        vecs = _fit_curves(S, range(n), t)
        witness = _vec_to_form(vecs[0], t, field) if vecs else None
        return n, witness, True

    basis2 = monomial_basis(2, 2)
    if t == 1:
        lines = _all_lines(S)
        cands = [(bin(m).count("1"), _members(m), list(k.coords)) for k, m in lines.items()]
        count, members, vec = _best(cands)
        return count, _vec_to_form(vec, 1, field), True

    if t == 2:
        quad_vals = [_mono_vals(P, basis2) for P in S]
        lines = list(_all_lines(S).items())
        cands = []
        # reducible conics: unions of two point-rich lines, or a line plus
        # one stray point (the second component passes through it)
        for (k1, m1), (k2, m2) in combinations(lines, 2):
            u = m1 | m2
            prod = _vec_to_form(list(k1.coords), 1, field) * _vec_to_form(list(k2.coords), 1, field)
            cands.append((bin(u).count("1"), _members(u), [prod.terms.get(e, field.zero) for e in basis2]))
        for k1, m1 in lines:
            c1 = bin(m1).count("1")
            if c1 < n:
                stray = next(i for i in range(n) if not (m1 >> i) & 1)
                l2 = _cross(S[stray].coords, S[(stray + 1) % n].coords)  # any line through stray
                if all(field.is_zero(x) for x in l2):
                    continue
                prod = _vec_to_form(list(k1.coords), 1, field) * _vec_to_form(l2, 1, field)
                vec = [prod.terms.get(e, field.zero) for e in basis2]
                mask = _curve_mask(vec, quad_vals, field)
                cands.append((bin(mask).count("1"), _members(mask), vec))
        exact = comb(n, 5) <= budget
        used = 0
        for sub in combinations(range(n), 5):
            if used >= budget:
                break
            used += 1
            for vec in _fit_curves(S, sub, 2):
                mask = _curve_mask(vec, quad_vals, field)
                cands.append((bin(mask).count("1"), _members(mask), vec))
        count, members, vec = _best(cands)
        return count, _vec_to_form(vec, 2, field), exact

    # t >= 3: branch-and-bound over supersets of (D-1)-subsets
    vals = [_mono_vals(P, monomial_basis(2, t)) for P in S]
    state = {"used": 0, "exhausted": False, "best": (0, (), None)}

    def consider(count, members, vec):
        key = (-count, tuple(sorted(members)))
        cur = state["best"]
        if cur[2] is None or key < (-cur[0], cur[1]):
            state["best"] = (count, tuple(sorted(members)), vec)

    def extend(indices):
        if state["used"] >= budget:
            state["exhausted"] = True
            return
        state["used"] += 1
        rows = [vals[i] for i in indices]
        null = _kernel_basis(rows, field)
        if not null:
            return
        if len(null) == 1:
            mask = _curve_mask(null[0], vals, field)
            consider(bin(mask).count("1"), _members(mask), null[0])
            return
        consider(len(indices), indices, null[0])
        last = indices[-1] if indices else -1
        for q in range(last + 1, len(S)):
            extend(indices + (q,))

    for sub in combinations(range(n), D - 1):
        if state["used"] >= budget:
            state["exhausted"] = True
            break
        extend(sub)
    count, members, vec = state["best"]
    witness = _vec_to_form(vec, t, field) if vec is not None else None
    return count, witness, not state["exhausted"]


def curve_exceeding(S: PointSet, t: int, threshold: int, budget: int = 200_000,
                    require_irreducible: bool = False):
    """Decide whether some degree-t curve contains more than `threshold`
    points of S.  Returns (found, members, witness, exact).

    For t=2 this is complete within a small budget: a conic with more than
    `threshold` of the n points misses at most o = n-threshold-1 of them, so
    among any fixed (5+o)-subset at least 5 of its points lie on the conic,
    and 5 points of an irreducible conic determine it.  Reducible conics are
    covered by the two-line enumeration.
    """
    field = S.field
    n = len(S)
    if threshold >= n:
        return False, (), None, True
    if n < comb(t + 2, 2):
        vecs = _fit_curves(S, range(n), t)
        return True, tuple(range(n)), _vec_to_form(vecs[0], t, field), True

    if t == 1:
        lines = _all_lines(S)
        cands = [
            (bin(m).count("1"), _members(m), list(k.coords))
            for k, m in lines.items()
            if bin(m).count("1") > threshold
        ]
        if not cands:
            return False, (), None, True
        count, members, vec = _best(cands)
        return True, tuple(members), _vec_to_form(vec, 1, field), True

    if t == 2:
        quad_vals = [_mono_vals(P, monomial_basis(2, 2)) for P in S]
        cands = []
        if not require_irreducible:
            lines = list(_all_lines(S).items())
            basis2 = monomial_basis(2, 2)
            for (k1, m1), (k2, m2) in combinations(lines, 2):
                u = m1 | m2
                if bin(u).count("1") > threshold:
                    prod = _vec_to_form(list(k1.coords), 1, field) * _vec_to_form(
                        list(k2.coords), 1, field
                    )
                    cands.append(
                        (bin(u).count("1"), _members(u),
                         [prod.terms.get(e, field.zero) for e in basis2])
                    )
            # a point-rich line plus a second component through one stray point
            for k1, m1 in lines:
                c1 = bin(m1).count("1")
                if c1 + 1 > threshold and c1 < n:
                    stray = next(i for i in range(n) if not (m1 >> i) & 1)
                    other = next(i for i in range(n) if i != stray)
                    l2 = _cross(S[stray].coords, S[other].coords)
                    prod = _vec_to_form(list(k1.coords), 1, field) * _vec_to_form(
                        l2, 1, field
                    )
                    vec = [prod.terms.get(e, field.zero) for e in basis2]
                    mask = _curve_mask(vec, quad_vals, field)
                    if bin(mask).count("1") > threshold:
                        cands.append((bin(mask).count("1"), _members(mask), vec))
        o = n - threshold - 1
        anchor = range(min(n, 5 + o))
        exact = comb(len(anchor), 5) <= budget
        used = 0
        for sub in combinations(anchor, 5):
            if used >= budget:
                break
            used += 1
            for vec in _fit_curves(S, sub, 2):
                mask = _curve_mask(vec, quad_vals, field)
                if bin(mask).count("1") > threshold:
                    form = _vec_to_form(vec, 2, field)
                    if require_irreducible and not conic_is_irreducible(form):
                        continue
                    cands.append((bin(mask).count("1"), _members(mask), vec))
        if not cands:
            return False, (), None, exact
        count, members, vec = _best(cands)
        return True, tuple(members), _vec_to_form(vec, 2, field), exact

    count, witness, exact = max_points_on_curve(S, t, budget)
    if count > threshold:
        # recover membership from the witness
        vals = [_mono_vals(P, monomial_basis(2, t)) for P in S]
        vec = [witness.terms.get(e, field.zero) for e in monomial_basis(2, t)]
        mask = _curve_mask(vec, vals, field)
        return True, tuple(_members(mask)), witness, exact
    return False, (), None, exact


# -- hypothesis predicates ------------------------------------------------------------


def star_property(S: PointSet, params: StarParams, budget: int = 200_000):
    """True iff at most t*m points lie on any degree-t curve, for every
    t <= t_max where the bound binds (t*m < |S|)."""
    report = []
    ok = True
    for t in range(1, params.t_max + 1):
        bound = t * params.m
        if bound >= len(S):
            report.append({"t": t, "bound": bound, "status": "vacuous"})
            continue
        found, members, witness, exact = curve_exceeding(S, t, bound, budget)
        if found:
            ok = False
            report.append({"t": t, "bound": bound, "status": "violated",
                           "count": len(members), "members": list(members)})
        else:
            report.append({"t": t, "bound": bound,
                           "status": "holds" if exact else "unverified"})
    return ok, report


def bese_size_bound(d: int) -> int:
    return (d * d + 9 * d + 10) // 6


def davis_geramita_size_bound(d: int) -> int:
    h = (d + 3) // 2
    return max(h * (d + 3 - h) - 1, h * h)


def _curve_conditions(S: PointSet, d: int, budget: int):
    """The per-degree incidence conditions shared by both theorems: at most
    k(d+3-k)-2 points on any curve of degree k <= (d+3)/2."""
    for k in range(1, (d + 3) // 2 + 1):
        bound = k * (d + 3 - k) - 2
        if bound >= len(S):
            continue
        found, members, witness, exact = curve_exceeding(S, k, bound, budget)
        if not exact and not found:
            raise UnverifiableDegree(f"degree-{k} incidence search inexact within budget")
        if found:
            return f"more than {bound} points on a degree-{k} curve"
    return None


def bese_hypothesis(S: PointSet, d: int, budget: int = 200_000):
    """(holds, failing condition or None) for base-point-freeness of the
    degree-d curves through S."""
    if d < 3:
        raise ValueError("the theorem needs d >= 3")
    if 6 * len(S) > d * d + 9 * d + 10:
        return False, f"|S| = {len(S)} exceeds (d^2+9d+10)/6 = {bese_size_bound(d)}"
    fail = _curve_conditions(S, d, budget)
    return (fail is None), fail


def davis_geramita_hypothesis(S: PointSet, d: int, budget: int = 200_000):
    if d < 3:
        raise ValueError("the theorem needs d >= 3")
    if len(S) > davis_geramita_size_bound(d):
        return False, f"|S| = {len(S)} exceeds {davis_geramita_size_bound(d)}"
    fail = _curve_conditions(S, d, budget)
    return (fail is None), fail


def separating_curve(S: PointSet, P: ProjectivePoint, d: int,
                     budget: int = 200_000) -> HomogeneousForm:
    """A degree-d plane curve through S minus P missing P; guaranteed when
    |S| <= (d^2+9d+16)/6 and the incidence conditions hold on S minus P."""
    if 6 * len(S) > d * d + 9 * d + 16:
        raise HypothesisViolated(
            "size bound", f"|S| = {len(S)} > (d^2+9d+16)/6 with d = {d}"
        )
    rest = S.without(P)
    fail = _curve_conditions(rest, d, budget)
    if fail is not None:
        raise HypothesisViolated("incidence bound", fail)
    form = separating_form(S, P, d)
    if form is None:
        raise InternalContradiction(
            f"hypotheses hold at degree {d} but no separating curve exists"
        )
    return form


# -- cluster partition ----------------------------------------------------------------


@dataclass
class Cluster:
    degree: int
    curve: HomogeneousForm
    member_indices: tuple
    members: PointSet
    preimage: PointSet | None


@dataclass
class ClusterPartition:
    clusters: list
    residual_indices: tuple
    residual: PointSet
    residual_preimage: PointSet | None
    multiplicities: dict = dc_field(default_factory=dict)

    @property
    def r_min(self):
        return min((c.degree for c in self.clusters), default=None)


def cluster_partition(S_proj: PointSet, params: StarParams,
                      preimage: PointSet | None = None,
                      budget: int = 200_000) -> ClusterPartition:
    """Greedy extraction of point clusters on low-degree curves.

    Repeatedly finds the smallest degree j at which some degree-j curve
    (irreducible for j >= 2) contains more than j*m of the remaining
    projected points, removes them as a cluster, and stops when the
    remainder has the star property.  Cardinality bookkeeping is exact:
    cluster sizes plus residual size equal |S_proj|.
    """
    if preimage is not None and len(preimage) != len(S_proj):
        raise ValueError("preimage must align index-by-index with the projection")
    remaining = list(range(len(S_proj)))
    clusters = []
    while True:
        sub = S_proj.subset(remaining)
        hit = None
        for j in range(1, params.t_max + 1):
            bound = j * params.m
            if bound >= len(sub):
                break
            found, members, witness, exact = curve_exceeding(
                sub, j, bound, budget, require_irreducible=(j >= 2)
            )
            if not exact and not found:
                raise UnverifiableDegree(
                    f"degree-{j} cluster search inexact within budget"
                )
            if found:
                hit = (j, members, witness)
                break
        if hit is None:
            break
        j, members, witness = hit
        global_idx = tuple(remaining[i] for i in members)
        clusters.append(
            Cluster(
                degree=j,
                curve=witness,
                member_indices=global_idx,
                members=S_proj.subset(global_idx),
                preimage=preimage.subset(global_idx) if preimage is not None else None,
            )
        )
        remaining = [i for i in remaining if i not in set(global_idx)]
    mult: dict = {}
    for c in clusters:
        mult[c.degree] = mult.get(c.degree, 0) + 1
    return ClusterPartition(
        clusters=clusters,
        residual_indices=tuple(remaining),
        residual=S_proj.subset(remaining),
        residual_preimage=preimage.subset(remaining) if preimage is not None else None,
        multiplicities=mult,
    )
