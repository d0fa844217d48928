"""Projective points, projections, and the node-finding backends."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import (
    CenterHitsPoint,
    ClusterAmbiguous,
    DegenerateProjection,
    FieldMismatch,
    NonSplitPrime,
    NotInjectiveOnSet,
    PointNotOnVariety,
    PositiveDimensionalIntersection,
    SchemeNotReduced,
    TooLarge,
    ZeroInput,
)
from .polyform import HomogeneousForm, _field_rank, sylvester_resultant
from .scalar import FieldSpec

# sign/position threshold for unit-norm float coordinates
_APPROX_SUPPORT = 1e-6


class ProjectivePoint:
    """A point of P^N with a canonical representative.

    Exact fields: first nonzero coordinate scaled to 1.  Approx: unit
    Euclidean norm, first coordinate of magnitude > 1e-6 made positive.
    """

    __slots__ = ("coords", "field")

    def __init__(self, coords, field: FieldSpec):
        coords = [field.coerce(c) for c in coords]
        if all(field.is_zero(c) for c in coords):
            raise ZeroInput("all coordinates vanish")
        if field.tag == "approx":
            norm = math.sqrt(sum(c * c for c in coords))
            coords = [c / norm for c in coords]
            for c in coords:
                if abs(c) > _APPROX_SUPPORT:
                    if c < 0:
                        coords = [-x for x in coords]
                    break
        else:
            pivot = next(c for c in coords if not field.is_zero(c))
            inv = field.inv(pivot)
            coords = [c * inv for c in coords]
        self.coords = tuple(coords)
        self.field = field

    @property
    def ambient(self) -> int:
        return len(self.coords) - 1

    def pivot_index(self) -> int:
        """Index of the canonical chart coordinate."""
        if self.field.tag == "approx":
            return max(range(len(self.coords)), key=lambda i: abs(self.coords[i]))
        return next(i for i, c in enumerate(self.coords) if not self.field.is_zero(c))

    def __eq__(self, other):
        if not isinstance(other, ProjectivePoint):
            return NotImplemented
        if len(self.coords) != len(other.coords) or self.field != other.field:
            return False
        if self.field.tag == "approx":
            d = math.sqrt(sum((a - b) ** 2 for a, b in zip(self.coords, other.coords)))
            return d <= 10 * self.field.eps
        return all(self.field.eq(a, b) for a, b in zip(self.coords, other.coords))

    def __hash__(self):
        if self.field.tag == "approx":
            # equality is tolerance-based; a constant hash keeps eq/hash consistent
            return hash(("approx-point", len(self.coords)))
        return hash(self.coords)

    def __repr__(self):
        inner = ":".join(str(c) for c in self.coords)
        return f"({inner})"

    def to_json(self):
        return [self.field.scalar_to_json(c) for c in self.coords]

    @classmethod
    def from_json(cls, obj, field):
        return cls([field.scalar_from_json(c) for c in obj], field)


class PointSet:
    """A finite set of pairwise distinct projective points in one P^N."""

    __slots__ = ("ambient", "points", "field")

    def __init__(self, points: list[ProjectivePoint], ambient: int | None = None):
        if not points and ambient is None:
            raise ZeroInput("empty point set needs an explicit ambient dimension")
        if points:
            ambient = points[0].ambient
            field = points[0].field
            for p in points:
                if p.ambient != ambient or p.field != field:
                    raise FieldMismatch("points live in different spaces")
            if field.tag == "approx":
                for i in range(len(points)):
                    for j in range(i + 1, len(points)):
                        if points[i] == points[j]:
                            raise ValueError("duplicate points in set")
            elif len(set(points)) != len(points):
                raise ValueError("duplicate points in set")
            self.field = field
        else:
            self.field = None
        self.ambient = ambient
        self.points = list(points)

    def __len__(self):
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    def __getitem__(self, i):
        return self.points[i]

    def index_of(self, P: ProjectivePoint) -> int:
        for i, q in enumerate(self.points):
            if q == P:
                return i
        raise ValueError("point not in set")

    def without(self, P: ProjectivePoint) -> "PointSet":
        i = self.index_of(P)
        return PointSet(self.points[:i] + self.points[i + 1:], self.ambient)

    def subset(self, indices) -> "PointSet":
        return PointSet([self.points[i] for i in indices], self.ambient)

    def to_json(self):
        return [p.to_json() for p in self.points]

    @classmethod
    def from_json(cls, obj, field, ambient=None):
        return cls([ProjectivePoint.from_json(p, field) for p in obj], ambient)


@dataclass(frozen=True)
class NodeReport:
    point: ProjectivePoint
    gradient_rank_defect: int
    hessian_rank: int
    ordinary: bool


class ProjectionMap:
    """Projection P^N --> P^2 from the center {L0 = L1 = L2 = 0}."""

    def __init__(self, target_forms: list[HomogeneousForm]):
        if len(target_forms) != 3 or any(f.degree != 1 for f in target_forms):
            raise DegenerateProjection("need exactly three linear forms")
        field = target_forms[0].field
        nv = target_forms[0].num_vars
        rows = [
            [f.terms.get(tuple(1 if j == i else 0 for j in range(nv)), field.zero)
             for i in range(nv)]
            for f in target_forms
        ]
        if _field_rank(rows, field) < 3:
            raise DegenerateProjection("projection forms are linearly dependent")
        self.target_forms = list(target_forms)
        self.field = field
        self.num_vars = nv

    @classmethod
    def standard(cls, num_vars: int, field: FieldSpec) -> "ProjectionMap":
        return cls([HomogeneousForm.variable(i, num_vars, field) for i in range(3)])

    @classmethod
    def random(cls, num_vars: int, field: FieldSpec, rng, span: int = 20) -> "ProjectionMap":
        for _ in range(64):
            forms = [
                HomogeneousForm.linear([field.random(rng, span) for _ in range(num_vars)], field)
                for _ in range(3)
            ]
            try:
                return cls(forms)
            except DegenerateProjection:
                continue
        raise DegenerateProjection("could not draw independent linear forms")

    def apply(self, P: ProjectivePoint) -> ProjectivePoint:
        vals = [f.evaluate(P.coords) for f in self.target_forms]
        if all(self.field.is_zero(v) for v in vals):
            raise CenterHitsPoint(f"{P} lies on the projection center")
        return ProjectivePoint(vals, self.field)


def project(psi: ProjectionMap, S: PointSet) -> PointSet:
    """Image of S in P^2; index order is preserved.

    Raises if a point hits the center or two images collide; the caller is
    expected to redraw the center in that case.
    """
    images = [psi.apply(P) for P in S]
    for i in range(len(images)):
        for j in range(i + 1, len(images)):
            if images[i] == images[j]:
                raise NotInjectiveOnSet(f"points {i} and {j} collide under the projection")
    return PointSet(images, 2)


# -- enumeration backend ----------------------------------------------------------


def _pack_forms(forms: list[HomogeneousForm], p: int):
    exps, coefs, offsets = [], [], [0]
    for f in forms:
        for e, c in sorted(f.terms.items(), reverse=True):
            exps.append(e)
            coefs.append(c.residue if hasattr(c, "residue") else int(c) % p)
        offsets.append(len(exps))
    nv = forms[0].num_vars
    exps = np.array(exps, dtype=np.int64).reshape(len(coefs), nv)
    return exps, np.array(coefs, dtype=np.int64), np.array(offsets, dtype=np.int64)


def find_nodes_enumerate(forms: list[HomogeneousForm], N: int,
                         budget: int = 2_000_000, max_out: int = 100_000) -> PointSet:
    """All F_p-rational common zeros of the forms in P^N, by exhaustion."""
    if not forms:
        raise ZeroInput("no forms given")
    field = forms[0].field
    if field.tag != "prime":
        raise FieldMismatch("enumeration backend needs a prime field")
    p = field.p
    total = (p ** (N + 1) - 1) // (p - 1)
    if total > budget:
        raise TooLarge(f"P^{N}(F_{p}) has {total} points, budget {budget}")
    exps, coefs, offsets = _pack_forms(forms, p)
    pts, count = _kernels.enumerate_common_zeros(p, N, exps, coefs, offsets, max_out)
    if count < 0:
        raise TooLarge(f"more than {max_out} common zeros")
    points = [ProjectivePoint([int(v) for v in pts[i]], field) for i in range(count)]
    return PointSet(points, N)


# -- structured plane-intersection backend -----------------------------------------


def _binary_roots(R: HomogeneousForm, u: int, w: int):
    """Rational roots of a binary form on P^1(F_p), as coordinate vectors."""
    field = R.field
    p = field.p
    roots = []
    for t in list(range(p)) + [None]:  # None = point at infinity (1:0)
        if t is None:
            coords = {u: field.one, w: field.zero}
        else:
            coords = {u: field.coerce(t), w: field.one}
        vec = [coords.get(i, field.zero) for i in range(R.num_vars)]
        if field.is_zero(R.evaluate(vec)):
            roots.append(vec)
    return roots


def _solve_plane_intersection(f, g, depth=0):
    field = f.field
    p = field.p
    # pick an elimination variable where both leading coefficients survive
    var = None
    for v in range(3):
        lf = f.terms.get(tuple(f.degree if i == v else 0 for i in range(3)))
        lg = g.terms.get(tuple(g.degree if i == v else 0 for i in range(3)))
        if lf is not None and lg is not None:
            var = v
            break
    if var is None:
        if depth >= 20:
            raise ZeroInput("could not find a usable elimination variable")
        # generic coordinate change, then map solutions back through it
        import random as _random

        rng = _random.Random(0xB4 + depth)
        rows = [[field.coerce(rng.randrange(p)) for _ in range(3)] for _ in range(3)]
        if _field_rank(rows, field) < 3:
            return _solve_plane_intersection(f, g, depth + 1)
        L = [HomogeneousForm.linear(r, field) for r in rows]
        from .polyform import substitute_linear

        sols = _solve_plane_intersection(
            substitute_linear(f, L), substitute_linear(g, L), depth + 1
        )
        mapped = []
        for q in sols:
            img = [
                sum((rows[i][j] * q.coords[j] for j in range(3)), start=field.zero)
                for i in range(3)
            ]
            mapped.append(ProjectivePoint(img, field))
        return mapped

    R = sylvester_resultant(f, g, var)
    if R.is_zero():
        raise PositiveDimensionalIntersection("resultant vanishes identically")
    u, w = [i for i in range(3) if i != var]

    found = []
    for vec in _binary_roots(R, u, w):
        fiber = []
        for t in range(p):
            cand = list(vec)
            cand[var] = field.coerce(t)
            if field.is_zero(f.evaluate(cand)) and field.is_zero(g.evaluate(cand)):
                q = ProjectivePoint(cand, field)
                if q not in fiber:
                    fiber.append(q)
        # the projection center (var=1, u=w=0) is excluded by the nonzero
        # leading coefficients, so the fiber scan above is exhaustive
        if not fiber:
            raise NonSplitPrime(f"resultant root with no F_{p}-rational fiber point")
        found.extend(fiber)
    return found


def find_nodes_structured_plane_family(f: HomogeneousForm, g: HomogeneousForm,
                                       embed_ambient: int = 4) -> PointSet:
    """Common zeros of two ternary forms, embedded into the plane {x0=x1=0}.

    Solves by eliminating one variable with a resultant and back-substituting.
    Prime-field coefficients only; the count equals deg(f)*deg(g) for generic
    inputs (Bezout).  A transverse (reduced) intersection is required at
    every point; multiplicity is detected through the Jacobian.
    """
    field = f.field
    if field.tag != "prime":
        raise FieldMismatch("structured solver runs over a prime field")
    if f.num_vars != 3 or g.num_vars != 3:
        raise ValueError("expected ternary forms")

    found = _solve_plane_intersection(f, g)
    for q in found:
        jac = [[h.partial(i).evaluate(q.coords) for i in range(3)] for h in (f, g)]
        if _field_rank(jac, field) < 2:
            raise SchemeNotReduced(f"intersection not transverse at {q}")

    expected = f.degree * g.degree
    if len(found) < expected:
        raise NonSplitPrime(
            f"only {len(found)} of {expected} intersection points rational mod {field.p}"
        )
    pad = embed_ambient + 1 - 3
    embedded = [
        ProjectivePoint([field.zero] * pad + list(q.coords), field) for q in found
    ]
    return PointSet(embedded, embed_ambient)


# -- numeric backend ----------------------------------------------------------------


def _pack_float_forms(forms: list[HomogeneousForm]):
    exps, coefs, offsets = [], [], [0]
    field = forms[0].field
    for f in forms:
        for e, c in sorted(f.terms.items(), reverse=True):
            exps.append(e)
            coefs.append(float(field.coerce(c)))
        offsets.append(len(exps))
    nv = forms[0].num_vars
    exps = np.array(exps, dtype=np.int64).reshape(len(coefs), nv) if coefs else \
        np.zeros((0, nv), dtype=np.int64)
    return exps, np.array(coefs, dtype=np.float64), np.array(offsets, dtype=np.int64)


def find_nodes_numeric(f: HomogeneousForm, num_starts: int = 20000,
                       cluster_radius: float = 1e-6, seed: int = 0xB4,
                       residual_tol: float = 1e-7) -> PointSet:
    """Singular points of {f = 0} over the reals, by multistart Gauss-Newton
    on the gradient system with projective normalization."""
    field = f.field
    if field.tag != "approx":
        raise FieldMismatch("numeric backend needs the approx field")
    nv = f.num_vars
    grads = f.partials()
    hessians = [grads[i].partial(j) for i in range(nv) for j in range(nv)]
    g_exps, g_coefs, g_off = _pack_float_forms(grads)
    h_exps, h_coefs, h_off = _pack_float_forms(hessians)

    rng = np.random.default_rng(seed)
    starts = rng.normal(size=(num_starts, nv))
    ends, residuals = _kernels.gauss_newton_multistart(
        starts, g_exps, g_coefs, g_off, h_exps, h_coefs, h_off, 80, residual_tol
    )
    # scale the residual cutoff with the gradient's coefficient size
    scale = max(1.0, float(np.max(np.abs(g_coefs)))) if g_coefs.size else 1.0
    hits = ends[residuals < residual_tol * scale]

    # canonical sign, then coarse grid grouping, then pairwise merge
    for i in range(len(hits)):
        row = hits[i]
        for c in row:
            if abs(c) > _APPROX_SUPPORT:
                if c < 0:
                    hits[i] = -row
                break
    groups: dict = {}
    for row in hits:
        key = tuple(np.round(row / (cluster_radius * 100)).astype(np.int64))
        if key in groups:
            groups[key][0] += row
            groups[key][1] += 1
        else:
            groups[key] = [row.copy(), 1]
    centers = [acc / cnt for acc, cnt in groups.values()]
    merged: list = []
    for c in centers:
        for m in merged:
            if np.linalg.norm(c - m[0] / m[1]) < 10 * cluster_radius:
                m[0] += c
                m[1] += 1
                break
        else:
            merged.append([c.copy(), 1])
    final = [m[0] / m[1] for m in merged]
    for i in range(len(final)):
        for j in range(i + 1, len(final)):
            d = np.linalg.norm(final[i] - final[j])
            if 10 * cluster_radius <= d < 100 * cluster_radius:
                raise ClusterAmbiguous(f"clusters {i} and {j} at distance {d:.2e}")
    # polish each center to near machine precision; averaging cluster members
    # alone leaves ~1e-10 coordinate error, which pollutes downstream SVDs
    if final:
        polished, _ = _kernels.gauss_newton_multistart(
            np.array(final), g_exps, g_coefs, g_off, h_exps, h_coefs, h_off,
            200, 1e-13
        )
        final = list(polished)
    pts = [ProjectivePoint(list(map(float, c)), field) for c in final]
    dedup: list = []
    for q in pts:
        if q not in dedup:
            dedup.append(q)
    dedup.sort(key=lambda q: q.coords)
    return PointSet(dedup, nv - 1)


# -- node verification ----------------------------------------------------------------


def _matrix_rank(rows, field, abs_scale: float = 0.0) -> int:
    """Rank over the field; for approx the threshold is eps times the larger
    of the top singular value and abs_scale (so a residual-sized gradient
    still counts as zero)."""
    if field.tag == "approx":
        a = np.array([[float(x) for x in r] for r in rows])
        if a.size == 0:
            return 0
        sv = np.linalg.svd(a, compute_uv=False)
        if sv.size == 0:
            return 0
        thresh = field.eps * max(sv[0], abs_scale)
        if thresh == 0:
            return 0
        return int(np.sum(sv > thresh))
    return _field_rank(rows, field)


def _coef_scale(forms) -> float:
    field = forms[0].field
    best = 1.0
    for f in forms:
        for c in f.terms.values():
            best = max(best, abs(float(field.coerce(c))))
    return best


def _affine_hessian(h: HomogeneousForm, P: ProjectivePoint, chart: int):
    """Second partials of the chart-local equation at P: the projective
    Hessian with the chart row and column removed."""
    field = h.field
    nv = h.num_vars
    idx = [i for i in range(nv) if i != chart]
    return [
        [h.second_partial(i, j).evaluate(P.coords) for j in idx] for i in idx
    ], idx


def verify_node(P: ProjectivePoint, forms: list[HomogeneousForm]) -> NodeReport:
    """Decide whether P is an ordinary double point of the variety cut out
    by one form (hypersurface) or two forms (complete intersection)."""
    field = forms[0].field
    for f in forms:
        if not field.is_zero(f.evaluate(P.coords)):
            raise PointNotOnVariety(f"{P} is not on the variety")
    nv = forms[0].num_vars
    N = nv - 1
    chart = P.pivot_index()
    codim = len(forms)
    scale = _coef_scale(forms) * 10 if field.tag == "approx" else 0.0
    jac = [[f.partial(i).evaluate(P.coords) for i in range(nv)] for f in forms]
    jrank = _matrix_rank(jac, field, scale)
    defect = codim - jrank

    if codim == 1:
        if defect != 1:
            return NodeReport(P, defect, -1, False)
        hess, _ = _affine_hessian(forms[0], P, chart)
        hr = _matrix_rank(hess, field, scale)
        return NodeReport(P, defect, hr, hr == N)

    if codim == 2:
        if defect != 1:
            return NodeReport(P, defect, -1, False)
        f, g = forms
        u = jac[0]
        v = jac[1]
        # the combination with vanishing gradient: lam*grad f + mu*grad g = 0
        if any(not field.is_zero(c) for c in u):
            i = next(i for i, c in enumerate(u) if not field.is_zero(c))
            lam, mu = v[i], -u[i]
            smooth = f if not field.is_zero(mu) else g
        else:
            lam, mu = field.one, field.zero
            smooth = g
        h = f.scale(lam) + g.scale(mu)
        hess, idx = _affine_hessian(h, P, chart)
        # restrict to the chart tangent space of the smooth member
        grad_s = [smooth.partial(i).evaluate(P.coords) for i in idx]
        basis = _kernel_basis([grad_s], field)
        m = len(basis)
        restricted = [
            [
                sum(
                    (basis[a][i] * hess[i][j] * basis[b][j]
                     for i in range(len(idx)) for j in range(len(idx))),
                    start=field.zero,
                )
                for b in range(m)
            ]
            for a in range(m)
        ]
        hr = _matrix_rank(restricted, field, scale)
        return NodeReport(P, defect, hr, hr == N - 1)

    raise ValueError("verify_node supports one or two defining forms")


def _kernel_basis(rows, field):
    """Basis of the null space of a small dense matrix over the field."""
    nr = len(rows)
    nc = len(rows[0])
    m = [list(r) for r in rows]
    pivots = []
    rank = 0
    for col in range(nc):
        piv = None
        for r in range(rank, nr):
            if not field.is_zero(m[r][col]):
                piv = r
                break
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        inv = field.inv(m[rank][col])
        m[rank] = [x * inv for x in m[rank]]
        for r in range(nr):
            if r != rank and not field.is_zero(m[r][col]):
                fac = m[r][col]
                m[r] = [a - fac * b for a, b in zip(m[r], m[rank])]
        pivots.append(col)
        rank += 1
    basis = []
    free = [c for c in range(nc) if c not in pivots]
    for fc in free:
        vec = [field.zero] * nc
        vec[fc] = field.one
        for r, pc in enumerate(pivots):
            vec[pc] = -m[r][fc]
        basis.append(vec)
    return basis
