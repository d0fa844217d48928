"""Sparse homogeneous multivariate forms.

Terms are stored as a map from exponent tuples to nonzero scalars; the
monomial order used everywhere (matrix columns, serialization) is
graded-lexicographic, which for forms of a single degree is plain
lexicographic descending.
"""
from __future__ import annotations

from fractions import Fraction
from math import comb

from .errors import DegenerateProjection, FieldMismatch, ZeroInput
from .scalar import FieldSpec


def monomial_basis(N: int, d: int) -> list[tuple[int, ...]]:
    """All exponent tuples of length N+1 with total degree d, lex descending.

    The length is C(N+d, N).
    """
    if N < 1 or d < 0:
        raise ValueError("need N >= 1 and d >= 0")
    out = []

    def rec(prefix, remaining, slots):
        if slots == 1:
            out.append(prefix + (remaining,))
            return
        for e in range(remaining, -1, -1):
            rec(prefix + (e,), remaining - e, slots - 1)

    rec((), d, N + 1)
    assert len(out) == comb(N + d, N)
    return out


class HomogeneousForm:
    __slots__ = ("num_vars", "degree", "terms", "field")

    def __init__(self, num_vars: int, degree: int, terms: dict, field: FieldSpec):
        clean = {}
        for exp, c in terms.items():
            exp = tuple(int(e) for e in exp)
            if len(exp) != num_vars:
                raise ValueError(f"exponent tuple {exp} has wrong length")
            if sum(exp) != degree:
                raise ValueError(f"monomial {exp} has degree {sum(exp)}, form has {degree}")
            c = field.coerce(c)
            if not field.is_zero(c):
                clean[exp] = c
        self.num_vars = num_vars
        self.degree = degree
        self.terms = clean
        self.field = field

    # -- constructors ---------------------------------------------------------

    @classmethod
    def zero(cls, num_vars, degree, field):
        return cls(num_vars, degree, {}, field)

    @classmethod
    def monomial(cls, exp, field, coef=1):
        return cls(len(exp), sum(exp), {tuple(exp): coef}, field)

    @classmethod
    def variable(cls, i, num_vars, field):
        exp = tuple(1 if j == i else 0 for j in range(num_vars))
        return cls(num_vars, 1, {exp: field.one}, field)

    @classmethod
    def linear(cls, coeffs, field):
        n = len(coeffs)
        terms = {}
        for i, c in enumerate(coeffs):
            exp = tuple(1 if j == i else 0 for j in range(n))
            terms[exp] = c
        return cls(n, 1, terms, field)

    # -- basic predicates -----------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other):
        if not isinstance(other, HomogeneousForm):
            return NotImplemented
        if (self.num_vars, self.degree) != (other.num_vars, other.degree):
            return False
        keys = set(self.terms) | set(other.terms)
        z = self.field.zero
        return all(
            self.field.eq(self.terms.get(k, z), other.terms.get(k, z)) for k in keys
        )

    def __hash__(self):
        return hash((self.num_vars, self.degree, frozenset(self.terms)))

    def _check_compat(self, other):
        if self.num_vars != other.num_vars:
            raise FieldMismatch("variable counts differ")
        if self.field != other.field:
            raise FieldMismatch("coefficient fields differ")

    # -- arithmetic -----------------------------------------------------------

    def __add__(self, other):
        self._check_compat(other)
        if self.degree != other.degree:
            if self.is_zero():
                return other
            if other.is_zero():
                return self
            raise ValueError("cannot add forms of different degrees")
        terms = dict(self.terms)
        for exp, c in other.terms.items():
            terms[exp] = terms.get(exp, self.field.zero) + c
        return HomogeneousForm(self.num_vars, self.degree, terms, self.field)

    def __neg__(self):
        return HomogeneousForm(
            self.num_vars, self.degree, {e: -c for e, c in self.terms.items()}, self.field
        )

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        c = self.field.coerce(c)
        return HomogeneousForm(
            self.num_vars, self.degree, {e: v * c for e, v in self.terms.items()}, self.field
        )

    def __mul__(self, other):
        if not isinstance(other, HomogeneousForm):
            return self.scale(other)
        self._check_compat(other)
        terms = {}
        z = self.field.zero
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                exp = tuple(a + b for a, b in zip(e1, e2))
                terms[exp] = terms.get(exp, z) + c1 * c2
        return HomogeneousForm(self.num_vars, self.degree + other.degree, terms, self.field)

    __rmul__ = __mul__

    # -- evaluation and differentiation ----------------------------------------

    def evaluate(self, coords):
        """Value at the given affine representative of a point."""
        if len(coords) != self.num_vars:
            raise FieldMismatch("coordinate count does not match variable count")
        coords = [self.field.coerce(c) for c in coords]
        total = self.field.zero
        for exp, c in self.terms.items():
            v = c
            for x, e in zip(coords, exp):
                if e:
                    v = v * x**e
            total = total + v
        return total

    def partial(self, i: int) -> "HomogeneousForm":
        if self.degree < 1:
            raise ValueError("cannot differentiate a constant form")
        terms = {}
        for exp, c in self.terms.items():
            e = exp[i]
            if e == 0:
                continue
            new = list(exp)
            new[i] = e - 1
            terms[tuple(new)] = c * e
        return HomogeneousForm(self.num_vars, self.degree - 1, terms, self.field)

    def partials(self) -> list["HomogeneousForm"]:
        return [self.partial(i) for i in range(self.num_vars)]

    def second_partial(self, i: int, j: int) -> "HomogeneousForm":
        return self.partial(i).partial(j)

    # -- serialization ----------------------------------------------------------

    def to_json(self) -> dict:
        items = sorted(self.terms.items(), reverse=True)
        return {
            "degree": self.degree,
            "vars": self.num_vars,
            "terms": [
                {"exp": list(e), "coef": self.field.scalar_to_json(c)} for e, c in items
            ],
        }

    @classmethod
    def from_json(cls, obj: dict, field: FieldSpec) -> "HomogeneousForm":
        terms = {
            tuple(t["exp"]): field.scalar_from_json(t["coef"]) for t in obj["terms"]
        }
        return cls(obj["vars"], obj["degree"], terms, field)

    def __repr__(self):
        items = sorted(self.terms.items(), reverse=True)
        parts = []
        for e, c in items[:8]:
            mono = "*".join(f"x{i}^{k}" if k > 1 else f"x{i}" for i, k in enumerate(e) if k)
            parts.append(f"{c}*{mono}" if mono else f"{c}")
        tail = " + ..." if len(items) > 8 else ""
        body = " + ".join(parts) if parts else "0"
        return f"<form deg {self.degree} in {self.num_vars} vars: {body}{tail}>"


def product(f: HomogeneousForm, g: HomogeneousForm) -> HomogeneousForm:
    """Form cutting out the union of the two zero sets; degrees add."""
    return f * g


def substitute_linear(c: HomogeneousForm, L: list[HomogeneousForm]) -> HomogeneousForm:
    """Pull a ternary form back along three independent linear forms.

    The result is a form of the same degree in the ambient variables whose
    zero set is the cone over {c = 0} with vertex {L0 = L1 = L2 = 0}.
    """
    if c.num_vars != 3:
        raise ValueError("the curve form must be ternary")
    if len(L) != 3:
        raise ValueError("need exactly three linear forms")
    field = c.field
    nv = L[0].num_vars
    for l in L:
        if l.degree != 1 or l.num_vars != nv:
            raise ValueError("L must consist of linear forms in one ambient space")
    rows = []
    for l in L:
        rows.append([l.terms.get(tuple(1 if j == i else 0 for j in range(nv)), field.zero)
                     for i in range(nv)])
    if _field_rank(rows, field) < 3:
        raise DegenerateProjection("projection forms are linearly dependent")

    # cache powers of each linear form
    pw = [[HomogeneousForm(nv, 0, {(0,) * nv: field.one}, field)] for _ in range(3)]
    for k in range(3):
        for _ in range(c.degree):
            pw[k].append(pw[k][-1] * L[k])
    out = HomogeneousForm.zero(nv, c.degree, field)
    for (e0, e1, e2), coef in c.terms.items():
        out = out + (pw[0][e0] * pw[1][e1] * pw[2][e2]).scale(coef)
    return out


def reduce_form(f: HomogeneousForm, p: int, root_choice: int = 0) -> HomogeneousForm:
    """Image of an exact characteristic-0 form in F_p coefficients."""
    from .scalar import ModularReduction

    red = ModularReduction(f.field, p, root_choice)
    return HomogeneousForm(
        f.num_vars, f.degree, {e: red(c) for e, c in f.terms.items()}, red.target
    )


def _field_rank(rows, field) -> int:
    """Rank of a small dense matrix by Gaussian elimination over the field."""
    m = [list(r) for r in rows]
    nr = len(m)
    nc = len(m[0]) if nr else 0
    rank = 0
    for col in range(nc):
        piv = None
        for r in range(rank, nr):
            if not field.is_zero(m[r][col]):
                if piv is None or _pivot_size(m[r][col]) < _pivot_size(m[piv][col]):
                    piv = r
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        inv = field.inv(m[rank][col])
        for r in range(rank + 1, nr):
            if field.is_zero(m[r][col]):
                continue
            factor = m[r][col] * inv
            for cidx in range(col, nc):
                m[r][cidx] = m[r][cidx] - factor * m[rank][cidx]
        rank += 1
        if rank == nr:
            break
    return rank


def _pivot_size(x):
    if isinstance(x, Fraction):
        return abs(x.numerator).bit_length() + x.denominator.bit_length()
    if isinstance(x, float):
        return -abs(x)
    return 0


def _field_det(m, field):
    """Determinant over a field by elimination with partial pivoting."""
    m = [list(r) for r in m]
    n = len(m)
    det = field.one
    for col in range(n):
        piv = None
        for r in range(col, n):
            if not field.is_zero(m[r][col]):
                piv = r
                break
        if piv is None:
            return field.zero
        if piv != col:
            m[col], m[piv] = m[piv], m[col]
            det = -det
        det = det * m[col][col]
        inv = field.inv(m[col][col])
        for r in range(col + 1, n):
            if field.is_zero(m[r][col]):
                continue
            factor = m[r][col] * inv
            for c in range(col, n):
                m[r][c] = m[r][c] - factor * m[col][c]
    return det


def sylvester_resultant(f: HomogeneousForm, g: HomogeneousForm, var: int) -> HomogeneousForm:
    """Resultant of two forms with respect to one variable.

    Requires the forms to involve at most two variables besides `var` and
    nonzero leading coefficients in `var`.  The result is a homogeneous form
    in the remaining variables of degree deg(f)*deg(g), vanishing exactly at
    their common roots.
    """
    if f.is_zero() or g.is_zero():
        raise ZeroInput("resultant of a zero form")
    field = f.field
    nv = f.num_vars
    active = sorted(
        {i for e in list(f.terms) + list(g.terms) for i in range(nv) if e[i] and i != var}
    )
    if len(active) > 2:
        raise ValueError("resultant elimination supports at most two residual variables")
    df, dg = f.degree, g.degree
    lead_f = f.terms.get(tuple(df if i == var else 0 for i in range(nv)))
    lead_g = g.terms.get(tuple(dg if i == var else 0 for i in range(nv)))
    if lead_f is None or lead_g is None:
        raise ZeroInput("leading coefficient in the elimination variable vanishes")

    dres = df * dg

    def specialize(form, vals):
        """Coefficients of form as a univariate polynomial in `var` after
        substituting scalars for the residual variables."""
        coeffs = [field.zero] * (form.degree + 1)
        for exp, c in form.terms.items():
            v = c
            for i, e in enumerate(exp):
                if i == var or e == 0:
                    continue
                v = v * vals[i] ** e
            coeffs[exp[var]] = coeffs[exp[var]] + v
        return coeffs

    def sylv_det(vals):
        cf = specialize(f, vals)
        cg = specialize(g, vals)
        n = df + dg
        rows = []
        for shift in range(dg):
            row = [field.zero] * n
            for i, c in enumerate(reversed(cf)):
                row[shift + i] = c
            rows.append(row)
        for shift in range(df):
            row = [field.zero] * n
            for i, c in enumerate(reversed(cg)):
                row[shift + i] = c
            rows.append(row)
        return _field_det(rows, field)

    if not active:
        val = sylv_det([field.zero] * nv)
        return HomogeneousForm(nv, 0, {(0,) * nv: val}, field)

    if len(active) == 1:
        (u,) = active
        vals = [field.zero] * nv
        vals[u] = field.one
        c = sylv_det(vals)
        exp = tuple(dres if i == u else 0 for i in range(nv))
        return HomogeneousForm(nv, dres, {exp: c}, field)

    u, w = active
    # interpolate R(t, 1) at dres+1 sample values of t, then homogenize
    if field.tag == "prime" and field.p <= dres:
        raise ZeroInput(f"prime field too small to interpolate degree {dres}")
    samples = []
    for t in range(dres + 1):
        vals = [field.zero] * nv
        vals[u] = field.coerce(t)
        vals[w] = field.one
        samples.append((field.coerce(t), sylv_det(vals)))
    uni = _lagrange(samples, field)  # coefficients in t, low to high
    terms = {}
    for k, c in enumerate(uni):
        if field.is_zero(c):
            continue
        exp = [0] * nv
        exp[u] = k
        exp[w] = dres - k
        terms[tuple(exp)] = c
    return HomogeneousForm(nv, dres, terms, field)


def _lagrange(samples, field):
    """Coefficients (low to high) of the interpolating polynomial."""
    n = len(samples)
    coeffs = [field.zero] * n
    for i, (xi, yi) in enumerate(samples):
        # numerator polynomial prod_{j != i} (t - xj), built incrementally
        num = [field.one]
        denom = field.one
        for j, (xj, _) in enumerate(samples):
            if j == i:
                continue
            new = [field.zero] * (len(num) + 1)
            for k, c in enumerate(num):
                new[k] = new[k] - c * xj
                new[k + 1] = new[k + 1] + c
            num = new
            denom = denom * (xi - xj)
        scale = yi * field.inv(denom)
        for k, c in enumerate(num):
            coeffs[k] = coeffs[k] + c * scale
    return coeffs
