"""Linear conditions imposed by point sets on degree-d forms.

The central object is the evaluation matrix (rows = points, columns =
degree-d monomials).  Full row rank means the points impose independent
conditions; the defect is |S| - rank.
"""
from __future__ import annotations

from dataclasses import dataclass, field as dc_field

import numpy as np

from .errors import FieldMismatch, PointNotOnDivisor
from .polyform import HomogeneousForm, monomial_basis
from .pointgeom import PointSet, ProjectivePoint, _kernel_basis
from .scalar import FieldSpec, ModularReduction

# primes just above 2^20, used by the cross-check mode
_CROSSCHECK_PRIMES = (1048583, 1048589, 1048601)


class EvaluationMatrix:
    """|S| x C(N+d, N) matrix of monomial values at the points of S."""

    def __init__(self, S: PointSet, d: int):
        if d < 0:
            raise ValueError("degree must be non-negative")
        self.N = S.ambient
        self.d = d
        self.size = len(S)
        self.field = S.field if len(S) else FieldSpec.rational()
        self.basis = monomial_basis(self.N, d)
        self.rows = []
        for P in S:
            row = []
            for exp in self.basis:
                v = self.field.one
                for c, e in zip(P.coords, exp):
                    if e:
                        v = v * c**e
                row.append(v)
            self.rows.append(row)
        self._rank = None
        self.sv_profile = None

    def rank(self) -> int:
        if self._rank is None:
            if self.size == 0:
                self._rank = 0
            elif self.field.tag == "prime":
                self._rank = _rank_mod_p(self.rows, self.field.p)
            elif self.field.tag == "approx":
                a = np.array([[float(x) for x in r] for r in self.rows])
                sv = np.linalg.svd(a, compute_uv=False)
                self.sv_profile = [float(s) for s in sv]
                self._rank = (
                    int(np.sum(sv > self.field.eps * sv[0])) if sv.size and sv[0] else 0
                )
            else:
                self._rank = _rank_bareiss(self.rows, self.field)
        return self._rank

    def rank_mod_primes(self, primes=_CROSSCHECK_PRIMES):
        """Rank of the reduction mod several primes; the max is the true
        characteristic-0 rank unless every prime is unlucky."""
        out = {}
        for p in primes:
            red = ModularReduction(self.field, p)
            rows = [[red(x).residue for x in r] for r in self.rows]
            out[p] = _rank_mod_p(rows, p)
        return out


def _rank_mod_p(rows, p: int) -> int:
    if isinstance(rows, np.ndarray):
        a = rows % p
    else:
        a = np.array(
            [[x.residue if hasattr(x, "residue") else int(x) % p for x in r] for r in rows],
            dtype=np.int64,
        )
    nr, nc = a.shape
    rank = 0
    for col in range(nc):
        piv = None
        for r in range(rank, nr):
            if a[r, col] % p:
                piv = r
                break
        if piv is None:
            continue
        a[[rank, piv]] = a[[piv, rank]]
        inv = pow(int(a[rank, col]), p - 2, p)
        a[rank] = a[rank] * inv % p
        below = a[rank + 1:, col] % p != 0
        if below.any():
            factors = a[rank + 1:, col][below]
            a[rank + 1:][below] = (a[rank + 1:][below] - factors[:, None] * a[rank]) % p
        rank += 1
        if rank == nr:
            break
    return rank


def _rank_bareiss(rows, fspec: FieldSpec) -> int:
    """Fraction-free (Bareiss) elimination; exact for rational and quadratic
    entries, division by the previous pivot stays in the ring."""
    m = [list(r) for r in rows]
    nr, nc = len(m), len(m[0])
    rank = 0
    prev = fspec.one
    col = 0
    while rank < nr and col < nc:
        piv = None
        for r in range(rank, nr):
            if not fspec.is_zero(m[r][col]):
                piv = r
                break
        if piv is None:
            col += 1
            continue
        m[rank], m[piv] = m[piv], m[rank]
        pivot = m[rank][col]
        for r in range(rank + 1, nr):
            for c in range(col + 1, nc):
                m[r][c] = (pivot * m[r][c] - m[r][col] * m[rank][c]) / prev
            m[r][col] = fspec.zero
        prev = pivot
        rank += 1
        col += 1
    return rank


@dataclass
class DefectReport:
    degree: int
    set_size: int
    rank: int
    backend: FieldSpec
    sv_profile: list | None = None
    note: str = ""
    context: dict = dc_field(default_factory=dict)

    @property
    def defect(self) -> int:
        return self.set_size - self.rank

    @property
    def independent(self) -> bool:
        return self.defect == 0

    def to_json(self) -> dict:
        out = {
            "degree": self.degree,
            "points": self.set_size,
            "rank": self.rank,
            "defect": self.defect,
            "independent": self.independent,
            "backend": self.backend.to_json(),
        }
        if self.sv_profile is not None:
            out["sv_profile"] = self.sv_profile
        if self.note:
            out["note"] = self.note
        if self.context:
            out["context"] = self.context
        return out


def evaluation_matrix(S: PointSet, d: int) -> EvaluationMatrix:
    return EvaluationMatrix(S, d)


def defect(S: PointSet, d: int, cross_check: bool = False) -> DefectReport:
    M = EvaluationMatrix(S, d)
    r = M.rank()
    note = ""
    if cross_check and M.field.tag in ("rational", "quadratic"):
        per_prime = M.rank_mod_primes()
        best = max(per_prime.values())
        if best != r:
            note = f"rank mismatch across primes: exact {r}, mod-p {per_prime}"
        r = max(r, best)
    rep = DefectReport(d, M.size, r, M.field, sv_profile=M.sv_profile, note=note)
    return rep


def imposes_independent(S: PointSet, d: int) -> bool:
    return defect(S, d).independent


def defect_mod_primes(S: PointSet, d: int, primes=_CROSSCHECK_PRIMES) -> DefectReport:
    """Defect of characteristic-0 points computed through reduction mod
    several primes, taking the best rank.

    Full rank mod any prime proves independence over the original field; a
    rank drop at every listed prime is overwhelming evidence of a genuine
    drop but not a proof, and the report says so.  Matrix rows are built
    with vectorized modular arithmetic, so this scales to the large column
    counts where exact elimination is hopeless.
    """
    if S.field.tag not in ("rational", "quadratic"):
        raise FieldMismatch("mod-p defect needs exact characteristic-0 points")
    basis = monomial_basis(S.ambient, d)
    exps = np.array(basis, dtype=np.int64)
    maxdeg = int(exps.max()) if exps.size else 0
    ranks = {}
    for p in primes:
        try:
            red = ModularReduction(S.field, p)
            coords = np.array(
                [[red(c).residue for c in P.coords] for P in S], dtype=np.int64
            )
        except Exception:
            continue  # bad prime for this data; try the next
        npts, nv = coords.shape
        powers = np.ones((npts, nv, maxdeg + 1), dtype=np.int64)
        for e in range(1, maxdeg + 1):
            powers[:, :, e] = powers[:, :, e - 1] * coords % p
        mat = np.ones((npts, len(basis)), dtype=np.int64)
        for j, exp in enumerate(basis):
            col = np.ones(npts, dtype=np.int64)
            for v, e in enumerate(exp):
                if e:
                    col = col * powers[:, v, e] % p
            mat[:, j] = col
        ranks[p] = _rank_mod_p(mat, p)
    if not ranks:
        raise FieldMismatch("no usable prime for modular reduction")
    r = max(ranks.values())
    note = "independence proven mod p" if r == len(S) else \
        f"rank drop observed mod all of {sorted(ranks)}; probabilistic for char 0"
    return DefectReport(d, len(S), r, S.field, note=note,
                        context={"ranks_mod_p": {str(p): v for p, v in ranks.items()}})


def separating_form(S: PointSet, P: ProjectivePoint, d: int) -> HomogeneousForm | None:
    """A degree-d form vanishing on S minus P and nonzero at P, or None.

    Exists iff removing P drops the rank, i.e. iff P's condition is
    independent of the others at this degree.
    """
    rest = S.without(P)
    basis = monomial_basis(S.ambient, d)
    fspec = S.field

    # monomial values at P
    pvals = []
    for exp in basis:
        v = fspec.one
        for c, e in zip(P.coords, exp):
            if e:
                v = v * c**e
        pvals.append(v)

    M = EvaluationMatrix(rest, d)
    if len(rest) == 0:
        null = [[fspec.one if i == j else fspec.zero for i in range(len(basis))]
                for j in range(len(basis))]
    elif fspec.tag == "approx":
        a = np.array([[float(x) for x in r] for r in M.rows])
        _, sv, vt = np.linalg.svd(a)
        thresh = fspec.eps * sv[0] if sv.size and sv[0] else 0.0
        r = int(np.sum(sv > thresh))
        null = [list(map(float, vt[i])) for i in range(r, vt.shape[0])]
    else:
        null = _kernel_basis(M.rows, fspec)

    best = None
    for vec in null:
        val = sum((a * b for a, b in zip(vec, pvals)), start=fspec.zero)
        if not fspec.is_zero(val):
            best = vec
            break
    if best is None:
        return None
    terms = {exp: c for exp, c in zip(basis, best)}
    return HomogeneousForm(S.ambient + 1, d, terms, fspec)


def restricted_conditions(S: PointSet, divisor: HomogeneousForm, d: int) -> DefectReport:
    """Same ranks as defect(S, d): forms in the ideal of the divisor vanish on
    S, so evaluation factors through restriction.  The operation asserts the
    membership precondition and records the restriction context."""
    fspec = S.field
    for P in S:
        if not fspec.is_zero(divisor.evaluate(P.coords)):
            raise PointNotOnDivisor(f"{P} is not on the divisor")
    rep = defect(S, d)
    rep.context = {"restricted_to_degree": divisor.degree}
    return rep
