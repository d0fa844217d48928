"""Pure-numpy reference implementations of the hot kernels.

Semantics here define the contract; the numba variants must agree bit for
bit on the integer kernel and to float tolerance on the numeric one.
"""
import numpy as np


def enumerate_common_zeros(p, N, exps, coefs, offsets, max_out):
    """All points of P^N(F_p) where every listed form vanishes.

    Forms are concatenated: exps is (total_terms, N+1) int64, coefs is
    (total_terms,) int64 residues, offsets has num_forms+1 entries.  Points
    are swept chart by chart (first nonzero coordinate = 1), so output order
    is deterministic.  Returns (points, count); count = -1 signals overflow
    of the max_out buffer.
    """
    nv = N + 1
    maxdeg = int(exps.max()) if exps.size else 0
    # pow_table[v, e] = v**e mod p
    pow_table = np.ones((p, maxdeg + 1), dtype=np.int64)
    for e in range(1, maxdeg + 1):
        pow_table[:, e] = pow_table[:, e - 1] * np.arange(p, dtype=np.int64) % p

    out = np.zeros((max_out, nv), dtype=np.int64)
    count = 0
    num_forms = len(offsets) - 1
    for chart in range(nv):
        free = nv - 1 - chart
        npts = p**free
        pts = np.zeros((npts, nv), dtype=np.int64)
        pts[:, chart] = 1
        idx = np.arange(npts, dtype=np.int64)
        for j in range(free):
            # last free coordinate varies fastest
            pts[:, chart + 1 + j] = (idx // p ** (free - 1 - j)) % p
        ok = np.ones(npts, dtype=bool)
        for fi in range(num_forms):
            lo, hi = offsets[fi], offsets[fi + 1]
            vals = np.zeros(npts, dtype=np.int64)
            for t in range(lo, hi):
                term = np.full(npts, coefs[t], dtype=np.int64)
                for v in range(nv):
                    e = exps[t, v]
                    if e:
                        term = term * pow_table[pts[:, v], e] % p
                vals = (vals + term) % p
            ok &= vals == 0
            if not ok.any():
                break
        hits = pts[ok]
        if count + len(hits) > max_out:
            return out, -1
        out[count : count + len(hits)] = hits
        count += len(hits)
    return out, count


def _eval_forms(coords, exps, coefs, offsets):
    """Evaluate each concatenated float form at every row of coords.

    Returns (num_points, num_forms).
    """
    npts, nv = coords.shape
    maxdeg = int(exps.max()) if exps.size else 0
    powers = np.ones((npts, nv, maxdeg + 1))
    for e in range(1, maxdeg + 1):
        powers[:, :, e] = powers[:, :, e - 1] * coords
    num_forms = len(offsets) - 1
    vals = np.zeros((npts, num_forms))
    for fi in range(num_forms):
        for t in range(offsets[fi], offsets[fi + 1]):
            term = np.full(npts, coefs[t])
            for v in range(nv):
                e = exps[t, v]
                if e:
                    term = term * powers[:, v, e]
            vals[:, fi] += term
    return vals


def gauss_newton_multistart(starts, g_exps, g_coefs, g_off, h_exps, h_coefs, h_off,
                            max_iter, tol):
    """Drive each start toward a common zero of the gradient system.

    g_* encode the nv first partials, h_* the nv*nv second partials (row
    major).  Each iterate is renormalized to the unit sphere; the projective
    normalization enters the step as an extra row x^T (keeps the step
    tangent).  Returns (endpoints, residual norms); non-converged starts
    keep residual > tol.
    """
    x = starts.copy()
    npts, nv = x.shape
    norms = np.linalg.norm(x, axis=1, keepdims=True)
    x /= norms
    for _ in range(max_iter):
        grad = _eval_forms(x, g_exps, g_coefs, g_off)
        res = np.linalg.norm(grad, axis=1)
        active = res > tol * 0.01
        if not active.any():
            break
        hess = _eval_forms(x[active], h_exps, h_coefs, h_off).reshape(-1, nv, nv)
        # augmented square system: [H; x^T] delta = [-grad; 0]
        A = np.concatenate([hess, x[active][:, None, :]], axis=1)
        b = np.concatenate([-grad[active], np.zeros((active.sum(), 1))], axis=1)
        AtA = np.einsum("pij,pik->pjk", A, A)
        Atb = np.einsum("pij,pi->pj", A, b)
        AtA += 1e-14 * np.eye(nv)
        try:
            delta = np.linalg.solve(AtA, Atb[..., None])[..., 0]
        except np.linalg.LinAlgError:
            delta = np.stack([np.linalg.lstsq(m, v, rcond=None)[0]
                              for m, v in zip(AtA, Atb)])
        step = np.zeros_like(x)
        step[active] = delta
        # damp huge steps; keeps divergent starts from producing NaNs
        lens = np.linalg.norm(step, axis=1, keepdims=True)
        step = np.where(lens > 1.0, step / np.maximum(lens, 1e-300), step)
        x = x + step
        x /= np.linalg.norm(x, axis=1, keepdims=True)
    grad = _eval_forms(x, g_exps, g_coefs, g_off)
    return x, np.linalg.norm(grad, axis=1)
