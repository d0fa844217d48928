"""Numba-compiled variants of the hot kernels.

Same contracts as _numpy; see that module for the documented semantics.
"""
import numpy as np
from numba import njit


@njit(cache=True)
def enumerate_common_zeros(p, N, exps, coefs, offsets, max_out):
    nv = N + 1
    maxdeg = 0
    for t in range(exps.shape[0]):
        for v in range(nv):
            if exps[t, v] > maxdeg:
                maxdeg = exps[t, v]
    pow_table = np.ones((p, maxdeg + 1), dtype=np.int64)
    for v in range(p):
        for e in range(1, maxdeg + 1):
            pow_table[v, e] = pow_table[v, e - 1] * v % p

    out = np.zeros((max_out, nv), dtype=np.int64)
    count = 0
    num_forms = offsets.shape[0] - 1
    pt = np.zeros(nv, dtype=np.int64)
    for chart in range(nv):
        free = nv - 1 - chart
        npts = 1
        for _ in range(free):
            npts *= p
        for idx in range(npts):
            for v in range(chart):
                pt[v] = 0
            pt[chart] = 1
            rem = idx
            for j in range(free - 1, -1, -1):
                pt[chart + 1 + j] = rem % p
                rem //= p
            good = True
            for fi in range(num_forms):
                val = 0
                for t in range(offsets[fi], offsets[fi + 1]):
                    term = coefs[t]
                    for v in range(nv):
                        e = exps[t, v]
                        if e:
                            term = term * pow_table[pt[v], e] % p
                    val = (val + term) % p
                if val != 0:
                    good = False
                    break
            if good:
                if count >= max_out:
                    return out, -1
                for v in range(nv):
                    out[count, v] = pt[v]
                count += 1
    return out, count


@njit(cache=True)
def _eval_forms_at(x, exps, coefs, offsets, out):
    nv = x.shape[0]
    for fi in range(offsets.shape[0] - 1):
        val = 0.0
        for t in range(offsets[fi], offsets[fi + 1]):
            term = coefs[t]
            for v in range(nv):
                e = exps[t, v]
                for _ in range(e):
                    term *= x[v]
            val += term
        out[fi] = val


@njit(cache=True)
def gauss_newton_multistart(starts, g_exps, g_coefs, g_off, h_exps, h_coefs, h_off,
                            max_iter, tol):
    npts, nv = starts.shape
    endpoints = np.empty((npts, nv))
    residuals = np.empty(npts)
    grad = np.empty(nv)
    hess = np.empty(nv * nv)
    A = np.empty((nv + 1, nv))
    b = np.empty(nv + 1)
    for s in range(npts):
        x = starts[s].copy()
        x /= np.sqrt(np.sum(x * x))
        for _ in range(max_iter):
            _eval_forms_at(x, g_exps, g_coefs, g_off, grad)
            rn = np.sqrt(np.sum(grad * grad))
            if rn <= tol * 0.01:
                break
            _eval_forms_at(x, h_exps, h_coefs, h_off, hess)
            for i in range(nv):
                for j in range(nv):
                    A[i, j] = hess[i * nv + j]
                b[i] = -grad[i]
            for j in range(nv):
                A[nv, j] = x[j]
            b[nv] = 0.0
            AtA = A.T @ A + 1e-14 * np.eye(nv)
            Atb = A.T @ b
            delta = np.linalg.solve(AtA, Atb)
            dn = np.sqrt(np.sum(delta * delta))
            if dn > 1.0:
                delta /= dn
            x = x + delta
            x /= np.sqrt(np.sum(x * x))
        _eval_forms_at(x, g_exps, g_coefs, g_off, grad)
        endpoints[s] = x
        residuals[s] = np.sqrt(np.sum(grad * grad))
    return endpoints, residuals
