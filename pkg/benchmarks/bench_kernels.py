"""Compare the compiled and pure-numpy kernel implementations.

Run as: python benchmarks/bench_kernels.py
"""
import time

import numpy as np

from qfactor._kernels import _numba, _numpy
from qfactor.polyform import HomogeneousForm
from qfactor.pointgeom import _pack_float_forms, _pack_forms
from qfactor.scalar import FieldSpec


def bench_enumeration():
    # Burkhardt quartic plus its partials over F_31: full sweep of P^4(F_31)
    field = FieldSpec.prime(31)
    B = HomogeneousForm(
        5, 4,
        {(0, 0, 0, 0, 4): 1, (3, 0, 0, 0, 1): -1, (0, 3, 0, 0, 1): -1,
         (0, 0, 3, 0, 1): -1, (0, 0, 0, 3, 1): -1, (1, 1, 1, 1, 0): 3},
        field,
    )
    forms = [B] + B.partials()
    exps, coefs, offsets = _pack_forms(forms, 31)
    results = {}
    for name, mod in (("numba", _numba), ("numpy", _numpy)):
        mod.enumerate_common_zeros(31, 4, exps, coefs, offsets, 1000)  # warm up jit
        t0 = time.perf_counter()
        pts, count = mod.enumerate_common_zeros(31, 4, exps, coefs, offsets, 1000)
        dt = time.perf_counter() - t0
        results[name] = (count, dt)
        print(f"enumerate[{name}]: {count} zeros in {dt:.3f}s")
    assert results["numba"][0] == results["numpy"][0] == 45
    return results


def bench_gauss_newton(num_starts=4000):
    field = FieldSpec.approx()
    tau = (1 + 5**0.5) / 2

    def sq(i, c):
        e = [0] * 4
        e[i] = 2
        return tuple(e), c

    q = lambda i, j: HomogeneousForm(4, 2, dict([sq(i, tau * tau), sq(j, -1.0)]), field)
    sphere = HomogeneousForm(
        4, 2, dict([sq(0, 1.0), sq(1, 1.0), sq(2, 1.0), sq(3, -1.0)]), field
    )
    w2 = HomogeneousForm(4, 2, {(0, 0, 0, 2): 1.0}, field)
    barth = (q(0, 1) * q(1, 2) * q(2, 0)) * 4.0 + (w2 * sphere * sphere).scale(
        -(1 + 2 * tau)
    )
    grads = barth.partials()
    hess = [g.partial(j) for g in grads for j in range(4)]
    ge, gc, go = _pack_float_forms(grads)
    he, hc, ho = _pack_float_forms(hess)
    rng = np.random.default_rng(0xB4)
    starts = rng.normal(size=(num_starts, 4))
    for name, mod in (("numba", _numba), ("numpy", _numpy)):
        mod.gauss_newton_multistart(starts[:8], ge, gc, go, he, hc, ho, 80, 1e-7)
        t0 = time.perf_counter()
        ends, res = mod.gauss_newton_multistart(starts, ge, gc, go, he, hc, ho, 80, 1e-7)
        dt = time.perf_counter() - t0
        conv = int((res < 1e-5).sum())
        print(f"gauss_newton[{name}]: {conv}/{num_starts} converged in {dt:.3f}s")


if __name__ == "__main__":
    bench_enumeration()
    bench_gauss_newton()
