"""Timing comparison of the compiled and NumPy kernel backends.

Run as a script:

    python benchmarks/bench_kernels.py

Each hot loop is exercised through its public physics entry point
(capacitance series, Lifshitz pressure) and directly, for both backends,
with agreement checked alongside the timings.
"""
import time

import numpy as np

from fomlab import casimir, electrostatics as es
from fomlab import kernels


def _time(fn, repeat=5):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench_capacitance():
    geoms = [es.SpherePlateGeometry(x * 40e-6, 40e-6)
             for x in np.geomspace(2e-4, 1.0, 40)]

    def work():
        return [es.cdoubleprime_exact(g) for g in geoms]

    return "capacitance series (40 geometries)", work


def bench_lifshitz():
    stack = casimir.gold_air_stack()
    seps = np.geomspace(50e-9, 1e-6, 12)

    def work():
        return [casimir.lifshitz_pressure(stack, d) for d in seps]

    return "Lifshitz pressure (12 separations)", work


def main():
    results = {}
    print(f"default backend: {kernels.BACKEND}")
    for name, work in (bench_capacitance(), bench_lifshitz()):
        vals = {}
        for backend in ("cython", "numpy"):
            try:
                kernels.set_backend(backend)
            except RuntimeError:
                print(f"{name}: {backend} backend unavailable")
                continue
            vals[backend] = np.asarray(work())
            results[(name, backend)] = _time(work)
        if len(vals) == 2:
            rel = np.max(np.abs(vals["cython"] / vals["numpy"] - 1.0))
            print(f"{name}: backend agreement {rel:.2e}")
    kernels.set_backend("cython" if kernels._HAVE_C else "numpy")
    print()
    print(f"{'benchmark':<42}{'cython':>10}{'numpy':>10}{'speedup':>9}")
    names = sorted({n for n, _b in results})
    for n in names:
        tc = results.get((n, "cython"))
        tn = results.get((n, "numpy"))
        row = f"{n:<42}"
        row += f"{tc * 1e3:>8.1f}ms" if tc else f"{'-':>10}"
        row += f"{tn * 1e3:>8.1f}ms" if tn else f"{'-':>10}"
        if tc and tn:
            row += f"{tn / tc:>8.1f}x"
        print(row)


if __name__ == "__main__":
    main()
