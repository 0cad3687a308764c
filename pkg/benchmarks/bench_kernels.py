"""Compare the compiled and pure-Python kernels.

    python3 benchmarks/bench_kernels.py [--repeat N]

Times raw kernel calls on random term maps and three end-to-end workloads:
the so(3) master equation, a batch of Schouten brackets, and the ternary
antibrackets of the so(3) Koszul-Brylinski operator.
"""

from __future__ import annotations

import argparse
import random
import time
from itertools import combinations_with_replacement

from homkir import _kernels
from homkir.brackets import schouten
from homkir.bv import AntibracketEvaluator
from homkir.kirillov import kirillov_chart
from homkir.lie import build_cocycle_jacobi, so3
from homkir.operators import antitangent_chart, koszul_brylinski, spanning_monomials
from homkir.sampling import random_poly


def _timeit(fn, repeat: int) -> float:
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def workloads():
    rng = random.Random(7)
    ch = kirillov_chart(3, 2)
    polys = [random_poly(ch, rng, max_degree=4, max_terms=8, negative=1) for _ in range(40)]
    raw = [(p.terms, q.terms) for p, q in zip(polys, polys[1:])]
    odd = ch.odd
    pos = ch.position("xi1")

    def kernel_mul():
        for a, b in raw:
            _kernels.mul_terms(a, b, odd)

    def kernel_partial():
        for a, _ in raw:
            _kernels.partial_terms(a, pos, True, odd)

    def master_so3():
        K = build_cocycle_jacobi(so3())
        schouten(K.P, K.P)

    def schouten_batch():
        for p, q in zip(polys, polys[1:]):
            schouten(p, q)

    K = build_cocycle_jacobi(so3())
    AT = antitangent_chart(K.chart)
    L = koszul_brylinski(K, AT)
    mons = spanning_monomials(AT, 2, negative=1)[:20]

    def antibrackets():
        ev = AntibracketEvaluator(L)
        for args in combinations_with_replacement(mons, 3):
            ev.bracket(list(args))

    return {"kernel mul_terms": kernel_mul, "kernel partial_terms": kernel_partial,
            "so(3) master equation": master_so3, "Schouten batch": schouten_batch,
            "ternary antibrackets": antibrackets}


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)
    if _kernels.compiled is None:
        print("compiled kernels unavailable; only the pure-Python backend is timed")
    backends = ["python"] + (["cython"] if _kernels.compiled is not None else [])
    results: dict[str, dict[str, float]] = {}
    previous = _kernels.BACKEND
    try:
        for b in backends:
            _kernels.use_backend(b)
            for name, fn in workloads().items():
                results.setdefault(name, {})[b] = _timeit(fn, args.repeat)
    finally:
        _kernels.use_backend(previous)
    print(f"{'workload':<26}" + "".join(f"{b:>12}" for b in backends) + "     speedup")
    for name, row in results.items():
        line = f"{name:<26}" + "".join(f"{row[b] * 1e3:>10.2f}ms" for b in backends)
        if "cython" in row:
            line += f"  {row['python'] / row['cython']:>8.2f}x"
        print(line)


if __name__ == "__main__":
    main()
