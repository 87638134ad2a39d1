"""Time the compiled kernels against the numpy fallback.

    python3 benchmarks/bench_kernels.py [--n 2000] [--p 0.05] [--reps 2048]
"""
import argparse
import time

import numpy as np

from qflimit import kernels
from qflimit.ensembles import EnsembleSpec, generate


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=2000)
    ap.add_argument("--p", type=float, default=0.05)
    ap.add_argument("--reps", type=int, default=2048)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()

    g = generate(EnsembleSpec("er", {"n": args.n, "p": args.p}, seed=1))
    X = np.random.default_rng(0).standard_normal((args.reps, g.n))
    indptr, indices = g.upper_csr
    print(f"graph n={g.n} |E|={g.edge_count}, {args.reps} replications")
    print(f"{'backend':<8} {'edge_quadratic':>15} {'codegree_sums':>15}")
    ref = None
    for name, (eq, cs) in kernels.backends().items():
        t_eq, out = best_of(lambda: eq(X, indptr, indices), args.repeat)
        t_cs, _ = best_of(lambda: cs(*g.csr, g.n), args.repeat)
        if ref is None:
            ref = out
        else:
            assert np.allclose(out, ref, rtol=1e-10), "backends disagree"
        print(f"{name:<8} {t_eq * 1e3:>12.2f} ms {t_cs * 1e3:>12.2f} ms")
    if "cython" not in kernels.backends():
        print("compiled extension not built; only the fallback was timed")


if __name__ == "__main__":
    main()
