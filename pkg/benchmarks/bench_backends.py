"""Compare the compiled tableau kernels against the NumPy fallback.

Run from the repo root after an editable install:

    python benchmarks/bench_backends.py
"""

import time

import numpy as np

from rgsim.netsim import ChainConfig, run_trial
from rgsim.tableau import Tableau, new_tableau


def available_backends():
    names = []
    try:
        import rgsim._tabkernel  # noqa: F401

        names.append("cython")
    except ImportError:
        pass
    names.append("python")
    return names


def bench_gates(backend, n=256, reps=4000):
    t = new_tableau(n, backend=backend)
    rng = np.random.default_rng(0)
    pairs = rng.integers(0, n, size=(reps, 2))
    t0 = time.perf_counter()
    for a, b in pairs:
        a, b = int(a), int(b)
        t.h(a)
        if a != b:
            t.cz(a, b)
            t.cnot(b, a)
    return (time.perf_counter() - t0) / reps * 1e6


def bench_measure(backend, n=256, reps=30):
    rng = np.random.default_rng(1)
    t0 = 0.0
    for _ in range(reps):
        t = new_tableau(n, backend=backend)
        for q in range(n):
            t.h(q)
        for q in range(n - 1):
            t.cz(q, q + 1)
        start = time.perf_counter()
        for q in range(n):
            t.measure("Z", q, rng)
        t0 += time.perf_counter() - start
    return t0 / (reps * n) * 1e6


def bench_trials(backend, n_trials=60):
    cfg = ChainConfig(hops=1, arms=2, branching=(2, 2), p_survive=0.95)
    import rgsim.netsim as netsim
    import rgsim.tableau as tableau

    kernels = tableau._load_kernels(backend)
    original = tableau._DEFAULT_KERNELS
    tableau._DEFAULT_KERNELS = kernels
    try:
        run_trial(cfg, 0, 0)  # warm the blueprint cache
        t0 = time.perf_counter()
        for tid in range(n_trials):
            run_trial(cfg, trial_id=tid, seed=1)
        return (time.perf_counter() - t0) / n_trials * 1e3
    finally:
        tableau._DEFAULT_KERNELS = original


def main():
    backends = available_backends()
    print(f"{'benchmark':<28}" + "".join(f"{b:>14}" for b in backends))
    rows = [
        ("gate op (us)", bench_gates),
        ("Z measurement (us)", bench_measure),
        ("full chain trial (ms)", bench_trials),
    ]
    for label, fn in rows:
        values = [fn(b) for b in backends]
        print(f"{label:<28}" + "".join(f"{v:>14.2f}" for v in values))
    if len(backends) == 2:
        print("\nspeedup (python / cython):")
        for label, fn in rows:
            c, p = fn("cython"), fn("python")
            print(f"  {label:<26} {p / c:>6.1f}x")


if __name__ == "__main__":
    main()
