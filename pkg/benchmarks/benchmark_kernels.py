"""Compare the compiled kernels against the pure-numpy fallback.

Times the two hot kernels — Sturm-bisection eigenvalues and renormalized
2x2 chain products — on representative problem sizes and checks that both
backends agree to float accuracy.

Run with: python3 benchmarks/benchmark_kernels.py
"""

import time

import numpy as np

from blockspec import _kernels_py
from blockspec.kernels import KERNEL_BACKEND

try:
    from blockspec import _kernels

    BACKENDS = {"cython": _kernels, "python": _kernels_py}
except ImportError:
    BACKENDS = {"python": _kernels_py}


def _time(fn, repeats: int) -> float:
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def bench_bisect(n: int, repeats: int = 3) -> None:
    rng = np.random.Generator(np.random.Philox(0))
    diag = rng.uniform(0.5, 2.0, n)
    off = -rng.uniform(0.1, 1.0, n - 1)
    results = {}
    times = {}
    for name, mod in BACKENDS.items():
        times[name] = _time(lambda m=mod: m.bisect_eigenvalues(diag, off, 1e-12), repeats)
        results[name] = np.asarray(BACKENDS[name].bisect_eigenvalues(diag, off, 1e-12))
    _print_row(f"bisect_eigenvalues n={n}", times)
    if len(results) == 2:
        diff = np.abs(results["cython"] - results["python"]).max()
        assert diff <= 1e-11, f"backend mismatch: {diff:.2e}"


def bench_product(n: int, repeats: int = 3) -> None:
    rng = np.random.Generator(np.random.Philox(1))
    mats = rng.standard_normal((n, 2, 2)) + 2.0 * np.eye(2)
    results = {}
    times = {}
    for name, mod in BACKENDS.items():
        times[name] = _time(lambda m=mod: m.product_renorm(mats), repeats)
        acc, log_scale = BACKENDS[name].product_renorm(mats)
        results[name] = (np.asarray(acc), log_scale)
    _print_row(f"product_renorm    n={n}", times)
    if len(results) == 2:
        diff = np.abs(results["cython"][0] - results["python"][0]).max()
        rel = abs(results["cython"][1] - results["python"][1]) / max(
            1.0, abs(results["python"][1])
        )
        assert diff <= 1e-10 and rel <= 1e-12, f"backend mismatch: {diff:.2e} {rel:.2e}"


def _print_row(label: str, times: dict) -> None:
    parts = [f"{name} {t * 1e3:9.3f} ms" for name, t in times.items()]
    if len(times) == 2:
        parts.append(f"speedup {times['python'] / times['cython']:6.1f}x")
    print(f"{label:28s} " + "   ".join(parts))


def main() -> None:
    print(f"active backend: {KERNEL_BACKEND}; available: {', '.join(BACKENDS)}")
    for n in (100, 1000, 5000):
        bench_bisect(n)
    for n in (1000, 10000, 100000):
        bench_product(n)


if __name__ == "__main__":
    main()
