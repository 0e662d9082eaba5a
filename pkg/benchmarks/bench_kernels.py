"""Compare the numba kernels against the pure-numpy fallback.

Usage::

    python3 benchmarks/bench_kernels.py [--repeat 5] [--nm-iterations 2000]

Both kernel sets are called on identical inputs; results are checked to agree
before timing. Compilation happens in a warm-up call and is not timed.
"""

import argparse
import timeit

import numpy as np

from povmkit import _kernels as K
from povmkit import constructions as C
from povmkit.linalg import standard_hermitian_basis


def cases(nm_iterations):
    rng = np.random.default_rng(0)
    out = []
    for d, n, k in ((2, 4, 1), (3, 9, 1), (4, 8, 2), (5, 25, 1)):
        E = np.array(C.random_povm(d, n, k, seed=1).effects)
        R, _ = K.NUMPY_KERNELS["sqrt_psd"](E)
        basis = np.ascontiguousarray(standard_hermitian_basis(d).elements)
        x = rng.standard_normal(2 * n * d * k)
        tag = f"d={d} n={n} k={k}"
        out.append((f"sqrt_psd        {tag}", "sqrt_psd", (E,)))
        out.append((f"gram            {tag}", "gram", (R,)))
        out.append((f"superoperator   {tag}", "superoperator", (R, basis)))
        out.append((f"orthogonality   {tag}", "orthogonality_objective", (x, d, n, k)))
        out.append((f"disturbance     {tag}", "disturbance_objective", (x, d, n, k)))
    x0 = np.random.default_rng(2).standard_normal(2 * 3 * 2)
    out.append((f"nelder_mead     d=2 n=3 k=1 ({nm_iterations} it)", "nelder_mead", (0, x0, 2, 3, 1, nm_iterations, 1e-300, 1e-300)))
    return out


def first(value):
    return value[0] if isinstance(value, tuple) else value


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--nm-iterations", type=int, default=2000)
    args = ap.parse_args()
    if K.NUMBA_KERNELS is None:
        raise SystemExit("numba is not installed; nothing to compare")

    print(f"{'kernel':<44} {'numpy':>12} {'numba':>12} {'speedup':>8}")
    for label, name, call_args in cases(args.nm_iterations):
        f_np, f_nb = K.NUMPY_KERNELS[name], K.NUMBA_KERNELS[name]
        a, b = first(f_np(*call_args)), first(f_nb(*call_args))
        assert np.allclose(a, b, atol=1e-8), label
        number = 1 if name == "nelder_mead" else 200
        t_np = min(timeit.repeat(lambda: f_np(*call_args), number=number, repeat=args.repeat)) / number
        t_nb = min(timeit.repeat(lambda: f_nb(*call_args), number=number, repeat=args.repeat)) / number
        print(f"{label:<44} {t_np * 1e6:>10.1f}us {t_nb * 1e6:>10.1f}us {t_np / t_nb:>7.1f}x")


if __name__ == "__main__":
    main()
