#!/usr/bin/env python3
"""Micro-benchmarks for the hot kernels.

Default mode times whichever backend the package selected at import.
``--compare`` times the compiled and pure-numpy variants side by side
and reports the speedup; it degrades to a note when numba is absent.

Run from the repo root after an editable install:

    python3 benchmarks/bench_kernels.py --compare
"""

import argparse
import time

import numpy as np

from fr3ris import _kernels


def _complex(rng, shape):
    return rng.normal(size=shape) + 1j * rng.normal(size=shape)


def _cases(rng):
    k, n_ant, m, l = 8, 64, 2500, 3
    y = rng.normal(size=256) * 0.2
    a = _complex(rng, 4096)
    b = _complex(rng, 4096)
    h_tall = np.ascontiguousarray(_complex(rng, (m, n_ant)))
    x_tall = _complex(rng, m)
    h_direct = np.ascontiguousarray(_complex(rng, (k, n_ant)))
    cascades = np.ascontiguousarray(_complex(rng, (l, k, n_ant)))
    ris_of = np.array([0, 1, 2, -1, 0, 1, 2, -1], dtype=np.int64)
    directions = np.ascontiguousarray(
        h_direct / np.linalg.norm(h_direct, axis=1, keepdims=True))
    g = np.ascontiguousarray(rng.uniform(0.1, 2.0, size=(k, k)))
    sigma2 = rng.uniform(0.3, 1.0, size=k)
    rho_col = rng.uniform(0.0, 0.5, size=k)
    p0 = np.full(k, 0.1)

    return [
        ("project(256)", "project_capped_simplex",
         (y, 1.0), 2000),
        ("hermitian_dot(4096)", "hermitian_dot",
         (a, b), 2000),
        ("matvec_hermitian(2500x64)", "matvec_hermitian",
         (h_tall, x_tall), 200),
        ("gains(K=8,N=64)", "gains",
         (h_direct, cascades, ris_of, directions), 500),
        ("solve_inner(K=8)", "solve_inner",
         (g, sigma2, rho_col, p0, 1.0, 1e-10, 500, 1e-4, 0.5), 50),
    ]


def _time(fn, args, inner, repeats=5):
    fn(*args)  # warm-up covers jit compilation
    best = np.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        for _ in range(inner):
            fn(*args)
        best = min(best, (time.perf_counter() - t0) / inner)
    return best


def _fmt(seconds):
    if seconds < 1e-6:
        return f"{seconds * 1e9:8.1f} ns"
    if seconds < 1e-3:
        return f"{seconds * 1e6:8.1f} us"
    return f"{seconds * 1e3:8.2f} ms"


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--compare", action="store_true",
                        help="time numba and numpy variants side by side")
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args()

    rng = np.random.default_rng(7)
    cases = _cases(rng)

    if not args.compare:
        print(f"active backend: {_kernels.backend()}")
        for label, name, call_args, inner in cases:
            fn = getattr(_kernels, name)
            t = _time(fn, call_args, inner, args.repeats)
            print(f"{label:<28} {_fmt(t)}")
        return

    if not _kernels.USE_NUMBA:
        print("numba backend unavailable (missing or disabled via "
              "FR3_NO_NUMBA); timing the numpy path only")
        for label, name, call_args, inner in cases:
            fn = getattr(_kernels, name + "_numpy")
            t = _time(fn, call_args, inner, args.repeats)
            print(f"{label:<28} numpy {_fmt(t)}")
        return

    print(f"{'kernel':<28} {'numpy':>12} {'numba':>12} {'speedup':>9}")
    for label, name, call_args, inner in cases:
        t_np = _time(getattr(_kernels, name + "_numpy"),
                     call_args, inner, args.repeats)
        t_nb = _time(getattr(_kernels, name + "_numba"),
                     call_args, inner, args.repeats)
        print(f"{label:<28} {_fmt(t_np)} {_fmt(t_nb)} {t_np / t_nb:8.1f}x")


if __name__ == "__main__":
    main()
