"""Timing comparison of the numba kernels against the numpy fallbacks.

Runs each kernel over a pre-generated batch of inputs, repeats the batch to
get a mean and spread, and prints per-call times with the speedup. The numba
twins are called directly, so results do not depend on ENTCONV_BACKEND.

    python3 benchmarks/bench_kernels.py [--batch N] [--repeats N]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from entconv import kernels


def _batch_inputs(batch: int, seed: int):
    rng = np.random.default_rng(seed)
    hermitians = []
    kraus_stacks = []
    small_pairs = []
    generals = []
    for _ in range(batch):
        g = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        hermitians.append(np.ascontiguousarray(g + g.conj().T))
        generals.append(np.ascontiguousarray(g))
        estack = (rng.normal(size=(8, 4, 4)) + 1j * rng.normal(size=(8, 4, 4))) / 4.0
        kraus_stacks.append(np.ascontiguousarray(estack))
        a = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        b = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        small_pairs.append((np.ascontiguousarray(a), np.ascontiguousarray(b)))
    rho = np.eye(4, dtype=np.complex128) / 4.0
    return {
        "hermitian_eigh": [(h,) for h in hermitians],
        "kron2": small_pairs,
        "apply_kraus": [(e, rho) for e in kraus_stacks],
        "kraus_gram": [(e,) for e in kraus_stacks],
        "partial_transpose": [(m, 1) for m in generals],
        "partial_trace": [(m, 0) for m in generals],
        "singular_values": [(m,) for m in generals],
    }


def _time_batch(fn, calls, repeats: int):
    fn(*calls[0])  # warm any lazy path before timing
    per_call = []
    for _ in range(repeats):
        start = time.perf_counter()
        for args in calls:
            fn(*args)
        per_call.append((time.perf_counter() - start) / len(calls))
    return np.mean(per_call), np.std(per_call)


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--batch", type=int, default=2000, help="inputs per kernel")
    parser.add_argument("--repeats", type=int, default=7, help="timed passes per kernel")
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    print("=" * 60)
    print("entconv kernel backends")
    print("=" * 60)
    if not kernels.NUMBA_AVAILABLE:
        print("numba is not importable here; nothing to compare.")
        return 0
    kernels.warmup()

    inputs = _batch_inputs(args.batch, args.seed)
    header = f"{'kernel':<20} {'numpy':>14} {'numba':>14} {'speedup':>9}"
    print(header)
    print("-" * len(header))
    for name, calls in inputs.items():
        numpy_fn = getattr(kernels, f"{name}_numpy")
        numba_fn = getattr(kernels, f"{name}_numba")
        np_mean, np_std = _time_batch(numpy_fn, calls, args.repeats)
        nb_mean, nb_std = _time_batch(numba_fn, calls, args.repeats)
        print(
            f"{name:<20} {np_mean * 1e6:>8.2f} {chr(177)}{np_std * 1e6:<4.2f} "
            f"{nb_mean * 1e6:>8.2f} {chr(177)}{nb_std * 1e6:<4.2f} "
            f"{np_mean / nb_mean:>8.2f}x"
        )
    print("-" * len(header))
    print(f"per-call means over {args.repeats} passes of {args.batch} inputs, in microseconds")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
