"""Compare the compiled and pure-Python counting kernels.

    python3 benchmarks/bench_kernels.py [--n 200] [--batch 200] [--repeat 3]

Prints one row per kernel with the best wall time of each backend and the
speed-up. Both backends are checked to return identical counts first.
"""

import argparse
import timeit

import numpy as np

from patternlab import kernels
from patternlab.samplers import murn_law, replica_rng, stam_next_array


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=200, help="word / partition size")
    ap.add_argument("--batch", type=int, default=200, help="objects per call")
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=1)
    args = ap.parse_args()

    py, cy = kernels.python_backend, kernels.compiled_backend
    if cy is None:
        raise SystemExit("compiled extension is not built; run `pip install -e . --no-build-isolation`")

    rng = np.random.default_rng(args.seed)
    base = np.repeat(np.arange(1, 5), args.n // 4 + 1)[: args.n]
    words = np.stack([rng.permutation(base) for _ in range(args.batch)]).astype(np.int64)
    law = murn_law(args.n)
    nxts = np.stack([stam_next_array(args.n, law, replica_rng(args.seed, k))[0] for k in range(args.batch)])

    cases = [
        ("word 21", lambda b: b.count_word_pattern_many(words, (2, 1))),
        ("word 231", lambda b: b.count_word_pattern_many(words, (2, 3, 1))),
        ("word 2413", lambda b: b.count_word_pattern_many(words[: max(1, args.batch // 20)], (2, 4, 1, 3))),
        ("arcs 1-2", lambda b: b.count_arc_pattern_many(nxts, ((1, 2),), 2)),
        ("arcs 1-3,2-4", lambda b: b.count_arc_pattern_many(nxts, ((1, 3), (2, 4)), 4)),
        ("arcs 1-4,2-3 +free", lambda b: b.count_arc_pattern_many(nxts, ((1, 4), (2, 3)), 5)),
    ]
    print(f"n={args.n} batch={args.batch}")
    print(f"{'kernel':<22}{'python [s]':>12}{'compiled [s]':>14}{'speed-up':>10}")
    for name, fn in cases:
        if list(fn(py)) != list(fn(cy)):
            raise SystemExit(f"backends disagree on {name}")
        t_py = min(timeit.repeat(lambda: fn(py), number=1, repeat=args.repeat))
        t_cy = min(timeit.repeat(lambda: fn(cy), number=1, repeat=args.repeat))
        print(f"{name:<22}{t_py:>12.4f}{t_cy:>14.5f}{t_py / t_cy:>9.0f}x")


if __name__ == "__main__":
    main()
