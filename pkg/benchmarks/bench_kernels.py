"""Time the compiled and pure-Python elimination kernels on the same inputs.

    python3 benchmarks/bench_kernels.py [--max-letters 6] [--repeat 3]
"""

import argparse
import random
import time

from semistab import kernels
from semistab.constructions import injective_words
from semistab.semisimp import realization_chains


def boundary_inputs(max_letters):
    for n in range(4, max_letters + 1):
        C = realization_chains(injective_words(n))
        for d in range(1, n):
            M = C.boundary(d)
            yield f"F({n}) d{d} {M.shape[0]}x{M.shape[1]}", dict(M.entries()), M.shape


def random_inputs(seed=0):
    rng = random.Random(seed)
    for size in (60, 120, 200):
        ent = {(i, j): rng.randint(-5, 5) for i in range(size) for j in range(size) if rng.random() < 0.1}
        ent = {k: v for k, v in ent.items() if v}
        yield f"random {size}x{size}", ent, (size, size)


def best_of(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t)
    return best


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--max-letters", type=int, default=6)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    if kernels._kernels is None:
        print("compiled extension not built; only the Python backend is available")
    backends = ["python"] + (["compiled"] if kernels._kernels is not None else [])

    print(f"{'input':<28}{'op':<10}" + "".join(f"{b:>12}" for b in backends) + f"{'speedup':>10}")
    cases = list(boundary_inputs(args.max_letters)) + list(random_inputs())
    for name, ent, (m, n) in cases:
        ops = {
            "snf": lambda b: kernels.elementary_divisors(ent, m, n, backend=b),
            "rank/F3": lambda b: kernels.rank_mod_p(ent, m, n, 3, backend=b),
        }
        if name.startswith("random") and m > 60:
            # entry growth pushes these past int64, so both backends run the same Python code
            del ops["snf"]
        for op, fn in ops.items():
            results = {b: fn(b) for b in backends}
            assert len({repr(r) for r in results.values()}) == 1, (name, op)
            times = {b: best_of(lambda: fn(b), args.repeat) for b in backends}
            row = f"{name:<28}{op:<10}" + "".join(f"{times[b] * 1e3:>10.2f}ms" for b in backends)
            if len(backends) == 2:
                row += f"{times['python'] / times['compiled']:>9.1f}x"
            print(row)


if __name__ == "__main__":
    main()
