"""Compare the compiled kernels with the pure-Python fallback.

    python3 benchmarks/bench_kernels.py [--repeat 5]
"""

import argparse
import random
import timeit

import numpy as np

from qtwist import _kernels_py

try:
    from qtwist import _kernels as compiled
except ImportError:
    compiled = None


def sparse_poly(rng, terms, nvars=4):
    out = {}
    for _ in range(terms):
        e = 0
        for i in range(nvars):
            e |= rng.randint(0, 6) << (16 * i)
        out[e] = rng.randint(-99, 99) or 1
    return out


def cases(rng):
    a, b = sparse_poly(rng, 60), sparse_poly(rng, 60)
    yield "poly_mul 60x60 terms", "poly_mul", (a, b)
    big = {e: c * 10 ** 25 for e, c in a.items()}
    yield "poly_mul bignum coeffs", "poly_mul", (big, b)
    acc = sparse_poly(rng, 200)
    yield "poly_scale_add 200+60", "poly_scale_add", (acc, a, 7, 1 << 16)
    for n in (16, 32, 64):
        rows = np.random.default_rng(n).integers(-50, 50, size=(n, n)).tolist()
        yield f"charpoly_mod n={n}", "charpoly_mod", (rows, 2147483629)


def call(fn, args):
    # poly_scale_add mutates its first argument
    if fn.__name__ == "poly_scale_add":
        return fn(dict(args[0]), *args[1:])
    return fn(*args)


def bench(fn, args, repeat):
    run = lambda: call(fn, args)
    number = max(1, int(0.2 / max(timeit.timeit(run, number=1), 1e-6)))
    return min(timeit.repeat(run, number=number, repeat=repeat)) / number


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    if compiled is None:
        print("compiled extension not built; run `pip install -e . --no-build-isolation` first")
    rng = random.Random(args.seed)
    print(f"{'case':28s} {'python':>12s} {'compiled':>12s} {'speedup':>8s}")
    for label, name, fargs in cases(rng):
        t_py = bench(getattr(_kernels_py, name), fargs, args.repeat)
        if compiled is None:
            print(f"{label:28s} {t_py * 1e3:10.3f}ms {'-':>12s} {'-':>8s}")
            continue
        fn = getattr(compiled, name)
        want = call(getattr(_kernels_py, name), fargs)
        got = call(fn, fargs)
        assert (list(got) == list(want)) if name == "charpoly_mod" else got == want, label
        t_c = bench(fn, fargs, args.repeat)
        print(f"{label:28s} {t_py * 1e3:10.3f}ms {t_c * 1e3:10.3f}ms {t_py / t_c:7.1f}x")


if __name__ == "__main__":
    main()
