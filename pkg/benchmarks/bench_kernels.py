"""Compare the compiled and pure-Python multiplication kernels.

Two levels are timed: the raw truncated product on random dense inputs, and
end-to-end library calls (a Lubin-Tate law, an associativity check and the
shared-torsion demo) with the backend switched globally.

    python3 benchmarks/bench_kernels.py --repeat 5
"""
import argparse
import random
import statistics
import time

from fglab import (
    PrimeConfig,
    check_axioms,
    formal_group_from,
    shared_torsion_demo,
    shared_torsion_series,
)
from fglab import _kernels
from fglab.monomials import count


def _best(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times), statistics.median(times)


def kernel_cases(seed):
    rng = random.Random(seed)
    for label, p, N, d, t in [
        ("word  p=2 N=24  d=2 t=16", 2, 24, 2, 16),
        ("word  p=3 N=39  d=3 t=10", 3, 39, 3, 10),
        ("rns   p=2 N=96  d=2 t=16", 2, 96, 2, 16),
        ("rns   p=5 N=100 d=3 t=10", 5, 100, 3, 10),
    ]:
        mod = p**N
        n = count(d, t)
        a = [rng.randrange(mod) for _ in range(n)]
        b = [rng.randrange(mod) for _ in range(n)]
        yield label, (a, b, d, t, mod)


def end_to_end_cases():
    cfg = PrimeConfig(3, 24, 16)
    f = shared_torsion_series(cfg, 2)[0]
    F = formal_group_from(f, validate="none")
    yield "lt law p=3 M=16", lambda: formal_group_from(f, validate="none")
    yield "associativity deg 12", lambda: check_axioms(F, deg=12)
    yield "shared-torsion p=3 n=2", lambda: shared_torsion_demo(cfg, 2)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--skip-end-to-end", action="store_true")
    args = ap.parse_args(argv)

    backends = _kernels.available_backends()
    if "compiled" not in backends:
        print("compiled kernel not built; only the Python fallback is timed")
    print(f"{'case':32} " + " ".join(f"{b:>12}" for b in backends) + "   speedup")

    def row(label, fn_for):
        best = {}
        for be in backends:
            _kernels.set_backend(be)
            best[be] = _best(fn_for(be), args.repeat)[0]
        sp = best["python"] / best["compiled"] if "compiled" in best else float("nan")
        cells = " ".join(f"{best[b] * 1e3:10.2f}ms" for b in backends)
        print(f"{label:32} {cells}   {sp:6.1f}x")

    old = _kernels.BACKEND
    try:
        for label, (a, b, d, t, mod) in kernel_cases(args.seed):
            row(label, lambda be: (lambda: _kernels.mul_trunc(a, b, d, t, mod, backend=be)))
        if not args.skip_end_to_end:
            for label, fn in end_to_end_cases():
                row(label, lambda be: fn)
    finally:
        _kernels.set_backend(old)


if __name__ == "__main__":
    main()
