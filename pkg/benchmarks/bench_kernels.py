"""Compare the compiled and the pure-Python dyadic kernels.

Runs the raw kernel calls in-process for both modules, then times a small
end-to-end build in a subprocess per backend (the backend is fixed at import).

    python benchmarks/bench_kernels.py [--depth 4] [--repeat 3]
"""

from __future__ import annotations

import argparse
import os
import subprocess
import sys
import timeit

from skewbox import _dyadic_py

try:
    from skewbox import _dyadic_ext
except ImportError:
    _dyadic_ext = None

PREC = 192
M1, E1 = 0x9E3779B97F4A7C15F39CC0605CEDC834 | 1, -130
M2, E2 = 0xB7E151628AED2A6ABF7158809CF4F3C7 | 1, -129

CASES = {
    "round": lambda k: k.round_dyadic(M1 * M2, E1 + E2, PREC // 2, True),
    "cmp": lambda k: k.cmp_dyadic(M1, E1, M2, E2),
    "add": lambda k: k.add_dyadic(M1, E1, -M2, E2, PREC, False),
    "mul": lambda k: k.mul_dyadic(M1, E1, M2, E2, PREC, True),
    "div": lambda k: k.div_dyadic(M1, E1, M2, E2, PREC, False),
    "sin": lambda k: k.sin_fixed(M1 >> 3, PREC),
}

BUILD = "import time; from skewbox.construction import build, BuildConfig; " \
        "t = time.perf_counter(); build(BuildConfig(depth={depth})); print(time.perf_counter() - t)"


def kernel_table(number: int) -> None:
    mods = [("python", _dyadic_py)] + ([("compiled", _dyadic_ext)] if _dyadic_ext else [])
    print(f"{'kernel':8s}" + "".join(f"{n:>14s}" for n, _ in mods) + ("   speedup" if len(mods) > 1 else ""))
    for name, fn in CASES.items():
        ts = [min(timeit.repeat(lambda k=k: fn(k), number=number, repeat=3)) / number * 1e6 for _, k in mods]
        row = f"{name:8s}" + "".join(f"{t:12.3f}us" for t in ts)
        if len(ts) > 1:
            row += f"   {ts[0] / ts[1]:6.2f}x"
        print(row)


def build_times(depth: int, repeat: int) -> None:
    for backend, pure in (("python", "1"), ("compiled", "0")):
        if backend == "compiled" and _dyadic_ext is None:
            print("compiled backend not built")
            continue
        env = dict(os.environ, SKEWBOX_PURE=pure)
        ts = []
        for _ in range(repeat):
            out = subprocess.run([sys.executable, "-c", BUILD.format(depth=depth)], env=env,
                                 capture_output=True, text=True, check=True)
            ts.append(float(out.stdout))
        print(f"build depth {depth} [{backend}]: best {min(ts):.3f}s of {repeat}")


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--depth", type=int, default=4)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--number", type=int, default=20000)
    args = ap.parse_args()
    kernel_table(args.number)
    build_times(args.depth, args.repeat)


if __name__ == "__main__":
    main()
