"""Wall-clock comparison of the numba and numpy kernel backends.

Runs the two hot kernels over representative mode counts in this process
(numba by default) and in a subprocess with EULERALIGN_NO_NUMBA=1, and
prints a small table.  Usage: python benchmarks/bench_kernels.py
"""

import json
import os
import subprocess
import sys
import time

import numpy as np

from euleralign import kernels

CASES = {
    "green_entries (audit grid, 1e6 pts)":
        "kernels.green_entries(TT, XX, 0.5, 1.0, 1.0)",
    "green_entries (radial, 1e5 pts)":
        "kernels.green_entries(37.2, X1, 0.25, 1.0, 1.0)",
    "etd_entries (256^2 modes)":
        "kernels.etd_entries(0.3, XG, 0.5, 1.0, 1.0)",
}

SETUP = """
import numpy as np
from euleralign import kernels
t = np.geomspace(1e-2, 1e3, 1000)
x = np.geomspace(1e-3, 50.0, 1000)
TT, XX = np.meshgrid(t, x, indexing="ij")
X1 = np.geomspace(1e-4, 80.0, 100_000)
k1 = 2 * np.pi * np.fft.fftfreq(256, d=200.0 / 256)
kx, ky = np.meshgrid(k1, k1, indexing="ij")
XG = np.sqrt(kx**2 + ky**2)
"""


def bench_in_process():
    env = {}
    exec(SETUP, env)
    results = {}
    for name, expr in CASES.items():
        code = compile(expr, "<bench>", "eval")
        eval(code, env)  # warm-up (numba compilation)
        reps = 3
        start = time.perf_counter()
        for _ in range(reps):
            eval(code, env)
        results[name] = (time.perf_counter() - start) / reps
    return results


def bench_numpy_subprocess():
    script = SETUP + "\nimport json, time\nout = {}\n"
    for name, expr in CASES.items():
        script += (
            f"eval(compile({expr!r}, '<b>', 'eval'))\n"
            f"start = time.perf_counter()\n"
            f"for _ in range(3): eval(compile({expr!r}, '<b>', 'eval'))\n"
            f"out[{name!r}] = (time.perf_counter() - start) / 3\n"
        )
    script += "print(json.dumps(out))\n"
    env = dict(os.environ, EULERALIGN_NO_NUMBA="1")
    proc = subprocess.run([sys.executable, "-c", script], env=env,
                          capture_output=True, text=True, check=True)
    return json.loads(proc.stdout.strip().splitlines()[-1])


def main():
    active = kernels.backend()
    mine = bench_in_process()
    if active == "numba":
        other = bench_numpy_subprocess()
        pairs = [("numba", mine), ("numpy", other)]
    else:
        print("numba backend unavailable; timing numpy only")
        pairs = [("numpy", mine)]

    width = max(len(n) for n in CASES) + 2
    header = f"{'kernel':<{width}}" + "".join(f"{name:>12}" for name, _ in pairs)
    if len(pairs) == 2:
        header += f"{'speedup':>10}"
    print(header)
    for case in CASES:
        row = f"{case:<{width}}"
        for _, res in pairs:
            row += f"{res[case] * 1e3:>10.2f}ms"
        if len(pairs) == 2:
            row += f"{pairs[1][1][case] / pairs[0][1][case]:>9.1f}x"
        print(row)


if __name__ == "__main__":
    main()
