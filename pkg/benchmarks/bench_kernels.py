"""Time the NSFD kernel with numba enabled and with the pure-Python fallback.

Each path runs in its own interpreter because the flag is read at import.

    python3 benchmarks/bench_kernels.py [--steps N] [--repeat R]
"""
import argparse
import json
import os
import subprocess
import sys

WORKER = r"""
import json, sys, time
import numpy as np
from nsfd_hiv import kernels, make_parameters
steps, repeat = int(sys.argv[1]), int(sys.argv[2])
p = make_parameters(dict(lam=1, d=0.1, beta=0.0007, a=0.2, p=1e-4, mu=3, N=750,
                         c=0.1, s=0.2, tau=2, h=0.1))
hist = np.tile([15.0, 2.0, 1.0, 4.0], (p.m + 1, 1))
coef = p.as_array()

def once():
    buf = kernels.new_buffer(hist, steps)
    t0 = time.perf_counter()
    kernels.advance(buf, p.m, p.m, buf.shape[0] - 1, coef)
    return time.perf_counter() - t0, buf[-1].tolist()

warm, _ = once()
times = []
for _ in range(repeat):
    dt, final = once()
    times.append(dt)
print(json.dumps({"numba": kernels.USE_NUMBA, "first": warm, "best": min(times), "final": final}))
"""


def measure(flag, steps, repeat):
    env = dict(os.environ, NSFD_HIV_NUMBA=flag)
    out = subprocess.run([sys.executable, "-c", WORKER, str(steps), str(repeat)],
                         env=env, capture_output=True, text=True, check=True)
    return json.loads(out.stdout)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--steps", type=int, default=200_000)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)

    fast = measure("1", args.steps, args.repeat)
    pure = measure("0", args.steps, args.repeat)
    for name, res in (("numba", fast), ("pure", pure)):
        rate = args.steps / res["best"]
        print(f"{name:6s} active={res['numba']!s:5s} first={res['first']:.3f}s "
              f"best={res['best']:.4f}s  {rate:,.0f} steps/s")
    print(f"speedup {pure['best'] / fast['best']:.1f}x")
    diff = max(abs(a - b) / abs(b) for a, b in zip(fast["final"], pure["final"]))
    print(f"final-state relative difference {diff:.1e}")


if __name__ == "__main__":
    main()
