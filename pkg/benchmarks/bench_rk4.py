"""Time the compiled and numpy RK4 backends on collective-decoherence models.

    python3 benchmarks/bench_rk4.py [--steps 2000] [--max-n 6]
"""

import argparse
import time

import numpy as np

from collective_dfs import kernels
from collective_dfs.dynamics import CouplingModel, _propagation_inputs, random_coupling
from collective_dfs.qubit_space import ket


def inputs(n, seed=0):
    rng = np.random.default_rng(seed)
    model = CouplingModel.collective(1.0, random_coupling(n, rng))
    heff, jumps, rates, scale = _propagation_inputs(model, True)
    psi = ket((1, "1" + "0" * (n - 1)))
    return heff, jumps, rates, np.outer(psi, psi.conj()), 0.05 / scale


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--steps", type=int, default=2000)
    ap.add_argument("--max-n", type=int, default=6)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    if not kernels.HAVE_COMPILED:
        raise SystemExit("compiled extension not built; run pip install -e . --no-build-isolation")

    print(f"{'n':>2} {'dim':>4} {'python s':>10} {'cython s':>10} {'speedup':>8} {'max diff':>9}")
    for n in range(2, args.max_n + 1):
        heff, jumps, rates, rho0, dt = inputs(n)
        run = lambda name: kernels.rk4_propagate(heff, jumps, rates, rho0, dt, args.steps,
                                                 record_every=args.steps, backend=name)
        tp, a = best_of(lambda: run("python"), args.repeat)
        tc, b = best_of(lambda: run("cython"), args.repeat)
        print(f"{n:>2} {2**n:>4} {tp:>10.4f} {tc:>10.4f} {tp / tc:>8.1f} {np.max(np.abs(a - b)):>9.1e}")


if __name__ == "__main__":
    main()
