"""Compare the numba and pure-numpy kernels, and show where a realization spends its time.

    python benchmarks/bench_kernels.py [--atoms 3 4 5] [--repeat 200]

The compiled path is timed after a warm-up call, so compilation is excluded.
"""

import argparse
import time
import timeit

import numpy as np

from superrad import kernels
from superrad._jit import HAVE_NUMBA
from superrad.couplings import build_couplings
from superrad.geometry import realization_seed, sample_configuration
from superrad.liouvillian import LiouvillianMatrix
from superrad.observables import offdiagonal_slots, trajectory
from superrad.propagator import evolve_vectors, modal_solution, superradiant_grid, sweep_grid
from superrad.state import fully_excited_state, layout


def _best(fn, repeat):
    # best of 5 batches, per call
    return min(timeit.repeat(fn, number=repeat, repeat=5)) / repeat


def bench_kernels(n, repeat):
    cs = build_couplings(sample_configuration(n, 0.7, 6.6e-4, realization_seed(1, 0)), "exact")
    gen = LiouvillianMatrix(cs)
    K = gen.effective_blocks
    states, top = evolve_vectors(gen, fully_excited_state(n), superradiant_grid())
    weights = gen.intensity_weights[: states.shape[1]]
    off = offdiagonal_slots(n, top)
    cases = {
        "block_operators": lambda jit: kernels.block_operators(n, cs.gamma, cs.f, use_jit=jit),
        "dense_generator": lambda jit: kernels.dense_generator(n, cs.gamma, K, use_jit=jit),
        "trajectory_observables": lambda jit: kernels.trajectory_observables(states, weights, off, use_jit=jit),
    }
    rows = []
    for name, call in cases.items():
        t_np = _best(lambda: call(False), repeat)
        if HAVE_NUMBA:
            call(True)
            t_jit = _best(lambda: call(True), repeat)
        else:
            t_jit = float("nan")
        rows.append((name, n, t_np, t_jit))
    return rows


def profile_realization(n, n_real=20):
    """Split one realization into geometry+assembly, eigen-solve and observables."""
    grid = sweep_grid(10.0)
    rho0 = fully_excited_state(n)
    t_build = t_modal = t_synth = t_obs = 0.0
    for k in range(n_real):
        t0 = time.perf_counter()
        cs = build_couplings(sample_configuration(n, 0.9, 6.6e-4, realization_seed(3, k)), "exact")
        gen = LiouvillianMatrix(cs)
        gen.effective_blocks
        t1 = time.perf_counter()
        sol = modal_solution(gen, rho0)
        t2 = time.perf_counter()
        vecs = sol.vectors(grid.points)
        t3 = time.perf_counter()
        trajectory(vecs, gen, sol.top)
        t4 = time.perf_counter()
        t_build += t1 - t0
        t_modal += t2 - t1
        t_synth += t3 - t2
        t_obs += t4 - t3
    total = t_build + t_modal + t_synth + t_obs
    return {
        "couplings+blocks": t_build / total,
        "sector eig + cascade (LAPACK)": t_modal / total,
        "exp synthesis (BLAS)": t_synth / total,
        "observables": t_obs / total,
        "ms/realization": 1e3 * total / n_real,
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--atoms", type=int, nargs="+", default=[3, 4, 5])
    ap.add_argument("--repeat", type=int, default=50)
    args = ap.parse_args()
    if not HAVE_NUMBA:
        print("numba not importable: only the numpy path is timed")
    print(f"{'kernel':<24}{'N':>3}{'numpy [us]':>14}{'numba [us]':>14}{'speedup':>10}")
    for n in args.atoms:
        layout(n)
        for name, nn, t_np, t_jit in bench_kernels(n, args.repeat):
            print(f"{name:<24}{nn:>3}{1e6 * t_np:>14.1f}{1e6 * t_jit:>14.1f}{t_np / t_jit:>10.2f}")
    print()
    for n in args.atoms:
        prof = profile_realization(n)
        ms = prof.pop("ms/realization")
        parts = ", ".join(f"{k} {100 * v:.0f}%" for k, v in prof.items())
        print(f"N={n}: {ms:.2f} ms per realization; {parts}")


if __name__ == "__main__":
    np.set_printoptions(precision=3)
    main()
