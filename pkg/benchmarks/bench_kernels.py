"""Time the numba kernels against their numpy fallbacks.

Run: python3 benchmarks/bench_kernels.py --nodes 2000 --lmax 32 --repeats 5

Both flavours are checked for agreement before timing. The first numba call
(compilation or cache load) is excluded.
"""
import argparse
import time

import numpy as np

from liedual import kernels
from liedual.groups import Group, random_elements
from liedual.reps import decompose_fund_tensor


def best_of(fn, repeats):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best * 1000.0


def tower(step, g, lmax):
    for _ in kernels.su2_rep_tower(g, lmax, step=step):
        pass


def cases(args):
    rng = np.random.default_rng(args.seed)
    g = np.ascontiguousarray(random_elements(Group.su2(), args.nodes, rng))
    c = np.ascontiguousarray(np.real(g[:, 0, 0] + g[:, 1, 1]) / 2)
    dec = decompose_fund_tensor(Group.su2(), 1, args.lmax)
    U = np.ascontiguousarray(dec.intertwiner)
    D, W = U.shape[0], 2
    B = rng.standard_normal((W, D, W, D)) + 1j * rng.standard_normal((W, D, W, D))
    return [
        ("su2_rep_tower", lambda: tower(kernels.su2_step_numpy, g, args.lmax),
         lambda: tower(kernels.su2_step_numba, g, args.lmax)),
        ("su2_characters", lambda: kernels.su2_characters_numpy(c, 4 * args.lmax),
         lambda: kernels.su2_characters_numba(c, 4 * args.lmax)),
        ("conjugate_blocks", lambda: kernels.conjugate_blocks_numpy(B, U),
         lambda: kernels.conjugate_blocks_numba(B, U)),
    ], (g, c, B, U)


def check_agreement(args, data):
    g, c, B, U = data
    D1 = kernels.su2_step_numpy(np.ones((len(g), 1, 1), complex), g)
    D2 = kernels.su2_step_numba(np.ones((len(g), 1, 1), complex), g)
    errs = [
        np.max(np.abs(D1 - D2)),
        np.max(np.abs(kernels.su2_characters_numpy(c, args.lmax) - kernels.su2_characters_numba(c, args.lmax))),
        np.max(np.abs(kernels.conjugate_blocks_numpy(B, U) - kernels.conjugate_blocks_numba(B, U))),
    ]
    return max(errs)


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--nodes", type=int, default=2000, help="batch size (group elements)")
    p.add_argument("--lmax", type=int, default=32, help="largest SU(2) degree")
    p.add_argument("--repeats", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    args = p.parse_args(argv)

    table, data = cases(args)
    err = check_agreement(args, data)
    print(f"max |numpy - numba| = {err:.3e}")
    print(f"{'kernel':<18} {'numpy ms':>10} {'numba ms':>10} {'speedup':>8}")
    for name, f_np, f_nb in table:
        f_nb()  # compile / load cache
        t_np = best_of(f_np, args.repeats)
        t_nb = best_of(f_nb, args.repeats)
        print(f"{name:<18} {t_np:>10.3f} {t_nb:>10.3f} {t_np / max(t_nb, 1e-9):>7.2f}x")


if __name__ == "__main__":
    main()
