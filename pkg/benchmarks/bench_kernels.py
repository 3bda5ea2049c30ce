"""Time the numba kernels against their numpy twins.

    python3 benchmarks/bench_kernels.py [--repeat 5] [--n-assets 30]

Both implementations are imported directly, so the SPARSE_LNA_NUMBA flag
does not matter here.  The first numba call (compilation) is excluded.
"""
import argparse
import timeit

import numpy as np

from sparse_lna import kernels
from sparse_lna.linalg import matrix_norm_inf


def _time(fn, repeat, number):
    return min(timeit.repeat(fn, repeat=repeat, number=number)) / number


def cases(n_assets, t_obs, lu_size, rng):
    r = rng.standard_normal((t_obs, n_assets))
    r -= r.mean(axis=0)
    _, phi, psi = kernels.comoments_np(r)
    x = rng.standard_normal(n_assets)
    g = rng.standard_normal((lu_size, lu_size))
    tiny = 1e-14 * matrix_norm_inf(g)
    lu, perm, _ = kernels.lu_factor_np(g.copy(), tiny)
    rhs = rng.standard_normal(lu_size)
    return [
        (f"lu_factor {lu_size}x{lu_size}",
         lambda: kernels.lu_factor_nb(g.copy(), tiny), lambda: kernels.lu_factor_np(g.copy(), tiny)),
        (f"lu_substitute {lu_size}",
         lambda: kernels.lu_substitute_nb(lu, perm, rhs), lambda: kernels.lu_substitute_np(lu, perm, rhs)),
        (f"comoments T={t_obs} n={n_assets}", lambda: kernels.comoments_nb(r), lambda: kernels.comoments_np(r)),
        (f"phi_ix n={n_assets}", lambda: kernels.phi_ix_nb(phi, x), lambda: kernels.phi_ix_np(phi, x)),
        (f"psi_ixx n={n_assets}", lambda: kernels.psi_ixx_nb(psi, x), lambda: kernels.psi_ixx_np(psi, x)),
    ]


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--n-assets", type=int, default=30)
    ap.add_argument("--t-obs", type=int, default=500)
    ap.add_argument("--lu-size", type=int, default=40)
    args = ap.parse_args(argv)
    rng = np.random.default_rng(0)
    print(f"{'kernel':<32}{'numba [ms]':>12}{'numpy [ms]':>12}{'speedup':>10}")
    for name, nb, npy in cases(args.n_assets, args.t_obs, args.lu_size, rng):
        nb()  # compile
        number = 20 if "comoments" not in name else 2
        t_nb = _time(nb, args.repeat, number)
        t_np = _time(npy, args.repeat, number)
        print(f"{name:<32}{1e3 * t_nb:>12.4f}{1e3 * t_np:>12.4f}{t_np / t_nb:>10.2f}")


if __name__ == "__main__":
    main()
