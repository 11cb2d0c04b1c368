"""Time the numba kernels against their pure-numpy counterparts.

Run with ``python3 benchmarks/bench_kernels.py``.  Both flavours are imported
explicitly, so the NCLUSTER_BACKEND setting does not matter here.  Results are
checked for agreement before timing.
"""
import argparse
import time

import numpy as np

from ncluster import _accel
from ncluster.kernels import (
    apply_pauli_numba,
    apply_pauli_numpy,
    hamiltonian_coo_numba,
    hamiltonian_coo_numpy,
    pfaffian_numba,
    pfaffian_numpy,
)


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def skew(rng, dim):
    a = rng.standard_normal((dim, dim))
    return a - a.T


def cases(rng, quick):
    dims = (16, 64) if quick else (16, 64, 200)
    for dim in dims:
        m = skew(rng, dim)
        yield f"pfaffian dim={dim}", lambda m=m: pfaffian_numpy(m), lambda m=m: pfaffian_numba(m)
    for n_sites in (10,) if quick else (10, 12):
        args = (n_sites, 1, -0.6, 0.8, True)
        yield (
            f"hamiltonian N={n_sites}",
            lambda a=args: hamiltonian_coo_numpy(*a),
            lambda a=args: hamiltonian_coo_numba(*a),
        )
    n_sites = 12 if quick else 14
    vec = rng.standard_normal(1 << n_sites) + 1j * rng.standard_normal(1 << n_sites)
    sites = np.array([1, 2, 3, 7])
    axes = np.array([1, 3, 2, 1])
    yield (
        f"apply_pauli N={n_sites}",
        lambda: apply_pauli_numpy(vec, sites, axes),
        lambda: apply_pauli_numba(vec, sites, axes),
    )


def agree(a, b):
    if isinstance(a, tuple):
        # COO triplets may come in a different order; compare as sparse sums
        import scipy.sparse as sp

        dim = int(max(a[0].max(), a[1].max())) + 1
        ma = sp.coo_matrix((a[2], (a[0], a[1])), shape=(dim, dim)).tocsr()
        mb = sp.coo_matrix((b[2], (b[0], b[1])), shape=(dim, dim)).tocsr()
        return abs(ma - mb).max() < 1e-12
    return np.allclose(a, b, rtol=1e-9, atol=1e-12)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--quick", action="store_true", help="small sizes only")
    args = ap.parse_args(argv)
    if not _accel.HAVE_NUMBA:
        print("numba is not available; only the numpy kernels would run")
        return 1
    rng = np.random.default_rng(1234)
    print(f"{'kernel':<22}{'numpy [ms]':>12}{'numba [ms]':>12}{'speed-up':>10}")
    for name, f_np, f_nb in cases(rng, args.quick):
        if not agree(f_np(), f_nb()):  # also triggers JIT compilation
            print(f"{name}: results disagree")
            return 1
        t_np = best_of(f_np, args.repeat)
        t_nb = best_of(f_nb, args.repeat)
        print(f"{name:<22}{1e3 * t_np:>12.3f}{1e3 * t_nb:>12.3f}{t_np / t_nb:>10.1f}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
