"""Timing comparison of the numba-compiled kernels against the numpy fallback."""
import time

import numpy as np
import scipy.sparse as sps

from . import _accel, kernels
from .linalg import to_band


def _best_of(fn, setup, repeat):
    best = np.inf
    for _ in range(repeat):
        args = setup()
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def _cases(n_x, n_z, n_tri, n_dense, seed):
    rng = np.random.default_rng(seed)
    N = n_x * n_z
    lap_x = sps.diags([1.0, -2.0, 1.0], [-1, 0, 1], shape=(n_x, n_x))
    lap_z = sps.diags([0.9, -2.0, 1.1], [-1, 0, 1], shape=(n_z, n_z))
    A = (sps.kron(sps.identity(n_z), lap_x) + sps.kron(lap_z, sps.identity(n_x))
         + sps.diags(rng.standard_normal(N)) - 3.0 * sps.identity(N))
    kl = ku = n_x
    ab0 = to_band(A, kl, ku, np.float64)
    b0 = rng.standard_normal(N)
    d0 = rng.standard_normal(n_tri)
    e0 = rng.standard_normal(n_tri)
    S = rng.standard_normal((n_dense, n_dense))
    S = S + S.T

    def lu_setup():
        return ab0.copy(order="F"), kl, ku, np.zeros(N, dtype=np.int64)

    ab_f, ipiv = ab0.copy(order="F"), np.zeros(N, dtype=np.int64)
    kernels.gbtrf_np(ab_f, kl, ku, ipiv)
    return {
        "gbtrf": (lu_setup, ("gbtrf_jit", "gbtrf_np")),
        "gbtrs": (lambda: (ab_f, kl, ku, ipiv, b0.copy()), ("gbtrs_jit", "gbtrs_np")),
        "tql": (lambda: (d0.copy(), e0.copy(), np.eye(n_tri), 60), ("tql_jit", "tql_np")),
        "jacobi": (lambda: (S.copy(), np.eye(n_dense), 60, 1e-14), ("jacobi_jit", "jacobi_np")),
    }


def compare(n_x=63, n_z=401, n_tri=400, n_dense=120, repeat=3, seed=0):
    """Best-of-``repeat`` wall times per kernel for both implementations.

    Returns a list of dicts ``{kernel, numba, numpy, speedup}``; the numba
    column is None when numba is unavailable. Compilation happens before
    timing starts.
    """
    rows = []
    for name, (setup, (jit_name, np_name)) in _cases(n_x, n_z, n_tri, n_dense, seed).items():
        jit_fn = getattr(kernels, jit_name)
        np_fn = getattr(kernels, np_name)
        t_np = _best_of(np_fn, setup, repeat)
        t_jit = None
        if jit_fn is not None:
            jit_fn(*setup())  # warm-up / compile
            t_jit = _best_of(jit_fn, setup, repeat)
        rows.append({"kernel": name, "numba": t_jit, "numpy": t_np,
                     "speedup": None if t_jit is None else t_np / t_jit})
    return rows


def format_table(rows):
    lines = [f"backend in use: {_accel.backend()}",
             f"{'kernel':<8} {'numba [s]':>12} {'numpy [s]':>12} {'speedup':>9}"]
    for r in rows:
        jit = "n/a" if r["numba"] is None else f"{r['numba']:.4g}"
        sp = "n/a" if r["speedup"] is None else f"{r['speedup']:.1f}x"
        lines.append(f"{r['kernel']:<8} {jit:>12} {r['numpy']:>12.4g} {sp:>9}")
    return "\n".join(lines)
