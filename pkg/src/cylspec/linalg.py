"""Eigensolvers and banded direct solves built on :mod:`cylspec.kernels`.

The small dense problems that appear inside the Krylov iteration (Schur or
symmetric eigendecompositions of the projected matrix, size <= ~60) go to
scipy/LAPACK; everything that scales with the grid is ours.
"""
import numpy as np
import scipy.linalg
import scipy.sparse as sps

from . import kernels
from .errors import ConvergenceFailure, InvalidParameter, SingularFactorization


def eigh_tridiagonal(diag, offdiag, vectors=True, max_iter=60):
    """Eigenpairs of a symmetric tridiagonal matrix, ascending order."""
    d = np.array(diag, dtype=float)
    n = d.size
    e = np.zeros(n)
    e[:n - 1] = offdiag
    z = np.eye(n) if vectors else np.zeros((0, n))
    status = kernels.tql(d, e, z, max_iter)
    if status:
        raise ConvergenceFailure(
            "QL iteration did not converge",
            {"index": status - 1, "iterations": max_iter, "d": d.copy(), "e": e.copy()},
        )
    order = np.argsort(d, kind="stable")
    return d[order], (z[:, order] if vectors else None)


def jacobi_eigh(a, tol=1e-14, max_sweeps=60):
    """Eigenpairs of a dense real symmetric matrix by cyclic Jacobi, ascending."""
    a = np.array(a, dtype=float, copy=True)
    n = a.shape[0]
    v = np.eye(n)
    sweeps = kernels.jacobi(a, v, max_sweeps, tol)
    if sweeps < 0:
        off = np.linalg.norm(a - np.diag(np.diag(a)))
        raise ConvergenceFailure("Jacobi sweeps exhausted",
                                 {"sweeps": max_sweeps, "offdiag_norm": off})
    w = np.diag(a).copy()
    order = np.argsort(w, kind="stable")
    return w[order], v[:, order]


def _nonzeros(matrix):
    """COO view without explicitly stored zeros (kron of sparse blocks keeps them)."""
    m = sps.csr_matrix(matrix, copy=True)
    m.eliminate_zeros()
    return m.tocoo()


def bandwidths(matrix):
    coo = _nonzeros(matrix)
    if coo.nnz == 0:
        return 0, 0
    off = coo.row - coo.col
    return int(max(off.max(), 0)), int(max(-off.min(), 0))


def to_band(matrix, kl, ku, dtype):
    """Pack a sparse matrix into LAPACK gbtrf band storage (Fortran order)."""
    coo = _nonzeros(matrix)
    n = coo.shape[0]
    ab = np.zeros((2 * kl + ku + 1, n), dtype=dtype, order="F")
    ab[kl + ku + coo.row - coo.col, coo.col] = coo.data
    return ab


class BandedLU:
    """LU factorization with partial pivoting of a sparse banded matrix.

    An optional permutation reorders unknowns before factoring (used to fold
    a periodic ring of layers into a band). ``solve`` and ``solve_h`` accept
    and return vectors in the original ordering.
    """

    def __init__(self, matrix, perm=None, dtype=None):
        matrix = sps.csr_matrix(matrix)
        if matrix.shape[0] != matrix.shape[1]:
            raise InvalidParameter("matrix must be square")
        if dtype is None:
            dtype = np.complex128 if np.iscomplexobj(matrix.data) else np.float64
        self.dtype = np.dtype(dtype)
        self.n = matrix.shape[0]
        self.perm = None if perm is None else np.asarray(perm)
        if self.perm is not None:
            matrix = matrix[self.perm][:, self.perm]
        self.kl, self.ku = bandwidths(matrix)
        self.ab = to_band(matrix, self.kl, self.ku, self.dtype)
        self.ipiv = np.zeros(self.n, dtype=np.int64)
        info = kernels.gbtrf(self.ab, self.kl, self.ku, self.ipiv)
        if info:
            raise SingularFactorization(f"zero pivot at column {info - 1}")

    def _solve(self, b, kernel):
        b = np.asarray(b)
        out = np.array(b, dtype=np.result_type(b.dtype, self.dtype), copy=True)
        if self.perm is not None:
            out = out[self.perm]
        if out.dtype != self.dtype:
            # real factors applied to complex data: split into two real solves
            re = np.ascontiguousarray(out.real)
            im = np.ascontiguousarray(out.imag)
            kernel(self.ab, self.kl, self.ku, self.ipiv, re)
            kernel(self.ab, self.kl, self.ku, self.ipiv, im)
            out = re + 1j * im
        else:
            out = np.ascontiguousarray(out)
            kernel(self.ab, self.kl, self.ku, self.ipiv, out)
        if self.perm is not None:
            res = np.empty_like(out)
            res[self.perm] = out
            out = res
        return out

    def solve(self, b):
        return self._solve(b, kernels.gbtrs)

    def solve_h(self, b):
        """Solve with the conjugate transpose."""
        return self._solve(b, kernels.gbtrs_h)


def _start_vector(rng, n, complex_):
    v = rng.standard_normal(n)
    if complex_:
        v = v + 1j * rng.standard_normal(n)
    return v


def krylov_schur(apply, n, k, *, hermitian, dtype, m=None, tol=1e-12,
                 maxiter=500, seed=0):
    """Dominant eigenpairs (largest modulus) of a linear operator.

    Arnoldi with full (two-pass classical Gram-Schmidt) reorthogonalization,
    restarted by Krylov-Schur truncation. For ``hermitian=True`` the
    projected matrix is diagonalized with ``eigh`` (thick-restart Lanczos).

    Converged when every wanted Ritz pair has residual <= tol * |theta|.
    Returns ``(theta, X, info)`` sorted by decreasing |theta|.
    """
    dtype = np.dtype(dtype)
    complex_ = dtype.kind == "c"
    if k < 1 or k >= n:
        raise InvalidParameter(f"need 1 <= k < n (k={k}, n={n})")
    if m is None:
        m = max(2 * k + 10, 30)
    m = min(m, n - 1)
    if m <= k:
        raise InvalidParameter(f"subspace size {m} too small for k={k}")
    rng = np.random.default_rng(seed)
    V = np.zeros((n, m + 1), dtype=dtype)
    H = np.zeros((m + 1, m), dtype=dtype)
    v0 = _start_vector(rng, n, complex_)
    V[:, 0] = v0 / np.linalg.norm(v0)
    p = 0
    n_apply = 0
    breakdowns = 0
    history = []
    for restart in range(maxiter):
        for j in range(p, m):
            w = np.asarray(apply(V[:, j]), dtype=dtype)
            n_apply += 1
            basis = V[:, :j + 1]
            h = basis.conj().T @ w
            w = w - basis @ h
            h2 = basis.conj().T @ w
            w = w - basis @ h2
            h = h + h2
            beta = np.linalg.norm(w)
            H[:j + 1, j] = h
            if beta <= 1e-13 * max(np.linalg.norm(h), 1e-300):
                # invariant subspace found: continue from a fresh direction
                breakdowns += 1
                w = _start_vector(rng, n, complex_).astype(dtype)
                for _ in range(2):
                    w = w - basis @ (basis.conj().T @ w)
                V[:, j + 1] = w / np.linalg.norm(w)
                H[j + 1, j] = 0.0
            else:
                H[j + 1, j] = beta
                V[:, j + 1] = w / beta
        Hm = H[:m, :m].copy()
        brow = H[m, :m].copy()
        if hermitian:
            theta, Y = np.linalg.eigh((Hm + Hm.conj().T) / 2)
        else:
            theta, Y = scipy.linalg.eig(Hm)
            Y = Y / np.linalg.norm(Y, axis=0)
        order = np.argsort(-np.abs(theta), kind="stable")
        theta = theta[order]
        Y = Y[:, order]
        res = np.abs(brow @ Y)
        scale = np.maximum(np.abs(theta), 1e-300)
        worst = float(np.max(res[:k] / scale[:k]))
        history.append(worst)
        if worst <= tol:
            X = V[:, :m] @ Y[:, :k]
            X /= np.linalg.norm(X, axis=0)
            info = {"restarts": restart, "applications": n_apply,
                    "subspace": m, "breakdowns": breakdowns,
                    "ritz_residuals": (res[:k] / scale[:k]).tolist()}
            return theta[:k], X, info
        p = min(k + (m - k) // 2, m - 1)
        if hermitian:
            T = np.diag(theta[:p]).astype(dtype)
            Z = Y[:, :p]
        else:
            thresh = np.abs(theta[p - 1])
            T, Z, sdim = scipy.linalg.schur(
                Hm.astype(np.complex128), output="complex",
                sort=lambda x: abs(x) >= thresh * (1 - 1e-12))
            p = int(min(max(sdim, k), m - 1))
            T = T[:p, :p]
            Z = Z[:, :p]
            if not complex_:
                raise InvalidParameter("non-hermitian iteration requires a complex dtype")
        V[:, :p] = V[:, :m] @ Z
        V[:, p] = V[:, m]
        H[:] = 0.0
        H[:p, :p] = T
        H[p, :p] = brow @ Z
    raise ConvergenceFailure(
        "Krylov-Schur iteration cap reached",
        {"restarts": maxiter, "applications": n_apply, "residual_history": history[-10:]},
    )


def lanczos(apply, n, k, **kw):
    """Thick-restart Lanczos (full reorthogonalization) for a Hermitian operator."""
    kw.setdefault("dtype", np.float64)
    return krylov_schur(apply, n, k, hermitian=True, **kw)


def arnoldi(apply, n, k, **kw):
    """Restarted Arnoldi over the complex field."""
    kw.setdefault("dtype", np.complex128)
    return krylov_schur(apply, n, k, hermitian=False, **kw)
