"""Finite-difference Schrodinger operators d^2/dx^2 + V(x) on an interval."""
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sps

from .errors import GridTooSmall, InvalidParameter
from .linalg import eigh_tridiagonal, jacobi_eigh

JACOBI_MAX = 512


@dataclass(frozen=True)
class SturmOperator:
    """Three-point stencil; ``diag`` already includes V. ``n == 0`` never occurs.

    A zero-length ``h`` (``h is None``) marks the one-point operator used for a
    zero-dimensional cross-section, whose matrix is just ``[[V]]``.
    """

    diag: np.ndarray
    off: float
    h: float
    bc: str
    length: float

    @property
    def n(self):
        return self.diag.size

    def matrix(self):
        n = self.n
        if self.h is None:
            return sps.csr_matrix(self.diag.reshape(1, 1))
        off = np.full(n - 1, self.off)
        m = sps.diags([off, self.diag, off], [-1, 0, 1], format="lil")
        if self.bc == "periodic":
            m[0, n - 1] = self.off
            m[n - 1, 0] = self.off
        return m.tocsr()

    def dense(self):
        return self.matrix().toarray()


def laplacian_1d(n, length, bc):
    """Bare second-difference stencil as a :class:`SturmOperator`."""
    return assemble_sturm(np.zeros(n), length, bc)


def assemble_sturm(v, length, bc="dirichlet"):
    v = np.asarray(v, dtype=float)
    n = v.size
    if n < 3:
        raise GridTooSmall(f"need at least 3 grid points, got {n}")
    if not length > 0:
        raise InvalidParameter("domain length must be positive")
    if bc == "dirichlet":
        h = length / (n + 1)
    elif bc == "periodic":
        h = length / n
    else:
        raise InvalidParameter(f"unknown boundary condition {bc!r}")
    return SturmOperator(diag=-2.0 / h ** 2 + v, off=1.0 / h ** 2, h=h, bc=bc, length=float(length))


def point_operator(v):
    """The one-point operator [[v]] (cross-section of dimension zero)."""
    return SturmOperator(diag=np.array([float(v)]), off=0.0, h=None, bc="none", length=0.0)


@dataclass(frozen=True)
class SturmSpectrum:
    eigenvalues: np.ndarray  # descending
    eigenvectors: np.ndarray  # orthonormal columns, same order

    @property
    def sup(self):
        return float(self.eigenvalues[0])

    def to_dict(self):
        return {"eigenvalues": self.eigenvalues.tolist(), "sup": self.sup}


def solve_sturm(op, k=None):
    """The k largest eigenpairs (all when k is None), descending."""
    n = op.n
    if k is None:
        k = n
    if not 1 <= k <= n:
        raise InvalidParameter(f"k must be in [1, {n}]")
    if op.h is None:
        w, v = op.diag.copy(), np.eye(1)
    elif op.bc == "dirichlet":
        w, v = eigh_tridiagonal(op.diag, np.full(n - 1, op.off))
    elif n < JACOBI_MAX:
        w, v = jacobi_eigh(op.dense())
    else:
        w, v = np.linalg.eigh(op.dense())
    w, v = w[::-1][:k], v[:, ::-1][:, :k]
    # deterministic sign: largest-magnitude entry positive
    idx = np.argmax(np.abs(v), axis=0)
    v = v * np.sign(v[idx, np.arange(v.shape[1])])
    return SturmSpectrum(eigenvalues=w, eigenvectors=v)


def sup_spectrum(s):
    if s.eigenvalues.size == 0:
        raise InvalidParameter("empty spectrum")
    return s.sup


def limit_operators(V):
    """Sturm operators of V+ and V- for a :class:`CylinderPotential`."""
    if V.zero_dim:
        return point_operator(V.v_plus[0]), point_operator(V.v_minus[0])
    return (assemble_sturm(V.v_plus, V.length, V.bc_x),
            assemble_sturm(V.v_minus, V.length, V.bc_x))


def limit_spectra(V, k=None):
    op_p, op_m = limit_operators(V)
    return solve_sturm(op_p, k), solve_sturm(op_m, k)
