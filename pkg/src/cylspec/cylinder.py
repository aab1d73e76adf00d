"""Discretized cylinder operator d_xx + d_zz + c d_z + V and its eigenvalues."""
from dataclasses import dataclass, field, replace

import numpy as np
import scipy.io
import scipy.linalg
import scipy.sparse as sps

from . import _accel
from .errors import (ConvergenceFailure, GridTooSmall, InvalidParameter,
                     SingularFactorization, Unsupported, WeightOverflow)
from .linalg import BandedLU, arnoldi, lanczos
from .sturm1d import laplacian_1d

DENSE_MAX = 200


def z_stencil(n, h, c, bc="dirichlet"):
    """Tridiagonal (circulant when periodic) matrix of d_zz + c d_z."""
    lo = 1.0 / h ** 2 - c / (2.0 * h)
    up = 1.0 / h ** 2 + c / (2.0 * h)
    m = sps.diags([np.full(n - 1, lo), np.full(n, -2.0 / h ** 2), np.full(n - 1, up)],
                  [-1, 0, 1], format="lil")
    if bc == "periodic":
        m[0, n - 1] += lo
        m[n - 1, 0] += up
    elif bc != "dirichlet":
        raise InvalidParameter(f"unknown boundary condition {bc!r}")
    return m.tocsr()


def fold_permutation(n_z, n_x):
    """Reorder z-layers as 0, n-1, 1, n-2, ... so a ring of layers becomes a band."""
    order = np.empty(n_z, dtype=np.int64)
    order[0::2] = np.arange((n_z + 1) // 2)
    order[1::2] = n_z - 1 - np.arange(n_z // 2)
    return (order[:, None] * n_x + np.arange(n_x)[None, :]).ravel()


@dataclass(frozen=True)
class DiscreteOperator:
    """Sparse matrix in z-major ordering: unknown (x_i, z_j) has index j*n_x + i."""

    matrix: sps.csr_matrix = field(repr=False)
    n_x: int
    n_z: int
    h_x: float
    h_z: float
    bc_x: str
    bc_z: str
    c: float
    symmetrized: bool = False
    log_weights: np.ndarray = field(default=None, repr=False)  # per z-layer

    @property
    def shape(self):
        return self.matrix.shape

    @property
    def size(self):
        return self.matrix.shape[0]

    def permutation(self):
        return fold_permutation(self.n_z, self.n_x) if self.bc_z == "periodic" else None

    def __matmul__(self, u):
        return self.matrix @ u

    def dense(self):
        return self.matrix.toarray()

    def to_grid(self, u):
        """Flat vector -> (n_x, n_z) array indexed [i, j]."""
        return np.asarray(u).reshape(self.n_z, self.n_x).T

    def from_grid(self, arr):
        return np.asarray(arr).T.ravel()

    def weights(self):
        """Diagonal of the similarity D with D L D^-1 symmetric (unsymmetrized coordinates)."""
        if self.log_weights is None:
            return np.ones(self.size)
        return np.repeat(np.exp(self.log_weights), self.n_x)

    def write_matrix_market(self, path):
        scipy.io.mmwrite(str(path), self.matrix, comment="z-major ordering: index = j*n_x + i")


def assemble_cylinder(V, c, bc_z="dirichlet"):
    """L = I_z (x) A_x + A_z (x) I_x + diag(V) on the potential's grids."""
    z = V.z_grid
    if z.size < 3:
        raise GridTooSmall("z-grid needs at least 3 points")
    h_z = V.h_z
    if V.zero_dim:
        a_x = sps.csr_matrix((1, 1))
        h_x = None
    else:
        if V.n_x < 3:
            raise GridTooSmall("x-grid needs at least 3 points")
        ax = laplacian_1d(V.n_x, V.length, V.bc_x)
        a_x, h_x = ax.matrix(), ax.h
    a_z = z_stencil(V.n_z, h_z, c, bc_z)
    n_x = V.n_x
    L = (sps.kron(sps.identity(V.n_z), a_x) + sps.kron(a_z, sps.identity(n_x))
         + sps.diags(V.values.T.ravel()))
    L = sps.csr_matrix(L)
    L.sum_duplicates()
    L.eliminate_zeros()
    return DiscreteOperator(matrix=L, n_x=n_x, n_z=V.n_z, h_x=h_x, h_z=h_z,
                            bc_x=V.bc_x if not V.zero_dim else "none", bc_z=bc_z, c=float(c))


def symmetrize(op):
    """Diagonal similarity over z-layers making the operator symmetric.

    Layer j is scaled by r^(j/2), r = (1 + c h/2)/(1 - c h/2); the z-coupling
    becomes sqrt(1/h^4 - c^2/(4 h^2)) in both directions.
    """
    if op.bc_z != "dirichlet":
        raise Unsupported("symmetrization needs Dirichlet conditions in z")
    c, h = op.c, op.h_z
    if abs(c) * h >= 2.0:
        raise WeightOverflow(f"|c| h_z = {abs(c) * h:.3g} >= 2")
    if c == 0.0:
        return replace(op, symmetrized=True, log_weights=np.zeros(op.n_z))
    n_x, n_z = op.n_x, op.n_z
    lo = 1.0 / h ** 2 - c / (2.0 * h)
    up = 1.0 / h ** 2 + c / (2.0 * h)
    sym = np.sqrt(lo * up)
    coo = op.matrix.tocoo()
    data = coo.data.copy()
    dz = coo.col // n_x - coo.row // n_x
    data[dz != 0] = sym  # every cross-layer entry is a z-coupling
    m = sps.csr_matrix((data, (coo.row, coo.col)), shape=coo.shape)
    m = (m + m.T) * 0.5  # exact: already symmetric, this only fixes rounding of diag sums
    log_r = np.log1p(c * h / 2.0) - np.log1p(-c * h / 2.0)
    return replace(op, matrix=sps.csr_matrix(m), symmetrized=True,
                   log_weights=0.5 * log_r * np.arange(n_z))


@dataclass
class EigenResult:
    eigenvalues: np.ndarray  # complex, ordered by distance to the shift
    vectors: np.ndarray = field(repr=False)
    residuals: np.ndarray
    solver: dict

    def to_dict(self):
        return {
            "pairs": [{"re": float(l.real), "im": float(l.imag), "residual": float(r)}
                      for l, r in zip(self.eigenvalues, self.residuals)],
            "solver": self.solver,
        }


def residual(op, lam, u):
    """||op u - lam u|| / ||u||."""
    u = np.asarray(u)
    nu = np.linalg.norm(u)
    if nu == 0:
        raise InvalidParameter("zero vector")
    m = op.matrix if isinstance(op, DiscreteOperator) else op
    return float(np.linalg.norm(m @ u - lam * u) / nu)


def _residuals(op, lams, X):
    R = op.matrix @ X - X * lams[None, :]
    return np.linalg.norm(R, axis=0) / np.linalg.norm(X, axis=0)


def _dense_eigs(op, k, shift, hermitian):
    A = op.dense()
    if hermitian:
        w, X = scipy.linalg.eigh(A)
    else:
        w, X = scipy.linalg.eig(A)
    order = np.argsort(np.abs(w - shift), kind="stable")[:k]
    return w[order], X[:, order], {"method": "dense"}


def _shift_invert(op, k, shift, hermitian, seed, tol, m):
    N = op.size
    dtype = np.float64 if hermitian else np.complex128
    sigma = shift
    last_err = None
    for attempt in range(4):
        try:
            lu = BandedLU(op.matrix - sigma * sps.identity(N), perm=op.permutation(), dtype=dtype)
            break
        except SingularFactorization as err:
            last_err = err
            sigma = sigma + 1e-8 * (1.0 + abs(sigma)) * 10.0 ** attempt
    else:
        raise SingularFactorization(f"shift {shift} hits the spectrum: {last_err}")
    solver = lanczos if hermitian else arnoldi
    err = None
    for attempt in range(3):
        try:
            theta, X, info = solver(lu.solve, N, k, m=m, tol=tol, seed=seed + attempt)
            break
        except ConvergenceFailure as e:
            err = e
    else:
        raise err
    lams = sigma + 1.0 / theta
    info.update({"method": "shift-invert", "shift": [float(np.real(sigma)), float(np.imag(sigma))],
                 "backend": _accel.backend(), "bandwidth": [lu.kl, lu.ku]})
    return lams, X, info


def _finish(op, lams, X, shift, info, hermitian):
    if hermitian:
        X = np.real_if_close(X)
        # Rayleigh quotients are second-order accurate for symmetric problems
        lams = np.einsum("ij,ij->j", X.conj(), op.matrix @ X).real / np.einsum("ij,ij->j", X.conj(), X).real
    X = X / np.linalg.norm(X, axis=0)
    lams = np.asarray(lams, dtype=complex)
    order = np.argsort(np.abs(lams - shift), kind="stable")
    lams, X = lams[order], X[:, order]
    res = _residuals(op, lams, X)
    return EigenResult(eigenvalues=lams, vectors=X, residuals=res, solver=_jsonable(info))


def _jsonable(info):
    out = {}
    for key, val in info.items():
        if isinstance(val, np.ndarray):
            val = val.tolist()
        elif isinstance(val, np.generic):
            val = val.item()
        out[key] = val
    return out


def eig_symmetric(op, k, target, seed=0, tol=1e-12, m=None):
    """k eigenpairs nearest ``target`` of a symmetric operator (shift-invert Lanczos)."""
    if (op.matrix - op.matrix.T).count_nonzero():
        raise InvalidParameter("operator is not symmetric")
    k = min(k, op.size)
    target = float(np.real(target))
    if op.size <= DENSE_MAX:
        lams, X, info = _dense_eigs(op, k, target, True)
    else:
        lams, X, info = _shift_invert(op, k, target, True, seed, tol, m)
    info["subspace"] = info.get("subspace", op.size)
    return _finish(op, lams, X, target, info, True)


def eig_general(op, k, shift, seed=0, tol=1e-12, m=None):
    """k Ritz pairs nearest ``shift`` by shift-invert Arnoldi over the complex field."""
    k = min(k, op.size)
    shift = complex(shift)
    if op.size <= DENSE_MAX:
        lams, X, info = _dense_eigs(op, k, shift, False)
    else:
        lams, X, info = _shift_invert(op, k, shift, False, seed, tol, m)
    return _finish(op, lams, X, shift, info, False)


# ------------------------------------------------------------ dispersion set

def dispersion_set(mu_h, c, h_z, n_z):
    """Discrete symbols mu - (4/h^2) sin^2(s h/2) + i (c/h) sin(s h), s = 2 pi k / P.

    Returned as an (len(mu), n_z) array; column k corresponds to s_k with
    k taken in the symmetric range so that |s| is minimal.
    """
    s = dispersion_frequencies(h_z, n_z)
    sym = -(4.0 / h_z ** 2) * np.sin(s * h_z / 2.0) ** 2 + 1j * (c / h_z) * np.sin(s * h_z)
    return np.asarray(mu_h)[:, None] + sym[None, :], s


def dispersion_frequencies(h_z, n_z):
    P = n_z * h_z
    k = np.fft.fftfreq(n_z, d=1.0 / n_z)
    return 2.0 * np.pi * k / P


@dataclass
class DispersionMatch:
    distance: float
    distances: np.ndarray
    branch: np.ndarray  # index into mu (descending Sturm order)
    frequency: np.ndarray  # s of the matched point
    continuum_gap: np.ndarray  # |discrete - (mu - s^2 + i c s)| at the matched (mu, s)


def match_dispersion(eigs, mu_h, c, h_z, n_z):
    pts, s = dispersion_set(mu_h, c, h_z, n_z)
    flat = pts.ravel()
    eigs = np.asarray(eigs, dtype=complex)
    d = np.abs(eigs[:, None] - flat[None, :])
    idx = np.argmin(d, axis=1)
    bi, si = np.unravel_index(idx, pts.shape)
    mu = np.asarray(mu_h)[bi]
    cont = mu - s[si] ** 2 + 1j * c * s[si]
    return DispersionMatch(distance=float(d[np.arange(len(eigs)), idx].max()),
                           distances=d[np.arange(len(eigs)), idx], branch=bi,
                           frequency=s[si], continuum_gap=np.abs(pts[bi, si] - cont))


def dispersion_check(V, c, k=12, shift=None, seed=0, details=False):
    """Max distance of computed eigenvalues to the discrete dispersion set.

    ``V`` must be constant in z; the z-grid is treated as periodic with
    period n_z h_z.
    """
    from .sturm1d import limit_operators, solve_sturm

    if np.max(np.abs(V.values - V.v_plus[:, None])) > 0:
        raise InvalidParameter("potential must equal its + limit at every z")
    op = assemble_cylinder(V, c, "periodic")
    sp = solve_sturm(limit_operators(V)[0])
    if shift is None:
        shift = sp.sup + 0.1
    res = eig_general(op, k, shift, seed=seed)
    match = match_dispersion(res.eigenvalues, sp.eigenvalues, c, op.h_z, op.n_z)
    if details:
        return match, res
    return match.distance


# -------------------------------------------------------------- realness

@dataclass
class RealnessReport:
    sup_re_ess: float
    right_eigs: np.ndarray
    max_imag: float
    matched: np.ndarray  # symmetrized eigenvalue paired with each right eig
    gaps: np.ndarray
    tol: float

    @property
    def empty(self):
        return self.right_eigs.size == 0

    @property
    def passed(self):
        if self.empty:
            return True
        return bool(self.max_imag <= self.tol and np.max(self.gaps) <= self.tol)

    def to_dict(self):
        return {
            "sup_re_ess": self.sup_re_ess,
            "n_right": int(self.right_eigs.size),
            "empty": self.empty,
            "right_eigs": [{"re": float(l.real), "im": float(l.imag)} for l in self.right_eigs],
            "max_imag": self.max_imag,
            "matched": [float(m) for m in self.matched],
            "gaps": [float(g) for g in self.gaps],
            "tol": self.tol,
            "pass": self.passed,
        }


def verify_realness(res, sup_re_ess, tol=1e-8, symmetric_eigs=()):
    lams = np.asarray(res.eigenvalues, dtype=complex)
    right = lams[lams.real > sup_re_ess]
    right = right[np.argsort(-right.real, kind="stable")]
    sym = np.asarray(symmetric_eigs, dtype=float)
    if right.size and sym.size:
        d = np.abs(right[:, None] - sym[None, :])
        j = np.argmin(d, axis=1)
        matched, gaps = sym[j], d[np.arange(right.size), j]
    else:
        matched = np.full(right.size, np.nan)
        gaps = np.full(right.size, np.inf)
    max_imag = float(np.max(np.abs(right.imag))) if right.size else 0.0
    return RealnessReport(sup_re_ess=float(sup_re_ess), right_eigs=right, max_imag=max_imag,
                          matched=matched, gaps=gaps, tol=tol)


# ----------------------------------------------------------- translation mode

def goldstone_residual(front, h, Z):
    """Sup-norm residual of the sampled front derivative at lambda = 0.

    Boundary rows use the exact derivative at the two ghost points, so the
    number measures interior consistency only (O(h^2)).
    """
    from .profiles import front_potential

    n = int(round(2.0 * Z / h)) - 1
    z = -Z + h * np.arange(1, n + 1)
    V = front_potential(front, z)
    op = assemble_cylinder(V, front.c, "dirichlet")
    u = front.derivative(z)
    r = op.matrix @ u
    lo = 1.0 / h ** 2 - front.c / (2.0 * h)
    up = 1.0 / h ** 2 + front.c / (2.0 * h)
    r[0] += lo * front.derivative(-Z)
    r[-1] += up * front.derivative(Z)
    return float(np.max(np.abs(r)))
