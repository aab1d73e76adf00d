"""First-order reformulation in z: limit matrices, bi-semigroups, decay."""
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidParameter, InvalidWindow, NotHyperbolic, NotRightOfEssential
from .profiles import gap_curves


def principal_sqrt(w):
    """Square root with argument in (-pi/2, pi/2]."""
    w = np.asarray(w, dtype=complex)
    # +0.0 turns a negative-zero imaginary part positive, so sqrt(-x) = +i sqrt(x)
    return np.sqrt(w.real + 1j * (w.imag + 0.0))


@dataclass(frozen=True)
class LimitSystem:
    mu: np.ndarray
    lambda0: complex
    c: float
    A: np.ndarray = field(repr=False)

    @property
    def n(self):
        return self.mu.size


def _companion(diag_entries):
    n = diag_entries.size
    A = np.zeros((2 * n, 2 * n), dtype=complex)
    A[:n, n:] = np.eye(n)
    A[n:, :n] = np.diag(diag_entries)
    return A


def limit_matrices(sp, lambda0, c, n=None):
    """[[0, I], [diag(lambda0 + c^2/4 - mu_j), 0]] over the n leading Sturm modes."""
    mu = np.asarray(sp.eigenvalues if hasattr(sp, "eigenvalues") else sp, dtype=float)
    if n is None:
        n = mu.size
    if not 1 <= n <= mu.size:
        raise InvalidParameter(f"n must be in [1, {mu.size}]")
    mu = mu[:n]
    lambda0 = complex(lambda0)
    return LimitSystem(mu=mu, lambda0=lambda0, c=float(c),
                       A=_companion(lambda0 + c * c / 4.0 - mu))


def sqrt_spectrum(lambda0, c, mu):
    """(n, 2) array of (+root, -root) of lambda0 + c^2/4 - mu."""
    r = principal_sqrt(complex(lambda0) + c * c / 4.0 - np.asarray(mu, dtype=float))
    return np.stack([r, -r], axis=-1)


@dataclass(frozen=True)
class BiSemigroupRealization:
    gamma_sq: np.ndarray
    beta: float
    S: np.ndarray  # diagonal entries
    W: np.ndarray = field(repr=False)
    W_inv: np.ndarray = field(repr=False)
    P_s: np.ndarray = field(repr=False)
    P_u: np.ndarray = field(repr=False)
    nu: float
    alpha: float

    @property
    def n(self):
        return self.S.size

    def generator(self):
        """W^-1 diag(-S, S) W."""
        return self.W_inv @ (np.concatenate([-self.S, self.S])[:, None] * self.W)

    def stable_flow(self, z):
        """e^(-S z) on range(P_s), zero on range(P_u), for z >= 0."""
        n = self.n
        d = np.concatenate([np.exp(-self.S * z), np.zeros(n)])
        return self.W_inv @ (d[:, None] * self.W)

    def unstable_flow(self, z):
        """e^(-S z) on range(P_u) (the backward flow), for z >= 0."""
        n = self.n
        d = np.concatenate([np.zeros(n), np.exp(-self.S * z)])
        return self.W_inv @ (d[:, None] * self.W)

    def split(self, Y):
        """Coordinates (y_s, y_u) = W Y; Y may carry trailing sample axes."""
        y = self.W @ Y
        return y[:self.n], y[self.n:]

    def condition(self):
        return float(np.linalg.norm(self.W, 2) * np.linalg.norm(self.W_inv, 2))


def build_bisemigroup(mu, lambda0, c):
    mu = np.asarray(mu, dtype=float)
    lambda0 = complex(lambda0)
    gamma_sq = lambda0.real + c * c / 4.0 - mu
    alpha = float(gamma_sq.min())
    if alpha <= 0:
        raise NotHyperbolic(f"min gamma^2 = {alpha:.6g} <= 0")
    beta = lambda0.imag
    S = principal_sqrt(gamma_sq + 1j * beta)
    n = mu.size
    I = np.eye(n)
    s2 = 1.0 / np.sqrt(2.0)
    Sd, Si = np.diag(S), np.diag(1.0 / S)
    W = s2 * np.block([[Sd, -I], [Sd, I]])
    W_inv = s2 * np.block([[Si, Si], [-I, I]])
    sel_s = np.diag(np.concatenate([np.ones(n), np.zeros(n)]))
    P_s = W_inv @ sel_s @ W
    P_u = W_inv @ (np.eye(2 * n) - sel_s) @ W
    return BiSemigroupRealization(gamma_sq=gamma_sq, beta=beta, S=S, W=W, W_inv=W_inv,
                                  P_s=P_s, P_u=P_u, nu=float(S.real.min()), alpha=alpha)


def decay_bound(lambda0, c, sup_re_ess):
    """(alpha*, sqrt(alpha*)) with alpha* = Re lambda0 - sup_re_ess + c^2/4."""
    re = float(np.real(lambda0))
    if re <= sup_re_ess:
        raise NotRightOfEssential(f"Re lambda0 = {re} <= {sup_re_ess}")
    alpha_star = re - sup_re_ess + c * c / 4.0
    bound = float(np.sqrt(alpha_star))
    assert bound > abs(c) / 2.0
    return alpha_star, bound


def bnorm_curve(V):
    """(z+, g+, z-, g-): certified bounds on the perturbation norms ||B+-(z)||."""
    return gap_curves(V)


def perturbation_blocks(V, side, basis):
    """B+-(z_j) restricted to a Sturm basis: [[0, 0], [Phi^T diag(V+- - V) Phi, 0]].

    Returns an (n_z, 2n, 2n) array over the full z-grid.
    """
    lim = V.v_plus if side == "+" else V.v_minus
    gap = lim[:, None] - V.values  # (n_x, n_z)
    phi = np.asarray(basis, dtype=float)
    n = phi.shape[1]
    inner = np.einsum("xi,xz,xj->zij", phi, gap, phi)
    out = np.zeros((V.n_z, 2 * n, 2 * n))
    out[:, n:, :n] = inner
    return out


def mild_residual(z, Y, bs, B=None):
    """Sup over interior grid points of the defect in the variation-of-constants identity.

    ``Y`` is (2n, len(z)) on a uniform grid from a = z[0] to b = z[-1]; ``B``
    is None or a (len(z), 2n, 2n) array of perturbation matrices. The stable
    part is propagated forward from a, the unstable part backward from b;
    both convolution integrals use the trapezoid rule on the same grid.
    """
    z = np.asarray(z, dtype=float)
    Y = np.asarray(Y, dtype=complex)
    m = z.size
    h = z[1] - z[0]
    if not np.allclose(np.diff(z), h, rtol=1e-9, atol=0):
        raise InvalidParameter("trajectory grid must be uniform")
    ys, yu = bs.split(Y)
    if B is None:
        fs = np.zeros_like(ys)
        fu = np.zeros_like(yu)
    else:
        F = np.einsum("zij,jz->iz", np.asarray(B), Y)
        fs, fu = bs.split(F)
    E = np.exp(-bs.S * h)[:, None]
    Is = np.zeros_like(ys)
    for i in range(1, m):
        Is[:, i] = E[:, 0] * Is[:, i - 1] + 0.5 * h * (E[:, 0] * fs[:, i - 1] + fs[:, i])
    Iu = np.zeros_like(yu)
    for i in range(m - 2, -1, -1):
        Iu[:, i] = E[:, 0] * Iu[:, i + 1] + 0.5 * h * (E[:, 0] * fu[:, i + 1] + fu[:, i])
    ds = z - z[0]
    du = z[-1] - z
    rs = np.exp(-np.outer(bs.S, ds)) * ys[:, :1] + Is
    ru = np.exp(-np.outer(bs.S, du)) * yu[:, -1:] - Iu
    rhs = bs.W_inv @ np.vstack([rs, ru])
    defect = np.linalg.norm(Y - rhs, axis=0)
    return float(defect[1:-1].max()) if m > 2 else 0.0


@dataclass(frozen=True)
class DecayEstimate:
    delta_hat: float
    M_hat: float
    window: tuple
    fit_quality: float

    def to_dict(self):
        return {"delta_hat": self.delta_hat, "M_hat": self.M_hat,
                "window": list(self.window), "fit_quality": self.fit_quality}


def default_window(Z):
    """Outer 40% of [0, Z] minus the last 5% next to the truncation boundary."""
    return (0.6 * Z, 0.95 * Z)


def fit_decay(z, norms, window):
    z = np.asarray(z, dtype=float)
    norms = np.asarray(norms, dtype=float)
    sel = (z >= window[0]) & (z <= window[1])
    if sel.sum() < 2:
        raise InvalidWindow("fewer than two samples in the fit window")
    if np.any(norms[sel] <= 0):
        raise InvalidWindow("nonpositive norm inside the fit window")
    zz, ln = z[sel], np.log(norms[sel])
    slope, intercept = np.polyfit(zz, ln, 1)
    pred = slope * zz + intercept
    ss_tot = float(np.sum((ln - ln.mean()) ** 2))
    r2 = 1.0 - float(np.sum((ln - pred) ** 2)) / ss_tot if ss_tot > 0 else 1.0
    return DecayEstimate(delta_hat=float(-slope), M_hat=float(np.exp(intercept)),
                         window=(float(window[0]), float(window[1])),
                         fit_quality=float(min(max(r2, 0.0), 1.0)))


@dataclass(frozen=True)
class GronwallReport:
    passed: bool
    max_violation: float
    tolerance: float
    delta_hat: float
    N_hat: float

    def to_dict(self):
        return {"pass": self.passed, "max_violation": self.max_violation,
                "tolerance": self.tolerance, "delta_hat": self.delta_hat, "N_hat": self.N_hat}


def gronwall_verify(z, norms, nu, M, Fcurve, window=None, tol=None):
    """Check ||u(z)|| <= M e^(-nu (z-a)) + M int_a^b e^(-nu|z-s|) F(s) ||u(s)|| ds pointwise.

    Returns a :class:`GronwallReport`; the decay rate and prefactor of the
    conclusion are fitted on ``window`` (default: the whole ray).
    """
    z = np.asarray(z, dtype=float)
    u = np.asarray(norms, dtype=float)
    F = np.asarray(Fcurve, dtype=float)
    h = z[1] - z[0]
    if tol is None:
        tol = 10.0 * h * h
    a = z[0]
    integrand = F * u
    kern = np.exp(-nu * np.abs(z[:, None] - z[None, :]))
    w = np.full(z.size, h)
    w[0] = w[-1] = 0.5 * h
    integral = kern @ (w * integrand)
    rhs = M * np.exp(-nu * (z - a)) + M * integral
    violation = float(np.max(u - rhs))
    if window is None:
        window = (z[0], z[-1])
    fit = fit_decay(z, u, window)
    return GronwallReport(passed=bool(violation <= tol), max_violation=violation,
                          tolerance=float(tol), delta_hat=fit.delta_hat, N_hat=fit.M_hat)


@dataclass(frozen=True)
class AllenCahnSystem:
    A_minus: np.ndarray
    A_plus: np.ndarray
    eig_minus: np.ndarray
    eig_plus: np.ndarray
    gap: float


def allen_cahn_matrices(f, lambda0, c, limits=(1.0, 0.0)):
    """2x2 limit matrices of the scalar front problem; ``limits`` = (u-, u+)."""
    lambda0 = complex(lambda0)
    fp = [float(f.deriv(u)) for u in limits]
    if lambda0.real <= max(fp):
        raise NotRightOfEssential(f"Re lambda0 = {lambda0.real} <= {max(fp)}")
    mats, eigs = [], []
    for d in fp:
        entry = lambda0 + c * c / 4.0 - d
        mats.append(np.array([[0.0, 1.0], [entry, 0.0]], dtype=complex))
        eigs.append(sqrt_spectrum(lambda0, c, [d])[0])
    gap = float(min(e[0].real for e in eigs))
    assert gap > abs(c) / 2.0
    return AllenCahnSystem(A_minus=mats[0], A_plus=mats[1], eig_minus=eigs[0],
                           eig_plus=eigs[1], gap=gap)
