"""Dispersion parabolas of the limit operators, Weyl sequences and coercivity."""
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sps

from .cylinder import assemble_cylinder
from .errors import GridTooShort, InvalidParameter, NotRightOfEssential
from .linalg import BandedLU, lanczos

RETAIN_WINDOW = 25.0


@dataclass(frozen=True)
class Branch:
    side: str  # "+" or "-"
    mu: float
    s: np.ndarray = field(repr=False)
    lam: np.ndarray = field(repr=False)


@dataclass(frozen=True)
class EssentialSpectrumDescriptor:
    branches: tuple  # plotted branches only
    c: float
    sup_re: float
    sup_plus: float
    sup_minus: float
    mu_plus: np.ndarray = field(repr=False)  # every eigenvalue, for membership
    mu_minus: np.ndarray = field(repr=False)

    def summary(self):
        return {"sup_re": self.sup_re, "n_branches": len(self.branches), "c": self.c}

    def rows(self):
        """(branch, s, re, im) rows for CSV output."""
        for b, br in enumerate(self.branches):
            for s, lam in zip(br.s, br.lam):
                yield b, float(s), float(lam.real), float(lam.imag)


def dispersion_curves(sp_plus, sp_minus, c, s_max=None, n_samples=201):
    """Curves mu - s^2 + i c s for every retained Sturm eigenvalue of both limits."""
    if n_samples < 2:
        raise InvalidParameter("need at least two samples per curve")
    mu_p = np.asarray(sp_plus.eigenvalues, dtype=float)
    mu_m = np.asarray(sp_minus.eigenvalues, dtype=float)
    sup_p, sup_m = float(mu_p.max()), float(mu_m.max())
    sup_re = max(sup_p, sup_m)
    floor = sup_re - RETAIN_WINDOW
    kept = [(side, mu) for side, mus in (("+", mu_p), ("-", mu_m)) for mu in mus if mu >= floor]
    if s_max is None:
        lowest = min(mu for _, mu in kept)
        s_max = 3.0 * np.sqrt(sup_re - lowest + 1.0)
    if s_max <= 0:
        raise InvalidParameter("s_max must be positive")
    s = np.linspace(-s_max, s_max, n_samples)
    branches = []
    for side, mu in kept:
        lam = (mu - s * s) + 1j * (c * s)
        branches.append(Branch(side=side, mu=float(mu), s=s, lam=lam))
    return EssentialSpectrumDescriptor(branches=tuple(branches), c=float(c), sup_re=sup_re,
                                       sup_plus=sup_p, sup_minus=sup_m,
                                       mu_plus=mu_p, mu_minus=mu_m)


def membership(lam, d, tol=1e-10):
    """(is_member, distance) of a point to the union of dispersion curves.

    For c != 0 the distance is measured horizontally, at the s fixed by Im lam.
    For c = 0 the curves are the rays (-inf, mu] and the distance is Euclidean.
    """
    lam = complex(lam)
    mus = np.concatenate([d.mu_plus, d.mu_minus])
    if d.c != 0.0:
        s = lam.imag / d.c
        dist = float(np.min(np.abs(lam.real - (mus - s * s))))
    else:
        dist = float(np.hypot(max(lam.real - mus.max(), 0.0), lam.imag))
    return dist <= tol, dist


# ------------------------------------------------------------------ Weyl

class Bump:
    """psi(t) = exp(1 - 1/(1 - (2t - 1)^2)) on (0, 1), zero elsewhere."""

    @staticmethod
    def _parts(t):
        t = np.asarray(t, dtype=float)
        y = 2.0 * t - 1.0
        inside = np.abs(y) < 1.0
        g = np.where(inside, 1.0 - y * y, 1.0)
        psi = np.where(inside, np.exp(1.0 - 1.0 / g), 0.0)
        return y, g, psi

    def __call__(self, t):
        return self._parts(t)[2]

    def d1(self, t):
        y, g, psi = self._parts(t)
        return 2.0 * psi * (-2.0 * y / g ** 2)

    def d2(self, t):
        y, g, psi = self._parts(t)
        p1 = -2.0 * y / g ** 2
        p2 = -2.0 / g ** 2 - 8.0 * y * y / g ** 3
        return 4.0 * psi * (p1 * p1 + p2)

    def norms(self, n=20001):
        t = np.linspace(0.0, 1.0, n)
        return tuple(float(np.sqrt(np.trapezoid(fn(t) ** 2, t))) for fn in (self, self.d1, self.d2))


@dataclass(frozen=True)
class WeylSequence:
    n: int
    a: float
    lam: complex
    z: np.ndarray = field(repr=False)
    u: np.ndarray = field(repr=False)  # u_n on the support window
    phi: np.ndarray = field(repr=False)
    residual: float
    norm_u: float
    bound: float


def weyl_sequence(n, sp, j, a, c, h_z=0.05, z_end=None, psi=None, perturbation=None):
    """phi_j(x) u_n(z), u_n(z) = n^(-1/2) e^(iaz) psi(z/n - n), against the glued operator.

    The residual is ||(L_inf - lam) phi u_n|| / ||phi u_n|| with the discrete
    symbol lam = mu_j - (4/h^2) sin^2(a h/2) + i (c/h) sin(a h), evaluated
    matrix-free on the z-layers covering the support. ``perturbation`` is an
    optional callable q(z) added to the potential (x-independent).
    """
    psi = Bump() if psi is None else psi
    if z_end is None:
        z_end = n * n + n + 1.0
    if n * n + n > z_end:
        raise GridTooShort(f"support [{n * n}, {n * n + n}] exceeds grid end {z_end}")
    mu = float(sp.eigenvalues[j])
    phi = np.asarray(sp.eigenvectors[:, j], dtype=float)
    lo = int(np.floor(n * n / h_z)) - 1
    hi = int(np.ceil((n * n + n) / h_z)) + 1
    z = h_z * np.arange(lo, hi + 1)
    u = n ** -0.5 * np.exp(1j * a * z) * psi(z / n - n)
    d2 = np.zeros_like(u)
    d2[1:-1] = ((1.0 / h_z ** 2 + c / (2 * h_z)) * u[2:] - 2.0 / h_z ** 2 * u[1:-1]
                + (1.0 / h_z ** 2 - c / (2 * h_z)) * u[:-2])
    lam_z = -(4.0 / h_z ** 2) * np.sin(a * h_z / 2) ** 2 + 1j * (c / h_z) * np.sin(a * h_z)
    rz = d2 - lam_z * u
    if perturbation is not None:
        rz = rz + perturbation(z) * u
    # x-part is an exact eigenvector, so (L - lam)(phi u) = phi (r_z)
    norm_u = float(np.sqrt(h_z * np.sum(np.abs(u) ** 2)))
    res = float(np.sqrt(h_z * np.sum(np.abs(rz) ** 2)) / norm_u)
    n0, n1, n2 = psi.norms()
    fn = 0.0 if perturbation is None else float(np.sqrt(h_z * np.sum(np.abs(perturbation(z) * u) ** 2)))
    bound = (fn * n0 + abs(c + 2j * a) * n1 / n + n2 / n ** 2) / n0
    lam = mu + lam_z
    return WeylSequence(n=n, a=a, lam=complex(lam), z=z, u=u, phi=phi, residual=res,
                        norm_u=norm_u, bound=float(bound))


def weyl_rate(ns, sp, j, a, c, **kw):
    """Least-squares slope of log residual against log n."""
    res = np.array([weyl_sequence(n, sp, j, a, c, **kw).residual for n in ns])
    slope = np.polyfit(np.log(ns), np.log(res), 1)[0]
    return float(slope), res


# ------------------------------------------------------------- coercivity

def coercivity_estimate(V, c, lam0, sup_re, bc_z="dirichlet", tol=1e-10, seed=0):
    """Smallest singular value of (lam0 - L_inf) on the glued potential.

    Computed as 1/sqrt of the dominant eigenvalue of ((lam0-L)^H (lam0-L))^-1,
    i.e. inverse iteration on the normal operator, accelerated by Lanczos.
    """
    if np.real(lam0) <= sup_re:
        raise NotRightOfEssential(f"Re lam0 = {np.real(lam0)} <= sup_re = {sup_re}")
    op = assemble_cylinder(V.glued(), c, bc_z)
    N = op.size
    A = complex(lam0) * sps.identity(N) - op.matrix
    lu = BandedLU(A, perm=op.permutation(), dtype=np.complex128)
    theta, _, _ = lanczos(lambda v: lu.solve(lu.solve_h(v)), N, 1, dtype=np.complex128,
                          tol=tol, seed=seed)
    return float(1.0 / np.sqrt(theta[0].real))
