"""Bistable nonlinearities, 1D wave profiles and sampled cylinder potentials."""
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import legendre
from scipy.special import expit

from .errors import BracketFailure, InvalidParameter, NoPeriodicOrbit

SQRT2 = np.sqrt(2.0)


@dataclass(frozen=True)
class Nonlinearity:
    """The cubic f(u) = u(1-u)(u-a) and its antiderivative F with F(0) = 0."""

    a: float

    @property
    def roots(self):
        return (0.0, self.a, 1.0)

    def eval(self, u):
        u = np.asarray(u, dtype=float)
        return u * (1.0 - u) * (u - self.a)

    __call__ = eval

    def deriv(self, u):
        u = np.asarray(u, dtype=float)
        return -3.0 * u * u + 2.0 * (1.0 + self.a) * u - self.a

    def deriv2(self, u):
        u = np.asarray(u, dtype=float)
        return -6.0 * u + 2.0 * (1.0 + self.a)

    def antideriv(self, u):
        u = np.asarray(u, dtype=float)
        a = self.a
        return u * u * (-u * u / 4.0 + (1.0 + a) * u / 3.0 - a / 2.0)

    def energy_poly(self, E):
        """Coefficients (highest first) of the quartic E - F(w)."""
        a = self.a
        return np.array([0.25, -(1.0 + a) / 3.0, a / 2.0, 0.0, E])


def make_cubic(a):
    a = float(a)
    if not 0.0 < a < 1.0:
        raise InvalidParameter(f"cubic parameter must lie in (0, 1), got {a}")
    return Nonlinearity(a)


@dataclass(frozen=True)
class FrontProfile:
    z: np.ndarray
    u: np.ndarray
    c: float
    limits: tuple  # (u_minus, u_plus)
    f: Nonlinearity

    def profile(self, z):
        return expit(-np.asarray(z, dtype=float) / SQRT2)

    def derivative(self, z):
        p = self.profile(z)
        return -p * (1.0 - p) / SQRT2

    def second_derivative(self, z):
        p = self.profile(z)
        return p * (1.0 - p) * (1.0 - 2.0 * p) / 2.0

    def residual(self, z=None):
        """Sup norm of u'' + c u' + f(u) evaluated from the closed form."""
        z = self.z if z is None else np.asarray(z, dtype=float)
        r = self.second_derivative(z) + self.c * self.derivative(z) + self.f(self.profile(z))
        return float(np.max(np.abs(r)))


def exact_front(a, z=None):
    """Closed-form front of the cubic, decreasing from 1 at -inf to 0 at +inf.

    The speed is sqrt(2)(1/2 - a) >= 0; with this orientation the state 0
    invades when a < 1/2, and a = 1/2 gives the standing front.
    """
    f = make_cubic(a)
    if not 0.0 < f.a <= 0.5:
        raise InvalidParameter(f"front requires a in (0, 1/2], got {a}")
    if z is None:
        z = np.linspace(-20.0, 20.0, 401)
    z = np.asarray(z, dtype=float)
    c = SQRT2 * (0.5 - f.a)
    return FrontProfile(z=z, u=expit(-z / SQRT2), c=c, limits=(1.0, 0.0), f=f)


# ---------------------------------------------------------------- periodic waves

def _bisect(g, lo, hi, tol=1e-12, max_iter=200):
    """Root of a continuous g with g(lo), g(hi) of opposite sign."""
    glo = g(lo)
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if hi - lo <= tol or mid in (lo, hi):
            break
        gm = g(mid)
        if (gm > 0) == (glo > 0):
            lo, glo = mid, gm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def turning_points(f, E):
    """Solutions w- < a < w+ of F(w) = E, for F(a) < E < min(F(0), F(1))."""
    g = lambda w: float(f.antideriv(w)) - E
    return _bisect(g, 0.0, f.a, tol=0.0), _bisect(g, f.a, 1.0, tol=0.0)


_GL_NODES, _GL_WEIGHTS = legendre.leggauss(16)
_PANELS = 4  # 4 panels x 16 nodes


def _quad_nodes():
    edges = np.linspace(-np.pi / 2, np.pi / 2, _PANELS + 1)
    half = 0.5 * (edges[1:] - edges[:-1])
    mid = 0.5 * (edges[1:] + edges[:-1])
    t = (mid[:, None] + half[:, None] * _GL_NODES[None, :]).ravel()
    wts = (half[:, None] * _GL_WEIGHTS[None, :]).ravel()
    return t, wts


_T_NODES, _T_WEIGHTS = _quad_nodes()


def period(f, E):
    """Period of the closed orbit of w'' + f(w) = 0 at energy E.

    E - F(w) = (w - w-)(w+ - w) q(w) with q a positive quadratic, so after
    w = m + r sin t the integrand is sqrt(2 / q(w)), smooth on [-pi/2, pi/2].
    """
    wm, wp = turning_points(f, E)
    quad, _ = np.polydiv(f.energy_poly(E), np.poly1d([1.0, -(wm + wp), wm * wp]).coeffs)
    m, r = 0.5 * (wp + wm), 0.5 * (wp - wm)
    w = m + r * np.sin(_T_NODES)
    q = -np.polyval(quad, w)
    return float(np.sum(_T_WEIGHTS * np.sqrt(2.0 / q)))


def min_period(f):
    return 2.0 * np.pi / np.sqrt(float(f.deriv(f.a)))


@dataclass(frozen=True)
class StandingWaveProfile:
    L: float
    E: float
    x: np.ndarray  # 0 .. L inclusive
    w: np.ndarray
    turning_points: tuple
    f: Nonlinearity = field(repr=False)

    def _coeffs(self):
        return np.fft.rfft(self.w[:-1])

    def __call__(self, x):
        """Trigonometric interpolation of the samples at arbitrary x."""
        x = np.asarray(x, dtype=float)
        n = self.w.size - 1
        coef = self._coeffs() / n
        k = np.arange(coef.size)
        scale = np.where((k == 0) | ((n % 2 == 0) & (k == n // 2)), 1.0, 2.0)
        phase = np.exp(2j * np.pi * np.multiply.outer(x, k) / self.L)
        return np.real(phase @ (coef * scale))

    def second_derivative(self):
        n = self.w.size - 1
        k = np.fft.rfftfreq(n, d=self.L / n) * 2.0 * np.pi
        w2 = np.fft.irfft(-(k ** 2) * self._coeffs(), n)
        return np.append(w2, w2[0])

    def residual(self):
        return float(np.max(np.abs(self.second_derivative() + self.f(self.w))))


def _rk4_half_period(f, w0, L, steps):
    h = L / (2 * steps)
    out = np.empty(steps + 1)
    y = np.array([w0, 0.0])
    rhs = lambda y: np.array([y[1], -float(f(y[0]))])
    out[0] = w0
    for i in range(steps):
        k1 = rhs(y)
        k2 = rhs(y + 0.5 * h * k1)
        k3 = rhs(y + 0.5 * h * k2)
        k4 = rhs(y + h * k3)
        y = y + h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
        out[i + 1] = y[0]
    return out


def periodic_wave(f, L, tol=1e-12, n=2048):
    """The L-periodic solution of w'' + f(w) = 0 oscillating about a.

    Samples start at the minimum w-, so w(0) = w(L) = w-. The first half
    period is integrated with RK4 (step L/n) and mirrored, which makes the
    sampled profile exactly even about L/2.
    """
    L = float(L)
    if tol <= 0:
        raise InvalidParameter("tol must be positive")
    if n % 2:
        raise InvalidParameter("sample count must be even")
    lmin = min_period(f)
    if L <= lmin:
        raise NoPeriodicOrbit(f"L={L} does not exceed the minimal period {lmin:.12g}")
    e_lo = float(f.antideriv(f.a))
    e_hi = min(float(f.antideriv(0.0)), float(f.antideriv(1.0)))
    span = e_hi - e_lo
    lo, hi = e_lo + 1e-3 * span, e_hi - 1e-3 * span
    eps = 1e-3
    while period(f, lo) >= L:
        eps *= 0.1
        if eps < 1e-15:
            raise BracketFailure("target period too close to the minimal period")
        lo = e_lo + eps * span
    eps = 1e-3
    while period(f, hi) <= L:
        eps *= 0.1
        if eps < 1e-15:
            raise BracketFailure("target period beyond the sampled energy range")
        hi = e_hi - eps * span
    for _ in range(200):
        E = 0.5 * (lo + hi)
        T = period(f, E)
        if abs(T - L) <= tol or E in (lo, hi):
            break
        if T < L:
            lo = E
        else:
            hi = E
    wm, wp = turning_points(f, E)
    half = _rk4_half_period(f, wm, L, n // 2)
    w = np.concatenate([half, half[-2::-1]])
    x = np.linspace(0.0, L, n + 1)
    return StandingWaveProfile(L=L, E=E, x=x, w=w, turning_points=(wm, wp), f=f)


# ----------------------------------------------------------------- potentials

def interior_grid(length, n, bc):
    """x-grid on (0, length): interior points for Dirichlet, left-closed for periodic."""
    if bc == "dirichlet":
        return length * np.arange(1, n + 1) / (n + 1)
    if bc == "periodic":
        return length * np.arange(n) / n
    raise InvalidParameter(f"unknown boundary condition {bc!r}")


def axial_grid(Z, n, bc="dirichlet"):
    """z-grid on [-Z, Z] (interior points for Dirichlet, period 2Z otherwise)."""
    if bc == "dirichlet":
        h = 2.0 * Z / (n + 1)
        return -Z + h * np.arange(1, n + 1)
    if bc == "periodic":
        return -Z + (2.0 * Z / n) * np.arange(n)
    raise InvalidParameter(f"unknown boundary condition {bc!r}")


def grid_length(x_grid, bc):
    """Domain length recovered from an interior (or periodic) grid."""
    x = np.asarray(x_grid, dtype=float)
    h = x[1] - x[0]
    return float(h * (x.size + 1) if bc == "dirichlet" else h * x.size)


@dataclass(frozen=True)
class CylinderPotential:
    """Samples V(x_i, z_j) with limits V+- on the x-grid.

    ``x_grid is None`` marks a zero-dimensional cross-section: ``values`` is
    then 1 x n_z and the limits are length-1 arrays.
    """

    x_grid: np.ndarray
    z_grid: np.ndarray
    values: np.ndarray
    v_plus: np.ndarray
    v_minus: np.ndarray
    bc_x: str = "dirichlet"

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        n_x = 1 if self.x_grid is None else len(self.x_grid)
        if vals.shape != (n_x, len(self.z_grid)):
            raise InvalidParameter(f"values shape {vals.shape} != ({n_x}, {len(self.z_grid)})")
        if len(self.v_plus) != n_x or len(self.v_minus) != n_x:
            raise InvalidParameter("limit profiles must match the x-grid")
        if not (np.all(np.isfinite(vals)) and np.all(np.isfinite(self.v_plus))
                and np.all(np.isfinite(self.v_minus))):
            raise InvalidParameter("potential has non-finite entries")
        if self.bc_x not in ("dirichlet", "periodic"):
            raise InvalidParameter(f"unknown boundary condition {self.bc_x!r}")
        for name in ("values", "v_plus", "v_minus", "z_grid"):
            arr = np.array(getattr(self, name), dtype=float)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        if self.x_grid is not None:
            x = np.array(self.x_grid, dtype=float)
            x.setflags(write=False)
            object.__setattr__(self, "x_grid", x)

    @property
    def zero_dim(self):
        return self.x_grid is None

    @property
    def n_x(self):
        return self.values.shape[0]

    @property
    def n_z(self):
        return self.values.shape[1]

    @property
    def bound(self):
        return float(np.max(np.abs(self.values)))

    @property
    def length(self):
        return None if self.zero_dim else grid_length(self.x_grid, self.bc_x)

    @property
    def h_z(self):
        return float(self.z_grid[1] - self.z_grid[0])

    def glued(self):
        """V+ on z >= 0 and V- on z < 0, on the same grids."""
        vals = np.where(self.z_grid[None, :] >= 0, self.v_plus[:, None], self.v_minus[:, None])
        return CylinderPotential(self.x_grid, self.z_grid, vals, self.v_plus,
                                 self.v_minus, self.bc_x)

    def with_values(self, values):
        return CylinderPotential(self.x_grid, self.z_grid, values, self.v_plus,
                                 self.v_minus, self.bc_x)


def synth_example_potential(f, wave, alpha, x_grid, z_grid, bc_x="dirichlet"):
    """theta(z) f'(1) + (1 - theta(z)) f'(w(x)) with theta the logistic switch of rate alpha."""
    if alpha <= 0:
        raise InvalidParameter("alpha must be positive")
    x_grid = np.asarray(x_grid, dtype=float)
    z_grid = np.asarray(z_grid, dtype=float)
    if x_grid.size == 0 or z_grid.size == 0:
        raise InvalidParameter("grids must be nonempty")
    w = wave(x_grid) if callable(wave) else np.asarray(wave, dtype=float)
    v_minus = f.deriv(w) * np.ones_like(x_grid)
    v_plus = np.full_like(x_grid, float(f.deriv(1.0)))
    theta = expit(alpha * z_grid)
    values = theta[None, :] * v_plus[:, None] + (1.0 - theta[None, :]) * v_minus[:, None]
    return CylinderPotential(x_grid, z_grid, values, v_plus, v_minus, bc_x)


def separable_potential(p, q, x_grid, z_grid, bc_x="dirichlet", q_limits=(0.0, 0.0)):
    """V(x, z) = p(x) + q(z); ``q_limits`` = (q(+inf), q(-inf))."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    nx = 1 if x_grid is None else len(x_grid)
    if p.size != nx or q.size != len(z_grid):
        raise InvalidParameter("profile lengths must match their grids")
    values = p[:, None] + q[None, :]
    return CylinderPotential(x_grid, z_grid, values, p + q_limits[0], p + q_limits[1], bc_x)


def front_potential(front, z_grid):
    """Zero-dimensional potential f'(u(z)) of a front, limits f'(u-+)."""
    z_grid = np.asarray(z_grid, dtype=float)
    f = front.f
    vals = f.deriv(front.profile(z_grid))[None, :]
    u_minus, u_plus = front.limits
    return CylinderPotential(None, z_grid, vals, np.array([float(f.deriv(u_plus))]),
                             np.array([float(f.deriv(u_minus))]))


def add_bump(V, height, width, center=0.0):
    """Add a Gaussian ridge height*exp(-((z-center)/width)^2), uniform in x.

    The ridge decays faster than any exponential, so the hypotheses are kept
    while an isolated eigenvalue is pushed right of the essential spectrum.
    """
    ridge = height * np.exp(-(((V.z_grid - center) / width) ** 2))
    return V.with_values(V.values + ridge[None, :])


# ----------------------------------------------------------------- hypotheses

@dataclass(frozen=True)
class HypothesisReport:
    z_plus: np.ndarray
    g_plus: np.ndarray
    z_minus: np.ndarray  # ascending distance from 0
    g_minus: np.ndarray
    tail_sup: tuple  # (plus, minus)
    h1_pass: bool
    h2_l1: tuple
    h2_change: tuple
    h2_pass: bool
    h3_status: str = "not-applicable"

    @property
    def passed(self):
        return self.h1_pass and self.h2_pass

    def summary(self):
        return {
            "h1_pass": self.h1_pass,
            "h1_tail_sup": list(self.tail_sup),
            "h2_pass": self.h2_pass,
            "h2_l1": list(self.h2_l1),
            "h2_tail_change": list(self.h2_change),
            "h3_status": self.h3_status,
        }


def gap_curves(V):
    """g+-(z) = max_x |V(x, z) - V+-(x)| on the half-lines z >= 0 and z <= 0.

    The negative side is returned reflected (|z| ascending).
    """
    z = V.z_grid
    pos = z >= 0
    neg = z <= 0
    g_all_plus = np.max(np.abs(V.values - V.v_plus[:, None]), axis=0)
    g_all_minus = np.max(np.abs(V.values - V.v_minus[:, None]), axis=0)
    zp, gp = z[pos], g_all_plus[pos]
    zm, gm = -z[neg][::-1], g_all_minus[neg][::-1]
    return zp, gp, zm, gm


def _tail_checks(r, g, window):
    n = r.size
    if n < 2:
        return float(g.max()), 0.0, 0.0
    start = min(int(np.floor((1.0 - window) * (n - 1))), n - 1)
    tail = float(g[start:].max())
    full = float(np.trapezoid(g, r))
    r_max = r[-1]
    i1 = np.searchsorted(r, r_max * (1.0 - window), side="right")
    i2 = np.searchsorted(r, r_max * (1.0 - 2.0 * window), side="right")
    change = abs(float(np.trapezoid(g[:i1], r[:i1])) - float(np.trapezoid(g[:i2], r[:i2])))
    return tail, full, change


def check_hypotheses(V, tol_sup=1e-6, window=0.1):
    if not 0.0 < window < 0.5:
        raise InvalidParameter("window must lie in (0, 0.5)")
    zp, gp, zm, gm = gap_curves(V)
    tp, lp, cp = _tail_checks(zp, gp, window)
    tm, lm, cm = _tail_checks(zm, gm, window)
    return HypothesisReport(
        z_plus=zp, g_plus=gp, z_minus=zm, g_minus=gm,
        tail_sup=(tp, tm), h1_pass=bool(max(tp, tm) <= tol_sup),
        h2_l1=(lp, lm), h2_change=(cp, cm),
        h2_pass=bool(max(cp, cm) < tol_sup and np.isfinite(lp) and np.isfinite(lm)),
    )
