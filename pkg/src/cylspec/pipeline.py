"""End-to-end studies combining the modules; used by the CLI and the acceptance suite."""
from dataclasses import dataclass, field

import numpy as np

from . import cylinder, essential, profiles, spatial, sturm1d
from .errors import InvalidParameter, NotRightOfEssential


# ------------------------------------------------------------------ setups

def synthetic_setup(a=0.5, L=4.5 * np.pi, alpha=1.0, Z=20.0, n_x=63, n_z=401,
                    bc_x="dirichlet", bump=None):
    """Synthetic potential built from the standing wave; ``bump`` = (height, width) or None."""
    f = profiles.make_cubic(a)
    wave = profiles.periodic_wave(f, L)
    x = profiles.interior_grid(L, n_x, bc_x)
    z = profiles.axial_grid(Z, n_z, "dirichlet")
    V = profiles.synth_example_potential(f, wave, alpha, x, z, bc_x)
    if bump is not None:
        V = profiles.add_bump(V, *bump)
    return f, wave, V


def front_grid(Z, h):
    n = int(round(2.0 * Z / h)) - 1
    if n < 3:
        raise InvalidParameter("front grid too coarse")
    return -Z + (2.0 * Z / (n + 1)) * np.arange(1, n + 1)


def sup_re_ess(V):
    sp, sm = sturm1d.limit_spectra(V)
    return max(sp.sup, sm.sup), sp, sm


# ---------------------------------------------------------------- trajectories

def layer_trajectory(op, v, z, lam0, c, V, side, window):
    """Y(z) = (v, d_z v) in the Sturm basis of the ``side`` limit, on a z-window.

    ``v`` is a flat grid vector of the weighted eigenfunction; the z-derivative
    uses central differences, so the window must avoid the first/last layer.
    """
    grid = np.real_if_close(op.to_grid(v))
    j0 = int(np.searchsorted(z, window[0] - 1e-12))
    j1 = int(np.searchsorted(z, window[1] + 1e-12, side="right")) - 1
    j0, j1 = max(j0, 1), min(j1, z.size - 2)
    if j1 - j0 < 2:
        raise InvalidParameter("trajectory window too short")
    h = z[1] - z[0]
    dv = (grid[:, j0 + 1:j1 + 2] - grid[:, j0 - 1:j1]) / (2 * h)
    if V.zero_dim:
        lim = V.v_plus if side == "+" else V.v_minus
        sp = sturm1d.solve_sturm(sturm1d.point_operator(lim[0]))
    else:
        ops = sturm1d.limit_operators(V)
        sp = sturm1d.solve_sturm(ops[0] if side == "+" else ops[1])
    phi = sp.eigenvectors
    Y = np.vstack([phi.T @ grid[:, j0:j1 + 1], phi.T @ dv])
    return z[j0:j1 + 1], Y, sp, (j0, j1)


def weighted_vector(op, sym_vec=None, u=None):
    """Weighted eigenfunction v = D u (D the layer similarity of ``op``)."""
    if sym_vec is not None:
        return sym_vec
    return op.weights() * u


def tail_norms(op, v, z):
    """sqrt(||v(., z)||^2 + ||d_z v(., z)||^2) on interior layers."""
    grid = np.real_if_close(op.to_grid(v))
    h = z[1] - z[0]
    dv = (grid[:, 2:] - grid[:, :-2]) / (2 * h)
    nrm = np.sqrt(np.sum(np.abs(grid[:, 1:-1]) ** 2, axis=0) + np.sum(np.abs(dv) ** 2, axis=0))
    return z[1:-1], nrm


def two_sided_decay(z, norms, Z):
    """Fit both tails on the default windows; the slower one bounds the decay."""
    win = spatial.default_window(Z)
    fp = spatial.fit_decay(z, norms, win)
    fm = spatial.fit_decay(-z[::-1], norms[::-1], win)
    return (fp if fp.delta_hat <= fm.delta_hat else fm), fp, fm


# ---------------------------------------------------------------- Allen-Cahn

@dataclass
class AllenCahnResult:
    a: float
    c: float
    h: float
    Z: float
    lam: complex
    residual: float
    eigvec_error: float
    sup_re_ess: float
    decay: spatial.DecayEstimate
    decay_plus: spatial.DecayEstimate
    decay_minus: spatial.DecayEstimate
    alpha_star: float
    bound: float
    realness: cylinder.RealnessReport
    eig: cylinder.EigenResult = field(repr=False)
    z: np.ndarray = field(repr=False)


def allen_cahn_study(a=0.25, h=0.05, Z=20.0, lambda0=0.0, k=4, seed=0):
    front = profiles.exact_front(a)
    z = front_grid(Z, h)
    V = profiles.front_potential(front, z)
    c = front.c
    op = cylinder.assemble_cylinder(V, c, "dirichlet")
    res = cylinder.eig_general(op, k, lambda0 + 0.05, seed=seed)
    i = int(np.argmin(np.abs(res.eigenvalues - lambda0)))
    lam, u = res.eigenvalues[i], res.vectors[:, i]
    ref = front.derivative(z)
    ref = ref / np.linalg.norm(ref)
    u = u * (np.vdot(u, ref) / abs(np.vdot(u, ref)))
    err = float(np.linalg.norm(u - ref))
    sup, _, _ = sup_re_ess(V)
    so = cylinder.symmetrize(op)
    sym = cylinder.eig_symmetric(so, k, lambda0 + 0.05, seed=seed)
    real = cylinder.verify_realness(res, sup, 1e-8, sym.eigenvalues.real)
    v = np.exp(c * z / 2.0) * np.real(u)
    zz, nrm = tail_norms(op, v, z)
    dec, dp, dm = two_sided_decay(zz, nrm, Z)
    alpha_star, bound = spatial.decay_bound(lambda0, c, sup)
    return AllenCahnResult(a=a, c=c, h=h, Z=Z, lam=complex(lam), residual=float(res.residuals[i]),
                           eigvec_error=err, sup_re_ess=sup, decay=dec, decay_plus=dp,
                           decay_minus=dm, alpha_star=alpha_star, bound=bound,
                           realness=real, eig=res, z=z)


# ---------------------------------------------------------------- cylinder

@dataclass
class CylinderResult:
    V: profiles.CylinderPotential = field(repr=False)
    c: float
    sup_re_ess: float
    sup_plus: float
    sup_minus: float
    eig: cylinder.EigenResult = field(repr=False)
    sym: cylinder.EigenResult = field(repr=False)
    realness: cylinder.RealnessReport
    op: cylinder.DiscreteOperator = field(repr=False)
    sym_op: cylinder.DiscreteOperator = field(repr=False)


def cylinder_study(V, c, k=10, shift=None, seed=0, tol=1e-12):
    """Eigenvalues of the unsymmetrized and symmetrized operators plus realness check."""
    sup, sp, sm = sup_re_ess(V)
    if shift is None:
        shift = sup + 1.0
    op = cylinder.assemble_cylinder(V, c, "dirichlet")
    so = cylinder.symmetrize(op)
    res = cylinder.eig_general(op, k, shift, seed=seed, tol=tol)
    sym = cylinder.eig_symmetric(so, k, float(np.real(shift)), seed=seed, tol=tol)
    real = cylinder.verify_realness(res, sup, 1e-8, sym.eigenvalues.real)
    return CylinderResult(V=V, c=c, sup_re_ess=sup, sup_plus=sp.sup, sup_minus=sm.sup,
                          eig=res, sym=sym, realness=real, op=op, sym_op=so)


@dataclass
class DecayResult:
    lam0: float
    alpha_star: float
    bound: float
    decay: spatial.DecayEstimate
    decay_plus: spatial.DecayEstimate
    decay_minus: spatial.DecayEstimate
    gronwall: spatial.GronwallReport
    nu: float
    M: float


def leading_mode(cr):
    """Top eigenpair of the symmetrized operator (must lie right of the essential spectrum)."""
    i = int(np.argmax(cr.sym.eigenvalues.real))
    lam0 = float(cr.sym.eigenvalues[i].real)
    if lam0 <= cr.sup_re_ess:
        raise NotRightOfEssential("no eigenvalue right of the essential spectrum")
    return lam0, np.real(cr.sym.vectors[:, i])


def cylinder_decay(cr, Z, ray=None):
    """Decay fit of the weighted leading eigenfunction and the integral-inequality check."""
    lam0, v = leading_mode(cr)
    V, op, c = cr.V, cr.sym_op, cr.c
    z = V.z_grid
    zz, nrm = tail_norms(op, v, z)
    dec, dp, dm = two_sided_decay(zz, nrm, Z)
    alpha_star, bound = spatial.decay_bound(lam0, c, cr.sup_re_ess)
    if ray is None:
        ray = (0.0, 0.95 * Z)
    zr, Y, sp, (j0, j1) = layer_trajectory(op, v, z, lam0, c, V, "+", ray)
    bs = spatial.build_bisemigroup(sp.eigenvalues, lam0, c)
    _, gp, _, _ = spatial.bnorm_curve(V)
    zp = V.z_grid[V.z_grid >= 0]
    F = np.interp(zr, zp, gp)
    norms = np.linalg.norm(Y, axis=0)
    scale = norms[0]
    M = 2.0 * bs.condition()
    gr = spatial.gronwall_verify(zr, norms / scale, bound, M, F)
    return DecayResult(lam0=lam0, alpha_star=alpha_star, bound=bound, decay=dec,
                       decay_plus=dp, decay_minus=dm, gronwall=gr, nu=bound, M=M)


def projected_mild_defect(cr, ray):
    """Mild-identity defect of the projected leading eigenfunction on ``ray`` (z >= 0 side)."""
    lam0, v = leading_mode(cr)
    V = cr.V
    zr, Y, sp, (j0, j1) = layer_trajectory(cr.sym_op, v, V.z_grid, lam0, cr.c, V, "+", ray)
    Y = Y / np.linalg.norm(Y, axis=0).max()
    bs = spatial.build_bisemigroup(sp.eigenvalues, lam0, cr.c)
    B = spatial.perturbation_blocks(V, "+", sp.eigenvectors)[j0:j1 + 1]
    return spatial.mild_residual(zr, Y, bs, B)


# ---------------------------------------------------------------- essential

def essential_study(V, c, s_max=None, n_samples=201):
    sp, sm = sturm1d.limit_spectra(V)
    return essential.dispersion_curves(sp, sm, c, s_max=s_max, n_samples=n_samples), sp, sm
