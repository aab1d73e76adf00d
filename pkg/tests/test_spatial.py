import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, strategies as st

from cylspec import profiles, spatial, sturm1d
from cylspec.errors import (InvalidParameter, InvalidWindow, NotHyperbolic,
                            NotRightOfEssential)

AC_SPEED = np.sqrt(2) / 4  # front speed of the cubic at a = 1/4


def test_principal_sqrt_branch():
    assert spatial.principal_sqrt(3 + 4j) == pytest.approx(2 + 1j)
    assert spatial.principal_sqrt(complex(-4, -0.0)) == pytest.approx(2j)
    assert spatial.principal_sqrt(-4) == pytest.approx(2j)
    assert spatial.principal_sqrt(-4 - 1e-300j).real >= 0


@given(st.floats(-50, 50), st.floats(-50, 50))
def test_principal_sqrt_dominates_gamma(gamma, beta):
    q = gamma ** 2 + 1j * beta
    r = spatial.principal_sqrt(q)
    # compare with sqrt of the stored real part so tiny gamma that underflow stay sound
    assert r.real >= np.sqrt(q.real) * (1 - 1e-12)
    assert r ** 2 == pytest.approx(gamma ** 2 + 1j * beta, rel=1e-12, abs=1e-12)


def test_principal_sqrt_dominates_gamma_bulk():
    rng = np.random.default_rng(1)
    g, b = rng.normal(0, 5, 10_000), rng.normal(0, 5, 10_000)
    assert np.all(spatial.principal_sqrt(g ** 2 + 1j * b).real >= np.abs(g) * (1 - 1e-15))


MU = st.lists(st.floats(-20, 0), min_size=1, max_size=6)
LAM = st.complex_numbers(max_magnitude=6).filter(lambda z: z.real > 0.05)


@given(MU, LAM, st.floats(-3, 3))
def test_bisemigroup_realization(mu, lam0, c):
    bs = spatial.build_bisemigroup(mu, lam0, c)
    n = len(mu)
    assert np.allclose(bs.W @ bs.W_inv, np.eye(2 * n), atol=1e-12)
    sys = spatial.limit_matrices(np.array(mu), lam0, c)
    assert np.abs(bs.generator() - sys.A).max() <= 1e-10 * max(1, np.abs(sys.A).max())
    assert np.allclose(bs.P_s + bs.P_u, np.eye(2 * n))
    assert np.allclose(bs.P_s @ bs.P_s, bs.P_s, atol=1e-10)
    G = bs.generator()
    scale = max(1.0, np.abs(G).max())
    assert np.abs(G @ bs.P_s - bs.P_s @ G).max() <= 1e-10 * scale * bs.condition()
    assert bs.nu >= np.sqrt(bs.alpha) * (1 - 1e-14)
    ref = spatial.sqrt_spectrum(lam0, c, mu)
    assert np.allclose(bs.S, ref[:, 0])


@given(MU, LAM, st.floats(-3, 3), st.floats(0, 3), st.floats(0, 3))
def test_stable_flow_semigroup_and_decay(mu, lam0, c, s, t):
    bs = spatial.build_bisemigroup(mu, lam0, c)
    Ts, Tt, Tst = bs.stable_flow(s), bs.stable_flow(t), bs.stable_flow(s + t)
    assert np.allclose(Ts @ Tt, Tst, atol=1e-10)
    assert np.linalg.norm(Tst, 2) <= bs.condition() * np.exp(-bs.nu * (s + t)) * (1 + 1e-10)
    assert np.linalg.norm(bs.unstable_flow(t), 2) <= bs.condition() * np.exp(-bs.nu * t) * (1 + 1e-10)
    # the stable flow solves Y' = A Y on its range
    A = bs.generator()
    assert np.allclose(scipy.linalg.expm(A * t) @ bs.P_s, bs.stable_flow(t), atol=1e-8)


def test_not_hyperbolic():
    with pytest.raises(NotHyperbolic):
        spatial.build_bisemigroup([1.0], 0.5, 0.0)


def test_limit_matrices_truncation():
    sp_ = sturm1d.solve_sturm(sturm1d.assemble_sturm(np.zeros(10), 1.0))
    sys = spatial.limit_matrices(sp_, 1.0, 2.0, n=3)
    assert sys.A.shape == (6, 6) and sys.n == 3
    assert sys.A[3, 0] == pytest.approx(1.0 + 1.0 - sp_.eigenvalues[0])
    with pytest.raises(InvalidParameter):
        spatial.limit_matrices(sp_, 1.0, 2.0, n=11)


def test_decay_bound_example():
    alpha, bound = spatial.decay_bound(1.0, AC_SPEED, -0.25)
    assert alpha == pytest.approx(1.28125, abs=1e-15)
    assert bound == pytest.approx(np.sqrt(1.28125))
    with pytest.raises(NotRightOfEssential):
        spatial.decay_bound(-0.5, AC_SPEED, -0.25)


def test_allen_cahn_matrices_example():
    f = profiles.make_cubic(0.25)
    sys = spatial.allen_cahn_matrices(f, 0.0, AC_SPEED)
    assert sys.A_minus[1, 0] == pytest.approx(0.78125)
    assert sys.A_plus[1, 0] == pytest.approx(0.28125)
    assert np.allclose(sorted(np.linalg.eigvals(sys.A_plus).real), [-np.sqrt(0.28125), np.sqrt(0.28125)])
    assert sys.gap == pytest.approx(np.sqrt(0.28125))
    assert np.allclose(sorted(sys.eig_minus.real), [-0.8838835, 0.8838835], atol=1e-7)
    assert sys.gap > AC_SPEED / 2
    with pytest.raises(NotRightOfEssential):
        spatial.allen_cahn_matrices(f, -0.3, AC_SPEED)


def test_perturbation_norm_bounded_by_gap_curve():
    rng = np.random.default_rng(3)
    x = profiles.interior_grid(np.pi, 12, "dirichlet")
    z = profiles.axial_grid(5.0, 21)
    V = profiles.CylinderPotential(x, z, rng.normal(size=(12, 21)), rng.normal(size=12),
                                   rng.normal(size=12))
    sp_, sm = sturm1d.limit_spectra(V)
    zp, gp, zm, gm = spatial.bnorm_curve(V)
    pos = z >= 0
    neg = z <= 0
    for side, basis, g, mask in (("+", sp_.eigenvectors, gp, pos), ("-", sm.eigenvectors, gm[::-1], neg)):
        B = spatial.perturbation_blocks(V, side, basis)[mask]
        Y = rng.normal(size=(50, 24))
        ratios = np.linalg.norm(np.einsum("zij,vj->zvi", B, Y), axis=2) / np.linalg.norm(Y, axis=1)
        assert np.all(ratios <= g[:, None] * (1 + 1e-12))


def _pure_trajectory(bs, z, rng, unstable=True):
    ys = rng.normal(size=bs.n) + 1j * rng.normal(size=bs.n)
    yu = rng.normal(size=bs.n) + 1j * rng.normal(size=bs.n) if unstable else np.zeros(bs.n)
    return bs.W_inv @ np.vstack([np.exp(-np.outer(bs.S, z - z[0])) * ys[:, None],
                                 np.exp(np.outer(bs.S, z - z[-1])) * yu[:, None]])


@pytest.mark.parametrize("unstable", [False, True])
def test_mild_residual_vanishes_without_perturbation(unstable):
    bs = spatial.build_bisemigroup([-1.0, -3.0], 0.5 + 1j, 1.0)
    z = np.linspace(1.0, 5.0, 201)
    Y = _pure_trajectory(bs, z, np.random.default_rng(0), unstable)
    assert spatial.mild_residual(z, Y, bs) <= 1e-12


def test_mild_residual_second_order_with_perturbation():
    bs = spatial.build_bisemigroup([-1.0], 0.8, 0.5)
    B = np.array([[0.0, 0.0], [0.3, 0.0]])
    A = bs.generator() + B
    w, X = np.linalg.eig(A)
    y0 = X[:, np.argmin(w.real)]  # decaying mode of the perturbed system
    defects = []
    for m in (201, 401):
        z = np.linspace(0.0, 4.0, m)
        Y = np.array([scipy.linalg.expm(A * t) @ y0 for t in z]).T
        defects.append(spatial.mild_residual(z, Y, bs, np.repeat(B[None], m, axis=0)))
    assert defects[0] / defects[1] == pytest.approx(4.0, rel=0.05)


def test_mild_residual_rejects_nonuniform_grid():
    bs = spatial.build_bisemigroup([-1.0], 1.0, 0.0)
    with pytest.raises(InvalidParameter):
        spatial.mild_residual(np.array([0.0, 1.0, 3.0]), np.ones((2, 3)), bs)


def test_fit_decay_example():
    z = np.linspace(0, 10, 101)
    est = spatial.fit_decay(z, 3.0 * np.exp(-0.7 * z), spatial.default_window(10.0))
    assert est.delta_hat == pytest.approx(0.7)
    assert est.M_hat == pytest.approx(3.0)
    assert est.fit_quality == pytest.approx(1.0)
    assert est.window == (6.0, 9.5)
    with pytest.raises(InvalidWindow):
        spatial.fit_decay(z, np.exp(-z), (20.0, 30.0))
    with pytest.raises(InvalidWindow):
        spatial.fit_decay(z, np.zeros_like(z), (1.0, 5.0))


def test_gronwall_scalar_toy():
    z = np.linspace(0, 10, 1001)
    nu = 0.8
    ok = spatial.gronwall_verify(z, np.exp(-nu * z), nu, 1.0, np.zeros_like(z))
    assert ok.passed and ok.delta_hat == pytest.approx(nu)
    bad = spatial.gronwall_verify(z, 2.0 * np.exp(-nu * z), nu, 1.0, np.zeros_like(z))
    assert not bad.passed
    # a forcing term pays for a slower decay: u = e^{-nu z/2} needs F > 0
    slow = np.exp(-0.5 * nu * z)
    assert not spatial.gronwall_verify(z, slow, nu, 1.0, np.zeros_like(z)).passed
    assert spatial.gronwall_verify(z, slow, nu, 1.0, np.full_like(z, 0.5)).passed


@given(MU, LAM, st.floats(-3, 3))
def test_diagonal_semigroup_decay(mu, lam0, c):
    bs = spatial.build_bisemigroup(mu, lam0, c)
    for z in np.linspace(0.1, 10, 100):
        assert np.abs(np.exp(-bs.S * z)).max() <= np.exp(-bs.nu * z) * (1 + 1e-10)
