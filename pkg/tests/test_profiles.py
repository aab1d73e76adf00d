import numpy as np
import pytest
import sympy as sp
from hypothesis import given, strategies as st

from cylspec import profiles
from cylspec.errors import InvalidParameter, NoPeriodicOrbit

A_VALUES = st.floats(0.01, 0.99)
U_VALUES = st.floats(-2.0, 3.0)

_u, _a = sp.symbols("u a")
_F_SYM = _u * (1 - _u) * (_u - _a)
_ORACLES = {
    "eval": sp.lambdify((_u, _a), _F_SYM),
    "deriv": sp.lambdify((_u, _a), sp.diff(_F_SYM, _u)),
    "deriv2": sp.lambdify((_u, _a), sp.diff(_F_SYM, _u, 2)),
    "antideriv": sp.lambdify((_u, _a), sp.integrate(_F_SYM, (_u, 0, _u))),
}


@given(A_VALUES, U_VALUES)
def test_nonlinearity_matches_symbolic_oracle(a, u):
    f = profiles.make_cubic(a)
    for name, oracle in _ORACLES.items():
        assert getattr(f, name)(u) == pytest.approx(oracle(u, a), abs=1e-12)


@given(A_VALUES)
def test_cubic_roots_and_bistable_signs(a):
    f = profiles.make_cubic(a)
    assert np.allclose(f(np.array(f.roots)), 0.0)
    assert f.deriv(0.0) < 0 and f.deriv(1.0) < 0 and f.deriv(a) > 0


@given(A_VALUES, st.floats(-0.1, 0.1))
def test_energy_poly_is_energy_minus_antiderivative(a, E):
    f = profiles.make_cubic(a)
    w = np.linspace(-1, 2, 13)
    assert np.allclose(np.polyval(f.energy_poly(E), w), E - f.antideriv(w), atol=1e-13)


@pytest.mark.parametrize("a", [0.0, 1.0, -0.2, 1.5])
def test_make_cubic_rejects_out_of_range(a):
    with pytest.raises(InvalidParameter):
        profiles.make_cubic(a)


@pytest.mark.parametrize("a", [0.1, 0.25, 0.4, 0.5])
def test_exact_front(a):
    front = profiles.exact_front(a, np.linspace(-30, 30, 2001))
    assert front.residual() <= 1e-10
    assert front.c == pytest.approx(np.sqrt(2) * (0.5 - a), abs=1e-15)
    assert np.all(np.diff(front.u) < 0)
    assert front.limits == (1.0, 0.0)
    assert front.u[0] == pytest.approx(1.0, abs=1e-9) and front.u[-1] == pytest.approx(0.0, abs=1e-9)


def test_exact_front_derivatives_by_finite_differences():
    front = profiles.exact_front(0.3)
    z = np.linspace(-5, 5, 11)
    h = 1e-5
    d1 = (front.profile(z + h) - front.profile(z - h)) / (2 * h)
    d2 = (front.profile(z + h) - 2 * front.profile(z) + front.profile(z - h)) / h ** 2
    assert np.allclose(front.derivative(z), d1, atol=1e-9)
    assert np.allclose(front.second_derivative(z), d2, atol=1e-5)


@pytest.mark.parametrize("a", [0.6, 0.75])
def test_exact_front_rejects_upper_half(a):
    with pytest.raises(InvalidParameter):
        profiles.exact_front(a)


@given(st.floats(0.05, 0.95))
def test_min_period_closed_form(a):
    f = profiles.make_cubic(a)
    assert profiles.min_period(f) == pytest.approx(2 * np.pi / np.sqrt(a * (1 - a)), rel=1e-14)


def test_min_period_at_half_is_4pi():
    assert profiles.min_period(profiles.make_cubic(0.5)) == pytest.approx(4 * np.pi, rel=1e-15)


@pytest.mark.parametrize("a", [0.3, 0.5, 0.7])
def test_period_increases_with_energy(a):
    f = profiles.make_cubic(a)
    lo = float(f.antideriv(a))
    hi = min(0.0, float(f.antideriv(1.0)))
    energies = lo + (hi - lo) * np.linspace(0.02, 0.95, 25)
    T = np.array([profiles.period(f, E) for E in energies])
    assert np.all(np.diff(T) > 0)
    assert np.all(T > profiles.min_period(f))


@pytest.mark.parametrize("a", [0.3, 0.5])
def test_small_amplitude_period_limit(a):
    f = profiles.make_cubic(a)
    lo = float(f.antideriv(a))
    T = profiles.period(f, lo + 1e-10)
    assert T == pytest.approx(profiles.min_period(f), rel=1e-4)


def test_turning_points_bracket_centre():
    f = profiles.make_cubic(0.5)
    E = -0.01
    wm, wp = profiles.turning_points(f, E)
    assert 0 < wm < 0.5 < wp < 1
    assert f.antideriv(wm) == pytest.approx(E, abs=1e-13)
    assert f.antideriv(wp) == pytest.approx(E, abs=1e-13)


@pytest.fixture(scope="module")
def wave():
    return profiles.periodic_wave(profiles.make_cubic(0.5), 4.5 * np.pi)


def test_periodic_wave_solves_ode(wave):
    assert wave.residual() <= 1e-8
    assert wave.w[0] == wave.w[-1]
    assert profiles.period(wave.f, wave.E) == pytest.approx(4.5 * np.pi, rel=1e-12)
    wm, wp = wave.turning_points
    assert wave.w.min() >= wm - 1e-12 and wave.w.max() <= wp + 1e-12
    assert wm < 0.5 < wp
    assert abs(wave.f.antideriv(wm) - wave.E) <= 1e-10 and abs(wave.f.antideriv(wp) - wave.E) <= 1e-10


def test_periodic_wave_interpolation(wave):
    x = wave.x[::7]
    assert np.allclose(wave(x), wave.w[::7], atol=1e-12)
    assert np.allclose(wave(x + wave.L), wave(x), atol=1e-12)


def test_periodic_wave_near_minimal_period():
    f = profiles.make_cubic(0.5)
    w = profiles.periodic_wave(f, 4 * np.pi + 0.1)
    assert w.residual() <= 1e-8
    with pytest.raises(NoPeriodicOrbit):
        profiles.periodic_wave(f, 4 * np.pi - 0.1)


@pytest.mark.parametrize("kw", [dict(tol=0.0), dict(n=2047)])
def test_periodic_wave_rejects_bad_arguments(kw):
    with pytest.raises(InvalidParameter):
        profiles.periodic_wave(profiles.make_cubic(0.5), 15.0, **kw)


@pytest.mark.parametrize("n,bc,length", [(9, "dirichlet", 1.0), (8, "periodic", 2.0)])
def test_grids_recover_length(n, bc, length):
    x = profiles.interior_grid(length, n, bc)
    assert x.size == n
    assert profiles.grid_length(x, bc) == pytest.approx(length)


def test_axial_grid_spacing():
    z = profiles.axial_grid(10.0, 399)
    assert z[0] == pytest.approx(-10 + 0.05) and z[-1] == pytest.approx(10 - 0.05)
    zp = profiles.axial_grid(10.0, 400, "periodic")
    assert zp[0] == -10.0 and np.allclose(np.diff(zp), 0.05)


def _synthetic(alpha, Z, n_z, wave):
    x = profiles.interior_grid(4.5 * np.pi, 31, "dirichlet")
    z = profiles.axial_grid(Z, n_z)
    return profiles.synth_example_potential(wave.f, wave, alpha, x, z)


@pytest.mark.parametrize("alpha,Z", [(1.0, 20.0), (2.0, 20.0), (0.5, 40.0)])
def test_synthetic_potential_meets_hypotheses(wave, alpha, Z):
    V = _synthetic(alpha, Z, int(20 * Z) + 1, wave)
    rep = profiles.check_hypotheses(V)
    assert rep.passed, rep.summary()
    assert rep.h3_status == "not-applicable"


def test_slow_switch_on_short_cylinder_fails_tail_check(wave):
    rep = profiles.check_hypotheses(_synthetic(0.5, 20.0, 401, wave))
    assert not rep.h1_pass


def test_synthetic_limits(wave):
    V = _synthetic(1.0, 20.0, 401, wave)
    assert np.allclose(V.v_plus, wave.f.deriv(1.0))
    assert np.allclose(V.values[:, -1], V.v_plus, atol=1e-8)
    assert np.allclose(V.values[:, 0], V.v_minus, atol=1e-8)


def test_slowly_decaying_separable_potential_fails():
    x = profiles.interior_grid(np.pi, 15, "dirichlet")
    z = profiles.axial_grid(20.0, 401)
    V = profiles.separable_potential(np.zeros(15), 1.0 / (1.0 + np.abs(z)), x, z)
    rep = profiles.check_hypotheses(V)
    assert not rep.h2_pass and not rep.passed


def test_gap_curves_reflect_negative_side():
    z = profiles.axial_grid(5.0, 11)
    V = profiles.separable_potential(np.zeros(3), np.exp(z), np.arange(1.0, 4.0), z)
    zp, gp, zm, gm = profiles.gap_curves(V)
    assert np.all(np.diff(zm) > 0) and np.all(zp >= 0)
    assert np.allclose(gp, np.exp(zp))
    assert np.allclose(gm, np.exp(-zm))


def test_potential_is_immutable():
    z = profiles.axial_grid(1.0, 5)
    V = profiles.separable_potential(np.zeros(3), np.zeros(5), np.arange(3.0), z)
    with pytest.raises(ValueError):
        V.values[0, 0] = 1.0


@pytest.mark.parametrize("bad", [np.full((3, 5), np.nan), np.zeros((3, 4))])
def test_potential_validation(bad):
    z = profiles.axial_grid(1.0, 5)
    with pytest.raises(InvalidParameter):
        profiles.CylinderPotential(np.arange(3.0), z, bad, np.zeros(3), np.zeros(3))


def test_glued_and_bump():
    z = profiles.axial_grid(3.0, 7)
    V = profiles.CylinderPotential(np.arange(2.0), z, np.zeros((2, 7)), np.ones(2), -np.ones(2))
    G = V.glued()
    assert np.all(G.values[:, z >= 0] == 1) and np.all(G.values[:, z < 0] == -1)
    B = profiles.add_bump(V, 2.0, 1.0)
    assert np.allclose(B.values[0], 2.0 * np.exp(-z ** 2))


def test_front_potential_limits():
    front = profiles.exact_front(0.25)
    V = profiles.front_potential(front, profiles.axial_grid(40.0, 1599))
    assert V.zero_dim and V.n_x == 1
    assert V.v_plus[0] == pytest.approx(-0.25) and V.v_minus[0] == pytest.approx(-0.75)
    assert profiles.check_hypotheses(V).passed
