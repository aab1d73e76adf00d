import numpy as np
import pytest

from cylspec import pipeline, profiles
from cylspec.errors import NotRightOfEssential


def test_standing_front_decay_rate():
    r = pipeline.allen_cahn_study(a=0.5, h=0.05, Z=20.0)
    assert r.c == 0.0
    assert r.sup_re_ess == pytest.approx(-0.5)
    assert r.bound == pytest.approx(1 / np.sqrt(2))
    assert r.decay.delta_hat == pytest.approx(1 / np.sqrt(2), rel=0.1)
    assert r.realness.passed


@pytest.mark.parametrize("a", [0.1, 0.4])
def test_translation_eigenvalue_for_moving_fronts(a):
    r = pipeline.allen_cahn_study(a=a, h=0.05, Z=20.0)
    assert abs(r.lam) <= 5e-3
    assert r.eigvec_error <= 1e-2
    assert r.decay.delta_hat > abs(r.c) / 2


def test_two_sided_decay_picks_slower_tail():
    z = np.linspace(-10, 10, 2001)
    norms = np.where(z > 0, np.exp(-2.0 * z), np.exp(0.5 * z))
    slow, fp, fm = pipeline.two_sided_decay(z, norms, 10.0)
    assert fp.delta_hat == pytest.approx(2.0)
    assert fm.delta_hat == pytest.approx(0.5)
    assert slow is fm


def test_front_grid_spacing():
    z = pipeline.front_grid(1.0, 0.25)
    assert np.allclose(z, [-0.75, -0.5, -0.25, 0.0, 0.25, 0.5, 0.75])


def test_synthetic_setup_matches_components():
    f, wave, V = pipeline.synthetic_setup(n_x=15, n_z=81, Z=4.0, bump=(1.0, 1.0))
    assert V.n_x == 15 and V.n_z == 81
    ref = profiles.synth_example_potential(f, wave, 1.0, V.x_grid, V.z_grid)
    assert np.allclose(V.values - ref.values, np.exp(-V.z_grid ** 2)[None, :])
    sup, sp, sm = pipeline.sup_re_ess(V)
    assert sup == max(sp.sup, sm.sup)


@pytest.fixture(scope="module")
def small_bumped():
    _, _, V = pipeline.synthetic_setup(n_x=31, n_z=201, Z=10.0, bump=(2.0, 2.0))
    return pipeline.cylinder_study(V, 0.5, k=6)


def test_cylinder_study_on_small_grid(small_bumped):
    cr = small_bumped
    assert cr.realness.passed and not cr.realness.empty
    lam0, v = pipeline.leading_mode(cr)
    assert lam0 == pytest.approx(cr.realness.right_eigs[0].real, abs=1e-9)


def test_cylinder_decay_on_small_grid(small_bumped):
    d = pipeline.cylinder_decay(small_bumped, 10.0)
    assert d.bound > 0.25
    assert d.gronwall.passed
    assert d.M >= 2.0 and d.nu == d.bound
    assert 0.25 < d.decay.delta_hat <= 1.1 * d.bound


def test_leading_mode_requires_isolated_eigenvalue():
    _, _, V = pipeline.synthetic_setup(n_x=15, n_z=41, Z=4.0)
    cr = pipeline.cylinder_study(V, 0.5, k=4)
    assert cr.realness.empty
    with pytest.raises(NotRightOfEssential):
        pipeline.leading_mode(cr)
