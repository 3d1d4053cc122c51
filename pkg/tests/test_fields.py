import math

import numpy as np
import pytest
from scipy.stats import qmc

from elasto import ScalarField3, SpacetimePoint, VectorField3, check_decay, curl, partial
from elasto.fields import ScalarProfile, cube_directions, profile_decays
from elasto.profiles import gaussian

from conftest import EXP_S2, gauss_ridge


def field(f):
    return ScalarField3(f)


def test_polynomial_first_derivative():
    f = field(lambda x1, x2, x3: x1**2)
    assert partial(f, 1, 1, SpacetimePoint(0, 3, 0, 0)) == pytest.approx(6.0, abs=1e-9)


def test_gaussian_first_derivative_fd():
    f = field(lambda x1, x2, x3: np.exp(-x1**2))
    expected = -2.0 * math.exp(-1.0)
    assert partial(f, 1, 1, (1.0, 0.0, 0.0)) == pytest.approx(expected, abs=1e-12)


def test_no_dependence_gives_zero():
    f = field(lambda x1, x2, x3: np.exp(-x1**2))
    x = np.array([[0.3, -1.2], [2.0, 0.1], [0.5, 0.5]])
    assert np.all(partial(f, 2, 1, x) == 0.0)


def test_second_derivative_fd():
    f = field(lambda x1, x2, x3: np.sin(x2) * x3)
    got = partial(f, 2, 2, (0.0, 0.7, 2.0))
    assert got == pytest.approx(-math.sin(0.7) * 2.0, abs=1e-7)


def test_invalid_order_rejected():
    with pytest.raises(ValueError):
        partial(field(lambda *x: x[0]), 1, 3, (0, 0, 0))


def test_analytic_partial_preferred():
    f = ScalarField3(lambda x1, x2, x3: x1, {(1, 0, 0): lambda *x: np.full(np.shape(x[0]), 42.0)})
    assert partial(f, 1, 1, (0.0, 0.0, 0.0)) == 42.0


def test_analytic_partials_match_fd_fallback():
    # ridge partials are analytic; strip them and compare with the FD route
    v = gauss_ridge((1, -1, 1), sigma=1.0)
    pts = (qmc.Halton(d=3, scramble=False).random(100).T - 0.5) * 4
    for comp in v.components:
        bare = ScalarField3(comp.func, fd_step=1e-4)
        for axis in (1, 2, 3):
            for order in (1, 2):
                a = partial(comp, axis, order, pts)
                b = partial(bare, axis, order, pts)
                # Richardson error ~ h^4 * f^(5); step 1e-4 leaves rounding noise only
                tol = 1e-10 if order == 1 else 1e-6
                assert np.max(np.abs(a - b)) < tol


def test_partial_is_linear():
    f = ScalarField3(lambda x1, x2, x3: np.sin(x1) * np.cos(x2) + x3**3)
    g = ScalarField3(lambda x1, x2, x3: np.exp(-(x1**2 + x2**2)))
    al, be = 1.7, -0.4
    h = ScalarField3(lambda *x: al * f(*x) + be * g(*x))
    pts = np.random.default_rng(1).uniform(-1, 1, (3, 20))
    for axis in (1, 2, 3):
        lhs = partial(h, axis, 1, pts)
        rhs = al * partial(f, axis, 1, pts) + be * partial(g, axis, 1, pts)
        # each side carries its own FD rounding (~eps/h), so compare at that level
        assert np.allclose(lhs, rhs, rtol=1e-9, atol=1e-9)


def test_mixed_partials_symmetric():
    f = ScalarField3(lambda x1, x2, x3: np.sin(x1 * x2) + x3 * x1**2)
    d12 = f.derivative((1, 1, 0))(0.3, 0.8, 1.1)
    # nested FD in the other order
    d21 = ScalarField3(f.derivative((0, 1, 0))).derivative((1, 0, 0))(0.3, 0.8, 1.1)
    exact = math.cos(0.24) - 0.24 * math.sin(0.24)
    assert d12 == pytest.approx(exact, abs=1e-7)
    assert d21 == pytest.approx(d12, abs=1e-7)


def test_curl_of_gradient_vanishes():
    # v = grad exp(-(x1+x2+x3)^2), built without analytic partials
    def comp(x1, x2, x3):
        s = x1 + x2 + x3
        return -2 * s * np.exp(-s * s)

    v = VectorField3.from_functions(comp, comp, comp)
    pts = np.random.default_rng(2).uniform(-2, 2, (3, 50))
    assert np.max(np.abs(curl(v, pts))) < 1e-6


def test_rotational_field_curl_third_component():
    # v = (-x2 g, x1 g, 0), g = exp(-r^2); analytic curl_3 = 2g - 2 r_perp^2 g with r_perp^2 = x1^2 + x2^2
    def g(x1, x2, x3):
        return np.exp(-(x1**2 + x2**2 + x3**2))

    v = VectorField3.from_functions(lambda *x: -x[1] * g(*x), lambda *x: x[0] * g(*x),
                                    lambda *x: 0 * x[0])
    c = curl(v, (1.0, 0.0, 0.0))
    expected = 2 * math.exp(-1) - 2 * 1.0 * math.exp(-1)  # 0 exactly at x1 = 1
    assert c[2] == pytest.approx(expected, abs=1e-9)
    c = curl(v, (0.5, 0.0, 0.0))
    expected = 2 * math.exp(-0.25) - 2 * 0.25 * math.exp(-0.25)
    assert c[2] == pytest.approx(expected, abs=1e-9)
    assert c[2] != 0.0


def test_curl_of_zero_is_exactly_zero():
    assert np.all(curl(VectorField3.zero(), (0.3, 0.2, -1.0)) == 0.0)


def test_cube_directions():
    d = cube_directions()
    assert d.shape == (26, 3)
    assert np.allclose(np.linalg.norm(d, axis=1), 1.0)


def test_decay_constant_field_fails():
    one = lambda x1, x2, x3: np.ones(np.broadcast(x1, x2, x3).shape)  # noqa: E731
    v = VectorField3.from_functions(one, one, one)
    assert not check_decay(v, (5, 10, 20), 1e-6).passed


def test_decay_zero_field_passes():
    assert check_decay(VectorField3.zero(), (5, 10, 20), 1e-6).passed


def test_decay_radial_gaussian_gradient_passes():
    def comp(i):
        return lambda *x: -2 * x[i] * np.exp(-(x[0]**2 + x[1]**2 + x[2]**2))

    v = VectorField3.from_functions(comp(0), comp(1), comp(2))
    assert check_decay(v, (5, 10, 20), 1e-6).passed


def test_decay_ridge_field_fails_along_its_plane():
    # A ridge field is constant on planes eps . x = const. Cube edge directions
    # orthogonal to eps stay on the plane s = 0 where f'' is -2, so the
    # first-derivative samples never decay.
    rep = check_decay(gauss_ridge((1, 1, 1)), (5, 10, 20), 1e-6)
    assert not rep.passed
    assert rep.max_by_radius[-1] == pytest.approx(2.0, rel=1e-12)
    assert abs(np.dot(rep.worst_direction, (1, 1, 1))) < 1e-12


def test_decay_radii_must_increase():
    with pytest.raises(ValueError):
        check_decay(VectorField3.zero(), (10, 5), 1e-6)


def test_profile_fd_derivatives_beyond_supplied():
    p = ScalarProfile(lambda s: np.exp(-s * s), (lambda s: -2 * s * np.exp(-s * s),))
    s = np.linspace(-2, 2, 9)
    d2 = (4 * s * s - 2) * np.exp(-s * s)
    assert np.allclose(p.derivative(2)(s), d2, atol=1e-7)
    assert profile_decays(p)


def test_reflected_profile():
    p = gaussian(1.0, s0=0.5)
    r = p.reflected()
    s = np.linspace(-3, 3, 13)
    assert np.allclose(r(s), p(-s))
    assert np.allclose(r.derivative(1)(s), -p.derivative(1)(-s))
    assert np.allclose(r.derivative(2)(s), p.derivative(2)(-s))
