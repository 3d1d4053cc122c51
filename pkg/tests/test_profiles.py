import math

import numpy as np
import pytest

from elasto.profiles import (
    PROFILES, dgaussian, envelope, gaussian, make_profile, polygauss, sine_gauss, suggest,
)

S = np.linspace(-4.0, 4.0, 41)


def fd(f, s, h=1e-3):
    return (f(s + h) - f(s - h)) / (2 * h)


@pytest.mark.parametrize("profile", [
    gaussian(1.3, 0.2, 2.0), dgaussian(0.9), sine_gauss(2.0, 1.1, -0.3), polygauss((1, -0.5, 0.3, 0.0, 0.1), 1.2),
], ids=lambda p: p.name)
def test_analytic_derivatives_match_central_difference(profile):
    for n in range(4):
        lhs = profile.derivative(n + 1)(S)
        rhs = fd(profile.derivative(n), S)
        assert np.max(np.abs(lhs - rhs)) < 1e-4 * max(1.0, np.max(np.abs(lhs)))


def test_closed_forms():
    s = 0.7
    assert gaussian(1 / math.sqrt(2))(s) == pytest.approx(math.exp(-s * s), rel=1e-15)
    assert gaussian(1 / math.sqrt(2)).derivative(1)(1.0) == pytest.approx(-2 * math.exp(-1), rel=1e-14)
    assert gaussian(1 / math.sqrt(2)).derivative(2)(0.0) == pytest.approx(-2.0, rel=1e-14)
    assert sine_gauss(3.0, 2.0)(s) == pytest.approx(math.sin(3 * s) * math.exp(-s * s / 8), rel=1e-14)
    assert dgaussian(2.0)(s) == pytest.approx(-(s / 2) * math.exp(-s * s / 8), rel=1e-14)
    assert polygauss((1.0, 2.0))(s) == pytest.approx((1 + 2 * s) * math.exp(-s * s / 2), rel=1e-14)


def test_gaussian_first_derivative_supremum():
    # sup |f'| = amp / sigma * exp(-1/2), reached at z = +-1
    p = gaussian(1.7, amp=2.5)
    s = np.linspace(-10, 10, 200001)
    assert np.max(np.abs(p.derivative(1)(s))) == pytest.approx(2.5 / 1.7 * math.exp(-0.5), rel=1e-9)


def test_all_catalog_profiles_decay():
    for name in PROFILES:
        p = make_profile(name)
        far = np.array([-60.0, 60.0])
        for n in range(4):
            assert np.all(np.abs(p.derivative(n)(far)) < 1e-12)


def test_polygauss_degree_limit():
    with pytest.raises(ValueError):
        polygauss((1, 2, 3, 4, 5, 6))


def test_envelopes():
    assert envelope("exp_decay", rate=1.0)(math.log(2)) == pytest.approx(0.5)
    assert envelope("constant", value=0.0)(3.0) == 0.0
    assert envelope("sine", omega=2.0)(0.25) == pytest.approx(math.sin(0.5))
    assert envelope("exp_decay").sup(5.0) == pytest.approx(1.0)


def test_suggestion():
    assert suggest("gausian", PROFILES) == "gaussian"
    assert suggest("zzz", PROFILES) is None
