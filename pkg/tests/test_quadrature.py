import math

import numpy as np
import pytest
from scipy import integrate

from elasto import NoConvergence, PreconditionError, QuadratureSpec, integrate_1d, integrate_batch

# independent reference: closed form through erf
GAUSS_M1_1 = math.sqrt(math.pi) * math.erf(1.0)


def test_linear_exact():
    v, e = integrate_1d(lambda s: s, 0.0, 1.0)
    assert v == pytest.approx(0.5, abs=1e-16)


def test_gaussian_golden_value():
    v, e = integrate_1d(lambda s: np.exp(-s * s), -1.0, 1.0)
    assert abs(v - GAUSS_M1_1) < 1e-9
    assert GAUSS_M1_1 == pytest.approx(1.493648266, abs=1e-9)


def test_reference_agrees_with_scipy_quad():
    ref, _ = integrate.quad(lambda s: math.exp(-s * s), -1, 1, epsabs=1e-13, epsrel=1e-13)
    assert ref == pytest.approx(GAUSS_M1_1, abs=1e-14)


def test_zero_length_interval_is_exactly_zero():
    assert integrate_1d(lambda s: np.exp(s), 2.5, 2.5) == (0.0, 0.0)
    v, e, ok = integrate_batch(lambda n, i: np.ones_like(n), [1.0, 2.5], [1.0, 2.5])
    assert np.all(v == 0.0) and np.all(e == 0.0) and np.all(ok)


def test_reversed_bounds_rejected():
    with pytest.raises(PreconditionError):
        integrate_1d(lambda s: s, 1.0, 0.0)


def test_polynomial_degree_13_exact_on_base_panels():
    v, _ = integrate_1d(lambda s: s**13 + s**12, -1.0, 1.0)
    assert v == pytest.approx(2.0 / 13.0, rel=1e-14)


def test_batch_results_independent_of_batch():
    f = lambda n, i: np.sin(3 * n) * np.exp(-n * n)  # noqa: E731
    lo = np.array([-2.0, 0.0, 0.5, -1.0])
    hi = np.array([1.0, 3.0, 0.6, 4.0])
    full, _, _ = integrate_batch(f, lo, hi)
    for k in range(4):
        one, _, _ = integrate_batch(f, lo[k:k + 1], hi[k:k + 1])
        assert one[0] == full[k]


def test_no_convergence_raises_with_value():
    spec = QuadratureSpec(rel_tol=1e-14, max_panel_doublings=1, base_panels=2)
    with pytest.raises(NoConvergence) as exc:
        integrate_1d(lambda s: np.sin(40 * s), 0.0, 10.0, spec)
    assert exc.value.value is not None and exc.value.error > 0


def test_spec_validation():
    with pytest.raises(PreconditionError):
        QuadratureSpec(base_panels=1)
    with pytest.raises(PreconditionError):
        QuadratureSpec(rel_tol=0.0)
    with pytest.raises(PreconditionError):
        QuadratureSpec(max_panel_doublings=0)


def test_oscillatory_against_closed_form():
    v, e = integrate_1d(lambda s: np.cos(7 * s), 0.0, 3.0)
    assert v == pytest.approx(math.sin(21.0) / 7.0, abs=1e-12)
    assert e >= 0


def test_supplied_magnitudes_set_the_convergence_scale():
    # values that cancel to noise converge against the supplied magnitude, not |values|
    noise = lambda n, i: 1e-13 * np.sin(1e4 * n)  # noqa: E731
    v, e, ok, mass = integrate_batch(lambda n, i: (noise(n, i), np.ones_like(n)), [0.0], [1.0],
                                     with_scale=True)
    assert ok[0] and mass[0] == pytest.approx(1.0)
    assert abs(v[0]) < 1e-12
