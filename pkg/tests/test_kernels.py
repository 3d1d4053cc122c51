import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from elasto import _kernels


def _grid(n, h):
    ax = np.arange(n) * h
    return np.array(np.meshgrid(ax, ax, ax, indexing="ij"))


def test_operator_exact_on_quadratics():
    # U = (x1^2, x1 x2, 0): lap U = (2, 0, 0), grad div U = grad(3 x1) = (3, 0, 0)
    h = 0.1
    X = _grid(7, h)
    U = np.stack([X[0] ** 2, X[0] * X[1], 0 * X[0]])
    lam, mu = 0.7, 1.3
    for backend in ("numpy", "numba"):
        L = _kernels.elastic_operator(U, lam, mu, h, backend)
        inner = L[:, 1:-1, 1:-1, 1:-1]
        assert np.allclose(inner[0], mu * 2 + (lam + mu) * 3, atol=1e-10)
        assert np.allclose(inner[1:], 0.0, atol=1e-10)
        assert np.all(L[:, 0] == 0.0) and np.all(L[:, :, :, -1] == 0.0)


@settings(max_examples=10, deadline=None)
@given(seed=st.integers(0, 2**31), first=st.booleans())
def test_backends_identical_step(seed, first):
    rng = np.random.default_rng(seed)
    shape = (3, 9, 8, 7)
    Up, U, F = (rng.normal(size=shape) for _ in range(3))
    out = [np.zeros(shape), np.zeros(shape)]
    for o, b in zip(out, ("numpy", "numba")):
        _kernels.leapfrog_step(Up, U, o, F, 0.4, 1.1, 1.7, 0.05, 0.01, first, backend=b)
    assert np.max(np.abs(out[0] - out[1])) <= 1e-12 * np.max(np.abs(out[0]))


def test_unknown_backend():
    with pytest.raises(ValueError):
        _kernels.elastic_operator(np.zeros((3, 3, 3, 3)), 1, 1, 1, backend="cuda")


@pytest.mark.parametrize("flag,expected", [("1", "numpy"), ("0", "numba")])
def test_environment_flag_selects_backend(flag, expected):
    env = dict(os.environ, ELASTO_DISABLE_NUMBA=flag)
    out = subprocess.run([sys.executable, "-c", "from elasto import _kernels; print(_kernels.default_backend())"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == expected


def test_thread_cap_applies():
    env = dict(os.environ, ELASTO_THREADS="1")
    code = ("import numpy as np, numba; from elasto import _kernels;"
            "_kernels.elastic_operator(np.zeros((3,4,4,4)), 1, 1, 1, 'numba');"
            "print(numba.get_num_threads())")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "1"
