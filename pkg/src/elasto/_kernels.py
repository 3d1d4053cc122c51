"""Grid stencil kernels for the oracle solver.

Two interchangeable implementations: numba ``@njit`` loops and plain numpy
slicing. numba is used when importable unless ``ELASTO_DISABLE_NUMBA=1``;
``ELASTO_THREADS`` caps the numba thread pool.

Arrays are (3, n1, n2, n3) float64; only interior nodes are written.
"""

from __future__ import annotations

import os
import warnings

import numpy as np

try:
    import numba
    from numba import njit, prange
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

# older system TBB builds make numba warn on first parallel launch; it falls back to omp
warnings.filterwarnings("ignore", message="The TBB threading layer")

_DISABLED = os.environ.get("ELASTO_DISABLE_NUMBA", "0").lower() in ("1", "true", "yes")
HAVE_NUMBA = numba is not None


def default_backend() -> str:
    return "numba" if HAVE_NUMBA and not _DISABLED else "numpy"


def _apply_thread_cap():
    cap = os.environ.get("ELASTO_THREADS")
    if cap and HAVE_NUMBA:
        n = max(1, min(int(cap), numba.config.NUMBA_NUM_THREADS))
        numba.set_num_threads(n)


# ---------------------------------------------------------------- numpy path

def _operator_numpy(U, lam, mu, h, out):
    c = slice(1, -1)
    p = slice(2, None)
    m = slice(None, -2)
    inv_h2 = 1.0 / (h * h)
    inv_4h2 = 0.25 * inv_h2

    def shift(a, d):
        sl = [c, c, c]
        for ax, s in d.items():
            sl[ax] = p if s > 0 else m
        return a[tuple(sl)]

    lp2m = lam + 2.0 * mu
    lpm = lam + mu
    for i in range(3):
        ui = U[i]
        centre = ui[c, c, c]
        acc = np.zeros_like(centre)
        for j in range(3):
            d2 = (shift(ui, {j: 1}) - 2.0 * centre + shift(ui, {j: -1})) * inv_h2
            acc += (lp2m if j == i else mu) * d2
        for j in range(3):
            if j == i:
                continue
            uj = U[j]
            mixed = (shift(uj, {i: 1, j: 1}) - shift(uj, {i: 1, j: -1})
                     - shift(uj, {i: -1, j: 1}) + shift(uj, {i: -1, j: -1})) * inv_4h2
            acc += lpm * mixed
        out[i][c, c, c] = acc
    return out


def _step_numpy(U_prev, U, U_next, F, lam, mu, rho, h, dt, first):
    acc = np.zeros_like(U)
    _operator_numpy(U, lam, mu, h, acc)
    c = (slice(None), slice(1, -1), slice(1, -1), slice(1, -1))
    a = acc[c] / rho + F[c]
    if first:
        # U_prev holds the initial velocity on the first step
        U_next[c] = U[c] + dt * U_prev[c] + 0.5 * dt * dt * a
    else:
        U_next[c] = 2.0 * U[c] - U_prev[c] + dt * dt * a
    return U_next


# ---------------------------------------------------------------- numba path

if HAVE_NUMBA:

    @njit(cache=True, parallel=True, fastmath=False)
    def _operator_numba(U, lam, mu, h, out):
        n1, n2, n3 = U.shape[1], U.shape[2], U.shape[3]
        inv_h2 = 1.0 / (h * h)
        inv_4h2 = 0.25 * inv_h2
        lp2m = lam + 2.0 * mu
        lpm = lam + mu
        for a in prange(1, n1 - 1):
            for b in range(1, n2 - 1):
                for c in range(1, n3 - 1):
                    u0 = U[0, a, b, c]
                    v0 = U[1, a, b, c]
                    w0 = U[2, a, b, c]
                    uxx = (U[0, a + 1, b, c] - 2.0 * u0 + U[0, a - 1, b, c]) * inv_h2
                    uyy = (U[0, a, b + 1, c] - 2.0 * u0 + U[0, a, b - 1, c]) * inv_h2
                    uzz = (U[0, a, b, c + 1] - 2.0 * u0 + U[0, a, b, c - 1]) * inv_h2
                    vxx = (U[1, a + 1, b, c] - 2.0 * v0 + U[1, a - 1, b, c]) * inv_h2
                    vyy = (U[1, a, b + 1, c] - 2.0 * v0 + U[1, a, b - 1, c]) * inv_h2
                    vzz = (U[1, a, b, c + 1] - 2.0 * v0 + U[1, a, b, c - 1]) * inv_h2
                    wxx = (U[2, a + 1, b, c] - 2.0 * w0 + U[2, a - 1, b, c]) * inv_h2
                    wyy = (U[2, a, b + 1, c] - 2.0 * w0 + U[2, a, b - 1, c]) * inv_h2
                    wzz = (U[2, a, b, c + 1] - 2.0 * w0 + U[2, a, b, c - 1]) * inv_h2
                    vxy = (U[1, a + 1, b + 1, c] - U[1, a + 1, b - 1, c]
                           - U[1, a - 1, b + 1, c] + U[1, a - 1, b - 1, c]) * inv_4h2
                    wxz = (U[2, a + 1, b, c + 1] - U[2, a + 1, b, c - 1]
                           - U[2, a - 1, b, c + 1] + U[2, a - 1, b, c - 1]) * inv_4h2
                    uxy = (U[0, a + 1, b + 1, c] - U[0, a + 1, b - 1, c]
                           - U[0, a - 1, b + 1, c] + U[0, a - 1, b - 1, c]) * inv_4h2
                    wyz = (U[2, a, b + 1, c + 1] - U[2, a, b + 1, c - 1]
                           - U[2, a, b - 1, c + 1] + U[2, a, b - 1, c - 1]) * inv_4h2
                    uxz = (U[0, a + 1, b, c + 1] - U[0, a + 1, b, c - 1]
                           - U[0, a - 1, b, c + 1] + U[0, a - 1, b, c - 1]) * inv_4h2
                    vyz = (U[1, a, b + 1, c + 1] - U[1, a, b + 1, c - 1]
                           - U[1, a, b - 1, c + 1] + U[1, a, b - 1, c - 1]) * inv_4h2
                    out[0, a, b, c] = lp2m * uxx + mu * uyy + mu * uzz + lpm * (vxy + wxz)
                    out[1, a, b, c] = mu * vxx + lp2m * vyy + mu * vzz + lpm * (uxy + wyz)
                    out[2, a, b, c] = mu * wxx + mu * wyy + lp2m * wzz + lpm * (uxz + vyz)
        return out

    @njit(cache=True, parallel=True)
    def _combine_numba(U_prev, U, U_next, acc, F, rho, dt, first):
        n1, n2, n3 = U.shape[1], U.shape[2], U.shape[3]
        dt2 = dt * dt
        for a in prange(1, n1 - 1):
            for k in range(3):
                for b in range(1, n2 - 1):
                    for c in range(1, n3 - 1):
                        q = acc[k, a, b, c] / rho + F[k, a, b, c]
                        if first:
                            U_next[k, a, b, c] = U[k, a, b, c] + dt * U_prev[k, a, b, c] + 0.5 * dt2 * q
                        else:
                            U_next[k, a, b, c] = 2.0 * U[k, a, b, c] - U_prev[k, a, b, c] + dt2 * q
        return U_next

    def _step_numba(U_prev, U, U_next, F, lam, mu, rho, h, dt, first):
        acc = np.zeros_like(U)
        _operator_numba(U, lam, mu, h, acc)
        return _combine_numba(U_prev, U, U_next, acc, F, rho, dt, first)


# ---------------------------------------------------------------- dispatch

def _pick(backend):
    backend = backend or default_backend()
    if backend == "numba":
        if not HAVE_NUMBA:
            raise RuntimeError("numba backend requested but numba is not importable")
        _apply_thread_cap()
    elif backend != "numpy":
        raise ValueError(f"unknown backend {backend!r}")
    return backend


def elastic_operator(U, lam, mu, h, backend=None):
    """``mu * lap(U) + (lam + mu) * grad(div U)`` on interior nodes; boundary entries are 0."""
    U = np.ascontiguousarray(U, dtype=float)
    out = np.zeros_like(U)
    if _pick(backend) == "numba":
        return _operator_numba(U, float(lam), float(mu), float(h), out)
    return _operator_numpy(U, lam, mu, h, out)


def leapfrog_step(U_prev, U, U_next, F, lam, mu, rho, h, dt, first=False, backend=None):
    """Advance one step in place on ``U_next`` interior nodes.

    With ``first=True`` the ``U_prev`` slot carries the initial velocity and
    the Taylor start ``U + dt*V + dt^2/2 * acc`` is used.
    """
    if _pick(backend) == "numba":
        return _step_numba(U_prev, U, U_next, F, float(lam), float(mu), float(rho),
                           float(h), float(dt), bool(first))
    return _step_numpy(U_prev, U, U_next, F, lam, mu, rho, h, dt, first)
