"""Exact displacement of the Cauchy problem by per-axis d'Alembert formulas.

Component ``u_k`` solves a 1-D wave equation along axis ``k`` with the other
two coordinates frozen:

    u_k = (phi_k(x + a t e_k) + phi_k(x - a t e_k)) / 2
        + 1/(2a) * int_{x_k - a t}^{x_k + a t} psi_k d(alpha)
        + 1/(2a) * int_0^t d(tau) int_{x_k - a (t - tau)}^{x_k + a (t - tau)} F_k(tau, .) d(alpha)

The array functions (``displacement``, ``velocity``, ``displacement_gradient``)
take ``t`` of shape (N,) and ``x`` of shape (3, N). The point functions wrap
them for a single :class:`SpacetimePoint`.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .admissible import ProblemData
from .core import Material, SpacetimePoint
from .errors import NoConvergence, PreconditionError
from .fields import _UNIT, _ZeroField
from .quadrature import QuadratureSpec, integrate_batch

DEFAULT_QUAD = QuadratureSpec()


@dataclass(frozen=True)
class DisplacementSample:
    u1: float
    u2: float
    u3: float
    point: SpacetimePoint
    quadrature_error_estimate: float

    @property
    def u(self) -> np.ndarray:
        return np.array([self.u1, self.u2, self.u3])


def _prep(t, x):
    x = np.atleast_2d(np.asarray(x, dtype=float))
    if x.shape[0] != 3:
        raise ValueError(f"x must have shape (3, N), got {x.shape}")
    t = np.broadcast_to(np.asarray(t, dtype=float), x.shape[1:]).astype(float)
    if np.any(t < 0):
        raise PreconditionError("time must be >= 0")
    return t, x


def _ev(f, *args):
    return np.broadcast_to(f(*args), np.broadcast(*args).shape)


def _shift(x, k, d):
    y = [x[0], x[1], x[2]]
    y[k] = x[k] + d
    return y


def _is_zero(f) -> bool:
    return isinstance(f, _ZeroField)


class _Flags:
    """Collects quadrature convergence failures across nested integrals."""

    def __init__(self):
        self.ok = True

    def update(self, converged):
        self.ok = self.ok and bool(np.all(converged))


def _line_integral(fn, k, t, x, a, spec, flags):
    """``int_{x_k - a t}^{x_k + a t} fn(x with x_k = alpha) d(alpha)`` per point."""
    frozen = [x[0], x[1], x[2]]

    def integrand(nodes, idx):
        args = [frozen[j][idx][:, None] for j in range(3)]
        args[k] = nodes
        return _ev(fn, *args)

    v, e, ok = integrate_batch(integrand, x[k] - a * t, x[k] + a * t, spec)
    flags.update(ok)
    return v, e


def _triangle_integral(fn, k, t, x, a, spec, flags):
    """Iterated integral of ``fn(tau, x with x_k = alpha)`` over the characteristic triangle."""
    inner_spec = spec.tightened(10.0)

    def outer(taus, idx):
        rows, q = taus.shape
        tt = t[idx][:, None]
        half = (a * (tt - taus)).ravel()
        centre = np.repeat(x[k][idx], q)
        tau_flat = taus.ravel()
        pid = np.repeat(idx, q)

        def inner(nodes, jdx):
            args = [x[j][pid[jdx]][:, None] for j in range(3)]
            args[k] = nodes
            return _ev(fn, tau_flat[jdx][:, None], *args)

        v, _, ok, mass = integrate_batch(inner, centre - half, centre + half, inner_spec,
                                         with_scale=True)
        flags.update(ok)
        # inner results can cancel to noise; judge the outer rule against their L1 mass
        return v.reshape(rows, q), mass.reshape(rows, q)

    v, e, ok = integrate_batch(outer, np.zeros_like(t), t, spec)
    flags.update(ok)
    return v, e


def _edge_integral(fn, sign, k, t, x, a, spec, flags):
    """``int_0^t [fn(tau, x + a(t-tau) e_k) + sign * fn(tau, x - a(t-tau) e_k)] d(tau)``."""

    def integrand(taus, idx):
        tt = t[idx][:, None]
        base = [x[j][idx][:, None] for j in range(3)]
        d = a * (tt - taus)
        return _ev(fn, taus, *_shift(base, k, d)) + sign * _ev(fn, taus, *_shift(base, k, -d))

    v, e, ok = integrate_batch(integrand, np.zeros_like(t), t, spec)
    flags.update(ok)
    return v, e


def _dalembert(phi_fn, psi_fn, f_fn, k, t, x, a, spec, flags):
    """d'Alembert combination along axis ``k`` for arbitrary (phi, psi, F) callables."""
    xp, xm = _shift(x, k, a * t), _shift(x, k, -a * t)
    val = 0.5 * (_ev(phi_fn, *xp) + _ev(phi_fn, *xm))
    err = np.zeros_like(t)
    if psi_fn is not None:
        v, e = _line_integral(psi_fn, k, t, x, a, spec, flags)
        val = val + v / (2.0 * a)
        err = err + e / (2.0 * a)
    if f_fn is not None:
        v, e = _triangle_integral(f_fn, k, t, x, a, spec, flags)
        val = val + v / (2.0 * a)
        err = err + e / (2.0 * a)
    return val, err


def _raise_if(flags, value, err):
    if not flags.ok:
        raise NoConvergence("quadrature did not converge", value, err)


def displacement(data: ProblemData, m: Material, t, x, spec: QuadratureSpec = DEFAULT_QUAD):
    """Displacement at many points. Returns ``(u, err)`` with shapes (3, N) and (N,)."""
    t, x = _prep(t, x)
    a = m.a
    flags = _Flags()
    u = np.empty((3,) + t.shape)
    errs = np.empty((3,) + t.shape)
    for k in range(3):
        psi = None if _is_zero(data.psi[k]) else data.psi[k]
        fk = None if data.forcing.is_zero else data.forcing.component(k)
        u[k], errs[k] = _dalembert(data.phi[k], psi, fk, k, t, x, a, spec, flags)
    err = errs.max(axis=0)
    _raise_if(flags, u, err)
    return u, err


def velocity(data: ProblemData, m: Material, t, x, spec: QuadratureSpec = DEFAULT_QUAD):
    """Time derivative of the displacement at many points; shape (3, N)."""
    t, x = _prep(t, x)
    a = m.a
    flags = _Flags()
    out = np.empty((3,) + t.shape)
    for k in range(3):
        xp, xm = _shift(x, k, a * t), _shift(x, k, -a * t)
        dphi = data.phi[k].derivative(_UNIT[k])
        val = 0.5 * a * (_ev(dphi, *xp) - _ev(dphi, *xm))
        val = val + 0.5 * (_ev(data.psi[k], *xp) + _ev(data.psi[k], *xm))
        if not data.forcing.is_zero:
            v, _ = _edge_integral(data.forcing.component(k), 1.0, k, t, x, a, spec, flags)
            val = val + 0.5 * v
        out[k] = val
    _raise_if(flags, out, None)
    return out


def displacement_gradient(data: ProblemData, m: Material, t, x, spec: QuadratureSpec = DEFAULT_QUAD):
    """Matrix ``g[i, j] = d u_i / d x_j`` at many points; shape (3, 3, N).

    Obtained by differentiating the d'Alembert formulas: along the
    characteristic axis the integrals collapse to endpoint terms, across it
    the derivative moves under the integral sign.
    """
    t, x = _prep(t, x)
    a = m.a
    flags = _Flags()
    g = np.empty((3, 3) + t.shape)
    for i in range(3):
        for j in range(3):
            e_j = _UNIT[j]
            dphi = data.phi[i].derivative(e_j)
            if i == j:
                xp, xm = _shift(x, i, a * t), _shift(x, i, -a * t)
                val = 0.5 * (_ev(dphi, *xp) + _ev(dphi, *xm))
                val = val + (_ev(data.psi[i], *xp) - _ev(data.psi[i], *xm)) / (2.0 * a)
                if not data.forcing.is_zero:
                    v, _ = _edge_integral(data.forcing.component(i), -1.0, i, t, x, a, spec, flags)
                    val = val + v / (2.0 * a)
            else:
                psi = None if _is_zero(data.psi[i]) else data.psi[i].derivative(e_j)
                fd = None if data.forcing.is_zero else data.forcing.component(i, e_j)
                val, _ = _dalembert(dphi, psi, fd, i, t, x, a, spec, flags)
            g[i, j] = val
    _raise_if(flags, g, None)
    return g


def _single(p: SpacetimePoint):
    return np.array([p.t]), np.array([[p.x1], [p.x2], [p.x3]])


def solve_component(k: int, data: ProblemData, m: Material, p: SpacetimePoint,
                    spec: QuadratureSpec = DEFAULT_QUAD) -> float:
    """Displacement component ``u_k`` (k = 1, 2, 3) at one point."""
    if k not in (1, 2, 3):
        raise ValueError("component index must be 1, 2 or 3")
    t, x = _single(p)
    a = m.a
    flags = _Flags()
    i = k - 1
    psi = None if _is_zero(data.psi[i]) else data.psi[i]
    fk = None if data.forcing.is_zero else data.forcing.component(i)
    val, err = _dalembert(data.phi[i], psi, fk, i, t, x, a, spec, flags)
    _raise_if(flags, val, err)
    return float(val[0])


def solve(data: ProblemData, m: Material, p: SpacetimePoint,
          spec: QuadratureSpec = DEFAULT_QUAD) -> DisplacementSample:
    t, x = _single(p)
    u, err = displacement(data, m, t, x, spec)
    return DisplacementSample(float(u[0, 0]), float(u[1, 0]), float(u[2, 0]), p, float(err[0]))


def time_derivative(data: ProblemData, m: Material, p: SpacetimePoint,
                    spec: QuadratureSpec = DEFAULT_QUAD) -> np.ndarray:
    t, x = _single(p)
    return velocity(data, m, t, x, spec)[:, 0]


def space_gradient(data: ProblemData, m: Material, p: SpacetimePoint,
                   spec: QuadratureSpec = DEFAULT_QUAD) -> np.ndarray:
    t, x = _single(p)
    return displacement_gradient(data, m, t, x, spec)[:, :, 0]
