"""Composite 7-point Gauss-Legendre quadrature with panel doubling.

``integrate_batch`` runs many independent integrals at once. Each integral
stops at the first doubling level where its own estimate has settled, so a
result never depends on what else is in the batch.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NoConvergence, PreconditionError

GL_NODES, GL_WEIGHTS = np.polynomial.legendre.leggauss(7)
_UNIT_NODES = 0.5 * (GL_NODES + 1.0)
_UNIT_WEIGHTS = 0.5 * GL_WEIGHTS

# rows * panels * 7 evaluated per integrand call
_MAX_NODES_PER_CALL = 2_000_000


@dataclass(frozen=True)
class QuadratureSpec:
    rel_tol: float = 1e-10
    max_panel_doublings: int = 12
    base_panels: int = 2

    def __post_init__(self):
        if not self.rel_tol > 0:
            raise PreconditionError("rel_tol must be > 0")
        if self.base_panels < 2:
            raise PreconditionError("base_panels must be >= 2")
        if self.max_panel_doublings < 1:
            raise PreconditionError("max_panel_doublings must be >= 1")

    def tightened(self, factor: float = 10.0) -> "QuadratureSpec":
        return QuadratureSpec(self.rel_tol / factor, self.max_panel_doublings, self.base_panels)


def _composite(f, lo, hi, panels, idx):
    n = lo.shape[0]
    width = (hi - lo) / panels
    starts = lo[:, None] + width[:, None] * np.arange(panels)
    nodes = (starts[:, :, None] + width[:, None, None] * _UNIT_NODES).reshape(n, panels * 7)
    out = f(nodes, idx)
    if isinstance(out, tuple):
        # integrand supplied its own magnitude (e.g. an inner integral's L1 mass)
        vals, mags = (np.broadcast_to(o, nodes.shape) for o in out)
    else:
        vals = np.broadcast_to(out, nodes.shape)
        mags = np.abs(vals)
    w = np.tile(_UNIT_WEIGHTS, panels) * width[:, None]
    return (vals * w).sum(axis=1), (mags * w).sum(axis=1)


def _composite_chunked(f, lo, hi, panels, idx):
    n = lo.shape[0]
    step = max(1, _MAX_NODES_PER_CALL // (panels * 7))
    if n <= step:
        return _composite(f, lo, hi, panels, idx)
    est, scale = np.empty(n), np.empty(n)
    for s in range(0, n, step):
        sl = slice(s, s + step)
        est[sl], scale[sl] = _composite(f, lo[sl], hi[sl], panels, idx[sl])
    return est, scale


def integrate_batch(f, lo, hi, spec: QuadratureSpec = QuadratureSpec(), with_scale: bool = False):
    """Integrate ``f`` over ``[lo[n], hi[n]]`` for every ``n``.

    ``f(nodes, idx)`` receives a (rows, q) array of abscissae together with
    the batch indices ``idx`` of those rows, and returns values of the same
    shape, or a ``(values, magnitudes)`` pair when the plain ``|values|``
    understate the size of the integrand. Convergence is judged relative to
    the integral of the magnitudes. Returns ``(values, error_estimates,
    converged)``, plus that magnitude integral when ``with_scale`` is set; a
    zero-length interval gives exactly 0 with zero error.
    """
    lo = np.asarray(lo, dtype=float).ravel()
    hi = np.asarray(hi, dtype=float).ravel()
    if np.any(hi < lo):
        raise PreconditionError("integration bounds need lo <= hi")
    n = lo.shape[0]
    value = np.zeros(n)
    err = np.zeros(n)
    mass = np.zeros(n)
    converged = np.ones(n, dtype=bool)
    active = np.flatnonzero(hi > lo)

    def done():
        return (value, err, converged, mass) if with_scale else (value, err, converged)

    if active.size == 0:
        return done()
    panels = spec.base_panels
    prev, _ = _composite_chunked(f, lo[active], hi[active], panels, active)
    tol = spec.rel_tol
    for _ in range(spec.max_panel_doublings):
        panels *= 2
        cur, scale = _composite_chunked(f, lo[active], hi[active], panels, active)
        diff = np.abs(cur - prev)
        ok = diff <= tol * scale
        value[active[ok]] = cur[ok]
        err[active[ok]] = diff[ok]
        mass[active[ok]] = scale[ok]
        keep = ~ok
        active, prev = active[keep], cur[keep]
        if active.size == 0:
            return done()
        last_diff, last_scale = diff[keep], scale[keep]
    value[active] = prev
    err[active] = last_diff
    mass[active] = last_scale
    converged[active] = last_diff <= 10.0 * tol * last_scale
    return done()


def integrate_1d(f, lo: float, hi: float, spec: QuadratureSpec = QuadratureSpec()):
    """Scalar wrapper around :func:`integrate_batch`; ``f`` takes a 1-D node array.

    Raises :class:`NoConvergence` (carrying the estimate) when the panel cap
    is reached with the error above 10 x ``rel_tol``.
    """
    lo, hi = float(lo), float(hi)
    if lo == hi:
        return 0.0, 0.0
    v, e, ok = integrate_batch(lambda nodes, idx: f(nodes), [lo], [hi], spec)
    if not ok[0]:
        raise NoConvergence(f"no convergence on [{lo}, {hi}] (error {e[0]:.3e})", v[0], e[0])
    return float(v[0]), float(e[0])
