"""Independent checks of the exact solution against the full elasticity system.

Everything here differentiates the solver's output numerically; nothing
reuses the reduced per-axis equations the solver was built from.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import qmc

from .admissible import ProblemData
from .core import Material, SpacetimePoint
from .errors import PreconditionError
from .quadrature import QuadratureSpec
from .solver import DEFAULT_QUAD, displacement, displacement_gradient, velocity


@dataclass(frozen=True)
class CheckReport:
    """Max violation per named check, judged against one tolerance."""

    title: str
    values: dict
    tol: float
    samples: int
    notes: tuple = ()

    @property
    def per_check(self) -> dict:
        return {k: v < self.tol for k, v in self.values.items()}

    @property
    def passed(self) -> bool:
        return all(self.per_check.values())

    @property
    def failures(self) -> list[str]:
        return [k for k, ok in self.per_check.items() if not ok]

    def to_text(self) -> str:
        lines = [f"{self.title} ({self.samples} samples, tol={self.tol:g})"]
        for k, v in self.values.items():
            lines.append(f"  {k:<24} {v:.3e}  {'ok' if v < self.tol else 'FAIL'}")
        lines.extend(f"  # {n}" for n in self.notes)
        lines.append("PASS" if self.passed else "FAIL: " + ", ".join(self.failures))
        return "\n".join(lines)

    def to_kv(self) -> str:
        return "".join(f"{k}={v!r}\n" for k, v in self.values.items())


def spacetime_points(lo=(-1.0, -1.0, -1.0), hi=(1.0, 1.0, 1.0), t_range=(0.1, 1.0),
                     count: int = 100, seed_offset: int = 1):
    """Deterministic Halton points in a spacetime box; returns ``(t, x)``."""
    h = qmc.Halton(d=4, scramble=False)
    h.fast_forward(seed_offset)
    u = h.random(count)
    lo4 = np.array([t_range[0], *lo], dtype=float)
    hi4 = np.array([t_range[1], *hi], dtype=float)
    p = lo4 + (hi4 - lo4) * u
    return p[:, 0].copy(), p[:, 1:].T.copy()


# ------------------------------------------------------------------ residual

def _residual_offsets():
    """Stencil of (dt, dx1, dx2, dx3) unit offsets: centre, axes, axis pairs, time."""
    offs = [(0, 0, 0, 0)]
    for i in range(3):
        for s in (1, -1):
            d = [0, 0, 0, 0]
            d[1 + i] = s
            offs.append(tuple(d))
    for i in range(3):
        for j in range(i + 1, 3):
            for si in (1, -1):
                for sj in (1, -1):
                    d = [0, 0, 0, 0]
                    d[1 + i], d[1 + j] = si, sj
                    offs.append(tuple(d))
    offs += [(1, 0, 0, 0), (-1, 0, 0, 0)]
    return offs


RESIDUAL_STENCIL = _residual_offsets()


def residual_many(data: ProblemData, m: Material, t, x, h: float,
                  spec: QuadratureSpec = DEFAULT_QUAD, solver=displacement) -> np.ndarray:
    """``rho u_tt - mu lap u - (lam + mu) grad div u - rho F`` by second-order
    central differences of the displacement; shape (3, N)."""
    t = np.atleast_1d(np.asarray(t, dtype=float))
    x = np.atleast_2d(np.asarray(x, dtype=float))
    if np.any(t < h):
        raise PreconditionError(f"residual needs t >= h (h={h})")
    n = t.shape[0]
    offs = np.array(RESIDUAL_STENCIL, dtype=float) * h
    tt = (t[None, :] + offs[:, 0:1]).ravel()
    xx = (x[:, None, :] + offs[:, 1:].T[:, :, None]).reshape(3, -1)
    u, _ = solver(data, m, tt, xx, spec)
    u = u.reshape(3, len(RESIDUAL_STENCIL), n)
    at = {o: u[:, r] for r, o in enumerate(RESIDUAL_STENCIL)}

    def key(dt=0, **ax):
        d = [dt, 0, 0, 0]
        for a, s in ax.items():
            d[int(a[1:])] = s
        return tuple(d)

    c = at[(0, 0, 0, 0)]
    h2 = h * h
    d2 = []  # second differences along each axis, every component
    for i in range(3):
        d2.append((at[key(**{f"x{i + 1}": 1})] - 2.0 * c + at[key(**{f"x{i + 1}": -1})]) / h2)
    lap = d2[0] + d2[1] + d2[2]
    graddiv = np.empty_like(c)
    for i in range(3):
        acc = d2[i][i].copy()
        for j in range(3):
            if j == i:
                continue
            pp = at[key(**{f"x{i + 1}": 1, f"x{j + 1}": 1})][j]
            pm = at[key(**{f"x{i + 1}": 1, f"x{j + 1}": -1})][j]
            mp = at[key(**{f"x{i + 1}": -1, f"x{j + 1}": 1})][j]
            mm = at[key(**{f"x{i + 1}": -1, f"x{j + 1}": -1})][j]
            acc += (pp - pm - mp + mm) / (4.0 * h2)
        graddiv[i] = acc
    utt = (at[(1, 0, 0, 0)] - 2.0 * c + at[(-1, 0, 0, 0)]) / h2
    F = data.forcing(t, *x) if not data.forcing.is_zero else 0.0
    return m.rho * utt - m.mu * lap - (m.lam + m.mu) * graddiv - m.rho * F


def residual(data: ProblemData, m: Material, p: SpacetimePoint, h: float,
             spec: QuadratureSpec = DEFAULT_QUAD, solver=displacement) -> np.ndarray:
    t = np.array([p.t])
    x = np.array([[p.x1], [p.x2], [p.x3]])
    return residual_many(data, m, t, x, h, spec, solver)[:, 0]


@dataclass(frozen=True)
class ResidualReport:
    h: float
    per_point: np.ndarray = field(repr=False)
    per_point_half: np.ndarray = field(repr=False)

    @property
    def norms(self) -> np.ndarray:
        return np.linalg.norm(self.per_point, axis=0)

    @property
    def norms_half(self) -> np.ndarray:
        return np.linalg.norm(self.per_point_half, axis=0)

    @property
    def max(self) -> float:
        return float(self.norms.max())

    @property
    def max_half(self) -> float:
        return float(self.norms_half.max())

    @property
    def l2(self) -> float:
        return float(np.sqrt(np.mean(self.norms**2)))

    @property
    def l2_half(self) -> float:
        return float(np.sqrt(np.mean(self.norms_half**2)))

    @property
    def ratios(self) -> np.ndarray:
        with np.errstate(divide="ignore", invalid="ignore"):
            return self.norms / self.norms_half

    @property
    def order(self) -> float:
        if self.max_half == 0.0:
            return math.nan
        return math.log2(self.max / self.max_half)

    def summary(self) -> dict:
        return {"residual_max_h": self.max, "residual_max_h_half": self.max_half,
                "residual_l2_h": self.l2, "residual_l2_h_half": self.l2_half}


def residual_report(data, m, t, x, h, spec=DEFAULT_QUAD, solver=displacement) -> ResidualReport:
    """Residual at steps ``h`` and ``h/2`` for an observed-order estimate."""
    r1 = residual_many(data, m, t, x, h, spec, solver)
    r2 = residual_many(data, m, t, x, 0.5 * h, spec, solver)
    return ResidualReport(h, r1, r2)


# ------------------------------------------------------------ identity suite

def _richardson(f_plus, f_minus, f_plus_half, f_minus_half, h):
    wide = (f_plus - f_minus) / (2.0 * h)
    narrow = (f_plus_half - f_minus_half) / h
    return (4.0 * narrow - wide) / 3.0


IDENTITIES = ("symmetric_gradient", "equal_diagonal", "divergence_is_3_d1u1", "equal_second_derivatives",
              "laplacian_is_3_d11", "axis_wave_equations", "full_system")


def identity_suite(data: ProblemData, m: Material, t, x, spec: QuadratureSpec = DEFAULT_QUAD,
                   tol: float = 1e-5, h: float = 1e-3, gradient=displacement_gradient,
                   vel=velocity) -> CheckReport:
    """Check the chain of identities an exact solution must satisfy.

    First derivatives come from the differentiated formulas; second
    derivatives are Richardson-extrapolated central differences of those.
    """
    t = np.atleast_1d(np.asarray(t, dtype=float))
    x = np.atleast_2d(np.asarray(x, dtype=float))
    if np.any(t < h):
        raise PreconditionError(f"identity suite needs sampled t >= h (h={h})")
    n = t.shape[0]
    g = gradient(data, m, t, x, spec)

    # second spatial derivatives d^2 u_k / dx_j^2 and d/dx_i (g_jj)
    shifts = []
    for j in range(3):
        for s in (h, -h, 0.5 * h, -0.5 * h):
            y = x.copy()
            y[j] += s
            shifts.append(y)
    gs = gradient(data, m, np.tile(t, 12), np.concatenate(shifts, axis=1), spec).reshape(3, 3, 12, n)
    hess = np.empty((3, 3, 3, n))  # hess[k, j, i] = d/dx_i (d u_k / dx_j)
    for i in range(3):
        b = 4 * i
        hess[:, :, i] = _richardson(gs[:, :, b], gs[:, :, b + 1], gs[:, :, b + 2], gs[:, :, b + 3], h)
    d2 = np.stack([hess[:, j, j] for j in range(3)], axis=1)  # d2[k, j] = d^2 u_k / dx_j^2

    ts = np.concatenate([t + h, t - h, t + 0.5 * h, t - 0.5 * h])
    vs = vel(data, m, ts, np.tile(x, 4), spec).reshape(3, 4, n)
    utt = _richardson(vs[:, 0], vs[:, 1], vs[:, 2], vs[:, 3], h)
    F = data.forcing(t, *x) if not data.forcing.is_zero else np.zeros((3, n))

    sym = max(np.max(np.abs(g[0, 1] - g[1, 0])), np.max(np.abs(g[0, 2] - g[2, 0])),
              np.max(np.abs(g[1, 2] - g[2, 1])))
    diag = max(np.max(np.abs(g[0, 0] - g[1, 1])), np.max(np.abs(g[1, 1] - g[2, 2])))
    div = g[0, 0] + g[1, 1] + g[2, 2]
    divv = max(np.max(np.abs(div - 3.0 * g[j, j])) for j in range(3))
    second_gap = max(np.max(np.abs(d2[:, 0] - d2[:, 1])), np.max(np.abs(d2[:, 1] - d2[:, 2])))
    lap = d2.sum(axis=1)
    lap_gap = max(np.max(np.abs(lap - 3.0 * d2[:, j])) for j in range(3))
    a2 = m.a**2
    wave = max(np.max(np.abs(utt[k] - a2 * d2[k, k] - F[k])) for k in range(3))
    graddiv = np.stack([hess[0, 0, i] + hess[1, 1, i] + hess[2, 2, i] for i in range(3)])
    full = m.rho * utt - m.mu * lap - (m.lam + m.mu) * graddiv - m.rho * F
    full_max = float(np.max(np.abs(full)))
    values = dict(zip(IDENTITIES, map(float, (sym, diag, divv, second_gap, lap_gap, wave, full_max))))
    return CheckReport("identity suite", values, tol, n)
