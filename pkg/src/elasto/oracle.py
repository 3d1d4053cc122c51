"""Finite-difference oracle: explicit leapfrog on the full 3-D system.

The scheme discretizes the displacement form directly,

    U^{n+1} = 2 U^n - U^{n-1} + dt^2/rho * (mu lap_h U^n + (lam+mu) grad_h div_h U^n + rho F^n),

with second-order central stencils and a Taylor first step. It never looks
at the reduced per-axis equations, which keeps it independent of the
d'Alembert solver it is compared against.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import _kernels
from .admissible import ProblemData
from .core import Material
from .errors import CFLViolation, PreconditionError, SupportViolation
from .quadrature import QuadratureSpec
from .solver import DEFAULT_QUAD, displacement

SUPPORT_THRESHOLD = 1e-10


@dataclass(frozen=True)
class GridSpec:
    """Uniform grid on ``[lo_i, hi_i]`` with ``n`` intervals (``n + 1`` nodes) per axis.

    ``boundary`` is ``"zero"`` (clamped, needs data that vanishes near the
    box faces) or ``"exact"`` (Dirichlet values taken from the exact solver).
    """

    lo: tuple = (-4.0, -4.0, -4.0)
    hi: tuple = (4.0, 4.0, 4.0)
    n: int = 32
    dt: float = 0.05
    steps: int = 10
    boundary: str = "zero"
    cfl_factor: float = 0.9

    def __post_init__(self):
        if self.n < 2:
            raise PreconditionError("grid needs n >= 2 intervals")
        if self.steps < 1 or not self.dt > 0:
            raise PreconditionError("grid needs steps >= 1 and dt > 0")
        if self.boundary not in ("zero", "exact"):
            raise PreconditionError(f"unknown boundary mode {self.boundary!r}")
        if not 0 < self.cfl_factor <= 0.9:
            raise PreconditionError("cfl_factor must be in (0, 0.9]")
        spans = [h - l for l, h in zip(self.lo, self.hi)]
        if any(s <= 0 for s in spans) or max(spans) - min(spans) > 1e-12 * max(spans):
            raise PreconditionError("grid box must be a non-degenerate cube")

    @property
    def h(self) -> float:
        return (self.hi[0] - self.lo[0]) / self.n

    @property
    def T(self) -> float:
        return self.dt * self.steps

    def axes(self):
        return [np.linspace(l, h, self.n + 1) for l, h in zip(self.lo, self.hi)]

    def nodes(self) -> np.ndarray:
        """Node coordinates, shape (3, n+1, n+1, n+1)."""
        return np.array(np.meshgrid(*self.axes(), indexing="ij"))

    def dt_max(self, m: Material) -> float:
        return self.cfl_factor * self.h / (m.c_p * math.sqrt(3.0))

    def check_cfl(self, m: Material):
        if self.dt > self.dt_max(m) * (1 + 1e-12):
            raise CFLViolation(f"dt={self.dt:g} exceeds CFL bound {self.dt_max(m):g} "
                               f"(h={self.h:g}, c_p={m.c_p:g})")

    @classmethod
    def for_time(cls, m: Material, T: float, n: int, lo=(-4.0,) * 3, hi=(4.0,) * 3,
                 boundary="zero", cfl_factor=0.9) -> "GridSpec":
        """Largest stable step that lands exactly on ``T``."""
        h = (hi[0] - lo[0]) / n
        dt_max = cfl_factor * h / (m.c_p * math.sqrt(3.0))
        steps = max(1, math.ceil(T / dt_max - 1e-12))
        return cls(tuple(lo), tuple(hi), n, T / steps, steps, boundary, cfl_factor)

    def refined(self) -> "GridSpec":
        """Same box and final time with ``h`` and ``dt`` halved."""
        return replace(self, n=2 * self.n, dt=0.5 * self.dt, steps=2 * self.steps)


@dataclass
class OracleRun:
    grid: GridSpec
    times: list = field(default_factory=list)
    snapshots: list = field(default_factory=list)
    energies: list = field(default_factory=list)

    @property
    def final(self) -> np.ndarray:
        return self.snapshots[-1]


def _boundary_mask(shape):
    mask = np.ones(shape, dtype=bool)
    mask[1:-1, 1:-1, 1:-1] = False
    return mask


def support_radius(values: np.ndarray, X: np.ndarray, centre, threshold=SUPPORT_THRESHOLD) -> float:
    """Radius around ``centre`` holding every node where |values| exceeds threshold * peak."""
    mag = np.sqrt((values**2).sum(axis=0))
    peak = mag.max()
    if peak == 0.0:
        return 0.0
    sel = mag > threshold * peak
    d = np.sqrt(sum((X[i][sel] - centre[i]) ** 2 for i in range(3)))
    return float(d.max())


def check_support(data: ProblemData, m: Material, grid: GridSpec, X=None):
    """Raise SupportViolation if data reaches the boundary before ``T``."""
    X = grid.nodes() if X is None else X
    centre = [0.5 * (l + h) for l, h in zip(grid.lo, grid.hi)]
    half = 0.5 * (grid.hi[0] - grid.lo[0])
    for name, v in (("phi", data.phi), ("psi", data.psi)):
        vals = v(*X)
        r = support_radius(vals, X, centre)
        if r + m.a * grid.T >= half:
            raise SupportViolation(
                f"{name} support radius {r:.3g} + a*T {m.a * grid.T:.3g} reaches box half-width {half:.3g}"
            )


def _discrete_energy(U_next, U, m, h, dt, backend):
    """Leapfrog-conserved energy at the half step between ``U`` and ``U_next``."""
    vel = (U_next - U) / dt
    kin = 0.5 * m.rho * np.sum(vel**2)
    LU = _kernels.elastic_operator(U, m.lam, m.mu, h, backend)
    pot = -0.5 * np.sum(U_next * LU)
    return float((kin + pot) * h**3)


def oracle_solve(data: ProblemData, m: Material, grid: GridSpec, save_every: int | None = 1,
                 spec: QuadratureSpec = DEFAULT_QUAD, exact=displacement, energy: bool = False,
                 backend: str | None = None) -> OracleRun:
    """March the grid from ``t = 0`` to ``grid.T``.

    ``save_every=None`` keeps only the first and last snapshots.
    """
    grid.check_cfl(m)
    X = grid.nodes()
    if grid.boundary == "zero":
        check_support(data, m, grid, X)
    shape = X.shape[1:]
    flat = X.reshape(3, -1)
    U0 = np.ascontiguousarray(data.phi(*X), dtype=float)
    V0 = np.ascontiguousarray(data.psi(*X), dtype=float)
    has_f = not data.forcing.is_zero
    bmask = _boundary_mask(shape)
    bx = X[:, bmask]

    def forcing(t):
        if not has_f:
            return np.zeros_like(U0)
        return np.ascontiguousarray(data.forcing(np.full(flat.shape[1], t), *flat).reshape((3,) + shape))

    def set_boundary(U, t):
        if grid.boundary == "zero":
            U[:, bmask] = 0.0
        else:
            u, _ = exact(data, m, np.full(bx.shape[1], t), bx, spec)
            U[:, bmask] = u

    run = OracleRun(grid)
    set_boundary(U0, 0.0)
    run.times.append(0.0)
    run.snapshots.append(U0.copy())
    dt, h = grid.dt, grid.h
    prev, cur = V0, U0
    Fz = forcing(0.0)
    nxt = np.zeros_like(U0)
    for n in range(1, grid.steps + 1):
        _kernels.leapfrog_step(prev, cur, nxt, Fz, m.lam, m.mu, m.rho, h, dt, first=(n == 1),
                               backend=backend)
        t = n * dt
        set_boundary(nxt, t)
        if energy:
            run.energies.append(_discrete_energy(nxt, cur, m, h, dt, backend))
        if (save_every and n % save_every == 0) or n == grid.steps:
            run.times.append(t)
            run.snapshots.append(nxt.copy())
        prev, cur, nxt = cur, nxt, (prev if n > 1 else np.zeros_like(U0))
        if has_f and n < grid.steps:
            Fz = forcing(t)
    return run


@dataclass(frozen=True)
class ComparisonReport:
    hs: tuple
    linf: tuple
    l2: tuple
    orders_linf: tuple
    orders_l2: tuple
    T: float

    def to_text(self) -> str:
        lines = [f"oracle comparison at T={self.T:g}"]
        for k, (h, e1, e2) in enumerate(zip(self.hs, self.linf, self.l2)):
            lines.append(f"  h={h:.5g}  Linf={e1:.4e}  L2={e2:.4e}")
            if k:
                o1, o2 = self.orders_linf[k - 1], self.orders_l2[k - 1]
                lines.append(f"    order Linf={_fmt_order(o1)}  L2={_fmt_order(o2)}")
        return "\n".join(lines)

    def to_kv(self) -> str:
        out = []
        for k, (h, e1, e2) in enumerate(zip(self.hs, self.linf, self.l2)):
            out.append(f"linf_{k}={e1!r}\nl2_{k}={e2!r}\n")
        for k, (o1, o2) in enumerate(zip(self.orders_linf, self.orders_l2)):
            out.append(f"order_linf_{k}={_fmt_order(o1)}\norder_l2_{k}={_fmt_order(o2)}\n")
        return "".join(out)

    def orders_within(self, lo: float, hi: float) -> bool:
        return all(o is not None and lo <= o <= hi for o in self.orders_linf)


def _fmt_order(o):
    return "undefined" if o is None else f"{o:.4f}"


def _order(e_coarse, e_fine, h_coarse, h_fine):
    if e_coarse == 0.0 or e_fine == 0.0:
        return None
    return math.log(e_coarse / e_fine) / math.log(h_coarse / h_fine)


def compare(data: ProblemData, m: Material, grids, T: float | None = None,
            spec: QuadratureSpec = DEFAULT_QUAD, oracle=oracle_solve, exact=displacement) -> ComparisonReport:
    """Oracle-vs-exact errors at the final time on a sequence of refined grids."""
    grids = list(grids)
    if len(grids) < 2:
        raise PreconditionError("compare needs at least two grids")
    T = grids[0].T if T is None else T
    for g in grids:
        if abs(g.T - T) > 1e-9 * max(1.0, T):
            raise PreconditionError(f"grid final time {g.T:g} differs from T={T:g}")
    linf, l2 = [], []
    for g in grids:
        run = oracle(data, m, g, save_every=None, spec=spec)
        X = g.nodes().reshape(3, -1)
        u, _ = exact(data, m, np.full(X.shape[1], T), X, spec)
        err = run.final.reshape(3, -1) - u
        mag = np.sqrt((err**2).sum(axis=0))
        linf.append(float(mag.max()))
        l2.append(float(np.sqrt(np.sum(mag**2) * g.h**3)))
    hs = tuple(g.h for g in grids)
    o1 = tuple(_order(linf[k], linf[k + 1], hs[k], hs[k + 1]) for k in range(len(grids) - 1))
    o2 = tuple(_order(l2[k], l2[k + 1], hs[k], hs[k + 1]) for k in range(len(grids) - 1))
    return ComparisonReport(hs, tuple(linf), tuple(l2), o1, o2, T)


def exact_sampler(data, m, grid, save_every=None, spec=DEFAULT_QUAD, **_):
    """Drop-in for ``oracle_solve`` that samples the exact solution (test double)."""
    X = grid.nodes()
    u, _ = displacement(data, m, np.full(X[0].size, grid.T), X.reshape(3, -1), spec)
    run = OracleRun(grid, [grid.T], [u.reshape(X.shape)])
    return run
