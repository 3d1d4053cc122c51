"""Analytic scalar and vector fields with partial-derivative access.

Every field function is evaluated on numpy arrays and must broadcast, so a
single call covers a whole batch of points. Analytic partial derivatives can
be attached; anything missing falls back to a Richardson-extrapolated central
difference.

Axes are numbered 1, 2, 3 in the public ``partial``/``curl`` helpers and
0, 1, 2 everywhere else (multi-indices, ``VectorField3.components``).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np

from .core import DEFAULT_TOLERANCES, SpacetimePoint

MultiIndex = tuple[int, int, int]

_UNIT = ((1, 0, 0), (0, 1, 0), (0, 0, 1))


def _add_index(m: MultiIndex, axis: int, order: int = 1) -> MultiIndex:
    out = list(m)
    out[axis] += order
    return tuple(out)


def coords(point) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Normalize a point argument to three coordinate arrays."""
    if isinstance(point, SpacetimePoint):
        return (np.float64(point.x1), np.float64(point.x2), np.float64(point.x3))
    x1, x2, x3 = point
    return (np.asarray(x1, dtype=float), np.asarray(x2, dtype=float), np.asarray(x3, dtype=float))


def fd_first(f: Callable, axis: int, h: float) -> Callable:
    """Central first difference along ``axis`` with one Richardson step."""

    def d(*x):
        x = [np.asarray(c, dtype=float) for c in x]

        def shifted(s):
            y = list(x)
            y[axis] = x[axis] + s
            return f(*y)

        wide = (shifted(h) - shifted(-h)) / (2.0 * h)
        narrow = (shifted(0.5 * h) - shifted(-0.5 * h)) / h
        return (4.0 * narrow - wide) / 3.0

    return d


def fd_second(f: Callable, axis: int, h: float) -> Callable:
    """Central second difference along ``axis`` with one Richardson step."""

    def d(*x):
        x = [np.asarray(c, dtype=float) for c in x]

        def shifted(s):
            y = list(x)
            y[axis] = x[axis] + s
            return f(*y)

        f0 = f(*x)
        wide = (shifted(h) - 2.0 * f0 + shifted(-h)) / (h * h)
        hh = 0.5 * h
        narrow = (shifted(hh) - 2.0 * f0 + shifted(-hh)) / (hh * hh)
        return (4.0 * narrow - wide) / 3.0

    return d


@dataclass(frozen=True)
class ScalarProfile:
    """Smooth one-dimensional profile ``s -> f(s)``.

    ``derivs[n-1]`` is the analytic n-th derivative when supplied; orders past
    the supplied ones are obtained by finite differences of the highest
    analytic one.
    """

    func: Callable
    derivs: tuple = ()
    name: str = "custom"
    params: Mapping = field(default_factory=dict)
    fd_step: float = 1e-3

    def __call__(self, s):
        return self.func(np.asarray(s, dtype=float))

    def derivative(self, n: int) -> Callable:
        if n == 0:
            return self.func
        if n <= len(self.derivs):
            return self.derivs[n - 1]
        base = len(self.derivs)
        f = self.derivative(base)
        h = self.fd_step
        k = n - base
        while k >= 2:
            f = fd_second(f, 0, h)
            k -= 2
        if k:
            f = fd_first(f, 0, h)
        return f

    def reflected(self) -> "ScalarProfile":
        """Profile ``s -> f(-s)``."""
        ds = tuple(
            (lambda d, n: (lambda s: (-1.0) ** n * d(-np.asarray(s, dtype=float))))(d, n)
            for n, d in enumerate(self.derivs, start=1)
        )
        f = self.func
        return ScalarProfile(
            lambda s: f(-np.asarray(s, dtype=float)), ds, self.name + "~reflected",
            dict(self.params), self.fd_step,
        )


def profile_decays(profile: ScalarProfile, orders=(0, 1, 2), radius=50.0, tol=1e-8) -> bool:
    """Sampled check that the profile and its derivatives vanish far out."""
    s = np.array([-radius, radius, -2 * radius, 2 * radius])
    return all(np.max(np.abs(profile.derivative(n)(s))) < tol for n in orders)


class ScalarField3:
    """Scalar field on R^3 with optional analytic partial derivatives.

    ``partials`` maps multi-indices ``(n1, n2, n3)`` to functions of
    ``(x1, x2, x3)``.
    """

    def __init__(self, func: Callable, partials: Mapping[MultiIndex, Callable] | None = None,
                 fd_step: float = DEFAULT_TOLERANCES.fd_step):
        self.func = func
        self.partials = dict(partials or {})
        self.fd_step = fd_step

    def __call__(self, x1, x2, x3):
        return self.func(x1, x2, x3)

    def has_analytic(self, multi: MultiIndex) -> bool:
        return tuple(multi) in self.partials

    def derivative(self, multi: MultiIndex) -> Callable:
        """Function for the mixed partial ``multi`` (analytic or FD)."""
        multi = tuple(int(m) for m in multi)
        if sum(multi) == 0:
            return self.func
        if multi in self.partials:
            return self.partials[multi]
        nz = [i for i in range(3) if multi[i]]
        if len(nz) == 1 and multi[nz[0]] == 2 and _UNIT[nz[0]] not in self.partials:
            return fd_second(self.func, nz[0], self.fd_step)
        # peel one order off the last nonzero axis and nest first differences
        axis = nz[-1]
        lower = list(multi)
        lower[axis] -= 1
        return fd_first(self.derivative(tuple(lower)), axis, self.fd_step)

    def scaled(self, c: float) -> "ScalarField3":
        f = self.func
        parts = {k: (lambda g: (lambda *x: c * g(*x)))(g) for k, g in self.partials.items()}
        return ScalarField3(lambda *x: c * f(*x), parts, self.fd_step)

    @staticmethod
    def zero() -> "ScalarField3":
        def z(x1, x2, x3):
            return np.zeros(np.broadcast(x1, x2, x3).shape)

        return _ZeroField(z)


class _ZeroField(ScalarField3):
    def __init__(self, func):
        super().__init__(func)

    def derivative(self, multi):
        return self.func

    def has_analytic(self, multi):
        return True


def sum_scalar_fields(terms: Sequence[tuple[float, ScalarField3]]) -> ScalarField3:
    """Pointwise linear combination; analytic partials kept where all terms have them."""
    coefs = [float(c) for c, _ in terms]
    fields = [f for _, f in terms]

    def func(*x):
        return sum(c * f(*x) for c, f in zip(coefs, fields))

    keys = None
    for f in fields:
        if isinstance(f, _ZeroField):
            continue
        ks = set(f.partials)
        keys = ks if keys is None else keys & ks
    parts = {}
    for k in keys or ():
        gs = [f.derivative(k) for f in fields]
        parts[k] = (lambda gs: (lambda *x: sum(c * g(*x) for c, g in zip(coefs, gs))))(gs)
    step = min(f.fd_step for f in fields)
    if keys is None:
        return ScalarField3.zero()
    return ScalarField3(func, parts, step)


class VectorField3:
    """Three scalar components. ``constructed`` marks fields that are
    admissible by construction (ridge generators and their combinations)."""

    def __init__(self, c1: ScalarField3, c2: ScalarField3, c3: ScalarField3,
                 constructed: bool = False):
        self.components = (c1, c2, c3)
        self.constructed = constructed

    def __call__(self, x1, x2, x3):
        return np.stack(np.broadcast_arrays(*(c(x1, x2, x3) for c in self.components)))

    def __getitem__(self, k: int) -> ScalarField3:
        return self.components[k]

    def jacobian(self, x1, x2, x3):
        """Matrix of first derivatives, shape (3, 3, ...) indexed [i, j] = d v_i / d x_j."""
        rows = []
        for c in self.components:
            rows.append(np.broadcast_arrays(*(c.derivative(_UNIT[j])(x1, x2, x3) for j in range(3))))
        shape = np.broadcast(x1, x2, x3).shape
        return np.array([[np.broadcast_to(e, shape) for e in row] for row in rows])

    def scaled(self, c: float) -> "VectorField3":
        return VectorField3(*(f.scaled(c) for f in self.components), constructed=self.constructed)

    @staticmethod
    def zero() -> "VectorField3":
        z = ScalarField3.zero()
        return VectorField3(z, z, z, constructed=True)

    @classmethod
    def from_functions(cls, f1, f2, f3, fd_step=DEFAULT_TOLERANCES.fd_step) -> "VectorField3":
        return cls(*(ScalarField3(f, fd_step=fd_step) for f in (f1, f2, f3)))


class ForcingField:
    """Time-dependent body force ``F(t, x1, x2, x3)``.

    ``funcs`` are three functions of ``(t, x1, x2, x3)``; ``partials`` maps
    ``(component, multi_index)`` to functions of the same signature.
    """

    def __init__(self, funcs, partials=None, constructed=False, fd_step=DEFAULT_TOLERANCES.fd_step,
                 is_zero=False):
        self.funcs = tuple(funcs)
        self.partials = dict(partials or {})
        self.constructed = constructed
        self.fd_step = fd_step
        self.is_zero = is_zero

    def __call__(self, t, x1, x2, x3):
        return np.stack(np.broadcast_arrays(*(f(t, x1, x2, x3) for f in self.funcs)))

    def component(self, k: int, multi: MultiIndex = (0, 0, 0)) -> Callable:
        """``(t, x1, x2, x3) -> d^multi F_k``."""
        multi = tuple(multi)
        if sum(multi) == 0:
            return self.funcs[k]
        if (k, multi) in self.partials:
            return self.partials[(k, multi)]
        f = self.funcs[k]

        def d(t, x1, x2, x3):
            sf = ScalarField3(lambda y1, y2, y3: f(t, y1, y2, y3), fd_step=self.fd_step)
            return sf.derivative(multi)(x1, x2, x3)

        return d

    def at(self, t) -> VectorField3:
        comps = []
        for k in range(3):
            f = self.funcs[k]
            parts = {m: (lambda g: (lambda *x: g(t, *x)))(g)
                     for (kk, m), g in self.partials.items() if kk == k}
            comps.append(ScalarField3((lambda f: (lambda *x: f(t, *x)))(f), parts, self.fd_step))
        return VectorField3(*comps, constructed=self.constructed)

    @staticmethod
    def zero() -> "ForcingField":
        def z(t, x1, x2, x3):
            return np.zeros(np.broadcast(t, x1, x2, x3).shape)

        parts = {(k, m): z for k in range(3) for m in _all_multi(2)}
        return ForcingField((z, z, z), parts, constructed=True, is_zero=True)


def _all_multi(max_order: int):
    return [m for m in itertools.product(range(max_order + 1), repeat=3) if 0 < sum(m) <= max_order]


def partial(field: ScalarField3, axis: int, order: int, point):
    """Partial derivative of ``field`` of the given order along axis 1, 2 or 3."""
    if order not in (1, 2):
        raise ValueError(f"order must be 1 or 2, got {order}")
    if axis not in (1, 2, 3):
        raise ValueError(f"axis must be 1, 2 or 3, got {axis}")
    multi = _add_index((0, 0, 0), axis - 1, order)
    return field.derivative(multi)(*coords(point))


def curl(v: VectorField3, point) -> np.ndarray:
    x = coords(point)
    d = lambda i, j: v[i].derivative(_UNIT[j])(*x)  # noqa: E731  d v_i / d x_j
    out = np.broadcast_arrays(d(2, 1) - d(1, 2), d(0, 2) - d(2, 0), d(1, 0) - d(0, 1))
    return np.stack(out)


def cube_directions() -> np.ndarray:
    """The 26 face, edge and corner unit vectors of a cube, shape (26, 3)."""
    dirs = [d for d in itertools.product((-1, 0, 1), repeat=3) if any(d)]
    d = np.array(dirs, dtype=float)
    return d / np.linalg.norm(d, axis=1, keepdims=True)


@dataclass(frozen=True)
class DecayReport:
    radii: tuple
    max_by_radius: tuple
    tol: float
    passed: bool
    worst_direction: tuple | None = None

    def describe(self) -> str:
        rows = ", ".join(f"r={r:g}: {m:.3e}" for r, m in zip(self.radii, self.max_by_radius))
        status = "pass" if self.passed else "FAIL"
        return f"decay [{status}] tol={self.tol:g} {rows}"


def check_decay(v: VectorField3, radii: Sequence[float], tol: float) -> DecayReport:
    """Sample |v| and its first derivatives on spheres of the given radii.

    Passes iff the largest sample on the outermost sphere is below ``tol``
    and the per-radius maxima never increase.
    """
    radii = tuple(float(r) for r in radii)
    if any(b <= a for a, b in zip(radii, radii[1:])):
        raise ValueError("radii must be strictly increasing")
    dirs = cube_directions()
    maxima = []
    worst = None
    for r in radii:
        p = (r * dirs).T
        vals = np.abs(v(*p))
        jac = np.abs(v.jacobian(*p)).reshape(9, -1)
        per_dir = np.maximum(vals.max(axis=0), jac.max(axis=0))
        maxima.append(float(per_dir.max()))
        worst = tuple(dirs[int(np.argmax(per_dir))])
    ok = maxima[-1] < tol and all(b <= a for a, b in zip(maxima, maxima[1:]))
    return DecayReport(radii, tuple(maxima), tol, ok, None if ok else worst)
