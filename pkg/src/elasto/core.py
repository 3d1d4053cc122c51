"""Material constants, spacetime points and numeric tolerances."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import NonHyperbolic, NonPositiveDensity, PreconditionError


@dataclass(frozen=True)
class Material:
    """Isotropic, homogeneous elastic medium.

    ``a`` is the propagation speed of the reduced per-axis wave equations,
    ``sqrt(3 (lam + 2 mu) / rho)``. It is larger than the P-wave speed
    ``c_p`` of the full system by a factor of sqrt(3).
    """

    rho: float
    lam: float
    mu: float
    a: float = field(init=False)

    def __post_init__(self):
        rho, lam, mu = float(self.rho), float(self.lam), float(self.mu)
        if not rho > 0:
            raise NonPositiveDensity(f"density must be positive, got rho={rho!r}")
        if not lam + 2.0 * mu > 0:
            raise NonHyperbolic(
                f"lambda + 2 mu must be positive, got {lam!r} + 2*{mu!r}"
            )
        object.__setattr__(self, "rho", rho)
        object.__setattr__(self, "lam", lam)
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "a", math.sqrt(3.0 * (lam + 2.0 * mu) / rho))

    @property
    def c_p(self) -> float:
        return math.sqrt((self.lam + 2.0 * self.mu) / self.rho)

    @property
    def c_s(self) -> float:
        return math.sqrt(max(self.mu, 0.0) / self.rho)


def new_material(rho: float, lam: float, mu: float) -> Material:
    return Material(rho, lam, mu)


@dataclass(frozen=True)
class SpacetimePoint:
    t: float
    x1: float
    x2: float
    x3: float

    def __post_init__(self):
        if not self.t >= 0:
            raise PreconditionError(f"time must be >= 0, got t={self.t!r}")

    @property
    def x(self) -> tuple[float, float, float]:
        return (self.x1, self.x2, self.x3)

    @classmethod
    def of(cls, t, x) -> "SpacetimePoint":
        return cls(float(t), float(x[0]), float(x[1]), float(x[2]))


@dataclass(frozen=True)
class Tolerances:
    quad_rel: float = 1e-10
    fd_step: float = 1e-4
    check_tol: float = 1e-6

    def __post_init__(self):
        for name in ("quad_rel", "fd_step", "check_tol"):
            v = getattr(self, name)
            if not v > 0:
                raise PreconditionError(f"{name} must be > 0, got {v!r}")
        if not self.quad_rel < 1:
            raise PreconditionError("quad_rel must be < 1")

    @classmethod
    def for_length(cls, length: float, **kw) -> "Tolerances":
        """Defaults with ``fd_step`` scaled to a characteristic length."""
        return cls(fd_step=1e-4 * length, **kw)


DEFAULT_TOLERANCES = Tolerances()
