"""Construction and validation of admissible initial data and forcing.

Admissible fields are curl-free with equal diagonal derivatives. Gradients of
ridge potentials ``Phi(x) = f(e1 x1 + e2 x2 + e3 x3)`` with ``e in {+1,-1}^3``
satisfy both conditions identically, and the conditions are linear, so any
superposition of ridge gradients is admissible too.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.stats import qmc

from .core import DEFAULT_TOLERANCES
from .errors import EmptySuperposition, PreconditionError
from .fields import (
    DecayReport, ForcingField, ScalarField3, ScalarProfile, VectorField3, _all_multi,
    check_decay, curl, sum_scalar_fields,
)
from .profiles import Envelope


@dataclass(frozen=True)
class RidgeDirection:
    eps1: int = 1
    eps2: int = 1
    eps3: int = 1

    def __post_init__(self):
        for e in self.as_tuple():
            if e not in (1, -1):
                raise ValueError(f"ridge direction entries must be +1 or -1, got {self.as_tuple()}")

    def as_tuple(self) -> tuple[int, int, int]:
        return (self.eps1, self.eps2, self.eps3)

    def canonical(self) -> tuple["RidgeDirection", int]:
        """Equivalent direction with ``eps1 = +1`` and the sign that was factored out."""
        if self.eps1 == 1:
            return self, 1
        return RidgeDirection(-self.eps1, -self.eps2, -self.eps3), -1

    @classmethod
    def parse(cls, text: str) -> "RidgeDirection":
        """Accepts ``+++``, ``+-+`` or ``1,-1,1``."""
        text = text.strip()
        if len(text) == 3 and set(text) <= {"+", "-"}:
            return cls(*(1 if c == "+" else -1 for c in text))
        parts = [p.strip() for p in text.split(",")]
        if len(parts) != 3:
            raise ValueError(f"cannot parse ridge direction {text!r}")
        return cls(*(int(float(p)) for p in parts))

    def __str__(self):
        return "".join("+" if e > 0 else "-" for e in self.as_tuple())

    @staticmethod
    def all() -> list["RidgeDirection"]:
        return [RidgeDirection(*e) for e in itertools.product((1, -1), repeat=3)]


def _ridge_partials(profile: ScalarProfile, eps, i: int, max_order: int = 3):
    """Analytic partials of v_i = eps_i f'(eps . x) up to ``max_order``."""
    e1, e2, e3 = eps
    parts = {}
    for m in _all_multi(max_order):
        sign = eps[i] * e1 ** m[0] * e2 ** m[1] * e3 ** m[2]
        g = profile.derivative(1 + sum(m))
        parts[m] = (lambda g, sign: (lambda x1, x2, x3: sign * g(e1 * x1 + e2 * x2 + e3 * x3)))(g, sign)
    return parts


def ridge_data(profile: ScalarProfile, direction: RidgeDirection) -> VectorField3:
    """Gradient of the ridge potential ``f(eps . x)``: ``v_i = eps_i f'(eps . x)``."""
    eps = direction.as_tuple()
    e1, e2, e3 = eps
    d1 = profile.derivative(1)
    comps = []
    for i in range(3):
        ei = eps[i]
        func = (lambda ei: (lambda x1, x2, x3: ei * d1(e1 * x1 + e2 * x2 + e3 * x3)))(ei)
        comps.append(ScalarField3(func, _ridge_partials(profile, eps, i)))
    return VectorField3(*comps, constructed=True)


def superpose(terms: Sequence[tuple[float, VectorField3]]) -> VectorField3:
    terms = list(terms)
    if not terms:
        raise EmptySuperposition("superposition needs at least one term")
    comps = [sum_scalar_fields([(c, v[k]) for c, v in terms]) for k in range(3)]
    return VectorField3(*comps, constructed=all(v.constructed for _, v in terms))


def ridge_forcing(envelope, profile: ScalarProfile, direction: RidgeDirection) -> ForcingField:
    """``F(t, x) = g(t) * ridge_data(profile, direction)(x)``."""
    v = ridge_data(profile, direction)
    g = envelope

    def wrap(f):
        return lambda t, x1, x2, x3: g(t) * f(x1, x2, x3)

    funcs = [wrap(v[k].func) for k in range(3)]
    parts = {(k, m): wrap(f) for k in range(3) for m, f in v[k].partials.items()}
    return ForcingField(funcs, parts, constructed=True)


def superpose_forcing(terms: Sequence[tuple[float, ForcingField]]) -> ForcingField:
    terms = [(float(c), f) for c, f in terms if not f.is_zero]
    if not terms:
        return ForcingField.zero()

    def comb(fs):
        return lambda *a: sum(c * f(*a) for (c, _), f in zip(terms, fs))

    funcs = [comb([f.funcs[k] for _, f in terms]) for k in range(3)]
    keys = set.intersection(*(set(f.partials) for _, f in terms))
    parts = {key: comb([f.partials[key] for _, f in terms]) for key in keys}
    return ForcingField(funcs, parts, constructed=all(f.constructed for _, f in terms),
                        fd_step=min(f.fd_step for _, f in terms))


@dataclass(frozen=True)
class ProblemData:
    """Initial displacement ``phi``, initial velocity ``psi`` and body force.

    ``provenance`` is ``"constructed"`` only when every part came out of the
    ridge constructors; anything else is ``"user_supplied"`` and must pass
    :func:`validate_admissible` before it is trusted.
    """

    phi: VectorField3 = field(default_factory=VectorField3.zero)
    psi: VectorField3 = field(default_factory=VectorField3.zero)
    forcing: ForcingField = field(default_factory=ForcingField.zero)
    strong_forcing_flag: bool = True
    label: str = ""

    @property
    def provenance(self) -> str:
        ok = self.phi.constructed and self.psi.constructed and self.forcing.constructed
        return "constructed" if ok else "user_supplied"

    @property
    def has_forcing(self) -> bool:
        return not self.forcing.is_zero


def combine(terms: Sequence[tuple[float, ProblemData]]) -> ProblemData:
    """Linear combination of whole data sets."""
    terms = list(terms)
    if not terms:
        raise EmptySuperposition("combine needs at least one term")
    return ProblemData(
        phi=superpose([(c, d.phi) for c, d in terms]),
        psi=superpose([(c, d.psi) for c, d in terms]),
        forcing=superpose_forcing([(c, d.forcing) for c, d in terms]),
        strong_forcing_flag=all(d.strong_forcing_flag for _, d in terms),
    )


@dataclass(frozen=True)
class Sampling:
    """Box ``lo[i] <= x_i <= hi[i]``, Halton point count, and forcing times."""

    lo: tuple = (-1.0, -1.0, -1.0)
    hi: tuple = (1.0, 1.0, 1.0)
    count: int = 64
    times: tuple = (0.0, 0.5, 1.0)
    seed_offset: int = 1

    def __post_init__(self):
        if self.count < 1:
            raise PreconditionError("sampling count must be >= 1")
        if any(h < l for l, h in zip(self.lo, self.hi)):
            raise PreconditionError("sampling box has hi < lo")

    def points(self, include_corners: bool = True) -> np.ndarray:
        """Deterministic points, shape (3, N): origin and corners first, then Halton."""
        lo, hi = np.asarray(self.lo, float), np.asarray(self.hi, float)
        pts = []
        if include_corners:
            pts.append(np.clip(np.zeros(3), lo, hi))
            pts.extend(np.where(np.array(c), hi, lo) for c in itertools.product((0, 1), repeat=3))
        h = qmc.Halton(d=3, scramble=False)
        h.fast_forward(self.seed_offset)
        pts.extend(lo + (hi - lo) * h.random(self.count))
        return np.array(pts).T


CONDITIONS = ("curl_phi", "curl_psi", "curl_forcing", "eq_deriv_phi", "eq_deriv_psi", "eq_deriv_forcing")


@dataclass(frozen=True)
class ValidationReport:
    residuals: dict
    tol: float
    samples: int
    decay: dict
    provenance: str

    @property
    def per_condition(self) -> dict:
        return {k: v < self.tol for k, v in self.residuals.items()}

    @property
    def passed(self) -> bool:
        return all(self.per_condition.values())

    @property
    def failures(self) -> list[str]:
        return [k for k, ok in self.per_condition.items() if not ok]

    def to_text(self) -> str:
        lines = [f"admissibility check ({self.provenance}, {self.samples} samples, tol={self.tol:g})"]
        for k, v in self.residuals.items():
            lines.append(f"  {k:<18} {v:.3e}  {'ok' if v < self.tol else 'FAIL'}")
        for name, rep in self.decay.items():
            lines.append(f"  {name:<18} {rep.describe()} (informational)")
        lines.append("PASS" if self.passed else "FAIL: " + ", ".join(self.failures))
        return "\n".join(lines)

    def to_kv(self) -> str:
        return "".join(f"{k}={v!r}\n" for k, v in self.residuals.items())


def _eq_deriv(v: VectorField3, x) -> float:
    d = [v[i].derivative(tuple(int(j == i) for j in range(3)))(*x) for i in range(3)]
    d = np.broadcast_arrays(*d)
    return float(max(np.max(np.abs(d[0] - d[1])), np.max(np.abs(d[1] - d[2]))))


def _curl_max(v: VectorField3, x) -> float:
    return float(np.max(np.linalg.norm(curl(v, x).reshape(3, -1), axis=0)))


def validate_admissible(data: ProblemData, sampling: Sampling | None = None,
                        tol: float = DEFAULT_TOLERANCES.check_tol,
                        decay_radii=(5.0, 10.0, 20.0), decay_tol: float = 1e-6) -> ValidationReport:
    """Sample the curl-free and equal-diagonal-derivative conditions.

    Decay of the fields is reported alongside but does not gate ``passed``:
    ridge generators are constant on planes and never vanish in every direction.
    """
    sampling = sampling or Sampling()
    pts = sampling.points()
    x = tuple(pts)
    res = {
        "curl_phi": _curl_max(data.phi, x),
        "curl_psi": _curl_max(data.psi, x),
        "eq_deriv_phi": _eq_deriv(data.phi, x),
        "eq_deriv_psi": _eq_deriv(data.psi, x),
    }
    cf, ef = 0.0, 0.0
    for t in sampling.times:
        ft = data.forcing.at(float(t))
        cf = max(cf, _curl_max(ft, x))
        if data.strong_forcing_flag:
            ef = max(ef, _eq_deriv(ft, x))
    res["curl_forcing"] = cf
    if data.strong_forcing_flag:
        res["eq_deriv_forcing"] = ef
    res = {k: res[k] for k in CONDITIONS if k in res}
    decay: dict[str, DecayReport] = {
        "decay_phi": check_decay(data.phi, decay_radii, decay_tol),
        "decay_psi": check_decay(data.psi, decay_radii, decay_tol),
    }
    return ValidationReport(res, tol, pts.shape[1], decay, data.provenance)
