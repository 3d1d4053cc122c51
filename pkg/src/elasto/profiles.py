"""Catalog of decaying ridge profiles and forcing time envelopes.

Every catalog profile has the form ``amp * Re/Im[Q(z) exp(c z - z^2/2)]``
with ``z = (s - s0) / sigma``, so derivatives of any order stay closed form:
differentiating in ``z`` maps ``Q`` to ``Q' + (c - z) Q``.
"""

from __future__ import annotations

import difflib
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from numpy.polynomial import Polynomial

from .fields import ScalarProfile

_Z = Polynomial([0.0, 1.0])


def _gauss_family(q: Polynomial, c: complex, sigma: float, s0: float, amp: float,
                  imag: bool, name: str, params: dict, max_order: int = 8) -> ScalarProfile:
    polys = [q]
    for _ in range(max_order):
        p = polys[-1]
        polys.append(p.deriv() + (c - _Z) * p)

    def make(n):
        p = polys[n]
        scale = amp / sigma**n

        def f(s):
            z = (np.asarray(s, dtype=float) - s0) / sigma
            w = p(z) * np.exp(c * z - 0.5 * z * z)
            return scale * (w.imag if imag else w.real)

        return f

    return ScalarProfile(make(0), tuple(make(n) for n in range(1, max_order + 1)), name, params)


def gaussian(sigma: float = 1.0, s0: float = 0.0, amp: float = 1.0) -> ScalarProfile:
    """``amp * exp(-(s - s0)^2 / (2 sigma^2))``."""
    return _gauss_family(Polynomial([1.0 + 0j]), 0j, sigma, s0, amp, False, "gaussian",
                         dict(sigma=sigma, s0=s0, amp=amp))


def dgaussian(sigma: float = 1.0, s0: float = 0.0, amp: float = 1.0) -> ScalarProfile:
    """``amp * (-z) exp(-z^2/2)``: the z-derivative of the unit Gaussian."""
    return _gauss_family(Polynomial([0j, -1.0 + 0j]), 0j, sigma, s0, amp, False, "dgaussian",
                         dict(sigma=sigma, s0=s0, amp=amp))


def sine_gauss(k: float = 1.0, sigma: float = 1.0, s0: float = 0.0, amp: float = 1.0) -> ScalarProfile:
    """``amp * sin(k (s - s0)) exp(-z^2/2)``."""
    return _gauss_family(Polynomial([1.0 + 0j]), 1j * k * sigma, sigma, s0, amp, True,
                         "sine_gauss", dict(k=k, sigma=sigma, s0=s0, amp=amp))


def polygauss(coeffs=(1.0,), sigma: float = 1.0, s0: float = 0.0, amp: float = 1.0) -> ScalarProfile:
    """``amp * P(z) exp(-z^2/2)`` with ``P`` of degree at most 4."""
    coeffs = tuple(float(c) for c in coeffs)
    if not 1 <= len(coeffs) <= 5:
        raise ValueError("polygauss takes 1 to 5 coefficients (degree <= 4)")
    return _gauss_family(Polynomial(np.array(coeffs, dtype=complex)), 0j, sigma, s0, amp, False,
                         "polygauss", dict(coeffs=coeffs, sigma=sigma, s0=s0, amp=amp))


@dataclass(frozen=True)
class ParamSpec:
    default: object
    check: Callable[[object], bool]
    rule: str


_positive = ParamSpec(1.0, lambda v: v > 0, "must be > 0")
_finite = ParamSpec(0.0, lambda v: math.isfinite(v), "must be finite")
_amp = ParamSpec(1.0, lambda v: math.isfinite(v), "must be finite")
_nonneg = ParamSpec(1.0, lambda v: v >= 0 and math.isfinite(v), "must be >= 0")
_coeffs = ParamSpec((1.0,), lambda v: 1 <= len(v) <= 5 and all(map(math.isfinite, v)),
                    "must be 1 to 5 finite numbers")

PROFILES = {
    "gaussian": (gaussian, {"sigma": _positive, "s0": _finite, "amp": _amp}),
    "dgaussian": (dgaussian, {"sigma": _positive, "s0": _finite, "amp": _amp}),
    "sine_gauss": (sine_gauss, {"k": _nonneg, "sigma": _positive, "s0": _finite, "amp": _amp}),
    "polygauss": (polygauss, {"coeffs": _coeffs, "sigma": _positive, "s0": _finite, "amp": _amp}),
}


@dataclass(frozen=True)
class Envelope:
    """Smooth time envelope ``g(t)`` on ``[0, inf)``."""

    name: str
    params: tuple
    func: Callable

    def __call__(self, t):
        return self.func(np.asarray(t, dtype=float))

    def sup(self, t_max: float, n: int = 4001) -> float:
        t = np.linspace(0.0, t_max, n)
        return float(np.max(np.abs(self(t))))


def _envelope(name: str, **params) -> Envelope:
    p = tuple(sorted(params.items()))
    if name == "constant":
        v = params["value"]
        return Envelope(name, p, lambda t: np.full(np.shape(t), v, dtype=float))
    if name == "exp_decay":
        r = params["rate"]
        return Envelope(name, p, lambda t: np.exp(-r * t))
    if name == "sine":
        w = params["omega"]
        return Envelope(name, p, lambda t: np.sin(w * t))
    if name == "gaussian_pulse":
        t0, wd = params["t0"], params["width"]
        return Envelope(name, p, lambda t: np.exp(-0.5 * ((t - t0) / wd) ** 2))
    raise KeyError(name)


ENVELOPES = {
    "constant": {"value": ParamSpec(1.0, math.isfinite, "must be finite")},
    "exp_decay": {"rate": ParamSpec(1.0, lambda v: v >= 0 and math.isfinite(v), "must be >= 0")},
    "sine": {"omega": ParamSpec(1.0, math.isfinite, "must be finite")},
    "gaussian_pulse": {"t0": ParamSpec(0.5, lambda v: v >= 0, "must be >= 0"),
                       "width": _positive},
}


def envelope(name: str, **params) -> Envelope:
    if name not in ENVELOPES:
        raise KeyError(name)
    full = {k: spec.default for k, spec in ENVELOPES[name].items()}
    full.update({k: float(v) for k, v in params.items()})
    return _envelope(name, **full)


def make_profile(name: str, **params) -> ScalarProfile:
    ctor, spec = PROFILES[name]
    full = {k: s.default for k, s in spec.items()}
    full.update(params)
    return ctor(**full)


def suggest(name: str, choices) -> str | None:
    hit = difflib.get_close_matches(name, list(choices), n=1, cutoff=0.6)
    return hit[0] if hit else None
