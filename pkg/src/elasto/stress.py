"""Isotropic linear-elastic stress from the exact displacement gradient."""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .admissible import ProblemData
from .core import Material, SpacetimePoint
from .quadrature import QuadratureSpec
from .solver import DEFAULT_QUAD, _single, displacement_gradient

# storage order of the six independent entries
VOIGT = ((0, 0), (1, 1), (2, 2), (0, 1), (0, 2), (1, 2))
VOIGT_NAMES = ("tau11", "tau22", "tau33", "tau12", "tau13", "tau23")


@dataclass(frozen=True)
class StressTensor:
    tau11: float
    tau22: float
    tau33: float
    tau12: float
    tau13: float
    tau23: float
    point: SpacetimePoint | None = None

    def __getitem__(self, ij):
        i, j = sorted(ij)
        return getattr(self, f"tau{i + 1}{j + 1}")

    def matrix(self) -> np.ndarray:
        return stress_matrix(np.array(self.voigt()))

    def voigt(self) -> tuple:
        return tuple(getattr(self, n) for n in VOIGT_NAMES)


def stress_matrix(voigt: np.ndarray) -> np.ndarray:
    """Symmetric (3, 3, ...) array from the six stored entries."""
    out = np.empty((3, 3) + voigt.shape[1:])
    for n, (i, j) in enumerate(VOIGT):
        out[i, j] = out[j, i] = voigt[n]
    return out


class Divergence(NamedTuple):
    trace: float
    three_g11: float
    discrepancy: float


def stress_from_gradient(g: np.ndarray, m: Material) -> np.ndarray:
    """Six entries (6, ...) of ``lam * delta_ij * div + mu * (g_ij + g_ji)``."""
    div = g[0, 0] + g[1, 1] + g[2, 2]
    out = np.empty((6,) + g.shape[2:])
    for n, (i, j) in enumerate(VOIGT):
        out[n] = m.mu * (g[i, j] + g[j, i])
        if i == j:
            out[n] = out[n] + m.lam * div
    return out


def stresses(data: ProblemData, m: Material, t, x, spec: QuadratureSpec = DEFAULT_QUAD) -> np.ndarray:
    """Stress entries at many points, shape (6, N) in ``VOIGT_NAMES`` order."""
    return stress_from_gradient(displacement_gradient(data, m, t, x, spec), m)


def divergence(data: ProblemData, m: Material, p: SpacetimePoint,
               spec: QuadratureSpec = DEFAULT_QUAD) -> Divergence:
    """Trace of the displacement gradient, with the ``3 * du1/dx1`` shortcut
    that holds for admissible data and the gap between the two."""
    t, x = _single(p)
    g = displacement_gradient(data, m, t, x, spec)[:, :, 0]
    tr = float(g[0, 0] + g[1, 1] + g[2, 2])
    alt = float(3.0 * g[0, 0])
    return Divergence(tr, alt, abs(tr - alt))


def stress_tensor(data: ProblemData, m: Material, p: SpacetimePoint,
                  spec: QuadratureSpec = DEFAULT_QUAD) -> StressTensor:
    t, x = _single(p)
    s = stresses(data, m, t, x, spec)[:, 0]
    return StressTensor(*(float(v) for v in s), point=p)
