"""CSV and legacy-VTK writers, plus the planar slice payload."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import PreconditionError

DISPLACEMENT_COLUMNS = ("t", "x1", "x2", "x3", "u1", "u2", "u3")
STRESS_COLUMNS = ("tau11", "tau22", "tau33", "tau12", "tau13", "tau23")


def _num(v: float) -> str:
    return format(float(v), ".17g")


def write_csv(path, columns, rows: np.ndarray):
    """``rows`` is (N, len(columns)); values written round-trip exact."""
    rows = np.asarray(rows, dtype=float)
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(",".join(columns) + "\n")
        for r in rows:
            fh.write(",".join(_num(v) for v in r) + "\n")


def read_csv(path):
    with open(path, encoding="ascii") as fh:
        header = fh.readline().strip().split(",")
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return header, data


@dataclass(frozen=True)
class FieldSlice:
    """Samples on the plane ``x_axis = offset`` at a fixed time.

    The in-plane axes are the other two in increasing order. ``payload`` is
    row-major over (first in-plane index, second in-plane index, component).
    """

    axis: int
    offset: float
    time: float
    resolution: tuple
    bounds: tuple
    payload: np.ndarray
    ncomp: int = 3

    def __post_init__(self):
        if self.axis not in (1, 2, 3):
            raise PreconditionError("slice axis must be 1, 2 or 3")
        if len(self.resolution) != 2 or min(self.resolution) < 2:
            raise PreconditionError("slice resolution must be >= 2 per in-plane axis")
        n = self.resolution[0] * self.resolution[1] * self.ncomp
        if self.payload.size != n:
            raise PreconditionError(f"slice payload has {self.payload.size} values, expected {n}")

    @property
    def plane_axes(self) -> tuple[int, int]:
        return tuple(a for a in (1, 2, 3) if a != self.axis)

    @staticmethod
    def coordinates(axis, offset, resolution, bounds) -> np.ndarray:
        """Node coordinates (3, n1 * n2) in payload order."""
        a1, a2 = (a for a in (1, 2, 3) if a != axis)
        g1 = np.linspace(bounds[0], bounds[1], resolution[0])
        g2 = np.linspace(bounds[2], bounds[3], resolution[1])
        G1, G2 = np.meshgrid(g1, g2, indexing="ij")
        x = np.empty((3, G1.size))
        x[axis - 1] = offset
        x[a1 - 1] = G1.ravel()
        x[a2 - 1] = G2.ravel()
        return x

    def values(self) -> np.ndarray:
        return self.payload.reshape(self.resolution[0], self.resolution[1], self.ncomp)


def write_vtk(path, dims, origin, spacing, vectors: dict, tensors: dict | None = None,
              title: str = "elasto field"):
    """Legacy ASCII STRUCTURED_POINTS file.

    ``vectors`` maps names to arrays of shape (3, *dims) indexed [comp, i, j, k];
    ``tensors`` maps names to (3, 3, *dims). VTK order has i varying fastest.
    """
    dims = tuple(int(d) for d in dims)
    npts = int(np.prod(dims))
    lines = ["# vtk DataFile Version 3.0", title, "ASCII", "DATASET STRUCTURED_POINTS",
             "DIMENSIONS {} {} {}".format(*dims),
             "ORIGIN {} {} {}".format(*map(_num, origin)),
             "SPACING {} {} {}".format(*map(_num, spacing)),
             f"POINT_DATA {npts}"]
    for name, arr in vectors.items():
        arr = np.asarray(arr).reshape((3,) + dims)
        flat = np.stack([arr[c].ravel(order="F") for c in range(3)], axis=1)
        lines.append(f"VECTORS {name} double")
        lines.extend(" ".join(map(_num, row)) for row in flat)
    for name, arr in (tensors or {}).items():
        arr = np.asarray(arr).reshape((3, 3) + dims)
        lines.append(f"TENSORS {name} double")
        for p in range(npts):
            idx = np.unravel_index(p, dims, order="F")
            mat = arr[(slice(None), slice(None)) + idx]
            lines.extend(" ".join(map(_num, row)) for row in mat)
            lines.append("")
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def read_vtk_vectors(path, name):
    """Small reader for files written by :func:`write_vtk` (tests and tooling)."""
    with open(path, encoding="ascii") as fh:
        lines = fh.read().splitlines()
    dims = tuple(int(v) for v in lines[4].split()[1:])
    npts = int(np.prod(dims))
    start = lines.index(f"VECTORS {name} double") + 1
    rows = np.array([[float(v) for v in lines[start + p].split()] for p in range(npts)])
    return dims, np.stack([rows[:, c].reshape(dims, order="F") for c in range(3)])
