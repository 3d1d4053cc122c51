"""Command-line front end.

Exit codes: 0 success / all checks pass, 2 checks failed (or solve refused
on unvalidated data), 1 configuration, precondition or I/O error.
"""

from __future__ import annotations

import argparse
import math
import sys

import numpy as np

from .admissible import validate_admissible
from .config import RunConfig, load_config, with_output
from .errors import ElastoError
from .export import (
    DISPLACEMENT_COLUMNS, STRESS_COLUMNS, FieldSlice, write_csv, write_vtk,
)
from .oracle import GridSpec, compare, oracle_solve
from .solver import displacement, displacement_gradient
from .stress import stress_from_gradient, stress_matrix
from .verify import CheckReport, identity_suite, residual_report, spacetime_points

EXIT_OK, EXIT_ERROR, EXIT_FAIL = 0, 1, 2
RESIDUAL_RATIO = (3.0, 5.0)
ORDER_RANGE = (1.5, 2.5)


def _emit(report, out, kv):
    out.write(report.to_kv() if kv else report.to_text() + "\n")


def cmd_validate(cfg: RunConfig, out=None, kv=False, data=None) -> int:
    """``data`` overrides the configured catalog data (library callers only)."""
    out = out or sys.stdout
    data = cfg.build_data() if data is None else data
    rep = validate_admissible(data, cfg.build_sampling(), cfg.tolerances.check_tol)
    _emit(rep, out, kv)
    return EXIT_OK if rep.passed else EXIT_FAIL


def _evaluate(cfg, data, m, t, x, stress):
    spec = cfg.build_quadrature()
    u, _ = displacement(data, m, t, x, spec)
    cols = [np.asarray(t, float), x[0], x[1], x[2], u[0], u[1], u[2]]
    names = list(DISPLACEMENT_COLUMNS)
    s = None
    if stress:
        s = stress_from_gradient(displacement_gradient(data, m, t, x, spec), m)
        cols.extend(s)
        names.extend(STRESS_COLUMNS)
    return names, np.column_stack(cols), u, s


def cmd_solve(cfg: RunConfig, force=False, stress=None, points=None, out=None, err=None,
              data=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    data = cfg.build_data() if data is None else data
    m = cfg.build_material()
    if not force:
        rep = validate_admissible(data, cfg.build_sampling(), cfg.tolerances.check_tol)
        if not rep.passed:
            err.write(rep.to_text() + "\nrefusing to solve non-admissible data (use --force)\n")
            return EXIT_FAIL
    o = cfg.output
    stress = o.stress if stress is None else stress
    pts = tuple(points) if points else o.points
    if pts:
        arr = np.array(pts, dtype=float)
        t, x = arr[:, 0], arr[:, 1:].T.copy()
        names, table, _, _ = _evaluate(cfg, data, m, t, x, stress)
        if o.format != "csv":
            raise ElastoError("point samples can only be written as csv")
        write_csv(o.path, names, table)
    elif o.slice_axis:
        x = FieldSlice.coordinates(o.slice_axis, o.slice_offset, o.slice_resolution, o.slice_bounds)
        t = np.full(x.shape[1], o.slice_time)
        names, table, u, s = _evaluate(cfg, data, m, t, x, stress)
        sl = FieldSlice(o.slice_axis, o.slice_offset, o.slice_time, o.slice_resolution,
                        o.slice_bounds, u.T.ravel().copy())
        if o.format == "csv":
            write_csv(o.path, names, table)
        else:
            _write_slice_vtk(o.path, sl, s)
    else:
        raise ElastoError("nothing to solve: give output.points, --point, or output.slice_axis")
    out.write(f"wrote {o.path}\n")
    return EXIT_OK


def _write_slice_vtk(path, sl: FieldSlice, s):
    a1, a2 = sl.plane_axes
    dims = [1, 1, 1]
    dims[a1 - 1], dims[a2 - 1] = sl.resolution
    origin = [0.0, 0.0, 0.0]
    spacing = [1.0, 1.0, 1.0]
    origin[sl.axis - 1] = sl.offset
    origin[a1 - 1], origin[a2 - 1] = sl.bounds[0], sl.bounds[2]
    spacing[a1 - 1] = (sl.bounds[1] - sl.bounds[0]) / (sl.resolution[0] - 1)
    spacing[a2 - 1] = (sl.bounds[3] - sl.bounds[2]) / (sl.resolution[1] - 1)
    vals = np.moveaxis(sl.values(), -1, 0).reshape(3, *dims)
    tensors = None
    if s is not None:
        tensors = {"stress": stress_matrix(s).reshape((3, 3) + tuple(dims))}
    write_vtk(path, dims, origin, spacing, {"displacement": vals}, tensors,
              f"elasto slice axis={sl.axis} offset={sl.offset!r} t={sl.time!r}")


def run_verify(cfg: RunConfig, solver=displacement):
    """Residual and identity checks at spacetime samples; returns the combined report."""
    data, m = cfg.build_data(), cfg.build_material()
    s = cfg.sampling
    spec = cfg.build_quadrature()
    t, x = spacetime_points(s.lo, s.hi, (min(s.times), max(s.times)), s.count, s.seed_offset)
    res = residual_report(data, m, t, x, s.residual_step, spec, solver)
    if solver is displacement:
        ids = identity_suite(data, m, t, x, spec, s.identity_tol, s.identity_step)
    else:
        ids = _identity_via_fd(data, m, t, x, spec, s, solver)
    ratio = res.max / res.max_half if res.max_half > 0 else math.nan
    ok_ratio = res.max_half == 0.0 or RESIDUAL_RATIO[0] <= ratio <= RESIDUAL_RATIO[1]
    notes = (f"residual max at h={s.residual_step:g}: {res.max:.3e}",
             f"ratio h/(h/2) = {ratio:.4f}, must lie in {RESIDUAL_RATIO}: {'ok' if ok_ratio else 'FAIL'}")
    rep_res = CheckReport("residual", {f"residual_max_h{s.residual_step / 2:g}": res.max_half},
                          s.residual_tol, t.size, notes)
    return rep_res, ids, ok_ratio


def _identity_via_fd(data, m, t, x, spec, s, solver):
    """Identity suite with gradients taken by differencing an injected solver."""
    h = s.identity_step

    def grad(data, m, t, x, spec):
        t = np.asarray(t, float)
        g = np.empty((3, 3, t.size))
        for j in range(3):
            cols = []
            for d in (h, -h, 0.5 * h, -0.5 * h):
                y = x.copy()
                y[j] += d
                cols.append(solver(data, m, t, y, spec)[0])
            g[:, j] = (4 * (cols[2] - cols[3]) / h - (cols[0] - cols[1]) / (2 * h)) / 3
        return g

    def vel(data, m, t, x, spec):
        cols = [solver(data, m, t + d, x, spec)[0] for d in (h, -h, 0.5 * h, -0.5 * h)]
        return (4 * (cols[2] - cols[3]) / h - (cols[0] - cols[1]) / (2 * h)) / 3

    return identity_suite(data, m, t, x, spec, s.identity_tol, h, gradient=grad, vel=vel)


def cmd_verify(cfg: RunConfig, out=None, kv=False, solver=displacement) -> int:
    out = out or sys.stdout
    rep_res, ids, ok_ratio = run_verify(cfg, solver)
    _emit(rep_res, out, kv)
    _emit(ids, out, kv)
    ok = rep_res.passed and ids.passed and ok_ratio
    if not kv:
        out.write(("verify PASS" if ok else "verify FAIL") + "\n")
    return EXIT_OK if ok else EXIT_FAIL


def build_grids(cfg: RunConfig):
    g = cfg.grid
    if len(g.levels) < 2:
        raise ElastoError("compare needs at least two grid levels")
    m = cfg.build_material()
    grids = [GridSpec.for_time(m, g.T, g.levels[0], g.lo, g.hi, g.boundary, g.cfl)]
    for n in g.levels[1:]:
        if n != 2 * grids[-1].n:
            raise ElastoError("grid levels must double (e.g. 32,64,128)")
        grids.append(grids[-1].refined())
    return grids


def cmd_compare(cfg: RunConfig, out=None, kv=False, oracle=oracle_solve) -> int:
    out = out or sys.stdout
    grids = build_grids(cfg)
    rep = compare(cfg.build_data(), cfg.build_material(), grids, cfg.grid.T,
                  cfg.build_quadrature(), oracle=oracle)
    _emit(rep, out, kv)
    ok = rep.orders_within(*ORDER_RANGE)
    if not kv:
        out.write(("compare PASS" if ok else "compare FAIL") + f" (orders must lie in {ORDER_RANGE})\n")
    return EXIT_OK if ok else EXIT_FAIL


def cmd_export(cfg: RunConfig, source="exact", stress=None, out=None) -> int:
    """Volume snapshot on the grid box at ``output.snapshot_time``."""
    out = out or sys.stdout
    data, m = cfg.build_data(), cfg.build_material()
    o, g = cfg.output, cfg.grid
    stress = o.stress if stress is None else stress
    n = o.snapshot_n
    if source == "oracle":
        grid = GridSpec.for_time(m, o.snapshot_time, n, g.lo, g.hi, g.boundary, g.cfl)
        U = oracle_solve(data, m, grid, save_every=None, spec=cfg.build_quadrature()).final
        X = grid.nodes()
        s = None
        if stress:
            raise ElastoError("--stress is only available for the exact source")
    else:
        grid = GridSpec(g.lo, g.hi, n, 1.0, 1, g.boundary, g.cfl)
        X = grid.nodes()
        flat = X.reshape(3, -1)
        t = np.full(flat.shape[1], o.snapshot_time)
        _, table, u, s = _evaluate(cfg, data, m, t, flat, stress)
        U = u.reshape(X.shape)
    dims = (n + 1,) * 3
    if o.format == "vtk":
        tensors = {"stress": stress_matrix(s).reshape((3, 3) + dims)} if s is not None else None
        write_vtk(o.path, dims, grid.lo, (grid.h,) * 3, {"displacement": U}, tensors,
                  f"elasto {source} snapshot t={o.snapshot_time!r}")
    else:
        flat = X.reshape(3, -1)
        cols = [np.full(flat.shape[1], o.snapshot_time), *flat, *U.reshape(3, -1)]
        names = list(DISPLACEMENT_COLUMNS)
        if s is not None:
            cols.extend(s)
            names.extend(STRESS_COLUMNS)
        write_csv(o.path, names, np.column_stack(cols))
    out.write(f"wrote {o.path}\n")
    return EXIT_OK


def _point(text):
    vals = [float(v) for v in text.split(",")]
    if len(vals) != 4:
        raise argparse.ArgumentTypeError("a point is t,x1,x2,x3")
    return tuple(vals)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="elasto", description="Exact elastodynamic Cauchy solutions and their verification.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--config", required=True, help="run configuration file")
        sp.add_argument("--out", help="output path (overrides [output] path)")
        sp.add_argument("--format", choices=("csv", "vtk"), help="output format")
        sp.add_argument("--kv", action="store_true", help="machine-readable key=value report")
        return sp

    common(sub.add_parser("validate", help="check admissibility of the configured data"))
    sp = common(sub.add_parser("solve", help="evaluate the exact solution at points or on a slice"))
    sp.add_argument("--force", action="store_true", help="solve even if validation fails")
    sp.add_argument("--stress", action="store_true", help="also write stress tensor entries")
    sp.add_argument("--point", action="append", type=_point, help="t,x1,x2,x3 (repeatable)")
    common(sub.add_parser("verify", help="residual and identity checks"))
    common(sub.add_parser("compare", help="convergence study against the FD oracle"))
    sp = common(sub.add_parser("export", help="write a volume snapshot"))
    sp.add_argument("--stress", action="store_true")
    sp.add_argument("--source", choices=("exact", "oracle"), default="exact")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        changes = {}
        if args.out:
            changes["path"] = args.out
        if args.format:
            changes["format"] = args.format
        if changes:
            cfg = with_output(cfg, **changes)
        if args.command == "validate":
            return cmd_validate(cfg, kv=args.kv)
        if args.command == "solve":
            return cmd_solve(cfg, force=args.force, stress=args.stress or None, points=args.point)
        if args.command == "verify":
            return cmd_verify(cfg, kv=args.kv)
        if args.command == "compare":
            return cmd_compare(cfg, kv=args.kv)
        if args.command == "export":
            return cmd_export(cfg, source=args.source, stress=args.stress or None)
    except (ElastoError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_ERROR
    return EXIT_ERROR  # pragma: no cover


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
