"""Line-oriented run configuration: parse, validate, render.

Grammar (see docs/config.md for the full reference)::

    file     := line*
    line     := blank | comment | section | entry
    comment  := '#' any*
    section  := '[' name ']'
    entry    := key '=' value [comment]
    key      := ident ('.' ident)?

Dotted keys ``<term>.<field>`` describe one ridge term inside ``[phi]``,
``[psi]`` or ``[forcing]``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, fields, replace

from .admissible import (
    ProblemData, RidgeDirection, Sampling, ridge_data, ridge_forcing, superpose, superpose_forcing,
)
from .core import Material, Tolerances
from .errors import ConfigError, ParseError, RangeError, UnknownProfile
from .fields import ForcingField, VectorField3
from .profiles import ENVELOPES, PROFILES, envelope, make_profile, suggest
from .quadrature import QuadratureSpec

SECTIONS = ("material", "phi", "psi", "forcing", "tolerances", "sampling", "grid", "output")


@dataclass(frozen=True)
class Term:
    name: str
    profile: str
    params: tuple = ()          # sorted (key, value) pairs
    direction: str = "+++"
    coef: float = 1.0
    envelope: str | None = None
    env_params: tuple = ()


@dataclass(frozen=True)
class MaterialCfg:
    rho: float = 1.0
    lam: float = 1.0
    mu: float = 1.0


@dataclass(frozen=True)
class TolerancesCfg:
    quad_rel: float = 1e-10
    fd_step: float = 1e-4
    check_tol: float = 1e-6


@dataclass(frozen=True)
class SamplingCfg:
    lo: tuple = (-1.0, -1.0, -1.0)
    hi: tuple = (1.0, 1.0, 1.0)
    count: int = 64
    times: tuple = (0.1, 0.5, 1.0)
    seed_offset: int = 1
    residual_step: float = 1e-2
    residual_tol: float = 1e-4
    identity_step: float = 1e-3
    identity_tol: float = 1e-5


@dataclass(frozen=True)
class GridCfg:
    lo: tuple = (-4.0, -4.0, -4.0)
    hi: tuple = (4.0, 4.0, 4.0)
    levels: tuple = (32, 64)
    T: float = 0.5
    cfl: float = 0.9
    boundary: str = "exact"


@dataclass(frozen=True)
class OutputCfg:
    path: str = "elasto_out.csv"
    format: str = "csv"
    points: tuple = ()
    slice_axis: int = 0          # 0 means no slice
    slice_offset: float = 0.0
    slice_time: float = 0.0
    slice_resolution: tuple = (16, 16)
    slice_bounds: tuple = (-2.0, 2.0, -2.0, 2.0)
    stress: bool = False
    snapshot_time: float = 0.5
    snapshot_n: int = 16


@dataclass(frozen=True)
class RunConfig:
    material: MaterialCfg = field(default_factory=MaterialCfg)
    phi: tuple = ()
    psi: tuple = ()
    forcing: tuple = ()
    strong_forcing: bool = True
    tolerances: TolerancesCfg = field(default_factory=TolerancesCfg)
    sampling: SamplingCfg = field(default_factory=SamplingCfg)
    grid: GridCfg = field(default_factory=GridCfg)
    output: OutputCfg = field(default_factory=OutputCfg)

    # ---------------------------------------------------------- builders
    def build_material(self) -> Material:
        m = self.material
        return Material(m.rho, m.lam, m.mu)

    def build_tolerances(self) -> Tolerances:
        t = self.tolerances
        return Tolerances(t.quad_rel, t.fd_step, t.check_tol)

    def build_quadrature(self) -> QuadratureSpec:
        return QuadratureSpec(rel_tol=self.tolerances.quad_rel)

    def build_sampling(self) -> Sampling:
        s = self.sampling
        return Sampling(s.lo, s.hi, s.count, s.times, s.seed_offset)

    def build_data(self) -> ProblemData:
        def vec(terms):
            if not terms:
                return VectorField3.zero()
            return superpose([(t.coef, ridge_data(_profile(t), RidgeDirection.parse(t.direction)))
                              for t in terms])

        if self.forcing:
            forcing = superpose_forcing([
                (t.coef, ridge_forcing(envelope(t.envelope, **dict(t.env_params)), _profile(t),
                                       RidgeDirection.parse(t.direction)))
                for t in self.forcing])
        else:
            forcing = ForcingField.zero()
        return ProblemData(vec(self.phi), vec(self.psi), forcing, self.strong_forcing)


def _profile(t: Term):
    return make_profile(t.profile, **dict(t.params))


# ------------------------------------------------------------------ values

def _float(key, text, line):
    try:
        v = float(text)
    except ValueError:
        raise ParseError(f"{key}: expected a number, got {text!r}", line) from None
    if not math.isfinite(v):
        raise RangeError(key, "must be finite")
    return v


def _int(key, text, line):
    try:
        return int(text)
    except ValueError:
        raise ParseError(f"{key}: expected an integer, got {text!r}", line) from None


def _floats(key, text, line, n=None):
    parts = [p for p in text.replace(" ", "").split(",") if p]
    vals = tuple(_float(key, p, line) for p in parts)
    if n is not None and len(vals) != n:
        raise ParseError(f"{key}: expected {n} comma-separated numbers", line)
    return vals


def _bool(key, text, line):
    t = text.lower()
    if t in ("true", "yes", "1", "on"):
        return True
    if t in ("false", "no", "0", "off"):
        return False
    raise ParseError(f"{key}: expected true/false, got {text!r}", line)


def _box(key, text, line):
    vals = _floats(key, text, line)
    if len(vals) == 1:
        return vals * 3
    if len(vals) != 3:
        raise ParseError(f"{key}: expected 1 or 3 numbers", line)
    return vals


def _points(key, text, line):
    pts = []
    for chunk in text.split(";"):
        if chunk.strip():
            pts.append(_floats(key, chunk, line, 4))
    return tuple(pts)


# (field name in dataclass, converter)
_SCALAR_KEYS = {
    "material": {"rho": ("rho", _float), "lambda": ("lam", _float), "mu": ("mu", _float)},
    "tolerances": {"quad_rel": ("quad_rel", _float), "fd_step": ("fd_step", _float),
                   "check_tol": ("check_tol", _float)},
    "sampling": {"lo": ("lo", _box), "hi": ("hi", _box), "count": ("count", _int),
                 "times": ("times", _floats), "seed_offset": ("seed_offset", _int),
                 "residual_step": ("residual_step", _float), "residual_tol": ("residual_tol", _float),
                 "identity_step": ("identity_step", _float), "identity_tol": ("identity_tol", _float)},
    "grid": {"lo": ("lo", _box), "hi": ("hi", _box),
             "levels": ("levels", lambda k, t, l: tuple(_int(k, p, l) for p in t.split(",") if p.strip())),
             "T": ("T", _float), "cfl": ("cfl", _float), "boundary": ("boundary", lambda k, t, l: t)},
    "output": {"path": ("path", lambda k, t, l: t), "format": ("format", lambda k, t, l: t),
               "points": ("points", _points), "slice_axis": ("slice_axis", _int),
               "slice_offset": ("slice_offset", _float), "slice_time": ("slice_time", _float),
               "slice_resolution": ("slice_resolution",
                                    lambda k, t, l: tuple(_int(k, p, l) for p in t.split(","))),
               "slice_bounds": ("slice_bounds", lambda k, t, l: _floats(k, t, l, 4)),
               "stress": ("stress", _bool), "snapshot_time": ("snapshot_time", _float),
               "snapshot_n": ("snapshot_n", _int)},
}

_TERM_FIELDS = ("profile", "direction", "coef", "envelope")


def _parse_term(section, name, entries) -> Term:
    """``entries`` maps field -> (value text, line)."""
    if "profile" not in entries:
        raise ParseError(f"{section}.{name}: missing 'profile'", min(l for _, l in entries.values()))
    pname, pline = entries["profile"]
    if pname not in PROFILES:
        raise UnknownProfile(pname, suggest(pname, PROFILES), pline)
    pspec = PROFILES[pname][1]
    env_name, env_spec = None, {}
    if section == "forcing":
        env_name, eline = entries.get("envelope", ("constant", None))
        if env_name not in ENVELOPES:
            raise ParseError(f"forcing.{name}.envelope: unknown envelope {env_name!r}"
                             + (f" (did you mean {suggest(env_name, ENVELOPES)!r}?)"
                                if suggest(env_name, ENVELOPES) else ""), eline)
        env_spec = ENVELOPES[env_name]
    elif "envelope" in entries:
        raise ParseError(f"{section}.{name}.envelope is only valid in [forcing]", entries["envelope"][1])
    params, env_params = {}, {}
    direction, coef = "+++", 1.0
    for key, (text, line) in entries.items():
        full = f"{section}.{name}.{key}"
        if key in ("profile", "envelope"):
            continue
        if key == "direction":
            try:
                direction = str(RidgeDirection.parse(text))
            except ValueError as e:
                raise ParseError(f"{full}: {e}", line) from None
        elif key == "coef":
            coef = _float(full, text, line)
        elif key in pspec:
            v = _floats(full, text, line) if key == "coeffs" else _float(full, text, line)
            if not pspec[key].check(v):
                raise RangeError(full, pspec[key].rule)
            params[key] = v
        elif key in env_spec:
            v = _float(full, text, line)
            if not env_spec[key].check(v):
                raise RangeError(full, env_spec[key].rule)
            env_params[key] = v
        else:
            raise ParseError(f"unknown key {full!r}", line)
    return Term(name, pname, tuple(sorted(params.items())), direction, coef, env_name,
                tuple(sorted(env_params.items())))


def parse_config(text: str) -> RunConfig:
    section = None
    scalars: dict[str, dict] = {s: {} for s in _SCALAR_KEYS}
    terms: dict[str, dict] = {"phi": {}, "psi": {}, "forcing": {}}
    strong = True
    seen_lines: dict[str, int] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("["):
            if not line.endswith("]"):
                raise ParseError(f"malformed section header {line!r}", lineno)
            section = line[1:-1].strip()
            if section not in SECTIONS:
                raise ParseError(f"unknown section [{section}]", lineno)
            continue
        if "=" not in line:
            raise ParseError(f"expected 'key = value', got {line!r}", lineno)
        if section is None:
            raise ParseError("entry before any section header", lineno)
        key, value = (p.strip() for p in line.split("=", 1))
        if not key or not value:
            raise ParseError(f"empty key or value in {line!r}", lineno)
        full = f"{section}.{key}"
        if full in seen_lines:
            raise ParseError(f"duplicate key {full!r} (first on line {seen_lines[full]})", lineno)
        seen_lines[full] = lineno
        if section in terms:
            if section == "forcing" and key == "strong":
                strong = _bool(full, value, lineno)
                continue
            if "." not in key:
                raise ParseError(f"unknown key {full!r} (term keys look like name.field)", lineno)
            tname, tfield = key.split(".", 1)
            if not tname.isidentifier():
                raise ParseError(f"bad term name {tname!r}", lineno)
            terms[section].setdefault(tname, {})[tfield] = (value, lineno)
        else:
            table = _SCALAR_KEYS[section]
            if key not in table:
                raise ParseError(f"unknown key {full!r}", lineno)
            attr, conv = table[key]
            scalars[section][attr] = conv(full, value, lineno)

    cfg = RunConfig(
        material=MaterialCfg(**scalars["material"]),
        phi=tuple(_parse_term("phi", n, e) for n, e in terms["phi"].items()),
        psi=tuple(_parse_term("psi", n, e) for n, e in terms["psi"].items()),
        forcing=tuple(_parse_term("forcing", n, e) for n, e in terms["forcing"].items()),
        strong_forcing=strong,
        tolerances=TolerancesCfg(**scalars["tolerances"]),
        sampling=SamplingCfg(**scalars["sampling"]),
        grid=GridCfg(**scalars["grid"]),
        output=OutputCfg(**scalars["output"]),
    )
    check_ranges(cfg)
    return cfg


def check_ranges(cfg: RunConfig):
    m = cfg.material
    if not m.rho > 0:
        raise RangeError("material.rho", "must be > 0")
    if not m.lam + 2 * m.mu > 0:
        raise RangeError("material.mu", "lambda + 2 mu must be > 0")
    for k in ("quad_rel", "fd_step", "check_tol"):
        if not getattr(cfg.tolerances, k) > 0:
            raise RangeError(f"tolerances.{k}", "must be > 0")
    if not cfg.tolerances.quad_rel < 1:
        raise RangeError("tolerances.quad_rel", "must be < 1")
    s = cfg.sampling
    if s.count < 1:
        raise RangeError("sampling.count", "must be >= 1")
    if any(h < l for l, h in zip(s.lo, s.hi)):
        raise RangeError("sampling.hi", "must be >= sampling.lo")
    if not s.times or any(t < 0 for t in s.times):
        raise RangeError("sampling.times", "must be a non-empty list of times >= 0")
    for k in ("residual_step", "residual_tol", "identity_step", "identity_tol"):
        if not getattr(s, k) > 0:
            raise RangeError(f"sampling.{k}", "must be > 0")
    g = cfg.grid
    if not g.levels or any(n < 2 for n in g.levels):
        raise RangeError("grid.levels", "each level must be >= 2")
    if not g.T > 0:
        raise RangeError("grid.T", "must be > 0")
    if not 0 < g.cfl <= 0.9:
        raise RangeError("grid.cfl", "must be in (0, 0.9]")
    if g.boundary not in ("zero", "exact"):
        raise RangeError("grid.boundary", "must be 'zero' or 'exact'")
    spans = [h - l for l, h in zip(g.lo, g.hi)]
    if any(sp <= 0 for sp in spans) or max(spans) - min(spans) > 1e-12 * max(spans):
        raise RangeError("grid.hi", "grid box must be a cube with hi > lo")
    o = cfg.output
    if not o.path:
        raise RangeError("output.path", "must be non-empty")
    if o.format not in ("csv", "vtk"):
        raise RangeError("output.format", "must be 'csv' or 'vtk'")
    if o.slice_axis not in (0, 1, 2, 3):
        raise RangeError("output.slice_axis", "must be 1, 2, 3 (or 0 for no slice)")
    if len(o.slice_resolution) != 2 or min(o.slice_resolution) < 2:
        raise RangeError("output.slice_resolution", "needs two values >= 2")
    if o.slice_time < 0 or o.snapshot_time < 0:
        raise RangeError("output.slice_time", "times must be >= 0")
    if o.snapshot_n < 2:
        raise RangeError("output.snapshot_n", "must be >= 2")
    for p in o.points:
        if p[0] < 0:
            raise RangeError("output.points", "point times must be >= 0")


def load_config(path) -> RunConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as e:
        raise ConfigError(f"cannot read config {path}: {e}") from None
    return parse_config(text)


# ------------------------------------------------------------------ render

def _fmt(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, tuple):
        return ",".join(_fmt(x) for x in v)
    return str(v)


def render(cfg: RunConfig) -> str:
    out = []
    inverse = {sec: {attr: key for key, (attr, _) in tbl.items()} for sec, tbl in _SCALAR_KEYS.items()}

    def scalar_section(name, obj):
        out.append(f"[{name}]")
        for f in fields(obj):
            v = getattr(obj, f.name)
            if name == "output" and f.name == "points":
                if v:
                    out.append("points = " + "; ".join(_fmt(p) for p in v))
                continue
            out.append(f"{inverse[name][f.name]} = {_fmt(v)}")
        out.append("")

    def term_section(name, terms, extra=()):
        out.append(f"[{name}]")
        out.extend(extra)
        for t in terms:
            out.append(f"{t.name}.profile = {t.profile}")
            out.extend(f"{t.name}.{k} = {_fmt(v)}" for k, v in t.params)
            out.append(f"{t.name}.direction = {t.direction}")
            out.append(f"{t.name}.coef = {_fmt(t.coef)}")
            if t.envelope is not None:
                out.append(f"{t.name}.envelope = {t.envelope}")
                out.extend(f"{t.name}.{k} = {_fmt(v)}" for k, v in t.env_params)
        out.append("")

    scalar_section("material", cfg.material)
    term_section("phi", cfg.phi)
    term_section("psi", cfg.psi)
    term_section("forcing", cfg.forcing, [f"strong = {_fmt(cfg.strong_forcing)}"])
    scalar_section("tolerances", cfg.tolerances)
    scalar_section("sampling", cfg.sampling)
    scalar_section("grid", cfg.grid)
    scalar_section("output", cfg.output)
    return "\n".join(out)


def with_output(cfg: RunConfig, **changes) -> RunConfig:
    return replace(cfg, output=replace(cfg.output, **changes))
