import string
from pathlib import Path

import pytest
from hypothesis import given, settings, strategies as st

from elasto.admissible import RidgeDirection
from elasto.config import (
    GridCfg, MaterialCfg, OutputCfg, RunConfig, SamplingCfg, Term, TolerancesCfg, load_config,
    parse_config, render,
)
from elasto.errors import ConfigError, ParseError, RangeError, UnknownProfile

CONFIGS = Path(__file__).resolve().parent.parent / "configs"

MINIMAL = """
[material]
rho = 1
lambda = 1
mu = 1

[phi]
g.profile = gaussian
"""


def test_minimal_config_fills_defaults():
    cfg = parse_config(MINIMAL)
    assert cfg.material == MaterialCfg(1.0, 1.0, 1.0)
    assert cfg.phi == (Term("g", "gaussian"),)
    assert cfg.psi == () and cfg.forcing == ()
    assert cfg.tolerances == TolerancesCfg()
    assert cfg.sampling == SamplingCfg() and cfg.grid == GridCfg() and cfg.output == OutputCfg()
    assert cfg.build_material().a == 3.0


def test_zero_density_names_key():
    with pytest.raises(RangeError) as exc:
        parse_config(MINIMAL.replace("rho = 1", "rho = 0"))
    assert exc.value.key == "material.rho"


def test_misspelled_profile_suggests():
    with pytest.raises(UnknownProfile) as exc:
        parse_config(MINIMAL.replace("gaussian", "gausian"))
    assert exc.value.suggestion == "gaussian"
    assert exc.value.line == 8


@pytest.mark.parametrize("text,line", [
    ("[material]\nrho = 1\ncolour = red\n", 3),
    ("[materials]\n", 1),
    ("[material]\nrho 1\n", 2),
    ("rho = 1\n", 1),
    ("[material]\nrho = 1\nrho = 2\n", 3),
    ("[material]\nrho = abc\n", 2),
    ("[phi]\ng.profile = gaussian\ng.width = 2\n", 3),
    ("[phi]\ng.profile = gaussian\ng.direction = +0+\n", 3),
    ("[phi]\nsigma = 2\n", 2),
    ("[phi]\ng.profile = gaussian\ng.envelope = sine\n", 3),
])
def test_parse_errors_carry_line(text, line):
    with pytest.raises(ParseError) as exc:
        parse_config(text)
    assert exc.value.line == line


def test_term_without_profile():
    with pytest.raises(ParseError):
        parse_config("[phi]\ng.sigma = 2\n")


def test_parameter_ranges():
    with pytest.raises(RangeError) as exc:
        parse_config(MINIMAL + "g.sigma = -1\n")
    assert exc.value.key == "phi.g.sigma"
    with pytest.raises(RangeError) as exc:
        parse_config(MINIMAL + "[grid]\ncfl = 1.2\n")
    assert exc.value.key == "grid.cfl"
    with pytest.raises(RangeError) as exc:
        parse_config(MINIMAL + "[grid]\nT = 0\n")
    assert exc.value.key == "grid.T"


def test_comments_and_blank_lines():
    text = "# header\n\n[material]  # trailing\nrho = 2 # density\n"
    assert parse_config(text).material.rho == 2.0


def test_example_configs_load():
    ridge = load_config(CONFIGS / "ridge.cfg")
    assert ridge.phi[0].params == (("sigma", 2.0),)
    forced = load_config(CONFIGS / "forced.cfg")
    assert len(forced.phi) == 2 and forced.forcing[0].envelope == "exp_decay"
    assert forced.output.points[1] == (0.25, 0.5, 0.0, 0.0)
    with pytest.raises(UnknownProfile):
        load_config(CONFIGS / "bad_profile.cfg")


def test_missing_file():
    with pytest.raises(ConfigError):
        load_config("/nonexistent/elasto.cfg")


def test_build_data_matches_config(unit_material):
    import numpy as np
    cfg = load_config(CONFIGS / "forced.cfg")
    data = cfg.build_data()
    assert data.provenance == "constructed" and data.has_forcing
    x = np.array([[0.3], [0.1], [-0.4]])
    from elasto.profiles import gaussian, sine_gauss
    s1 = 0.3 - 0.1 - 0.4
    s2 = 0.3 + 0.1 + 0.4
    expected = 0.5 * gaussian(1.5).derivative(1)(s1) + 0.5 * sine_gauss(1.0, 1.5).derivative(1)(s2)
    assert data.phi(*x)[0, 0] == pytest.approx(expected, rel=1e-14)


# ------------------------------------------------------------ round trip

finite = st.floats(-10, 10, allow_nan=False).map(lambda v: v + 0.0)
positive = st.floats(0.01, 10)
idents = st.text(string.ascii_lowercase, min_size=1, max_size=6)
dirs = st.sampled_from([str(d) for d in RidgeDirection.all()])
ENV_PARAMS = {"constant": {"value": finite}, "exp_decay": {"rate": st.floats(0, 5)},
              "sine": {"omega": finite}, "gaussian_pulse": {"t0": st.floats(0, 2), "width": positive}}


@st.composite
def terms(draw, forcing=False):
    name = draw(st.sampled_from(["gaussian", "dgaussian", "sine_gauss", "polygauss"]))
    params = {}
    if draw(st.booleans()):
        params["sigma"] = draw(positive)
    if draw(st.booleans()):
        params["s0"] = draw(finite)
    if name == "sine_gauss" and draw(st.booleans()):
        params["k"] = draw(st.floats(0, 5))
    if name == "polygauss" and draw(st.booleans()):
        params["coeffs"] = tuple(draw(st.lists(finite, min_size=1, max_size=5)))
    env, env_params = None, ()
    if forcing:
        env = draw(st.sampled_from(sorted(ENV_PARAMS)))
        env_params = tuple(sorted((k, draw(v)) for k, v in ENV_PARAMS[env].items() if draw(st.booleans())))
    return Term("", name, tuple(sorted(params.items())), draw(dirs), draw(finite), env, env_params)


def named(ts):
    return tuple(Term(f"t{i}", *[getattr(t, f) for f in ("profile", "params", "direction", "coef",
                                                           "envelope", "env_params")])
                 for i, t in enumerate(ts))


box = st.tuples(finite, finite, finite)


@st.composite
def configs(draw):
    lo = draw(box)
    span = draw(positive)
    glo = draw(finite)
    gspan = draw(positive)
    return RunConfig(
        material=MaterialCfg(draw(positive), draw(st.floats(-0.5, 5)), draw(positive)),
        phi=named(draw(st.lists(terms(), max_size=3))),
        psi=named(draw(st.lists(terms(), max_size=2))),
        forcing=named(draw(st.lists(terms(forcing=True), max_size=2))),
        strong_forcing=draw(st.booleans()),
        tolerances=TolerancesCfg(draw(st.floats(1e-14, 0.5)), draw(positive), draw(positive)),
        sampling=SamplingCfg(lo, tuple(v + span for v in lo), draw(st.integers(1, 500)),
                             tuple(draw(st.lists(st.floats(0, 5), min_size=1, max_size=4))),
                             draw(st.integers(0, 100)), draw(positive), draw(positive),
                             draw(positive), draw(positive)),
        grid=GridCfg((glo,) * 3, (glo + gspan,) * 3,
                     tuple(draw(st.lists(st.integers(2, 128), min_size=1, max_size=3))),
                     draw(positive), draw(st.floats(0.05, 0.9)), draw(st.sampled_from(["zero", "exact"]))),
        output=OutputCfg(draw(st.text(string.ascii_lowercase + "._/", min_size=1, max_size=12)),
                         draw(st.sampled_from(["csv", "vtk"])),
                         tuple(draw(st.lists(st.tuples(st.floats(0, 5), finite, finite, finite), max_size=3))),
                         draw(st.integers(0, 3)), draw(finite), draw(st.floats(0, 3)),
                         (draw(st.integers(2, 50)), draw(st.integers(2, 50))),
                         (draw(finite), draw(finite), draw(finite), draw(finite)),
                         draw(st.booleans()), draw(st.floats(0, 3)), draw(st.integers(2, 64))),
    )


@settings(max_examples=200, deadline=None)
@given(configs())
def test_render_parse_round_trip(cfg):
    assert parse_config(render(cfg)) == cfg


def test_render_of_example_is_stable():
    cfg = load_config(CONFIGS / "forced.cfg")
    text = render(cfg)
    assert render(parse_config(text)) == text
