import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from elasto import PreconditionError
from elasto.export import FieldSlice, read_csv, read_vtk_vectors, write_csv, write_vtk


@settings(max_examples=20, deadline=None)
@given(vals=st.lists(st.floats(allow_nan=False, allow_infinity=False), min_size=14, max_size=14))
def test_csv_round_trip_is_exact(vals, tmp_path_factory):
    path = tmp_path_factory.mktemp("csv") / "r.csv"
    rows = np.array(vals).reshape(2, 7)
    write_csv(path, list("abcdefg"), rows)
    header, back = read_csv(path)
    assert header == list("abcdefg")
    assert np.array_equal(back, rows)


def test_vtk_layout(tmp_path):
    rng = np.random.default_rng(0)
    dims = (4, 3, 2)
    vec = rng.normal(size=(3,) + dims)
    path = tmp_path / "v.vtk"
    write_vtk(path, dims, (0, 0, 0), (1, 1, 1), {"u": vec}, {"s": rng.normal(size=(3, 3) + dims)})
    d, back = read_vtk_vectors(path, "u")
    assert d == dims and np.array_equal(back, vec)
    lines = path.read_text().splitlines()
    # x varies fastest: second point is i=1, j=k=0
    assert [float(v) for v in lines[10].split()] == list(vec[:, 1, 0, 0])
    assert "DIMENSIONS 4 3 2" in lines


def test_field_slice_layout():
    x = FieldSlice.coordinates(2, 0.5, (3, 4), (-1, 1, 0, 3))
    assert x.shape == (3, 12)
    assert np.all(x[1] == 0.5)
    assert list(x[0, :4]) == [-1.0] * 4 and list(x[2, :4]) == [0.0, 1.0, 2.0, 3.0]
    s = FieldSlice(2, 0.5, 0.0, (3, 4), (-1, 1, 0, 3), np.arange(36.0))
    assert s.plane_axes == (1, 3)
    assert s.values()[1, 2].tolist() == [18.0, 19.0, 20.0]


def test_field_slice_invariants():
    with pytest.raises(PreconditionError):
        FieldSlice(1, 0.0, 0.0, (1, 4), (0, 1, 0, 1), np.zeros(12))
    with pytest.raises(PreconditionError):
        FieldSlice(1, 0.0, 0.0, (2, 4), (0, 1, 0, 1), np.zeros(12))
    with pytest.raises(PreconditionError):
        FieldSlice(4, 0.0, 0.0, (2, 2), (0, 1, 0, 1), np.zeros(12))
