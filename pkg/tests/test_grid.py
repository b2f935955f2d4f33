import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from phaselab.grid import (
    Field,
    Grid,
    fourier_forward,
    fourier_inverse,
    inner_product,
    load_field,
    load_field_csv,
    lp_norm,
    sample_function,
    save_field,
    save_field_csv,
)


def test_grid_geometry():
    g = Grid(1, 64, 4.0)
    assert g.npoints == 64
    assert g.h == pytest.approx(8.0 / 64)
    assert g.cell_measure == pytest.approx(g.h)
    assert g.axis[0] == pytest.approx(-4.0)
    assert np.all(np.diff(g.axis) > 0)


def test_grid_rejects_non_power_of_two():
    with pytest.raises(ValueError):
        Grid(1, 63, 4.0)
    with pytest.raises(ValueError):
        Grid(4, 8, 1.0)


def test_fourier_roundtrip_and_parseval():
    g = Grid(2, 32, 3.0)
    rng = np.random.default_rng(0)
    f = Field(g, rng.standard_normal(g.npoints) + 1j * rng.standard_normal(g.npoints))
    F = fourier_forward(f)
    back = fourier_inverse(F)
    assert np.allclose(back.values, f.values, atol=1e-13)
    # unitary transform preserves the discrete l2 mass
    assert np.sum(np.abs(F.values) ** 2) == pytest.approx(
        np.sum(np.abs(f.values) ** 2)
    )


def test_lp_norm_constant_field():
    g = Grid(1, 128, 2.0)
    f = Field(g, np.full(g.npoints, 1.0 + 0.0j))
    # ||1||_p over a box of measure 4 is 4^(1/p)
    for p in (1.0, 2.0, 4.0):
        assert lp_norm(f, p) == pytest.approx(4.0 ** (1.0 / p), rel=1e-12)


@settings(max_examples=25, deadline=None)
@given(st.floats(min_value=-1e3, max_value=1e3, allow_nan=False),
       st.floats(min_value=1.0, max_value=8.0))
def test_lp_norm_homogeneous(scale, p):
    g = Grid(1, 32, 1.0)
    rng = np.random.default_rng(3)
    f = Field(g, rng.standard_normal(g.npoints) + 0j)
    assert lp_norm(Field(g, scale * f.values), p) == pytest.approx(
        abs(scale) * lp_norm(f, p), rel=1e-10, abs=1e-12
    )


def test_inner_product_matches_norm():
    g = Grid(1, 64, 4.0)
    rng = np.random.default_rng(1)
    f = Field(g, rng.standard_normal(g.npoints) + 1j * rng.standard_normal(g.npoints))
    assert np.real(inner_product(f, f)) == pytest.approx(lp_norm(f, 2.0) ** 2)


def test_sample_function():
    g = Grid(1, 64, 4.0)
    f = sample_function(g, lambda x: np.exp(-(x**2)))
    assert f.values[np.argmin(np.abs(g.axis))] == pytest.approx(1.0, abs=1e-2)


@pytest.mark.parametrize("saver,loader", [(save_field, load_field),
                                          (save_field_csv, load_field_csv)])
def test_field_io_roundtrip(tmp_path, saver, loader):
    g = Grid(1, 32, 2.0)
    rng = np.random.default_rng(5)
    f = Field(g, rng.standard_normal(g.npoints) + 1j * rng.standard_normal(g.npoints))
    path = tmp_path / ("f.npz" if saver is save_field else "f.csv")
    saver(path, f)
    back = loader(path)
    assert back.grid == g
    assert np.allclose(back.values, f.values, atol=1e-12)
