import numpy as np
import pytest

from phaselab.critical import (
    Potential,
    ball_average,
    build_partition,
    critical_radius,
    critical_radius_field,
    overlap_constant,
    reverse_holder_constant,
)
from phaselab.grid import Grid, sample_function
from phaselab.spectral import ResourceGuardError

from conftest import constant_potential, quadratic_potential


def test_potential_validation():
    g = Grid(1, 32, 2.0)
    with pytest.raises(ValueError):
        Potential(sample_function(g, lambda x: -np.ones_like(x)))
    with pytest.raises(ValueError):
        Potential(sample_function(g, lambda x: np.zeros_like(x)))
    with pytest.raises(ValueError):
        Potential(sample_function(g, lambda x: np.ones_like(x)), rh_exponent=0.4)


def test_ball_average_constant():
    V = constant_potential()
    assert ball_average(V, (0.0,), 0.5) == pytest.approx(1.0, rel=1e-12)


def test_reverse_holder_constant_quadratic_oracle():
    # V = x^2 on a centered ball: (avg V^2)^(1/2) / avg V = 3 / sqrt(5)
    g = Grid(1, 1024, 2.0)
    V = Potential(sample_function(g, lambda x: x**2))
    c = reverse_holder_constant(V, 2.0, [(0.0,)], [1.0])
    assert c == pytest.approx(3.0 / np.sqrt(5.0), rel=5e-3)


def test_reverse_holder_rejects_escaping_ball():
    V = constant_potential()
    with pytest.raises(ValueError):
        reverse_holder_constant(V, 2.0, [(3.9,)], [1.0])


def test_critical_radius_constant_1d():
    # d=1, V=1: r * (2r) = 1 so rho = 1/sqrt(2)
    V = constant_potential()
    rho, flagged = critical_radius(V, (0.0,))
    assert not flagged
    assert rho == pytest.approx(1.0 / np.sqrt(2.0), abs=2 * V.grid.h)


def test_critical_radius_constant_3d():
    # d=3, V=1: (4 pi / 3) r^2 = 1 so rho = sqrt(3 / (4 pi))
    g = Grid(3, 16, 2.0)
    V = Potential(sample_function(g, lambda x, y, z: np.ones_like(x)))
    rho, flagged = critical_radius(V, (0.0, 0.0, 0.0))
    assert not flagged
    assert rho == pytest.approx(np.sqrt(3.0 / (4.0 * np.pi)), abs=2 * g.h)


def test_critical_radius_scaling_quadratic():
    # V = x^2 in d=1: rho(x) ~ min(1, 1/|x|) up to constants, so the
    # product rho(x) * max(1, |x|) stays in a fixed band
    g = Grid(1, 2048, 12.0)
    V = Potential(sample_function(g, lambda x: x**2))
    prods = []
    for x in (0.5, 1.0, 2.0, 5.0, 10.0):
        rho, flagged = critical_radius(V, (x,))
        assert not flagged
        prods.append(rho * max(1.0, x))
    assert max(prods) / min(prods) < 2.0


def test_critical_radius_field_sup():
    V = constant_potential()
    fld = critical_radius_field(V)
    center = np.argmin(np.abs(V.grid.axis))
    assert fld.rho[center] == pytest.approx(1.0 / np.sqrt(2.0), abs=2 * V.grid.h)
    # near the boundary the ball is clipped by the box, which can only
    # enlarge the crossing radius; it stays bounded by the clipped oracle
    # r * (r + half_extent - |x|) = 1 at the corner, i.e. r < 1
    assert fld.R_sup >= fld.rho[center] - 1e-12
    assert fld.R_sup < 1.0
    assert not np.any(fld.flagged)


def test_partition_constant_potential_tiles():
    part = build_partition(constant_potential())
    sides = part.sides()
    # rho = 1/sqrt(2) everywhere: unit cubes tile the side-8 box
    assert len(part.cubes) == 8
    assert np.allclose(sides, 1.0)
    assert np.sum(sides) == pytest.approx(8.0)
    labels = part.point_labels()
    assert np.all(labels >= 0)
    masks = part.masks()
    assert np.array_equal(np.sum(masks, axis=0), np.ones(part.grid.npoints))
    # side comparable to rho at the center, both ways
    assert np.all(sides <= 2.0 * part.rho + 1e-12)
    assert np.all(sides >= part.rho / 2.0 - 1e-12)


def test_partition_quadratic_potential():
    part = build_partition(quadratic_potential())
    sides = part.sides()
    assert np.sum(sides) == pytest.approx(4.0)
    assert np.all(sides <= 2.0 * part.rho + 1e-12)
    assert np.all(sides >= part.rho / 2.0 - 1e-12)


def test_partition_overlap_constant():
    part = build_partition(constant_potential())
    # equal cubes in d=1: a doubled cube meets itself and both neighbors
    assert overlap_constant(part) == 3


def test_partition_resolution_guard():
    # quadratic potential over a wide box: rho at the edge drops below 4h
    g = Grid(1, 64, 4.0)
    V = Potential(sample_function(g, lambda x: x**2))
    with pytest.raises(ResourceGuardError):
        build_partition(V)
    part = build_partition(V, resolution_guard=False)
    assert np.sum(part.sides()) == pytest.approx(8.0)
