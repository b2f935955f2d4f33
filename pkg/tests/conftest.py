"""Shared fixtures: cached windows, operators, and frames.

Frames are built through module-level caches so both the unit tests and
the acceptance run reuse the same (deterministic) objects.
"""

from functools import lru_cache

import numpy as np
import pytest

from phaselab.critical import Potential, build_partition
from phaselab.grid import Field, Grid, sample_function
from phaselab.packets import (
    CriticalFrame,
    DirectionalFrame,
    GaussHermiteFrame,
    LittlewoodPaleyFrame,
    ModulationFrame,
    OperatorFrame,
)
from phaselab.spectral import OperatorSpec, SigmaGrid, eigendecompose, make_window


@lru_cache(maxsize=None)
def window(variant: str):
    if variant == "compact_bump":
        return make_window("compact_bump", a=1.0, b=8.0)
    if variant == "cosine_bump":
        return make_window("cosine_bump", a=0.25, b=1.5)
    if variant == "gaussian_poly":
        return make_window("gaussian_poly", N=2, a_g=1.0, alpha=4.0)
    raise ValueError(variant)


@lru_cache(maxsize=None)
def sigma_grid(which: str) -> SigmaGrid:
    return {
        "main": SigmaGrid(0.02, 2.0, 48),
        "gauss": SigmaGrid(1e-2, 10.0, 48),
        "directional": SigmaGrid(1e-3, 0.999, 48),
    }[which]


@lru_cache(maxsize=None)
def decomp(kind: str):
    if kind == "laplacian":
        return eigendecompose(OperatorSpec("laplacian", grid=Grid(1, 256, 8.0)))
    if kind == "schrodinger_const":
        g = Grid(1, 64, 4.0)
        V = sample_function(g, lambda x: np.ones_like(x))
        return eigendecompose(OperatorSpec("schrodinger", grid=g, potential=V))
    if kind == "schrodinger_quadratic":
        g = Grid(1, 128, 8.0)
        V = sample_function(g, lambda x: x**2)
        return eigendecompose(OperatorSpec("schrodinger", grid=g, potential=V))
    if kind == "ornstein_uhlenbeck":
        return eigendecompose(
            OperatorSpec("ornstein_uhlenbeck", grid=Grid(1, 512, 8.0), modes=48)
        )
    raise ValueError(kind)


@lru_cache(maxsize=None)
def constant_potential() -> Potential:
    g = Grid(1, 64, 4.0)
    return Potential(sample_function(g, lambda x: np.ones_like(x)))


@lru_cache(maxsize=None)
def quadratic_potential() -> Potential:
    g = Grid(1, 64, 2.0)
    return Potential(sample_function(g, lambda x: x**2))


@lru_cache(maxsize=None)
def make_frame(family: str, mode: str):
    if family == "littlewood_paley":
        return LittlewoodPaleyFrame(
            Grid(1, 256, 4.0), window("compact_bump"), sigma_grid("main"), mode
        )
    if family == "modulation":
        return ModulationFrame(Grid(1, 256, 8.0), 4, mode)
    if family == "directional":
        return DirectionalFrame(
            Grid(2, 64, 2.0 * np.pi), window("compact_bump"),
            sigma_grid("directional"), 16, mode,
        )
    if family == "operator":
        return OperatorFrame(
            decomp("schrodinger_const"), window("compact_bump"),
            sigma_grid("main"), mode,
        )
    if family == "gauss":
        return GaussHermiteFrame(
            decomp("ornstein_uhlenbeck"), window("gaussian_poly"),
            sigma_grid("gauss"), mode,
        )
    if family == "critical":
        part = build_partition(constant_potential())
        return CriticalFrame(
            decomp("schrodinger_const"), window("cosine_bump"),
            sigma_grid("main"), part, mode,
        )
    raise ValueError(family)


FAMILIES = ["littlewood_paley", "modulation", "directional", "operator",
            "gauss", "critical"]


def random_field(grid: Grid, seed: int, band=(0.1, 0.75)) -> Field:
    """Band-limited complex Gaussian probe, reproducible from the seed."""
    from phaselab.verify import Ensemble

    return Ensemble(seed, 1, "band_limited", band).field(grid, 0)


@pytest.fixture(params=FAMILIES)
def family(request):
    return request.param
