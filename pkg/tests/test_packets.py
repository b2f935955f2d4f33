import numpy as np
import pytest

from phaselab.grid import Grid
from phaselab.packets import ModulationFrame, DirectionalFrame
from phaselab.verify import reconstruction_error, weighted_l2

from conftest import FAMILIES, make_frame, random_field, sigma_grid, window


def _probe(frame, seed):
    return frame.project(random_field(frame.grid, seed))


@pytest.mark.parametrize("family", FAMILIES)
def test_reconstruction_normalized_mode(family):
    frame = make_frame(family, "normalized")
    for seed in range(3):
        assert reconstruction_error(frame, random_field(frame.grid, seed)) < 1e-8


@pytest.mark.parametrize("family", FAMILIES)
def test_reconstruction_raw_mode(family):
    frame = make_frame(family, "raw")
    for seed in range(3):
        assert reconstruction_error(frame, random_field(frame.grid, seed)) < 1e-4


@pytest.mark.parametrize("family", FAMILIES)
def test_isometry_normalized_mode(family):
    frame = make_frame(family, "normalized")
    f = _probe(frame, 11)
    mass = weighted_l2(f.values, frame.point_weights) ** 2
    assert frame.analyze(f).squared_mass() == pytest.approx(mass, rel=1e-8)


@pytest.mark.parametrize("family", FAMILIES)
def test_analysis_synthesis_adjoint(family):
    # <W f, F> = <f, W* F> for random admissible F
    frame = make_frame(family, "normalized")
    f = _probe(frame, 21)
    F = frame.random_phase_field(np.random.default_rng(22))
    lhs = frame.analyze(f).inner(F)
    g = frame.synthesize(F)
    rhs = complex(np.sum(frame.point_weights * f.values * np.conj(g.values)))
    scale = max(abs(lhs), abs(rhs), 1e-30)
    assert abs(lhs - rhs) / scale < 1e-10


@pytest.mark.parametrize("family", FAMILIES)
def test_projection_idempotent(family):
    frame = make_frame(family, "normalized")
    f = random_field(frame.grid, 31)
    p1 = frame.project(f)
    p2 = frame.project(p1)
    den = max(weighted_l2(p1.values, frame.point_weights), 1e-30)
    assert weighted_l2(p2.values - p1.values, frame.point_weights) / den < 1e-10


@pytest.mark.parametrize("family", FAMILIES)
def test_random_phase_field_deterministic(family):
    frame = make_frame(family, "normalized")
    F1 = frame.random_phase_field(np.random.default_rng(7))
    F2 = frame.random_phase_field(np.random.default_rng(7))
    for a, b in zip(F1.channels, F2.channels):
        assert np.array_equal(a.values, b.values)


def test_littlewood_paley_has_completion_channel():
    frame = make_frame("littlewood_paley", "normalized")
    F = frame.analyze(_probe(frame, 1))
    variants = {ch.index.variant for ch in F.channels}
    assert "completion" in variants


def test_gauss_remainder_positive_semidefinite():
    frame = make_frame("gauss", "normalized")
    assert frame.remainder_min_eig >= -1e-10


def test_critical_remainders_positive_and_local():
    frame = make_frame("critical", "normalized")
    for R in frame.remainders:
        assert R.min_eig_ratio >= -1e-10
        # exactly localized: acting on data supported off the cube gives 0
        probe = np.where(R.mask, 0.0, 1.0).astype(complex)
        assert np.max(np.abs(R.apply(probe))) == 0.0


def test_critical_channel_structure():
    frame = make_frame("critical", "normalized")
    F = frame.analyze(_probe(frame, 3))
    ncubes = len(frame.partition.cubes)
    mains = [ch for ch in F.channels if ch.index.variant == "cube"]
    rems = [ch for ch in F.channels if ch.index.variant == "cube_remainder"]
    assert len(mains) == ncubes and len(rems) == ncubes
    # slots with sigma above the cube's critical radius carry no data
    for j, ch in enumerate(mains):
        off = frame.sigma_grid.nodes > frame.rho[j]
        assert np.max(np.abs(ch.values[:, off]), initial=0.0) == 0.0


def test_modulation_lattice_coverage_guard():
    # a sparse frequency sublattice with narrow bumps cannot resolve the
    # identity and must be rejected in normalized mode
    with pytest.raises(ValueError):
        ModulationFrame(Grid(1, 256, 8.0), 64, "normalized", radius_factor=0.45)


def test_directional_rejects_undersampled_angles():
    with pytest.raises(ValueError):
        DirectionalFrame(Grid(2, 64, 2.0 * np.pi), window("compact_bump"),
                         sigma_grid("directional"), 4, "normalized")


def test_phase_space_field_arithmetic():
    frame = make_frame("littlewood_paley", "normalized")
    F = frame.analyze(_probe(frame, 41))
    G = F + F.scaled(-1.0)
    assert G.squared_mass() == pytest.approx(0.0, abs=1e-20)
    assert (F - F).norm() == 0.0
    assert F.scaled(2.0).norm() == pytest.approx(2.0 * F.norm(), rel=1e-12)
