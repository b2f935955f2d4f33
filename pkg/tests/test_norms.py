import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from phaselab.grid import Field, Grid, lp_norm
from phaselab.norms import NormSpec, phase_norm, s_p, sobolev_norm

from conftest import make_frame, random_field


def _field(family, seed):
    frame = make_frame(family, "normalized")
    return frame.analyze(frame.project(random_field(frame.grid, seed)))


def test_norm_spec_validation():
    with pytest.raises(ValueError):
        NormSpec("not_a_family")
    with pytest.raises(ValueError):
        NormSpec("lp_x_l2_sigma", p=0.5)
    with pytest.raises(ValueError):
        NormSpec("lq_sigma_lp_x", q=0.0)


def test_hilbert_case_matches_mass():
    # p = q = 2, no weights: the mixed norm is the plain phase-space mass
    F = _field("littlewood_paley", 1)
    spec = NormSpec("lp_x_l2_sigma", p=2.0)
    assert phase_norm(F, spec) == pytest.approx(F.norm(), rel=1e-10)
    spec2 = NormSpec("lq_sigma_lp_x", p=2.0, q=2.0)
    assert phase_norm(F, spec2) == pytest.approx(F.norm(), rel=1e-10)


def test_modulation_hilbert_case():
    F = _field("modulation", 2)
    assert phase_norm(F, NormSpec("modulation", p=2.0, q=2.0)) == pytest.approx(
        F.norm(), rel=1e-10
    )


def test_cube_norm_hilbert_case():
    F = _field("critical", 3)
    assert phase_norm(F, NormSpec("cube_lplpl2", p=2.0)) == pytest.approx(
        F.norm(), rel=1e-10
    )


@pytest.mark.parametrize("spec", [
    NormSpec("lp_x_l2_sigma", p=1.5),
    NormSpec("lq_sigma_lp_x", p=1.5, q=3.0, alpha=0.2),
    NormSpec("tent", p=1.5),
])
@settings(max_examples=15, deadline=None)
@given(a=st.floats(min_value=-50.0, max_value=50.0, allow_nan=False),
       s1=st.integers(min_value=0, max_value=5),
       s2=st.integers(min_value=6, max_value=11))
def test_norm_axioms(spec, a, s1, s2):
    F = _field("littlewood_paley", s1)
    G = _field("littlewood_paley", s2)
    nF, nG = phase_norm(F, spec), phase_norm(G, spec)
    # absolute homogeneity
    assert phase_norm(F.scaled(a), spec) == pytest.approx(
        abs(a) * nF, rel=1e-9, abs=1e-12
    )
    # triangle inequality
    assert phase_norm(F + G, spec) <= nF + nG + 1e-9 * (nF + nG)


def test_modulation_weight_monotone_in_s():
    F = _field("modulation", 4)
    n0 = phase_norm(F, NormSpec("modulation", p=2.0, q=2.0, s=0.0))
    n1 = phase_norm(F, NormSpec("modulation", p=2.0, q=2.0, s=1.0))
    assert n1 > n0


def test_decoupling_norm_runs_on_directional():
    F = _field("directional", 5)
    val = phase_norm(F, NormSpec("decoupling", p=4.0, q=2.0, s=0.0))
    assert np.isfinite(val) and val > 0
    # only the directional family carries the angular index it needs
    with pytest.raises(ValueError):
        phase_norm(_field("littlewood_paley", 5), NormSpec("decoupling", p=4.0))


def test_local_tent_gaussian_norm_runs():
    F = _field("gauss", 6)
    val = phase_norm(F, NormSpec("local_tent_gaussian", p=1.5))
    assert np.isfinite(val) and val > 0


def test_sobolev_norm_reduces_to_lp():
    g = Grid(1, 128, 4.0)
    rng = np.random.default_rng(9)
    f = Field(g, rng.standard_normal(g.npoints) + 1j * rng.standard_normal(g.npoints))
    assert sobolev_norm(f, 0.0, 2.0) == pytest.approx(lp_norm(f, 2.0), rel=1e-10)
    # positive smoothness weights high frequencies up
    assert sobolev_norm(f, 1.0, 2.0) > sobolev_norm(f, 0.0, 2.0)


def test_parabolic_regularity_shift_values():
    assert s_p(2, 2.0) == 0.0
    assert s_p(2, 4.0) == pytest.approx(0.125)
    assert s_p(3, 1.0) == pytest.approx(0.5)
