import numpy as np
import pytest

from phaselab.grid import Grid
from phaselab.norms import NormSpec
from phaselab.verify import (
    Ensemble,
    finite_speed_check,
    offdiag_decay_check,
    projection_bound_estimate,
    proof_split,
    reconstruction_error,
    remainder_lowerbound_probe,
    square_function_check,
)

from conftest import decomp, make_frame, sigma_grid, window


def test_ensemble_trials_are_reproducible():
    g = Grid(1, 64, 4.0)
    e = Ensemble(3, 5, "band_limited")
    a = e.field(g, 2).values
    b = Ensemble(3, 5, "band_limited").field(g, 2).values
    assert np.array_equal(a, b)
    # distinct trials differ
    assert not np.array_equal(a, e.field(g, 3).values)


def test_ensemble_shapings():
    g = Grid(1, 64, 4.0)
    for shaping in ("white", "band_limited", "cube_localized"):
        f = Ensemble(1, 1, shaping).field(g, 0)
        assert np.any(f.values != 0)
    with pytest.raises(ValueError):
        Ensemble(1, 1, "bogus").field(g, 0)


def test_reconstruction_error_rejects_empty_probe():
    frame = make_frame("gauss", "normalized")
    with pytest.raises(ValueError):
        reconstruction_error(frame, frame._zero_field())


@pytest.mark.parametrize("family", ["littlewood_paley", "critical", "gauss"])
def test_projection_bound_at_p2(family):
    frame = make_frame(family, "normalized")
    spec = NormSpec("lp_x_l2_sigma", p=2.0)
    rep = projection_bound_estimate(frame, spec, Ensemble(1, 5), ascent_steps=3)
    assert rep.summary["max_ratio"] <= 1.0 + 1e-8
    assert rep.summary["ascent_ratio"] <= 1.0 + 1e-8
    assert rep.config["estimate_kind"] == "lower estimate"


def test_proof_split_sums_exactly():
    frame = make_frame("critical", "normalized")
    F = Ensemble(2, 1, "band_limited").phase_field(frame, 0)
    (G, H1, H2, H3), norms = proof_split(frame, F, p=1.5)
    assert norms["sum_residual"] < 1e-10
    assert all(np.isfinite(norms[k]) for k in ("G", "H1", "H2", "H3", "WWstarF"))


def test_finite_speed_no_margin_violations():
    frame = make_frame("critical", "normalized")
    rep = finite_speed_check(frame)
    assert rep.passed
    assert rep.summary["violations"] == 0


def test_offdiag_decay_requires_disjoint_sets():
    d = decomp("laplacian")
    mask = np.zeros(d.grid.npoints, dtype=bool)
    mask[:10] = True
    with pytest.raises(ValueError):
        offdiag_decay_check(d, mask, mask, [1.0])


def test_square_function_two_sided():
    rep = square_function_check(
        decomp("laplacian"), window("compact_bump"), sigma_grid("main"), 1.5,
        Ensemble(1, 10, "band_limited"),
    )
    assert rep.summary["spread"] < 3.0


def test_remainder_lowerbound_probe_reports():
    frame = make_frame("critical", "normalized")
    rep = remainder_lowerbound_probe(frame, Ensemble(1, 3))
    assert "min_ratio" in rep.summary and "count_below_one" in rep.summary
    assert np.isfinite(rep.summary["min_ratio"])
