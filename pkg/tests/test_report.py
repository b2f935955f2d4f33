import json

import numpy as np

from phaselab.report import config_hash, render_figure, write_report, write_table
from phaselab.verify import Ensemble, SweepReport, square_function_check

from conftest import decomp, sigma_grid, window


def test_config_hash_stable_and_sensitive():
    a = config_hash({"x": 1, "y": [2.0, 3.0]})
    assert a == config_hash({"y": [2.0, 3.0], "x": 1})
    assert a != config_hash({"x": 2, "y": [2.0, 3.0]})
    assert len(a) == 8


def _report():
    return square_function_check(
        decomp("laplacian"), window("compact_bump"), sigma_grid("main"), 2.0,
        Ensemble(5, 4, "band_limited"),
    )


def test_write_report_emits_csv_json_png(tmp_path):
    paths = write_report(tmp_path, _report())
    assert set(paths) == {"csv", "json", "figure"}
    payload = json.loads(open(paths["json"]).read())
    assert payload["schema"] == 1
    assert payload["label"] == "square_function"
    assert "seed" in payload["config"]
    # seed appears in every artifact file name
    assert "seed5" in paths["csv"]


def _strip_timestamp(csv_path, json_path):
    csv_lines = [
        l for l in open(csv_path).read().splitlines()
        if not l.startswith("# generated")
    ]
    payload = json.loads(open(json_path).read())
    payload.pop("generated")
    return csv_lines, payload


def test_report_regenerates_identically(tmp_path):
    p1 = write_report(tmp_path / "a", _report())
    p2 = write_report(tmp_path / "b", _report())
    c1, j1 = _strip_timestamp(p1["csv"], p1["json"])
    c2, j2 = _strip_timestamp(p2["csv"], p2["json"])
    assert c1 == c2
    assert j1 == j2


def test_csv_roundtrip_full_precision(tmp_path):
    table = {"x": [1, 2], "val": [0.1 + 0.2, 1e-17]}
    write_table(tmp_path / "t.csv", table, {"k": 1})
    rows = [
        l.split(",") for l in open(tmp_path / "t.csv").read().splitlines()
        if l and not l.startswith("#")
    ][1:]
    assert [float(r[1]) for r in rows] == table["val"]


def test_render_figure_skips_unknown_label(tmp_path):
    rep = SweepReport("unclassified", {}, table={"a": ["x"], "b": ["y"]})
    out = tmp_path / "fig.png"
    assert render_figure(rep, out) is False
    assert not out.exists()


def test_render_figure_known_labels(tmp_path):
    rep = SweepReport("critical_radius", {},
                      table={"x": [0.0, 1.0], "rho": [0.7, 0.6]})
    out = tmp_path / "fig.png"
    assert render_figure(rep, out) is True
    assert out.stat().st_size > 0
