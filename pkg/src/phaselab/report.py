"""Report emission: CSV tables, JSON summaries, and matplotlib figures.

Every artifact embeds the resolved run configuration and a short hash of
it; file names carry the ensemble seed (when one exists) and that hash,
so a report is traceable to exactly one (seed, config) pair.  The only
non-reproducible bytes are the timestamp, which is isolated in a single
comment line of the CSV and a single JSON field.
"""

from __future__ import annotations

import csv
import hashlib
import json
from datetime import datetime, timezone
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from .verify import SweepReport

__all__ = ["config_hash", "write_report", "write_table", "render_figure"]

SCHEMA_VERSION = 1


def config_hash(config: dict) -> str:
    """Short stable digest of a resolved configuration."""
    blob = json.dumps(config, sort_keys=True, default=str).encode()
    return hashlib.sha256(blob).hexdigest()[:8]


def _stem(rep: SweepReport) -> str:
    seed = rep.config.get("seed")
    tag = config_hash(rep.config)
    return f"{rep.label}_seed{seed}_{tag}" if seed is not None else f"{rep.label}_{tag}"


def _timestamp() -> str:
    return datetime.now(timezone.utc).isoformat()


def write_table(path: Path, table: dict, config: dict):
    """CSV with one timestamp comment line and a config-echo comment line."""
    cols = list(table.keys())
    rows = zip(*[table[c] for c in cols]) if cols else []
    with open(path, "w", newline="") as fh:
        fh.write(f"# generated {_timestamp()}\n")
        fh.write(f"# schema {SCHEMA_VERSION} config {json.dumps(config, sort_keys=True, default=str)}\n")
        writer = csv.writer(fh)
        writer.writerow(cols)
        for row in rows:
            writer.writerow(
                [repr(float(v)) if isinstance(v, float) else v for v in row]
            )


def write_report(outdir, rep: SweepReport) -> dict:
    """Emit CSV + JSON (+ figure) for one report; returns artifact paths."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    stem = _stem(rep)
    csv_path = outdir / f"{stem}.csv"
    json_path = outdir / f"{stem}.json"
    write_table(csv_path, rep.table, rep.config)
    payload = {
        "schema": SCHEMA_VERSION,
        "label": rep.label,
        "config": rep.config,
        "summary": rep.summary,
        "passed": rep.passed,
        "generated": _timestamp(),
    }
    with open(json_path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True, default=str)
        fh.write("\n")
    paths = {"csv": str(csv_path), "json": str(json_path)}
    fig_path = outdir / f"{stem}.png"
    if render_figure(rep, fig_path):
        paths["figure"] = str(fig_path)
    return paths


def render_figure(rep: SweepReport, path) -> bool:
    """Per-label plot of the report's table; returns False when there is
    nothing sensible to draw."""
    T = rep.table
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    drawn = True
    if rep.label in ("projection_bound", "square_function", "remainder_lowerbound"):
        ax.plot(T["trial"], T["ratio"], "o", ms=3)
        ax.set_xlabel("trial")
        ax.set_ylabel("ratio")
        for key in ("max_ratio", "median_ratio", "min_ratio"):
            if key in rep.summary:
                ax.axhline(rep.summary[key], ls="--", lw=0.8, color="gray")
    elif rep.label == "finite_speed":
        beyond = np.asarray(T["beyond_cutoff"])
        bn = np.asarray(T["block_norm"]) / np.maximum(np.asarray(T["op_norm"]), 1e-300)
        excess = np.asarray(T["dist"]) - np.asarray(T["cutoff"])
        ax.semilogy(excess[~beyond], np.maximum(bn[~beyond], 1e-18), ".",
                    label="inside cone")
        ax.semilogy(excess[beyond], np.maximum(bn[beyond], 1e-18), ".",
                    label="beyond cone")
        ax.axhline(1e-6, color="red", lw=0.8)
        ax.set_xlabel("dist - speed*sigma")
        ax.set_ylabel("relative block norm")
        ax.legend()
    elif rep.label == "offdiag_decay":
        ax.semilogy(T["x"], T["ratio"], "o-")
        ax.set_xlabel("d(E,F)^2 / sigma")
        ax.set_ylabel("block norm")
        if "c_fit" in rep.summary:
            x = np.asarray(T["x"], dtype=float)
            r = np.asarray(T["ratio"], dtype=float)
            live = r > 1e-13
            if np.any(live):
                c = rep.summary["c_fit"]
                x0, r0 = x[live][0], r[live][0]
                ax.semilogy(x, r0 * np.exp(-c * (x - x0)), "--",
                            label=f"fit c={c:.3f}")
                ax.legend()
    elif rep.label == "kernel_envelope":
        for centers, g_hat in getattr(rep, "profiles", []):
            live = g_hat > 0
            ax.semilogy(centers[live], g_hat[live], "-")
        ax.set_xlabel("|x-y| / sigma")
        ax.set_ylabel("sigma^d |K|")
    elif rep.label == "propagator_invariance":
        ax.plot(T["k"], T["norm_ratio"], "o-", label="phase-space norm")
        ax.plot(T["k"], T["l1_chirp_ratio"], "s-", label="L1 on chirps")
        ax.set_xlabel("frequency k")
        ax.set_ylabel("propagated / initial norm")
        ax.set_xscale("log", base=2)
        ax.legend()
    elif rep.label == "embedding":
        ax.plot(T["k"], T["ratio"], "o-")
        ax.set_xlabel("frequency k")
        ax.set_ylabel("left / right norm")
    elif rep.label == "theorem_sweep":
        ns = sorted(set(T["n"]))
        ycol = "norm_estimate" if "norm_estimate" in T else "max_ratio"
        for key in sorted(set(zip(T["potential"], T["p"]))):
            xs, ys = [], []
            for i in range(len(T["n"])):
                if (T["potential"][i], T["p"][i]) == key:
                    xs.append(T["n"][i])
                    ys.append(T[ycol][i])
            order = np.argsort(xs)
            ax.plot(np.asarray(xs)[order], np.asarray(ys)[order], "o-",
                    label=f"V={key[0]}, p={key[1]}")
        ax.set_xlabel("grid points n")
        ax.set_ylabel("max ratio")
        ax.set_xticks(ns)
        ax.legend()
    elif rep.label == "critical_radius":
        ax.plot(T["x"], T["rho"], "-")
        ax.set_xlabel("x")
        ax.set_ylabel("critical radius")
    elif rep.label == "partition":
        centers = np.asarray(T["center_0"])
        sides = np.asarray(T["side"])
        ax.bar(centers, sides, width=sides, alpha=0.5, edgecolor="k")
        ax.plot(centers, T["rho"], "r.", label="rho at center")
        ax.set_xlabel("cube center")
        ax.set_ylabel("side / rho")
        ax.legend()
    elif rep.label in ("decompose", "reconstruction", "norm"):
        numeric = [
            c for c in T
            if T[c] and isinstance(T[c][0], (int, float, np.floating))
        ]
        if len(numeric) >= 2:
            ax.plot(T[numeric[0]], T[numeric[1]], "o-")
            ax.set_xlabel(numeric[0])
            ax.set_ylabel(numeric[1])
        else:
            drawn = False
    else:
        drawn = False
    if drawn:
        ax.set_title(rep.label.replace("_", " "))
        fig.tight_layout()
        fig.savefig(path, dpi=120)
    plt.close(fig)
    return drawn
