"""Figure rendering for the report path.

Every figure is drawn from the delimited outputs the commands already
write (reports.csv, vertices_*.csv, jumps_*.csv, dp_vs_mc.csv, ...), so
plots can always be regenerated from the persisted data alone.
"""
from __future__ import annotations

import csv
import json
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .families import make_family
from .limits import model_for

STYLE = {
    "figure.figsize": (6.4, 4.2),
    "figure.dpi": 130,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "font.size": 9,
    "legend.fontsize": 8,
}


def _read_csv(path: Path) -> list[dict]:
    with path.open() as fh:
        return list(csv.DictReader(fh))


def _save(fig, out: Path) -> Path:
    out.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(out, bbox_inches="tight")
    plt.close(fig)
    return out


def _model_from_config(cfg: dict):
    try:
        params = {k: cfg[k] for k in ("alpha", "b", "ds", "m", "d", "h") if cfg.get(k) is not None}
        fam = make_family(cfg["family"], **params)
    except (ValueError, KeyError):
        return None, None
    try:
        return fam, model_for(fam)
    except ValueError:
        return fam, None


def fig_report_trends(reports_csv: Path, out: Path) -> Path | None:
    """Statistic value against n for every check, with its threshold."""
    rows = _read_csv(reports_csv)
    if not rows:
        return None
    names = sorted({r["name"] for r in rows})
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots()
        for name in names:
            sub = sorted((int(r["n"]), float(r["value"])) for r in rows if r["name"] == name)
            ns = [s[0] for s in sub]
            vals = [s[1] for s in sub]
            (line,) = ax.plot(ns, vals, "o-", label=name)
            thr = next((r["threshold"] for r in rows if r["name"] == name and r["threshold"]), "")
            if thr:
                ax.axhline(float(thr), color=line.get_color(), ls=":", lw=0.8)
        ax.set_xscale("log")
        ax.set_yscale("log")
        ax.set_xlabel("tree size n")
        ax.set_ylabel("statistic (dotted: thresholds)")
        ax.set_title("verification statistics vs tree size")
        ax.legend()
        return _save(fig, out)


def fig_depth_law(vertices_csv: Path, cfg: dict, out: Path) -> Path | None:
    """Empirical CDF of rescaled isolation counts vs the model law."""
    rows = _read_csv(vertices_csv)
    if not rows:
        return None
    fam, model = _model_from_config(cfg)
    depth = np.sort(np.array([float(r["depth"]) for r in rows]))
    n = len(rows)
    scale = model.ell(n) / n if model is not None else np.log(n) / n
    x = depth * scale
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots()
        ax.step(x, np.arange(1, n + 1) / n, where="post", label="empirical (one run)")
        if model is not None:
            grid = np.linspace(0, model.x_max, 512)
            ax.plot(grid, model.depth_cdf(grid), "k--", label="limit law")
        ax.set_xlabel("rescaled cuts to isolate a vertex")
        ax.set_ylabel("CDF")
        ax.set_title(f"isolation-count law, {cfg.get('family', '?')} n={n}")
        ax.legend()
        return _save(fig, out)


def fig_destruction_processes(jumps_csv: Path, cfg: dict, out: Path) -> Path | None:
    """Root component size and root cut count vs time, with model curves."""
    rows = _read_csv(jumps_csv)
    if not rows:
        return None
    t = np.array([float(r["time"]) for r in rows])
    x = np.array([float(r["X"]) for r in rows])
    rr = np.array([float(r["R"]) for r in rows])
    n = x.max()
    fam, model = _model_from_config(cfg)
    with plt.rc_context(STYLE):
        fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9.2, 3.8))
        ax1.step(t, x / n, where="post", lw=0.9, label="X(t)/n")
        ax2.step(t, rr, where="post", lw=0.9, label="R(t)")
        if model is not None and np.isfinite(t).all():
            ell = model.ell(n)
            grid = np.linspace(0, t.max(), 512)
            ax1.plot(grid, model.laplace(grid), "k--", lw=1, label="model")
            ax2.plot(grid, model.laplace_integral(grid) * n / ell, "k--", lw=1, label="model")
        ax1.set_xlabel("time")
        ax1.set_ylabel("root component share")
        ax2.set_xlabel("time")
        ax2.set_ylabel("cuts in root component")
        ax1.legend()
        ax2.legend()
        fig.suptitle(f"destruction processes, {cfg.get('family', '?')} n={int(n)}")
        return _save(fig, out)


def fig_profile_dp_vs_mc(dp_mc_csv: Path, out: Path) -> Path | None:
    """Exact DP values against simulation, with three-standard-error bars."""
    rows = _read_csv(dp_mc_csv)
    if not rows:
        return None
    exact = np.array([float(r["exact"]) for r in rows])
    mc = np.array([float(r["mc_mean"]) for r in rows])
    se = np.array([float(r["mc_se"]) for r in rows])
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots()
        ax.errorbar(exact, mc, yerr=3 * se, fmt="o", ms=4, capsize=3, label="MC +/- 3 s.e.")
        lim = [0, max(exact.max(), mc.max()) * 1.05]
        ax.plot(lim, lim, "k--", lw=0.8, label="y = x")
        ax.set_xlabel("exact expectation (dynamic program)")
        ax.set_ylabel("Monte Carlo mean")
        ax.set_title("profile generating function: exact vs simulated")
        ax.legend()
        return _save(fig, out)


def fig_profile_growth(table_csv: Path, out: Path) -> Path | None:
    """Expected profile value vs n for the tabulated source vertices."""
    rows = _read_csv(table_csv)
    if not rows:
        return None
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots()
        keys = sorted({(int(r["i"]), float(r["z"])) for r in rows})
        for i, z in keys:
            sub = sorted((int(r["n"]), float(r["E_G"])) for r in rows if int(r["i"]) == i and float(r["z"]) == z)
            ax.plot([s[0] for s in sub], [s[1] for s in sub], label=f"i={i}, z={z:g}")
        ax.set_xscale("log")
        ax.set_yscale("log")
        ax.set_xlabel("edges n")
        ax.set_ylabel("expected profile sum")
        ax.set_title("profile growth")
        ax.legend()
        return _save(fig, out)


def render_all(results_dir: str | Path, out_dir: str | Path | None = None) -> list[Path]:
    """Render every figure the delimited outputs in results_dir support."""
    results = Path(results_dir)
    out = Path(out_dir) if out_dir is not None else results / "figures"
    cfg = {}
    cfg_path = results / "config.json"
    if cfg_path.exists():
        cfg = json.loads(cfg_path.read_text())
        cfg = cfg.get("config", cfg)
    written: list[Path] = []

    def _add(p: Path | None):
        if p is not None:
            written.append(p)

    if (results / "reports.csv").exists():
        _add(fig_report_trends(results / "reports.csv", out / "report_trends.png"))
    for vcsv in sorted(results.glob("vertices_*.csv"))[:1]:
        _add(fig_depth_law(vcsv, cfg, out / "depth_law.png"))
    for jcsv in sorted(results.glob("jumps_*.csv"))[:1]:
        _add(fig_destruction_processes(jcsv, cfg, out / "destruction_processes.png"))
    if (results / "dp_vs_mc.csv").exists():
        _add(fig_profile_dp_vs_mc(results / "dp_vs_mc.csv", out / "profile_dp_vs_mc.png"))
    if (results / "gf_table.csv").exists():
        _add(fig_profile_growth(results / "gf_table.csv", out / "profile_growth.png"))
    return written
