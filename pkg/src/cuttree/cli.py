"""Command line experiment runner.

Subcommands: generate | destroy | verify | profile | gp-compare | report.
Every command resolves a configuration (defaults < config file < flags),
writes it next to its outputs, and derives all randomness from one master
seed, so reruns are byte-identical at any parallelism degree.
"""
from __future__ import annotations

import argparse
import sys
from dataclasses import fields, replace
from pathlib import Path

from .config import ExperimentConfig, load_config, load_thresholds
from .cut_tree import build_cut_tree
from .destruction import permutation_schedule, run_destruction, sample_schedule, schedule_from_order
from .families import make_family
from .figures import render_all
from .limit_laws import CHECKS, DEFAULT_THRESHOLDS
from .limits import model_for
from .profile_gf import build_gf_table, find_z0, mc_profile_grid, verify_bounds
from .reports import (
    write_csv,
    write_json,
    write_reports_csv,
    write_summary_json,
    write_trace_jumps,
    write_trace_vertices,
)
from .rng import stream
from .trees import RootedTree


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", type=str, help="flat key=value config file")
    p.add_argument("--family", type=str, help="urt|bst|bary|scale_free|merged|regular|cayley")
    p.add_argument("--alpha", type=float, help="scale_free attachment offset")
    p.add_argument("--b", type=int, help="bary branching factor")
    p.add_argument("--ds", type=str, help="merged branching factors, comma separated")
    p.add_argument("--m", type=float, help="merged height scale")
    p.add_argument("--d", type=int, help="regular branching factor")
    p.add_argument("--height", type=int, dest="h", help="regular tree height")
    p.add_argument("--n", type=str, help="tree sizes, comma separated")
    p.add_argument("--replicas", type=int)
    p.add_argument("--samples-per-tree", type=int, dest="samples_per_tree")
    p.add_argument("--pairs-per-tree", type=int, dest="pairs_per_tree")
    p.add_argument("--k", type=int, help="distance matrix sample size")
    p.add_argument("--j-max", type=int, dest="j_max", help="largest multi-isolation target count")
    p.add_argument("--seed", type=int)
    p.add_argument("--workers", type=int)
    p.add_argument("--out", type=str)
    p.add_argument("--threshold-file", type=str, dest="threshold_file")


def _resolve(args: argparse.Namespace) -> ExperimentConfig:
    cfg = ExperimentConfig()
    if getattr(args, "config", None):
        cfg = replace(cfg, **load_config(args.config))
    names = {f.name for f in fields(ExperimentConfig)}
    overrides = {}
    for key, val in vars(args).items():
        if val is None or key not in names:
            continue
        if key in ("n", "grid_n"):
            overrides[key] = tuple(int(float(s)) for s in str(val).split(","))
        elif key == "ds":
            overrides[key] = tuple(int(s) for s in str(val).split(","))
        elif key == "z":
            overrides[key] = tuple(float(s) for s in str(val).split(","))
        elif key == "checks":
            overrides[key] = tuple(s.strip() for s in str(val).split(",") if s.strip())
        else:
            overrides[key] = val
    cfg = replace(cfg, **overrides)
    if getattr(args, "threshold_file", None):
        cfg.thresholds.update(load_thresholds(args.threshold_file))
    cfg.validate()
    return cfg


def _outdir(cfg: ExperimentConfig) -> Path:
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    write_json(out / "config.json", cfg.to_dict())
    return out


def cmd_generate(args) -> int:
    cfg = _resolve(args)
    fam = make_family(cfg.family, **cfg.family_params())
    out = _outdir(cfg)
    for i in range(cfg.replicas):
        tree = fam.generate(cfg.n[0], stream(cfg.seed, i))
        tree.save(out / f"tree_{i:04d}.txt")
    print(f"wrote {cfg.replicas} trees to {out}")
    return 0


def cmd_destroy(args) -> int:
    cfg = _resolve(args)
    out = _outdir(cfg)
    if args.tree_file:
        tree = RootedTree.load(args.tree_file)
        rng = stream(cfg.seed, 0)
        if args.order_file:
            order = [int(x) for x in Path(args.order_file).read_text().split()]
            sched = schedule_from_order(tree, order)
        else:
            sched = permutation_schedule(tree, rng)
        _write_destruction(out, 0, tree, sched)
        print(f"wrote run 0 to {out}")
        return 0
    fam = make_family(cfg.family, **cfg.family_params())
    try:
        model = model_for(fam)
    except ValueError:
        model = None
    for i in range(cfg.replicas):
        rng = stream(cfg.seed, i)
        tree = fam.generate(cfg.n[0], rng)
        if model is not None:
            sched = sample_schedule(tree, model.ell(tree.n), rng)
        else:
            sched = permutation_schedule(tree, rng)
        _write_destruction(out, i, tree, sched)
    print(f"wrote {cfg.replicas} runs to {out}")
    return 0


def _write_destruction(out: Path, idx: int, tree, sched) -> None:
    trace = run_destruction(tree, sched)
    ct = build_cut_tree(tree, sched)
    write_trace_vertices(out / f"vertices_{idx:04d}.csv", trace)
    write_trace_jumps(out / f"jumps_{idx:04d}.csv", trace)
    (out / f"cut_tree_{idx:04d}.nwk").write_text(ct.to_newick() + "\n")


def cmd_verify(args) -> int:
    cfg = _resolve(args)
    if not cfg.checks:
        print("error: no checks selected (use --checks name1,name2)", file=sys.stderr)
        return 2
    unknown = [c for c in cfg.checks if c not in CHECKS]
    if unknown:
        print(f"error: unknown checks {unknown}; available: {sorted(CHECKS)}", file=sys.stderr)
        return 2
    fam = make_family(cfg.family, **cfg.family_params())
    out = _outdir(cfg)
    reports = []
    for n in cfg.n:
        for name in cfg.checks:
            fn = CHECKS[name]
            threshold = cfg.thresholds.get(name, DEFAULT_THRESHOLDS.get(name))
            kwargs = {"workers": cfg.workers, "threshold": threshold}
            if name == "distance-matrix":
                rep = fn(fam, n, cfg.k, cfg.replicas, cfg.seed, **kwargs)
            elif name == "multi-isolation":
                rep = fn(fam, n, list(range(1, cfg.j_max + 1)), cfg.replicas, cfg.seed, **kwargs)
            elif name == "isolation-depth":
                rep = fn(fam, n, cfg.replicas, cfg.seed, samples_per_tree=cfg.samples_per_tree, **kwargs)
            elif name in ("distance-scaling", "inverse-distance"):
                rep = fn(fam, n, cfg.replicas, cfg.seed, pairs_per_tree=cfg.pairs_per_tree, **kwargs)
            else:
                rep = fn(fam, n, cfg.replicas, cfg.seed, **kwargs)
            reports.append(rep)
            flag = "PASS" if rep.passed else "FAIL"
            print(f"[{flag}] {rep.name:18s} family={rep.family} n={rep.n} "
                  f"{rep.statistic}={rep.value:.5f} thr={rep.threshold}")
    write_reports_csv(out / "reports.csv", reports)
    ok = write_summary_json(out / "summary.json", cfg.to_dict(), reports)
    print(f"summary: {'PASS' if ok else 'FAIL'} ({out / 'summary.json'})")
    return 0 if ok else 1


def cmd_profile(args) -> int:
    cfg = _resolve(args)
    out = _outdir(cfg)
    z0 = find_z0()
    bounds = verify_bounds(z0, cfg.n_max)
    print(f"z0 = {z0:.9f}; growth bounds hold up to n_max={cfg.n_max} "
          f"(worst ratio {bounds.value:.6f})")
    rows = []
    for z in cfg.z:
        table = build_gf_table(z, cfg.n_max)
        for i in sorted({1, 2, 3, cfg.n_max // 2, cfg.n_max, cfg.n_max + 1}):
            if not 1 <= i <= cfg.n_max + 1:
                continue
            for n in sorted({10, 100, cfg.n_max // 2, cfg.n_max}):
                if n < 1 or n > cfg.n_max or n <= i - 2:
                    continue
                rows.append((i, n, z, table.e_g(i, n), table.e_gz(i, n) if i <= n + 1 else "",
                             table.e_z(i, n) if i <= n + 1 else ""))
    write_csv(out / "gf_table.csv", ["i", "n", "z", "E_G", "E_GZ", "E_Z"], rows)
    mc_rows = []
    worst_dev = 0.0
    if not args.skip_mc:
        for n in cfg.grid_n:
            srcs = sorted({1, max(n // 2, 1), n})
            means, ses = mc_profile_grid(n, srcs, cfg.z, cfg.mc_replicas, cfg.seed)
            for si, i in enumerate(srcs):
                for zi, z in enumerate(cfg.z):
                    exact = build_gf_table(z, n).e_g(i, n)
                    dev = abs(means[si, zi] - exact) / max(ses[si, zi], 1e-300)
                    worst_dev = max(worst_dev, dev)
                    mc_rows.append((i, n, z, exact, means[si, zi], ses[si, zi], dev))
        write_csv(out / "dp_vs_mc.csv", ["i", "n", "z", "exact", "mc_mean", "mc_se", "dev_in_se"], mc_rows)
        print(f"DP vs MC: worst deviation {worst_dev:.2f} standard errors "
              f"over {len(mc_rows)} grid points")
    ok = bounds.passed and (args.skip_mc or worst_dev <= 3.0)
    write_json(out / "summary.json", {
        "config": cfg.to_dict(),
        "z0": z0,
        "bounds": bounds.to_dict(),
        "dp_vs_mc_worst_se": worst_dev,
        "pass": bool(ok),
    })
    return 0 if ok else 1


def cmd_gp_compare(args) -> int:
    cfg = _resolve(args)
    fam = make_family(cfg.family, **cfg.family_params())
    out = _outdir(cfg)
    reports = []
    for n in cfg.n:
        rep = CHECKS["distance-matrix"](fam, n, cfg.k, cfg.replicas, cfg.seed,
                                        workers=cfg.workers,
                                        threshold=cfg.thresholds.get("distance-matrix"))
        reports.append(rep)
        print(f"n={rep.n}: energy={rep.value:.5f} ks_root={rep.details['ks_root_row']:.4f}")
    write_reports_csv(out / "reports.csv", reports)
    ok = write_summary_json(out / "summary.json", cfg.to_dict(), reports)
    return 0 if ok else 1


def cmd_report(args) -> int:
    results = Path(args.results)
    if not results.exists():
        print(f"error: no such results directory {results}", file=sys.stderr)
        return 2
    written = render_all(results, args.out)
    for p in written:
        print(f"wrote {p}")
    if not written:
        print("no renderable outputs found", file=sys.stderr)
        return 1
    return 0


def main(argv=None) -> int:
    top = argparse.ArgumentParser(prog="cuttree", description=__doc__)
    sub = top.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="write serialized random trees")
    _add_common(p)
    p.set_defaults(fn=cmd_generate)

    p = sub.add_parser("destroy", help="run destructions; write traces and cut-trees")
    _add_common(p)
    p.add_argument("--tree-file", type=str, help="run on a serialized tree instead of a family")
    p.add_argument("--order-file", type=str, help="explicit cut order (child vertices)")
    p.set_defaults(fn=cmd_destroy)

    p = sub.add_parser("verify", help="run limit-law checks; write reports")
    _add_common(p)
    p.add_argument("--checks", type=str, help=f"comma list from {sorted(CHECKS)}")
    p.set_defaults(fn=cmd_verify)

    p = sub.add_parser("profile", help="exact profile tables, z0, bounds, MC cross-check")
    _add_common(p)
    p.add_argument("--n-max", type=int, dest="n_max")
    p.add_argument("--z", type=str, help="evaluation points, comma separated")
    p.add_argument("--grid-n", type=str, dest="grid_n", help="MC cross-check sizes")
    p.add_argument("--mc-replicas", type=int, dest="mc_replicas")
    p.add_argument("--skip-mc", action="store_true", help="skip the Monte Carlo cross-check")
    p.set_defaults(fn=cmd_profile)

    p = sub.add_parser("gp-compare", help="distance-matrix comparison across sizes")
    _add_common(p)
    p.set_defaults(fn=cmd_gp_compare)

    p = sub.add_parser("report", help="render figures from a results directory")
    p.add_argument("--results", type=str, required=True)
    p.add_argument("--out", type=str, default=None)
    p.set_defaults(fn=cmd_report)

    args = top.parse_args(argv)
    try:
        return args.fn(args)
    except (ValueError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
