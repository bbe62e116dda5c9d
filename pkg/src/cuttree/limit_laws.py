"""Monte Carlo verification of the scaling limits.

Each check simulates independent replicas (one tree + one destruction per
replica, a bounded number of vertex samples per tree so that within-tree
dependence does not dominate), pools the rescaled observables, and
compares them with the family's limit package.

Convergence in this regime is logarithmic in n, so absolute thresholds at
desk scale are calibration choices; every check also reports the raw
values so trends across n can be judged directly.
"""
from __future__ import annotations

import numpy as np

from .cut_tree import build_cut_tree
from .destruction import (
    multi_isolation_profile,
    permutation_schedule,
    run_destruction,
    sample_schedule,
)
from .families import Family, merged_heights, merged_m_for_size
from .limits import model_for
from .rng import stream
from .runner import map_replicas
from .stats import (
    EmpiricalSample,
    TestReport,
    energy_distance,
    ks_statistic,
    ks_two_sample,
    max_cdf,
    order_statistic_cdf,
)

DEFAULT_THRESHOLDS = {
    "distance-scaling": 0.05,
    "inverse-distance": 0.05,
    "root-cluster": 0.05,
    "root-cuts": 0.05,
    "disconnect-times": 0.02,
    "isolation-depth": 0.05,
    "distance-matrix": 0.05,
    "multi-isolation": 0.05,
}


def _sample_distinct(rng: np.random.Generator, n: int, k: int) -> np.ndarray:
    """k distinct uniform vertices (resample on collision; k << n)."""
    if k > n:
        raise ValueError("more targets than vertices")
    while True:
        cand = rng.integers(1, n + 1, size=k)
        if len(set(cand.tolist())) == k:
            return cand.astype(np.int64)


# ----------------------------------------------------------------------
# per-replica workers (module level so process pools can pickle them)
# ----------------------------------------------------------------------

def _w_distance_scaling(idx, fam, n, seed, pairs):
    rng = stream(seed, idx)
    tree = fam.generate(n, rng)
    depths = tree.depths()
    u = rng.integers(1, tree.n + 1, size=pairs)
    v = rng.integers(1, tree.n + 1, size=pairs)
    d1u = depths[u].astype(float)
    duv = np.empty(pairs)
    danc = np.empty(pairs)
    for i in range(pairs):
        d, meet = tree.distance_and_meet(int(u[i]), int(v[i]), depths)
        duv[i] = d
        danc[i] = depths[meet]
    return tree.n, d1u, duv, danc


def check_distance_scaling(
    fam: Family, n: int, replicas: int, seed: int, *,
    pairs_per_tree: int = 10, workers: int = 1, threshold: float | None = None,
) -> TestReport:
    """Reduced path lengths: d(1,u)/ell and d(u,v)/ell against the laws of
    one and two independent path-length atoms; the rescaled meet depth
    d(1, u^v)/ell should vanish."""
    model = model_for(fam)
    rows = map_replicas(_w_distance_scaling, replicas, workers, (fam, n, seed, pairs_per_tree))
    n_used = rows[0][0]
    ell = model.ell(n_used)
    d1u = np.concatenate([r[1] for r in rows]) / ell
    duv = np.concatenate([r[2] for r in rows]) / ell
    danc = np.concatenate([r[3] for r in rows]) / ell
    zm = model.zeta_mean()
    err = max(abs(d1u.mean() - zm), abs(duv.mean() - 2 * zm))
    atoms = model.zeta_atoms
    nearest = np.argmin(np.abs(d1u[:, None] - atoms[None, :]), axis=1)
    masses = np.bincount(nearest, minlength=atoms.size) / d1u.size
    # exact KS against the atomic marginals, reported for trend-watching
    zcdf = lambda x: (np.asarray(x)[..., None] >= atoms).astype(float) @ model.zeta_weights
    pair_atoms = np.add.outer(atoms, atoms).ravel()
    pair_w = np.outer(model.zeta_weights, model.zeta_weights).ravel()
    z2cdf = lambda x: (np.asarray(x)[..., None] >= pair_atoms).astype(float) @ pair_w
    if threshold is None:
        threshold = DEFAULT_THRESHOLDS["distance-scaling"]
    return TestReport(
        name="distance-scaling", statistic="abs-error", value=float(err), threshold=threshold,
        family=fam.tag, n=int(n_used), replicas=replicas, seed=seed,
        reference="(d(1,u), d(u,v))/ell => (zeta1, zeta1+zeta2)", sample_size=d1u.size,
        details={
            "mean_root_distance": float(d1u.mean()),
            "mean_pair_distance": float(duv.mean()),
            "zeta_mean": zm,
            "median_meet_depth": float(np.median(danc)),
            "atom_masses": masses,
            "ks_root_distance": ks_statistic(d1u, zcdf),
            "ks_pair_distance": ks_statistic(duv, z2cdf),
        },
    )


def _w_inverse_distance(idx, fam, n, seed, pairs):
    rng = stream(seed, idx)
    tree = fam.generate(n, rng)
    depths = tree.depths()
    u = rng.integers(1, tree.n + 1, size=pairs)
    v = rng.integers(1, tree.n + 1, size=pairs)
    ell = model_for(fam).ell(tree.n)
    acc = 0.0
    for i in range(pairs):
        if u[i] != v[i]:
            acc += ell / tree.distance(int(u[i]), int(v[i]), depths)
    return tree.n, acc / pairs


def check_inverse_distance(
    fam: Family, n: int, replicas: int, seed: int, *,
    pairs_per_tree: int = 100, workers: int = 1, threshold: float | None = None,
) -> TestReport:
    """E[ell(n)/d(u,v); u != v] against E[1/(zeta1+zeta2)]."""
    model = model_for(fam)
    rows = map_replicas(_w_inverse_distance, replicas, workers, (fam, n, seed, pairs_per_tree))
    n_used = rows[0][0]
    est = float(np.mean([r[1] for r in rows]))
    target = model.inv_sum_mean()
    if threshold is None:
        threshold = DEFAULT_THRESHOLDS["inverse-distance"]
    return TestReport(
        name="inverse-distance", statistic="abs-error", value=abs(est - target),
        threshold=threshold, family=fam.tag, n=int(n_used), replicas=replicas, seed=seed,
        reference="E[ell/d(u,v)] -> E[1/(zeta1+zeta2)]",
        sample_size=replicas * pairs_per_tree,
        details={"estimate": est, "target": target},
    )


def _w_root_cluster(idx, fam, n, seed, grid_points):
    rng = stream(seed, idx)
    tree = fam.generate(n, rng)
    model = model_for(fam)
    sched = sample_schedule(tree, model.ell(tree.n), rng)
    trace = run_destruction(tree, sched)
    grid = np.linspace(0.0, trace.x_times[-1], grid_points) if trace.x_times.size else None
    return tree.n, trace.sup_x_deviation(model.laplace, grid)


def check_root_cluster(
    fam: Family, n: int, replicas: int, seed: int, *,
    workers: int = 1, threshold: float | None = None, grid_points: int = 1000,
) -> TestReport:
    """sup_s |X(s)/n - laplace(s)| per replica; the median should be small
    and shrink with n."""
    rows = map_replicas(_w_root_cluster, replicas, workers, (fam, n, seed, grid_points))
    sups = np.array([r[1] for r in rows])
    if threshold is None:
        threshold = DEFAULT_THRESHOLDS["root-cluster"]
    return TestReport(
        name="root-cluster", statistic="sup-norm", value=float(np.median(sups)),
        threshold=threshold, family=fam.tag, n=int(rows[0][0]), replicas=replicas, seed=seed,
        reference="sup_s |X(s)/n - laplace(s)| -> 0", sample_size=replicas,
        details={"median": float(np.median(sups)), "p90": float(np.quantile(sups, 0.9)),
                 "mean": float(sups.mean())},
    )


def _w_root_cuts(idx, fam, n, seed, grid_points):
    rng = stream(seed, idx)
    tree = fam.generate(n, rng)
    model = model_for(fam)
    ell = model.ell(tree.n)
    sched = sample_schedule(tree, ell, rng)
    trace = run_destruction(tree, sched)
    t_max = model.laplace_integral_inv(0.99 * model.x_max)
    grid = np.linspace(0.0, t_max, grid_points)
    return tree.n, trace.sup_r_deviation(model.laplace_integral, t_max, ell / tree.n, grid)


def check_root_cuts(
    fam: Family, n: int, replicas: int, seed: int, *,
    workers: int = 1, threshold: float | None = None, grid_points: int = 1000,
) -> TestReport:
    """sup_{s<=T} |(ell/n) R(s) - laplace_integral(s)| with T covering 99%
    of the limit mass."""
    rows = map_replicas(_w_root_cuts, replicas, workers, (fam, n, seed, grid_points))
    sups = np.array([r[1] for r in rows])
    if threshold is None:
        threshold = DEFAULT_THRESHOLDS["root-cuts"]
    return TestReport(
        name="root-cuts", statistic="sup-norm", value=float(np.median(sups)),
        threshold=threshold, family=fam.tag, n=int(rows[0][0]), replicas=replicas, seed=seed,
        reference="sup_{s<=T} |(ell/n) R(s) - laplace_integral(s)| -> 0", sample_size=replicas,
        details={"median": float(np.median(sups)), "p90": float(np.quantile(sups, 0.9)),
                 "mean": float(sups.mean())},
    )


def _w_disconnect(idx, fam, n, seed, samples, pairs):
    rng = stream(seed, idx)
    tree = fam.generate(n, rng)
    model = model_for(fam)
    sched = sample_schedule(tree, model.ell(tree.n), rng)
    gamma = run_destruction(tree, sched).disconnect_time
    u = rng.integers(1, tree.n + 1, size=samples)
    a = rng.integers(1, tree.n + 1, size=pairs)
    b = rng.integers(1, tree.n + 1, size=pairs)
    return tree.n, gamma[u], gamma[a], gamma[b]


def check_disconnection_times(
    fam: Family, n: int, replicas: int, seed: int, *,
    samples_per_tree: int = 200, pairs_per_tree: int = 100,
    workers: int = 1, threshold: float | None = None,
) -> TestReport:
    """Disconnect times of uniform vertices against P(gamma > t) =
    laplace(t), plus the empirical correlation of within-tree pairs."""
    model = model_for(fam)
    rows = map_replicas(_w_disconnect, replicas, workers, (fam, n, seed, samples_per_tree, pairs_per_tree))
    pool = np.concatenate([r[1] for r in rows])
    ga = np.concatenate([r[2] for r in rows])
    gb = np.concatenate([r[3] for r in rows])
    ks = ks_statistic(pool, lambda t: 1.0 - np.asarray(model.laplace(t)))
    finite = np.isfinite(ga) & np.isfinite(gb)
    corr = float(np.corrcoef(ga[finite], gb[finite])[0, 1]) if finite.sum() > 2 else float("nan")
    if threshold is None:
        threshold = DEFAULT_THRESHOLDS["disconnect-times"]
    return TestReport(
        name="disconnect-times", statistic="KS", value=float(ks), threshold=threshold,
        family=fam.tag, n=int(rows[0][0]), replicas=replicas, seed=seed,
        reference="gamma_u => law with survival laplace(t)", sample_size=pool.size,
        details={"pair_correlation": corr, "mean": float(np.mean(pool[np.isfinite(pool)]))},
    )


def _w_isolation_depth(idx, fam, n, seed, samples):
    rng = stream(seed, idx)
    tree = fam.generate(n, rng)
    sched = permutation_schedule(tree, rng)
    trace = run_destruction(tree, sched)
    u = rng.integers(1, tree.n + 1, size=samples)
    depth = trace.isolation_cuts[u].astype(float)
    ycnt = trace.disconnect_counts_at(u).astype(float)
    return tree.n, depth, ycnt, depth - ycnt


def depth_sample(
    fam: Family, n: int, replicas: int, seed: int, *,
    samples_per_tree: int = 10, workers: int = 1,
) -> EmpiricalSample:
    """Pooled rescaled isolation-count sample; the metadata reproduces the
    values bit-exactly."""
    model = model_for(fam)
    rows = map_replicas(_w_isolation_depth, replicas, workers, (fam, n, seed, samples_per_tree))
    n_used = rows[0][0]
    scale = model.ell(n_used) / n_used
    vals = np.concatenate([r[1] for r in rows]) * scale
    return EmpiricalSample(values=vals, n=int(n_used), family=fam.tag,
                           seed=seed, replicas=replicas, label="scaled-isolation-cuts")


def check_isolation_depth(
    fam: Family, n: int, replicas: int, seed: int, *,
    samples_per_tree: int = 10, workers: int = 1, threshold: float | None = None,
) -> TestReport:
    """Rescaled isolation counts (cut-tree leaf depths) of uniform vertices
    against the limit law depth_cdf; also the disconnect-count law and the
    mean rescaled residual, which should vanish."""
    model = model_for(fam)
    rows = map_replicas(_w_isolation_depth, replicas, workers, (fam, n, seed, samples_per_tree))
    n_used = rows[0][0]
    scale = model.ell(n_used) / n_used
    depth = np.concatenate([r[1] for r in rows]) * scale
    ycnt = np.concatenate([r[2] for r in rows]) * scale
    resid = np.concatenate([r[3] for r in rows]) * scale
    ks_depth = ks_statistic(depth, model.depth_cdf)
    ks_y = ks_statistic(ycnt, model.depth_cdf)
    if threshold is None:
        threshold = DEFAULT_THRESHOLDS["isolation-depth"]
    return TestReport(
        name="isolation-depth", statistic="KS", value=float(ks_depth), threshold=threshold,
        family=fam.tag, n=int(n_used), replicas=replicas, seed=seed,
        reference="(ell/n) * leaf depth => depth_cdf", sample_size=depth.size,
        details={
            "ks_depth": float(ks_depth),
            "ks_disconnect_cuts": float(ks_y),
            "mean_scaled_depth": float(depth.mean()),
            "mean_scaled_residual": float(resid.mean()),
        },
    )


def _w_distance_matrix(idx, fam, n, seed, k):
    rng = stream(seed, idx)
    tree = fam.generate(n, rng)
    sched = permutation_schedule(tree, rng)
    ct = build_cut_tree(tree, sched)
    mat = ct.sample_distance_matrix(k, rng)
    return tree.n, mat


def check_distance_matrix(
    fam: Family, n: int, k: int, replicas: int, seed: int, *,
    workers: int = 1, threshold: float | None = None,
) -> TestReport:
    """Distance-matrix criterion: the rescaled matrix of mutual cut-tree
    distances between the root and k uniform leaves against matrices built
    from i.i.d. draws of the limit law (energy distance on upper triangles,
    plus entrywise comparisons)."""
    if k < 1:
        raise ValueError("k must be >= 1")
    model = model_for(fam)
    rows = map_replicas(_w_distance_matrix, replicas, workers, (fam, n, seed, k))
    n_used = rows[0][0]
    scale = model.ell(n_used) / n_used
    iu = np.triu_indices(k + 1, 1)
    sim = np.stack([r[1][iu] * scale for r in rows])
    ref_rng = stream(seed, replicas, 1)
    xi = model.sample_depth_law(ref_rng, replicas * k).reshape(replicas, k)
    ref = np.stack([np.abs(np.subtract.outer(np.concatenate(([0.0], row)), np.concatenate(([0.0], row))))[iu] for row in xi])
    energy = energy_distance(sim, ref)
    root_rows = sim[:, :k].ravel()
    ks_root = ks_statistic(root_rows, model.depth_cdf)
    details = {
        "energy": float(energy),
        "ks_root_row": float(ks_root),
        "k": k,
    }
    if k >= 2:
        off_sim = sim[:, k:].ravel()
        off_ref = ref[:, k:].ravel()
        ks_off, p_off = ks_two_sample(off_sim, off_ref)
        details["ks_offdiag_two_sample"] = float(ks_off)
        details["ks_offdiag_pvalue"] = float(p_off)
    if threshold is None:
        threshold = DEFAULT_THRESHOLDS["distance-matrix"]
    return TestReport(
        name="distance-matrix", statistic="energy", value=float(energy), threshold=threshold,
        family=fam.tag, n=int(n_used), replicas=replicas, seed=seed,
        reference="rescaled mutual distances => |xi_i - xi_j|, xi iid depth law",
        sample_size=sim.shape[0], details=details,
    )


def _w_multi_isolation(idx, fam, n, seed, j_list, j_max):
    rng = stream(seed, idx)
    tree = fam.generate(n, rng)
    sched = permutation_schedule(tree, rng)
    targets = _sample_distinct(rng, tree.n, j_max)
    prof = multi_isolation_profile(tree, sched, targets, j_list)
    zs = {j: prof[j].total_cuts for j in j_list}
    ws = {j: prof[j].spread_steps for j in j_list}
    return tree.n, zs, ws


def check_multi_isolation(
    fam: Family, n: int, j_list, replicas: int, seed: int, *,
    workers: int = 1, threshold: float | None = None,
) -> TestReport:
    """Cuts to isolate j uniform targets (=> max of j depth-law draws) and
    the spread counts of the discard variant (=> order statistics)."""
    j_list = sorted(set(int(j) for j in j_list))
    if j_list[0] < 1:
        raise ValueError("j values must be >= 1")
    j_max = j_list[-1]
    model = model_for(fam)
    rows = map_replicas(_w_multi_isolation, replicas, workers, (fam, n, seed, j_list, j_max))
    n_used = rows[0][0]
    scale = model.ell(n_used) / n_used
    xgrid = np.linspace(0.0, model.x_max, 4097)
    fgrid = model.depth_cdf(xgrid)
    details: dict = {"z": {}, "w": {}}
    worst = 0.0
    for j in j_list:
        z = np.array([r[1][j] for r in rows]) * scale
        ks_z = ks_statistic(z, max_cdf(model.depth_cdf, j))
        mean_target = float(np.trapezoid(1.0 - fgrid**j, xgrid))
        details["z"][j] = {
            "mean": float(z.mean()),
            "mean_target": mean_target,
            "ks": float(ks_z),
        }
        worst = max(worst, ks_z)
        if j >= 2:
            wmat = np.stack([r[2][j] for r in rows]) * scale
            for kk in range(2, j + 1):
                ks_w = ks_statistic(wmat[:, kk - 2], order_statistic_cdf(model.depth_cdf, kk, j))
                details["w"][f"{j},{kk}"] = {"mean": float(wmat[:, kk - 2].mean()), "ks": float(ks_w)}
    if threshold is None:
        threshold = DEFAULT_THRESHOLDS["multi-isolation"]
    return TestReport(
        name="multi-isolation", statistic="KS", value=float(worst), threshold=threshold,
        family=fam.tag, n=int(n_used), replicas=replicas, seed=seed,
        reference="(ell/n) Z_j => max of j depth-law draws; W spread => order stats",
        sample_size=replicas, details=details,
    )


def merged_subtree_masses(fam: Family, n: int, replicas: int, seed: int, *, samples_per_tree: int = 200) -> np.ndarray:
    """Empirical frequencies of a uniform vertex landing in each glued
    subtree of a merged family."""
    if fam.name != "merged":
        raise ValueError("only defined for merged families")
    counts = np.zeros(len(fam.ds), dtype=np.int64)
    for idx in range(replicas):
        rng = stream(seed, idx)
        tree = fam.generate(n, rng)
        m = fam.m if fam.m is not None else merged_m_for_size(list(fam.ds), n)
        hs = merged_heights(list(fam.ds), m)
        sizes = [(d ** (h + 1) - 1) // (d - 1) for d, h in zip(fam.ds, hs)]
        bounds = np.cumsum([1] + [s - 1 for s in sizes])  # subtree i is (bounds[i-1], bounds[i]]
        u = rng.integers(2, tree.n + 1, size=samples_per_tree)
        which = np.searchsorted(bounds, u, side="left") - 1
        counts += np.bincount(which, minlength=len(fam.ds))
    return counts / counts.sum()


def check_merged_membership(
    fam: Family, n: int, replicas: int, seed: int, *,
    samples_per_tree: int = 200, workers: int = 1, threshold: float | None = None,
) -> TestReport:
    """Subtree membership frequencies of a uniform vertex against the even
    split 1/r that the limit model assumes."""
    masses = merged_subtree_masses(fam, n, replicas, seed, samples_per_tree=samples_per_tree)
    r = len(fam.ds)
    err = float(np.max(np.abs(masses - 1.0 / r)))
    rng = stream(seed, 0)
    n_used = fam.generate(n, rng).n
    if threshold is None:
        threshold = 0.02
    return TestReport(
        name="merged-membership", statistic="abs-error", value=err, threshold=threshold,
        family=fam.tag, n=int(n_used), replicas=replicas, seed=seed,
        reference="P(uniform vertex in subtree i) -> 1/r",
        sample_size=replicas * samples_per_tree,
        details={"masses": masses},
    )


CHECKS = {
    "distance-scaling": check_distance_scaling,
    "inverse-distance": check_inverse_distance,
    "root-cluster": check_root_cluster,
    "root-cuts": check_root_cuts,
    "disconnect-times": check_disconnection_times,
    "isolation-depth": check_isolation_depth,
    "distance-matrix": check_distance_matrix,
    "multi-isolation": check_multi_isolation,
    "merged-membership": check_merged_membership,
}
