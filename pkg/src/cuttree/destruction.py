"""Edge destruction of a rooted tree, in discrete or continuous time.

A schedule assigns each edge a removal time; cutting edges in increasing
time order drives every observable. For discrete-only runs the times are
a random permutation of ranks, which has the same induced cut order as
i.i.d. exponential clocks (exchangeability), but skips the sort.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from . import _kernels
from .trees import RootedTree


@dataclass(frozen=True)
class CutSchedule:
    """Removal times keyed by edge (= child vertex); entries 0,1 unused.

    ell is the exponential clock scale (mean removal time), or None for a
    rank-valued permutation schedule. order_hint, when present, is the
    increasing cut order (avoids a sort for rank schedules).
    """

    times: np.ndarray
    ell: float | None = None
    order_hint: np.ndarray | None = field(default=None, repr=False)

    @property
    def n(self) -> int:
        return self.times.shape[0] - 1

    def order(self) -> np.ndarray:
        """Child vertices in increasing removal order. Ties (never produced
        by the samplers, possible in handwritten schedules) break by edge
        id: the stable sort keeps the smaller child vertex first."""
        if self.order_hint is not None:
            return self.order_hint
        return np.argsort(self.times[2:], kind="stable").astype(np.int64) + 2

    def order_desc(self) -> np.ndarray:
        return self.order()[::-1]


def sample_schedule(tree: RootedTree, ell_value: float, rng: np.random.Generator) -> CutSchedule:
    """Independent exponential removal clocks of mean ell_value per edge."""
    if tree.n < 2:
        raise ValueError("destruction needs at least one edge")
    if ell_value <= 0:
        raise ValueError("ell_value must be positive")
    times = np.empty(tree.n + 1)
    times[:2] = np.inf
    times[2:] = rng.exponential(ell_value, tree.n - 1)
    return CutSchedule(times, float(ell_value))


def permutation_schedule(tree: RootedTree, rng: np.random.Generator) -> CutSchedule:
    """Uniform random cut order, stored as rank-valued times."""
    if tree.n < 2:
        raise ValueError("destruction needs at least one edge")
    order = rng.permutation(tree.n - 1).astype(np.int64) + 2
    times = np.empty(tree.n + 1)
    times[:2] = np.inf
    times[order] = np.arange(tree.n - 1, dtype=float)
    return CutSchedule(times, None, order)


def schedule_from_order(tree: RootedTree, order) -> CutSchedule:
    """Deterministic schedule from an explicit cut order of child vertices."""
    order = np.asarray(order, dtype=np.int64)
    if sorted(order.tolist()) != list(range(2, tree.n + 1)):
        raise ValueError("order must list each edge child vertex exactly once")
    times = np.empty(tree.n + 1)
    times[:2] = np.inf
    times[order] = np.arange(tree.n - 1, dtype=float)
    return CutSchedule(times, None, order)


class DestructionTrace:
    """Per-run observables of one destruction; heavier ones are lazy.

    disconnect_time[v]  first instant v leaves the root component (inf at 1)
    x_times, x_sizes    jumps of the root-component size: size is x_sizes[k]
                        on [x_times[k], x_times[k+1]), starting at n
    root_cut_times      sorted times of cuts that landed in the root
                        component; their count by time t is R(t)
    cuts_to_disconnect  R evaluated at each vertex's disconnect time
    isolation_cuts      cut-tree leaf depth: total cuts in components
                        containing the vertex
    residual_cuts       isolation_cuts - cuts_to_disconnect

    Built from path minima: a cut lands in the root component iff it beats
    the disconnect time of its parent endpoint; isolation counts come from
    the merge tree. Everything is O(n) plus one sort where a sort is due.
    """

    def __init__(self, tree: RootedTree, schedule: CutSchedule):
        n = tree.n
        if schedule.times.shape[0] != n + 1:
            raise ValueError("schedule does not match tree size")
        if n >= 2 and not np.isfinite(schedule.times[2:]).all():
            raise ValueError("schedule must give every edge a finite time")
        self._tree = tree
        self._schedule = schedule
        self.n = n
        self.ell = schedule.ell
        self.disconnect_time = _kernels.path_min(tree.parent, schedule.times)
        in_root = schedule.times[2:] < self.disconnect_time[tree.parent[2:]]
        self.root_cut_times = np.sort(schedule.times[2:][in_root])

    @cached_property
    def _x_jumps(self) -> tuple[np.ndarray, np.ndarray]:
        times, counts = np.unique(self.disconnect_time[2:], return_counts=True)
        return times, self.n - np.cumsum(counts)

    @property
    def x_times(self) -> np.ndarray:
        return self._x_jumps[0]

    @property
    def x_sizes(self) -> np.ndarray:
        return self._x_jumps[1]

    @cached_property
    def isolation_cuts(self) -> np.ndarray:
        leaf_depth = _kernels.merge_leaf_depths(self._tree.parent, self._schedule.order_desc())
        depth = np.zeros(self.n + 1, dtype=np.int64)
        depth[1:] = leaf_depth
        return depth

    @cached_property
    def cuts_to_disconnect(self) -> np.ndarray:
        y = np.zeros(self.n + 1, dtype=np.int64)
        y[1:] = np.searchsorted(self.root_cut_times, self.disconnect_time[1:], side="right")
        return y

    @cached_property
    def residual_cuts(self) -> np.ndarray:
        return self.isolation_cuts - self.cuts_to_disconnect

    def disconnect_counts_at(self, vertices) -> np.ndarray:
        """cuts_to_disconnect for selected vertices without the full table."""
        g = self.disconnect_time[np.asarray(vertices, dtype=np.int64)]
        return np.searchsorted(self.root_cut_times, g, side="right")

    def x_at(self, t) -> np.ndarray:
        """Root component size X(t), right-continuous."""
        idx = np.searchsorted(self.x_times, np.asarray(t, dtype=float), side="right")
        sizes = np.concatenate(([self.n], self.x_sizes))
        return sizes[idx]

    def r_at(self, t) -> np.ndarray:
        """Number of root-component cuts R(t) up to time t."""
        return np.searchsorted(self.root_cut_times, np.asarray(t, dtype=float), side="right")

    def sup_x_deviation(self, lam, grid: np.ndarray | None = None) -> float:
        """sup over s of |X(s)/n - lam(s)|, evaluated at both sides of every
        jump (exact for monotone lam) plus an optional extra grid."""
        n = self.n
        lam_j = np.asarray(lam(self.x_times))
        after = self.x_sizes / n
        before = np.concatenate(([n], self.x_sizes[:-1])) / n
        sup = max(np.max(np.abs(after - lam_j)), np.max(np.abs(before - lam_j)), abs(1.0 - float(lam(0.0))))
        if grid is not None and grid.size:
            sup = max(sup, float(np.max(np.abs(self.x_at(grid) / n - np.asarray(lam(grid))))))
        return float(sup)

    def sup_r_deviation(self, big_lambda, t_max: float, scale: float, grid: np.ndarray | None = None) -> float:
        """sup over s <= t_max of |scale * R(s) - big_lambda(s)| at both sides
        of every root-cut jump, the endpoint, and an optional grid."""
        rc = self.root_cut_times
        inside = rc[rc <= t_max]
        k = inside.size
        lam_j = np.asarray(big_lambda(inside))
        after = scale * np.arange(1, k + 1)
        before = scale * np.arange(0, k)
        sup = abs(scale * k - float(big_lambda(t_max)))
        if k:
            sup = max(sup, np.max(np.abs(after - lam_j)), np.max(np.abs(before - lam_j)))
        if grid is not None and grid.size:
            g = grid[grid <= t_max]
            if g.size:
                sup = max(sup, float(np.max(np.abs(scale * self.r_at(g) - np.asarray(big_lambda(g))))))
        return float(sup)


def run_destruction(tree: RootedTree, schedule: CutSchedule) -> DestructionTrace:
    """Replay a full destruction and expose every per-run observable."""
    return DestructionTrace(tree, schedule)


@dataclass(frozen=True)
class MultiIsolation:
    """Result of isolating several target vertices at once.

    total_cuts is the number of cuts performed when components without any
    target are discarded on sight; spread_steps[k-2] is the number of steps
    of the stricter algorithm (discarding components with at most one
    target) until the targets first occupy k distinct components, k=2..j.
    """

    targets: tuple[int, ...]
    total_cuts: int
    spread_steps: np.ndarray


def _record_masks(tree: RootedTree, times: np.ndarray, targets: tuple[int, ...]) -> np.ndarray:
    off, childs = tree.children_csr()
    masks = np.zeros((len(targets), tree.n + 1), dtype=np.uint8)
    for t, u in enumerate(targets):
        _kernels.record_edges_from(off, childs, tree.parent, times, u, masks[t])
    return masks


def _spread(tree: RootedTree, times: np.ndarray, targets: tuple[int, ...], masks: np.ndarray) -> np.ndarray:
    hits = masks.sum(axis=0, dtype=np.int64)
    cand = np.flatnonzero(hits >= 2)
    cand = cand[np.argsort(times[cand], kind="stable")].astype(np.int64)
    off, childs = tree.children_csr()
    tin, tout = _kernels.euler_intervals(off, childs, tree.n)
    target_tin = np.array([tin[u] for u in targets], dtype=np.int64)
    return _kernels.spread_steps(cand, masks, tin, tout, target_tin)


def _check_targets(tree: RootedTree, targets) -> tuple[int, ...]:
    tg = tuple(dict.fromkeys(int(u) for u in targets))
    if not tg:
        raise ValueError("targets must be nonempty")
    if any(not 1 <= u <= tree.n for u in tg):
        raise ValueError("target out of range")
    return tg


def multi_isolation(tree: RootedTree, schedule: CutSchedule, targets) -> MultiIsolation:
    """Replay the destruction, counting only cuts in retained components.

    A cut lands in the component of target u iff its time beats every edge
    time on the path from u to the cut (a record seen from u); the replay
    works off these per-target record sets and never consults the cut-tree.
    """
    tg = _check_targets(tree, targets)
    if tree.n == 1:
        return MultiIsolation(tg, 0, np.zeros(0, dtype=np.int64))
    masks = _record_masks(tree, schedule.times, tg)
    total = int(np.count_nonzero(masks.sum(axis=0, dtype=np.int64)[2:]))
    if len(tg) == 1:
        return MultiIsolation(tg, total, np.zeros(0, dtype=np.int64))
    w = _spread(tree, schedule.times, tg, masks)
    return MultiIsolation(tg, total, w)


def multi_isolation_profile(
    tree: RootedTree, schedule: CutSchedule, targets, j_list
) -> dict[int, MultiIsolation]:
    """multi_isolation for every prefix targets[:j], j in j_list, sharing
    the per-target record computation across prefixes."""
    tg = _check_targets(tree, targets)
    js = sorted(set(int(j) for j in j_list))
    if js[0] < 1 or js[-1] > len(tg):
        raise ValueError("j values must lie in 1..len(targets)")
    masks = _record_masks(tree, schedule.times, tg)
    out: dict[int, MultiIsolation] = {}
    for j in js:
        sub = tg[:j]
        total = int(np.count_nonzero(masks[:j].sum(axis=0, dtype=np.int64)[2:]))
        if j == 1:
            out[j] = MultiIsolation(sub, total, np.zeros(0, dtype=np.int64))
        else:
            out[j] = MultiIsolation(sub, total, _spread(tree, schedule.times, sub, masks[:j]))
    return out
