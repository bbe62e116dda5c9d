"""Generators for the tree families under study, plus a Cayley-tree control.

All random generators are pure functions of (params, rng) and return trees
in canonical creation-order labeling (root = 1, parent[v] < v). Uniform
vertex statistics are invariant under relabeling, so canonicalizing does
not change any of the quantities measured downstream.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .trees import RootedTree


def gen_urt(n: int, rng: np.random.Generator) -> RootedTree:
    """Uniform random recursive tree: vertex k+1 attaches to a uniform
    vertex among {1..k}."""
    if n < 1:
        raise ValueError("n must be >= 1")
    parent = np.zeros(n + 1, dtype=np.int64)
    if n >= 2:
        parent[2:] = (rng.random(n - 1) * np.arange(1, n)).astype(np.int64) + 1
    return RootedTree(n, parent, "urt")


def gen_bst(n: int, rng: np.random.Generator) -> RootedTree:
    """Binary search tree of a uniform random key permutation, relabeled by
    insertion order (the shape law is unchanged by relabeling)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if n == 1:
        return RootedTree(1, np.zeros(2, dtype=np.int64), "bst")
    keys = rng.permutation(n).astype(np.int64)
    return RootedTree(n, _kernels.bst_parents(keys), "bst")


def gen_bary(n: int, b: int, rng: np.random.Generator) -> RootedTree:
    """Recursive b-ary tree: every vertex has b child slots and each new
    vertex picks a free slot uniformly at random. b=2 reproduces the
    random binary search tree shape law."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if b < 2:
        raise ValueError("b must be >= 2")
    if n == 1:
        return RootedTree(1, np.zeros(2, dtype=np.int64), f"bary({b})")
    parent = _kernels.bary_parents(n, b, rng.random(n - 1))
    return RootedTree(n, parent, f"bary({b})")


def gen_scale_free(n: int, alpha: float, rng: np.random.Generator) -> RootedTree:
    """Preferential attachment tree on n vertices: starting from the edge
    {1,2}, each new vertex attaches to vertex i with probability
    proportional to degree(i) + alpha.

    n counts vertices, so the result has n-1 attachment steps less one:
    a tree with m edges took m-1 preferential choices after the seed edge.
    """
    if n < 2:
        raise ValueError("n must be >= 2")
    if alpha <= -1:
        raise ValueError("alpha must be > -1")
    tag = f"scale_free({alpha:g})"
    if alpha >= 0:
        parent = _kernels.scale_free_parents(
            n, float(alpha), rng.random(max(n - 2, 1)), rng.random(max(n - 2, 1))
        )
        return RootedTree(n, parent, tag)
    # alpha in (-1,0): rejection from the degree-proportional proposal,
    # accepting with probability (g + alpha)/g <= 1. Quadratic in n (the
    # degree count is a scan); this range only appears in small-n tests.
    parent = np.zeros(n + 1, dtype=np.int64)
    parent[2] = 1
    ends = np.empty(2 * (n - 1), dtype=np.int64)
    ends[0], ends[1] = 1, 2
    cnt = 2
    for v in range(3, n + 1):
        while True:
            cand = ends[int(rng.random() * cnt)]
            g = np.count_nonzero(ends[:cnt] == cand)
            if rng.random() * g < g + alpha:
                break
        parent[v] = cand
        ends[cnt] = v
        ends[cnt + 1] = cand
        cnt += 2
    return RootedTree(n, parent, tag)


def gen_regular(d: int, h: int) -> RootedTree:
    """Complete d-ary tree with d^j vertices at distance j = 0..h from the
    root; size (d^(h+1)-1)/(d-1), root level included."""
    if d < 2:
        raise ValueError("d must be >= 2")
    if h < 1:
        raise ValueError("h must be >= 1")
    n = (d ** (h + 1) - 1) // (d - 1)
    parent = np.zeros(n + 1, dtype=np.int64)
    v = np.arange(2, n + 1)
    parent[2:] = (v - 2) // d + 1
    return RootedTree(n, parent, f"regular({d},{h})")


def merged_heights(ds: list[int], m: float) -> list[int]:
    """Subtree heights max(1, round(m / ln d_i)), which keeps the branch
    growth factors d_i^(h_i) of the same order."""
    return [max(1, int(math.floor(m / math.log(d) + 0.5))) for d in ds]


def gen_merged(ds: list[int], m: float, rng: np.random.Generator | None = None) -> RootedTree:
    """Complete d_i-ary trees of heights round(m/ln d_i) glued at a common
    root. Deterministic; rng accepted for interface uniformity."""
    if not ds:
        raise ValueError("ds must be nonempty")
    if any(d < 2 for d in ds):
        raise ValueError("all branching factors must be >= 2")
    hs = merged_heights(ds, m)
    sizes = [(d ** (h + 1) - 1) // (d - 1) for d, h in zip(ds, hs)]
    n = 1 + sum(s - 1 for s in sizes)
    parent = np.zeros(n + 1, dtype=np.int64)
    base = 1  # last label already assigned
    for d, h in zip(ds, hs):
        prev_start = 1  # first label of the previous level (shared root)
        for j in range(1, h + 1):
            count = d ** j
            if j == 1:
                parent[base + 1 : base + 1 + count] = 1
            else:
                parent[base + 1 : base + 1 + count] = prev_start + np.arange(count) // d
            prev_start = base + 1
            base += count
    return RootedTree(n, parent, f"merged({','.join(map(str, ds))})")


def gen_cayley(n: int, rng: np.random.Generator) -> RootedTree:
    """Uniform labeled tree on n vertices (via a uniform Pruefer sequence),
    rooted at 1 and relabeled canonically. Heights grow like sqrt(n), so
    this family sits outside the small-height regime; it serves as a
    negative control."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if n == 1:
        return RootedTree(1, np.zeros(2, dtype=np.int64), "cayley")
    if n == 2:
        return RootedTree(2, np.array([0, 0, 1], dtype=np.int64), "cayley")
    code = rng.integers(1, n + 1, size=n - 2).astype(np.int64)
    eu, ev = _kernels.prufer_decode(code, n)
    parent = _kernels.relabel_bfs(eu, ev, n)
    return RootedTree(n, parent, "cayley")


@dataclass(frozen=True)
class Family:
    """A generator family with its parameters; picklable for worker pools."""

    name: str
    alpha: float = 0.0
    b: int = 2
    ds: tuple[int, ...] = ()
    m: float | None = None
    d: int = 2
    h: int = 1

    def generate(self, n: int, rng: np.random.Generator) -> RootedTree:
        if self.name == "urt":
            return gen_urt(n, rng)
        if self.name == "bst":
            return gen_bst(n, rng)
        if self.name == "bary":
            return gen_bary(n, self.b, rng)
        if self.name == "scale_free":
            return gen_scale_free(n, self.alpha, rng)
        if self.name == "regular":
            return gen_regular(self.d, self.h)
        if self.name == "merged":
            m = self.m if self.m is not None else merged_m_for_size(list(self.ds), n)
            return gen_merged(list(self.ds), m, rng)
        if self.name == "cayley":
            return gen_cayley(n, rng)
        raise ValueError(f"unknown family {self.name!r}")

    @property
    def tag(self) -> str:
        if self.name == "bary":
            return f"bary({self.b})"
        if self.name == "scale_free":
            return f"scale_free({self.alpha:g})"
        if self.name == "merged":
            return f"merged({','.join(map(str, self.ds))})"
        if self.name == "regular":
            return f"regular({self.d},{self.h})"
        return self.name


def merged_m_for_size(ds: list[int], n_target: int) -> float:
    """Scan m for the merged family so the realized size lands closest to
    n_target (sizes move in jumps because heights are integers)."""
    if n_target < 1 + sum(d for d in ds):
        return min(math.log(d) for d in ds)
    best_m, best_err = 1.0, float("inf")
    top = math.log(max(n_target, 3)) + 1.0
    steps = int(top / 0.01)
    for i in range(steps):
        m = 0.5 + i * 0.01
        hs = merged_heights(ds, m)
        size = 1 + sum((d ** (h + 1) - 1) // (d - 1) - 1 for d, h in zip(ds, hs))
        err = abs(size - n_target)
        if err < best_err:
            best_err, best_m = err, m
        if size > 4 * n_target:
            break
    return best_m


def make_family(name: str, **params) -> Family:
    """Build a Family from loose parameters, validating what it needs."""
    if name == "bary":
        return Family(name, b=int(params.get("b", 2)))
    if name == "scale_free":
        return Family(name, alpha=float(params.get("alpha", 0.0)))
    if name == "merged":
        ds = params.get("ds") or ()
        if not ds:
            raise ValueError("merged family needs ds")
        return Family(name, ds=tuple(int(d) for d in ds), m=params.get("m"))
    if name == "regular":
        return Family(name, d=int(params.get("d", 2)), h=int(params.get("h", 1)))
    if name in ("urt", "bst", "cayley"):
        return Family(name)
    raise ValueError(f"unknown family {name!r}")
