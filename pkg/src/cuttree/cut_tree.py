"""The binary genealogy of components created by a destruction run.

Leaves are the singletons {1..n}; each cut contributes one internal node,
the block it split; the root is the full vertex set. Built by replaying
cuts latest-first with a union-find, which is equivalent to forward
splitting but runs in near-linear time.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

from . import _kernels
from .trees import RootedTree

if TYPE_CHECKING:  # pragma: no cover
    from .destruction import CutSchedule


@dataclass(frozen=True)
class CutTree:
    """2n-1 nodes: leaf for vertex v is node v-1, internal nodes n..2n-2 in
    reverse cut order, root = 2n-2 (node 0 doubles as root when n = 1).

    cut_rank[m] is the 0-based rank (in increasing removal time) of the cut
    that split block m. Children are ordered so that left holds the smaller
    minimum vertex label; min_leaf[m] is that minimum.
    """

    n: int
    left: np.ndarray
    right: np.ndarray
    cut_rank: np.ndarray
    min_leaf: np.ndarray
    node_parent: np.ndarray
    node_depth: np.ndarray

    @property
    def root(self) -> int:
        return 2 * self.n - 2

    @property
    def n_leaves(self) -> int:
        return self.n

    @property
    def n_internal(self) -> int:
        return self.n - 1

    def leaf(self, v: int) -> int:
        if not 1 <= v <= self.n:
            raise ValueError("vertex out of range")
        return v - 1

    def leaf_depth(self, v: int) -> int:
        """Distance from the root block to leaf {v} = number of cuts that
        happened in components containing v."""
        return int(self.node_depth[self.leaf(v)])

    def leaf_depths(self) -> np.ndarray:
        """Depths of all leaves, indexed by vertex (entry 0 unused)."""
        out = np.zeros(self.n + 1, dtype=np.int64)
        out[1:] = self.node_depth[: self.n]
        return out

    def lca(self, a: int, b: int) -> int:
        """Lowest common ancestor of two nodes, by parent-pointer walk."""
        da, db = self.node_depth[a], self.node_depth[b]
        while da > db:
            a = self.node_parent[a]
            da -= 1
        while db > da:
            b = self.node_parent[b]
            db -= 1
        while a != b:
            a = self.node_parent[a]
            b = self.node_parent[b]
        return int(a)

    def pairwise_distance(self, i: int, j: int) -> int:
        """Graph distance between leaves {i} and {j} in the cut-tree."""
        a, b = self.leaf(i), self.leaf(j)
        if a == b:
            return 0
        anc = self.lca(a, b)
        return int(self.node_depth[a] + self.node_depth[b] - 2 * self.node_depth[anc])

    def distance_to_root(self, i: int) -> int:
        return self.leaf_depth(i)

    def reduced_length(self, leaf_set) -> int:
        """Edge count of the subtree spanned by the root and given leaves."""
        vs = {int(v) for v in leaf_set}
        if not vs:
            raise ValueError("leaf set must be nonempty")
        seen = set()
        total = 0
        root = self.root
        for v in vs:
            node = self.leaf(v)
            while node != root and node not in seen:
                seen.add(node)
                total += 1
                node = int(self.node_parent[node])
        return total

    def sample_distance_matrix(self, k: int, rng: np.random.Generator) -> np.ndarray:
        """(k+1)x(k+1) distances between the root (row 0) and k i.i.d.
        uniform leaves."""
        if k < 1:
            raise ValueError("k must be >= 1")
        verts = rng.integers(1, self.n + 1, size=k)
        return self.distance_matrix(verts)

    def distance_matrix(self, verts) -> np.ndarray:
        verts = list(int(v) for v in verts)
        k = len(verts)
        out = np.zeros((k + 1, k + 1), dtype=float)
        for i, v in enumerate(verts, start=1):
            out[0, i] = out[i, 0] = self.leaf_depth(v)
        for i in range(1, k + 1):
            for j in range(i + 1, k + 1):
                d = self.pairwise_distance(verts[i - 1], verts[j - 1])
                out[i, j] = out[j, i] = d
        return out

    def block(self, node: int) -> list[int]:
        """Sorted vertex labels of the block at a node."""
        out = []
        stack = [int(node)]
        while stack:
            m = stack.pop()
            if m < self.n:
                out.append(m + 1)
            else:
                stack.append(int(self.left[m]))
                stack.append(int(self.right[m]))
        return sorted(out)

    def to_newick(self) -> str:
        """Deterministic Newick text; children ordered left-first (smaller
        minimum label); leaves carry their vertex label."""
        n = self.n
        parts: list[str] = [""] * (2 * n - 1)
        for v in range(n):
            parts[v] = str(v + 1)
        for m in range(n, 2 * n - 1):
            parts[m] = f"({parts[self.left[m]]},{parts[self.right[m]]})"
        return parts[self.root] + ";"


def build_cut_tree(tree: RootedTree, schedule: "CutSchedule | None" = None) -> CutTree:
    """Cut-tree of a destruction run; n = 1 yields the single root leaf."""
    n = tree.n
    if n == 1:
        z = np.zeros(1, dtype=np.int64)
        return CutTree(1, z - 1, z - 1, z - 1, z + 1, z - 1, z * 0)
    if schedule is None or schedule.times.shape[0] != n + 1:
        raise ValueError("schedule does not match tree size")
    left, right, cut_rank, min_leaf, node_parent, node_depth = _kernels.merge_tree(
        tree.parent, schedule.order_desc()
    )
    return CutTree(n, left, right, cut_rank, min_leaf, node_parent, node_depth)
