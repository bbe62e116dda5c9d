"""Rooted labeled trees in canonical parent-array form."""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import _kernels


@dataclass(frozen=True)
class RootedTree:
    """Tree on vertices {1..n} rooted at 1.

    parent[v] is the parent of v for v in 2..n (entries 0 and 1 are unused).
    Labels are canonical: parent[v] < v, i.e. vertices are numbered in an
    order in which every parent precedes its children. Edges are identified
    by their child vertex. Instances are treated as immutable.
    """

    n: int
    parent: np.ndarray
    family: str = "unknown"

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("tree needs at least one vertex")
        p = np.asarray(self.parent, dtype=np.int64)
        if p.shape != (self.n + 1,):
            raise ValueError(f"parent array must have length n+1={self.n + 1}")
        if self.n >= 2:
            v = np.arange(2, self.n + 1)
            if ((p[v] < 1) | (p[v] >= v)).any():
                raise ValueError("parents must satisfy 1 <= parent[v] < v")
        object.__setattr__(self, "parent", p)

    @property
    def n_edges(self) -> int:
        return self.n - 1

    def depths(self) -> np.ndarray:
        """Graph distance from the root to every vertex (index 0 unused)."""
        return _kernels.vertex_depths(self.parent)

    def children_csr(self) -> tuple[np.ndarray, np.ndarray]:
        if self.n == 1:
            return np.zeros(3, dtype=np.int64), np.zeros(0, dtype=np.int64)
        return _kernels.children_csr(self.parent)

    def degrees(self) -> np.ndarray:
        deg = np.zeros(self.n + 1, dtype=np.int64)
        if self.n >= 2:
            np.add.at(deg, self.parent[2:], 1)
            deg[2:] += 1
        return deg

    def distance(self, u: int, v: int, depths: np.ndarray | None = None) -> int:
        """Graph distance between u and v via the walk-up ancestor."""
        return self.distance_and_meet(u, v, depths)[0]

    def distance_and_meet(self, u: int, v: int, depths: np.ndarray | None = None) -> tuple[int, int]:
        """(distance, last common ancestor) for a pair of vertices."""
        if not (1 <= u <= self.n and 1 <= v <= self.n):
            raise ValueError("vertex out of range")
        if depths is None:
            depths = self.depths()
        p = self.parent
        du, dv = int(depths[u]), int(depths[v])
        d = 0
        while du > dv:
            u = p[u]
            du -= 1
            d += 1
        while dv > du:
            v = p[v]
            dv -= 1
            d += 1
        while u != v:
            u = p[u]
            v = p[v]
            d += 2
        return d, int(u)

    def root_branch(self) -> np.ndarray:
        """For every vertex, its ancestor among the root's children
        (0 for the root itself)."""
        return _kernels.root_branch(self.parent)

    def to_text(self) -> str:
        """Serialize as 'n' then one 'child parent' line per edge."""
        lines = [str(self.n)]
        p = self.parent
        lines.extend(f"{v} {p[v]}" for v in range(2, self.n + 1))
        return "\n".join(lines) + "\n"

    def save(self, path: str | Path) -> None:
        Path(path).write_text(self.to_text())

    @classmethod
    def from_text(cls, text: str, family: str = "file") -> "RootedTree":
        rows = [ln for ln in text.strip().splitlines() if ln.strip()]
        if not rows:
            raise ValueError("empty tree file")
        n = int(rows[0])
        if len(rows) - 1 != max(n - 1, 0):
            raise ValueError(f"expected {n - 1} edges, found {len(rows) - 1}")
        parent = np.zeros(n + 1, dtype=np.int64)
        for ln in rows[1:]:
            a, b = ln.split()
            parent[int(a)] = int(b)
        return cls(n, parent, family)

    @classmethod
    def load(cls, path: str | Path) -> "RootedTree":
        return cls.from_text(Path(path).read_text(), family=f"file:{Path(path).name}")
