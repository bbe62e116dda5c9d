"""Theoretical scaling packages for each tree family.

Every family here has an atomic reduced-path-length limit: the rescaled
root-to-vertex distance d(1,u)/ell(n) converges to a random atom zeta
(a constant for the single-branching families, a uniform pick from
{1/ln d_i} for merged trees). From the atoms everything else follows:

    laplace(t)          = E exp(-t zeta)                (survival transform)
    laplace_integral(t) = int_0^t laplace(s) ds         (strictly increasing)
    x_max               = laplace_integral(infinity) = E[1/zeta]
    depth_cdf(x)        = 1 - laplace(laplace_integral^{-1}(x)) on [0, x_max)

depth_cdf is the law of the rescaled number of cuts needed to isolate a
uniform vertex, and the limit measure of the rescaled cut-tree.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class LimitModel:
    family: str
    ell_coeff: float
    zeta_atoms: np.ndarray
    zeta_weights: np.ndarray

    def __post_init__(self):
        atoms = np.asarray(self.zeta_atoms, dtype=float)
        w = np.asarray(self.zeta_weights, dtype=float)
        if atoms.ndim != 1 or atoms.size == 0 or (atoms <= 0).any():
            raise ValueError("zeta atoms must be positive")
        if w.shape != atoms.shape or not math.isclose(w.sum(), 1.0, rel_tol=1e-12):
            raise ValueError("weights must match atoms and sum to 1")
        object.__setattr__(self, "zeta_atoms", atoms)
        object.__setattr__(self, "zeta_weights", w)

    # -- scaling ---------------------------------------------------------
    def ell(self, n) -> float | np.ndarray:
        """Edge-count scale ell(n); all families here are c * ln n."""
        return self.ell_coeff * np.log(n)

    # -- zeta ------------------------------------------------------------
    def zeta_mean(self) -> float:
        return float(self.zeta_weights @ self.zeta_atoms)

    def sample_zeta(self, rng: np.random.Generator, size: int) -> np.ndarray:
        idx = rng.choice(self.zeta_atoms.size, size=size, p=self.zeta_weights)
        return self.zeta_atoms[idx]

    def inv_sum_mean(self) -> float:
        """E[1 / (zeta_1 + zeta_2)] over an independent pair of atoms."""
        a = self.zeta_atoms
        w = self.zeta_weights
        return float(np.sum(np.outer(w, w) / np.add.outer(a, a)))

    # -- transform and its integral --------------------------------------
    def laplace(self, t):
        t = np.asarray(t, dtype=float)
        out = np.exp(-np.multiply.outer(t, self.zeta_atoms)) @ self.zeta_weights
        return out if out.ndim else float(out)

    def laplace_integral(self, t):
        t = np.asarray(t, dtype=float)
        a = self.zeta_atoms
        out = (-np.expm1(-np.multiply.outer(t, a)) / a) @ self.zeta_weights
        return out if out.ndim else float(out)

    @property
    def x_max(self) -> float:
        return float(self.zeta_weights @ (1.0 / self.zeta_atoms))

    def laplace_integral_inv(self, x):
        """Inverse of the integral, by closed form (one atom) or bisection."""
        x = np.asarray(x, dtype=float)
        if ((x < 0) | (x >= self.x_max)).any():
            raise ValueError("argument must lie in [0, x_max)")
        if self.zeta_atoms.size == 1:
            a = float(self.zeta_atoms[0])
            out = -np.log1p(-a * x) / a
            return out if out.ndim else float(out)
        lo = np.zeros_like(x)
        hi = np.ones_like(x)
        for _ in range(90):  # expand then halve; 90 rounds reach ~1e-14 rel
            mask = self.laplace_integral(hi) < x
            if not mask.any():
                break
            hi = np.where(mask, 2.0 * hi, hi)
        for _ in range(110):
            mid = 0.5 * (lo + hi)
            below = self.laplace_integral(mid) < x
            lo = np.where(below, mid, lo)
            hi = np.where(below, hi, mid)
        out = 0.5 * (lo + hi)
        return out if out.ndim else float(out)

    # -- the limit law of rescaled isolation counts -----------------------
    def depth_cdf(self, x):
        x = np.asarray(x, dtype=float)
        xm = self.x_max
        inside = np.clip(x, 0.0, xm * (1 - 1e-15))
        vals = 1.0 - self.laplace(self.laplace_integral_inv(inside))
        vals = np.where(x <= 0, 0.0, np.where(x >= xm, 1.0, vals))
        return vals if vals.ndim else float(vals)

    def sample_depth_law(self, rng: np.random.Generator, size: int) -> np.ndarray:
        """Draws from the limit law: laplace_integral(E/zeta) with E standard
        exponential, valid because P(E/zeta > t) = E[exp(-t zeta)]."""
        e = rng.exponential(size=size)
        z = self.sample_zeta(rng, size)
        return self.laplace_integral(e / z)


def limit_model(family: str, *, alpha: float = 0.0, b: int = 2, ds: tuple[int, ...] = ()) -> LimitModel:
    """Limit package for a named family.

    ell coefficients (as multiples of ln n): urt 1, bst 2, bary b/(b-1),
    scale_free (1+alpha)/(2+alpha), merged 1.
    """
    one = np.ones(1)
    if family == "urt":
        return LimitModel("urt", 1.0, one, one)
    if family == "bst":
        return LimitModel("bst", 2.0, one, one)
    if family == "bary":
        if b < 2:
            raise ValueError("b must be >= 2")
        return LimitModel(f"bary({b})", b / (b - 1), one, one)
    if family == "scale_free":
        if alpha <= -1:
            raise ValueError("alpha must be > -1")
        return LimitModel(f"scale_free({alpha:g})", (1 + alpha) / (2 + alpha), one, one)
    if family == "merged":
        if not ds or any(d < 2 for d in ds):
            raise ValueError("merged family needs branching factors >= 2")
        atoms = np.array([1.0 / math.log(d) for d in ds])
        w = np.full(len(ds), 1.0 / len(ds))
        return LimitModel(f"merged({','.join(map(str, ds))})", 1.0, atoms, w)
    raise ValueError(f"no limit model for family {family!r}")


def model_for(fam) -> LimitModel:
    """Limit model matching a families.Family instance."""
    return limit_model(fam.name, alpha=fam.alpha, b=fam.b, ds=fam.ds)
