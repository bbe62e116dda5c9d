"""Exact expected distance-profile generating functions of the alpha=0
preferential attachment tree, with Monte Carlo cross-checks.

Conventions follow the growth process: T_m has m edges and m+1 vertices
{1..m+1}; step m attaches vertex m+2 with probability degree/2m. For a
vertex i and z in (0,1),

    Gf_n^i(z) = sum_k (# vertices at distance k+1 from i in T_n) z^k.

Expectations satisfy one-step recurrences in n whose coefficients are
(2n+1+z)/2n for the profile, (2n+1)/2n for degrees, and (2n+2+z)/2n for
the joint moment with the degree; everything here is the exact dynamic
program over those recurrences, never a simulation.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import _kernels
from .rng import stream
from .stats import TestReport


def expected_degree(i: int, n: int) -> float:
    """Exact expected degree of vertex i in T_n: the product of
    (2j+1)/(2j) over j from max(i-1,1) to n-1 (empty product = 1)."""
    if not 1 <= i <= n + 1:
        raise ValueError("need 1 <= i <= n+1")
    lo = max(i - 1, 1)
    j = np.arange(lo, n, dtype=float)
    return float(np.prod((2 * j + 1) / (2 * j)))


@dataclass(frozen=True)
class GFTable:
    """Dynamic-program tables for one evaluation point z.

    seeds[i] = E[Gf_{i-1}^i(z)], the profile of a fresh vertex; seed_sums[i]
    is the joint-moment sum it was derived from. pg/pz/q are prefix products
    of (2j+1+z)/2j, (2j+1)/2j, (2j+2+z)/2j. gz_final[j] is the joint moment
    E[Gf_{n_max}^j Z_j] at the last step.
    """

    z: float
    n_max: int
    seeds: np.ndarray
    seed_sums: np.ndarray
    pg: np.ndarray
    pz: np.ndarray
    q: np.ndarray
    gz_final: np.ndarray

    def e_g(self, i: int, n: int) -> float:
        """E[Gf_n^i(z)]; zero for n <= i-2 (vertex i does not exist yet)."""
        if i < 1 or n < 1 or i > self.n_max + 1 or n > self.n_max:
            raise ValueError("index out of table range")
        if n <= i - 2:
            return 0.0
        if i <= 2:
            return float(self.pg[n - 1])
        return float(self.seeds[i] * self.pg[n - 1] / self.pg[i - 2])

    def e_z(self, i: int, n: int) -> float:
        """E[Z^i(n,1)] = expected degree of i in T_n."""
        if not 1 <= i <= n + 1 or n > self.n_max:
            raise ValueError("index out of table range")
        lo = max(i - 2, 0)
        return float(self.pz[n - 1] / self.pz[lo])

    def e_gz(self, i: int, n: int) -> float:
        """E[Gf_n^i(z) Z^i(n,1)] by unrolling the joint recurrence."""
        if not 1 <= i <= n + 1 or n > self.n_max:
            raise ValueError("index out of table range")
        base = max(i - 2, 0)
        start = max(i - 1, 1)
        ks = np.arange(start, n, dtype=np.int64)
        total = float(self.seeds[i]) * self.q[n - 1] / self.q[base]
        if ks.size:
            ez = self.pz[ks - 1] / self.pz[base]
            total += float(np.sum(self.q[n - 1] / self.q[ks] * ez / (2.0 * ks)))
        return float(total)


def build_gf_table(z: float, n_max: int) -> GFTable:
    """One O(n_max^2) sweep of the coupled recurrences."""
    if not 0.0 < z < 1.0:
        raise ValueError("z must lie in (0,1)")
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    size = n_max + 2
    seeds = np.zeros(size)
    seed_sums = np.zeros(size)
    gz = np.zeros(size)
    ez = np.zeros(size)
    seeds[1] = seeds[2] = 1.0
    gz[1] = gz[2] = 1.0
    ez[1] = ez[2] = 1.0
    for m in range(1, n_max):
        s = float(gz[1 : m + 2].sum())
        seed_sums[m + 2] = s
        seeds[m + 2] = 1.0 + z * s / (2.0 * m)
        gz[1 : m + 2] = (2 * m + 2 + z) / (2 * m) * gz[1 : m + 2] + ez[1 : m + 2] / (2 * m)
        ez[1 : m + 2] *= (2 * m + 1) / (2 * m)
        gz[m + 2] = seeds[m + 2]
        ez[m + 2] = 1.0
    j = np.arange(1, n_max, dtype=float)
    pg = np.concatenate(([1.0], np.cumprod((2 * j + 1 + z) / (2 * j))))
    pz = np.concatenate(([1.0], np.cumprod((2 * j + 1) / (2 * j))))
    q = np.concatenate(([1.0], np.cumprod((2 * j + 2 + z) / (2 * j))))
    return GFTable(z, n_max, seeds, seed_sums, pg, pz, q, gz)


def expected_gf(i: int, n: int, z: float) -> float:
    """Exact E[Gf_n^i(z)] for z in (0,1), 1 <= i <= n+1."""
    if not 0.0 < z < 1.0:
        raise ValueError("z must lie in (0,1)")
    if not 1 <= i <= n + 1:
        raise ValueError("need 1 <= i <= n+1")
    return build_gf_table(z, n).e_g(i, n)


def exact_gf_tables(z: Fraction, n_max: int):
    """Rational-arithmetic oracle of the same sweep (n_max <= a few hundred).

    Returns (seeds, gz_by_step, ez_by_step) where gz_by_step[m][j] is the
    exact joint moment at step m.
    """
    z = Fraction(z)
    seeds: dict[int, Fraction] = {1: Fraction(1), 2: Fraction(1)}
    gz: dict[int, Fraction] = {1: Fraction(1), 2: Fraction(1)}
    ez: dict[int, Fraction] = {1: Fraction(1), 2: Fraction(1)}
    gz_steps: dict[int, dict[int, Fraction]] = {1: dict(gz)}
    ez_steps: dict[int, dict[int, Fraction]] = {1: dict(ez)}
    for m in range(1, n_max):
        s = sum(gz[j] for j in range(1, m + 2))
        seeds[m + 2] = 1 + z * s / (2 * m)
        for j in range(1, m + 2):
            gz[j] = Fraction(2 * m + 2) * gz[j] / (2 * m) + z * gz[j] / (2 * m) + ez[j] / (2 * m)
            ez[j] = Fraction(2 * m + 1, 2 * m) * ez[j]
        gz[m + 2] = seeds[m + 2]
        ez[m + 2] = Fraction(1)
        gz_steps[m + 1] = dict(gz)
        ez_steps[m + 1] = dict(ez)
    return seeds, gz_steps, ez_steps


def exact_gf(i: int, n: int, z: Fraction) -> Fraction:
    """Exact rational E[Gf_n^i(z)]."""
    if not 1 <= i <= n + 1:
        raise ValueError("need 1 <= i <= n+1")
    if n <= i - 2:
        return Fraction(0)
    z = Fraction(z)
    seeds, _, _ = exact_gf_tables(z, max(n, 1))
    if i <= 2:
        val = Fraction(1)
        lo = 1
    else:
        val = seeds[i]
        lo = i - 1
    for j in range(lo, n):
        val *= Fraction(2 * j + 1) + z
        val /= 2 * j
    return val


# ----------------------------------------------------------------------
# the growth-bound parameter z0
# ----------------------------------------------------------------------

def _bound_terms(z: float) -> tuple[float, float, float]:
    """The three auxiliary bound functions at their largest (n = 4) value."""
    e = math.exp
    a1 = e((2 + z) / 2) + e((1 + z) / 2) / 2 * (3 + z) / (1 + z)
    a2 = e((2 + z) / 2) + 0.5
    a3 = 2 * e((2 + z) / 2) + e(0.5) + e((3 + z) / 2) * (3 + z) / (1 + z)
    return a1, a2, a3


def growth_condition(z: float) -> float:
    """Left side of the feasibility inequality for the fresh-vertex profile
    bound; values <= 1 are feasible. Tends to 3^(-1/2) < 1 as z -> 0."""
    a1, a2, a3 = _bound_terms(z)
    return 3.0 ** (-(1 + z) / 2) + z / 2 * (a1 + a2 + a3 + 0.5)


def find_z0(tol: float = 1e-9) -> float:
    """Largest z in (0,1) with growth_condition(z) <= 1, by bisection.

    The condition is strictly increasing on (0,1) (checked by test sweep),
    so the feasible set is an interval anchored at 0.
    """
    lo, hi = 0.0, 1.0
    if growth_condition(tol) > 1.0:
        raise RuntimeError("feasible region unexpectedly empty")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if growth_condition(mid) <= 1.0:
            lo = mid
        else:
            hi = mid
    return lo


def verify_bounds(z0: float, n_max: int) -> TestReport:
    """Check the proven profile growth bounds on the exact DP tables.

    fresh-vertex bound: E[Gf_{i-1}^i(z0)] <= (i-1)^((1+z0)/2) for i >= 2;
    global bound: E[Gf_n^i(z0)] <= e^((1+z0)/2) n^((1+z0)/2) for all valid
    (i, n) with n <= n_max. A violation is a hard failure since the bounds
    are theorems; it would mean the DP is wrong.
    """
    table = build_gf_table(z0, n_max)
    expo = (1 + z0) / 2
    i_idx = np.arange(2, n_max + 2)
    seed_ratio = table.seeds[2 : n_max + 2] / (i_idx - 1) ** expo
    max_seed_ratio = float(seed_ratio.max())
    const = math.exp(expo)
    max_global_ratio = 0.0
    ns = np.arange(1, n_max + 1, dtype=float)
    bound = const * ns**expo
    # i = 1, 2 share the same profile expectation
    max_global_ratio = max(max_global_ratio, float((table.pg[: n_max] / bound).max()))
    for i in range(3, n_max + 2):
        vals = table.seeds[i] * table.pg[i - 2 : n_max] / table.pg[i - 2]
        ratio = vals / bound[i - 2 :]
        if ratio.size:
            max_global_ratio = max(max_global_ratio, float(ratio.max()))
    if max_seed_ratio > 1.0 or max_global_ratio > 1.0:
        raise RuntimeError(
            f"profile growth bound violated (seed ratio {max_seed_ratio:.6g}, "
            f"global ratio {max_global_ratio:.6g}); the DP must be wrong"
        )
    return TestReport(
        name="profile-bounds", statistic="sup-norm", value=max(max_seed_ratio, max_global_ratio),
        threshold=1.0, family="scale_free(0)", n=n_max, replicas=0, seed=0,
        reference="fresh-vertex and global profile growth bounds",
        details={"z0": z0, "max_seed_ratio": max_seed_ratio, "max_global_ratio": max_global_ratio},
    )


# ----------------------------------------------------------------------
# Monte Carlo cross-check
# ----------------------------------------------------------------------

def mc_profile_grid(
    n: int, i_list, z_list, replicas: int, seed: int, *, chunk: int = 20000
) -> tuple[np.ndarray, np.ndarray]:
    """Simulated profile sums for T_n from every source in i_list at every z.

    Returns (means, standard_errors) of shape (len(i_list), len(z_list)).
    """
    srcs = np.asarray(list(i_list), dtype=np.int64)
    zs = np.asarray(list(z_list), dtype=float)
    if (srcs < 1).any() or (srcs > n + 1).any():
        raise ValueError("sources must lie in 1..n+1")
    if ((zs <= 0) | (zs >= 1)).any():
        raise ValueError("z must lie in (0,1)")
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = stream(seed)
    acc = np.zeros((srcs.size, zs.size))
    acc2 = np.zeros_like(acc)
    done = 0
    while done < replicas:
        b = min(chunk, replicas - done)
        out = np.empty((b, srcs.size, zs.size))
        if n == 1:
            out[:] = 1.0  # single edge: one vertex at distance 1 from either end
        else:
            u = rng.random((b, n - 1))
            _kernels.sf0_profile_batch(n, srcs, zs, u, out)
        acc += out.sum(axis=0)
        acc2 += (out**2).sum(axis=0)
        done += b
    mean = acc / replicas
    var = np.maximum(acc2 / replicas - mean**2, 0.0)
    se = np.sqrt(var / replicas)
    return mean, se


def mc_profile(i: int, n: int, z: float, replicas: int, seed: int) -> tuple[float, float]:
    """Monte Carlo estimate (mean, standard error) of E[Gf_n^i(z)]."""
    mean, se = mc_profile_grid(n, [i], [z], replicas, seed)
    return float(mean[0, 0]), float(se[0, 0])
