import itertools
import math
from collections import Counter

import numpy as np
import pytest
from scipy import stats as sp_stats

import naive
from cuttree import (
    RootedTree,
    build_cut_tree,
    gen_urt,
    multi_isolation,
    multi_isolation_profile,
    permutation_schedule,
    run_destruction,
    sample_schedule,
    schedule_from_order,
)
from cuttree.rng import stream

PATH3 = RootedTree(3, np.array([0, 0, 1, 2]))


def test_schedule_requires_edges(rng):
    single = RootedTree(1, np.zeros(2, dtype=np.int64))
    with pytest.raises(ValueError):
        sample_schedule(single, 1.0, rng)
    with pytest.raises(ValueError):
        permutation_schedule(single, rng)


def test_schedule_order_two_vertices(rng):
    t = RootedTree(2, np.array([0, 0, 1]))
    s = sample_schedule(t, 5.0, rng)
    assert s.order().tolist() == [2]
    assert s.ell == 5.0


def test_exponential_survival_fraction():
    # edge survival probability at time t is exp(-t/ell)
    rng = stream(21)
    n, ell = 100_001, 10.0
    t = gen_urt(n, rng)
    s = sample_schedule(t, ell, rng)
    for tt in (2.0, 10.0, 25.0):
        frac = float((s.times[2:] > tt).mean())
        p = math.exp(-tt / ell)
        assert abs(frac - p) < 3 * math.sqrt(p * (1 - p) / (n - 1))


def test_permutation_orders_uniform():
    # all 6 orders of a 4-vertex tree equally likely (chi-square)
    rng = stream(22)
    t = RootedTree(4, np.array([0, 0, 1, 1, 2]))
    reps = 60_000
    counts = Counter(tuple(permutation_schedule(t, rng).order().tolist()) for _ in range(reps))
    assert set(counts) == set(itertools.permutations([2, 3, 4]))
    chi, p = sp_stats.chisquare(list(counts.values()))
    assert p > 0.001


def test_schedule_from_order_validates():
    with pytest.raises(ValueError):
        schedule_from_order(PATH3, [2, 2])
    with pytest.raises(ValueError):
        schedule_from_order(PATH3, [2])


def test_path3_hand_run():
    # cut (1,2) first: both 2 and 3 leave at once; one root cut total
    tr = run_destruction(PATH3, schedule_from_order(PATH3, [2, 3]))
    assert tr.disconnect_time[2] == tr.disconnect_time[3] == 0.0
    assert len(tr.root_cut_times) == 1
    assert tr.x_times.tolist() == [0.0]
    assert tr.x_sizes.tolist() == [1]
    # cut (2,3) first: two root cuts
    tr2 = run_destruction(PATH3, schedule_from_order(PATH3, [3, 2]))
    assert len(tr2.root_cut_times) == 2
    # average over both orders: 1.5
    assert (1 + 2) / 2 == 1.5


def test_run_rejects_mismatched_schedule(rng):
    t4 = gen_urt(4, rng)
    s3 = permutation_schedule(PATH3, rng)
    with pytest.raises(ValueError):
        run_destruction(t4, s3)


def test_trace_invariants_random(rng):
    for _ in range(20):
        n = int(rng.integers(2, 120))
        t = gen_urt(n, rng)
        s = sample_schedule(t, math.log(max(n, 2)) + 1, rng)
        tr = run_destruction(t, s)
        ct = build_cut_tree(t, s)
        depths = ct.leaf_depths()
        # X(t) = 1 + #{u : Gamma_u > t} at every jump
        for tt in tr.x_times[:: max(1, len(tr.x_times) // 17)]:
            assert tr.x_at(tt) == 1 + int((tr.disconnect_time[2:] > tt).sum())
        assert tr.x_sizes[-1] == 1
        # R(inf) equals the root leaf depth
        assert len(tr.root_cut_times) == ct.leaf_depth(1)
        # depth decomposition
        assert np.array_equal(tr.isolation_cuts[1:], depths[1:])
        assert (tr.residual_cuts[1:] >= 0).all()
        assert (tr.cuts_to_disconnect[1:] <= depths[1:]).all()
        assert tr.residual_cuts[1] == 0


def test_trace_matches_naive_exhaustive():
    # every observable vs explicit simulation across all small trees/orders
    for n in (2, 3, 4):
        for parent in naive.increasing_trees(n):
            t = RootedTree(n, parent)
            for order in naive.all_orders(n):
                s = schedule_from_order(t, list(order))
                tr = run_destruction(t, s)
                ref = naive.naive_run(parent, list(order))
                assert len(tr.root_cut_times) == ref["root_cuts"]
                for v in range(2, n + 1):
                    g = ref["gamma"][v]
                    assert tr.disconnect_time[v] == float(g)
                    assert tr.cuts_to_disconnect[v] == ref["y"][v]
                    assert tr.isolation_cuts[v] == ref["depth"][v]
                assert tr.isolation_cuts[1] == ref["depth"][1]
                # X step values after each cut
                for rank in range(n - 1):
                    assert tr.x_at(float(rank)) == ref["x_after"][rank]


def test_trace_matches_naive_random_medium(rng):
    for _ in range(25):
        n = int(rng.integers(5, 60))
        t = gen_urt(n, rng)
        s = permutation_schedule(t, rng)
        order = s.order().tolist()
        tr = run_destruction(t, s)
        ref = naive.naive_run(t.parent, order)
        assert len(tr.root_cut_times) == ref["root_cuts"]
        assert all(tr.cuts_to_disconnect[v] == ref["y"][v] for v in range(1, n + 1))
        assert all(tr.isolation_cuts[v] == ref["depth"][v] for v in range(1, n + 1))


def test_percolation_coupling(rng):
    # u,v in the same component at time t iff every path edge survives t
    n = 800
    t = gen_urt(n, rng)
    s = sample_schedule(t, math.log(n), rng)
    depths = t.depths()
    for tt in (1.0, 5.0, 12.0):
        comps = naive.naive_components_at(t.parent, s.times, tt)
        comp_of = {}
        for i, c in enumerate(comps):
            for v in c:
                comp_of[v] = i
        for _ in range(200):
            u, v = int(rng.integers(1, n + 1)), int(rng.integers(1, n + 1))
            same = comp_of[u] == comp_of[v]
            # min time along the u-v path
            a, b = u, v
            mt = math.inf
            da, db = depths[a], depths[b]
            while da > db:
                mt = min(mt, s.times[a]); a = t.parent[a]; da -= 1
            while db > da:
                mt = min(mt, s.times[b]); b = t.parent[b]; db -= 1
            while a != b:
                mt = min(mt, s.times[a], s.times[b])
                a, b = t.parent[a], t.parent[b]
            assert same == (mt > tt)


def test_exchangeability_of_discrete_observables():
    # depth samples under exponential clocks vs uniform permutation order
    rng1, rng2 = stream(23, 0), stream(23, 1)
    n, reps = 1000, 60
    d_exp, d_perm = [], []
    for _ in range(reps):
        t1 = gen_urt(n, rng1)
        tr1 = run_destruction(t1, sample_schedule(t1, math.log(n), rng1))
        d_exp.extend(tr1.isolation_cuts[rng1.integers(1, n + 1, size=10)].tolist())
        t2 = gen_urt(n, rng2)
        tr2 = run_destruction(t2, permutation_schedule(t2, rng2))
        d_perm.extend(tr2.isolation_cuts[rng2.integers(1, n + 1, size=10)].tolist())
    stat, p = sp_stats.ks_2samp(d_exp, d_perm)
    assert p > 0.01


def test_multi_isolation_exhaustive_small():
    for n in (3, 4, 5):
        for parent in itertools.islice(naive.increasing_trees(n), 0, None, 2):
            t = RootedTree(n, parent)
            for order in itertools.islice(naive.all_orders(n), 0, None, 3):
                s = schedule_from_order(t, list(order))
                for targets in ([1], [n], [1, n], [2, max(3, n - 1), 1]):
                    targets = list(dict.fromkeys(tg for tg in targets if tg <= n))
                    got = multi_isolation(t, s, targets)
                    z_ref, spread_ref = naive.naive_multi_isolation(parent, list(order), targets)
                    assert got.total_cuts == z_ref
                    assert got.spread_steps.tolist() == spread_ref


def test_multi_isolation_all_vertices_and_single(rng):
    for _ in range(30):
        n = int(rng.integers(2, 70))
        t = gen_urt(n, rng)
        s = permutation_schedule(t, rng)
        # all vertices: every cut counts
        assert multi_isolation(t, s, list(range(1, n + 1))).total_cuts == n - 1
        # single target: its cut-tree depth
        u = int(rng.integers(1, n + 1))
        ct = build_cut_tree(t, s)
        assert multi_isolation(t, s, [u]).total_cuts == ct.leaf_depth(u)
    with pytest.raises(ValueError):
        multi_isolation(t, s, [])


def test_multi_isolation_profile_consistent(rng):
    for _ in range(10):
        n = int(rng.integers(10, 80))
        t = gen_urt(n, rng)
        s = permutation_schedule(t, rng)
        targets = list(dict.fromkeys(rng.integers(1, n + 1, size=6).tolist()))[:4]
        prof = multi_isolation_profile(t, s, targets, range(1, len(targets) + 1))
        for j, got in prof.items():
            ref = multi_isolation(t, s, targets[:j])
            assert got.total_cuts == ref.total_cuts
            assert np.array_equal(got.spread_steps, ref.spread_steps)
