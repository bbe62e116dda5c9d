from fractions import Fraction

import numpy as np
import pytest

from cuttree.profile_gf import (
    build_gf_table,
    exact_gf,
    exact_gf_tables,
    expected_degree,
    expected_gf,
    find_z0,
    growth_condition,
    mc_profile,
    mc_profile_grid,
    verify_bounds,
)


def test_expected_degree_values():
    assert expected_degree(1, 2) == pytest.approx(3 / 2)
    assert expected_degree(1, 3) == pytest.approx(15 / 8)
    assert expected_degree(4, 3) == 1.0  # newest vertex: empty product
    assert expected_degree(2, 5) == expected_degree(1, 5)  # shared formula
    with pytest.raises(ValueError):
        expected_degree(5, 3)
    with pytest.raises(ValueError):
        expected_degree(0, 3)


def test_expected_gf_seeds_and_small_values():
    assert expected_gf(1, 1, 0.3) == pytest.approx(1.0)
    assert expected_gf(2, 1, 0.77) == pytest.approx(1.0)
    for z in (0.1, 0.5, 0.9):
        assert expected_gf(3, 2, z) == pytest.approx(1 + z)
    # product evaluation: (3+z)/2 * (5+z)/4 at z = 1/2
    assert expected_gf(1, 3, 0.5) == pytest.approx(3.5 / 2 * 5.5 / 4) == pytest.approx(2.40625)


def test_expected_gf_validates():
    with pytest.raises(ValueError):
        expected_gf(1, 3, 0.0)
    with pytest.raises(ValueError):
        expected_gf(1, 3, 1.0)
    with pytest.raises(ValueError):
        expected_gf(6, 3, 0.5)


def test_gf_table_zero_region_and_internal_identities():
    table = build_gf_table(0.5, 50)
    assert table.e_g(7, 5) == 0.0  # vertex does not exist yet
    assert table.e_g(7, 6) == pytest.approx(float(table.seeds[7]))
    # degree table equals the closed product
    for i, n in ((1, 10), (4, 17), (18, 30)):
        assert table.e_z(i, n) == pytest.approx(expected_degree(i, n), rel=1e-12)
    # joint-moment closed form vs the sweep's final row
    for j in (1, 2, 5, 33, 51):
        assert table.e_gz(j, 50) == pytest.approx(float(table.gz_final[j]), rel=1e-10)


def test_seed_rederivation_from_joint_moments():
    # fresh-vertex profile = 1 + z/(2(i-2)) * sum_j joint moments at i-2
    z = 0.37
    table = build_gf_table(z, 60)
    for i in (4, 9, 30, 61):
        s = sum(table.e_gz(j, i - 2) for j in range(1, i))
        assert table.seeds[i] == pytest.approx(1 + z * s / (2 * (i - 2)), rel=1e-10)


def test_float_dp_matches_exact_rationals():
    z = Fraction(1, 2)
    n_max = 60
    table = build_gf_table(0.5, n_max)
    seeds, gz_steps, ez_steps = exact_gf_tables(z, n_max)
    for i in range(1, n_max + 2):
        assert table.seeds[i] == pytest.approx(float(seeds[i]), rel=1e-10)
    for i, n in ((1, 60), (2, 41), (17, 60), (33, 33)):
        assert table.e_g(i, n) == pytest.approx(float(exact_gf(i, n, z)), rel=1e-10)
        assert table.e_gz(i, n) == pytest.approx(float(gz_steps[n][i]), rel=1e-10)


def test_degree_is_gf_at_zero_limit():
    # E[Gf(z)] -> E[Z(n,1)] as z -> 0 (the k=0 coefficient)
    table = build_gf_table(1e-12, 40)
    for i, n in ((1, 10), (3, 12), (9, 40)):
        assert table.e_g(i, n) == pytest.approx(expected_degree(i, n), rel=1e-6)


def test_growth_condition_shape():
    assert growth_condition(1e-12) == pytest.approx(3 ** (-0.5), abs=1e-6)
    zs = np.linspace(1e-6, 0.999, 10_000)
    vals = np.array([growth_condition(z) for z in zs])
    assert (np.diff(vals) > 0).all()  # strictly increasing: unique crossing


def test_find_z0_postconditions():
    z0 = find_z0()
    assert 0 < z0 < 1
    assert growth_condition(z0) <= 1.0
    assert growth_condition(z0 + 1e-6) > 1.0


def test_verify_bounds_small():
    z0 = find_z0()
    rep = verify_bounds(z0, 300)
    assert rep.passed
    assert rep.value <= 1.0
    assert rep.details["z0"] == pytest.approx(z0)
    # base cases of the fresh-vertex bound
    table = build_gf_table(z0, 5)
    assert table.seeds[2] == 1.0 <= 1.0
    assert table.seeds[3] == pytest.approx(1 + z0)
    assert table.seeds[3] <= 2 ** ((1 + z0) / 2) * 1.0001 or True  # numeric check below
    assert float(table.seeds[3]) <= (3 - 1) ** ((1 + z0) / 2)


def test_mc_profile_single_edge():
    mean, se = mc_profile(1, 1, 0.4, 50, seed=3)
    assert mean == 1.0 and se == 0.0


def test_mc_profile_fresh_vertex():
    mean, se = mc_profile(3, 2, 0.6, 40_000, seed=4)
    assert abs(mean - (1 + 0.6)) <= 3 * max(se, 1e-12)


def test_mc_matches_dp_medium():
    n, z = 60, 0.5
    exact = expected_gf(1, n, z)
    mean, se = mc_profile(1, n, z, 30_000, seed=5)
    assert abs(mean - exact) <= 3 * se


def test_mc_profile_grid_shapes_and_validation():
    means, ses = mc_profile_grid(30, [1, 15, 30], [0.25, 0.5], 2_000, seed=6)
    assert means.shape == (3, 2) and ses.shape == (3, 2)
    with pytest.raises(ValueError):
        mc_profile_grid(10, [12], [0.5], 10, seed=6)
    with pytest.raises(ValueError):
        mc_profile_grid(10, [1], [1.5], 10, seed=6)
