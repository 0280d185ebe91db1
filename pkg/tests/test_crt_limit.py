import math
from collections import Counter

import numpy as np
import pytest

from crt_subaging.cli_harness import derive_stream
from crt_subaging.crt_limit import (MarkSet, SamplePartition, MixingVariable,
                                    block_frequencies, estimate_R, evolve_marks,
                                    init_marks, mixed_pair_prob,
                                    pair_joint_survival, partition_from_marks,
                                    sample_reduced_tree, sample_reflected_bm)
from crt_subaging.random_trees import ReducedTree, shape_key
from crt_subaging.stats import (chi_square_critical, chi_square_poisson,
                                chi_square_two_sample, chi_square_uniform,
                                ks_vs_cdf)


def single_edge_tree(length):
    return ReducedTree(2, 2, ((0, 1),), np.array([length]))


# -- mixing variable ----------------------------------------------------------


def test_reflected_bm_positive_and_moments():
    rng = derive_stream(601, 0)
    draws = np.array([sample_reflected_bm(1.0, rng) for _ in range(100_000)])
    assert np.all(draws > 0)
    assert abs(draws.mean() - math.sqrt(2 / math.pi)) < 0.01
    below_one = float(np.mean(draws <= 1.0))
    assert abs(below_one - 0.682689) < 0.01
    with pytest.raises(ValueError):
        sample_reflected_bm(0.0, rng)
    with pytest.raises(ValueError):
        MixingVariable(r=0.0, t=1.0)


def test_reflected_bm_scales_with_t():
    rng = derive_stream(601, 1)
    draws = np.array([sample_reflected_bm(4.0, rng) for _ in range(50_000)])
    assert abs(draws.mean() - 2 * math.sqrt(2 / math.pi)) < 0.02


# -- reduced tree sampler -----------------------------------------------------


def test_reduced_tree_i2_rayleigh():
    rng = derive_stream(602, 0)
    lengths = np.array([sample_reduced_tree(2, rng).lengths[0]
                        for _ in range(100_000)])
    assert abs(lengths.mean() - math.sqrt(math.pi / 2)) < 0.01
    ks = ks_vs_cdf(lengths, lambda x: 1 - math.exp(-x * x / 2) if x > 0 else 0.0)
    assert ks < 0.01


def test_reduced_tree_i3_unique_shape():
    rng = derive_stream(602, 1)
    rt = sample_reduced_tree(3, rng)
    assert rt.leaf_count == 3
    assert len(rt.edges) == 3 and rt.node_count == 4
    assert (2 * 3 - 5) == 1  # double factorial count: single topology


def test_reduced_tree_i4_shape_uniformity():
    rng = derive_stream(602, 2)
    counts = Counter()
    for _ in range(6000):
        counts[shape_key(sample_reduced_tree(4, rng))] += 1
    assert len(counts) == 3
    assert chi_square_uniform(list(counts.values())) < chi_square_critical(2)


def test_reduced_tree_structure_counts():
    rng = derive_stream(602, 3)
    for i in (2, 3, 5, 17, 64):
        rt = sample_reduced_tree(i, rng)
        assert len(rt.edges) == 2 * i - 3
        assert rt.node_count - rt.leaf_count == i - 2
        assert np.all(rt.lengths > 0)
    with pytest.raises(ValueError):
        sample_reduced_tree(1, rng)


# -- mark process -------------------------------------------------------------


def test_init_marks_poisson_dispersion():
    rng = derive_stream(603, 0)
    tree = sample_reduced_tree(6, rng)
    totals = np.array([len(init_marks(tree, 1.0, rng)) for _ in range(100_000)])
    lam = tree.total_length
    ratio = totals.var() / totals.mean()
    assert 0.97 <= ratio <= 1.03
    assert abs(totals.mean() - lam) < 0.05 * lam


def test_init_marks_vanishing_intensity():
    rng = derive_stream(603, 1)
    tree = sample_reduced_tree(5, rng)
    empty = sum(len(init_marks(tree, 1e-6, rng)) == 0 for _ in range(2000))
    assert empty >= 1990
    with pytest.raises(ValueError):
        init_marks(tree, 0.0, rng)


def test_init_marks_gap_probability():
    # single edge of length 1 at r=1: P(no atoms) = 1/e
    rng = derive_stream(603, 2)
    tree = single_edge_tree(1.0)
    empty = sum(len(init_marks(tree, 1.0, rng)) == 0 for _ in range(100_000))
    assert abs(empty / 100_000 - math.exp(-1)) < 0.01


def test_evolve_delta_zero_is_identity():
    rng = derive_stream(604, 0)
    tree = sample_reduced_tree(6, rng)
    marks = init_marks(tree, 1.0, rng)
    out = evolve_marks(tree, marks, 1.0, 0.0, rng)
    assert np.array_equal(out.edge_ids, marks.edge_ids)
    assert np.array_equal(out.positions, marks.positions)


def test_evolve_large_delta_regenerates():
    # survivors vanish; birth intensity approaches the stationary r
    rng = derive_stream(604, 1)
    tree = single_edge_tree(2.0)
    survived = 0
    totals = []
    for _ in range(30_000):
        marks = init_marks(tree, 1.0, rng)
        out = evolve_marks(tree, marks, 1.0, 200.0, rng)
        old = set(marks.positions.tolist())
        survived += sum(1 for p in out.positions.tolist() if p in old)
        totals.append(len(out))
    assert survived == 0
    stat, df = chi_square_poisson(np.array(totals), 2.0)
    assert stat < chi_square_critical(df)


def test_evolve_survival_probability_half():
    rng = derive_stream(604, 2)
    tree = single_edge_tree(5.0)
    delta = 2 * math.log(2)  # exp(-delta/2) = 1/2 at r = 1
    total = kept = 0
    while total < 100_000:
        marks = init_marks(tree, 1.0, rng)
        out = evolve_marks(tree, marks, 1.0, delta, rng)
        old = set(out.positions.tolist())
        total += len(marks)
        kept += sum(1 for p in marks.positions.tolist() if p in old)
    assert abs(kept / total - 0.5) < 0.01


def test_evolve_stationarity_per_edge_counts():
    rng = derive_stream(604, 3)
    tree = sample_reduced_tree(8, rng)
    reps = 20_000
    n_e = len(tree.edges)
    counts = np.empty((reps, n_e), dtype=np.int64)
    for b in range(reps):
        marks = init_marks(tree, 1.0, rng)
        out = evolve_marks(tree, marks, 1.0, 0.7, rng)
        counts[b] = np.bincount(out.edge_ids, minlength=n_e)
    stat_sum = df_sum = 0
    for e in range(n_e):
        try:
            stat, df = chi_square_poisson(counts[:, e], float(tree.lengths[e]))
        except ValueError:
            continue
        stat_sum += stat
        df_sum += df
    assert df_sum >= 2
    assert stat_sum < chi_square_critical(df_sum)


def test_evolve_semigroup_in_distribution():
    # evolve(0.3) then evolve(0.4) vs evolve(0.7): joint law of
    # (original survivors, newcomers) must match
    rng = derive_stream(604, 4)
    tree = single_edge_tree(3.0)

    def routes(two_step):
        marks = init_marks(tree, 1.0, rng)
        orig = set(marks.positions.tolist())
        if two_step:
            mid = evolve_marks(tree, marks, 1.0, 0.4, rng)
            out = evolve_marks(tree, mid, 1.0, 0.3, rng)
        else:
            out = evolve_marks(tree, marks, 1.0, 0.7, rng)
        kept = sum(1 for p in out.positions.tolist() if p in orig)
        return kept, len(out) - kept

    reps = 30_000
    cells_a = Counter(routes(True) for _ in range(reps))
    cells_b = Counter(routes(False) for _ in range(reps))
    keys = sorted(set(cells_a) | set(cells_b))
    a = np.array([cells_a.get(k, 0) for k in keys], dtype=float)
    b = np.array([cells_b.get(k, 0) for k in keys], dtype=float)
    # pool sparse joint cells to keep expected counts reasonable
    keep = (a + b) >= 10
    a = np.append(a[keep], a[~keep].sum())
    b = np.append(b[keep], b[~keep].sum())
    stat, df = chi_square_two_sample(a, b)
    assert stat < chi_square_critical(df)


def test_evolve_rejects_mismatched_tree():
    rng = derive_stream(604, 5)
    t1 = sample_reduced_tree(4, rng)
    t2 = sample_reduced_tree(4, rng)
    marks = init_marks(t1, 1.0, rng)
    with pytest.raises(ValueError):
        evolve_marks(t2, marks, 1.0, 0.5, rng)
    with pytest.raises(ValueError):
        evolve_marks(t1, marks, 1.0, -0.5, rng)


# -- partitions ---------------------------------------------------------------


def test_partition_no_marks_single_block():
    rng = derive_stream(605, 0)
    tree = sample_reduced_tree(5, rng)
    empty = MarkSet(tree, np.array([], dtype=np.int64), np.array([]))
    p = partition_from_marks(tree, empty)
    assert p.blocks == frozenset({frozenset({1, 2, 3, 4, 5})})


def test_partition_atom_on_every_edge_singletons():
    rng = derive_stream(605, 1)
    tree = sample_reduced_tree(5, rng)
    ids = np.arange(len(tree.edges))
    marks = MarkSet(tree, ids, tree.lengths / 2)
    p = partition_from_marks(tree, marks)
    assert p.blocks == frozenset(frozenset({k}) for k in range(1, 6))


def test_partition_i3_single_atom():
    rng = derive_stream(605, 2)
    tree = sample_reduced_tree(3, rng)
    to_leaf1 = next(k for k, (a, b) in enumerate(tree.edges) if 0 in (a, b))
    marks = MarkSet(tree, np.array([to_leaf1]),
                    np.array([tree.lengths[to_leaf1] / 2]))
    p = partition_from_marks(tree, marks)
    assert p.blocks == frozenset({frozenset({1}), frozenset({2, 3})})


def test_partition_refines_under_more_atoms():
    rng = derive_stream(605, 3)
    for _ in range(30):
        tree = sample_reduced_tree(7, rng)
        base = init_marks(tree, 0.8, rng)
        extra = init_marks(tree, 0.8, rng)
        merged = MarkSet(tree,
                         np.concatenate([base.edge_ids, extra.edge_ids]),
                         np.concatenate([base.positions, extra.positions]))
        coarse = partition_from_marks(tree, base)
        fine = partition_from_marks(tree, merged)
        for fb in fine.blocks:
            assert any(fb <= cb for cb in coarse.blocks)


def test_partition_exchangeable_pair_probabilities():
    # leaf labels are exchangeable: P(1,2 together) == P(6,7 together)
    rng = derive_stream(605, 4)
    hits_12 = hits_67 = 0
    reps = 4000
    for _ in range(reps):
        tree = sample_reduced_tree(7, rng)
        p = partition_from_marks(tree, init_marks(tree, 1.0, rng))
        for b in p.blocks:
            if 1 in b:
                hits_12 += 2 in b
            if 6 in b:
                hits_67 += 7 in b
    assert abs(hits_12 / reps - hits_67 / reps) < 0.04


def test_block_frequencies_examples():
    p = SamplePartition(frozenset({frozenset({1, 2}), frozenset({3})}))
    assert np.allclose(block_frequencies(p, 3), [2 / 3, 1 / 3])
    whole = SamplePartition(frozenset({frozenset({1, 2, 3, 4})}))
    assert np.array_equal(block_frequencies(whole, 4), [1.0])
    singles = SamplePartition(frozenset(frozenset({k}) for k in range(1, 5)))
    assert np.array_equal(block_frequencies(singles, 4), [0.25] * 4)
    with pytest.raises(ValueError):
        block_frequencies(whole, 5)


def test_block_frequencies_is_mass_partition():
    rng = derive_stream(605, 5)
    for _ in range(40):
        tree = sample_reduced_tree(32, rng)
        f = block_frequencies(partition_from_marks(tree, init_marks(tree, 1.5, rng)), 32)
        assert abs(f.sum() - 1.0) < 1e-12
        assert all(a >= b for a, b in zip(f, f[1:]))


def test_sample_partition_validation():
    with pytest.raises(ValueError):
        SamplePartition(frozenset({frozenset()}))


# -- estimator and analytic oracles -------------------------------------------


def test_estimate_R_algebraic_inversion():
    masses = np.array([2 / (math.pi * 4 * i * i) for i in range(1, 50)])
    assert estimate_R(masses, (3, 20)) == pytest.approx(2.0)
    masses = np.array([2 / (math.pi * i * i) for i in range(1, 50)])
    assert estimate_R(masses, (1, 49)) == pytest.approx(1.0)


def test_estimate_R_errors():
    masses = np.array([0.6, 0.3, 0.1, 0.0])
    with pytest.raises(ValueError):
        estimate_R(masses, (2, 1))
    with pytest.raises(ValueError):
        estimate_R(masses, (1, 9))  # beyond length
    with pytest.raises(ValueError):
        estimate_R(masses, (3, 4))  # zero mass in window


def test_estimate_R_recovers_intensity_at_feasible_ranks():
    # with 4096 leaves at r=1 the partition carries ~90 blocks; ranks 8..30
    # are populated and resolve masses well above the 1/4096 floor
    rng = derive_stream(606, 0)
    vals = []
    for _ in range(30):
        tree = sample_reduced_tree(4096, rng)
        f = block_frequencies(partition_from_marks(tree, init_marks(tree, 1.0, rng)), 4096)
        vals.append(estimate_R(f, (8, 30)))
    assert abs(np.mean(vals) - 1.0) < 0.15


def test_pair_joint_survival_values():
    assert pair_joint_survival(1.0, 1.0, 0.0) == pytest.approx(math.exp(-1))
    assert pair_joint_survival(1.0, 1.0, 1e9) == pytest.approx(math.exp(-2))
    assert pair_joint_survival(1.0, 1.0, 2 * math.log(2)) == \
        pytest.approx(math.exp(-1.5))
    with pytest.raises(ValueError):
        pair_joint_survival(0.0, 1.0, 1.0)


def test_pair_joint_survival_monte_carlo():
    # single edge, r=1, delta = 2 ln 2: simulate both epochs
    rng = derive_stream(606, 1)
    tree = single_edge_tree(1.0)
    delta = 2 * math.log(2)
    hits = 0
    reps = 100_000
    for _ in range(reps):
        m0 = init_marks(tree, 1.0, rng)
        if len(m0) == 0:
            m1 = evolve_marks(tree, m0, 1.0, delta, rng)
            hits += len(m1) == 0
    assert abs(hits / reps - pair_joint_survival(1.0, 1.0, delta)) < 0.01


def test_mixed_pair_prob_limits_and_monotonicity():
    assert mixed_pair_prob(1e-6, 1.0) > 0.995
    grid_d = [mixed_pair_prob(1.0, d) for d in (0.0, 0.5, 1.0, 2.0, 4.0)]
    assert all(a >= b - 1e-9 for a, b in zip(grid_d, grid_d[1:]))
    grid_t = [mixed_pair_prob(t, 1.0) for t in (0.25, 0.5, 1.0, 2.0)]
    assert all(a >= b - 1e-9 for a, b in zip(grid_t, grid_t[1:]))


def test_mixed_pair_prob_closed_form_at_delta_zero():
    # V(t, 0) = E[exp(-R_t * L)]; for t = 1 the double integral is exactly 1/2
    assert mixed_pair_prob(1.0, 0.0) == pytest.approx(0.5, abs=1e-6)


def test_mixed_pair_prob_vs_monte_carlo():
    rng = derive_stream(606, 2)
    n = 400_000
    r = np.abs(rng.standard_normal(n))
    l = np.sqrt(rng.chisquare(2, n))
    mc = float(np.mean(np.exp(-r * l)))
    assert abs(mixed_pair_prob(1.0, 0.0) - mc) < 0.005


def test_mixed_pair_prob_vs_semianalytic():
    # collapse the inner integral analytically and integrate once:
    # int_0^inf l e^{-l^2/2 - a l} dl = 1 - a e^{a^2/2} sqrt(pi/2) erfc(a/sqrt 2)
    from crt_subaging.quadrature import integrate

    def semi(t, d):
        c = math.sqrt(2 / (t * math.pi))

        def f(rs):
            out = np.empty_like(rs)
            for j, r in enumerate(rs):
                a = r * (2 - math.exp(-d / (2 * r))) if r > 0 else 0.0
                inner = 1 - a * math.exp(a * a / 2) * math.sqrt(math.pi / 2) \
                    * math.erfc(a / math.sqrt(2))
                out[j] = inner * c * math.exp(-r * r / (2 * t))
            return out

        return integrate(f, 0, 8 * math.sqrt(t), tol=1e-9).value

    for t, d in ((1.0, 0.0), (1.0, 1.0), (0.5, 2.0), (2.0, 0.7)):
        assert mixed_pair_prob(t, d) == pytest.approx(semi(t, d), abs=1e-6)
