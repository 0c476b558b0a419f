"""
Tests for the Welch t-test and the steep/inhibition phase comparison
"""

import math

import networkx as nx
import numpy as np
import pytest
from scipy import integrate, stats

from cascade_model import WindowGraph
from motif_engine import build_catalog
from motif_percolation import coverage_table
from phase_comparison import (
    InsufficientSampleError,
    SampleSummary,
    compare_phases,
    phase_means_table,
    phase_samples,
    student_t_two_sided,
    welch_t_test,
)

CATALOG = build_catalog(5)
P0, P1, P2 = CATALOG[0], CATALOG[1], CATALOG[2]


def test_welch_hand_example():
    result = welch_t_test([0.1, 0.2, 0.3], [0.4, 0.5, 0.6])
    assert result.t == pytest.approx(-3.674, abs=1e-3)
    assert result.dof == pytest.approx(4.0)
    assert result.p == pytest.approx(0.0213, abs=1e-4)
    assert not result.significant
    assert welch_t_test([0.1, 0.2, 0.3], [0.4, 0.5, 0.6], alpha=0.05).significant
    assert result.means == pytest.approx((0.2, 0.5))
    assert result.n == (3, 3)


@pytest.mark.parametrize("seed", range(10))
def test_welch_matches_scipy(seed):
    rng = np.random.default_rng(seed)
    a = rng.normal(0.3, 0.1, size=int(rng.integers(2, 40)))
    b = rng.normal(0.35, 0.2, size=int(rng.integers(2, 40)))
    ours = welch_t_test(a, b)
    ref = stats.ttest_ind(a, b, equal_var=False)
    assert ours.t == pytest.approx(ref.statistic, rel=1e-9)
    assert ours.p == pytest.approx(ref.pvalue, rel=1e-6, abs=1e-12)


def test_two_sided_tail_matches_scipy_grid():
    for t in np.linspace(0.05, 8.0, 20):
        for dof in np.geomspace(1.0, 200.0, 20):
            assert student_t_two_sided(t, dof) == pytest.approx(2 * stats.t.sf(t, dof), abs=1e-6)


def test_two_sided_tail_matches_density_integral():
    t, dof = 1.7, 6.5
    tail, _ = integrate.quad(lambda x: stats.t.pdf(x, dof), t, math.inf)
    assert student_t_two_sided(t, dof) == pytest.approx(2 * tail, abs=1e-8)


def test_two_sided_tail_edges():
    assert student_t_two_sided(0.0, 5.0) == 1.0
    assert student_t_two_sided(math.inf, 5.0) == 0.0
    assert student_t_two_sided(-math.inf, 5.0) == 0.0
    assert student_t_two_sided(-2.0, 5.0) == student_t_two_sided(2.0, 5.0)


def test_identical_samples():
    result = welch_t_test([0.2, 0.4, 0.6], [0.2, 0.4, 0.6])
    assert result.t == 0.0
    assert result.p == pytest.approx(1.0)
    assert not result.significant


def test_symmetry_and_scale_invariance():
    a, b = [0.1, 0.25, 0.3, 0.5], [0.5, 0.6, 0.62, 0.9, 0.7]
    ab, ba = welch_t_test(a, b), welch_t_test(b, a)
    assert ab.t == pytest.approx(-ba.t)
    assert ab.p == pytest.approx(ba.p)
    scaled = welch_t_test([3 * x for x in a], [3 * x for x in b])
    assert scaled.t == pytest.approx(ab.t)
    assert scaled.dof == pytest.approx(ab.dof)


def test_larger_gap_gives_smaller_p():
    base = [0.1, 0.2, 0.3, 0.25]
    ps = [welch_t_test(base, [x + shift for x in base]).p for shift in (0.05, 0.1, 0.2, 0.4)]
    assert ps == sorted(ps, reverse=True)


def test_zero_variance_samples():
    same = welch_t_test([0.5, 0.5, 0.5], [0.5, 0.5])
    assert (same.t, same.p, same.dof) == (0.0, 1.0, 3.0)
    apart = welch_t_test([0.5, 0.5], [0.7, 0.7])
    assert apart.t == -math.inf and apart.p == 0.0 and apart.significant
    one_flat = welch_t_test([1.0, 1.0, 1.0], [0.2, 0.4, 0.3])
    assert one_flat.dof == pytest.approx(2.0)
    assert math.isfinite(one_flat.t)


def test_insufficient_samples_and_bad_alpha():
    with pytest.raises(InsufficientSampleError):
        welch_t_test([0.1], [0.2, 0.3])
    with pytest.raises(InsufficientSampleError):
        SampleSummary.of([])
    with pytest.raises(ValueError):
        welch_t_test([0.1, 0.2], [0.3, 0.4], alpha=0.0)


def test_compare_identical_cascades():
    corpus = [({P0: 0.4, P1: 0.8}, {P0: 0.4, P1: 0.8}) for _ in range(5)]
    results = compare_phases(corpus)
    assert [r.catalog_index for r in results] == [0, 1]
    assert all(r.p == pytest.approx(1.0) and not r.significant for r in results)
    assert all(r.p_bonferroni == pytest.approx(1.0) for r in results)


def test_absent_patterns_count_as_zero():
    corpus = [
        ({P0: 0.5}, {P0: 0.6, P2: 0.9}),
        ({P0: 0.4}, {P0: 0.5, P2: 0.8}),
        ({P0: 0.3}, {P0: 0.7}),
    ]
    samples = phase_samples(corpus)
    assert samples[P2] == ([0.0, 0.0, 0.0], [0.9, 0.8, 0.0])

    skipped = phase_samples(corpus, absent_as_zero=False)
    assert skipped[P2] == ([], [0.9, 0.8])
    results = compare_phases(corpus, absent_as_zero=False)
    by_index = {r.catalog_index: r for r in results}
    assert by_index[2].skipped and by_index[2].p is None
    assert by_index[2].n == (0, 2)
    assert not by_index[0].skipped


def test_bonferroni_counts_tested_patterns():
    corpus = [
        ({P0: 0.1 + 0.01 * i, P1: 0.5}, {P0: 0.3 + 0.02 * i, P1: 0.5 + 0.01 * i})
        for i in range(6)
    ]
    for r in compare_phases(corpus):
        assert r.p_bonferroni == pytest.approx(min(1.0, 2 * r.p))


def test_compare_accepts_coverage_results():
    graph = WindowGraph.from_networkx(nx.complete_graph(6))
    table = coverage_table(graph, 5, rng_seed=0)
    corpus = [(table, table) for _ in range(3)]
    (result,) = compare_phases(corpus)
    assert result.means == (1.0, 1.0)
    assert result.p == 1.0


def test_phase_means_table():
    results = compare_phases([({P0: 0.2}, {P0: 0.6}), ({P0: 0.4}, {P0: 0.8})])
    rows = phase_means_table(results)
    assert rows == [
        {"phase": "steep", "catalog_index": 0, "n": 2, "mean_nc": pytest.approx(0.3)},
        {"phase": "inhib", "catalog_index": 0, "n": 2, "mean_nc": pytest.approx(0.7)},
    ]


def test_to_row_columns():
    row = welch_t_test([0.1, 0.2], [0.3, 0.5], pattern=P1).to_row()
    assert row["catalog_index"] == 1
    assert set(row) == {
        "catalog_index", "n_steep", "n_inhib", "mean_steep", "mean_inhib",
        "t", "dof", "p", "significant", "p_bonferroni"
    }
