import itertools
import math
from fractions import Fraction

import pytest

from forestkit.forests import (
    ForestCountTable,
    g_exact,
    g_limit,
    g_partial_sums,
    g_sum_limit,
    g_value,
    log_phi,
    log_tree_count,
    phi,
    tree_count,
)
from forestkit.graph import Graph, component_count, is_induced_forest

# total forest counts on k labeled vertices (all component counts)
TOTAL_FORESTS = {1: 1, 2: 2, 3: 7, 4: 38, 5: 291, 6: 2932}


def forests_by_components_bruteforce(k):
    """Enumerate all 2^C(k,2) labeled graphs; count forests by component count."""
    pairs = list(itertools.combinations(range(k), 2))
    counts = {ell: 0 for ell in range(1, k + 1)}
    full = (1 << k) - 1
    for bits in range(1 << len(pairs)):
        adj = [0] * k
        e = 0
        m = bits
        while m:
            i = (m & -m).bit_length() - 1
            u, v = pairs[i]
            adj[u] |= 1 << v
            adj[v] |= 1 << u
            e += 1
            m &= m - 1
        g = Graph(k, tuple(adj))
        if is_induced_forest(g, full):
            counts[component_count(g, full)] += 1
    return counts


def test_tree_count_conventions():
    assert tree_count(1) == 1
    assert tree_count(2) == 1
    assert tree_count(3) == 3
    assert tree_count(4) == 16
    assert tree_count(7) == 7**5


@pytest.mark.parametrize("k", range(1, 7))
def test_phi_matches_bruteforce(k):
    oracle = forests_by_components_bruteforce(k)
    for ell in range(1, k + 1):
        assert phi(k, ell) == oracle[ell], (k, ell)
    assert sum(oracle.values()) == TOTAL_FORESTS[k]


def test_phi_row_sums():
    for k, total in TOTAL_FORESTS.items():
        assert sum(phi(k, ell) for ell in range(1, k + 1)) == total


def test_phi_structural_values():
    for k in range(2, 12):
        assert phi(k, 1) == tree_count(k)
        assert phi(k, k) == 1  # the empty graph
        # exactly one edge to choose for k-1 components
        assert phi(k, k - 1) == math.comb(k, 2)
    assert phi(5, 0) == 0
    assert phi(5, 6) == 0


def test_table_is_reusable_and_exact():
    t = ForestCountTable()
    assert t.phi(30, 7) == phi(30, 7)
    assert t.phi(3, 2) == 3


def test_log_phi_matches_exact_counts():
    for k in (5, 20, 64):
        for ell in range(1, min(k, 9) + 1):
            assert log_phi(k, ell) == pytest.approx(math.log(phi(k, ell)), rel=1e-12)


def test_log_phi_large_k_consistency():
    # beyond the exact path: check against the exact table at its edge and
    # a ratio sanity bound (g <= its ell=1 value times sum over the row)
    assert log_phi(512, 3) == pytest.approx(math.log(phi(512, 3)), rel=1e-9)
    assert log_phi(2000, 1) == pytest.approx(log_tree_count(2000), rel=1e-12)


def test_g_exact_vs_g_value():
    p = Fraction(1, 2)
    for k in (3, 10, 40, 64):
        for ell in range(1, 7):
            exact = g_exact(k, ell, p)
            got = g_value(k, ell, p).to_float()
            assert got == pytest.approx(float(exact), rel=1e-12), (k, ell)


def test_g_exact_base_cases():
    assert g_exact(10, 1, Fraction(1, 2)) == 1
    # g_ell(k) = phi * ((1-p)/p)^(ell-1) / k^(k-2)
    assert g_exact(4, 2, Fraction(1, 3)) == Fraction(phi(4, 2) * 2, 16)


def test_g_limit_values():
    # ((1-p)/(2p))^(ell-1) / (ell-1)!
    assert g_limit(1, 0.5) == 1.0
    assert g_limit(2, 0.5) == pytest.approx(0.5)
    assert g_limit(3, 0.5) == pytest.approx(0.125)
    assert g_limit(4, 0.5) == pytest.approx(1 / 48)


def test_g_sum_limit():
    assert g_sum_limit(0.5) == pytest.approx(math.exp(0.5), rel=1e-15)
    assert g_sum_limit(0.9) == pytest.approx(math.exp(1 / 18), rel=1e-15)


def test_g_converges_to_limit():
    for ell in range(1, 7):
        lim = g_limit(ell, 0.5)
        assert abs(g_value(2000, ell, 0.5, ell_hint=6).to_float() - lim) <= 0.05 * lim


def test_g_partial_sums_monotone_and_bounded():
    sums = g_partial_sums(400, 0.5)
    assert all(b >= a for a, b in zip(sums, sums[1:]))
    assert sums[-1] == pytest.approx(math.exp(0.5), rel=0.05)


def test_invalid_p_rejected():
    with pytest.raises(ValueError):
        g_value(5, 2, 0.0)
    with pytest.raises(ValueError):
        g_exact(5, 2, Fraction(1))
