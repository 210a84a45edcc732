"""Labeled forest counts and the normalized per-component ratio terms.

phi(k, ell) counts labeled forests on k vertices with ell tree components.
It satisfies the recursion

    phi(k, ell) = sum_{m=ell-1}^{k-1} C(k-1, m) (k-m)^(k-m-2) phi(m, ell-1)

obtained by classifying forests by the component containing vertex k,
with phi(k, 1) = k^(k-2) and the reading x^(x-2) = 1 for x in {1, 2}.

g(k, ell, p) = phi(k, ell) ((1-p)/p)^(ell-1) / k^(k-2) has, for fixed ell,
the limit ((1-p)/(2p))^(ell-1) / (ell-1)! as k grows, and the limits sum
to exp((1-p)/(2p)).
"""

from __future__ import annotations

import math
import threading
from fractions import Fraction
from functools import lru_cache
from typing import Dict, List, Tuple, Union

import numpy as np
from scipy.special import gammaln

from forestkit.logreal import LogReal

Probability = Union[Fraction, float]

EXACT_K_MAX = 512


def tree_count(k: int) -> int:
    """Cayley count k^(k-2) of labeled trees, with value 1 for k in {1, 2}."""
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    return k ** (k - 2) if k >= 3 else 1


class ForestCountTable:
    """Memoized exact phi values, grown on demand under a single writer lock."""

    def __init__(self, k_max: int = EXACT_K_MAX):
        self.k_max = k_max
        self._cache: Dict[Tuple[int, int], int] = {}
        self._lock = threading.Lock()

    def phi(self, k: int, ell: int) -> int:
        if k < 1:
            raise ValueError(f"k must be >= 1, got {k}")
        if k > self.k_max:
            raise ValueError(f"k={k} exceeds exact table limit {self.k_max}; use log_phi")
        if ell <= 0 or ell > k:
            return 0
        if ell == 1:
            return tree_count(k)
        key = (k, ell)
        cached = self._cache.get(key)
        if cached is not None:
            return cached
        with self._lock:
            return self._fill(k, ell)

    def _fill(self, k: int, ell: int) -> int:
        # Iterative bottom-up fill so deep tables do not hit recursion limits.
        for kk in range(1, k + 1):
            for ll in range(2, min(ell, kk) + 1):
                if (kk, ll) in self._cache:
                    continue
                total = 0
                for m in range(ll - 1, kk):
                    sub = tree_count(m) if ll == 2 else self._cache.get((m, ll - 1), 0)
                    if m < ll - 1 or sub == 0:
                        continue
                    total += math.comb(kk - 1, m) * tree_count(kk - m) * sub
                self._cache[(kk, ll)] = total
        return self._cache[(k, ell)]

    def row(self, k: int) -> List[int]:
        return [self.phi(k, ell) for ell in range(1, k + 1)]


_DEFAULT_TABLE = ForestCountTable()


def phi(k: int, ell: int) -> int:
    """Exact number of labeled forests on k vertices with ell components."""
    return _DEFAULT_TABLE.phi(k, ell)


@lru_cache(maxsize=8)
def log_phi_table(ell_max: int, k_max: int) -> np.ndarray:
    """Array t with t[ell, k] = log(phi(k, ell)); -inf marks zero counts."""
    idx = np.arange(k_max + 1, dtype=np.float64)
    lfact = gammaln(idx + 1.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        ltree = (idx - 2.0) * np.log(idx)
    ltree[0] = 0.0
    ltree[1] = 0.0  # (1-2)*log(1) = 0, kept explicit

    table = np.full((ell_max + 1, k_max + 1), -np.inf)
    table[1, 1:] = ltree[1:]
    for ell in range(2, ell_max + 1):
        for k in range(ell, k_max + 1):
            ms = np.arange(max(ell - 1, 1), k)
            terms = (
                lfact[k - 1]
                - lfact[ms]
                - lfact[k - 1 - ms]
                + ltree[k - ms]
                + table[ell - 1, ms]
            )
            hi = terms.max()
            if hi == -np.inf:
                continue
            table[ell, k] = hi + math.log(np.exp(terms - hi).sum())
    return table


def log_phi(k: int, ell: int, ell_hint: int | None = None) -> float:
    """log(phi(k, ell)) via the exact table for small k, log recursion beyond.

    ell_hint, when given, sizes the shared table for a whole ell sweep so a
    loop over ell at fixed k triggers a single build.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if ell <= 0 or ell > k:
        return -math.inf
    if k <= 64:
        return math.log(phi(k, ell))
    # power-of-two rounding keeps the lru cache to a handful of shared tables
    k_cap = 1 << (k - 1).bit_length()
    ell_cap = min(1 << (max(ell, ell_hint or 1, 2) - 1).bit_length(), k_cap)
    return float(log_phi_table(ell_cap, k_cap)[ell, k])


def log_tree_count(k: int) -> float:
    """log(k^(k-2)) under the x^(x-2) = 1 reading for x in {1, 2}."""
    return (k - 2) * math.log(k) if k >= 3 else 0.0


def _check_p(p: Probability) -> None:
    if not (0 < p < 1):
        raise ValueError(f"p must be in (0, 1), got {p}")


def g_exact(k: int, ell: int, p: Fraction) -> Fraction:
    """Exact rational g value; intended for k <= 64 where phi stays cheap."""
    _check_p(p)
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if ell <= 0 or ell > k:
        return Fraction(0)
    odds = (1 - Fraction(p)) / Fraction(p)
    return Fraction(phi(k, ell)) * odds ** (ell - 1) / tree_count(k)


def g_value(k: int, ell: int, p: Probability, ell_hint: int | None = None) -> LogReal:
    """g(k, ell, p) carried in log space; valid for any k."""
    _check_p(p)
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if ell <= 0 or ell > k:
        return LogReal.ZERO
    pf = float(p)
    lg = log_phi(k, ell, ell_hint) + (ell - 1) * math.log((1 - pf) / pf) - log_tree_count(k)
    return LogReal.from_log(lg)


def g_limit(ell: int, p: Probability) -> float:
    """Limit of g(k, ell, p) as k grows: ((1-p)/(2p))^(ell-1) / (ell-1)!."""
    _check_p(p)
    if ell < 1:
        raise ValueError(f"ell must be >= 1, got {ell}")
    pf = float(p)
    log_val = (ell - 1) * math.log((1 - pf) / (2 * pf)) - math.lgamma(ell)
    return math.exp(log_val)


def g_sum_limit(p: Probability) -> float:
    """Closed form of the summed limits: exp((1-p)/(2p))."""
    _check_p(p)
    pf = float(p)
    return math.exp((1 - pf) / (2 * pf))


def g_partial_sums(k: int, p: Probability, ell_max: int | None = None) -> List[float]:
    """Partial sums of g(k, ell, p) over ell = 1..ell_max, for convergence reports."""
    if ell_max is None:
        ell_max = k
    sums = []
    acc = 0.0
    hint = min(ell_max, k)
    for ell in range(1, hint + 1):
        acc += g_value(k, ell, p, ell_hint=hint).to_float()
        sums.append(acc)
    return sums
