"""First-moment computations for induced trees and forests at the critical size.

E[X_n] counts induced trees of size K, E[Y_n] induced forests; their ratio
equals sum over ell of g(K, ell, p) and stays bounded by exp((1-p)/(2p))
in the limit, which is what certifies the two-point upper bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Tuple, Union

from forestkit.forests import g_sum_limit, g_value, log_phi, log_tree_count
from forestkit.logreal import LogReal, log_sum_exp

Probability = Union[Fraction, float]

# E[Y_n] below this value certifies the Markov upper bound at this K;
# a reporting convention, not a probabilistic statement.
CERTIFY_THRESHOLD = 1e-3


def _check_p(p: Probability) -> None:
    if not (0 < p < 1):
        raise ValueError(f"p must be in (0, 1), got {p}")


def critical_size(n: int, p: Probability, eps: float, offset: float = 4.0) -> int:
    """floor(2 log_{1/(1-p)}(e n p) + offset + eps), clamped to >= 2."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    _check_p(p)
    pf = float(p)
    base = 2.0 * math.log(math.e * n * pf) / (-math.log1p(-pf))
    return max(2, math.floor(base + offset + eps))


def concentration_points(n: int, p: Probability, eps: float = 0.0) -> Tuple[int, int]:
    """The two consecutive candidate values for the maximum induced forest size."""
    k_low = critical_size(n, p, eps, offset=2.0)
    return k_low, k_low + 1


@dataclass(frozen=True)
class MomentQuery:
    """Inputs of a moment evaluation; K defaults to the critical size."""

    n: int
    p: Probability
    eps: float = 0.0
    K: int = None  # type: ignore[assignment]

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError(f"n must be >= 1, got {self.n}")
        _check_p(self.p)
        if self.K is None:
            object.__setattr__(self, "K", critical_size(self.n, self.p, self.eps))
        if self.K < 2:
            raise ValueError(f"K must be >= 2, got {self.K}")
        if self.K > self.n:
            raise ValueError(f"K={self.K} exceeds n={self.n}")


@dataclass(frozen=True)
class MomentReport:
    """Evaluated first moments at size K plus the two ratio code paths."""

    query: MomentQuery
    e_x: LogReal
    e_y_by_ell: Tuple[LogReal, ...]
    e_y: LogReal
    ratio: float          # factored path: sum of g(K, ell, p)
    ratio_direct: float   # direct path: E[Y_n] / E[X_n] from the per-ell sums
    limit_ratio: float    # exp((1-p)/(2p))
    upper_bound_certified: bool


def _log_binom(n: int, k: int) -> float:
    return math.lgamma(n + 1) - math.lgamma(k + 1) - math.lgamma(n - k + 1)


def expected_tree_count(q: MomentQuery) -> LogReal:
    """E[X_n] = C(n,K) K^(K-2) p^(K-1) (1-p)^(C(K,2)-K+1)."""
    K, pf = q.K, float(q.p)
    exponent = math.comb(K, 2) - K + 1  # exact integer before entering log space
    lval = (
        _log_binom(q.n, K)
        + log_tree_count(K)
        + (K - 1) * math.log(pf)
        + exponent * math.log1p(-pf)
    )
    return LogReal.from_log(lval)


def expected_forest_count(q: MomentQuery) -> MomentReport:
    """Per-ell and total expected induced-forest counts at size K."""
    K, pf = q.K, float(q.p)
    lbinom = _log_binom(q.n, K)
    e_y_by_ell: List[LogReal] = []
    for ell in range(1, K + 1):
        exponent = math.comb(K, 2) - K + ell
        lval = (
            lbinom
            + log_phi(K, ell, ell_hint=K)
            + (K - ell) * math.log(pf)
            + exponent * math.log1p(-pf)
        )
        e_y_by_ell.append(LogReal.from_log(lval))
    e_x = expected_tree_count(q)
    e_y = LogReal.sum(e_y_by_ell)
    ratio_direct = (e_y / e_x).to_float()
    ratio = sum(g_value(K, ell, q.p, ell_hint=K).to_float() for ell in range(1, K + 1))
    return MomentReport(
        query=q,
        e_x=e_x,
        e_y_by_ell=tuple(e_y_by_ell),
        e_y=e_y,
        ratio=ratio,
        ratio_direct=ratio_direct,
        limit_ratio=g_sum_limit(q.p),
        upper_bound_certified=e_y.to_float() < CERTIFY_THRESHOLD,
    )


def ratio_and_bound(q: MomentQuery) -> Tuple[float, float]:
    """(sum of g(K, ell, p) over ell, exp((1-p)/(2p)))."""
    ratio = sum(g_value(q.K, ell, q.p, ell_hint=q.K).to_float() for ell in range(1, q.K + 1))
    return ratio, g_sum_limit(q.p)
