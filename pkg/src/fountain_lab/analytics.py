"""Closed-form expected transmitted-symbol counts for the three schemes.

Each function returns the expected number of transmitted coded symbols
needed to recover ``s`` of ``k`` source symbols.  The derivations rest on
two ingredients:

* random degree-2 symbols grow one large component; reaching a fraction
  ``alpha`` of the nodes costs about ``-k*ln(1-alpha)/(2*alpha)`` symbols
  (:func:`buildup_symbols`), and on the way there the surviving small-
  component edges prepay part of the later work;
* past the halfway point, recovering one more symbol when ``n`` are black
  costs ``1/completion_prob(n, k)`` transmissions, discounted by the stored
  edges.

Random-selection schemes extend to a lossy channel by dividing the lossless
count by (1 - eps) (:func:`lossy_adjust`); the systematic scheme's formulas
depend on eps directly and must never be adjusted again.

Caveat: curves for the seeding-to-zero variants are genuinely discontinuous
where degree-2 transmission starts (recovery stalls until the large
component emerges), so continuity holds at the half-recovery breakpoint but
not at the seeding boundary.
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np

from .degree import completion_prob
from .schemes import OFC, OFCNB, SOFC, SchemeConfig

__all__ = [
    "DEGREE_AT_HALF",
    "mean_selection_degree",
    "buildup_symbols",
    "epsilon_threshold",
    "expected_ofc",
    "expected_ofcnb_small",
    "expected_ofcnb_large",
    "expected_ofcnb_general",
    "expected_ofcnb",
    "expected_sofc",
    "lossy_adjust",
    "expected_curve",
    "compare_to_curve",
]

LN2 = math.log(2.0)


def mean_selection_degree(alpha: float) -> float:
    """Average times a node is selected when the largest component spans alpha."""
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must be in (0, 1), got {alpha}")
    return -math.log1p(-alpha) / alpha


#: Selection degree at the half-size component (2*ln 2, about 1.3863); a
#: quarter of it counts surviving small-component edges per later recovery.
DEGREE_AT_HALF = mean_selection_degree(0.5)


def epsilon_threshold() -> float:
    """Erasure rate above which the systematic scheme loses its full-recovery edge."""
    return 0.5 - DEGREE_AT_HALF / 8.0


def buildup_symbols(alpha: float, k: int) -> float:
    """Expected degree-2 symbols to grow the largest component to fraction alpha."""
    return k * mean_selection_degree(alpha) / 2.0


def _ridx(x: float) -> int:
    """Round a fractional breakpoint to the nearest integer index."""
    return int(math.floor(x + 0.5))


@lru_cache(maxsize=8)
def _inv_completion_prefix(k: int) -> np.ndarray:
    """prefix[j] = sum_{i<j} 1/completion_prob(i, k), computed once per k."""
    inv = np.empty(k, dtype=float)
    for n in range(k):
        inv[n] = 1.0 / completion_prob(n, k)
    return np.concatenate([[0.0], np.cumsum(inv)])


def _completion_sum(k: int, lo: int, hi: int) -> float:
    """sum_{i=lo}^{hi-1} 1/completion_prob(i, k); empty when hi <= lo."""
    if hi <= lo:
        return 0.0
    prefix = _inv_completion_prefix(k)
    return float(prefix[hi] - prefix[lo])


def _check_s(s: int, k: int) -> None:
    if not 1 <= s <= k:
        raise ValueError(f"need 1 <= s <= k, got s={s}, k={k}")


def expected_ofc(s: int, k: int) -> float:
    """Two-phase baseline (component threshold at half), lossless channel.

    Nothing is recovered before the build-up budget of k*ln(2) symbols, so
    the curve is flat there; past half recovery each step costs
    (1 - DEGREE_AT_HALF/4) / completion_prob.
    """
    _check_s(s, k)
    half = _ridx(k / 2)
    base = k * LN2
    if s <= half:
        return base
    return base + (1.0 - DEGREE_AT_HALF / 4.0) * _completion_sum(k, half, s)


def expected_ofcnb_small(s: int, k: int, gamma0: float) -> float:
    """Build-up-free scheme in the small-seeding regime (gamma0 <= 0.05)."""
    _check_s(s, k)
    if not 0.0 < gamma0 <= 0.05:
        raise ValueError(f"small-seeding form needs 0 < gamma0 <= 0.05, got {gamma0}")
    g = _ridx(gamma0 * k)
    half = _ridx(k / 2)
    if s <= g:
        return float(s)
    if s <= half:
        u = s - g
        return -(k * k) * math.log1p(-u / k) / (2.0 * u)
    tail = -k * math.log(0.5 + gamma0) / (1.0 - 2.0 * gamma0)
    return (1.0 - DEGREE_AT_HALF / 4.0) * _completion_sum(k, half, s) + tail


def expected_ofcnb_large(s: int, k: int, gamma0: float) -> float:
    """Build-up-free scheme with heavy seeding (0.5 <= gamma0 <= 1).

    Degree-1 coverage is a coupon-collector process; gamma0 = 1 with s = k
    diverges and returns +inf.
    """
    _check_s(s, k)
    if not 0.5 <= gamma0 <= 1.0:
        raise ValueError(f"heavy-seeding form needs 0.5 <= gamma0 <= 1, got {gamma0}")
    g = _ridx(gamma0 * k)
    if s <= g:
        if s == k:
            return math.inf
        return -k * math.log1p(-s / k)
    return _completion_sum(k, g, s) - k * math.log1p(-gamma0)


def expected_ofcnb_general(s: int, k: int, gamma0: float) -> float:
    """Build-up-free scheme for 0 < gamma0 < 0.5.

    The degree-2 stage between gamma0*k and k/2 is linearized at its average
    cost; the edges it leaves behind discount the completion stage through
    the stored-edge estimate below.
    """
    _check_s(s, k)
    if not 0.0 < gamma0 < 0.5:
        raise ValueError(f"general form needs 0 < gamma0 < 0.5, got {gamma0}")
    g = _ridx(gamma0 * k)
    half = _ridx(k / 2)
    if s <= g:
        return -k * math.log1p(-s / k)
    if s <= half:
        return (s - gamma0 * k) * math.log(2.0 - 2.0 * gamma0) / (0.5 - gamma0) - k * math.log1p(-gamma0)
    # usable fraction of the degree-2 stage, averaged over its endpoints
    p_u = 0.5 * (completion_prob(g, k) + completion_prob(half, k))
    stored_edges = math.log(2.0 - 2.0 * gamma0) * k * p_u - (0.5 - gamma0) * k
    factor = 1.0 - 2.0 * stored_edges / k
    return k * LN2 + factor * _completion_sum(k, half, s)


def expected_ofcnb(s: int, k: int, gamma0: float) -> float:
    """Dispatch to the seeding regime that covers ``gamma0``."""
    if gamma0 <= 0.05:
        return expected_ofcnb_small(s, k, gamma0)
    if gamma0 < 0.5:
        return expected_ofcnb_general(s, k, gamma0)
    return expected_ofcnb_large(s, k, gamma0)


def expected_sofc(s: int, k: int, eps: float) -> float:
    """Systematic scheme at erasure rate eps (formulas already include eps).

    Three regimes: for eps <= 0.5 the completion phase never emits degree-2
    symbols; for 0.5 < eps < 0.99 a degree-2 stage appears, with stored
    edges discounting completion; at eps >= 0.99 the near-total-loss forms
    take over (numerical stand-in for the eps -> 1 asymptotics).
    """
    _check_s(s, k)
    if not 0.0 <= eps < 1.0:
        raise ValueError(f"eps must be in [0, 1), got {eps}")
    r = _ridx((1.0 - eps) * k)
    half = _ridx(k / 2)
    if s <= r:
        return s / (1.0 - eps)
    if eps <= 0.5:
        return k + _completion_sum(k, r, s) / (1.0 - eps)
    if eps < 0.99:
        if s <= half:
            return k + (s - (1.0 - eps) * k) * math.log(2.0 * eps) / ((eps - 0.5) * (1.0 - eps))
        p_u = 0.5 * (completion_prob(r, k) + completion_prob(half, k))
        stored_edges = math.log(2.0 * eps) * k * p_u - (eps - 0.5) * k
        factor = (k - 2.0 * stored_edges) / (k * (1.0 - eps))
        return k + k * math.log(2.0 * eps) / (1.0 - eps) + factor * _completion_sum(k, half, s)
    if s <= half:
        return k - (k * k) * math.log1p(-s / k) / (2.0 * s * (1.0 - eps))
    return k + k * LN2 / (1.0 - eps) + (1.0 - DEGREE_AT_HALF / 4.0) / (1.0 - eps) * _completion_sum(k, half, s)


def lossy_adjust(expected_lossless: float, eps: float) -> float:
    """Lift a lossless random-selection count to erasure rate eps.

    Applies to the random-selection schemes only; the systematic scheme's
    formulas already embed eps and must not pass through here.
    """
    if not 0.0 <= eps < 1.0:
        raise ValueError(f"eps must be in [0, 1), got {eps}")
    return expected_lossless / (1.0 - eps)


def expected_transmitted(config: SchemeConfig, s: int, k: int, eps: float = 0.0) -> float:
    """Expected transmitted symbols for any scheme config at erasure rate eps."""
    if isinstance(config, SOFC):
        return expected_sofc(s, k, eps)
    if isinstance(config, OFCNB):
        return lossy_adjust(expected_ofcnb(s, k, config.gamma0), eps)
    if isinstance(config, OFC):
        if config.beta0 != 0.5:
            raise ValueError("closed forms cover the beta0 = 0.5 operating point only")
        return lossy_adjust(expected_ofc(s, k), eps)
    raise TypeError(f"unknown scheme config {config!r}")


def expected_curve(config: SchemeConfig, k: int, eps: float = 0.0) -> np.ndarray:
    """Expected transmitted count for every s = 1..k (index s-1)."""
    return np.array([expected_transmitted(config, s, k, eps) for s in range(1, k + 1)])


def compare_to_curve(
    milestones,
    sent_mean,
    analytic: np.ndarray,
    k: int,
    band: tuple[float, float] = (0.05, 0.98),
) -> dict:
    """Relative error of an empirical mean curve against an analytic one.

    Compares at every milestone with band[0] <= s/k <= band[1]; returns the
    max and mean of |empirical - analytic| / analytic.
    """
    milestones = np.asarray(milestones)
    sent_mean = np.asarray(sent_mean, dtype=float)
    lo, hi = band[0] * k, band[1] * k
    mask = (milestones >= lo) & (milestones <= hi) & ~np.isnan(sent_mean)
    ana = analytic[milestones[mask] - 1]
    rel = np.abs(sent_mean[mask] - ana) / ana
    return {
        "max_rel_err": float(rel.max()) if rel.size else float("nan"),
        "mean_rel_err": float(rel.mean()) if rel.size else float("nan"),
        "n_points": int(rel.size),
    }
