"""Reflection statistics and data-driven thresholds.

Every counting function used below is a step function of ``t`` whose jumps
occur only at the absolute values of the statistics involved, so each
infimum over ``t > 0`` is found by scanning those jump points in increasing
order. Ties collapse to one candidate; counts use closed inequalities.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .core import (
    SplitPlan,
    TStatBundle,
    normal_cdf,
    normal_isf,
    split_even,
    split_tstats,
)
from .errors import ParameterError, ShapeError

REFINE_WEIGHT = 4.0 / 9.0


class Variant(str, Enum):
    RAW = "raw"
    PLUS = "plus"
    REFINED = "refined"
    ONE_SIDED = "one_sided"


@dataclass(frozen=True)
class WStats:
    w: np.ndarray
    w_tilde: np.ndarray
    sign_t1: np.ndarray
    sign_t2: np.ndarray

    @property
    def p(self) -> int:
        return len(self.w)


@dataclass(frozen=True)
class FdpCurve:
    """Tail counts at each candidate threshold.

    ``n_neg[k] = #{w <= -t[k]}`` and ``n_pos[k] = #{w >= t[k]}`` (before the
    ``max(., 1)`` floor).
    """

    t: np.ndarray
    n_neg: np.ndarray
    n_pos: np.ndarray

    @property
    def ratio(self) -> np.ndarray:
        return self.n_neg / np.maximum(self.n_pos, 1)


@dataclass(frozen=True)
class ThresholdResult:
    threshold: float
    variant: Variant
    alpha: float
    rejected: np.ndarray
    curve: np.ndarray = field(repr=False)  # (k, 2): candidate t, estimated FDP

    @property
    def n_rejected(self) -> int:
        return len(self.rejected)


@dataclass(frozen=True)
class PowerBounds:
    lower: float
    upper: float


def check_alpha(alpha: float) -> float:
    alpha = float(alpha)
    if not 0.0 < alpha < 1.0:
        raise ParameterError(f"alpha must lie in (0, 1), got {alpha}")
    return alpha


def compute_w(t: TStatBundle) -> WStats:
    t1, t2, t2t = (np.asarray(a, dtype=np.float64) for a in (t.t1, t.t2, t.t2_tilde))
    if not (t1.shape == t2.shape == t2t.shape):
        raise ShapeError(f"t-statistic lengths differ: {t1.shape}, {t2.shape}, {t2t.shape}")
    return WStats(
        w=t1 * t2,
        w_tilde=t1 * t2t,
        sign_t1=np.sign(t1).astype(np.int8),
        sign_t2=np.sign(t2).astype(np.int8),
    )


def candidates(*stats: np.ndarray) -> np.ndarray:
    """Sorted distinct nonzero absolute values of the given vectors."""
    a = np.abs(np.concatenate([np.ravel(s) for s in stats]))
    return np.unique(a[a > 0])


def tail_counts(w: np.ndarray, t: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """``(#{w <= -t}, #{w >= t})`` for every entry of ``t`` via one sort."""
    ws = np.sort(np.asarray(w, dtype=np.float64))
    t = np.asarray(t, dtype=np.float64)
    n_neg = np.searchsorted(ws, -t, side="right")
    n_pos = len(ws) - np.searchsorted(ws, t, side="left")
    return n_neg, n_pos


def fdp_hat_curve(w: np.ndarray) -> FdpCurve:
    t = candidates(w)
    n_neg, n_pos = tail_counts(w, t)
    return FdpCurve(t=t, n_neg=n_neg, n_pos=n_pos)


def _first_below(t: np.ndarray, estimate: np.ndarray, alpha: float) -> float:
    hit = np.flatnonzero(estimate <= alpha)
    return float(t[hit[0]]) if hit.size else np.inf


def _result(w, t, estimate, alpha, variant, mask=None) -> ThresholdResult:
    L = _first_below(t, estimate, alpha)
    keep = np.asarray(w) >= L
    if mask is not None:
        keep &= mask
    return ThresholdResult(
        threshold=L,
        variant=variant,
        alpha=alpha,
        rejected=np.flatnonzero(keep),
        curve=np.column_stack([t, estimate]) if len(t) else np.empty((0, 2)),
    )


def threshold_raw(w: np.ndarray, alpha: float) -> ThresholdResult:
    """Smallest t with #{w <= -t} / max(#{w >= t}, 1) <= alpha; reject w >= t."""
    alpha = check_alpha(alpha)
    w = np.asarray(w, dtype=np.float64)
    c = fdp_hat_curve(w)
    return _result(w, c.t, c.ratio, alpha, Variant.RAW)


def threshold_plus(w: np.ndarray, alpha: float) -> ThresholdResult:
    """As :func:`threshold_raw` with one added to the numerator (finite-sample FDR control)."""
    alpha = check_alpha(alpha)
    w = np.asarray(w, dtype=np.float64)
    c = fdp_hat_curve(w)
    return _result(w, c.t, (1 + c.n_neg) / np.maximum(c.n_pos, 1), alpha, Variant.PLUS)


def theta(w: np.ndarray, w_tilde: np.ndarray, t):
    """Empirical skewness-correction term; vectorized over ``t``."""
    wn, wp = tail_counts(w, t)
    vn, vp = tail_counts(w_tilde, t)
    out = ((wn - wp) - (vn - vp)) / np.maximum(wn, 1)
    return float(out) if np.ndim(out) == 0 else out


def threshold_refined(w: np.ndarray, w_tilde: np.ndarray, alpha: float) -> ThresholdResult:
    """Skewness-corrected threshold.

    The estimate ``ratio(t) * max(0, 1 - 4/9 theta(t))`` changes at the
    jump points of both ``w`` and ``w_tilde``, so both sets of absolute
    values are scanned. Rejection still uses ``w >= L``.
    """
    alpha = check_alpha(alpha)
    w = np.asarray(w, dtype=np.float64)
    w_tilde = np.asarray(w_tilde, dtype=np.float64)
    if w.shape != w_tilde.shape:
        raise ShapeError(f"w and w_tilde lengths differ: {w.shape} vs {w_tilde.shape}")
    t = candidates(w, w_tilde)
    wn, wp = tail_counts(w, t)
    vn, vp = tail_counts(w_tilde, t)
    th = ((wn - wp) - (vn - vp)) / np.maximum(wn, 1)
    factor = np.maximum(0.0, 1.0 - REFINE_WEIGHT * th)
    estimate = wn / np.maximum(wp, 1) * factor
    return _result(w, t, estimate, alpha, Variant.REFINED)


def threshold_one_sided(ws: WStats, alpha: float) -> ThresholdResult:
    """Threshold for H0: mu >= 0 against mu < 0.

    Features whose split statistics are both positive are moved from the
    discovery count to the null count; only (-, -) features are rejected.
    The numerator is floored at zero.
    """
    alpha = check_alpha(alpha)
    w = np.asarray(ws.w, dtype=np.float64)
    t = candidates(w)
    both_pos = (ws.sign_t1 > 0) & (ws.sign_t2 > 0)
    both_neg = (ws.sign_t1 < 0) & (ws.sign_t2 < 0)
    n_neg, _ = tail_counts(w, t)
    _, n_pos_pp = tail_counts(w[both_pos], t)
    _, n_pos_nn = tail_counts(w[both_neg], t)
    estimate = np.maximum(n_neg - n_pos_pp, 0) / np.maximum(n_pos_nn, 1)
    return _result(w, t, estimate, alpha, Variant.ONE_SIDED, mask=both_neg)


THRESHOLDS = {
    Variant.RAW: lambda ws, a: threshold_raw(ws.w, a),
    Variant.PLUS: lambda ws, a: threshold_plus(ws.w, a),
    Variant.REFINED: lambda ws, a: threshold_refined(ws.w, ws.w_tilde, a),
    Variant.ONE_SIDED: threshold_one_sided,
}


@dataclass(frozen=True)
class RessResult:
    stats: WStats
    tstats: TStatBundle
    result: ThresholdResult
    plan: SplitPlan
    plan_z: SplitPlan | None = None


def split_statistics(x, seed: int, z=None):
    """Split the sample(s) with ``seed`` and return ``(WStats, TStatBundle, plan, plan_z)``."""
    x = np.asarray(x, dtype=np.float64)
    plan = split_even(x.shape[0], seed)
    plan_z = None
    if z is not None:
        z = np.asarray(z, dtype=np.float64)
        plan_z = split_even(z.shape[0], seed, stream=1)
    tb = split_tstats(x, plan, z, plan_z)
    return compute_w(tb), tb, plan, plan_z


def ress(x, alpha: float, variant="refined", seed: int = 0, z=None) -> RessResult:
    """Run the full pipeline: split, summaries, t-statistics, W, threshold.

    Parameters
    ----------
    x : array, shape (n_t, p)
        Observations in rows, features in columns.
    alpha : float
        Target FDR level.
    variant : {"raw", "plus", "refined", "one_sided"}
    seed : int
        Seed of the random split.
    z : array, shape (m_t, p), optional
        Second group; switches to two-sample statistics.
    """
    variant = Variant(variant)
    check_alpha(alpha)
    ws, tb, plan, plan_z = split_statistics(x, seed, z)
    return RessResult(ws, tb, THRESHOLDS[variant](ws, alpha), plan, plan_z)


def power_bounds(snr: float, n: int, alpha: float) -> PowerBounds:
    """Bounds on the power ratio of the split-product test versus the full t-test.

    ``snr`` is mu/sigma and ``n`` the size of one half (the full test uses 2n).
    """
    alpha = check_alpha(alpha)
    if n < 1:
        raise ParameterError(f"n must be >= 1, got {n}")
    a = np.sqrt(n) * snr
    b = np.sqrt(2 * n) * snr
    z4 = normal_isf(alpha / 4)
    z2 = normal_isf(alpha / 2)
    zr = normal_isf(np.sqrt(alpha / 2))
    t_power = 2 - normal_cdf(z2 - b) - normal_cdf(z2 + b)
    lower = ((1 - normal_cdf(z4 - a)) ** 2 + (1 - normal_cdf(z4 + a)) ** 2) / t_power
    upper = 2 * (2 - normal_cdf(zr - a) - normal_cdf(zr + a)) / t_power
    return PowerBounds(lower=float(lower), upper=float(upper))
