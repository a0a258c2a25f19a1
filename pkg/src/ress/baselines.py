"""Comparison methods: BH with normal calibration and two bootstrap calibrations."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .core import column_summary, full_tstats, normal_cdf, normal_sf  # noqa: F401
from .engine import ThresholdResult, check_alpha
from .errors import DataError, DegenerateSampleError, ParameterError

DEFAULT_B = 200


@dataclass(frozen=True)
class BootstrapConfig:
    b: int = DEFAULT_B
    seed: int = 0
    centered: bool = True
    workers: int = 1

    def __post_init__(self):
        if self.b < 1:
            raise ParameterError(f"bootstrap replication count must be >= 1, got {self.b}")
        if not self.centered:
            raise ParameterError("only centered bootstrap statistics are supported")


def two_sided_pvalues(t_stats) -> np.ndarray:
    return 2.0 * normal_sf(np.abs(np.asarray(t_stats, dtype=np.float64)))


def bh_step_up(p_values, alpha: float) -> np.ndarray:
    """Benjamini-Hochberg step-up; returns sorted indices of rejected hypotheses."""
    alpha = check_alpha(alpha)
    pv = np.asarray(p_values, dtype=np.float64)
    if pv.size and (np.isnan(pv).any() or pv.min() < 0 or pv.max() > 1):
        raise DataError("p-values must lie in [0, 1]")
    m = pv.size
    order = np.argsort(pv, kind="stable")
    ok = np.flatnonzero(pv[order] <= alpha * np.arange(1, m + 1) / m)
    if not ok.size:
        return np.empty(0, dtype=np.intp)
    return np.sort(order[: ok[-1] + 1])


def bh_normal_threshold(t_stats, alpha: float) -> ThresholdResult:
    """Smallest |T_j| with 2p(1 - Phi(t)) / #{|T| >= t} <= alpha; reject |T| >= that.

    The reported threshold is the smallest qualifying |T_j|. The continuous
    infimum can sit below it, but always inside the same gap between
    consecutive |T_j|, so the rejection set is identical.
    """
    alpha = check_alpha(alpha)
    a = np.abs(np.asarray(t_stats, dtype=np.float64))
    p = a.size
    t = np.unique(a[a > 0])
    srt = np.sort(a)
    count = p - np.searchsorted(srt, t, side="left")
    estimate = p * (2.0 * normal_sf(t)) / count
    hit = np.flatnonzero(estimate <= alpha)
    L = float(t[hit[0]]) if hit.size else np.inf
    return ThresholdResult(
        threshold=L,
        variant="bh",
        alpha=alpha,
        rejected=np.flatnonzero(a >= L),
        curve=np.column_stack([t, estimate]) if t.size else np.empty((0, 2)),
    )


def _replicate_abs_t(x, xc, z, zc, rng) -> np.ndarray:
    """|T*| for one bootstrap replicate; zero-variance columns give +inf."""
    n = x.shape[0]
    sx = column_summary(xc[rng.integers(0, n, n)])
    if z is None:
        se2 = sx.var / sx.n
        num = sx.mean
    else:
        m = z.shape[0]
        sz = column_summary(zc[rng.integers(0, m, m)])
        se2 = sx.var / sx.n + sz.var / sz.n
        num = sx.mean - sz.mean
    out = np.full(num.shape, np.inf)
    ok = se2 > 0
    out[ok] = np.abs(num[ok]) / np.sqrt(se2[ok])
    return out


def bootstrap_abs_t(x, cfg: BootstrapConfig, z=None) -> np.ndarray:
    """``(B, p)`` matrix of |T*| from row-resampled, mean-centered data.

    Replicate ``k`` draws from its own stream spawned from ``cfg.seed``, so
    the output does not depend on ``cfg.workers``.
    """
    x = np.asarray(x, dtype=np.float64)
    if x.shape[0] < 2 or (z is not None and np.shape(z)[0] < 2):
        raise DegenerateSampleError("bootstrap needs at least 2 observations per group")
    xc = x - x.mean(axis=0)
    zc = None
    if z is not None:
        z = np.asarray(z, dtype=np.float64)
        zc = z - z.mean(axis=0)
    streams = np.random.SeedSequence(cfg.seed).spawn(cfg.b)

    def one(ss):
        return _replicate_abs_t(x, xc, z, zc, np.random.default_rng(ss))

    if cfg.workers > 1:
        with ThreadPoolExecutor(cfg.workers) as pool:
            rows = list(pool.map(one, streams))
    else:
        rows = [one(ss) for ss in streams]
    return np.vstack(rows)


def bootstrap_individual_pvalues(x, cfg: BootstrapConfig, z=None, t_obs=None) -> np.ndarray:
    """p_j = (1/B) #{k : |T*_kj| >= |T_j|}."""
    t_obs = np.abs(full_tstats(x, z) if t_obs is None else np.asarray(t_obs))
    tb = bootstrap_abs_t(x, cfg, z)
    return (tb >= t_obs).mean(axis=0)


def bootstrap_aggregate_pvalues(x, cfg: BootstrapConfig, z=None, t_obs=None) -> np.ndarray:
    """p_j = (1/(Bp)) #{(k, i) : |T*_ki| >= |T_j|}, from the pooled sorted replicates."""
    t_obs = np.abs(full_tstats(x, z) if t_obs is None else np.asarray(t_obs))
    pooled = np.sort(bootstrap_abs_t(x, cfg, z), axis=None)
    exceed = pooled.size - np.searchsorted(pooled, t_obs, side="left")
    return exceed / pooled.size
