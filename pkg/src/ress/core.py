"""Column-wise moments, one/two-sample t-statistics and balanced random splits.

Feature indices are 0-based throughout the library; reports convert to 1-based.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy import special

from .errors import (
    DataError,
    DegenerateSampleError,
    OddSampleWarning,
    ShapeError,
    TooFewObservationsError,
    ZeroVarianceError,
)

MIN_OBSERVATIONS = 4


def as_sample_matrix(values) -> np.ndarray:
    """Validate and return an ``(n_t, p)`` float64 array with finite entries."""
    m = np.asarray(values, dtype=np.float64)
    if m.ndim == 1:
        m = m[:, None]
    if m.ndim != 2:
        raise ShapeError(f"expected a 2-d observation matrix, got {m.ndim} dimensions")
    bad = ~np.isfinite(m)
    if bad.any():
        i, j = np.argwhere(bad)[0]
        raise DataError(f"non-finite value at observation {i}, feature {j}")
    return m


@dataclass(frozen=True)
class SplitPlan:
    group_a: np.ndarray
    group_b: np.ndarray
    dropped: int | None
    seed_used: int

    @property
    def n(self) -> int:
        return len(self.group_a)


@dataclass(frozen=True)
class GroupSummary:
    """Per-feature mean, (n-1)-divisor variance and the row count."""

    mean: np.ndarray
    var: np.ndarray
    n: int

    @property
    def p(self) -> int:
        return len(self.mean)


@dataclass(frozen=True)
class TStatBundle:
    """Split t-statistics: ``t1``/``t2`` per half, ``t2_tilde`` scales half 2 by half-1 spread."""

    t1: np.ndarray
    t2: np.ndarray
    t2_tilde: np.ndarray


def column_summary(m: np.ndarray, rows=None) -> GroupSummary:
    """Mean and unbiased variance of each column over the selected rows.

    Uses the two-pass algorithm (center, then sum squares) so columns with a
    large offset relative to their spread keep full precision.
    """
    m = np.asarray(m, dtype=np.float64)
    sub = m if rows is None else m[np.asarray(rows, dtype=np.intp)]
    n = sub.shape[0]
    if n < 2:
        raise DegenerateSampleError(f"need at least 2 rows for a variance, got {n}")
    mean = sub.mean(axis=0)
    dev = sub - mean
    # second pass carries the residual sum for exactness (corrected two-pass)
    resid = dev.sum(axis=0)
    var = (np.einsum("ij,ij->j", dev, dev) - resid * resid / n) / (n - 1)
    np.maximum(var, 0.0, out=var)
    return GroupSummary(mean=mean, var=var, n=n)


def split_even(n_t: int, seed: int, stream: int = 0) -> SplitPlan:
    """Uniformly random balanced partition of ``range(n_t)``.

    Odd ``n_t`` drops one uniformly chosen index and emits
    :class:`OddSampleWarning`. ``stream`` selects an independent permutation
    for the same seed (used for the second group in two-sample designs).
    """
    if n_t < MIN_OBSERVATIONS:
        raise TooFewObservationsError(
            f"need at least {MIN_OBSERVATIONS} observations to split, got {n_t}"
        )
    rng = np.random.default_rng([int(seed) & 0xFFFFFFFFFFFFFFFF, stream])
    perm = rng.permutation(n_t)
    n = n_t // 2
    dropped = None
    if n_t % 2:
        dropped = int(perm[-1])
        warnings.warn(
            f"odd sample size {n_t}: observation {dropped} left out of the split",
            OddSampleWarning,
            stacklevel=2,
        )
    return SplitPlan(
        group_a=np.sort(perm[:n]),
        group_b=np.sort(perm[n : 2 * n]),
        dropped=dropped,
        seed_used=int(seed),
    )


def _check_positive_var(var: np.ndarray) -> None:
    zero = np.flatnonzero(var <= 0)
    if zero.size:
        raise ZeroVarianceError(zero)


def t_one_sample(s: GroupSummary) -> np.ndarray:
    _check_positive_var(s.var)
    return np.sqrt(s.n) * s.mean / np.sqrt(s.var)


def t_two_sample(sx: GroupSummary, sz: GroupSummary) -> np.ndarray:
    """Welch-type statistic (mean_x - mean_z) / sqrt(var_x/n + var_z/m)."""
    if sx.p != sz.p:
        raise ShapeError(f"feature count mismatch: {sx.p} vs {sz.p}")
    se2 = sx.var / sx.n + sz.var / sz.n
    _check_positive_var(se2)
    return (sx.mean - sz.mean) / np.sqrt(se2)


def split_tstats(
    x: np.ndarray, plan: SplitPlan, z: np.ndarray | None = None, plan_z: SplitPlan | None = None
) -> TStatBundle:
    """Statistics on both halves of a split.

    One-sample: ``t_k = sqrt(n) xbar_k / s_k`` and ``t2_tilde = sqrt(n) xbar_2 / s_1``.
    Two-sample: Welch statistics per half; ``t2_tilde`` keeps the half-2 mean
    difference but standardizes it with the half-1 variances.
    """
    s1 = column_summary(x, plan.group_a)
    s2 = column_summary(x, plan.group_b)
    if z is None:
        t1 = t_one_sample(s1)
        t2 = t_one_sample(s2)
        t2_tilde = np.sqrt(s2.n) * s2.mean / np.sqrt(s1.var)
        return TStatBundle(t1=t1, t2=t2, t2_tilde=t2_tilde)

    if plan_z is None:
        raise ValueError("two-sample statistics need a split of the second group")
    g1 = column_summary(z, plan_z.group_a)
    g2 = column_summary(z, plan_z.group_b)
    t1 = t_two_sample(s1, g1)
    t2 = t_two_sample(s2, g2)
    t2_tilde = (s2.mean - g2.mean) / np.sqrt(s1.var / s1.n + g1.var / g1.n)
    return TStatBundle(t1=t1, t2=t2, t2_tilde=t2_tilde)


def full_tstats(x: np.ndarray, z: np.ndarray | None = None) -> np.ndarray:
    """Full-sample one-sample t (``z is None``) or Welch two-sample t."""
    sx = column_summary(x)
    if z is None:
        return t_one_sample(sx)
    return t_two_sample(sx, column_summary(z))


def normal_cdf(x):
    """Standard normal CDF via erfc; accurate in both tails."""
    return special.ndtr(x)


def normal_sf(x):
    """Upper tail 1 - Phi(x) without cancellation for large x."""
    return special.ndtr(-np.asarray(x, dtype=np.float64))


def normal_isf(q):
    """Upper-q quantile z_q, i.e. Phi(z_q) = 1 - q."""
    return -special.ndtri(q)
