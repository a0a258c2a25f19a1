"""Synthetic designs, replicated experiments and the large-deviation ratio check."""

from __future__ import annotations

import dataclasses
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy import signal

from . import baselines, engine
from .errors import ConfigError, ParameterError, RessError

ERROR_FAMILIES = ("normal", "t5", "exp1_centered", "mixed", "gamma", "chisq2_centered")
SIGNAL_LAWS = ("unif_pos", "unif_neg", "mixed_sign")
METHODS = ("ress", "ress0", "ress_plus", "ress_one_sided", "bh", "iboot", "aboot")
DELTA_RANGE = (1.0, 1.5)


@dataclass
class SimConfig:
    """One experimental design. ``n_z`` switches to two groups (X shifted, Z centered)."""

    p: int = 5000
    n_t: int = 100
    vartheta: float = 0.05
    rho: float = 0.0
    error_family: str = "exp1_centered"
    gamma_lambda: float = 2.0
    signal_law: str = "mixed_sign"
    signal_scale: float = 1.0
    alpha: float = 0.2
    reps: int = 200
    master_seed: int = 0
    bootstrap_b: int = baselines.DEFAULT_B
    methods: list[str] = field(default_factory=lambda: ["ress", "ress0", "bh"])
    n_z: int | None = None

    def __post_init__(self):
        self.validate()

    @property
    def p1(self) -> int:
        return int(np.floor(self.vartheta * self.p))

    @property
    def two_sample(self) -> bool:
        return self.n_z is not None

    def validate(self) -> None:
        if self.p < 1:
            raise ConfigError("p", f"must be >= 1, got {self.p}")
        if self.n_t < 4:
            raise ConfigError("n_t", f"must be >= 4, got {self.n_t}")
        if self.n_z is not None and self.n_z < 4:
            raise ConfigError("n_z", f"must be >= 4, got {self.n_z}")
        if not 0.0 < self.vartheta < 1.0:
            raise ConfigError("vartheta", f"must lie in (0, 1), got {self.vartheta}")
        if self.p1 < 1:
            raise ConfigError("vartheta", f"floor(vartheta * p) must be >= 1, got {self.p1}")
        if not 0.0 <= self.rho < 1.0:
            raise ConfigError("rho", f"must lie in [0, 1), got {self.rho}")
        if self.error_family not in ERROR_FAMILIES:
            raise ConfigError("error_family", f"unknown family {self.error_family!r}")
        if self.gamma_lambda <= 0:
            raise ConfigError("gamma_lambda", f"must be > 0, got {self.gamma_lambda}")
        if self.signal_law not in SIGNAL_LAWS:
            raise ConfigError("signal_law", f"unknown law {self.signal_law!r}")
        if not 0.0 < self.alpha < 1.0:
            raise ConfigError("alpha", f"must lie in (0, 1), got {self.alpha}")
        if self.reps < 1:
            raise ConfigError("reps", f"must be >= 1, got {self.reps}")
        if self.bootstrap_b < 1:
            raise ConfigError("bootstrap_b", f"must be >= 1, got {self.bootstrap_b}")
        if not self.methods:
            raise ConfigError("methods", "at least one method is required")
        for i, m in enumerate(self.methods):
            if m not in METHODS:
                raise ConfigError(f"methods[{i}]", f"unknown method {m!r}")
            if m == "ress_one_sided" and self.two_sample:
                raise ConfigError(f"methods[{i}]", "one-sided thresholds are one-sample only")

    @classmethod
    def from_dict(cls, d: dict) -> "SimConfig":
        if not isinstance(d, dict):
            raise ConfigError("<root>", "config must be a mapping")
        known = {f.name: f for f in dataclasses.fields(cls)}
        for k in d:
            if k not in known:
                raise ConfigError(k, "unknown field")
        kwargs = {}
        for k, v in d.items():
            kwargs[k] = _coerce(k, known[k].type, v)
        return cls(**kwargs)

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


def _coerce(name, typ, v):
    typ = str(typ)
    if typ.startswith("int"):
        if v is None and "None" in typ:
            return None
        if isinstance(v, bool) or not isinstance(v, int):
            raise ConfigError(name, f"expected an integer, got {v!r}")
        return v
    if typ == "float":
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise ConfigError(name, f"expected a number, got {v!r}")
        return float(v)
    if typ == "str":
        if not isinstance(v, str):
            raise ConfigError(name, f"expected a string, got {v!r}")
        return v
    if typ.startswith("list"):
        if not isinstance(v, list) or not all(isinstance(s, str) for s in v):
            raise ConfigError(name, f"expected a list of strings, got {v!r}")
        return list(v)
    return v


@dataclass
class EvalMetrics:
    method: str
    fdp: np.ndarray
    tpp: np.ndarray
    wall_time: np.ndarray

    def _sd(self, a):
        return float(np.std(a, ddof=1)) if len(a) > 1 else 0.0

    @property
    def fdr_mean(self) -> float:
        return float(np.mean(self.fdp))

    @property
    def fdr_sd(self) -> float:
        return self._sd(self.fdp)

    @property
    def tpr_mean(self) -> float:
        return float(np.mean(self.tpp))

    @property
    def tpr_sd(self) -> float:
        return self._sd(self.tpp)

    @property
    def time_mean(self) -> float:
        return float(np.mean(self.wall_time))

    def summary(self) -> dict:
        return {
            "method": self.method,
            "fdr": self.fdr_mean,
            "fdr_sd": self.fdr_sd,
            "tpr": self.tpr_mean,
            "tpr_sd": self.tpr_sd,
        }


def _innovations(family, rng, n, p, gamma_lambda=2.0):
    if family == "normal":
        return rng.standard_normal((n, p))
    if family == "t5":
        return rng.standard_t(5, (n, p))
    if family == "exp1_centered":
        return rng.standard_exponential((n, p)) - 1.0
    if family == "chisq2_centered":
        return rng.chisquare(2, (n, p)) - 2.0
    if family == "gamma":
        k = gamma_lambda / 2.0
        return rng.gamma(k, 2.0, (n, p)) - 2.0 * k
    if family == "mixed":
        a, b = p // 3, (2 * p) // 3
        return np.hstack(
            [
                rng.standard_normal((n, a)),
                rng.standard_t(5, (n, b - a)),
                rng.standard_exponential((n, p - b)) - 1.0,
            ]
        )
    raise ParameterError(f"unknown error family {family!r}")


def gen_errors(family: str, rho: float, n: int, p: int, rng, gamma_lambda: float = 2.0):
    """``(n, p)`` errors, AR(1) along the feature index with centered innovations.

    The recursion starts from the first innovation with no burn-in and no
    variance rescaling.
    """
    if not 0.0 <= rho < 1.0:
        raise ParameterError(f"rho must lie in [0, 1), got {rho}")
    if n < 1 or p < 1:
        raise ParameterError(f"need n, p >= 1, got n={n}, p={p}")
    e = _innovations(family, rng, n, p, gamma_lambda)
    if rho == 0.0:
        return e
    return signal.lfilter([1.0], [1.0, -rho], e, axis=1)


def gen_signals(p: int, vartheta: float, n_t: int, signal_law: str, rng, scale: float = 1.0):
    """Mean vector with ``floor(vartheta p)`` nonzero entries delta * sqrt(log p / n_t)."""
    p1 = int(np.floor(vartheta * p))
    if p1 < 1:
        raise ParameterError(f"floor(vartheta * p) must be >= 1, got {p1}")
    truth = np.sort(rng.choice(p, size=p1, replace=False))
    delta = rng.uniform(*DELTA_RANGE, size=p1)
    if signal_law == "unif_neg":
        delta = -delta
    elif signal_law == "mixed_sign":
        delta = np.where(rng.random(p1) < 0.5, -delta, delta)
    elif signal_law != "unif_pos":
        raise ParameterError(f"unknown signal law {signal_law!r}")
    mu = np.zeros(p)
    mu[truth] = scale * delta * np.sqrt(np.log(p) / n_t)
    return mu, truth


def evaluate(rejected, truth) -> tuple[float, float]:
    rejected = set(np.asarray(rejected).tolist())
    truth = set(np.asarray(truth).tolist())
    tp = len(rejected & truth)
    fdp = (len(rejected) - tp) / max(len(rejected), 1)
    tpp = tp / max(len(truth), 1)
    return fdp, tpp


_RESS_VARIANT = {
    "ress": engine.Variant.REFINED,
    "ress0": engine.Variant.RAW,
    "ress_plus": engine.Variant.PLUS,
    "ress_one_sided": engine.Variant.ONE_SIDED,
}


def run_method(method: str, x, alpha: float, seed: int, z=None, bootstrap_b=baselines.DEFAULT_B):
    """Rejected feature indices of one method on one data set."""
    if method in _RESS_VARIANT:
        return engine.ress(x, alpha, _RESS_VARIANT[method], seed=seed, z=z).result.rejected
    if method == "bh":
        return baselines.bh_normal_threshold(baselines.full_tstats(x, z), alpha).rejected
    if method in ("iboot", "aboot"):
        cfg = baselines.BootstrapConfig(b=bootstrap_b, seed=seed)
        fn = (
            baselines.bootstrap_individual_pvalues
            if method == "iboot"
            else baselines.bootstrap_aggregate_pvalues
        )
        return baselines.bh_step_up(fn(x, cfg, z), alpha)
    raise ParameterError(f"unknown method {method!r}")


class ReplicationError(RessError):
    def __init__(self, rep, method, cause):
        self.rep = rep
        self.method = method
        self.exit_code = getattr(cause, "exit_code", 1)
        super().__init__(f"replication {rep}, method {method}: {cause}")


def generate_data(cfg: SimConfig, rng):
    """Draw ``(x, z, truth)`` for one replication (``z`` is None for one-sample designs)."""
    mu, truth = gen_signals(cfg.p, cfg.vartheta, cfg.n_t, cfg.signal_law, rng, cfg.signal_scale)
    x = gen_errors(cfg.error_family, cfg.rho, cfg.n_t, cfg.p, rng, cfg.gamma_lambda) + mu
    z = None
    if cfg.two_sample:
        z = gen_errors(cfg.error_family, cfg.rho, cfg.n_z, cfg.p, rng, cfg.gamma_lambda)
    return x, z, truth


def replication_rng(master_seed: int, rep: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([master_seed, rep]))


def run_replication(cfg: SimConfig, rep: int, methods=None):
    """``{method: (fdp, tpp, seconds)}`` for replication ``rep``, reproducible in isolation."""
    methods = cfg.methods if methods is None else methods
    rng = replication_rng(cfg.master_seed, rep)
    x, z, truth = generate_data(cfg, rng)
    method_seed = int(rng.integers(2**63))
    out = {}
    for m in methods:
        t0 = time.perf_counter()
        try:
            rej = run_method(m, x, cfg.alpha, method_seed, z, cfg.bootstrap_b)
        except RessError as exc:
            raise ReplicationError(rep, m, exc) from exc
        out[m] = (*evaluate(rej, truth), time.perf_counter() - t0)
    return out


def run_experiment(cfg: SimConfig, methods=None, workers: int = 1, progress=None):
    """Run all replications; returns ``{method: EvalMetrics}`` in method order.

    Results are gathered in replication order, so aggregates do not depend
    on ``workers``.
    """
    methods = list(cfg.methods if methods is None else methods)
    reps = range(cfg.reps)

    def one(r):
        res = run_replication(cfg, r, methods)
        if progress is not None:
            progress(r)
        return res

    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            results = list(pool.map(one, reps))
    else:
        results = [one(r) for r in reps]
    return {
        m: EvalMetrics(
            method=m,
            fdp=np.array([r[m][0] for r in results]),
            tpp=np.array([r[m][1] for r in results]),
            wall_time=np.array([r[m][2] for r in results]),
        )
        for m in methods
    }


FAMILY_SKEWNESS = {
    "normal": 0.0,
    "t5": 0.0,
    "exp1_centered": 2.0,
    "chisq2_centered": 2.0,
}


def family_skewness(family: str, gamma_lambda: float = 2.0) -> float:
    if family == "gamma":
        return float(np.sqrt(8.0 / gamma_lambda))
    try:
        return FAMILY_SKEWNESS[family]
    except KeyError:
        raise ParameterError(f"family {family!r} has no single skewness") from None


@dataclass(frozen=True)
class RatioCheck:
    t: float
    mc_ratio: float
    predicted: float
    se: float
    n_pos: int
    n_neg: int

    @property
    def insufficient(self) -> bool:
        return min(self.n_pos, self.n_neg) < 100

    @property
    def z_score(self) -> float:
        return (self.mc_ratio - self.predicted) / self.se if self.se > 0 else np.inf


RATIO_BLOCK = 500_000


def null_w_draws(family: str, n: int, size: int, rng, gamma_lambda=2.0, chunk=50_000):
    """Yield chunks of W = T1 T2 with T1, T2 one-sample t-statistics from independent size-n null samples."""
    done = 0
    while done < size:
        m = min(chunk, size - done)
        e = _innovations(family, rng, 2 * m, n, gamma_lambda).reshape(2, m, n)
        mean = e.mean(axis=2)
        dev = e - mean[..., None]
        sd = np.sqrt(np.einsum("ijk,ijk->ij", dev, dev) / (n - 1))
        t = np.sqrt(n) * mean / sd
        yield t[0] * t[1]
        done += m


def deviation_ratio_check(
    family: str,
    n: int,
    t_grid,
    reps: int,
    rng=None,
    gamma_lambda: float = 2.0,
    workers: int = 1,
    seed: int = 0,
) -> list[RatioCheck]:
    """Monte-Carlo Pr(W >= t) / Pr(W <= -t) against 1 + 2 t^3 kappa^2 / (9 n).

    ``n`` is the size of each half. The ``reps`` null W draws come in
    blocks of ``RATIO_BLOCK`` with one spawned stream per block, so the
    counts do not depend on ``workers``. The MC standard error comes from
    the delta method on the log ratio of two multinomial counts.
    """
    t_grid = np.asarray(t_grid, dtype=np.float64)
    kappa = family_skewness(family, gamma_lambda)
    if rng is not None:
        seed = int(rng.integers(2**63))
    n_blocks = max(1, -(-reps // RATIO_BLOCK))
    streams = np.random.SeedSequence(seed).spawn(n_blocks)
    sizes = np.full(n_blocks, RATIO_BLOCK)
    sizes[-1] = reps - RATIO_BLOCK * (n_blocks - 1)

    def count(args):
        ss, size = args
        g = np.random.default_rng(ss)
        pos = np.zeros(len(t_grid), dtype=np.int64)
        neg = np.zeros(len(t_grid), dtype=np.int64)
        for w in null_w_draws(family, n, int(size), g, gamma_lambda):
            w = np.sort(w)
            pos += len(w) - np.searchsorted(w, t_grid, side="left")
            neg += np.searchsorted(w, -t_grid, side="right")
        return pos, neg

    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            parts = list(pool.map(count, zip(streams, sizes)))
    else:
        parts = [count(a) for a in zip(streams, sizes)]
    pos = sum(p for p, _ in parts)
    neg = sum(q for _, q in parts)

    out = []
    for t, a, b in zip(t_grid, pos, neg):
        ratio = a / b if b else np.inf
        se = ratio * np.sqrt(1.0 / a + 1.0 / b) if a and b else np.inf
        pred = 1.0 + 2.0 * t**3 * kappa**2 / (9.0 * n)
        out.append(RatioCheck(float(t), float(ratio), float(pred), float(se), int(a), int(b)))
    return out
