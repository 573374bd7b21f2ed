"""Seeded Monte-Carlo experiments with CSV output.

An experiment is a preset of sweep axes (``N``, ``L``, ``K``, ``M``,
``snr_db``, ``delta_f``) plus data and method settings. Every combination of
axis values is a *point*; every point runs ``trials`` independent trials and
every trial runs each method on the same data. Trial ``t`` at a point draws
all of its randomness from ``SeedSequence([seed, crc32(point), t])``, so
results do not depend on scheduling or on which other points are swept.

Configs are flat ``key = value`` text; lists are comma separated and integer
ranges may be written ``a..b``. ``delta_f`` entries may carry a ``/N``
suffix to be read in units of ``1/N``.
"""

import csv
import io
import itertools
import math
import time
import zlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from datetime import datetime, timezone

import numpy as np

from .admm import AdmmOptions
from .baselines import anm_solve, anm_tau, interform_solve
from .dual import TAU_RULES, tau_for
from .retrieval import (
    RANK_EPS,
    ConditioningError,
    DegenerateSpectrumError,
    estimate_rank,
    identifiability_sweep,
    recover_gains,
    vandermonde_decompose,
)
from .signals import (
    SUCCESS_RMSE,
    NoiseSpec,
    matched_rmse,
    observe,
    random_model,
    snr_to_sigma,
    synthesize,
    uniform_frequencies,
)
from .solver import solve_denoising, solve_noiseless
from .structured import DimensionError, NumericalError

__all__ = [
    "COLUMNS",
    "EXPERIMENTS",
    "METHODS",
    "ConfigError",
    "ExperimentConfig",
    "TrialRecord",
    "parse_config",
    "load_config",
    "missing_data_preset",
    "trial_seed",
    "run_trial",
    "run",
    "write_csv",
    "summarize",
    "config_keys",
]

COLUMNS = ("experiment", "N", "L", "K", "M", "snr_db", "delta_f", "method", "trial",
           "rmse", "success", "iters", "solve_secs", "ca_spread")
METHODS = ("saca", "anm", "interform")
FREQUENCY_MODES = ("uniform", "random", "anchored")


class ConfigError(ValueError):
    """Bad experiment configuration; the message names the offending key."""


def missing_data_preset():
    """Observed rows (1-based) of the ``N = 11`` missing-data case: all but 2 and 10."""
    return np.array([j for j in range(1, 12) if j not in (2, 10)])


@dataclass(frozen=True)
class ExperimentConfig:
    """One experiment: sweep axes, data model, methods and solver settings.

    ``M`` of ``None`` means full data unless ``omega_c`` lists removed rows.
    ``delta_f`` holds ``(value, per_N)`` pairs. ``frequency_mode`` selects
    uniform ``-0.45 + k/K`` frequencies, random ones with minimum separation
    ``delta_f``, or ``[anchor, anchor + delta_f, far]``.
    """

    experiment: str
    N: tuple = (11,)
    L: tuple = (10,)
    K: tuple = (3,)
    M: tuple = (None,)
    omega_c: tuple = ()
    snr_db: tuple = (math.inf,)
    delta_f: tuple = ((0.0, False),)
    frequency_mode: str = "random"
    anchor: float = -0.01
    far: float = 0.35
    trials: int = 10
    seed: int = 0
    methods: tuple = ("saca",)
    tau_rule: str = "explicit"
    rank_eps: float = RANK_EPS
    n: int | None = None
    max_iter: int = 1000
    abs_tol: float = 1e-4
    rel_tol: float = 1e-5
    record_time: bool = True

    def __post_init__(self):
        for name in ("N", "L", "K", "M", "snr_db", "delta_f", "methods"):
            if not getattr(self, name):
                raise ConfigError(f"{name}: sweep list must be non-empty")
        if self.trials < 1:
            raise ConfigError("trials: must be >= 1")
        if self.frequency_mode not in FREQUENCY_MODES:
            raise ConfigError(f"frequency_mode: expected one of {FREQUENCY_MODES}")
        if self.frequency_mode == "anchored" and set(self.K) != {3}:
            raise ConfigError("K: anchored frequencies need K = 3")
        bad = [m for m in self.methods if m not in METHODS]
        if bad:
            raise ConfigError(f"methods: unknown method(s) {bad}; expected {METHODS}")
        if self.tau_rule not in TAU_RULES:
            raise ConfigError(f"tau_rule: expected one of {sorted(TAU_RULES)}")
        if self.seed < 0 or self.seed >= 2 ** 64:
            raise ConfigError("seed: must be an unsigned 64-bit integer")

    @property
    def noiseless(self):
        return all(math.isinf(s) for s in self.snr_db)

    def solver_options(self):
        return AdmmOptions(max_iter=self.max_iter, abs_tol=self.abs_tol,
                           rel_tol=self.rel_tol, n=self.n)

    def points(self):
        """All sweep points in row-major order of ``N, L, K, M, snr_db, delta_f``."""
        out = []
        for N, L, K, M, snr, (d, per_n) in itertools.product(
                self.N, self.L, self.K, self.M, self.snr_db, self.delta_f):
            if M is None:
                M = N - len(self.omega_c)
            if not 1 <= M <= N:
                raise ConfigError(f"M: {M} is outside 1..N={N}")
            out.append(dict(N=N, L=L, K=K, M=M, snr_db=snr, delta_f=d / N if per_n else d))
        return out


def _preset(experiment, **kw):
    return replace(ExperimentConfig(experiment), **kw)


# Desk-scale defaults; every key can be raised back to the published scale.
EXPERIMENTS = {
    "identifiability": _preset(
        "identifiability", N=(5,), L=(100,), K=tuple(range(2, 9)), trials=20,
        frequency_mode="uniform", methods=("saca", "anm")),
    "phase-transition": _preset(
        "phase-transition", N=(11,), L=tuple(range(1, 11)) + (20,), K=(4,),
        M=tuple(range(2, 10)), delta_f=((1.2, True),), trials=10,
        methods=("saca", "interform", "anm")),
    "separation-sweep": _preset(
        "separation-sweep", L=(20,), snr_db=(20.0,), frequency_mode="anchored",
        delta_f=tuple((d, True) for d in (0.05, 0.1, 0.2, 0.3, 0.5, 1.0)), trials=20,
        methods=("saca", "anm")),
    "channel-sweep": _preset(
        "channel-sweep", L=(1, 2, 3, 5, 7, 10, 15, 20), snr_db=(20.0,),
        frequency_mode="anchored", delta_f=((0.01, False), (0.3, True)), trials=20,
        methods=("saca", "anm")),
    "snr-sweep": _preset(
        "snr-sweep", L=(20,), snr_db=(0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0),
        frequency_mode="anchored", delta_f=((0.01, False),), trials=20,
        methods=("saca", "anm")),
    "denoise-demo": _preset(
        "denoise-demo", L=(30,), snr_db=(20.0,), frequency_mode="anchored",
        delta_f=((0.05, True),), trials=100, methods=("saca", "anm")),
    "bench": _preset(
        "bench", N=(11, 21, 31), L=(30,), snr_db=(20.0,), frequency_mode="anchored",
        delta_f=((0.05, True),), trials=3, methods=("saca",)),
}


# ---------------------------------------------------------------- parsing

def _split(text):
    return [p.strip() for p in text.split(",") if p.strip()]


def _ints(text):
    out = []
    for part in _split(text):
        if ".." in part:
            a, b = part.split("..")
            out.extend(range(int(a), int(b) + 1))
        else:
            out.append(int(part))
    return tuple(out)


def _floats(text):
    return tuple(float(p) for p in _split(text))


def _deltas(text):
    out = []
    for part in _split(text):
        per_n = part.replace(" ", "").endswith("/N")
        out.append((float(part.replace(" ", "")[:-2] if per_n else part), per_n))
    return tuple(out)


def _ms(text):
    if text.strip() in ("full", ""):
        return (None,)
    return _ints(text)


def _omega_c(text):
    if text.strip() == "preset":
        return (2, 10)
    if text.strip() in ("none", ""):
        return ()
    return _ints(text)


def _bool(text):
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _opt_int(text):
    return None if text.strip() in ("none", "auto", "") else int(text)


_PARSERS = {
    "N": _ints, "L": _ints, "K": _ints, "M": _ms, "omega_c": _omega_c,
    "snr_db": _floats, "delta_f": _deltas, "frequency_mode": str.strip,
    "anchor": float, "far": float, "trials": int, "seed": int,
    "methods": lambda s: tuple(_split(s)), "tau_rule": str.strip,
    "rank_eps": float, "n": _opt_int, "max_iter": int, "abs_tol": float,
    "rel_tol": float, "record_time": _bool,
}


def parse_config(text):
    """Parse ``key = value`` lines into a dict of raw strings."""
    out = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key = value, got {line!r}")
        key, value = (p.strip() for p in line.split("=", 1))
        out[key] = value
    return out


def load_config(experiment, raw=None, seed=None):
    """Build an :class:`ExperimentConfig` from a preset plus raw overrides."""
    if experiment not in EXPERIMENTS:
        raise ConfigError(f"experiment: unknown {experiment!r}; expected one of {sorted(EXPERIMENTS)}")
    changes = {}
    for key, value in (raw or {}).items():
        if key == "experiment":
            if value.strip() != experiment:
                raise ConfigError(f"experiment: config says {value!r}, command line says {experiment!r}")
            continue
        if key not in _PARSERS:
            raise ConfigError(f"{key}: unknown config key")
        try:
            changes[key] = _PARSERS[key](value)
        except ValueError as exc:
            raise ConfigError(f"{key}: cannot parse {value!r} ({exc})") from None
    if seed is not None:
        changes["seed"] = seed
    cfg = replace(EXPERIMENTS[experiment], **changes)
    cfg.points()  # validates M against N
    return cfg


# ---------------------------------------------------------------- trials

@dataclass
class TrialRecord:
    experiment: str
    N: int
    L: int
    K: int
    M: int
    snr_db: float
    delta_f: float
    method: str
    trial: int
    rmse: float
    success: bool
    iters: int
    solve_secs: float
    ca_spread: float
    converged: bool = True
    retrieval_secs: float = field(default=0.0, repr=False)

    def row(self):
        """CSV fields. Non-converged solves are written with negative ``iters``."""
        iters = self.iters if self.converged else -self.iters
        return [self.experiment, str(self.N), str(self.L), str(self.K), str(self.M),
                _fmt(self.snr_db), _fmt(self.delta_f), self.method, str(self.trial),
                _fmt(self.rmse), "1" if self.success else "0", str(iters),
                _fmt(self.solve_secs), _fmt(self.ca_spread)]


def _fmt(x):
    return f"{float(x):.9g}"


def _point_key(point):
    return ";".join(f"{k}={_fmt(v)}" for k, v in sorted(point.items()))


def trial_seed(seed, point, trial):
    """Seed sequence for one trial; independent of sweep order."""
    return np.random.SeedSequence([seed, zlib.crc32(_point_key(point).encode()), trial])


def _frequencies(cfg, point):
    K, d = point["K"], point["delta_f"]
    if cfg.frequency_mode == "uniform":
        return uniform_frequencies(K)
    if cfg.frequency_mode == "anchored":
        return np.array([cfg.anchor, cfg.anchor + d, cfg.far])
    return None  # random, drawn by random_model with separation d


def _omega(cfg, point, rng):
    N, M = point["N"], point["M"]
    if cfg.omega_c:
        keep = np.array([j for j in range(1, N + 1) if j not in cfg.omega_c])
        if keep.size != M:
            raise ConfigError(f"M: omega_c leaves {keep.size} rows but M={M}")
        return keep
    if M == N:
        return np.arange(1, N + 1)
    return np.sort(rng.choice(N, M, replace=False)) + 1


def _relative_spread(signal, f):
    mod, _, spread = recover_gains(signal, f)
    return float(np.max(spread / np.maximum(mod, 1e-300))) if f.size else math.nan


def _solve_and_retrieve(cfg, method, obs, sigma, point):
    """Return ``(frequency estimates or None, signal, iters, converged, solve_secs)``."""
    K = point["K"]
    opts = cfg.solver_options()
    noisy = sigma is not None
    t0 = time.perf_counter()
    if method == "saca" and cfg.experiment == "identifiability":
        est, results = identifiability_sweep(obs.values, eps=cfg.rank_eps, opts=opts,
                                             full_output=True)
        secs = time.perf_counter() - t0
        iters = sum(r.iterations for r in results)
        conv = all(r.converged for r in results)
        if est is None:
            return None, None, iters, conv, secs
        return est.frequencies, results[-1].Z, iters, conv, secs
    if method == "saca":
        res = (solve_denoising(obs, tau_for(obs, sigma, cfg.tau_rule), opts) if noisy
               else solve_noiseless(obs, opts))
        signal = res.Z
    else:
        tau = None
        if noisy:
            tau = (anm_tau(sigma, obs.M, obs.L, obs.span) if method == "anm"
                   else tau_for(obs, sigma, cfg.tau_rule))
        res = (anm_solve if method == "anm" else interform_solve)(obs, tau, opts)
        signal = res.X
    secs = time.perf_counter() - t0
    n = (res.t.size + 1) // 2
    if cfg.experiment == "identifiability":
        order = estimate_rank(res.t, cfg.rank_eps)
        if order >= n:
            return None, signal, res.iterations, res.converged, secs
    else:
        order = K
    f = vandermonde_decompose(res.t, order).frequencies
    return f, signal, res.iterations, res.converged, secs


def run_trial(cfg, point, trial):
    """Run every method of ``cfg`` on one freshly drawn data set."""
    rng = np.random.default_rng(trial_seed(cfg.seed, point, trial))
    N, L, K = point["N"], point["L"], point["K"]
    sep = point["delta_f"] if cfg.frequency_mode == "random" else 0.0
    model = random_model(rng, N, L, K, separation=sep, frequencies=_frequencies(cfg, point))
    omega = _omega(cfg, point, rng)
    X = synthesize(model)
    sigma = None
    noise = NoiseSpec()
    if not math.isinf(point["snr_db"]):
        sigma = snr_to_sigma(X[omega - 1], point["snr_db"])
        noise = NoiseSpec(sigma, int(rng.integers(2 ** 63)))
    obs = observe(X, omega, noise)

    records = []
    for method in cfg.methods:
        rmse = spread = math.nan
        iters, conv, secs, rsecs = 0, False, math.nan, 0.0
        try:
            f, signal, iters, conv, secs = _solve_and_retrieve(cfg, method, obs, sigma, point)
            t1 = time.perf_counter()
            if f is not None:
                if f.size == K:
                    rmse = matched_rmse(model.frequencies, f)
                rows = signal if f.size >= N else signal[:N]
                spread = _relative_spread(rows, f)
            rsecs = time.perf_counter() - t1
        except (DegenerateSpectrumError, ConditioningError, DimensionError, NumericalError):
            pass
        # success is decided on the value exactly as serialized
        ok = float(_fmt(rmse)) <= SUCCESS_RMSE
        if not cfg.record_time:
            secs = rsecs = math.nan
        records.append(TrialRecord(cfg.experiment, N, L, K, point["M"], point["snr_db"],
                                   point["delta_f"], method, trial, rmse, ok, iters, secs,
                                   spread, conv, rsecs))
    return records


def _run_task(task):
    cfg, point, trial = task
    return run_trial(cfg, point, trial)


def run(cfg, jobs=1):
    """All trial records, ordered by (point, trial, method)."""
    tasks = [(cfg, p, t) for p in cfg.points() for t in range(cfg.trials)]
    if jobs <= 1:
        batches = map(_run_task, tasks)
        return [r for batch in batches for r in batch]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return [r for batch in pool.map(_run_task, tasks) for r in batch]


def write_csv(records, stream, header_comment=True):
    if header_comment:
        stamp = datetime.now(timezone.utc).isoformat(timespec="seconds")
        stream.write(f"# caspectral run {stamp}\n")
    w = csv.writer(stream, lineterminator="\n")
    w.writerow(COLUMNS)
    for r in records:
        w.writerow(r.row())


def summarize(records):
    """Per-point, per-method means as a fixed-width text table."""
    groups = {}
    for r in records:
        key = (r.N, r.L, r.K, r.M, r.snr_db, r.delta_f, r.method)
        groups.setdefault(key, []).append(r)
    out = io.StringIO()
    head = (f"{'N':>4} {'L':>4} {'K':>3} {'M':>3} {'snr':>6} {'delta_f':>10} {'method':>10} "
            f"{'trials':>6} {'success':>8} {'rmse':>10} {'iters':>7} {'noconv':>6} "
            f"{'solve_s':>9} {'retr_s':>9}")
    print(head, file=out)
    for key, rs in groups.items():
        N, L, K, M, snr, d, method = key
        rmse = np.array([r.rmse for r in rs])
        finite = rmse[np.isfinite(rmse)]
        mean_rmse = finite.mean() if finite.size else math.nan
        print(f"{N:>4} {L:>4} {K:>3} {M:>3} {snr:>6.1f} {d:>10.4g} {method:>10} "
              f"{len(rs):>6} {np.mean([r.success for r in rs]):>8.3f} {mean_rmse:>10.3e} "
              f"{np.mean([r.iters for r in rs]):>7.1f} {sum(not r.converged for r in rs):>6} "
              f"{np.mean([r.solve_secs for r in rs]):>9.4f} "
              f"{np.mean([r.retrieval_secs for r in rs]):>9.4f}", file=out)
    return out.getvalue()


def config_keys():
    """Names accepted in config files and ``--set``."""
    return sorted(_PARSERS)
