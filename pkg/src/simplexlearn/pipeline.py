"""End-to-end learner and experiment sweeps."""
from __future__ import annotations

import dataclasses
import itertools
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

from . import __version__
from .bounding import BoundingBall, NoiseModel, bounding_ball, plug_in_vol_root
from .errors import (DegenerateDataError, EmptyFamilyError, FamilyTooLargeError,
                     InsufficientDataError, OutOfRegimeError, ParameterError, SimplexLearnError,
                     SnrTooLowError, StageError)
from .geometry import IsoperimetryParams, Simplex, standard_simplex
from .metrics import (GuaranteeRecord, lemma3_bound, sample_complexity_thm2,
                      sample_complexity_thm3, tv_uniform)
from .quantize import (CANDIDATE_CAP, COVERING_CAP, Filters, QuantizationParams,
                       enumerate_candidates, grid_covering, random_covering)
from .rng import RngStream
from .sampling import NoisyDataset, generate_dataset, split_half
from .select import RECORD_CAP, SelectionReport, min_samples_selection, scheffe_tournament

THREADS_ENV = "SIMPLEXLEARN_THREADS"


def default_threads() -> int:
    try:
        return max(1, int(os.environ.get(THREADS_ENV, "1")))
    except ValueError:
        return 1


def _to_bool(v) -> bool:
    if isinstance(v, bool):
        return v
    s = str(v).strip().lower()
    if s in ("1", "true", "yes", "on"):
        return True
    if s in ("0", "false", "no", "off"):
        return False
    raise ParameterError(f"not a boolean: {v!r}")


def _opt_float(v):
    return None if v in (None, "", "none") else float(v)


@dataclass(frozen=True)
class ExperimentConfig:
    dim: int = 1
    sigma: Optional[float] = None
    snr: Optional[float] = None
    n: int = 5000
    seed: int = 0
    seeds: tuple = (0,)
    theta_lower: float = 1.0
    theta_upper: float = 1.0
    eps_rep: float = 0.2
    delta: float = 0.1
    covering: str = "grid"
    mode: str = "exact"
    mc_budget: int = 20_000
    scale_mode: str = "oracle"
    vol_root: Optional[float] = None
    strict: bool = False
    iso_filter: bool = True
    iso_slack: float = 2.0
    covering_cap: int = COVERING_CAP
    candidate_cap: int = CANDIDATE_CAP
    record_cap: int = RECORD_CAP
    truth: Optional[str] = None

    _COERCE = {
        "dim": int, "n": int, "seed": int, "mc_budget": int, "covering_cap": int,
        "candidate_cap": int, "record_cap": int, "sigma": _opt_float, "snr": _opt_float,
        "vol_root": _opt_float, "theta_lower": float, "theta_upper": float, "eps_rep": float,
        "delta": float, "iso_slack": float, "strict": _to_bool, "iso_filter": _to_bool,
        "covering": str, "mode": str, "scale_mode": str,
        "truth": lambda v: None if v in (None, "", "none") else str(v),
        "seeds": lambda v: tuple(int(s) for s in str(v).replace(";", ",").split(",") if s.strip())
        if not isinstance(v, (list, tuple)) else tuple(int(s) for s in v),
    }

    def __post_init__(self):
        if self.dim < 1:
            raise ParameterError("dim must be >= 1")
        if self.sigma is not None and self.snr is not None:
            raise ParameterError("give exactly one of sigma and snr")
        if self.sigma is not None and self.sigma < 0:
            raise ParameterError("sigma must be >= 0")
        if self.snr is not None and not self.snr > 0:
            raise ParameterError("snr must be positive")
        if self.n < 0:
            raise ParameterError("n must be >= 0")
        if not 0 < self.eps_rep < 1 or not 0 < self.delta < 1:
            raise ParameterError("eps_rep and delta must lie in (0, 1)")
        if self.covering not in ("grid", "random"):
            raise ParameterError(f"covering must be grid or random, got {self.covering!r}")
        if self.mode not in ("exact", "mc"):
            raise ParameterError(f"mode must be exact or mc, got {self.mode!r}")
        if self.scale_mode not in ("oracle", "config", "plug-in"):
            raise ParameterError(f"scale_mode must be oracle, config or plug-in, got {self.scale_mode!r}")
        if self.scale_mode == "config" and (self.snr is None or self.vol_root is None):
            raise ParameterError("scale_mode=config needs both snr and vol_root")
        IsoperimetryParams(self.theta_lower, self.theta_upper)

    @classmethod
    def from_mapping(cls, mapping: dict) -> "ExperimentConfig":
        names = {f.name for f in dataclasses.fields(cls)}
        kwargs = {}
        for key, value in mapping.items():
            key = key.replace("-", "_")
            if key not in names:
                raise ParameterError(f"unknown config key {key!r}")
            try:
                kwargs[key] = cls._COERCE[key](value)
            except (TypeError, ValueError) as exc:
                raise ParameterError(f"config key {key!r}: cannot parse {value!r} ({exc})") from None
        return cls(**kwargs)

    def replace(self, **changes) -> "ExperimentConfig":
        return dataclasses.replace(self, **changes)

    @property
    def iso_params(self) -> IsoperimetryParams:
        return IsoperimetryParams(self.theta_lower, self.theta_upper)

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["seeds"] = list(self.seeds)
        return d


@dataclass(eq=False)
class RunResult:
    learned: Simplex
    ball: BoundingBall
    family_size: int
    selection: SelectionReport
    quantization: QuantizationParams
    guarantee: GuaranteeRecord
    tv_to_truth: Optional[float]
    timings: dict
    config: dict
    version: str = __version__
    family_filters: dict = field(default_factory=dict)

    def to_dict(self, include_timings: bool = False, include_contests: Optional[bool] = None) -> dict:
        out = {
            "version": self.version,
            "config": self.config,
            "learned": self.learned.to_dict(),
            "ball": self.ball.to_dict(),
            "family_size": self.family_size,
            "family_filters": self.family_filters,
            "quantization": self.quantization.to_dict(),
            "selection": self.selection.to_dict(include_contests),
            "guarantee": self.guarantee.to_dict(),
        }
        if self.tv_to_truth is not None:
            out["tv_to_truth"] = self.tv_to_truth
        if include_timings:
            out["timings"] = dict(self.timings)
        return out


_HINTS = {
    InsufficientDataError: "collect more samples or disable strict mode",
    SnrTooLowError: "raise the SNR or theta_lower",
    DegenerateDataError: "the data has no spread; check the input file",
    FamilyTooLargeError: "raise eps_rep, lower K, or raise the cap",
    EmptyFamilyError: "relax the isoperimetry filter (iso_slack) or disable it",
}


def _stage(name, fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except StageError:
        raise
    except SimplexLearnError as exc:
        hint = next((h for t, h in _HINTS.items() if isinstance(exc, t)), "")
        raise StageError(name, exc, hint) from exc


def _noise_model(cfg: ExperimentConfig, sigma: float, truth: Optional[Simplex]):
    """(NoiseModel or None for plug-in, vol_root or None, provenance)."""
    if cfg.scale_mode == "oracle":
        if truth is None:
            raise StageError("bound", ParameterError("oracle scale mode needs the true simplex"),
                             "pass truth or use scale_mode = plug-in")
        vr = truth.volume ** (1.0 / truth.dim)
        return NoiseModel.oracle(sigma, vr), vr, "oracle"
    if cfg.scale_mode == "config":
        return NoiseModel.from_config(cfg.snr, sigma), cfg.vol_root, "config"
    return None, None, "plug-in"


def learn(dataset: NoisyDataset, config: ExperimentConfig, truth: Optional[Simplex] = None) -> RunResult:
    """Split, bound, quantize and select; deterministic given ``config.seed``."""
    truth = truth if truth is not None else dataset.truth
    k = dataset.dim
    root = RngStream(config.seed)
    params = config.iso_params
    timings = {}

    t0 = time.perf_counter()
    first, second = _stage("split", split_half, dataset)
    noise, vol_root, provenance = _noise_model(config, dataset.sigma, truth)
    ball = _stage("bound", bounding_ball, first, params, noise, config.delta, config.strict)
    if vol_root is None:
        vol_root = plug_in_vol_root(ball.diagnostics["D"], k, dataset.sigma)
    timings["bound"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    qp = _stage("quantize", QuantizationParams, config.eps_rep, vol_root, config.theta_upper, k,
                provenance)
    if config.covering == "grid":
        cov = _stage("quantize", grid_covering, ball, qp.eps_cov, config.covering_cap)
    else:
        cov = _stage("quantize", random_covering, ball, qp.eps_cov, root.child("cover"),
                     config.covering_cap)
    filters = Filters(iso=params if config.iso_filter else None, slack=config.iso_slack)
    family = _stage("quantize", enumerate_candidates, cov, k, filters, config.candidate_cap)
    timings["quantize"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    report = _stage("select", scheffe_tournament, family, second.points, config.mode,
                    config.mc_budget, root.child("select"), config.delta, config.record_cap)
    learned = family.simplex(report.winner)
    timings["select"] = time.perf_counter() - t0

    tv = None
    if truth is not None:
        mode = "exact" if k <= 2 else "mc"
        tv = float(tv_uniform(learned, truth, mode, config.mc_budget, root.child("tv")).value)
    snr = ball.diagnostics["snr_used"]
    try:
        eps1 = lemma3_bound(k, config.theta_upper, snr)
    except OutOfRegimeError:
        eps1 = None
    guarantee = GuaranteeRecord(eps1=eps1, eps2=config.eps_rep, delta=config.delta,
                                n_required=_thm3_or_none(k, config, snr))
    return RunResult(learned, ball, len(family), report, qp, guarantee, tv, timings,
                     config.to_dict(), __version__, dict(family.filters_applied))


def _thm3_or_none(k, config, snr):
    try:
        return sample_complexity_thm3(k, config.theta_lower, config.theta_upper,
                                      eps2=config.eps_rep, delta=config.delta, snr=snr)
    except (OutOfRegimeError, ParameterError):
        return None


# -- sweeps ------------------------------------------------------------------

SWEEP_COLUMNS = [
    "dim", "n", "sigma", "snr", "seed", "eps_rep", "delta", "theta_lower", "theta_upper",
    "covering", "mode", "M", "radius", "tv_to_truth", "lemma3_bound", "n_thm1", "n_thm2",
    "n_thm3", "t_bound", "t_quantize", "t_select", "error",
]


def expand_grid(mapping: dict) -> list[dict]:
    """Cartesian product over comma-separated values; ``seeds`` stays a list per cell."""
    axes, fixed = [], {}
    for key, value in mapping.items():
        if key == "seeds" or not isinstance(value, str) or "," not in value:
            fixed[key] = value
        else:
            axes.append((key, [v.strip() for v in value.split(",") if v.strip()]))
    cells = []
    for combo in itertools.product(*(vals for _, vals in axes)):
        cell = dict(fixed)
        cell.update({k: v for (k, _), v in zip(axes, combo)})
        cells.append(cell)
    return cells


def _blank(v):
    return "" if v is None else v


def run_trial(config: ExperimentConfig, seed: int, timings: bool = False) -> dict:
    """One sweep row: generate from the truth, learn, and evaluate."""
    from .io import load_simplex

    row = {c: "" for c in SWEEP_COLUMNS}
    row.update(dim=config.dim, n=config.n, seed=seed, eps_rep=config.eps_rep, delta=config.delta,
               theta_lower=config.theta_lower, theta_upper=config.theta_upper,
               covering=config.covering, mode=config.mode)
    try:
        truth = load_simplex(config.truth) if config.truth else standard_simplex(config.dim)
        vr = truth.volume ** (1.0 / truth.dim)
        sigma = config.sigma if config.sigma is not None else (vr / config.snr if config.snr else 0.0)
        row["sigma"] = sigma
        row["snr"] = config.snr if config.snr is not None else (vr / sigma if sigma > 0 else "inf")
        data = generate_dataset(truth, config.n, sigma, seed)
        res = learn(data, config.replace(seed=seed, sigma=None, snr=None), truth)
        snr = res.ball.diagnostics["snr_used"]
        row.update(M=res.family_size, radius=res.ball.radius, tv_to_truth=res.tv_to_truth,
                   lemma3_bound=_blank(res.guarantee.eps1),
                   n_thm1=min_samples_selection(res.family_size, config.eps_rep, config.delta),
                   n_thm2=sample_complexity_thm2(config.dim, config.theta_upper,
                                                 ratio=res.ball.radius / res.quantization.vol_root,
                                                 eps2=config.eps_rep, delta=config.delta),
                   n_thm3=_blank(_thm3_or_none(config.dim, config, snr)))
        if timings:
            row.update(t_bound=res.timings["bound"], t_quantize=res.timings["quantize"],
                       t_select=res.timings["select"])
    except SimplexLearnError as exc:
        row["error"] = str(exc)
    return row


def sweep(mapping: dict, threads: Optional[int] = None, timings: bool = False) -> list[dict]:
    """Rows for every (cell, seed) in grid order; failing trials become rows with ``error`` set."""
    cells = expand_grid(mapping)
    if not cells or not mapping:
        raise ParameterError("empty sweep grid")
    tasks = []
    for cell in cells:
        cfg = ExperimentConfig.from_mapping(cell)
        seeds = cfg.seeds if "seeds" in cell else (cfg.seed,)
        if not seeds:
            raise ParameterError("sweep needs at least one seed")
        tasks.extend((cfg, s) for s in seeds)
    threads = threads or default_threads()
    if threads == 1:
        return [run_trial(c, s, timings) for c, s in tasks]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(lambda t: run_trial(t[0], t[1], timings), tasks))
