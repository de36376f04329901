"""Total-variation distances, the noise-gap bound and sample-size calculators.

All logarithms are natural. Calculators evaluate at 50 significant digits
and return exact integer ceilings.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import mpmath
import numpy as np

from . import _hp
from ._kernels import snap_intersection, triangle_intersection_area
from .errors import OutOfRegimeError, ParameterError, UnsupportedExactError
from .geometry import Simplex, contains
from .rng import as_generator
from .sampling import sample_uniform_simplex

DEFAULT_MC_BUDGET = 20_000
NESTED_OUTER = 5_000
NESTED_INNER = 5_000


@dataclass(frozen=True)
class TvEstimate:
    value: float
    standard_error: float = 0.0
    method: str = "exact"  # "exact" | "mc" | "nested-mc"
    budgets: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.method == "exact" and self.standard_error != 0:
            raise ParameterError("exact estimates carry no standard error")

    def __float__(self):
        return float(self.value)

    def to_dict(self) -> dict:
        return {"tv": self.value, "standard_error": self.standard_error,
                "method": self.method, "budgets": dict(self.budgets)}


@dataclass(frozen=True)
class GuaranteeRecord:
    """TV(P_learned, P_S) <= c1 * eps1 + c2 * eps2 with probability >= 1 - delta."""

    eps1: Optional[float]  # None when the noise-gap bound is out of regime
    eps2: float
    delta: float
    n_required: int | None = None
    c1: int = 4
    c2: int = 7

    @property
    def bound(self) -> Optional[float]:
        if self.eps1 is None:
            return None
        return self.c1 * self.eps1 + self.c2 * self.eps2

    def to_dict(self) -> dict:
        return {"c1": self.c1, "c2": self.c2, "eps1": self.eps1, "eps2": self.eps2,
                "delta": self.delta, "n_required": self.n_required, "bound": self.bound}


def _check_same_dim(s1: Simplex, s2: Simplex):
    if s1.dim != s2.dim:
        raise ParameterError(f"dimension mismatch: {s1.dim} vs {s2.dim}")


def intersection_volume(s1: Simplex, s2: Simplex, mode: str = "exact",
                        budget: int = DEFAULT_MC_BUDGET, rng=None) -> tuple[float, float]:
    """Vol(S1 & S2) and its standard error (0 for exact modes).

    K=1 is the interval overlap and K=2 clips one triangle against the other's
    half-planes. In ``mc`` mode points are drawn from the smaller simplex.
    """
    _check_same_dim(s1, s2)
    k = s1.dim
    if mode == "exact":
        if k == 1:
            a = max(s1.vertices.min(), s2.vertices.min())
            b = min(s1.vertices.max(), s2.vertices.max())
            return max(b - a, 0.0), 0.0
        if k == 2:
            area = triangle_intersection_area(s1.vertices, s2.vertices)
            return float(snap_intersection(area, s1.volume, s2.volume)), 0.0
        raise UnsupportedExactError(f"exact intersection volume only for K <= 2 (got K={k})")
    if mode != "mc":
        raise ParameterError(f"unknown mode {mode!r}")
    small, big = (s1, s2) if s1.volume <= s2.volume else (s2, s1)
    pts = sample_uniform_simplex(small, budget, as_generator(rng))
    p = float(np.mean(contains(big, pts, tol=0.0)))
    return small.volume * p, small.volume * math.sqrt(p * (1 - p) / budget)


def tv_uniform(s1: Simplex, s2: Simplex, mode: str = "exact",
               budget: int = DEFAULT_MC_BUDGET, rng=None) -> TvEstimate:
    """TV between uniform laws: 1 - Vol(S1 & S2) / max(Vol S1, Vol S2)."""
    inter, se = intersection_volume(s1, s2, mode, budget, rng)
    vmax = max(s1.volume, s2.volume)
    value = float(min(max(1.0 - inter / vmax, 0.0), 1.0))
    if mode == "exact":
        return TvEstimate(value, 0.0, "exact")
    return TvEstimate(value, se / vmax, "mc", {"budget": budget})


def tv_noisy_vs_clean_mc(s: Simplex, sigma: float, outer_budget: int = NESTED_OUTER,
                         inner_budget: int = NESTED_INNER, rng=None) -> TvEstimate:
    """Nested Monte Carlo estimate of TV(G_S, P_S).

    The smoothed density never exceeds 1/Vol(S) on S, so the distance is
    E_{x ~ P_S}[1 - Pr(x + sigma Z in S)]. The outer loop draws x uniformly
    from S; the inner loop estimates the Gaussian probability of staying in S.
    The standard error comes from the spread of the outer-loop terms.
    """
    if sigma < 0:
        raise ParameterError("sigma must be >= 0")
    if sigma == 0:
        return TvEstimate(0.0, 0.0, "exact")
    if outer_budget < 1000 or inner_budget < 1000:
        raise ParameterError("nested MC budgets must be >= 1000")
    gen = as_generator(rng)
    k = s.dim
    xs = sample_uniform_simplex(s, outer_budget, gen)
    miss = np.empty(outer_budget)
    chunk = max(1, 2_000_000 // inner_budget)
    for start in range(0, outer_budget, chunk):
        x = xs[start:start + chunk]
        y = x[:, None, :] + sigma * gen.standard_normal((x.shape[0], inner_budget, k))
        inside = contains(s, y.reshape(-1, k), tol=0.0).reshape(x.shape[0], inner_budget)
        miss[start:start + x.shape[0]] = 1.0 - inside.mean(axis=1)
    value = float(np.clip(miss.mean(), 0.0, 1.0))
    se = float(miss.std(ddof=1) / math.sqrt(outer_budget))
    return TvEstimate(value, se, "nested-mc", {"outer": outer_budget, "inner": inner_budget})


def lemma3_bound(k: int, theta_upper: float, snr: float) -> float:
    """3 (K+1) theta_upper / SNR * sqrt(K + sqrt(8 K log(SNR / (K+1))))."""
    if not snr > k + 1:
        raise OutOfRegimeError(f"noise-gap bound needs SNR > K+1 = {k + 1}, got {snr}")
    if not theta_upper > 0:
        raise ParameterError("theta_upper must be positive")
    with _hp.workdps():
        t, s = _hp.mp(theta_upper), _hp.mp(snr)
        val = 3 * (k + 1) * t / s * mpmath.sqrt(k + mpmath.sqrt(8 * k * mpmath.log(s / (k + 1))))
        return float(val)


def _check_calc(k, eps2, delta, **positive):
    if k < 1:
        raise ParameterError("K must be >= 1")
    if not 0 < eps2 < 1:
        raise ParameterError(f"eps2 must lie in (0, 1), got {eps2}")
    if not 0 < delta < 1:
        raise ParameterError(f"delta must lie in (0, 1), got {delta}")
    for name, v in positive.items():
        if v is not None and not v > 0:
            raise ParameterError(f"{name} must be positive, got {v}")


def radius_cap_ratio(k: int, theta_lower: float, snr: float) -> float:
    """R / Vol(S)^(1/K) for the closed-form cap on the bounding radius."""
    with _hp.workdps():
        t, s = _hp.mp(theta_lower), _hp.mp(snr)
        e = mpmath.e
        denom = 1 + 4 * e ** 2 * (k - 2) / s ** 2 - 4 / (t * s)
        if denom <= 0:
            raise OutOfRegimeError(f"radius cap undefined at SNR={snr} (denominator {float(denom):.4g})")
        num = 2 * e * t ** 2 * (k + 2) * mpmath.sqrt((k + 1) * (k + 2)) * (1 + 1 / (t * s))
        return float(num / mpmath.sqrt(denom))


def sample_complexity_thm2_exact(k, theta_upper, radius=None, vol_root=None, eps2=0.1,
                                 delta=0.1, ratio=None):
    if ratio is None:
        _check_calc(k, eps2, delta, theta_upper=theta_upper, radius=radius, vol_root=vol_root)
        if radius is None or vol_root is None:
            raise ParameterError("give R and vol_root, or their ratio")
    else:
        _check_calc(k, eps2, delta, theta_upper=theta_upper, ratio=ratio)
    with _hp.workdps():
        q = _hp.mp(ratio) if ratio is not None else _hp.mp(radius) / _hp.mp(vol_root)
        e2 = _hp.mp(eps2)
        inner = 1 + 10 * _hp.mp(theta_upper) * (k + 1) / e2 * q
        return (2 * k * (k + 1) * mpmath.log(inner) + mpmath.log(3 / _hp.mp(delta))) / e2 ** 2


def sample_complexity_thm2(k: int, theta_upper: float, radius: float | None = None,
                           vol_root: float | None = None, eps2: float = 0.1, delta: float = 0.1,
                           ratio: float | None = None) -> int:
    """Samples for learning inside a known ball (theorem-statement numerator 2K(K+1))."""
    with _hp.workdps():
        return _hp.ceil_int(sample_complexity_thm2_exact(k, theta_upper, radius, vol_root,
                                                         eps2, delta, ratio))


def thm3_terms(k, theta_lower, theta_upper, radius=None, vol_root=None, eps2=0.1, delta=0.1,
               ratio=None, snr=None):
    """(selection term, bounding term) of the general sample-size bound, as mpf values.

    Without R/vol_root or a ratio, ``snr`` selects the closed-form radius cap.
    """
    _check_calc(k, eps2, delta, theta_lower=theta_lower, theta_upper=theta_upper)
    if ratio is None:
        if radius is not None and vol_root is not None:
            if not (radius > 0 and vol_root > 0):
                raise ParameterError("R and vol_root must be positive")
        elif snr is not None:
            ratio = radius_cap_ratio(k, theta_lower, snr)
        else:
            raise ParameterError("give R and vol_root, a ratio, or an SNR for the radius cap")
    with _hp.workdps():
        q = _hp.mp(ratio) if ratio is not None else _hp.mp(radius) / _hp.mp(vol_root)
        e2 = _hp.mp(eps2)
        d = _hp.mp(delta)
        t = _hp.mp(theta_lower)
        inner = 1 + 10 * _hp.mp(theta_upper) * (k + 1) / e2 * q
        first = (k * (k + 1) * mpmath.log(inner) + mpmath.log(6 / d)) / e2 ** 2
        second = (144 * t ** 4 * mpmath.e ** 4 * (mpmath.mpf((k + 1) * (k + 2)) / k) ** 2
                  * mpmath.log(12 / d))
        return first, second


def sample_complexity_thm3(k: int, theta_lower: float, theta_upper: float,
                           radius: float | None = None, vol_root: float | None = None,
                           eps2: float = 0.1, delta: float = 0.1, ratio: float | None = None,
                           snr: float | None = None) -> int:
    """Samples for the full pipeline: selection term plus the bounding-ball term."""
    with _hp.workdps():
        first, second = thm3_terms(k, theta_lower, theta_upper, radius, vol_root, eps2, delta,
                                   ratio, snr)
        return _hp.ceil_int(first + second)


def complexity_report(formula: str, **inputs) -> dict:
    """JSON-ready calculator output: {"n", "formula", "inputs", "flags"}."""
    from .bounding import min_samples_lemma1
    from .select import min_samples_selection

    flags = ["natural-log"]
    if formula == "thm1":
        n = min_samples_selection(inputs["M"], inputs["eps"], inputs["delta"])
    elif formula == "thm2":
        n = sample_complexity_thm2(inputs["dim"], inputs["theta_upper"], inputs.get("radius"),
                                   inputs.get("vol_root"), inputs["eps"], inputs["delta"],
                                   inputs.get("ratio"))
        flags.append("numerator-2K(K+1)-theorem-statement")
    elif formula == "thm3":
        n = sample_complexity_thm3(inputs["dim"], inputs["theta_lower"], inputs["theta_upper"],
                                   inputs.get("radius"), inputs.get("vol_root"), inputs["eps"],
                                   inputs["delta"], inputs.get("ratio"), inputs.get("snr"))
        flags.append("numerator-K(K+1)-appendix-display")
        if inputs.get("ratio") is None and inputs.get("radius") is None:
            flags.append("radius-substituted-by-closed-form-cap")
    elif formula == "lemma1":
        n = min_samples_lemma1(inputs["dim"], inputs["theta_lower"], inputs["delta"])
        flags.append("counts-pairs-m")
    else:
        raise ParameterError(f"unknown formula {formula!r}")
    clean = {k: v for k, v in inputs.items() if v is not None}
    return {"n": n, "formula": formula, "inputs": clean, "flags": flags}
