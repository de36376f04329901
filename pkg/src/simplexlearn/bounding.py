"""Stage 1: a ball that contains the true simplex with high probability.

From the first half of the data: pair statistic D, centroid p and radius R.
The radius denominator follows the appendix derivation, 1 + 4e^2(K-2)/SNR^2
- 4/(theta_lower SNR); the main-text display has 4/(3 theta_lower SNR), which
gives a smaller radius. The variant is recorded in the ball diagnostics.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import mpmath
import numpy as np

from . import _hp
from .errors import (DegenerateDataError, InsufficientDataError, PairingError,
                     ParameterError, SnrTooLowError)
from .geometry import IsoperimetryParams
from .sampling import NoisyDataset

E2 = math.e ** 2
NOISELESS_SNR = 1e12
DENOMINATOR_VARIANT = "appendix: 1 + 4e^2(K-2)/SNR^2 - 4/(theta_lower*SNR)"


class HeuristicBallWarning(UserWarning):
    """Bounding ball built from fewer pairs than the high-probability threshold."""


@dataclass(frozen=True)
class NoiseModel:
    sigma: float
    snr: float
    provenance: str  # "oracle" | "config" | "plug-in"

    def __post_init__(self):
        if self.sigma < 0:
            raise ParameterError("sigma must be >= 0")
        if not self.snr > 0:
            raise ParameterError(f"snr must be positive, got {self.snr}")
        if self.provenance not in ("oracle", "config", "plug-in"):
            raise ParameterError(f"unknown SNR provenance {self.provenance!r}")

    @classmethod
    def oracle(cls, sigma: float, vol_root: float) -> "NoiseModel":
        """SNR from the true Vol(S)^(1/K)."""
        return cls(sigma, _snr(vol_root, sigma), "oracle")

    @classmethod
    def from_config(cls, snr: float, sigma: float = 0.0) -> "NoiseModel":
        return cls(sigma, float(snr), "config")

    @classmethod
    def plug_in(cls, d_stat: float, k: int, sigma: float, floor: float | None = None) -> "NoiseModel":
        return cls(sigma, _snr(plug_in_vol_root(d_stat, k, sigma, floor), sigma), "plug-in")


def _snr(vol_root: float, sigma: float) -> float:
    if sigma == 0:
        return NOISELESS_SNR
    return min(vol_root / sigma, NOISELESS_SNR)


def plug_in_vol_root(d_stat: float, k: int, sigma: float, floor: float | None = None) -> float:
    """Vol(S)^(1/K) solved from E[D] ~ K^2 Vol^(2/K) / (4e^2(K+1)(K+2)) + K sigma^2.

    The noise share K*sigma^2 is removed first; the result is clamped below
    at ``floor`` (default 1e-3 * sigma).
    """
    if floor is None:
        floor = 1e-3 * sigma
    signal = max(d_stat - k * sigma ** 2, 0.0)
    vr = math.sqrt(signal * 4 * E2 * (k + 1) * (k + 2)) / k
    return max(vr, floor)


@dataclass(frozen=True, eq=False)
class BoundingBall:
    center: np.ndarray
    radius: float
    diagnostics: dict = field(default_factory=dict)

    def __post_init__(self):
        c = np.array(self.center, dtype=float).reshape(-1)
        c.setflags(write=False)
        object.__setattr__(self, "center", c)
        if not self.radius > 0:
            raise DegenerateDataError(f"ball radius must be positive, got {self.radius}")

    @property
    def dim(self) -> int:
        return self.center.shape[0]

    def contains(self, x, tol: float = 1e-12) -> np.ndarray:
        d = np.linalg.norm(np.atleast_2d(x) - self.center, axis=1)
        return d <= self.radius * (1 + tol)

    def to_dict(self) -> dict:
        return {"center": self.center.tolist(), "radius": self.radius,
                "diagnostics": dict(self.diagnostics)}

    @classmethod
    def from_dict(cls, d: dict) -> "BoundingBall":
        return cls(np.asarray(d["center"], dtype=float), float(d["radius"]),
                   dict(d.get("diagnostics", {})))


def pair_statistic_D(points) -> float:
    """D = (1/2m) * sum_i ||y_2i - y_2i-1||^2 over consecutive disjoint pairs."""
    pts = np.asarray(points, dtype=float)
    if pts.ndim == 1:
        pts = pts.reshape(-1, 1)
    n = pts.shape[0]
    if n < 2 or n % 2:
        raise PairingError(f"pair statistic needs an even count >= 2, got {n}")
    diff = pts[1::2] - pts[0::2]
    return float(np.sum(diff * diff) / n)


def centroid_p(points) -> np.ndarray:
    pts = np.asarray(points, dtype=float)
    if pts.ndim == 1:
        pts = pts.reshape(-1, 1)
    if pts.shape[0] == 0:
        raise InsufficientDataError("centroid of an empty point set")
    return pts.mean(axis=0)


def min_samples_lemma1_exact(k: int, theta_lower: float, delta: float):
    """Pre-ceiling value 72 theta^4 e^4 ((K+1)(K+2)/K)^2 log(12/delta) as an mpf."""
    if k < 1:
        raise ParameterError("K must be >= 1")
    if not theta_lower > 0:
        raise ParameterError("theta_lower must be positive")
    if not 0 < delta < 1:
        raise ParameterError(f"delta must lie in (0, 1), got {delta}")
    with _hp.workdps():
        t = _hp.mp(theta_lower)
        ratio = mpmath.mpf((k + 1) * (k + 2)) / k
        return 72 * t ** 4 * mpmath.e ** 4 * ratio ** 2 * mpmath.log(12 / _hp.mp(delta))


def min_samples_lemma1(k: int, theta_lower: float, delta: float) -> int:
    """Number of pairs m needed for the high-probability bounding ball."""
    with _hp.workdps():
        return _hp.ceil_int(min_samples_lemma1_exact(k, theta_lower, delta))


def radius_denominator(k: int, theta_lower: float, snr: float) -> float:
    return 1.0 + 4 * E2 * (k - 2) / snr ** 2 - 4.0 / (theta_lower * snr)


def critical_snr(k: int, theta_lower: float) -> float:
    """Largest SNR at which the radius denominator vanishes (0 if it never does)."""
    # SNR^2 - b SNR + a = 0 with a = 4e^2(K-2), b = 4/theta_lower
    a = 4 * E2 * (k - 2)
    b = 4.0 / theta_lower
    disc = b * b - 4 * a
    if disc < 0:
        return 0.0
    return (b + math.sqrt(disc)) / 2


def bounding_radius(d_stat: float, k: int, params: IsoperimetryParams, noise: NoiseModel) -> float:
    denom = radius_denominator(k, params.theta_lower, noise.snr)
    if denom <= 0:
        crit = critical_snr(k, params.theta_lower)
        raise SnrTooLowError(
            f"SNR {noise.snr:g} too low for K={k}, theta_lower={params.theta_lower:g}: "
            f"radius denominator {denom:.4g} <= 0 (need SNR > {crit:.4g})", critical_snr=crit)
    core = math.sqrt(4 * E2 * (k + 1) * (k + 2) * params.theta_lower ** 2 * d_stat / denom)
    shift = 1.0 + params.theta_upper / (params.theta_lower ** 2 * E2 * noise.snr * math.sqrt(k))
    return core * shift


def bounding_ball(first_half: NoisyDataset, params: IsoperimetryParams,
                  noise: NoiseModel | None = None, delta: float = 0.1,
                  strict: bool = False) -> BoundingBall:
    """Ball centred at the sample mean with the high-probability radius.

    Uses the first 2*floor(n/2) points. With ``strict`` the pair count must reach
    the high-probability threshold; otherwise the ball is tagged heuristic and a
    :class:`HeuristicBallWarning` is emitted.
    """
    k = first_half.dim
    m = first_half.n // 2
    if m < 1:
        raise InsufficientDataError(f"bounding ball needs at least 2 points, got {first_half.n}")
    pts = first_half.points[: 2 * m]
    m_required = min_samples_lemma1(k, params.theta_lower, delta)
    heuristic = m < m_required
    if heuristic:
        if strict:
            raise InsufficientDataError(
                f"strict mode needs m >= {m_required} pairs ({2 * m_required} points), got m = {m}")
        warnings.warn(f"bounding ball from m={m} pairs (< {m_required}); tagged heuristic",
                      HeuristicBallWarning, stacklevel=2)
    d_stat = pair_statistic_D(pts)
    if d_stat == 0:
        raise DegenerateDataError("pair statistic D is 0: all paired points coincide")
    if noise is None:
        noise = NoiseModel.plug_in(d_stat, k, first_half.sigma)
    radius = bounding_radius(d_stat, k, params, noise)
    diagnostics = {
        "D": d_stat,
        "m": m,
        "m_required": m_required,
        "heuristic": heuristic,
        "snr_used": noise.snr,
        "snr_provenance": noise.provenance,
        "delta_used": delta,
        "denominator_variant": DENOMINATOR_VARIANT,
    }
    return BoundingBall(centroid_p(pts), radius, diagnostics)
