"""Datasets drawn from the noisy-simplex model y = V phi + z."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import InsufficientDataError, ParameterError
from .geometry import Simplex
from .rng import RngStream, as_generator


@dataclass(frozen=True, eq=False)
class NoisyDataset:
    dim: int
    sigma: float
    points: np.ndarray
    seed: int = 0
    truth: Optional[Simplex] = field(default=None)

    def __post_init__(self):
        pts = np.array(self.points, dtype=float).reshape(-1, self.dim)
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)
        if self.sigma < 0:
            raise ParameterError("sigma must be >= 0")
        if self.truth is not None and self.truth.dim != self.dim:
            raise ParameterError("truth simplex dimension does not match the dataset")

    @property
    def n(self) -> int:
        return self.points.shape[0]

    def __len__(self):
        return self.n

    def with_points(self, points) -> "NoisyDataset":
        return NoisyDataset(self.dim, self.sigma, points, self.seed, self.truth)


def sample_uniform_simplex(s: Simplex, n: int, rng) -> np.ndarray:
    """n i.i.d. uniform points in ``s``: Dirichlet(1,...,1) weights from normalized Exp(1) draws."""
    if n < 0:
        raise ParameterError("n must be >= 0")
    gen = as_generator(rng)
    e = gen.standard_exponential((n, s.dim + 1))
    phi = e / e.sum(axis=1, keepdims=True)
    return phi @ s.vertices


def add_gaussian_noise(points, sigma: float, rng) -> np.ndarray:
    """Add i.i.d. N(0, sigma^2 I) noise; sigma = 0 returns an exact copy."""
    if sigma < 0:
        raise ParameterError("sigma must be >= 0")
    pts = np.asarray(points, dtype=float)
    if sigma == 0:
        return pts.copy()
    gen = as_generator(rng)
    return pts + sigma * gen.standard_normal(pts.shape)


def generate_dataset(truth: Simplex, n: int, sigma: float, seed: int) -> NoisyDataset:
    """Draw n noisy samples from ``truth`` using dedicated substreams of ``seed``."""
    root = RngStream(seed)
    clean = sample_uniform_simplex(truth, n, root.child("gen-phi"))
    noisy = add_gaussian_noise(clean, sigma, root.child("gen-noise"))
    return NoisyDataset(truth.dim, sigma, noisy, seed, truth)


def split_half(d: NoisyDataset) -> tuple[NoisyDataset, NoisyDataset]:
    """First ceil(n/2) points and the remainder, order preserved."""
    if d.n < 2:
        raise InsufficientDataError(f"need at least 2 points to split, got {d.n}")
    cut = (d.n + 1) // 2
    return d.with_points(d.points[:cut]), d.with_points(d.points[cut:])
