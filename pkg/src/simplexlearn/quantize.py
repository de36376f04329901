"""Stage 2: cover the bounding ball and enumerate the candidate simplices."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np
from scipy.spatial import cKDTree

from .bounding import BoundingBall
from .errors import EmptyFamilyError, FamilyTooLargeError, ParameterError
from .geometry import (DEGENERACY_THRESHOLD, IsoperimetryParams, Simplex, batch_diameters,
                       batch_isoperimetric, batch_volumes, sample_ball)
from .rng import as_generator

COVERING_CAP = 10_000_000
CANDIDATE_CAP = 1_000_000
_CHUNK = 1 << 18


@dataclass(frozen=True)
class QuantizationParams:
    """Vertex spacing for an eps-representative family: eps_cov = alpha * eps / (K+1)."""

    eps_rep: float
    vol_root: float
    theta_upper: float
    dim: int
    vol_root_provenance: str = "oracle"

    def __post_init__(self):
        if not 0 < self.eps_rep < 1:
            raise ParameterError(f"eps_rep must lie in (0, 1), got {self.eps_rep}")
        if not self.vol_root > 0:
            raise ParameterError("vol_root must be positive")
        if not self.theta_upper > 0:
            raise ParameterError("theta_upper must be positive")

    @property
    def alpha(self) -> float:
        return self.vol_root / (5.0 * self.theta_upper)

    @property
    def eps_cov(self) -> float:
        return self.alpha * self.eps_rep / (self.dim + 1)

    def to_dict(self) -> dict:
        return {"eps_rep": self.eps_rep, "vol_root": self.vol_root,
                "vol_root_provenance": self.vol_root_provenance,
                "theta_upper": self.theta_upper, "alpha": self.alpha, "eps_cov": self.eps_cov}


@dataclass(frozen=True, eq=False)
class CoveringSet:
    ball: BoundingBall
    resolution: float
    points: np.ndarray
    method: str

    def __post_init__(self):
        pts = np.array(self.points, dtype=float).reshape(-1, self.ball.dim)
        if pts.shape[0] == 0:
            raise ParameterError("covering set is empty")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    def __len__(self):
        return self.points.shape[0]

    def to_dict(self) -> dict:
        return {"ball": self.ball.to_dict(), "resolution": self.resolution,
                "method": self.method, "points": self.points.tolist()}


@dataclass(frozen=True)
class CoverReport:
    max_distance: float
    eps_cov: float
    probes: int

    @property
    def passed(self) -> bool:
        return self.max_distance <= self.eps_cov

    def to_dict(self) -> dict:
        return {"max_distance": self.max_distance, "eps_cov": self.eps_cov,
                "probes": self.probes, "passed": self.passed}


def covering_size_bound(radius: float, eps_cov: float, k: int, cap: int = COVERING_CAP) -> int:
    """ceil((1 + 4R/eps)^(2K)) evaluated in exact rational arithmetic."""
    if not (radius > 0 and eps_cov > 0):
        raise ParameterError("radius and eps_cov must be positive")
    approx = 2 * k * math.log1p(4 * radius / eps_cov)
    if approx > math.log(cap) + 1:
        raise FamilyTooLargeError(
            f"random covering would need ~e^{approx:.1f} points (> cap {cap}) for "
            f"R={radius:g}, eps_cov={eps_cov:g}, K={k}", cap=cap)
    exact = (1 + 4 * Fraction(radius) / Fraction(eps_cov)) ** (2 * k)
    count = math.ceil(exact)
    if count > cap:
        raise FamilyTooLargeError(
            f"random covering needs {count} points (> cap {cap}) for R={radius:g}, "
            f"eps_cov={eps_cov:g}, K={k}", count=count, cap=cap)
    return count


def random_covering(ball: BoundingBall, eps_cov: float, rng, cap: int = COVERING_CAP) -> CoveringSet:
    """i.i.d. uniform points in the ball, as many as the coupon-collector bound asks for."""
    count = covering_size_bound(ball.radius, eps_cov, ball.dim, cap)
    pts = sample_ball(ball.center, ball.radius, count, as_generator(rng))
    return CoveringSet(ball, eps_cov, pts, "random")


def grid_covering(ball: BoundingBall, eps_cov: float, cap: int = COVERING_CAP) -> CoveringSet:
    """Cubic lattice with half-diagonal eps_cov, centred on the ball centre.

    Every lattice point whose cell meets the ball is kept; points outside the
    ball are projected radially onto the sphere. Projection onto a convex set
    is non-expansive, so each ball point stays within eps_cov of the set.
    """
    if not eps_cov > 0:
        raise ParameterError("eps_cov must be positive")
    k, r = ball.dim, ball.radius
    h = 2.0 * eps_cov / math.sqrt(k)
    kmax = int(math.floor(r / h + 0.5))
    side = 2 * kmax + 1
    if side ** k > 4 * cap:
        raise FamilyTooLargeError(
            f"grid covering box has {side}^{k} lattice sites (cap {cap}) for R={r:g}, eps_cov={eps_cov:g}",
            count=side ** k, cap=cap)
    axis = np.arange(-kmax, kmax + 1, dtype=float) * h
    offs = np.stack(np.meshgrid(*([axis] * k), indexing="ij"), axis=-1).reshape(-1, k)
    gap = np.clip(np.abs(offs) - h / 2, 0.0, None)
    offs = offs[np.sqrt((gap ** 2).sum(axis=1)) <= r]
    if offs.shape[0] > cap:
        raise FamilyTooLargeError(f"grid covering has {offs.shape[0]} points (> cap {cap})",
                                  count=offs.shape[0], cap=cap)
    norms = np.linalg.norm(offs, axis=1)
    outside = norms > r
    offs[outside] *= (r / norms[outside])[:, None]
    _, first = np.unique(np.round(offs / h, 9), axis=0, return_index=True)
    offs = offs[np.sort(first)]
    return CoveringSet(ball, eps_cov, ball.center + offs, "grid")


def verify_cover(cov: CoveringSet, probes: int, rng) -> CoverReport:
    """Max over uniform probe points of the distance to the nearest covering point."""
    if probes < 1:
        raise ParameterError("probes must be >= 1")
    pts = sample_ball(cov.ball.center, cov.ball.radius, probes, as_generator(rng))
    dist, _ = cKDTree(cov.points).query(pts)
    return CoverReport(float(dist.max()), cov.resolution, probes)


@dataclass(frozen=True)
class Filters:
    """Degeneracy floor (``v_min``; None means 1e-12 (2R)^K) and optional relaxed isoperimetry."""

    v_min: Optional[float] = None
    iso: Optional[IsoperimetryParams] = None
    slack: float = 2.0


@dataclass(frozen=True, eq=False)
class CandidateFamily:
    """Candidates stored as sorted index tuples into ``points``; coordinates resolved on demand."""

    points: np.ndarray
    tuples: np.ndarray
    volumes: np.ndarray
    filters_applied: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.tuples.shape[0] < 1:
            raise EmptyFamilyError("candidate family is empty")

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    def __len__(self):
        return self.tuples.shape[0]

    def vertices(self, i: int) -> np.ndarray:
        return self.points[self.tuples[i]]

    def all_vertices(self) -> np.ndarray:
        return self.points[self.tuples]

    def simplex(self, i: int) -> Simplex:
        return Simplex(self.vertices(i))

    @property
    def simplices(self) -> list[Simplex]:
        return [self.simplex(i) for i in range(len(self))]

    def index_of(self, tup) -> Optional[int]:
        t = np.sort(np.asarray(tup, dtype=self.tuples.dtype))
        hit = np.flatnonzero(np.all(self.tuples == t, axis=1))
        return int(hit[0]) if hit.size else None

    @classmethod
    def from_simplices(cls, simplices) -> "CandidateFamily":
        simplices = list(simplices)
        if not simplices:
            raise EmptyFamilyError("candidate family is empty")
        k = simplices[0].dim
        pts = np.vstack([s.vertices for s in simplices])
        tuples = np.arange(len(simplices) * (k + 1), dtype=np.int64).reshape(-1, k + 1)
        vols = np.array([s.volume for s in simplices])
        return cls(pts, tuples, vols, {"source": "explicit"})

    def to_dict(self) -> dict:
        return {"points": self.points.tolist(), "tuples": self.tuples.tolist(),
                "filters_applied": dict(self.filters_applied)}


def _combination_chunks(l: int, r: int, chunk: int):
    it = itertools.combinations(range(l), r)
    while True:
        flat = np.fromiter(itertools.chain.from_iterable(itertools.islice(it, chunk)),
                           dtype=np.int64)
        if flat.size == 0:
            return
        yield flat.reshape(-1, r)


def enumerate_candidates(cov: CoveringSet, k: int, filters: Filters = Filters(),
                         cap: int = CANDIDATE_CAP) -> CandidateFamily:
    """All (K+1)-subsets of the covering in lexicographic order, minus filtered ones."""
    l = len(cov)
    if cov.ball.dim != k:
        raise ParameterError(f"covering lives in R^{cov.ball.dim}, asked for K={k}")
    if l < k + 1:
        raise ParameterError(f"covering has {l} points, need at least K+1 = {k + 1}")
    total = math.comb(l, k + 1)
    if total > cap:
        raise FamilyTooLargeError(
            f"C({l}, {k + 1}) = {total} candidates exceeds cap {cap}; raise eps_rep or lower K",
            count=total, cap=cap)
    v_min = filters.v_min if filters.v_min is not None else 1e-12 * (2 * cov.ball.radius) ** k
    iso = filters.iso.relaxed(filters.slack) if filters.iso is not None else None
    kept_t, kept_v = [], []
    n_degenerate = n_iso = 0
    fact = math.factorial(k)
    for tup in _combination_chunks(l, k + 1, _CHUNK):
        verts = cov.points[tup]
        vol = batch_volumes(verts)
        with np.errstate(divide="ignore", invalid="ignore"):
            ok = (vol >= v_min) & (vol * fact / batch_diameters(verts) ** k >= DEGENERACY_THRESHOLD)
        n_degenerate += int((~ok).sum())
        if iso is not None:
            iso_ok = batch_isoperimetric(verts, iso.theta_lower, iso.theta_upper, vol)
            n_iso += int((ok & ~iso_ok).sum())
            ok &= iso_ok
        kept_t.append(tup[ok])
        kept_v.append(vol[ok])
    tuples = np.concatenate(kept_t)
    record = {"total": total, "dropped_degenerate": n_degenerate, "dropped_isoperimetry": n_iso,
              "v_min": v_min, "iso_slack": filters.slack if iso is not None else None,
              "iso_params": [iso.theta_lower, iso.theta_upper] if iso is not None else None}
    if tuples.shape[0] == 0:
        raise EmptyFamilyError(f"all {total} candidates removed by filters ({record})")
    return CandidateFamily(cov.points, tuples, np.concatenate(kept_v), record)


def snap_to_covering(cov: CoveringSet, s: Simplex) -> tuple[np.ndarray, float]:
    """Sorted covering indices nearest to each vertex of ``s`` and the largest snap distance."""
    dist, idx = cKDTree(cov.points).query(s.vertices)
    return np.sort(idx), float(dist.max())
