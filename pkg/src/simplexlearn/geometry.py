"""Exact geometry of K-simplices in R^K.

Vertices are stored row-wise: ``vertices[i]`` is v_i, so ``vertices.T`` is the
K x (K+1) vertex matrix. The batch helpers (``batch_*``) operate on arrays of
shape ``(B, K+1, K)`` and are shared with candidate enumeration.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import DegenerateSimplexError, InfeasibleParamsError, ParameterError
from .rng import as_generator

DEGENERACY_THRESHOLD = 1e-12
DEFAULT_CONTAINS_TOL = 1e-9
# Non-strict comparisons in the isoperimetry check tolerate this relative rounding.
_ISO_RTOL = 1e-12


def batch_volumes(verts: np.ndarray) -> np.ndarray:
    """|det(edge matrix)| / K! for each simplex in a ``(B, K+1, K)`` stack."""
    verts = np.asarray(verts, dtype=float)
    k = verts.shape[-1]
    edges = verts[:, 1:, :] - verts[:, :1, :]
    return np.abs(np.linalg.det(edges)) / math.factorial(k)


def batch_facet_volumes(verts: np.ndarray) -> np.ndarray:
    """(K-1)-measure of the facet opposite each vertex; shape ``(B, K+1)``.

    Gram determinant of the facet's edge vectors. For K=1 every facet is a
    point and gets measure 1.
    """
    verts = np.asarray(verts, dtype=float)
    b, kp1, k = verts.shape
    if k == 1:
        return np.ones((b, 2))
    out = np.empty((b, kp1))
    idx = np.arange(kp1)
    norm = math.factorial(k - 1)
    for i in range(kp1):
        facet = verts[:, idx != i, :]
        w = facet[:, 1:, :] - facet[:, :1, :]
        gram = w @ np.swapaxes(w, 1, 2)
        det = np.clip(np.linalg.det(gram), 0.0, None)
        out[:, i] = np.sqrt(det) / norm
    return out


def batch_diameters(verts: np.ndarray) -> np.ndarray:
    """Largest pairwise vertex distance for each simplex in the stack."""
    verts = np.asarray(verts, dtype=float)
    diff = verts[:, :, None, :] - verts[:, None, :, :]
    return np.sqrt((diff ** 2).sum(axis=-1)).max(axis=(1, 2))


def batch_isoperimetric(verts: np.ndarray, theta_lower: float, theta_upper: float,
                        volumes: np.ndarray | None = None) -> np.ndarray:
    """Boolean mask of simplices satisfying both isoperimetry inequalities."""
    verts = np.asarray(verts, dtype=float)
    k = verts.shape[-1]
    vol = batch_volumes(verts) if volumes is None else volumes
    with np.errstate(divide="ignore", invalid="ignore"):
        a_ok = batch_facet_volumes(verts).max(axis=1) <= (
            theta_upper * vol ** ((k - 1) / k) * (1 + _ISO_RTOL))
        l_ok = batch_diameters(verts) <= theta_lower * k * vol ** (1.0 / k) * (1 + _ISO_RTOL)
    return a_ok & l_ok & (vol > 0)


@dataclass(frozen=True)
class IsoperimetryParams:
    """Shape-regularity constants: ``theta_lower`` bounds the diameter, ``theta_upper`` the largest facet."""

    theta_lower: float
    theta_upper: float

    def __post_init__(self):
        for name in ("theta_lower", "theta_upper"):
            v = float(getattr(self, name))
            if not (math.isfinite(v) and v > 0):
                raise ParameterError(f"{name} must be positive and finite, got {v}")
            object.__setattr__(self, name, v)

    def relaxed(self, slack: float) -> "IsoperimetryParams":
        return IsoperimetryParams(self.theta_lower * slack, self.theta_upper * slack)


@dataclass(frozen=True)
class IsoperimetryReport:
    ok: bool
    facet_ratio: float  # A_max / (theta_upper * Vol^((K-1)/K))
    diameter_ratio: float  # L_max / (theta_lower * K * Vol^(1/K))

    def __bool__(self):
        return self.ok


@dataclass(frozen=True, eq=False)
class Simplex:
    """A K-simplex given by K+1 affinely independent vertices in R^K."""

    vertices: np.ndarray

    def __post_init__(self):
        v = np.array(self.vertices, dtype=float)
        if v.ndim == 1:
            v = v.reshape(-1, 1)
        if v.ndim != 2 or v.shape[0] != v.shape[1] + 1 or v.shape[1] < 1:
            raise ParameterError(f"expected K+1 vertices in R^K, got array of shape {v.shape}")
        if not np.all(np.isfinite(v)):
            raise ParameterError("vertices must be finite")
        v.setflags(write=False)
        object.__setattr__(self, "vertices", v)
        diam = batch_diameters(v[None])[0]
        det = abs(np.linalg.det(self.edge_matrix))
        if diam == 0 or det / diam ** self.dim < DEGENERACY_THRESHOLD:
            raise DegenerateSimplexError(
                f"vertex set is affinely dependent (|det|/diam^K = {det / diam ** self.dim if diam else 0:.3g})")

    @property
    def dim(self) -> int:
        return self.vertices.shape[1]

    @property
    def vertex_matrix(self) -> np.ndarray:
        """The K x (K+1) matrix [v_0 | ... | v_K]."""
        return self.vertices.T

    @property
    def edge_matrix(self) -> np.ndarray:
        """Rows v_i - v_0 for i = 1..K (the transpose of the column convention)."""
        return self.vertices[1:] - self.vertices[0]

    @cached_property
    def _inv_edges(self) -> np.ndarray:
        return np.linalg.inv(self.edge_matrix)

    @cached_property
    def volume(self) -> float:
        return volume(self)

    @cached_property
    def diameter(self) -> float:
        return diameter(self)

    @property
    def centroid(self) -> np.ndarray:
        return self.vertices.mean(axis=0)

    def scaled(self, c: float) -> "Simplex":
        return Simplex(self.vertices * c)

    def translated(self, shift) -> "Simplex":
        return Simplex(self.vertices + np.asarray(shift, dtype=float))

    def to_dict(self) -> dict:
        return {"dim": self.dim, "vertices": self.vertices.tolist()}

    def __repr__(self):
        return f"Simplex(dim={self.dim}, vertices={self.vertices.tolist()})"


def standard_simplex(k: int) -> Simplex:
    """Convex hull of the origin and the unit vectors."""
    return Simplex(np.vstack([np.zeros(k), np.eye(k)]))


def volume(s: Simplex) -> float:
    return float(abs(np.linalg.det(s.edge_matrix)) / math.factorial(s.dim))


def facet_volumes(s: Simplex) -> np.ndarray:
    """Entry i is the measure of the facet opposite v_i."""
    return batch_facet_volumes(s.vertices[None])[0]


def diameter(s: Simplex) -> float:
    return float(batch_diameters(s.vertices[None])[0])


def is_isoperimetric(s: Simplex, params: IsoperimetryParams) -> IsoperimetryReport:
    """Check both shape inequalities (non-strict) and report lhs/rhs ratios."""
    k = s.dim
    vol = s.volume
    facet_ratio = facet_volumes(s).max() / (params.theta_upper * vol ** ((k - 1) / k))
    diameter_ratio = s.diameter / (params.theta_lower * k * vol ** (1.0 / k))
    ok = facet_ratio <= 1 + _ISO_RTOL and diameter_ratio <= 1 + _ISO_RTOL
    return IsoperimetryReport(bool(ok), float(facet_ratio), float(diameter_ratio))


def tight_params(s: Simplex) -> IsoperimetryParams:
    """Smallest (theta_lower, theta_upper) for which ``s`` is isoperimetric."""
    k = s.dim
    vol = s.volume
    return IsoperimetryParams(
        theta_lower=s.diameter / (k * vol ** (1.0 / k)),
        theta_upper=facet_volumes(s).max() / vol ** ((k - 1) / k),
    )


def barycentric(s: Simplex, x) -> np.ndarray:
    """Weights phi with sum 1 and V phi = x; accepts one point or an ``(n, K)`` array."""
    x = np.asarray(x, dtype=float)
    single = x.ndim == 1
    pts = x.reshape(-1, s.dim)
    tail = (pts - s.vertices[0]) @ s._inv_edges
    phi = np.empty((pts.shape[0], s.dim + 1))
    phi[:, 1:] = tail
    phi[:, 0] = 1.0 - tail.sum(axis=1)
    return phi[0] if single else phi


def contains(s: Simplex, x, tol: float = DEFAULT_CONTAINS_TOL):
    """True where every barycentric coordinate is >= -tol (tol is scale-free)."""
    if tol < 0:
        raise ParameterError("tol must be nonnegative")
    phi = barycentric(s, x)
    return np.all(phi >= -tol, axis=-1)


def density_at(s: Simplex, x):
    """Uniform density 1(x in S)/Vol(S); boundary counts as inside."""
    inside = contains(s, x, tol=0.0)
    return np.where(inside, 1.0 / s.volume, 0.0) if np.ndim(inside) else (
        1.0 / s.volume if inside else 0.0)


def sample_ball(center, radius: float, n: int, rng) -> np.ndarray:
    """n points uniform in the closed K-ball: Gaussian direction, radius * U^(1/K)."""
    gen = as_generator(rng)
    center = np.asarray(center, dtype=float)
    k = center.shape[0]
    d = gen.standard_normal((n, k))
    norms = np.linalg.norm(d, axis=1, keepdims=True)
    norms[norms == 0] = 1.0
    r = radius * gen.random((n, 1)) ** (1.0 / k)
    return center + d / norms * r


def random_simplex(k: int, params: IsoperimetryParams, scale: float = 1.0, rng=None,
                   max_attempts: int = 10_000, batch: int = 256) -> Simplex:
    """Rejection-sample an isoperimetric simplex with vertices in the ball of radius ``scale``."""
    if k < 1:
        raise ParameterError("K must be >= 1")
    gen = as_generator(rng)
    tried = 0
    while tried < max_attempts:
        b = min(batch, max_attempts - tried)
        verts = sample_ball(np.zeros(k), scale, b * (k + 1), gen).reshape(b, k + 1, k)
        vols = batch_volumes(verts)
        diam = batch_diameters(verts)
        ok = vols * math.factorial(k) / diam ** k >= DEGENERACY_THRESHOLD
        ok &= batch_isoperimetric(verts, params.theta_lower, params.theta_upper, vols)
        hits = np.flatnonzero(ok)
        if hits.size:
            return Simplex(verts[hits[0]])
        tried += b
    raise InfeasibleParamsError(
        f"no ({params.theta_lower:g}, {params.theta_upper:g})-isoperimetric {k}-simplex "
        f"found in {max_attempts} attempts")
