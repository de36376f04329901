"""Stage 3: Scheffe tournament over a finite candidate family.

For each unordered pair i < j the Scheffe set is A_ij = {x : f_i(x) > f_j(x)}.
Candidate i beats j iff |P_i(A_ij) - mu_n(A_ij)| <= |P_j(A_ij) - mu_n(A_ij)|,
so ties go to the lower index. The winner has the most wins, ties again to
the lowest index. All M(M-1)/2 contests are evaluated.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import mpmath
import numpy as np

from . import _hp
from ._kernels import tournament_intervals, tournament_triangles
from .errors import InsufficientDataError, InvalidPairError, ParameterError, UnsupportedExactError
from .geometry import contains
from .metrics import DEFAULT_MC_BUDGET, intersection_volume
from .quantize import CandidateFamily
from .rng import RngStream, as_generator
from .sampling import sample_uniform_simplex

RECORD_CAP = 500
JSON_CONTEST_CAP = 100


def min_samples_selection_exact(m: int, eps: float, delta: float):
    if m < 1:
        raise ParameterError("M must be >= 1")
    if not 0 < eps < 1:
        raise ParameterError(f"eps must lie in (0, 1), got {eps}")
    if not 0 < delta < 1:
        raise ParameterError(f"delta must lie in (0, 1), got {delta}")
    with _hp.workdps():
        return mpmath.log(3 * mpmath.mpf(m) ** 2 / _hp.mp(delta)) / (2 * _hp.mp(eps) ** 2)


def min_samples_selection(m: int, eps: float, delta: float) -> int:
    """ceil(log(3 M^2 / delta) / (2 eps^2))."""
    with _hp.workdps():
        return _hp.ceil_int(min_samples_selection_exact(m, eps, delta))


def selection_eps(m: int, n: int, delta: float) -> float:
    """Smallest eps for which n samples meet the selection sample size."""
    return math.sqrt(math.log(3 * m * m / delta) / (2 * n))


def _check_pair(i: int, j: int, family: CandidateFamily):
    m = len(family)
    if i == j:
        raise InvalidPairError(f"Scheffe set of candidate {i} with itself")
    if not (0 <= i < m and 0 <= j < m):
        raise InvalidPairError(f"pair ({i}, {j}) out of range for M={m}")


def scheffe_membership(i: int, j: int, x, family: CandidateFamily):
    """x in A_ij: inside S_i and either outside S_j or S_i is the smaller simplex."""
    _check_pair(i, j, family)
    si, sj = family.simplex(i), family.simplex(j)
    smaller = family.volumes[i] < family.volumes[j]
    in_i = contains(si, x, tol=0.0)
    return in_i & (smaller | ~contains(sj, x, tol=0.0))


def candidate_measure_of_scheffe(i: int, j: int, family: CandidateFamily, mode: str = "exact",
                                 budget: int = DEFAULT_MC_BUDGET, rng=None) -> tuple[float, float]:
    """P_i(A_ij) and its standard error (0 in exact mode)."""
    _check_pair(i, j, family)
    k = family.dim
    vi, vj = float(family.volumes[i]), float(family.volumes[j])
    if mode == "exact":
        if k > 2:
            raise UnsupportedExactError(f"exact Scheffe measures only for K <= 2 (got K={k})")
        inter, _ = intersection_volume(family.simplex(i), family.simplex(j), "exact")
        p = (vi - inter) / vi + (inter / vi if vi < vj else 0.0)
        return min(max(p, 0.0), 1.0), 0.0
    if mode != "mc":
        raise ParameterError(f"unknown mode {mode!r}")
    if budget < 1000:
        raise ParameterError("MC budget must be >= 1000")
    pts = sample_uniform_simplex(family.simplex(i), budget, as_generator(rng))
    p = float(np.mean(scheffe_membership(i, j, pts, family)))
    return p, math.sqrt(p * (1 - p) / budget)


def empirical_measure(samples, predicate) -> float:
    """Fraction of samples for which ``predicate`` holds (vectorised predicate on an array)."""
    pts = np.asarray(samples)
    if pts.shape[0] == 0:
        raise InsufficientDataError("empirical measure of an empty sample")
    return float(np.count_nonzero(predicate(pts)) / pts.shape[0])


@dataclass(eq=False)
class ContestRecord:
    """Upper triangle (i < j) holds P_i(A_ij), P_j(A_ij), mu_n(A_ij); ``beats[i, j]`` is i beating j."""

    p_i: np.ndarray
    p_j: np.ndarray
    mu: np.ndarray
    beats: np.ndarray
    se_i: Optional[np.ndarray] = None
    se_j: Optional[np.ndarray] = None

    def to_dict(self) -> dict:
        m = self.beats.shape[0]
        rows = []
        for i in range(m):
            for j in range(i + 1, m):
                row = {"i": i, "j": j, "p_i": float(self.p_i[i, j]), "p_j": float(self.p_j[i, j]),
                       "mu": float(self.mu[i, j]), "winner": i if self.beats[i, j] else j}
                if self.se_i is not None:
                    row["se_i"] = float(self.se_i[i, j])
                    row["se_j"] = float(self.se_j[i, j])
                rows.append(row)
        return {"pairs": rows}


@dataclass(eq=False)
class SelectionReport:
    winner: int
    wins: np.ndarray
    contests: Optional[ContestRecord]
    guarantee: dict
    mode: str

    def to_dict(self, include_contests: Optional[bool] = None) -> dict:
        m = len(self.wins)
        if include_contests is None:
            include_contests = m <= JSON_CONTEST_CAP
        out = {"winner": self.winner, "wins": self.wins.tolist(), "mode": self.mode,
               "guarantee": dict(self.guarantee)}
        if include_contests and self.contests is not None:
            out["contests"] = self.contests.to_dict()
        return out


def _membership_bits(family: CandidateFamily, samples: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Per-candidate membership of every sample, as counts and packed 64-bit words."""
    m, n = len(family), samples.shape[0]
    words = (n + 63) // 64
    bits = np.zeros((m, words * 8), dtype=np.uint8)
    counts = np.empty(m, dtype=np.int64)
    verts = family.all_vertices()
    chunk = max(1, 4_000_000 // max(n, 1))
    for start in range(0, m, chunk):
        v = verts[start:start + chunk]
        inv = np.linalg.inv(v[:, 1:, :] - v[:, :1, :])
        tail = (samples[None, :, :] - v[:, :1, :]) @ inv
        inside = np.all(tail >= 0, axis=2) & (tail.sum(axis=2) <= 1)
        counts[start:start + v.shape[0]] = inside.sum(axis=1)
        packed = np.packbits(inside, axis=1, bitorder="little")
        bits[start:start + v.shape[0], :packed.shape[1]] = packed
    return counts, bits.view(np.uint64)


def _record_arrays(m: int, record: bool):
    shape = (m, m) if record else (1, 1)
    return (np.full(shape, np.nan), np.full(shape, np.nan), np.full(shape, np.nan),
            np.zeros(shape, dtype=np.bool_))


def scheffe_tournament(family: CandidateFamily, samples, mode: str = "exact",
                       budget: int = DEFAULT_MC_BUDGET, rng=None, delta: float = 0.1,
                       record_cap: int = RECORD_CAP) -> SelectionReport:
    """Run every pairwise contest and return the candidate with the most wins.

    ``mode="exact"`` uses closed-form candidate measures (K <= 2); ``"mc"``
    estimates them with ``budget`` draws per side from a stream derived from
    ``rng`` and the pair indices. The empirical measure is always exact.
    """
    pts = np.asarray(samples, dtype=float).reshape(-1, family.dim)
    n = pts.shape[0]
    if n == 0:
        raise InsufficientDataError("tournament needs at least one sample")
    m = len(family)
    k = family.dim
    guarantee = {"factor": 3, "additive": "4*eps", "n": n, "M": m, "delta": delta,
                 "eps_at_n": selection_eps(m, n, delta)}
    if m == 1:
        empty = ContestRecord(*(a[:0, :0] for a in _record_arrays(1, True)))
        return SelectionReport(0, np.zeros(1, dtype=np.int64), empty, guarantee, mode)
    record = m <= record_cap
    p_i, p_j, mu, beats = _record_arrays(m, record)
    se_i = se_j = None
    if mode == "exact":
        if k == 1:
            lo = family.all_vertices()[:, :, 0].min(axis=1)
            hi = family.all_vertices()[:, :, 0].max(axis=1)
            srt = np.sort(pts[:, 0])
            wins = tournament_intervals(lo, hi, np.searchsorted(srt, lo, "left"),
                                        np.searchsorted(srt, hi, "right"), n, record,
                                        p_i, p_j, mu, beats)
        elif k == 2:
            counts, bits = _membership_bits(family, pts)
            wins = tournament_triangles(np.ascontiguousarray(family.all_vertices()),
                                        np.asarray(family.volumes, dtype=float), counts, bits, n,
                                        record, p_i, p_j, mu, beats)
        else:
            raise UnsupportedExactError(f"exact tournament only for K <= 2 (got K={k}); use mode='mc'")
    elif mode == "mc":
        if budget < 1000:
            raise ParameterError("MC budget must be >= 1000")
        wins, se_i, se_j = _mc_tournament(family, pts, budget, rng, record, p_i, p_j, mu, beats)
    else:
        raise ParameterError(f"unknown mode {mode!r}")
    wins = np.asarray(wins, dtype=np.int64)
    contests = ContestRecord(p_i, p_j, mu, beats, se_i, se_j) if record else None
    return SelectionReport(int(np.argmax(wins)), wins, contests, guarantee, mode)


def _mc_tournament(family, pts, budget, rng, record, p_i, p_j, mu, beats):
    root = rng if isinstance(rng, RngStream) else RngStream(0 if rng is None else int(rng))
    m, n = len(family), pts.shape[0]
    counts, bits = _membership_bits(family, pts)
    members = np.unpackbits(bits.view(np.uint8), axis=1, count=n, bitorder="little").astype(bool)
    se_i = np.full(p_i.shape, np.nan)
    se_j = np.full(p_i.shape, np.nan)
    wins = np.zeros(m, dtype=np.int64)
    simplices = family.simplices
    for i in range(m):
        for j in range(i + 1, m):
            smaller = family.volumes[i] < family.volumes[j]
            xi = sample_uniform_simplex(simplices[i], budget, root.child("contest", i, j, 0).generator())
            a_i = smaller | ~contains(simplices[j], xi, tol=0.0)
            pi = float(a_i.mean())
            if smaller:
                xj = sample_uniform_simplex(simplices[j], budget, root.child("contest", i, j, 1).generator())
                pj = float(contains(simplices[i], xj, tol=0.0).mean())
            else:
                pj = 0.0
            in_a = members[i] & (smaller | ~members[j])
            mun = float(np.count_nonzero(in_a)) / n
            i_wins = abs(pi - mun) <= abs(pj - mun)
            wins[i if i_wins else j] += 1
            if record:
                p_i[i, j], p_j[i, j], mu[i, j] = pi, pj, mun
                beats[i, j], beats[j, i] = i_wins, not i_wins
                se_i[i, j] = math.sqrt(pi * (1 - pi) / budget)
                se_j[i, j] = math.sqrt(pj * (1 - pj) / budget)
    return wins, se_i, se_j
