"""File formats: simplex JSON/CSV, dataset CSV/JSON, ball and covering JSON, flat config files."""
from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .bounding import BoundingBall
from .errors import ParameterError
from .geometry import Simplex
from .sampling import NoisyDataset


def dumps(obj) -> str:
    """Canonical JSON: sorted keys, fixed separators, shortest round-trip floats."""
    return json.dumps(obj, sort_keys=True, indent=2, allow_nan=True) + "\n"


def write_json(path, obj):
    Path(path).write_text(dumps(obj))


def read_json(path):
    return json.loads(Path(path).read_text())


def _fmt(x) -> str:
    return repr(float(x))


# -- simplex -----------------------------------------------------------------

def simplex_from_dict(d: dict) -> Simplex:
    s = Simplex(np.asarray(d["vertices"], dtype=float))
    if "dim" in d and int(d["dim"]) != s.dim:
        raise ParameterError(f"simplex file says dim={d['dim']} but has {s.dim}-dimensional vertices")
    return s


def load_simplex(path) -> Simplex:
    path = Path(path)
    if path.suffix.lower() == ".csv":
        with path.open(newline="") as fh:
            rows = [r for r in csv.reader(fh) if r]
        if not rows or rows[0][0].strip() != "dim":
            raise ParameterError(f"{path}: simplex CSV must start with a 'dim,K' row")
        k = int(rows[0][1])
        verts = np.array([[float(v) for v in r] for r in rows[1:]], dtype=float)
        if verts.shape != (k + 1, k):
            raise ParameterError(f"{path}: expected {k + 1} rows of {k} floats, got {verts.shape}")
        return Simplex(verts)
    return simplex_from_dict(read_json(path))


def save_simplex(path, s: Simplex):
    path = Path(path)
    if path.suffix.lower() == ".csv":
        with path.open("w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["dim", s.dim])
            for v in s.vertices:
                w.writerow([_fmt(x) for x in v])
    else:
        write_json(path, s.to_dict())


# -- dataset -----------------------------------------------------------------

_DATA_HEADER = ["dim", "n", "sigma", "seed"]


def dataset_to_dict(d: NoisyDataset) -> dict:
    out = {"dim": d.dim, "n": d.n, "sigma": d.sigma, "seed": d.seed,
           "points": d.points.tolist()}
    if d.truth is not None:
        out["truth"] = d.truth.to_dict()
    return out


def save_dataset(path, d: NoisyDataset):
    """CSV: header row ``dim,n,sigma,seed``, one row of those values, then n rows of K floats."""
    path = Path(path)
    if path.suffix.lower() == ".json":
        write_json(path, dataset_to_dict(d))
        return
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(_DATA_HEADER)
        w.writerow([d.dim, d.n, _fmt(d.sigma), d.seed])
        for p in d.points:
            w.writerow([_fmt(x) for x in p])


def load_dataset(path, truth: Simplex | None = None) -> NoisyDataset:
    path = Path(path)
    if path.suffix.lower() == ".json":
        d = read_json(path)
        tr = simplex_from_dict(d["truth"]) if d.get("truth") else truth
        pts = np.asarray(d["points"], dtype=float).reshape(-1, int(d["dim"]))
        return NoisyDataset(int(d["dim"]), float(d["sigma"]), pts, int(d["seed"]), tr)
    with path.open(newline="") as fh:
        rows = [r for r in csv.reader(fh) if r]
    if len(rows) < 2 or [c.strip() for c in rows[0]] != _DATA_HEADER:
        raise ParameterError(f"{path}: dataset CSV must start with header {','.join(_DATA_HEADER)}")
    dim, n, sigma, seed = int(rows[1][0]), int(rows[1][1]), float(rows[1][2]), int(rows[1][3])
    pts = np.array([[float(v) for v in r] for r in rows[2:]], dtype=float).reshape(-1, dim)
    if pts.shape[0] != n:
        raise ParameterError(f"{path}: header says n={n} but file has {pts.shape[0]} points")
    return NoisyDataset(dim, sigma, pts, seed, truth)


# -- ball / covering -----------------------------------------------------------

def load_ball(path) -> BoundingBall:
    return BoundingBall.from_dict(read_json(path))


# -- flat config ---------------------------------------------------------------

def parse_config_text(text: str) -> dict[str, str]:
    """``key = value`` lines; ``#`` starts a comment; later keys override earlier ones."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParameterError(f"config line {lineno}: expected 'key = value', got {raw!r}")
        key, value = line.split("=", 1)
        out[key.strip().replace("-", "_")] = value.strip()
    return out


def load_config(path) -> dict[str, str]:
    return parse_config_text(Path(path).read_text())
