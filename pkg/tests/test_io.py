import json

import numpy as np
import pytest

from simplexlearn.bounding import BoundingBall
from simplexlearn.errors import ParameterError
from simplexlearn.geometry import Simplex, standard_simplex
from simplexlearn.io import (dumps, load_ball, load_config, load_dataset, load_simplex,
                             parse_config_text, save_dataset, save_simplex, write_json)
from simplexlearn.sampling import generate_dataset


@pytest.mark.parametrize("suffix", [".json", ".csv"])
def test_simplex_round_trip(tmp_path, suffix):
    s = Simplex([[0.1, -0.2], [1 / 3, 0.0], [0.0, 2.5]])
    path = tmp_path / f"s{suffix}"
    save_simplex(path, s)
    t = load_simplex(path)
    assert np.array_equal(s.vertices, t.vertices)


def test_simplex_json_format(tmp_path):
    path = tmp_path / "s.json"
    save_simplex(path, standard_simplex(1))
    assert json.loads(path.read_text()) == {"dim": 1, "vertices": [[0.0], [1.0]]}
    path.write_text('{"dim": 2, "vertices": [[0], [1]]}')
    with pytest.raises(ParameterError):
        load_simplex(path)


def test_simplex_csv_format(tmp_path):
    path = tmp_path / "s.csv"
    path.write_text("dim,2\n0,0\n1,0\n0,1\n")
    assert load_simplex(path).volume == pytest.approx(0.5)
    path.write_text("dim,2\n0,0\n1,0\n")
    with pytest.raises(ParameterError):
        load_simplex(path)
    path.write_text("0,0\n1,0\n0,1\n")
    with pytest.raises(ParameterError):
        load_simplex(path)


@pytest.mark.parametrize("suffix", [".csv", ".json"])
def test_dataset_round_trip(tmp_path, suffix):
    d = generate_dataset(standard_simplex(2), 50, 0.1, 9)
    path = tmp_path / f"d{suffix}"
    save_dataset(path, d)
    e = load_dataset(path)
    assert np.array_equal(d.points, e.points)
    assert (e.dim, e.n, e.sigma, e.seed) == (2, 50, 0.1, 9)
    if suffix == ".json":
        assert np.array_equal(e.truth.vertices, d.truth.vertices)


def test_dataset_csv_header(tmp_path):
    path = tmp_path / "d.csv"
    save_dataset(path, generate_dataset(standard_simplex(1), 3, 0.0, 1))
    lines = path.read_text().splitlines()
    assert lines[0] == "dim,n,sigma,seed" and lines[1] == "1,3,0.0,1" and len(lines) == 5
    path.write_text("dim,n,sigma,seed\n1,4,0.0,1\n0.5\n")
    with pytest.raises(ParameterError):
        load_dataset(path)
    path.write_text("a,b\n1,2\n")
    with pytest.raises(ParameterError):
        load_dataset(path)


def test_ball_round_trip(tmp_path):
    b = BoundingBall(np.array([1.0, 2.0]), 3.0, {"D": 0.5})
    write_json(tmp_path / "b.json", b.to_dict())
    c = load_ball(tmp_path / "b.json")
    assert np.array_equal(c.center, b.center) and c.radius == 3.0 and c.diagnostics == {"D": 0.5}


def test_config_parsing(tmp_path):
    text = "# comment\nn = 500  # trailing\n\neps-rep=0.2\nn = 600\n"
    assert parse_config_text(text) == {"n": "600", "eps_rep": "0.2"}
    with pytest.raises(ParameterError):
        parse_config_text("just words\n")
    (tmp_path / "c.cfg").write_text("dim = 2\n")
    assert load_config(tmp_path / "c.cfg") == {"dim": "2"}


def test_dumps_canonical():
    assert dumps({"b": 1, "a": [0.1]}) == '{\n  "a": [\n    0.1\n  ],\n  "b": 1\n}\n'
