import json
import math

import numpy as np
import pytest

from bclab import factory, grids
from bclab.report import ResidualReport, digest, dumps, format_float


def test_chebyshev_nodes_are_interior_and_increasing():
    x = grids.chebyshev_nodes(0.0, 1.0, 7)
    assert np.all(np.diff(x) > 0) and x[0] > 0 and x[-1] < 1
    assert x[3] == pytest.approx(0.5)


def test_tensor_grid_order_and_margins():
    surface = factory.sphere(3)
    pts = grids.tensor_grid(surface, {1: 3, 0: 2})
    assert len(pts) == 6
    box = grids.interior_box(surface)
    for u in pts:
        assert np.all(u >= box[:, 0]) and np.all(u <= box[:, 1])
    # lexicographic in sorted parameter index: parameter 0 varies slowest
    assert pts[0][0] == pts[2][0] and pts[0][1] < pts[1][1] < pts[2][1]
    assert np.all([u[2] == pts[0][2] for u in pts])


def test_halton_grid_is_reproducible():
    surface = factory.torus()
    a, b = grids.halton_grid(surface, 10), grids.halton_grid(surface, 10)
    np.testing.assert_array_equal(np.array(a), np.array(b))


def test_grid_map_preserves_order_under_threads(monkeypatch):
    monkeypatch.setenv("BCLAB_THREADS", "4")
    assert grids.grid_map(lambda x: x * x, range(50)) == [x * x for x in range(50)]
    monkeypatch.setenv("BCLAB_THREADS", "1")
    assert grids.thread_count() == 1
    monkeypatch.setenv("BCLAB_THREADS", "many")
    assert grids.thread_count() >= 1


def test_report_from_values():
    rep = ResidualReport.from_values("x", [(0.0,), (1.0,), (2.0,)], [1e-9, -3e-7, 2e-8], 1e-6, note="n")
    assert rep.max == 3e-7 and rep.argmax == (1.0,) and rep.passed
    d = rep.to_dict()
    assert d["pass"] is True and d["n_points"] == 3 and d["details"] == {"note": "n"}
    assert "values" not in rep.to_dict(include_values=False)
    with pytest.raises(ValueError):
        ResidualReport.from_values("x", [], [], 1.0)


def test_canonical_json_is_stable_and_parseable():
    obj = {"b": [1.0, 0.1, np.float64(1 / 3)], "a": {"z": True, "y": None}, "c": "≥", "d": np.int64(4)}
    text = dumps(obj)
    assert text == dumps(dict(reversed(list(obj.items()))))
    back = json.loads(text)
    assert back["b"][2] == 1 / 3 and back["a"] == {"y": None, "z": True} and back["d"] == 4
    assert text.index('"a"') < text.index('"b"') < text.index('"c"')


def test_float_format_round_trips():
    for x in (0.1, 1 / 3, 1e-300, -2.5e17, math.pi):
        assert float(format_float(x)) == x
    assert format_float(math.inf) == '"inf"' and format_float(math.nan) == '"nan"'


def test_digest_is_sha256():
    assert digest("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
