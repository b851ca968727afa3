import math

import pytest

import nodalab


def test_distances_and_spectra():
    assert nodalab.distance("plane", [0, 0], [3, 4]) == pytest.approx(5.0)
    assert nodalab.distance("sphere", [0.0, 0.0], [math.pi, 0.0]) == pytest.approx(math.pi)
    assert nodalab.eigenvalue("sphere", 10) == pytest.approx(-110.0)
    assert nodalab.covariance("line", 2.0, 0.5) == pytest.approx(math.cos(1.0))
    assert nodalab.chi_mean(2) == pytest.approx(math.sqrt(math.pi / 2))
    assert nodalab.predicted_constant(2, 2) == pytest.approx(math.pi)


def test_field_and_scale_invariance():
    a = nodalab.Field("plane", 2 * math.pi, dim_v=2, seed=3)
    b = nodalab.Field("plane", 2 * math.pi, dim_v=2, seed=3, scales=[7.3, 7.3])
    p = [0.3, 0.4]
    assert b(p) == pytest.approx(a(p) * math.sqrt(7.3))
    assert len(a.gradient(p)) == 4
    line = nodalab.Field("line", 1.0, seed=1)
    assert line.crossings([0.0], [1.0], 100 * math.pi) == 100


def test_errors():
    with pytest.raises(ValueError):
        nodalab.distance("torus", [0], [1])
    with pytest.raises(nodalab.CertificationError):
        nodalab.Field("hyperbolic", 8.0, n_waves=8)


def test_experiment_and_cli(tmp_path):
    report = nodalab.run_experiment({"kind": "matrix_oracle", "n": 2, "k": 2, "samples": 100000})
    assert report["measured_constant"] == pytest.approx(1.0, rel=0.01)
    code, out, _ = nodalab.run_cli(["oracle", "matrix", "--out", str(tmp_path)])
    assert code == 0
    assert (tmp_path / "oracle_matrix.json").exists()
    assert nodalab.run_cli(["spacing", "--geometry", "torus", "--out", str(tmp_path)])[0] == 2
