import json

import pytest

import cogload


def test_encode_zero_input_spikes_once():
    rows = cogload.encode([0.0] * 5)
    assert len(rows) == 5
    for row in rows:
        assert len(row) == 16
        assert [t for t, s in enumerate(row) if s] == [9]


def test_quantize_reported_matrix():
    row = [0.1, -0.4, -0.35, 1.2, -0.8]
    w_int, scale = cogload.quantize_int3([row, [-v for v in row]])
    assert w_int == [[0, -1, -1, 3, -2], [0, 1, 1, -3, 2]]
    assert scale == pytest.approx(2.5)
    with pytest.raises(cogload.NumericError):
        cogload.quantize_int3([[0.0, 0.0]])


def test_decoder_and_metrics():
    assert cogload.classify_burst([200.0, 10.0], [120.0, 0.0], zero=20, diff=50) == 0
    assert cogload.classify_burst([0.0], [0.0], total_spikes=(1, 4)) == 1
    m = cogload.metrics([1, 1, 0, 0], [1, 0, 0, 0])
    assert m["accuracy"] == pytest.approx(0.75)
    assert m["recall"] == pytest.approx(0.5)
    with pytest.raises(cogload.DataError):
        cogload.metrics([], [])


def test_synthetic_is_balanced_and_seeded():
    x, y = cogload.synthetic(40, 3.0, 1)
    assert len(x) == 40 and sum(y) == 20
    assert cogload.synthetic(40, 3.0, 1) == (x, y)


def test_cli_roundtrip(tmp_path):
    data = str(tmp_path / "d.csv")
    code, _, _ = cogload.run_cli(["synth-data", "--n", "40", "--seed", "2", "--out", data])
    assert code == 0
    base = str(tmp_path / "b.json")
    code, out, err = cogload.run_cli(["baseline", "--data", data, "--out", base, "--set", "eval.k=4"])
    assert code == 0, err
    result = json.loads((tmp_path / "b.json").read_text())
    assert result["kind"] == "baseline"
    assert 0.0 <= result["summary"]["mean"]["accuracy"] <= 1.0
    code, _, _ = cogload.run_cli(["synth-data", "--out", data, "--set", "bogus=1"])
    assert code == 2
