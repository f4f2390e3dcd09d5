import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from rotorkit.cli import main
from rotorkit.config import ENGINES, ExperimentConfig
from rotorkit.csvout import read_csv
from rotorkit.errors import ConfigError
from rotorkit.runner import OUTPUT_ENV, run
from rotorkit.scenarios import CATALOG, list_scenarios

REFERENCE_ROWS = {2: (0.33, 0.31), 3: (0.26, 0.20), 4: (0.21, 0.11), 5: (0.18, 0.07)}


@pytest.fixture(autouse=True)
def _no_env(monkeypatch):
    monkeypatch.delenv(OUTPUT_ENV, raising=False)


finite = st.floats(-1e6, 1e6, allow_nan=False).filter(lambda x: x != 0)


@given(
    st.sampled_from(ENGINES),
    finite,
    st.lists(st.floats(0, 100, allow_nan=False), max_size=4),
    st.integers(0, 2**31),
    st.booleans(),
)
def test_config_round_trip(engine, P, taus, seed, shift):
    c = ExperimentConfig("single_kick", engine, P=P, taus=taus, seed=seed, revival_shift=shift)
    back = ExperimentConfig.from_json(c.to_json())
    assert back == c and back.to_json() == c.to_json()


@pytest.mark.parametrize(
    "d, field",
    [
        ({"scenario": "accumulate", "engine": "classical3d"}, "engine"),
        ({"scenario": "single_kick", "engine": "quantum5d"}, "engine"),
        ({"scenario": "bogus", "engine": "quantum2d"}, "scenario"),
        ({"scenario": "figure:1", "engine": "classical2d"}, "engine"),
        ({"scenario": "single_kick", "engine": "quantum2d", "P": 0}, "P"),
        ({"scenario": "single_kick", "engine": "quantum2d", "n_kicks": 1.5}, "n_kicks"),
        ({"scenario": "single_kick", "engine": "quantum2d", "temperatures": [-1]}, "temperatures"),
        ({"scenario": "accumulate", "engine": "classical2d", "revival_shift": True}, "revival_shift"),
        ({"scenario": "focal", "engine": "quantum3d"}, "pulse"),
        ({"scenario": "focal", "engine": "quantum3d", "pulse": {"kind": "square"}}, "pulse"),
        ({"scenario": "single_kick", "engine": "quantum2d", "colour": 1}, "colour"),
        ({"engine": "quantum2d"}, "scenario"),
    ],
)
def test_config_errors_name_the_field(d, field):
    with pytest.raises(ConfigError, match=field):
        ExperimentConfig.from_dict(d).validate()


def test_invalid_pair_exits_2_without_outputs(tmp_path, capsys):
    cfg = tmp_path / "bad.json"
    cfg.write_text(json.dumps({"scenario": "accumulate", "engine": "classical3d", "output_dir": str(tmp_path / "out")}))
    assert main(["run", str(cfg)]) == 2
    assert not (tmp_path / "out").exists()
    assert "engine" in capsys.readouterr().err


def test_malformed_json_exits_2(tmp_path):
    cfg = tmp_path / "bad.json"
    cfg.write_text("{not json")
    assert main(["run", str(cfg)]) == 2


def test_numerical_error_exits_3_without_outputs(tmp_path, capsys):
    out = tmp_path / "out"
    # a vanishing kick leaves O flat: nothing to minimize
    assert main(["accumulate", "--P", "1e-30", "--kicks", "2", "--output", str(out)]) == 3
    assert not out.exists()
    assert "flat" in capsys.readouterr().err.lower()


def test_catalog():
    names = [s.name for s in list_scenarios()]
    assert len(names) >= 9
    assert names == [s.name for s in list_scenarios()]
    assert len(set(names)) == len(names)
    for s in list_scenarios():
        s.config().validate()
    for fig in ("figure:1", "figure:2", "figure:3", "figure:4", "figure:5", "figure:6", "figure:7", "figure:8"):
        assert fig in CATALOG
    assert "figure:table1" in CATALOG


def test_list_command(capsys):
    assert main(["list", "--json"]) == 0
    items = json.loads(capsys.readouterr().out)
    assert [i["name"] for i in items] == [s.name for s in list_scenarios()]


def test_figure_1b_peaks_at_zero(tmp_path):
    m = run(CATALOG["figure:1b"].config(), str(tmp_path))
    header, data = read_csv((tmp_path / "density.csv").read_text())
    assert data[np.argmax(data[:, 1]), 0] == pytest.approx(0.0, abs=np.diff(data[:2, 0])[0])
    assert set(m.outputs) >= {"config.json", "density.csv"}
    embedded = json.loads((tmp_path / "config.json").read_text())
    assert embedded["seed"] == m.seed and m.config_sha256 == ExperimentConfig.from_dict(embedded).digest()


def test_figure_table1(tmp_path):
    run(CATALOG["figure:table1"].config(), str(tmp_path))
    header, data = read_csv((tmp_path / "table1.csv").read_text())
    assert header == ["n_kicks", "O_acc", "O_opt"]
    assert data.shape == (4, 3)
    for n, acc, opt in data:
        ref = REFERENCE_ROWS[int(n)]
        assert abs(acc - ref[0]) <= 0.01 and abs(opt - ref[1]) <= 0.01


def test_deterministic_bytes(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    for d in (a, b):
        assert main(["accumulate", "--P", "3", "--kicks", "4", "--output", str(d)]) == 0
    assert (a / "trace.csv").read_bytes() == (b / "trace.csv").read_bytes()
    assert (a / "trace.csv").read_text().startswith("# schema=1")


def test_output_dir_override(tmp_path, monkeypatch):
    monkeypatch.setenv(OUTPUT_ENV, str(tmp_path / "env"))
    monkeypatch.chdir(tmp_path)
    assert main(["run", "--scenario", "figure:1b"]) == 0
    assert (tmp_path / "env" / "manifest.json").exists()
    assert not (tmp_path / "rotorkit-out").exists()
    # an explicit flag still wins
    assert main(["run", "--scenario", "figure:1b", "--output", str(tmp_path / "flag")]) == 0
    assert (tmp_path / "flag" / "manifest.json").exists()


def test_focal_command(tmp_path, capsys):
    assert main(["focal", "--pulse", "delta", "--amplitude", "2", "--engine", "classical2d", "--tau0", "-0.1", "--tau-end", "1", "--output", str(tmp_path)]) == 0
    rep = json.loads((tmp_path / "focal.json").read_text())
    assert rep["focal_times"][0] == pytest.approx(0.5, abs=1e-9)


def test_optimize_command(tmp_path):
    assert main(["optimize", "--kicks", "2", "--restarts", "3", "--output", str(tmp_path)]) == 0
    res = json.loads((tmp_path / "result.json").read_text())
    assert res["best_O"] <= 0.32 and len(res["best_delays"]) == 2
