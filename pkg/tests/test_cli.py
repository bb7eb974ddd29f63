import json
from pathlib import Path

import pytest

from komparo import cli
from komparo.config import PRESETS, RunConfig, UnknownPresetError, preset


def _write(tmp_path, cfg: RunConfig, name="cfg.json") -> Path:
    p = tmp_path / name
    p.write_text(cfg.to_json())
    (tmp_path / cfg.output_dir).mkdir(exist_ok=True)
    return p


def _sum_squares_cfg() -> RunConfig:
    return RunConfig(f_spec="sum_squares(1)", g_spec="norm", dimension=1,
                     bounds=[[-2.0, 2.0]], resolution=[401], symmetric=True,
                     s_grid={"auto": 201}, output_dir="out")


def test_presets_round_trip():
    for name in PRESETS:
        cfg = preset(name)
        assert RunConfig.from_dict(json.loads(cfg.to_json())) == cfg


def test_unknown_preset():
    with pytest.raises(UnknownPresetError):
        preset("nope")
    assert cli.main(["preset", "nope"]) == cli.EXIT_CONFIG


def test_hahn_preset_shape():
    cfg = preset("hahn-doublewell")
    assert cfg.f_spec == "double_well" and cfg.g_spec == "norm" and cfg.symmetric


def test_exmupper_run(tmp_path, capsys):
    path = _write(tmp_path, preset("exmupper"))
    assert cli.main(["run", "--config", str(path)]) == cli.EXIT_CHECK_FAILED
    out = capsys.readouterr().out
    assert "supdef: fails" in out and "infdef: holds" in out
    d = tmp_path / "exmupper_out"
    rows = dict(line.split(",")[:2] for line in (d / "sup-env.csv").read_text().splitlines()[1:])
    assert [float(rows[s]) for s in ("-3.0", "0.0", "0.5", "1.0", "2.0", "3.0")] == [1, 1, 1, 1, 4, 9]
    report = json.loads((d / "report.json").read_text())
    verdicts = {c["check_id"]: c["verdict"] for c in report["checks"]}
    assert verdicts["supdef"] == "fails" and verdicts["infdef"] == "holds"


def test_sum_squares_norm_mode(tmp_path, capsys):
    path = _write(tmp_path, _sum_squares_cfg())
    assert cli.main(["run", "--config", str(path)]) == cli.EXIT_OK
    lines = capsys.readouterr().out.splitlines()
    assert lines and all(l.endswith((": holds", ": holds-on-window")) for l in lines)
    assert (tmp_path / "out" / "hahn-upper.csv").exists()


def test_open_problem_has_no_verdict(tmp_path, capsys):
    path = _write(tmp_path, preset("open-problem-experiment"))
    assert cli.main(["run", "--config", str(path)]) == cli.EXIT_OK
    report = json.loads((tmp_path / "open_problem_out" / "report.json").read_text())
    exp = [c for c in report["checks"] if c["check_id"] == "experiment_inf_continuity"][0]
    assert exp["verdict"] == "inconclusive" and exp["reason"] == "experiment-no-verdict"


def test_preset_command_writes_file(tmp_path):
    out = tmp_path / "p.json"
    assert cli.main(["preset", "exmupper", "--out", str(out)]) == cli.EXIT_OK
    assert RunConfig.load(out) == preset("exmupper")


class TestExitCodes:
    def test_config_error(self, tmp_path):
        d = _sum_squares_cfg().to_dict()
        d["checks"] = ["no_such_check"]
        p = tmp_path / "c.json"
        p.write_text(json.dumps(d))
        assert cli.main(["run", "--config", str(p)]) == cli.EXIT_CONFIG

    def test_unknown_key(self, tmp_path):
        d = _sum_squares_cfg().to_dict()
        d["colour"] = "blue"
        p = tmp_path / "c.json"
        p.write_text(json.dumps(d))
        assert cli.main(["run", "--config", str(p)]) == cli.EXIT_CONFIG

    def test_parse_error(self, tmp_path):
        cfg = _sum_squares_cfg()
        cfg.f_spec = "x1 +* 2"
        assert cli.main(["run", "--config", str(_write(tmp_path, cfg))]) == cli.EXIT_PARSE

    def test_missing_output_dir(self, tmp_path):
        cfg = _sum_squares_cfg()
        p = tmp_path / "c.json"
        p.write_text(cfg.to_json())
        assert cli.main(["run", "--config", str(p)]) == cli.EXIT_IO

    def test_missing_config_file(self, tmp_path):
        assert cli.main(["run", "--config", str(tmp_path / "nope.json")]) == cli.EXIT_IO


def test_oracle_suite_command(capsys):
    assert cli.main(["oracle-suite", "--seed", "0", "--trials", "3"]) == cli.EXIT_OK
    assert json.loads(capsys.readouterr().out) == {"passes": 3, "trials": 3}
    assert cli.main(["oracle-suite", "--trials", "0"]) == cli.EXIT_CONFIG
