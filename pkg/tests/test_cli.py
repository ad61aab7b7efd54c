import json
import shutil

import pytest

from distance5.cli import main
from distance5.data import data_dir


def run(args, capsys):
    code = main(args)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_odd_s_is_a_usage_error(capsys):
    code, _, err = run(["enumerate", "--s", "3"], capsys)
    assert code == 2 and "even" in err


def test_unknown_subcommand_and_flag(capsys):
    assert run(["frobnicate"], capsys)[0] == 2
    assert run(["identify", "--bogus"], capsys)[0] == 2
    assert run(["enumerate", "--disable-rule", "L9"], capsys)[0] == 2


def test_verify_slopes(capsys, tmp_path):
    code, out, _ = run(["--out", str(tmp_path), "verify-slopes", "--n-range", "-5..5"], capsys)
    assert code == 0
    assert json.loads(out)["checked"] == 10
    assert (tmp_path / "manifest.json").exists()


def test_bad_range(capsys):
    assert run(["verify-slopes", "--n-range", "5..-5"], capsys)[0] == 2


def test_identify_writes_artifacts(capsys, tmp_path):
    code, out, _ = run(["--out", str(tmp_path), "identify"], capsys)
    assert code == 0
    reps = json.loads((tmp_path / "identification.json").read_text())
    assert [r["case"] for r in reps] == ["A", "B"]
    assert "## Identification" in (tmp_path / "report.md").read_text()
    man = json.loads((tmp_path / "manifest.json").read_text())["runs"][0]
    assert man["exit_status"] == 0 and "figure10.surgery" in man["inputs"]


def test_eliminate_and_report(capsys, tmp_path):
    code, _, _ = run(["--out", str(tmp_path), "eliminate", "--max-s", "6"], capsys)
    assert code == 0
    code, out, _ = run(["report", "--format", "md", str(tmp_path / "trace.json")], capsys)
    assert code == 0 and "## s = 4" in out and "## s = 6" in out
    code, out, _ = run(["report", "--format", "json", str(tmp_path / "trace.json")], capsys)
    assert code == 0 and json.loads(out)["sections"][0]["s"] == 4


def test_dropped_node_is_a_mathematical_mismatch(capsys, tmp_path):
    code, out, _ = run(["--out", str(tmp_path), "eliminate", "--max-s", "6",
                        "--drop-node", "half.long-orbits"], capsys)
    assert code == 1 and json.loads(out)["coverageGaps"] > 0
    assert (tmp_path / "trace.json").exists()


def test_corrupt_trace(capsys, tmp_path):
    p = tmp_path / "t.json"
    p.write_text('{"traces": [')
    code, _, err = run(["report", str(p)], capsys)
    assert code == 2 and "offset" in err


def test_missing_data_dir(capsys, tmp_path):
    assert run(["--data-dir", str(tmp_path / "nope"), "identify"], capsys)[0] == 2


def test_tampered_transcription_is_exit_1(capsys, tmp_path, monkeypatch):
    for f in data_dir().iterdir():
        if f.is_file() and not f.name.endswith(".py"):
            shutil.copy(f, tmp_path / f.name)
    doc = json.loads((tmp_path / "figure12.surgery").read_text())
    doc["tracked"]["alpha"] = "3/2"
    (tmp_path / "figure12.surgery").write_text(json.dumps(doc))
    monkeypatch.delenv("TW_DATA_DIR", raising=False)
    code, out, _ = run(["--data-dir", str(tmp_path), "identify", "--case", "A"], capsys)
    monkeypatch.delenv("TW_DATA_DIR", raising=False)
    assert code == 1 and json.loads(out)["failed"]["checkpoint"]


def test_config_file_and_override(capsys, tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"verify-slopes": {"n_range": "0..3"}}))
    code, out, _ = run(["--config", str(cfg), "verify-slopes"], capsys)
    assert code == 0 and json.loads(out)["range"] == [0, 3]
    code, out, _ = run(["--config", str(cfg), "verify-slopes", "--n-range", "0..1"], capsys)
    assert json.loads(out)["range"] == [0, 1]
    cfg.write_text("{not json")
    assert run(["--config", str(cfg), "verify-slopes"], capsys)[0] == 2


def test_small_enumeration_checkpoint_marks_resumable(capsys, tmp_path, monkeypatch):
    ck = tmp_path / "ck.json"
    code, out, _ = run(["--out", str(tmp_path), "enumerate", "--s", "2", "--checkpoint", str(ck),
                        "--max-configs", "5"], capsys)
    assert code == 1
    man = json.loads((tmp_path / "manifest.json").read_text())["runs"][-1]
    assert man["resumable"] is True and man["checkpoint"] == str(ck)
