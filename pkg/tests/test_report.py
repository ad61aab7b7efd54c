import json

import pytest

from distance5.report import (DATA_FILES, RunManifest, TraceParseError, dump_traces,
                              hash_inputs, load_manifests, parse_traces, render_report,
                              report_json, write_manifest)
from distance5.search import EliminationTrace


def _trace(s=2, rules=("L2.4", "L2.4", "L2.5.2")):
    recs = [{"id": None, "config": {"s": s, "ws": [2, 2, 2, 2, 0], "wt": [3, 2, 2, 0, 0], "caseTags": {}},
             "verdict": {"rule": r, "witness": [1]}} for r in rules]
    return EliminationTrace(s, recs)


def test_manifest_roundtrip_and_append(tmp_path):
    m = RunManifest("enumerate", {"s": 2}, hash_inputs(), "t0", "t1", {"x": 1}, 0)
    write_manifest(m, tmp_path)
    write_manifest(RunManifest("identify", {}, {}, "t2"), tmp_path)
    runs = load_manifests(tmp_path / "manifest.json")
    assert runs[0] == m and runs[1].command == "identify"


def test_manifest_detects_tampering(tmp_path):
    from distance5.data import data_dir
    for name in DATA_FILES:
        (tmp_path / name).write_bytes((data_dir() / name).read_bytes())
    m = RunManifest("identify", {}, hash_inputs(directory=tmp_path), "t0")
    assert m.verify(tmp_path) == []
    p = tmp_path / "figure10.surgery"
    raw = bytearray(p.read_bytes())
    raw[10] ^= 1
    p.write_bytes(bytes(raw))
    assert m.verify(tmp_path) == ["figure10.surgery"]


def test_report_histogram_and_rules():
    md = render_report([_trace()])
    assert "| L2.4 | 2 |" in md and "| L2.5.2 | 1 |" in md
    assert "## Rules" in md and "L2.8" in md


def test_empty_report_is_valid():
    md = render_report([])
    assert md.startswith("# Elimination report") and "No traces" in md
    assert parse_traces("") == []


def test_two_traces_give_per_s_sections():
    md = render_report([_trace(2), _trace(4, ("L2.5.2",))])
    assert "## s = 2" in md and "## s = 4" in md
    assert [s["s"] for s in report_json([_trace(4), _trace(2)])["sections"]] == [2, 4]


def test_rendering_is_pure():
    text = dump_traces([_trace()])
    assert render_report(parse_traces(text)) == render_report(parse_traces(text))


def test_corrupt_trace_names_the_offset():
    text = dump_traces([_trace()])
    with pytest.raises(TraceParseError) as e:
        parse_traces(text[:40])
    assert "offset" in str(e.value)


def test_malformed_record():
    with pytest.raises(TraceParseError):
        parse_traces(json.dumps({"s": 2, "records": [{"verdict": {}}]}))
