"""Run manifests, trace loading and Markdown/JSON reports."""
from __future__ import annotations

import datetime as _dt
import hashlib
import json
from dataclasses import asdict, dataclass, field
from pathlib import Path

from .data import data_dir
from .filters import RULES, SURVIVOR
from .search import EliminationTrace

DATA_FILES = ("figure2.template", "figure8.pair", "figure9.cases", "figure10.surgery",
              "figure12.surgery", "twistscript.figure12", "twistscript.final.A",
              "twistscript.final.B")


class TraceParseError(ValueError):
    pass


def sha256_file(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def hash_inputs(names=DATA_FILES, directory=None) -> dict[str, str]:
    d = Path(directory or data_dir())
    return {n: sha256_file(d / n) for n in names}


def now() -> str:
    return _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")


@dataclass
class RunManifest:
    command: str
    config: dict
    inputs: dict[str, str]
    started: str
    finished: str | None = None
    summary: dict = field(default_factory=dict)
    exit_status: int | None = None
    resumable: bool = False
    checkpoint: str | None = None

    def to_json(self) -> dict:
        return asdict(self)

    @classmethod
    def from_json(cls, doc: dict) -> "RunManifest":
        return cls(**doc)

    def verify(self, directory=None) -> list[str]:
        """Names of input files whose current content differs from the recorded hash."""
        d = Path(directory or data_dir())
        bad = []
        for name, digest in sorted(self.inputs.items()):
            p = d / name
            if not p.exists() or sha256_file(p) != digest:
                bad.append(name)
        return bad


def write_manifest(run: RunManifest, out_dir) -> Path:
    """Append run to out_dir/manifest.json; earlier runs are never rewritten."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    path = out / "manifest.json"
    runs = load_manifests(path) if path.exists() else []
    doc = {"runs": [r.to_json() for r in runs] + [run.to_json()]}
    tmp = path.with_suffix(".json.tmp")
    tmp.write_text(json.dumps(doc, indent=1, sort_keys=True) + "\n")
    tmp.replace(path)
    return path


def load_manifests(path) -> list[RunManifest]:
    doc = json.loads(Path(path).read_text())
    return [RunManifest.from_json(r) for r in doc["runs"]]


# -- traces -----------------------------------------------------------------

def parse_traces(text: str, source: str = "<trace>") -> list[EliminationTrace]:
    if not text.strip():
        return []
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise TraceParseError(f"{source}: corrupt trace at offset {e.pos} "
                              f"(line {e.lineno}, column {e.colno}): {e.msg}") from None
    docs = doc.get("traces", [doc]) if isinstance(doc, dict) else None
    if docs is None:
        raise TraceParseError(f"{source}: top level must be an object (offset 0)")
    out = []
    for i, t in enumerate(docs):
        try:
            tr = EliminationTrace.from_json(t)
            for r in tr.records:
                r["verdict"]["rule"]
        except (KeyError, TypeError, ValueError) as e:
            raise TraceParseError(f"{source}: trace {i} is malformed ({e!r})") from None
        out.append(tr)
    return out


def load_traces(paths) -> list[EliminationTrace]:
    out = []
    for p in paths:
        out.extend(parse_traces(Path(p).read_text(), str(p)))
    return out


def dump_traces(traces) -> str:
    return json.dumps({"traces": [t.to_json() for t in traces]}, sort_keys=True,
                      separators=(",", ":"))


def merge_by_s(traces) -> list[EliminationTrace]:
    by: dict[int, EliminationTrace] = {}
    for t in traces:
        if t.s in by:
            by[t.s] = EliminationTrace(t.s, by[t.s].records + t.records, {**by[t.s].meta, **t.meta})
        else:
            by[t.s] = EliminationTrace(t.s, list(t.records), dict(t.meta))
    return [by[s] for s in sorted(by)]


# -- rendering --------------------------------------------------------------

def report_json(traces) -> dict:
    merged = merge_by_s(traces)
    return {"sections": [{"s": t.s, **t.summary()} for t in merged],
            "rules": [{"id": r.id, "name": r.name, "statement": r.statement} for r in RULES.values()]}


def render_report(traces, identification: list[dict] | None = None) -> str:
    merged = merge_by_s(traces)
    lines = ["# Elimination report", ""]
    if not merged:
        lines += ["No traces were given.", ""]
    for t in merged:
        sm = t.summary()
        lines += [f"## s = {t.s}", "",
                  f"- records: {sm['enumerated']}",
                  f"- survivors: {sm['survivors']}",
                  f"- survivor classes: {len(sm['survivorClasses'])}"]
        if "coverageGaps" in sm:
            lines.append(f"- coverage gaps: {len(sm['coverageGaps'])}")
        lines += ["", "| rule | eliminated |", "|---|---:|"]
        for rule, n in sm["eliminated"].items():
            lines.append(f"| {rule} | {n} |")
        lines.append("")
        surv = [r for r in t.records if r["verdict"]["rule"] == SURVIVOR]
        if surv:
            lines += ["Survivors:", ""]
            for r in surv[:20]:
                c = r["config"]
                cid = r.get("pair", {}).get("classId", "-")
                lines.append(f"- class {cid}: G_S {c.get('ws')} / G_T {c.get('wt')} "
                             f"{json.dumps(c.get('caseTags'), sort_keys=True)}")
            if len(surv) > 20:
                lines.append(f"- ... {len(surv) - 20} more")
            lines.append("")
    if identification:
        lines += ["## Identification", ""]
        for rep in identification:
            ok = all(c["ok"] for c in rep["checkpoints"])
            lines += [f"### case {rep['case']}", "",
                      f"- meridian {rep['meridian']}, equation {rep['equation']}, n = {rep['n']}",
                      f"- slopes alpha = {rep['alpha']}, beta = {rep['beta']}; family {rep['family']}",
                      f"- checkpoints: {sum(c['ok'] for c in rep['checkpoints'])}/"
                      f"{len(rep['checkpoints'])} {'pass' if ok else 'FAIL'}", ""]
    lines += ["## Rules", "", "| id | name | statement |", "|---|---|---|"]
    for r in RULES.values():
        lines.append(f"| {r.id} | {r.name} | {r.statement} |")
    return "\n".join(lines) + "\n"
