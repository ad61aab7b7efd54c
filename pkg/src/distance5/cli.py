"""Command line entry point.

Exit status: 0 when the outcome matches the expected result, 1 when the
computation finished (or stopped) with any other outcome, 2 on usage errors,
unreadable configuration or missing data files.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
import time
from pathlib import Path

EXIT_OK, EXIT_MISMATCH, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _even(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 2 or v % 2:
        raise argparse.ArgumentTypeError(f"s must be an even integer >= 2, got {v}")
    return v


def _n_range(text: str) -> tuple[int, int]:
    try:
        a, b = text.split("..")
        lo, hi = int(a), int(b)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a..b, got {text!r}") from None
    if lo > hi:
        raise argparse.ArgumentTypeError(f"empty range {text!r}")
    return lo, hi


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def build_parser() -> argparse.ArgumentParser:
    from .search import ALL_RULES
    top = _Parser(prog="distance5", description=__doc__.splitlines()[0])
    top.add_argument("--out", help="directory for manifest.json, trace.json and report.md")
    top.add_argument("--data-dir", help="transcription directory (overrides TW_DATA_DIR)")
    top.add_argument("--config", help="JSON file of option defaults; flags override it")
    sub = top.add_subparsers(dest="command", required=True, parser_class=_Parser)

    e = sub.add_parser("enumerate", help="enumerate and filter graph pairs for one s")
    e.add_argument("--s", type=_even, default=None, help="even s (default 2)")
    e.add_argument("--no-symmetry", action="store_true", default=None,
                   help="keep every oriented record instead of one per orbit")
    e.add_argument("--disable-rule", action="append", choices=ALL_RULES, default=None,
                   metavar="RULE", help="skip a rule; repeatable")
    e.add_argument("--workers", type=int, default=None, help="worker processes (default 1)")
    e.add_argument("--checkpoint", default=None, help="file to save and resume progress")
    e.add_argument("--max-configs", type=int, default=None,
                   help="stop after this many weight units (exit 1, resumable)")

    el = sub.add_parser("eliminate", help="run the s >= 4 elimination tree")
    el.add_argument("--max-s", type=_even, default=None, help="largest s (default 12)")
    el.add_argument("--drop-node", action="append", default=None,
                    help="remove a tree node (to see coverage gaps)")

    i = sub.add_parser("identify", help="run the surgery pipeline on the survivor")
    i.add_argument("--case", choices=("A", "B"), default=None,
                   help="meridian case (default: both)")
    i.add_argument("--survivor", default=None, help="survivors.json from an enumerate run")

    v = sub.add_parser("verify-slopes", help="check the final slope formulas over a range of n")
    v.add_argument("--n-range", type=_n_range, default=None, metavar="LO..HI",
                   help="inclusive range of n (default -50..50)")

    r = sub.add_parser("report", help="render traces as Markdown or JSON")
    r.add_argument("--format", choices=("json", "md"), default=None)
    r.add_argument("traces", nargs="*", help="trace files (default: <out>/trace.json)")
    return top


DEFAULTS = {
    "enumerate": {"s": 2, "no_symmetry": False, "disable_rule": [], "workers": 1,
                  "checkpoint": None, "max_configs": None},
    "eliminate": {"max_s": 12, "drop_node": []},
    "identify": {"case": None, "survivor": None},
    "verify-slopes": {"n_range": (-50, 50)},
    "report": {"format": "md"},
}


def _merge_config(args) -> dict:
    opts = dict(DEFAULTS[args.command])
    if args.config:
        try:
            doc = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as e:
            raise UsageError(f"malformed config {args.config}: {e}") from None
        if not isinstance(doc, dict):
            raise UsageError("config must be a JSON object")
        section = doc.get(args.command, doc)
        for k, val in section.items():
            k = k.replace("-", "_")
            if k not in opts:
                raise UsageError(f"unknown config key {k!r} for {args.command}")
            opts[k] = val
    for k in opts:
        val = getattr(args, k, None)
        if val is not None:
            opts[k] = val
    if args.command == "enumerate":
        try:
            opts["s"] = _even(str(opts["s"]))
        except argparse.ArgumentTypeError as e:
            raise UsageError(str(e)) from None
    if args.command == "report":
        opts["traces"] = list(args.traces)
    if args.command == "verify-slopes" and isinstance(opts["n_range"], str):
        opts["n_range"] = _n_range(opts["n_range"])
    return opts


def _glue_ranges(argv: list[str]) -> list[str]:
    # "--n-range -5..5" would otherwise read -5..5 as an option
    out = []
    it = iter(argv)
    for a in it:
        if a == "--n-range":
            nxt = next(it, None)
            out.append(a if nxt is None else f"{a}={nxt}")
        else:
            out.append(a)
    return out


def main(argv=None) -> int:
    argv = _glue_ranges(list(sys.argv[1:] if argv is None else argv))
    saved = os.environ.get("TW_DATA_DIR")
    try:
        args = build_parser().parse_args(argv)
        if args.data_dir:
            os.environ["TW_DATA_DIR"] = args.data_dir
        opts = _merge_config(args)
        return _run(args, opts)
    except UsageError as e:
        print(f"usage error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except FileNotFoundError as e:
        print(f"missing data: {e}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as e:  # --help
        return EXIT_OK if e.code in (0, None) else EXIT_USAGE
    finally:
        if saved is None:
            os.environ.pop("TW_DATA_DIR", None)
        else:
            os.environ["TW_DATA_DIR"] = saved


def _run(args, opts) -> int:
    from .report import RunManifest, hash_inputs, now, write_manifest
    handler = {"enumerate": _enumerate, "eliminate": _eliminate, "identify": _identify,
               "verify-slopes": _verify_slopes, "report": _report}[args.command]
    from .data import data_dir
    from .report import DATA_FILES
    for name in DATA_FILES:
        if not (Path(data_dir()) / name).exists():
            raise FileNotFoundError(str(Path(data_dir()) / name))
    manifest = RunManifest(args.command, {k: list(v) if isinstance(v, tuple) else v
                                          for k, v in opts.items()},
                           {}, now())
    out = Path(args.out) if args.out else None
    t0 = time.time()
    status, summary, artifacts = handler(opts, out, manifest)
    if out is not None and args.command != "report":
        out.mkdir(parents=True, exist_ok=True)
        for name, text in artifacts.items():
            (out / name).write_text(text)
        manifest.inputs = hash_inputs()
        manifest.finished = now()
        manifest.summary = {**summary, "seconds": round(time.time() - t0, 3)}
        manifest.exit_status = status
        write_manifest(manifest, out)
    if args.command != "report":
        print(json.dumps({"command": args.command, "status": status, **summary}, sort_keys=True))
    return status


# -- handlers: each returns (status, summary, {artifact name: text}) -----------

def _enumerate(opts, out, manifest):
    from .figures import figure8_class_id
    from .report import dump_traces, render_report
    from .search import SearchBudgetExceeded, SearchConfig, search_s2
    s = opts["s"]
    if s >= 4:
        return _high([s], [], out)
    cfg = SearchConfig(s_values=(2,), disabled_rules=frozenset(opts["disable_rule"]),
                       symmetry=not opts["no_symmetry"], workers=int(opts["workers"]),
                       checkpoint=opts["checkpoint"], max_configs=opts["max_configs"])
    manifest.config = {**manifest.config, "search": cfg.snapshot()}
    try:
        survivors, trace = search_s2(cfg)
    except SearchBudgetExceeded as e:
        manifest.resumable, manifest.checkpoint = True, e.checkpoint
        trace = e.trace
        summary = {"complete": False, "records": len(trace.records), "checkpoint": e.checkpoint}
        return EXIT_MISMATCH, summary, {"trace.json": dump_traces([trace]),
                                        "report.md": render_report([trace])}
    classes = [r["pair"]["classId"] for r in survivors]
    expected = [figure8_class_id()]
    ok = classes == expected
    summary = {"survivorClasses": classes, "expected": expected, "records": len(trace.records),
               "eliminated": trace.summary()["eliminated"]}
    return (EXIT_OK if ok else EXIT_MISMATCH), summary, {
        "trace.json": dump_traces([trace]),
        "survivors.json": json.dumps(survivors, sort_keys=True, indent=1) + "\n",
        "report.md": render_report([trace]),
    }


def _high(s_values, drop, out):
    from .highs import default_tree, eliminate_high_s
    from .report import dump_traces, render_report
    tree = default_tree()
    names = {n.id for n in tree}
    unknown = set(drop) - names
    if unknown:
        raise UsageError(f"unknown tree nodes {sorted(unknown)}")
    tree = [n for n in tree if n.id not in set(drop)]
    traces = eliminate_high_s(s_values, tree, strict=False)
    gaps = {s: len(t.meta["coverageGaps"]) for s, t in traces.items()}
    surv = {s: t.summary()["survivors"] for s, t in traces.items()}
    ok = not any(gaps.values()) and not any(surv.values())
    tl = [traces[s] for s in sorted(traces)]
    summary = {"s": sorted(traces), "survivors": sum(surv.values()), "coverageGaps": sum(gaps.values()),
               "perS": {str(s): {"survivors": surv[s], "gaps": gaps[s]} for s in sorted(traces)}}
    return (EXIT_OK if ok else EXIT_MISMATCH), summary, {
        "trace.json": dump_traces(tl), "report.md": render_report(tl)}


def _eliminate(opts, out, manifest):
    return _high(list(range(4, int(opts["max_s"]) + 1, 2)), opts["drop_node"], out)


def _identify(opts, out, manifest):
    from .figures import load_figure8_pair
    from .report import render_report
    from .surgery import IdentificationFailure, identify
    survivor = load_figure8_pair()
    if opts["survivor"]:
        try:
            doc = json.loads(Path(opts["survivor"]).read_text())
        except json.JSONDecodeError as e:
            raise UsageError(f"unreadable survivor file: {e}") from None
        survivor = doc[0] if isinstance(doc, list) and doc else doc
    cases = [opts["case"]] if opts["case"] else ["A", "B"]
    reports, failed = [], None
    for c in cases:
        try:
            reports.append(identify(survivor, c).to_json())
        except IdentificationFailure as e:
            failed = {"case": c, "checkpoint": e.checkpoint, "error": str(e)}
            break
    summary = {"cases": cases, "failed": failed,
               "slopes": {r["case"]: [r["alpha"], r["beta"]] for r in reports}}
    return (EXIT_MISMATCH if failed else EXIT_OK), summary, {
        "identification.json": json.dumps(reports, indent=1, sort_keys=True) + "\n",
        "report.md": render_report([], reports)}


def _verify_slopes(opts, out, manifest):
    from .slopes import distance
    from .surgery import final_slopes, toroidal_slope_set
    lo, hi = opts["n_range"]
    bad = []
    checked = 0
    for n in range(lo, hi + 1):
        if n == 1:
            continue
        for c in ("A", "B"):
            a, b = final_slopes(n, c)
            if distance(a, b) != 5:
                bad.append({"n": n, "case": c, "distance": distance(a, b)})
        _, dist = toroidal_slope_set(n)
        if sorted(dist.values()) != [3, 4, 5]:
            bad.append({"n": n, "set": sorted(dist.values())})
        checked += 1
    summary = {"range": [lo, hi], "checked": checked, "failures": bad}
    return (EXIT_MISMATCH if bad else EXIT_OK), summary, {
        "slopes.json": json.dumps(summary, indent=1, sort_keys=True) + "\n"}


def _report(opts, out, manifest):
    from .report import TraceParseError, load_traces, render_report, report_json
    paths = opts.get("traces") or []
    if not paths:
        if out is None:
            raise UsageError("report needs trace files or --out")
        paths = [out / "trace.json"]
    try:
        traces = load_traces(paths)
    except TraceParseError as e:
        print(str(e), file=sys.stderr)
        return EXIT_USAGE, {"error": str(e)}, {}
    if opts["format"] == "json":
        text = json.dumps(report_json(traces), indent=1, sort_keys=True) + "\n"
    else:
        text = render_report(traces)
    if out is not None:
        out.mkdir(parents=True, exist_ok=True)
        (out / ("report.json" if opts["format"] == "json" else "report.md")).write_text(text)
    sys.stdout.write(text)
    return EXIT_OK, {"traces": len(traces)}, {}


if __name__ == "__main__":
    sys.exit(main())
