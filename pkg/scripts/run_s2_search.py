"""Run the s = 2 search and print the elimination histogram.

    python3 scripts/run_s2_search.py --workers 4 --out runs/s2
"""
import argparse
import json
import time
from pathlib import Path

from distance5.figures import figure8_class_id
from distance5.report import dump_traces, render_report
from distance5.search import SearchConfig, search_s2


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--no-symmetry", action="store_true")
    ap.add_argument("--disable-rule", action="append", default=[])
    ap.add_argument("--out")
    args = ap.parse_args()
    cfg = SearchConfig(workers=args.workers, symmetry=not args.no_symmetry,
                       disabled_rules=frozenset(args.disable_rule))
    t0 = time.perf_counter()
    survivors, trace = search_s2(cfg)
    dt = time.perf_counter() - t0
    sm = trace.summary()
    print(f"records {sm['enumerated']}  survivors {sm['survivors']}  classes {sm['survivorClasses']}  "
          f"({dt:.1f} s)")
    for rule, n in sm["eliminated"].items():
        print(f"  {rule:7s} {n}")
    print("matches transcription:", sm["survivorClasses"] == [figure8_class_id()])
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "trace.json").write_text(dump_traces([trace]))
        (out / "survivors.json").write_text(json.dumps(survivors, indent=1, sort_keys=True))
        (out / "report.md").write_text(render_report([trace]))


if __name__ == "__main__":
    main()
