"""Regenerate the golden traces under tests/fixtures."""
import hashlib
import json
from pathlib import Path

from distance5.highs import eliminate_high_s
from distance5.report import dump_traces
from distance5.search import SearchConfig, search_s2

FIX = Path(__file__).resolve().parent.parent / "tests" / "fixtures"


def main():
    FIX.mkdir(parents=True, exist_ok=True)
    _, trace = search_s2(SearchConfig())
    text = dump_traces([trace])
    (FIX / "golden_s2_trace.json").write_text(text)
    (FIX / "golden_s2_summary.json").write_text(json.dumps(
        {"sha256": hashlib.sha256(text.encode()).hexdigest(), **trace.summary()},
        indent=1, sort_keys=True) + "\n")
    t4 = eliminate_high_s([4])[4]
    (FIX / "golden_s4_trace.json").write_text(dump_traces([t4]))
    print("wrote", sorted(p.name for p in FIX.iterdir()))


if __name__ == "__main__":
    main()
