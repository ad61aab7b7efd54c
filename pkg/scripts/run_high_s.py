"""Coverage of the s >= 4 elimination tree, one line per s and terminal node."""
import argparse
import time

from distance5.highs import coverage_check, default_tree, enumerate_high_configs


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--max-s", type=int, default=12)
    ap.add_argument("--drop-node", action="append", default=[])
    args = ap.parse_args()
    tree = [n for n in default_tree() if n.id not in set(args.drop_node)]
    for s in range(4, args.max_s + 1, 2):
        t0 = time.perf_counter()
        rep = coverage_check(tree, enumerate_high_configs(s))
        dt = time.perf_counter() - t0
        print(f"s={s:<3d} configs={rep['configurations']:<5d} gaps={len(rep['gaps']):<3d} "
              f"overlaps={len(rep['overlaps']):<3d} {dt:.2f}s")
        for node, n in rep["terminalHits"].items():
            print(f"    {node:18s} {n}")


if __name__ == "__main__":
    main()
