"""Sweep the framing equations and list which n each bound reaches."""
import argparse

from distance5.slopes import distance, solve_pm1
from distance5.surgery import EXPECTED_EQUATION, final_slopes, framing_constraint, toroidal_slope_set


def reached(case, bound):
    out = set()
    for p, q in solve_pm1(*EXPECTED_EQUATION[case], bound):
        ok, n = framing_constraint(case, p, q)
        assert ok
        out.add(n)
    return out


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n-max", type=int, default=50)
    ap.add_argument("--bounds", type=int, nargs="+", default=[200, 203])
    args = ap.parse_args()
    window = [n for n in range(-args.n_max, args.n_max + 1) if n != 1]
    for n in window:
        for c in "AB":
            assert distance(*final_slopes(n, c)) == 5
        assert sorted(toroidal_slope_set(n)[1].values()) == [3, 4, 5]
    print(f"distance checks pass for {len(window)} values of n")
    for b in args.bounds:
        for c in "AB":
            ns = reached(c, b)
            missing = [n for n in window if n not in ns]
            print(f"case {c} |p|,|q| <= {b}: missing n = {missing}")


if __name__ == "__main__":
    main()
