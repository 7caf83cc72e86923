"""List every (n, d) where generalized binary splitting exceeds ceil(log2 C(n,d)) + d - 1 tests.

For each such point the counting minimum ceil(log2 sum_{i<=d} C(n,i)) is shown:
when it is above the target, no correct strategy can meet the target.
"""

import argparse

from gtyes import adaptive as ad
from gtyes.harness import counting_minimum, hwang_target


def main():
    ap = argparse.ArgumentParser(description="generalized binary splitting against its test target")
    ap.add_argument("--max-n", type=int, default=16)
    ap.add_argument("--max-d", type=int, default=3)
    a = ap.parse_args()
    print(f"{'n':>3} {'d':>2} {'target':>6} {'used':>4} {'counting':>8}  forced")
    for n in range(1, a.max_n + 1):
        for d in range(1, min(a.max_d, n) + 1):
            m = ad.measure_max_yes(ad.Strategy("hwang", d), n, d)
            assert m.correct
            target = hwang_target(n, d)
            if m.max_tests > target:
                cm = counting_minimum(n, d)
                print(f"{n:3d} {d:2d} {target:6d} {m.max_tests:4d} {cm:8d}  {'yes' if cm > target else 'NO'}")


if __name__ == "__main__":
    main()
