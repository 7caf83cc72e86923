"""Run the three default conformance sweeps and write CSV reports to a directory."""

import argparse
import os

from gtyes import harness as hs

SWEEPS = {
    "adaptive": hs.SweepSpec(kind="adaptive", n=list(range(4, 33, 4)), d=[1, 2, 3], t=[8, 16, 32], strategy="auto"),
    "hwang": hs.SweepSpec(kind="adaptive", n=list(range(2, 17)), d=[1, 2, 3], strategy="hwang"),
    "explicit": hs.SweepSpec(kind="explicit", d=[1, 2], q=[4, 5, 7, 8], m=[2, 3, 4, 6]),
    "random": hs.SweepSpec(kind="random", t=[8, 10, 12], n=[5, 8], d=[1], s=[4, 6], z=0.5, seed=1),
}


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out-dir", default="reports")
    ap.add_argument("--workers", type=int, default=1)
    a = ap.parse_args()
    os.makedirs(a.out_dir, exist_ok=True)
    for name, spec in SWEEPS.items():
        spec.workers = a.workers
        rows = hs.sweep(spec)
        path = os.path.join(a.out_dir, f"{name}.csv")
        hs.report(rows, "csv", path, kind=spec.kind)
        failed = sum(not r.passed for r in rows)
        errors = sum(r.error is not None for r in rows)
        findings = sum(len(r.findings) for r in rows)
        print(f"{name:9s} {len(rows):4d} rows, {failed} failed ({errors} errors), {findings} findings -> {path}")


if __name__ == "__main__":
    main()
