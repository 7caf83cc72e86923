"""Empirical failure fraction of the seeded sampler as the zero-probability z varies.

Usage: python3 scripts/explore_z.py [--t 12] [--s 6] [--d 1] [--p 1] [--n N] [--draws 200]
"""

import argparse
import math

from gtyes.bounds import BoundQuery, cff_pd_exists
from gtyes.designs import SamplerConfig, default_z, failure_bound, failure_fraction


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--t", type=int, default=12)
    ap.add_argument("--s", type=int, default=6)
    ap.add_argument("--d", type=int, default=1)
    ap.add_argument("--p", type=int, default=1)
    ap.add_argument("--n", type=int)
    ap.add_argument("--draws", type=int, default=200)
    ap.add_argument("--seed", type=int, default=0)
    a = ap.parse_args()
    exists = cff_pd_exists(BoundQuery(n=max(a.d, 2), d=a.d, t=a.t, p=a.p, s=a.s)).value
    n = a.n or math.floor(exists)
    print(f"t={a.t} s={a.s} d={a.d} p={a.p} n={n} (existence bound {exists:.3f})")
    print(f"failure bound P = {failure_bound(a.t, n, a.d, a.p, a.s):.4g}")
    zs = [default_z(a.t, a.d, a.p, a.s)] + [x / 20 for x in range(2, 20)]
    print(f"{'z':>14} {'failure':>8}")
    for z in zs:
        cfg = SamplerConfig(t=a.t, n=n, d=a.d, p=a.p, s=a.s, z=z, seed=a.seed)
        frac, _ = failure_fraction(cfg, a.draws)
        print(f"{z:14.10f} {frac:8.3f}")


if __name__ == "__main__":
    main()
