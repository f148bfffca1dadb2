"""Distance between the nullvector of M + eps U and its large-eps limit.

For random M the distance should fall like 1/eps; the last column is the
decrease factor from the previous decade.

    python scripts/nullvector_limit.py [--trials 5] [--seed 0]
"""

import argparse
import random

import mpmath
from mpmath import mpc, mpf

from barypade.adversary import nullvector_limit_probe
from barypade.linalg import Matrix
from barypade.numkernel import Precision
from barypade.pade import NodeLevel


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--trials", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--prec", type=int, default=256)
    args = ap.parse_args()
    ctx = Precision(args.prec)
    rng = random.Random(args.seed)
    eps_list = [10**e for e in range(1, 8)]

    for trial in range(args.trials):
        n = rng.randint(1, 6)
        with ctx.scope():
            rot = rng.random()
            level = NodeLevel(tuple(mpmath.expjpi(2 * (m + mpf(rot)) / (n + 1)) for m in range(n + 1)))
            alpha = mpf(rng.uniform(1.5, 3)) * mpmath.expjpi(mpf(rng.uniform(0, 2)))
            m = Matrix.from_rows([[mpc(rng.gauss(0, 1), rng.gauss(0, 1)) for _ in range(n + 1)] for _ in range(n)])
        print(f"trial {trial}: n = {n}, alpha = {mpmath.nstr(alpha, 4)}")
        prev = None
        for row in nullvector_limit_probe(level, alpha, m, eps_list, ctx):
            if row.distance is None:
                print(f"  eps = {mpmath.nstr(row.eps, 2):>8}  {row.error}")
                prev = None
                continue
            ratio = "" if prev is None else mpmath.nstr(prev / row.distance, 4)
            print(f"  eps = {mpmath.nstr(row.eps, 2):>8}  distance = {mpmath.nstr(row.distance, 4):>10}  {ratio}")
            prev = row.distance


if __name__ == "__main__":
    main()
