"""Distance from a direct-limit point to its level-n projections.

For each sampled point p at level m the script prints
d_plus(theta_n(p), p) for n = 1 .. m + 1.  From n = m on the value is 0;
below m it is a diagnostic only.
"""

import argparse
import random

from idmeasure.propsuite import GenConfig, gen_space, gen_tower
from idmeasure.tower import LimitPoint, TowerMetric, d_plus, theta


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--samples", type=int, default=10)
    ap.add_argument("--level", type=int, default=4)
    ap.add_argument("--size", type=int, default=5)
    args = ap.parse_args()

    cfg = GenConfig(seed=args.seed, space_size=args.size, tower_level=args.level, branching=3)
    rng = random.Random(args.seed)
    sp = gen_space(cfg, rng)
    rho = TowerMetric(sp)
    print("sample  level  d_plus(theta_n p, p) for n = 1, 2, ...")
    for k in range(args.samples):
        p = LimitPoint(gen_tower(cfg, sp, rng))
        seq = [d_plus(sp, LimitPoint(theta(p, n)), p, rho) for n in range(1, max(p.level, 1) + 2)]
        monotone = all(a >= b for a, b in zip(seq, seq[1:]))
        print(f"{k:>6}  {p.level:>5}  {' '.join(str(v) for v in seq)}{'' if monotone else '   (not monotone)'}")


if __name__ == "__main__":
    main()
