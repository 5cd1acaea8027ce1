"""Tabulate the P7 quantities for random measures.

Columns: distance to the Dirac set, the lifted distances for i = 1..4, and the
point-to-set variant at level 2.
"""

import argparse
import random

from idmeasure.maxplus import format_scalar as fs
from idmeasure.propsuite import GenConfig, gen_measure, gen_space
from idmeasure.tower import TowerMetric, p7_check


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--samples", type=int, default=15)
    ap.add_argument("--size", type=int, default=6)
    ap.add_argument("--model", choices=("graph", "grid"), default="grid")
    args = ap.parse_args()

    cfg = GenConfig(seed=args.seed, space_size=args.size, max_support=4, space_model=args.model)
    rng = random.Random(args.seed)
    sp = gen_space(cfg, rng)
    rho = TowerMetric(sp)
    print(f"{'support':<22} {'eps':>5} {'set':>5} " + " ".join(f"{'i=' + str(i):>5}" for i in range(1, 5)))
    for _ in range(args.samples):
        mu = gen_measure(cfg, sp, rng)
        rows = [p7_check(mu, i, rho) for i in range(1, 5)]
        supp = ",".join(f"{sp.labels[i]}:{fs(w)}" for i, w in mu.weights().items())
        lifted = " ".join(f"{fs(r.lhs):>5}" for r in rows)
        flag = "" if all(r.holds for r in rows) and rows[0].set_holds else "  VIOLATION"
        print(f"{supp:<22} {fs(rows[0].epsilon):>5} {fs(rows[0].set_distance):>5} {lifted}{flag}")


if __name__ == "__main__":
    main()
