"""Compare the threshold solver with the exhaustive oracle and time both."""

import argparse
import random
import time

from idmeasure import transport
from idmeasure.propsuite import GenConfig, gen_measure, gen_space


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--instances", type=int, default=500)
    args = ap.parse_args()

    rng = random.Random(args.seed)
    t_solver = t_oracle = 0.0
    mismatches = 0
    for _ in range(args.instances):
        cfg = GenConfig(space_size=rng.randint(2, 4), space_model=rng.choice(["grid", "graph"]), max_support=3)
        sp = gen_space(cfg, rng)
        a, b = gen_measure(cfg, sp, rng), gen_measure(cfg, sp, rng)
        t0 = time.perf_counter()
        d = transport.distance(a, b).value
        t1 = time.perf_counter()
        o = transport.oracle_distance(a, b)
        t2 = time.perf_counter()
        t_solver += t1 - t0
        t_oracle += t2 - t1
        mismatches += d != o
    print(f"instances {args.instances}  mismatches {mismatches}")
    print(f"solver {1e6 * t_solver / args.instances:.1f} us/instance, oracle {1e6 * t_oracle / args.instances:.1f} us/instance")


if __name__ == "__main__":
    main()
