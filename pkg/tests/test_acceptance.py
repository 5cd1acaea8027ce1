"""Exit criteria: exact checks at the stated sample sizes and time limits.

Each test records one PASS/FAIL line, printed in the terminal summary.
"""

import itertools
import random
import time
from fractions import Fraction

import pytest

from idmeasure import transport
from idmeasure.maxplus import diameter
from idmeasure.measures import dirac, pushforward
from idmeasure.propsuite import GenConfig, gen_measure, gen_space, gen_tower, lipschitz_map, random_coupling, run_suite
from idmeasure.tower import (
    LimitPoint,
    TowerMetric,
    d_plus,
    eta,
    eta_nm,
    fmap,
    p7_check,
    point,
    psi,
    psi_mn,
    q_embed,
    theta,
    to_measure,
)

pytestmark = pytest.mark.acceptance

RESULTS: list[str] = []


def rng_for(criterion, case):
    return random.Random(f"acceptance:{criterion}:{case}")


def cfg_for(rng, max_size, **kw):
    return GenConfig(
        seed=0,
        space_size=rng.randint(2, max_size),
        space_model=rng.choice(["grid", "graph"]),
        **kw,
    )


class Criterion:
    def __init__(self, number, title, limit):
        self.number, self.title, self.limit = number, title, limit
        self.failures = []

    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def fail(self, message):
        self.failures.append(message)

    def __exit__(self, exc_type, exc, tb):
        elapsed = time.perf_counter() - self.start
        if exc_type is not None:
            self.failures.append(f"{exc_type.__name__}: {exc}")
        ok = not self.failures and elapsed < self.limit
        RESULTS.append(
            f"[{'PASS' if ok else 'FAIL'}] criterion {self.number:>2}: {self.title} "
            f"({elapsed:.2f}s / limit {self.limit}s, {len(self.failures)} failures)"
        )
        assert not self.failures, self.failures[:5]
        assert elapsed < self.limit, f"took {elapsed:.2f}s, limit {self.limit}s"
        return False


def test_01_dirac_isometry():
    with Criterion(1, "Dirac isometry on 20 spaces", 5) as c:
        for case in range(20):
            rng = rng_for(1, case)
            sp = gen_space(cfg_for(rng, 8), rng)
            for i, j in itertools.product(range(len(sp)), repeat=2):
                got = transport.distance(dirac(sp, sp.labels[i]), dirac(sp, sp.labels[j])).value
                if got != sp.d(i, j):
                    c.fail(f"case {case}: ({i},{j}) gives {got}, expected {sp.d(i, j)}")


def test_02_metric_axioms():
    with Criterion(2, "metric axioms on 500 triples", 60) as c:
        d = transport.distance_value
        for case in range(500):
            rng = rng_for(2, case)
            cfg = cfg_for(rng, 6, max_support=rng.randint(1, 4))
            sp = gen_space(cfg, rng)
            a, b, m = (gen_measure(cfg, sp, rng) for _ in range(3))
            if d(a, a) != 0 or (d(a, b) == 0) != (a == b):
                c.fail(f"case {case}: identity of indiscernibles")
            if d(a, b) != d(b, a):
                c.fail(f"case {case}: symmetry")
            if d(a, m) > d(a, b) + d(b, m):
                c.fail(f"case {case}: triangle")


def test_03_solver_equals_oracle():
    with Criterion(3, "solver = oracle on 200 instances", 60) as c:
        for case in range(200):
            rng = rng_for(3, case)
            cfg = cfg_for(rng, 4, max_support=3)
            sp = gen_space(cfg, rng)
            a, b = gen_measure(cfg, sp, rng), gen_measure(cfg, sp, rng)
            got, want = transport.distance(a, b).value, transport.oracle_distance(a, b)
            if got != want:
                c.fail(f"case {case}: solver {got}, oracle {want}")


def test_04_diameter():
    with Criterion(4, "diameter bound and attainment", 5) as c:
        for case in range(20):
            rng = rng_for(4, case)
            cfg = cfg_for(rng, 8)
            sp = gen_space(cfg, rng)
            diam = diameter(sp)
            for _ in range(10):
                a, b = gen_measure(cfg, sp, rng), gen_measure(cfg, sp, rng)
                if transport.distance_value(a, b) > diam:
                    c.fail(f"case {case}: distance above diameter")
            diracs = transport.all_diracs(sp)
            if not any(transport.distance_value(p, q) == diam for p in diracs for q in diracs):
                c.fail(f"case {case}: no Dirac pair attains the diameter")


def test_05_formula_equivalence():
    with Criterion(5, "coupling formula = support max on 500 couplings", 10) as c:
        for case in range(500):
            rng = rng_for(5, case)
            cfg = cfg_for(rng, 6, max_support=3)
            sp = gen_space(cfg, rng)
            xi = random_coupling(cfg, rng, sp)
            if not transport.is_admissible(xi):
                c.fail(f"case {case}: sampled coupling not admissible")
            elif transport.eval_formula1(xi) != transport.support_max(xi):
                c.fail(f"case {case}: {transport.eval_formula1(xi)} != {transport.support_max(xi)}")


def test_06_pushforward_modulus():
    with Criterion(6, "1-Lipschitz pushforward on 100 maps", 30) as c:
        for case in range(100):
            rng = rng_for(6, case)
            cfg = cfg_for(rng, 6, max_support=3)
            sp = gen_space(cfg, rng)
            f, target = lipschitz_map(cfg, rng, sp, rng.randint(2, 6))
            for i, j in itertools.combinations(range(len(sp)), 2):
                assert target.d(f[i], f[j]) <= sp.d(i, j)
            a, b = gen_measure(cfg, sp, rng), gen_measure(cfg, sp, rng)
            cert = transport.distance(a, b)
            pushed = transport.distance_value(pushforward(f, a, target), pushforward(f, b, target))
            bound = max(target.d(f[i], f[j]) for i, j in cert.witness.support())
            if pushed > cert.value:
                c.fail(f"case {case}: {pushed} > {cert.value}")
            if pushed > bound:
                c.fail(f"case {case}: witness bound {bound} violated by {pushed}")


def test_07_p5_non_expansion():
    with Criterion(7, "flattening is non-expanding at levels 2 and 3", 60) as c:
        for level in (2, 3):
            for case in range(200):
                rng = rng_for(f"7.{level}", case)
                cfg = cfg_for(rng, 5, branching=3, max_support=3)
                sp = gen_space(cfg, rng)
                a, b = gen_tower(cfg, sp, rng, level), gen_tower(cfg, sp, rng, level)
                rho = TowerMetric(sp)
                if rho(psi(a), psi(b)) > rho(a, b):
                    c.fail(f"level {level} case {case}: {rho(psi(a), psi(b))} > {rho(a, b)}")


def test_08_p6_and_generalization():
    with Criterion(8, "P6 and its generalization, levels up to 4", 120) as c:
        for case in range(200):
            rng = rng_for("8.a", case)
            cfg = cfg_for(rng, 5, branching=3)
            sp = gen_space(cfg, rng)
            N = gen_tower(cfg, sp, rng, 2)
            x = point(rng.randrange(len(sp)))
            rho = TowerMetric(sp)
            if rho(psi(N), eta(x)) != rho(N, eta_nm(x, 2)):
                c.fail(f"P6 case {case}")
        for case in range(200):
            rng = rng_for("8.b", case)
            cfg = cfg_for(rng, 5, branching=rng.randint(1, 3), max_support=3)
            sp = gen_space(cfg, rng)
            m = rng.randint(2, 4)
            n = rng.randint(0, m - 2)
            a, x = gen_tower(cfg, sp, rng, m), gen_tower(cfg, sp, rng, n)
            rho = TowerMetric(sp)
            if rho(psi_mn(a, n + 1), eta(x)) != rho(a, eta_nm(x, m)):
                c.fail(f"general case {case} (m={m}, n={n})")


def test_09_monad_laws():
    with Criterion(9, "unit and associativity laws on 200 elements", 30) as c:
        for case in range(200):
            rng = rng_for(9, case)
            cfg = cfg_for(rng, 5, branching=3)
            sp = gen_space(cfg, rng)
            e = gen_tower(cfg, sp, rng, rng.choice([2, 3]))
            if psi(eta(e)) != e or psi(fmap(eta, e)) != e:
                c.fail(f"case {case}: unit law")
            a = gen_tower(cfg, sp, rng, 3)
            if psi(psi(a)) != psi(fmap(psi, a)):
                c.fail(f"case {case}: associativity")


def test_10_p7():
    with Criterion(10, "P7 chain (i = 1, 2, 3) and set variant on 100 measures", 120) as c:
        done = attempt = 0
        while done < 100:
            rng = rng_for(10, attempt)
            attempt += 1
            cfg = cfg_for(rng, 6, max_support=4)
            sp = gen_space(cfg, rng)
            mu = gen_measure(cfg, sp, rng)
            rho = TowerMetric(sp)
            first = p7_check(mu, 1, rho)
            if first.epsilon <= 0:
                continue
            done += 1
            if not first.set_holds:
                c.fail(f"attempt {attempt}: set variant {first.set_distance} < {first.epsilon}")
            if len(sp) <= 4:
                kids = [to_measure(sp, ch) for _, ch in q_embed(mu, 2).children]
                brute, _ = transport.chebyshev_bruteforce(kids)
                if brute != first.set_distance:
                    c.fail(f"attempt {attempt}: chebyshev {first.set_distance} != brute force {brute}")
            for i in (1, 2, 3):
                res = first if i == 1 else p7_check(mu, i, rho)
                if not res.lhs >= res.epsilon:
                    c.fail(f"attempt {attempt}, i={i}: {res.lhs} < {res.epsilon}")


def test_11_embedding_isometry_and_dplus():
    with Criterion(11, "embedding isometry and level-independent d_plus", 60) as c:
        for case in range(200):
            rng = rng_for(11, case)
            cfg = cfg_for(rng, 5, branching=3)
            sp = gen_space(cfg, rng)
            n = rng.randint(0, 3)
            a, b = gen_tower(cfg, sp, rng, n), gen_tower(cfg, sp, rng, n)
            rho = TowerMetric(sp)
            base = rho(a, b)
            for m in range(max(n, 1), 4):
                if rho(eta_nm(a, m), eta_nm(b, m)) != base:
                    c.fail(f"case {case}: level {n} -> {m}")
            p = LimitPoint(gen_tower(cfg, sp, rng, rng.randint(0, 3)))
            q = LimitPoint(gen_tower(cfg, sp, rng, rng.randint(0, 3)))
            low = max(p.level, q.level, 1)
            values = {d_plus(sp, p, q, rho, level=k) for k in range(low, 5)}
            if len(values) != 1:
                c.fail(f"case {case}: d_plus takes values {sorted(values)}")


def test_12_theta():
    with Criterion(12, "projections: non-expansion, consistency, identity", 60) as c:
        for case in range(200):
            rng = rng_for(12, case)
            cfg = cfg_for(rng, 5, branching=3)
            sp = gen_space(cfg, rng)
            p = LimitPoint(gen_tower(cfg, sp, rng, rng.randint(0, 4)))
            q = LimitPoint(gen_tower(cfg, sp, rng, rng.randint(0, 4)))
            rho = TowerMetric(sp)
            dp = d_plus(sp, p, q, rho)
            top = max(p.level, q.level, 2)
            for n in range(1, top + 1):
                if rho(theta(p, n), theta(q, n)) > dp:
                    c.fail(f"case {case}: theta_{n} expands")
            for n2 in range(2, top + 1):
                for n1 in range(1, n2):
                    if theta(p, n1) != psi_mn(theta(p, n2), n1):
                        c.fail(f"case {case}: theta_{n1} != psi . theta_{n2}")
            for n in range(max(p.level, 1), top + 2):
                if d_plus(sp, LimitPoint(theta(p, n)), p, rho) != 0:
                    c.fail(f"case {case}: projection to {n} is not the identity")


def test_13_chebyshev_bruteforce():
    with Criterion(13, "chebyshev = brute-force centers", 60) as c:
        for case in range(200):
            rng = rng_for(13, case)
            cfg = cfg_for(rng, 4, max_support=rng.randint(1, 3), weight_denominator_bound=2)
            sp = gen_space(cfg, rng)
            fam = [gen_measure(cfg, sp, rng) for _ in range(rng.randint(1, 3))]
            r, center = transport.chebyshev(fam)
            rb, _ = transport.chebyshev_bruteforce(fam)
            if r != rb or max(transport.distance_value(m, center) for m in fam) != r:
                c.fail(f"case {case}: {r} vs brute force {rb}")


def test_14_full_suite_defaults():
    with Criterion(14, "full verification suite at defaults", 300) as c:
        report = run_suite(GenConfig())
        for r in report.results:
            for f in r.failures:
                c.fail(f"{r.name}: {f.message}")
