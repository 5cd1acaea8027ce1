"""Couplings and the bottleneck distance between idempotent measures.

The distance between two measures is the least ``t`` for which some coupling
has all of its support inside ``{(i, j): d(i, j) <= t}``.  Any coupling is
bounded entrywise by ``min(mu[i], nu[j])``, and that bound, restricted to the
allowed pairs, is itself a coupling exactly when each support point of either
measure sees a partner of at least its own weight within distance ``t``.
So feasibility is a dominance test and the distance is a search over the
finitely many distance values.
"""

from __future__ import annotations

import bisect
import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .maxplus import NEG_INF, FiniteMetricSpace, thresholds
from .measures import IdempotentMeasure, MeasureError, SpaceMismatch, dirac


class TransportError(ValueError):
    pass


class Infeasible(TransportError):
    pass


class NotAdmissible(TransportError):
    pass


class NegativeThreshold(TransportError):
    pass


class TooLarge(TransportError):
    pass


class OracleDisagreement(AssertionError):
    """The two independent routes inside an oracle gave different answers."""


@dataclass(frozen=True)
class Coupling:
    left: IdempotentMeasure
    right: IdempotentMeasure
    weights: tuple  # weights[i][j], a max-plus scalar per pair of points

    @property
    def space(self) -> FiniteMetricSpace:
        return self.left.space

    def support(self) -> list[tuple[int, int]]:
        return [
            (i, j)
            for i, row in enumerate(self.weights)
            for j, w in enumerate(row)
            if w is not NEG_INF
        ]

    @classmethod
    def from_weights(cls, space: FiniteMetricSpace, weights) -> "Coupling":
        """Wrap a raw weight matrix, taking its own marginals as the claimed pair."""
        weights = tuple(tuple(row) for row in weights)
        left, right = _marginal_measures(space, weights)
        return cls(left, right, weights)


@dataclass(frozen=True)
class DistanceCertificate:
    value: Fraction
    witness: Coupling


def _marginal_measures(space, weights):
    k = len(space)
    if len(weights) != k or any(len(row) != k for row in weights):
        raise SpaceMismatch(f"coupling matrix must be {k}x{k}")
    rows = tuple(max(row) for row in weights)
    cols = tuple(max(weights[i][j] for i in range(k)) for j in range(k))
    return IdempotentMeasure(space, rows), IdempotentMeasure(space, cols)


def marginals(xi: Coupling) -> tuple[IdempotentMeasure, IdempotentMeasure]:
    """Row-max and column-max measures recomputed from the weights."""
    return _marginal_measures(xi.space, xi.weights)


def is_admissible(xi: Coupling) -> bool:
    try:
        left, right = marginals(xi)
    except MeasureError:
        return False
    return left == xi.left and right == xi.right


def support_max(xi: Coupling) -> Fraction:
    D = xi.space.dist
    return max(D[i][j] for i, j in xi.support())


def _same_space(mu, nu):
    if mu.space != nu.space:
        raise SpaceMismatch("measures live on different spaces")


def product_coupling(mu: IdempotentMeasure, nu: IdempotentMeasure) -> Coupling:
    _same_space(mu, nu)
    weights = tuple(
        tuple(NEG_INF if (a is NEG_INF or b is NEG_INF) else a + b for b in nu.density)
        for a in mu.density
    )
    return Coupling(mu, nu, weights)


def _feasible(D, s1, s2, t) -> bool:
    for i, w in s1:
        if not any(D[i][j] <= t and v >= w for j, v in s2):
            return False
    for j, v in s2:
        if not any(D[i][j] <= t and w >= v for i, w in s1):
            return False
    return True


def feasible(mu: IdempotentMeasure, nu: IdempotentMeasure, t) -> bool:
    """Is there a coupling supported on pairs at distance at most ``t``?"""
    _same_space(mu, nu)
    t = Fraction(t)
    if t < 0:
        raise NegativeThreshold(f"threshold {t} is negative")
    return _feasible(mu.space.dist, list(mu.weights().items()), list(nu.weights().items()), t)


def _canonical_weights(mu, nu, t):
    D = mu.space.dist
    return tuple(
        tuple(
            NEG_INF if (a is NEG_INF or b is NEG_INF or D[i][j] > t) else min(a, b)
            for j, b in enumerate(nu.density)
        )
        for i, a in enumerate(mu.density)
    )


def canonical_coupling(mu: IdempotentMeasure, nu: IdempotentMeasure, t) -> Coupling:
    """The entrywise-largest coupling supported within distance ``t``."""
    if not feasible(mu, nu, t):
        raise Infeasible(f"no coupling is supported within distance {t}")
    return Coupling(mu, nu, _canonical_weights(mu, nu, Fraction(t)))


def distance_value(mu: IdempotentMeasure, nu: IdempotentMeasure) -> Fraction:
    """Bottleneck distance without building the witness."""
    _same_space(mu, nu)
    D = mu.space.dist
    s1 = list(mu.weights().items())
    s2 = list(nu.weights().items())
    # only distances between support points can be the answer
    cands = sorted({D[i][j] for i, _ in s1 for j, _ in s2})
    lo, hi = 0, len(cands) - 1
    while lo < hi:
        mid = (lo + hi) // 2
        if _feasible(D, s1, s2, cands[mid]):
            hi = mid
        else:
            lo = mid + 1
    return cands[lo]


def distance(mu: IdempotentMeasure, nu: IdempotentMeasure) -> DistanceCertificate:
    value = distance_value(mu, nu)
    return DistanceCertificate(value, Coupling(mu, nu, _canonical_weights(mu, nu, value)))


def check_certificate(cert: DistanceCertificate) -> bool:
    """Witness admissible, attains the value, and nothing smaller is feasible."""
    xi = cert.witness
    if not is_admissible(xi) or support_max(xi) != cert.value:
        return False
    ts = thresholds(xi.space)
    k = bisect.bisect_left(ts, cert.value)
    return k == 0 or not feasible(xi.left, xi.right, ts[k - 1])


def eval_formula1(xi: Coupling) -> Fraction:
    """Sup over the support of ``xi(rho) (+) d(x, y)``, with ``xi(rho)`` the
    max-plus integral of the distance against ``xi``."""
    if not is_admissible(xi):
        raise NotAdmissible("coupling marginals do not match its measures")
    D = xi.space.dist
    supp = xi.support()
    integral = max(xi.weights[i][j] + D[i][j] for i, j in supp)
    return max(max(integral, D[i][j]) for i, j in supp)


def dirac_distance(mu: IdempotentMeasure, x) -> Fraction:
    """Distance from ``mu`` to the Dirac measure at ``x`` (closed form)."""
    j = mu.space.index(x)
    D = mu.space.dist
    return max(D[i][j] for i in mu.support_indices())


def _check_family(measures):
    if not measures:
        raise TransportError("EmptyList: chebyshev needs at least one measure")
    space = measures[0].space
    for m in measures[1:]:
        if m.space != space:
            raise SpaceMismatch("measures live on different spaces")
    return space


def chebyshev(measures: Sequence[IdempotentMeasure]) -> tuple[Fraction, IdempotentMeasure]:
    """Smallest radius of a distance ball around one measure containing them all.

    For each candidate radius the largest admissible center is built pointwise;
    the radius is accepted iff that center reaches every support point.
    """
    space = _check_family(measures)
    D = space.dist
    k = len(space)
    supports = [list(m.weights().items()) for m in measures]
    for t in thresholds(space):
        center = []
        for j in range(k):
            v = None
            for s in supports:
                reach = max((w for i, w in s if D[i][j] <= t), default=NEG_INF)
                v = reach if v is None else min(v, reach)
            center.append(v)
        if all(
            any(D[i][j] <= t and center[j] >= w for j in range(k))
            for s in supports
            for i, w in s
        ):
            return t, IdempotentMeasure(space, tuple(center))
    raise AssertionError("the diameter is always an admissible radius")


# --------------------------------------------------------------------------
# independent oracles


def _min_restricted(mu, nu, pairs):
    k = len(mu.space)
    weights = [[NEG_INF] * k for _ in range(k)]
    for i, j in pairs:
        weights[i][j] = min(mu.density[i], nu.density[j])
    return weights


def _has_marginals(weights, mu, nu) -> bool:
    k = len(weights)
    return all(max(weights[i]) == mu.density[i] for i in range(k)) and all(
        max(weights[i][j] for i in range(k)) == nu.density[j] for j in range(k)
    )


def oracle_distance(mu: IdempotentMeasure, nu: IdempotentMeasure, max_pairs: int = 12) -> Fraction:
    """Distance by two routes that avoid the dominance shortcut.

    Route one scans every threshold and recomputes the marginals of the
    min-restricted coupling directly.  Route two enumerates every support
    pattern inside ``supp mu x supp nu``.  They must agree.
    """
    _same_space(mu, nu)
    D = mu.space.dist
    s1, s2 = mu.support_indices(), nu.support_indices()
    pairs = [(i, j) for i in s1 for j in s2]
    if len(pairs) > max_pairs:
        raise TooLarge(f"{len(pairs)} support pairs exceed the oracle limit of {max_pairs}")

    scan = None
    for t in thresholds(mu.space):
        allowed = [(i, j) for i, j in pairs if D[i][j] <= t]
        if _has_marginals(_min_restricted(mu, nu, allowed), mu, nu):
            scan = t
            break

    best = None
    for r in range(1, len(pairs) + 1):
        for pattern in itertools.combinations(pairs, r):
            cost = max(D[i][j] for i, j in pattern)
            if best is not None and cost >= best:
                continue
            if _has_marginals(_min_restricted(mu, nu, pattern), mu, nu):
                best = cost

    if scan != best:
        raise OracleDisagreement(f"threshold scan gave {scan}, pattern search gave {best}")
    return best


def chebyshev_bruteforce(measures: Sequence[IdempotentMeasure]) -> tuple[Fraction, IdempotentMeasure]:
    """Enumerate centers whose weights come from the family's own weights."""
    space = _check_family(measures)
    values = sorted({w for m in measures for w in m.density if w is not NEG_INF})
    values = [NEG_INF] + values
    best, arg = None, None
    for density in itertools.product(values, repeat=len(space)):
        if max(density) != 0:
            continue
        nu = IdempotentMeasure(space, density)
        r = max(distance_value(m, nu) for m in measures)
        if best is None or r < best:
            best, arg = r, nu
    return best, arg


def all_diracs(space: FiniteMetricSpace) -> list[IdempotentMeasure]:
    return [dirac(space, lab) for lab in space.labels]
