"""Iterated measures: the tower X, I(X), I(I(X)), ... and its direct limit.

A level-0 element is a point index of the base space.  A level-n element is a
normalized finite list of ``(weight, child)`` pairs with children of level
n-1.  Elements are kept canonical (children distinct and sorted, no -inf
weights), so ``==`` is equality of measures.

Distances at level n are bottleneck distances over the finite metric space
spanned by the children of the two elements, whose own distances come from
level n-1.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

from .maxplus import NEG_INF, FiniteMetricSpace, scalar
from .measures import EmptySupport, IdempotentMeasure, NotNormalized, SpaceMismatch
from . import transport

_ZERO = Fraction(0)


class TowerError(ValueError):
    pass


class LevelTooLow(TowerError):
    pass


class LevelMismatch(TowerError):
    pass


class InvalidLevel(TowerError):
    pass


class TowerElement:
    """Immutable, hashable, canonical element of some tower level."""

    __slots__ = ("level", "point", "children", "key", "_hash")

    def __init__(self, level: int, point: int | None, children: tuple):
        self.level = level
        self.point = point
        self.children = children
        if level == 0:
            self.key = (0, point)
        else:
            self.key = (level, tuple((c.key, w) for w, c in children))
        self._hash = hash(self.key)

    def __hash__(self):
        return self._hash

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, TowerElement):
            return NotImplemented
        return self._hash == other._hash and self.key == other.key

    def __lt__(self, other):
        return self.key < other.key

    def __repr__(self):
        if self.level == 0:
            return f"pt({self.point})"
        inner = ", ".join(f"{w}:{c!r}" for w, c in self.children)
        return f"L{self.level}[{inner}]"


def point(i: int) -> TowerElement:
    return TowerElement(0, i, ())


def element(pairs: Iterable[tuple]) -> TowerElement:
    """Canonical element from ``(weight, child)`` pairs.

    -inf weights are dropped, equal children merged with max, and the result
    must be normalized.
    """
    merged: dict[TowerElement, Fraction] = {}
    level = None
    for w, c in pairs:
        w = scalar(w)
        if level is None:
            level = c.level
        elif c.level != level:
            raise LevelMismatch(f"children at levels {level} and {c.level}")
        if w is NEG_INF:
            continue
        if w > 0:
            raise NotNormalized(f"weight {w} exceeds 0")
        if c not in merged or w > merged[c]:
            merged[c] = w
    if not merged:
        raise EmptySupport("an element needs at least one finite weight")
    if max(merged.values()) != 0:
        raise NotNormalized(f"max weight is {max(merged.values())}, expected 0")
    children = tuple(sorted(((w, c) for c, w in merged.items()), key=lambda wc: wc[1].key))
    return TowerElement(level + 1, None, children)


def from_measure(mu: IdempotentMeasure) -> TowerElement:
    return element((w, point(i)) for i, w in mu.weights().items())


def to_measure(space: FiniteMetricSpace, e: TowerElement) -> IdempotentMeasure:
    if e.level != 1:
        raise LevelMismatch(f"expected a level-1 element, found level {e.level}")
    density = [NEG_INF] * len(space)
    for w, c in e.children:
        if c.point >= len(space):
            raise SpaceMismatch(f"point index {c.point} outside a space of {len(space)} points")
        density[c.point] = w
    return IdempotentMeasure(space, tuple(density))


def is_canonical(e: TowerElement) -> bool:
    if e.level == 0:
        return e.point is not None and not e.children
    if not e.children:
        return False
    ws = [w for w, _ in e.children]
    cs = [c for _, c in e.children]
    return (
        all(w is not NEG_INF and w <= 0 for w in ws)
        and max(ws) == 0
        and all(c.level == e.level - 1 for c in cs)
        and all(a.key < b.key for a, b in zip(cs, cs[1:]))
        and all(is_canonical(c) for c in cs)
    )


# --------------------------------------------------------------------------
# monad structure


def eta(e: TowerElement) -> TowerElement:
    return TowerElement(e.level + 1, None, ((_ZERO, e),))


def eta_nm(e: TowerElement, m: int) -> TowerElement:
    if m < e.level:
        raise LevelTooLow(f"cannot embed a level-{e.level} element into level {m}")
    for _ in range(m - e.level):
        e = eta(e)
    return e


def psi(e: TowerElement) -> TowerElement:
    """Flatten one layer: the weight of a grandchild is the best total route."""
    if e.level < 2:
        raise LevelTooLow(f"flattening needs level >= 2, found level {e.level}")
    best: dict[TowerElement, Fraction] = {}
    for beta, inner in e.children:
        for lam, c in inner.children:
            w = beta + lam
            if c not in best or w > best[c]:
                best[c] = w
    return element((w, c) for c, w in best.items())


def psi_mn(e: TowerElement, n: int) -> TowerElement:
    if n < 1:
        raise LevelTooLow(
            f"cannot flatten a level-{e.level} element to level {n}: flattening never reaches level 0"
        )
    if n > e.level:
        raise LevelTooLow(f"cannot flatten a level-{e.level} element up to level {n}")
    for _ in range(e.level - n):
        e = psi(e)
    return e


def fmap(f, e: TowerElement) -> TowerElement:
    """Push ``e`` forward along a map on its children."""
    if e.level < 1:
        raise LevelTooLow("only measures can be pushed forward")
    return element((w, f(c)) for w, c in e.children)


def q_embed(mu: IdempotentMeasure | TowerElement, m: int) -> TowerElement:
    """Push a level-1 measure forward along ``x -> eta_nm(x, m - 1)``."""
    if m < 1:
        raise InvalidLevel("q_embed targets level >= 1")
    e = from_measure(mu) if isinstance(mu, IdempotentMeasure) else mu
    if e.level != 1:
        raise LevelMismatch(f"expected a level-1 element, found level {e.level}")
    return fmap(lambda c: eta_nm(c, m - 1), e)


# --------------------------------------------------------------------------
# metrics


class TowerMetric:
    """Distances on every tower level over one base space, memoized.

    The cache holds only exact values, so sharing one instance across many
    queries is safe.
    """

    def __init__(self, space: FiniteMetricSpace):
        self.space = space
        self._cache: dict[tuple, Fraction] = {}

    def __call__(self, a: TowerElement, b: TowerElement) -> Fraction:
        return self.distance(a, b)

    def distance(self, a: TowerElement, b: TowerElement) -> Fraction:
        if a.level != b.level:
            raise LevelMismatch(f"levels {a.level} and {b.level} differ")
        if a.level == 0:
            k = len(self.space)
            if not (0 <= a.point < k and 0 <= b.point < k):
                raise SpaceMismatch(f"point index outside a space of {k} points")
            return self.space.dist[a.point][b.point]
        if a == b:
            return _ZERO
        key = (a, b) if a.key < b.key else (b, a)
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        value = transport.distance_value(*self._as_measures(a, b))
        self._cache[key] = value
        return value

    def _as_measures(self, a: TowerElement, b: TowerElement):
        """Both elements as measures on the span of their children."""
        pts = sorted({c for _, c in a.children} | {c for _, c in b.children})
        if a.level == 1:
            # children are base points; reuse the base metric directly
            sub = [[self.space.dist[p.point][q.point] for q in pts] for p in pts]
        else:
            sub = [[self.distance(p, q) for q in pts] for p in pts]
        span = FiniteMetricSpace(tuple(range(len(pts))), tuple(tuple(r) for r in sub))
        pos = {c: k for k, c in enumerate(pts)}

        def measure(e):
            dens = [NEG_INF] * len(pts)
            for w, c in e.children:
                dens[pos[c]] = w
            return IdempotentMeasure(span, tuple(dens))

        return measure(a), measure(b)


def level_distance(space: FiniteMetricSpace, a: TowerElement, b: TowerElement, metric: TowerMetric | None = None) -> Fraction:
    return (metric or TowerMetric(space)).distance(a, b)


def dirac_set_distance(space: FiniteMetricSpace, M: TowerElement, metric: TowerMetric | None = None):
    """Distance from a level-2 element to the image of I(X) under the unit.

    Coupling with a level-2 Dirac is forced, so this is the Chebyshev radius of
    the children of ``M`` in ``(I(X), rho_1)``.  Returns ``(radius, center)``.
    """
    if M.level != 2:
        raise LevelMismatch(f"expected a level-2 element, found level {M.level}")
    return transport.chebyshev([to_measure(space, c) for _, c in M.children])


# --------------------------------------------------------------------------
# direct limit


@dataclass(frozen=True)
class LimitPoint:
    """A point of the union of all levels, stored at its lowest level."""

    rep: TowerElement

    def __post_init__(self):
        object.__setattr__(self, "rep", strip(self.rep))

    @property
    def level(self) -> int:
        return self.rep.level


def strip(e: TowerElement) -> TowerElement:
    """Remove Dirac wrappers: the minimal representative under the embeddings."""
    while e.level >= 1 and len(e.children) == 1:
        e = e.children[0][1]
    return e


def d_plus(space: FiniteMetricSpace, p: LimitPoint, q: LimitPoint, metric: TowerMetric | None = None, level: int | None = None) -> Fraction:
    """Direct-limit distance; ``level`` picks the common level (default lowest)."""
    lowest = max(p.level, q.level, 1)
    n = lowest if level is None else level
    if n < lowest:
        raise InvalidLevel(f"common level {n} is below {lowest}")
    return level_distance(space, eta_nm(p.rep, n), eta_nm(q.rep, n), metric)


def theta(p: LimitPoint, n: int) -> TowerElement:
    """Projection of a direct-limit point to level ``n``."""
    if n < 1:
        raise InvalidLevel("projections are defined for levels >= 1")
    if p.level <= n:
        return eta_nm(p.rep, n)
    return psi_mn(p.rep, n)


# --------------------------------------------------------------------------
# the P7 condition


@dataclass(frozen=True)
class P7Result:
    epsilon: Fraction
    lhs: Fraction
    holds: bool
    set_distance: Fraction | None = None
    set_holds: bool | None = None


def p7_check(mu: IdempotentMeasure, i: int, metric: TowerMetric | None = None) -> P7Result:
    """Compare the distance from ``mu`` to the Diracs with its lifted version.

    ``lhs`` is the distance between ``q_embed(mu, i+1)`` and
    ``eta(q_embed(mu, i))``.  At ``i == 1`` the point-to-set variant (distance
    from ``q_embed(mu, 2)`` to all level-2 Diracs) is reported too.
    """
    if i < 1:
        raise InvalidLevel("P7 is indexed from i = 1")
    space = mu.space
    metric = metric or TowerMetric(space)
    eps = min(transport.dirac_distance(mu, x) for x in space.labels)
    lhs = metric.distance(q_embed(mu, i + 1), eta(q_embed(mu, i)))
    res = P7Result(eps, lhs, lhs >= eps)
    if i == 1:
        sd, _ = dirac_set_distance(space, q_embed(mu, 2), metric)
        res = P7Result(eps, lhs, lhs >= eps, sd, sd >= eps)
    return res
