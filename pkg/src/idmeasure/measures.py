"""Idempotent probability measures on a finite metric space.

A measure is stored as its density: one max-plus scalar per point, with
maximum exactly 0.  Evaluating it on a test function ``phi`` gives
``max_i (density[i] + phi[i])``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Sequence

from .maxplus import NEG_INF, FiniteMetricSpace, MaxPlus, UnknownPoint, diameter, scalar


class MeasureError(ValueError):
    pass


class NotNormalized(MeasureError):
    pass


class EmptySupport(MeasureError):
    pass


class SpaceMismatch(MeasureError):
    pass


class PartialMap(MeasureError):
    pass


@dataclass(frozen=True)
class IdempotentMeasure:
    space: FiniteMetricSpace
    density: tuple

    def __post_init__(self):
        if len(self.density) != len(self.space):
            raise SpaceMismatch(
                f"density has {len(self.density)} entries, space has {len(self.space)} points"
            )
        top = max(self.density, default=NEG_INF)
        if top is NEG_INF:
            raise EmptySupport("every weight is -inf")
        if top != 0:
            raise NotNormalized(f"max weight is {top}, expected 0")

    def __getitem__(self, label) -> MaxPlus:
        return self.density[self.space.index(label)]

    def support_indices(self) -> tuple[int, ...]:
        return tuple(i for i, w in enumerate(self.density) if w is not NEG_INF)

    def weights(self) -> dict[int, Fraction]:
        """Finite part of the density, keyed by point index."""
        return {i: w for i, w in enumerate(self.density) if w is not NEG_INF}

    def __repr__(self):
        body = ", ".join(
            f"{lab}:{w}" for lab, w in zip(self.space.labels, self.density) if w is not NEG_INF
        )
        return f"IdempotentMeasure({{{body}}})"


def from_density(space: FiniteMetricSpace, density: Sequence) -> IdempotentMeasure:
    return IdempotentMeasure(space, tuple(scalar(w) for w in density))


def make_measure(space: FiniteMetricSpace, pairs: Iterable[tuple]) -> IdempotentMeasure:
    """Build a measure from ``(label, weight)`` pairs.

    Unlisted points get -inf; repeated labels are combined with max.
    """
    density = [NEG_INF] * len(space)
    for label, w in pairs:
        i = space.index(label)
        w = scalar(w)
        if w > density[i]:
            density[i] = w
    return IdempotentMeasure(space, tuple(density))


def evaluate(mu: IdempotentMeasure, phi: Sequence) -> MaxPlus:
    if len(phi) != len(mu.space):
        raise SpaceMismatch(f"test function has {len(phi)} values, space has {len(mu.space)} points")
    best = NEG_INF
    for w, v in zip(mu.density, phi):
        if w is NEG_INF:
            continue
        s = w + scalar(v)
        if s > best:
            best = s
    return best


def support(mu: IdempotentMeasure) -> frozenset:
    return frozenset(mu.space.labels[i] for i in mu.support_indices())


def dirac(space: FiniteMetricSpace, x) -> IdempotentMeasure:
    i = space.index(x)
    density = [NEG_INF] * len(space)
    density[i] = Fraction(0)
    return IdempotentMeasure(space, tuple(density))


def _as_index_map(f, source: FiniteMetricSpace, target: FiniteMetricSpace) -> list[int]:
    if isinstance(f, Mapping):
        out = []
        for lab in source.labels:
            if lab not in f:
                raise PartialMap(f"map is undefined at {lab!r}")
            try:
                out.append(target.index(f[lab]))
            except UnknownPoint:
                raise PartialMap(f"{lab!r} maps to {f[lab]!r}, which is not a target point") from None
        return out
    if callable(f):
        return _as_index_map({lab: f(lab) for lab in source.labels}, source, target)
    out = list(f)
    if len(out) != len(source):
        raise PartialMap(f"index map has {len(out)} entries for {len(source)} points")
    for k in out:
        if not (isinstance(k, int) and 0 <= k < len(target)):
            raise PartialMap(f"index {k!r} is not a target point")
    return out


def pushforward(f, mu: IdempotentMeasure, target: FiniteMetricSpace) -> IdempotentMeasure:
    """Image measure of ``mu`` under ``f``.

    ``f`` may be a label->label mapping, a callable on labels, or a sequence of
    target indices.  The image density at ``y`` is the max of the weights over
    the preimage of ``y``.
    """
    idx = _as_index_map(f, mu.space, target)
    density = [NEG_INF] * len(target)
    for i, w in enumerate(mu.density):
        if w > density[idx[i]]:
            density[idx[i]] = w
    return IdempotentMeasure(target, tuple(density))


def indicator_depth(mu: IdempotentMeasure) -> Fraction:
    """A finite stand-in for -inf that no finite weight can reach."""
    finite = [abs(w) for w in mu.density if w is not NEG_INF]
    return max(finite) + diameter(mu.space) + 1


def reconstruct(space: FiniteMetricSpace, functional: Callable[[Sequence], MaxPlus], depth: Fraction) -> IdempotentMeasure:
    """Recover a density from a measure known only as a functional.

    ``depth`` must exceed every finite weight magnitude (see
    :func:`indicator_depth`).
    """
    k = len(space)
    density = []
    for i in range(k):
        phi = [-depth] * k
        phi[i] = Fraction(0)
        v = functional(phi)
        density.append(NEG_INF if v <= -depth else v)
    return IdempotentMeasure(space, tuple(density))
