"""Exact max-plus scalars and validated finite metric spaces.

A max-plus scalar is either a :class:`fractions.Fraction` or the singleton
:data:`NEG_INF`.  ``NEG_INF`` takes part in Python's ordinary comparison and
addition protocols, so ``max`` and ``+`` already implement the semifield
operations; :func:`oplus` and :func:`odot` are the named spellings.
"""

from __future__ import annotations

import numbers
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence, Union


class _NegInf:
    """The bottom element of the max-plus semifield."""

    __slots__ = ()
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "NEG_INF"

    def __str__(self):
        return "-inf"

    def __reduce__(self):
        return (_NegInf, ())

    def __hash__(self):
        return hash("max-plus bottom")

    def __eq__(self, other):
        return other is self

    def __lt__(self, other):
        if other is self:
            return False
        if isinstance(other, numbers.Rational):
            return True
        return NotImplemented

    def __le__(self, other):
        if other is self or isinstance(other, numbers.Rational):
            return True
        return NotImplemented

    def __gt__(self, other):
        if other is self or isinstance(other, numbers.Rational):
            return False
        return NotImplemented

    def __ge__(self, other):
        if other is self:
            return True
        if isinstance(other, numbers.Rational):
            return False
        return NotImplemented

    def __add__(self, other):
        if other is self or isinstance(other, numbers.Rational):
            return self
        return NotImplemented

    __radd__ = __add__

    def __neg__(self):
        raise ArithmeticError("-inf has no additive inverse in the max-plus semifield")


NEG_INF = _NegInf()

MaxPlus = Union[Fraction, _NegInf]


def scalar(value) -> MaxPlus:
    """Coerce ints, Fractions, ``"p/q"`` strings and ``"-inf"`` to a scalar.

    Floats are refused: they would silently smuggle rounding into exact code.
    """
    if value is NEG_INF:
        return NEG_INF
    if isinstance(value, bool):
        raise TypeError("booleans are not max-plus scalars")
    if isinstance(value, (int, Fraction)):
        return Fraction(value)
    if isinstance(value, str):
        text = value.strip()
        if text == "-inf":
            return NEG_INF
        try:
            return Fraction(text)
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"not an exact rational: {value!r}") from exc
    raise TypeError(f"cannot interpret {value!r} as an exact max-plus scalar")


def is_finite(a: MaxPlus) -> bool:
    return a is not NEG_INF


def oplus(a: MaxPlus, b: MaxPlus) -> MaxPlus:
    return a if a >= b else b


def odot(a: MaxPlus, b: MaxPlus) -> MaxPlus:
    if a is NEG_INF or b is NEG_INF:
        return NEG_INF
    return a + b


def format_scalar(a: MaxPlus) -> str:
    if a is NEG_INF:
        return "-inf"
    if a.denominator == 1:
        return str(a.numerator)
    return f"{a.numerator}/{a.denominator}"


# --------------------------------------------------------------------------
# finite metric spaces


class MetricError(ValueError):
    """Base class for metric-axiom violations."""


class AsymmetricDistance(MetricError):
    pass


class NonzeroDiagonal(MetricError):
    pass


class NonpositiveOffDiagonal(MetricError):
    pass


class TriangleViolation(MetricError):
    def __init__(self, i, l, j, message=None):
        self.indices = (i, l, j)
        super().__init__(message or f"TriangleViolation({i},{l},{j})")


class EmptySpace(ValueError):
    pass


class UnknownPoint(KeyError):
    pass


@dataclass(frozen=True, eq=False)
class FiniteMetricSpace:
    """Labelled points with an exact distance matrix.

    Construct through :func:`validate_metric` unless the matrix is known to be a
    metric already (internal builders do this for tower levels).
    """

    labels: tuple
    dist: tuple
    name: str | None = None
    _index: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "_index", {lab: k for k, lab in enumerate(self.labels)})

    def __len__(self):
        return len(self.labels)

    def __eq__(self, other):
        if not isinstance(other, FiniteMetricSpace):
            return NotImplemented
        return self is other or (self.labels == other.labels and self.dist == other.dist)

    def __hash__(self):
        return hash((self.labels, len(self.dist)))

    def index(self, label) -> int:
        try:
            return self._index[label]
        except KeyError:
            raise UnknownPoint(label) from None

    def d(self, i: int, j: int) -> Fraction:
        return self.dist[i][j]


def validate_metric(labels: Sequence, matrix: Sequence[Sequence], name: str | None = None) -> FiniteMetricSpace:
    """Check the four metric axioms and build the space.

    The first violation found is raised, naming the offending labels.
    """
    labels = tuple(labels)
    k = len(labels)
    if len(set(labels)) != k:
        raise ValueError("duplicate point labels")
    if len(matrix) != k or any(len(row) != k for row in matrix):
        raise ValueError(f"distance matrix must be {k}x{k}")
    dist = tuple(tuple(scalar(v) for v in row) for row in matrix)
    for i in range(k):
        for j in range(k):
            if dist[i][j] is NEG_INF:
                raise NonpositiveOffDiagonal(f"distance {labels[i]}-{labels[j]} is -inf")
    for i in range(k):
        if dist[i][i] != 0:
            raise NonzeroDiagonal(f"NonzeroDiagonal at {labels[i]}: {dist[i][i]}")
    for i in range(k):
        for j in range(i + 1, k):
            if dist[i][j] != dist[j][i]:
                raise AsymmetricDistance(
                    f"AsymmetricDistance: d({labels[i]},{labels[j]})={dist[i][j]} "
                    f"but d({labels[j]},{labels[i]})={dist[j][i]}"
                )
            if dist[i][j] <= 0:
                raise NonpositiveOffDiagonal(
                    f"NonpositiveOffDiagonal: d({labels[i]},{labels[j]})={dist[i][j]}"
                )
    for i in range(k):
        for j in range(k):
            for l in range(k):
                if dist[i][j] > dist[i][l] + dist[l][j]:
                    raise TriangleViolation(
                        labels[i], labels[l], labels[j],
                        f"TriangleViolation({labels[i]},{labels[l]},{labels[j]}): "
                        f"{dist[i][j]} > {dist[i][l]} + {dist[l][j]}",
                    )
    return FiniteMetricSpace(labels, dist, name)


def diameter(space: FiniteMetricSpace) -> Fraction:
    if len(space) == 0:
        raise EmptySpace("diameter of an empty space")
    return max(max(row) for row in space.dist)


def thresholds(space: FiniteMetricSpace) -> list[Fraction]:
    """Sorted distinct distance values, always including 0."""
    values = {Fraction(0)}
    for row in space.dist:
        values.update(row)
    return sorted(values)
