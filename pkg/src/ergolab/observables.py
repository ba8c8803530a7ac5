"""State-indexed exact observables and exact norm values.

L^2 norms of rational vectors are square roots of rationals, so they are
carried around as ExactNorm values (the exact square) and every comparison
happens on the squares.  Nothing here ever rounds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Sequence, Tuple

from .errors import DimensionMismatch

ZERO = Fraction(0)
ONE = Fraction(1)


def _frac(v) -> Fraction:
    return v if isinstance(v, Fraction) else Fraction(v)


@dataclass(frozen=True, order=False)
class ExactNorm:
    """The nonnegative real sqrt(square), with square an exact rational."""

    square: Fraction

    def __post_init__(self):
        if self.square < 0:
            raise ValueError("norm square must be nonnegative")

    @staticmethod
    def of_rational(q: Fraction) -> "ExactNorm":
        return ExactNorm(q * q)

    def scale(self, c: Fraction) -> "ExactNorm":
        """The norm value multiplied by a nonnegative rational c."""
        if c < 0:
            raise ValueError("scale factor must be nonnegative")
        return ExactNorm(self.square * c * c)

    @property
    def is_zero(self) -> bool:
        return self.square == 0

    def __le__(self, other: "ExactNorm") -> bool:
        return self.square <= other.square

    def __lt__(self, other: "ExactNorm") -> bool:
        return self.square < other.square

    def __float__(self) -> float:
        return math.sqrt(float(self.square))


@dataclass(frozen=True)
class Observable:
    """Exact rational function on the states of a finite system."""

    values: Tuple[Fraction, ...]

    @staticmethod
    def from_values(values: Sequence) -> "Observable":
        return Observable(tuple(_frac(v) for v in values))

    @staticmethod
    def constant(n: int, c) -> "Observable":
        return Observable((_frac(c),) * n)

    @staticmethod
    def indicator(n: int, states) -> "Observable":
        members = {states} if isinstance(states, int) else set(states)
        return Observable(tuple(ONE if x in members else ZERO for x in range(n)))

    def __len__(self) -> int:
        return len(self.values)

    def __add__(self, other: "Observable") -> "Observable":
        self._check(other)
        return Observable(tuple(a + b for a, b in zip(self.values, other.values)))

    def __sub__(self, other: "Observable") -> "Observable":
        self._check(other)
        return Observable(tuple(a - b for a, b in zip(self.values, other.values)))

    def __mul__(self, other) -> "Observable":
        if isinstance(other, Observable):
            self._check(other)
            return Observable(
                tuple(a * b for a, b in zip(self.values, other.values))
            )
        c = _frac(other)
        return Observable(tuple(a * c for a in self.values))

    __rmul__ = __mul__

    def _check(self, other: "Observable"):
        if len(other.values) != len(self.values):
            raise DimensionMismatch(
                f"observable lengths differ: {len(self.values)} vs "
                f"{len(other.values)}"
            )

    @property
    def is_zero(self) -> bool:
        return all(v == 0 for v in self.values)

    def compose_perm(self, perm) -> "Observable":
        """f o sigma, i.e. x -> f(sigma(x))."""
        return Observable(tuple(self.values[perm[x]] for x in range(len(perm))))

    @property
    def linf(self) -> Fraction:
        return linf_norm(self)

    def l2(self, weights: Tuple[Fraction, ...]) -> ExactNorm:
        return ExactNorm(l2_square(self, weights))


@lru_cache(maxsize=None)
def linf_norm(f: Observable) -> Fraction:
    return max((abs(v) for v in f.values), default=ZERO)


@lru_cache(maxsize=None)
def l2_square(f: Observable, weights: Tuple[Fraction, ...]) -> Fraction:
    if len(weights) != len(f.values):
        raise DimensionMismatch("weights and observable lengths differ")
    return sum((v * v * w for v, w in zip(f.values, weights)), ZERO)


def integral(f: Observable, weights: Tuple[Fraction, ...]) -> Fraction:
    if len(weights) != len(f.values):
        raise DimensionMismatch("weights and observable lengths differ")
    return sum((v * w for v, w in zip(f.values, weights)), ZERO)


def inner(f: Observable, g: Observable, weights: Tuple[Fraction, ...]) -> Fraction:
    return integral(f * g, weights)
