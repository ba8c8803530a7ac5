"""Finite measure-preserving Z^{rd} systems.

A system is a weighted finite state space together with r*d commuting
weight-preserving permutation generators, indexed by (action i, axis j)
with i in 1..d and j in 1..r.  All arithmetic is exact rational.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Optional, Sequence, Tuple

from .errors import (
    MeasureNotPreserved,
    NonCommuting,
    NonProbabilityWeights,
    ValidationError,
)

Perm = Tuple[int, ...]

ZERO = Fraction(0)
ONE = Fraction(1)


def identity_perm(n: int) -> Perm:
    return tuple(range(n))


def compose(p: Perm, q: Perm) -> Perm:
    """(p o q)(x) = p[q[x]]."""
    return tuple(p[q[x]] for x in range(len(q)))


def invert(p: Perm) -> Perm:
    out = [0] * len(p)
    for x, y in enumerate(p):
        out[y] = x
    return tuple(out)


def cycles(p: Perm):
    seen = [False] * len(p)
    out = []
    for x in range(len(p)):
        if seen[x]:
            continue
        cyc = [x]
        seen[x] = True
        y = p[x]
        while y != x:
            cyc.append(y)
            seen[y] = True
            y = p[y]
        out.append(tuple(cyc))
    return out


def perm_order(p: Perm) -> int:
    # cycle decomposition rather than repeated composition: O(n)
    return math.lcm(*(len(c) for c in cycles(p))) if p else 1


def perm_power(p: Perm, e: int) -> Perm:
    """p**e for any integer e, via cycle rotation."""
    n = len(p)
    out = [0] * n
    for cyc in cycles(p):
        k = len(cyc)
        s = e % k
        for t, x in enumerate(cyc):
            out[x] = cyc[(t + s) % k]
    return tuple(out)


@dataclass(frozen=True)
class GroupElement:
    """An element of Z^{rd}, as a flat coordinate vector.

    Coordinate index (i-1)*r + (j-1) carries the exponent of the generator
    for action i, axis j.  Negative exponents are fine (generators are
    invertible).
    """

    coords: Tuple[int, ...]

    @staticmethod
    def zero(r: int, d: int) -> "GroupElement":
        return GroupElement((0,) * (r * d))

    @staticmethod
    def for_action(i: int, nvec: Sequence[int], r: int, d: int) -> "GroupElement":
        """The element acting as T_i^nvec."""
        if not 1 <= i <= d:
            raise ValidationError(f"action index {i} out of range 1..{d}")
        if len(nvec) != r:
            raise ValidationError(f"exponent vector must have length {r}")
        coords = [0] * (r * d)
        coords[(i - 1) * r : i * r] = list(nvec)
        return GroupElement(tuple(coords))

    def __add__(self, other: "GroupElement") -> "GroupElement":
        return GroupElement(tuple(a + b for a, b in zip(self.coords, other.coords)))

    def __neg__(self) -> "GroupElement":
        return GroupElement(tuple(-a for a in self.coords))


@dataclass(frozen=True)
class PeriodBox:
    """Axis periods (P_1..P_r) after which the relevant orbit map repeats."""

    periods: Tuple[int, ...]

    @property
    def size(self) -> int:
        return math.prod(self.periods)

    def points(self, base: Optional[Sequence[int]] = None):
        base = tuple(base) if base is not None else (0,) * len(self.periods)
        for offs in itertools.product(*(range(p) for p in self.periods)):
            yield tuple(b + o for b, o in zip(base, offs))


@dataclass(frozen=True, eq=False)
class FiniteSystem:
    n: int
    r: int
    d: int
    weights: Tuple[Fraction, ...]
    generators: Tuple[Tuple[Perm, ...], ...]  # [i-1][j-1] -> perm
    labels: Optional[Tuple[str, ...]] = None

    def __post_init__(self):
        if self.n < 1 or self.r < 1 or self.d < 1:
            raise ValidationError("n, r and d must all be positive")
        if len(self.weights) != self.n:
            raise ValidationError("weights length must equal state count")
        if len(self.generators) != self.d or any(
            len(row) != self.r for row in self.generators
        ):
            raise ValidationError("expected a d-by-r table of generators")
        if self.labels is not None and len(self.labels) != self.n:
            raise ValidationError("labels length must equal state count")
        if any(w < 0 for w in self.weights):
            raise NonProbabilityWeights("weights must be nonnegative")
        if sum(self.weights, ZERO) != ONE:
            raise NonProbabilityWeights("weights must sum to exactly 1")
        flat = []
        for i, row in enumerate(self.generators, start=1):
            for j, p in enumerate(row, start=1):
                if len(p) != self.n or sorted(p) != list(range(self.n)):
                    raise ValidationError(
                        f"generator (action={i}, axis={j}) is not a "
                        f"permutation of 0..{self.n - 1}"
                    )
                for x in range(self.n):
                    if self.weights[p[x]] != self.weights[x]:
                        raise MeasureNotPreserved(i, j, x)
                flat.append(((i, j), p))
        for (ka, pa), (kb, pb) in itertools.combinations(flat, 2):
            ab = compose(pa, pb)
            ba = compose(pb, pa)
            if ab != ba:
                witness = next(x for x in range(self.n) if ab[x] != ba[x])
                raise NonCommuting(ka, kb, witness)

    # -- derived structure ------------------------------------------------

    def generator(self, i: int, j: int) -> Perm:
        return self.generators[i - 1][j - 1]

    @cached_property
    def inverse_generators(self) -> Tuple[Tuple[Perm, ...], ...]:
        return tuple(tuple(invert(p) for p in row) for row in self.generators)

    @cached_property
    def orders(self) -> Tuple[Tuple[int, ...], ...]:
        return tuple(tuple(perm_order(p) for p in row) for row in self.generators)

    @cached_property
    def support(self) -> Tuple[int, ...]:
        return tuple(x for x in range(self.n) if self.weights[x] > 0)

    @cached_property
    def _power_cache(self) -> dict:
        return {}

    def generator_power(self, i: int, j: int, e: int) -> Perm:
        order = self.orders[i - 1][j - 1]
        key = (i, j, e % order)
        cache = self._power_cache
        if key not in cache:
            cache[key] = perm_power(self.generator(i, j), e)
        return cache[key]

    def action_perm(self, i: int, nvec: Sequence[int]) -> Perm:
        """Permutation realising T_i^nvec."""
        p = identity_perm(self.n)
        for j, e in enumerate(nvec, start=1):
            if e:
                p = compose(self.generator_power(i, j, e), p)
        return p

    def full_perm(self, g) -> Perm:
        """Permutation realising T^g for g in Z^{rd}."""
        coords = g.coords if isinstance(g, GroupElement) else tuple(g)
        if len(coords) != self.r * self.d:
            raise ValidationError("group element has wrong length")
        p = identity_perm(self.n)
        for idx, e in enumerate(coords):
            if e:
                i, j = divmod(idx, self.r)
                p = compose(self.generator_power(i + 1, j + 1, e), p)
        return p

    def label(self, x: int) -> str:
        return self.labels[x] if self.labels is not None else str(x)


def act(sys: FiniteSystem, g, x: int) -> int:
    """Image of state x under T^g.  Order of generator application is
    irrelevant by commutativity."""
    coords = g.coords if isinstance(g, GroupElement) else tuple(g)
    if len(coords) != sys.r * sys.d:
        raise ValidationError("group element has wrong length")
    y = x
    for idx, e in enumerate(coords):
        if e:
            i, j = divmod(idx, sys.r)
            y = sys.generator_power(i + 1, j + 1, e)[y]
    return y


def period_box(sys: FiniteSystem, actions: Optional[Sequence[int]] = None) -> PeriodBox:
    """Axis-wise lcm of generator orders over the given action subset."""
    acts = tuple(actions) if actions is not None else tuple(range(1, sys.d + 1))
    if not acts:
        raise ValidationError("action subset must be nonempty")
    periods = tuple(
        math.lcm(*(sys.orders[i - 1][j] for i in acts)) for j in range(sys.r)
    )
    return PeriodBox(periods)


def pushforward(sys: FiniteSystem, g, m: Sequence[Fraction]) -> Tuple[Fraction, ...]:
    """(pushforward m)(y) = m(g^{-1} y)."""
    if len(m) != sys.n:
        raise ValidationError("measure vector has wrong length")
    p = sys.full_perm(g)
    out = [ZERO] * sys.n
    for x in range(sys.n):
        out[p[x]] = m[x]
    return tuple(out)


def validate_system(candidate: dict) -> FiniteSystem:
    """Build a FiniteSystem from the file-schema dict, checking everything."""
    try:
        r = int(candidate["r"])
        d = int(candidate["d"])
        n = int(candidate["n"])
        raw_weights = candidate["weights"]
        raw_gens = candidate["generators"]
    except (KeyError, TypeError, ValueError) as exc:
        raise ValidationError(f"malformed system description: {exc}") from exc
    if len(raw_weights) != n:
        raise ValidationError("weights length must equal n")
    try:
        weights = tuple(Fraction(str(w)) for w in raw_weights)
    except (ValueError, ZeroDivisionError) as exc:
        raise NonProbabilityWeights(f"unparseable weight: {exc}") from exc
    table: dict = {}
    for entry in raw_gens:
        try:
            i = int(entry["action"])
            j = int(entry["axis"])
            p = tuple(int(v) for v in entry["perm"])
        except (KeyError, TypeError, ValueError) as exc:
            raise ValidationError(f"malformed generator entry: {exc}") from exc
        if not (1 <= i <= d and 1 <= j <= r):
            raise ValidationError(f"generator index ({i},{j}) out of range")
        if (i, j) in table:
            raise ValidationError(f"duplicate generator for ({i},{j})")
        table[(i, j)] = p
    missing = [
        (i, j)
        for i in range(1, d + 1)
        for j in range(1, r + 1)
        if (i, j) not in table
    ]
    if missing:
        raise ValidationError(f"missing generators for {missing}")
    generators = tuple(
        tuple(table[(i, j)] for j in range(1, r + 1)) for i in range(1, d + 1)
    )
    labels = candidate.get("labels")
    if labels is not None:
        labels = tuple(str(s) for s in labels)
    return FiniteSystem(
        n=n, r=r, d=d, weights=weights, generators=generators, labels=labels
    )


def normalize_support(sys: FiniteSystem):
    """Drop zero-weight states.  Returns (restricted system, kept state list)."""
    kept = list(sys.support)
    if len(kept) == sys.n:
        return sys, kept
    index = {x: k for k, x in enumerate(kept)}
    weights = tuple(sys.weights[x] for x in kept)
    generators = tuple(
        tuple(tuple(index[p[x]] for x in kept) for p in row)
        for row in sys.generators
    )
    labels = tuple(sys.label(x) for x in kept)
    return (
        FiniteSystem(
            n=len(kept),
            r=sys.r,
            d=sys.d,
            weights=weights,
            generators=generators,
            labels=labels,
        ),
        kept,
    )
