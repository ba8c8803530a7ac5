"""Nonconventional averages over Folner boxes and their exact limits.

On a finite system the orbit map n -> (T_1^n, ..., T_d^n) is periodic with
the axis periods of period_box, so the Folner limit is literally the
average over one full period box, for any base point.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence, Tuple

from .errors import DimensionMismatch, ValidationError
from .observables import ExactNorm, Observable, ZERO, ONE, l2_square, linf_norm
from .system import FiniteSystem, PeriodBox, period_box


@dataclass(frozen=True)
class FolnerBox:
    """The box prod_j [0, N_j) shifted by an integer base point."""

    lengths: Tuple[int, ...]
    base: Tuple[int, ...] = ()

    def __post_init__(self):
        if any(N < 1 for N in self.lengths):
            raise ValidationError("box edge lengths must be positive")
        if self.base and len(self.base) != len(self.lengths):
            raise ValidationError("base point dimension mismatch")

    @property
    def size(self) -> int:
        return math.prod(self.lengths)

    def points(self) -> Iterable[Tuple[int, ...]]:
        base = self.base or (0,) * len(self.lengths)
        for offs in itertools.product(*(range(N) for N in self.lengths)):
            yield tuple(b + o for b, o in zip(base, offs))


@dataclass(frozen=True)
class AverageReport:
    truncated: Observable
    limit: Observable
    deviation: ExactNorm
    bound: ExactNorm
    box: FolnerBox


def _check_args(sys: FiniteSystem, fs, actions):
    acts = tuple(actions) if actions is not None else tuple(range(1, sys.d + 1))
    if len(fs) != len(acts):
        raise DimensionMismatch(
            f"got {len(fs)} observables for {len(acts)} actions"
        )
    for f in fs:
        if len(f) != sys.n:
            raise DimensionMismatch("observable length differs from state count")
    if any(not 1 <= i <= sys.d for i in acts):
        raise ValidationError("action index out of range")
    return acts


def truncated_average(
    sys: FiniteSystem,
    fs: Sequence[Observable],
    box: Optional[FolnerBox] = None,
    actions: Optional[Sequence[int]] = None,
    points: Optional[Iterable[Tuple[int, ...]]] = None,
) -> Observable:
    """Pointwise average of prod_i f_i o T_i^n over the lattice points.

    Either a box or an explicit point list may be supplied; the point list
    is the escape hatch for non-box Folner sets.
    """
    acts = _check_args(sys, fs, actions)
    if points is None:
        if box is None:
            raise ValidationError("need a box or an explicit point list")
        pts = list(box.points())
    else:
        pts = [tuple(p) for p in points]
        if not pts:
            raise ValidationError("empty lattice point list")
    total = [ZERO] * sys.n
    for nvec in pts:
        if len(nvec) != sys.r:
            raise DimensionMismatch("lattice point has wrong dimension")
        perms = [sys.action_perm(i, nvec) for i in acts]
        for x in range(sys.n):
            prod = ONE
            for f, p in zip(fs, perms):
                v = f.values[p[x]]
                if v == 0:
                    prod = ZERO
                    break
                prod *= v
            if prod:
                total[x] += prod
    count = Fraction(len(pts))
    return Observable(tuple(t / count for t in total))


def exact_limit(
    sys: FiniteSystem,
    fs: Sequence[Observable],
    actions: Optional[Sequence[int]] = None,
) -> Observable:
    """The L^2 limit of the truncated averages: one full period box."""
    acts = _check_args(sys, fs, actions)
    pbox = period_box(sys, acts)
    return truncated_average(
        sys, fs, box=FolnerBox(pbox.periods), actions=acts
    )


def l2_deviation(sys: FiniteSystem, f: Observable, g: Observable) -> ExactNorm:
    return (f - g).l2(sys.weights)


def deviation_bound(
    sys: FiniteSystem,
    fs: Sequence[Observable],
    box: FolnerBox,
    actions: Optional[Sequence[int]] = None,
) -> ExactNorm:
    """Certified bound on ||truncated - limit||_2.

    Splitting the box into complete periods plus a boundary shell gives
    B = 2 * ||f_1||_2 * prod_{i>=2} ||f_i||_inf * (1 - prod_j floor(N_j/P_j)*P_j/N_j).
    """
    acts = _check_args(sys, fs, actions)
    pbox = period_box(sys, acts)
    rho = ONE
    for N, P in zip(box.lengths, pbox.periods):
        rho *= Fraction((N // P) * P, N)
    coeff = Fraction(2) * math.prod(
        (linf_norm(f) for f in fs[1:]), start=ONE
    ) * (ONE - rho)
    return ExactNorm(l2_square(fs[0], sys.weights)).scale(coeff)


def contractive_check(
    sys: FiniteSystem,
    fs: Sequence[Observable],
    box: FolnerBox,
    actions: Optional[Sequence[int]] = None,
) -> Tuple[ExactNorm, ExactNorm, bool]:
    """||avg||_2 against ||f_1||_2 * prod_{i>=2} ||f_i||_inf; must hold."""
    avg = truncated_average(sys, fs, box=box, actions=actions)
    lhs = avg.l2(sys.weights)
    rhs = ExactNorm(l2_square(fs[0], sys.weights)).scale(
        math.prod((linf_norm(f) for f in fs[1:]), start=ONE)
    )
    return lhs, rhs, lhs <= rhs


def _shifted(sys: FiniteSystem, f: Observable, i: int, m: Sequence[int]) -> Observable:
    """f o T_i^m."""
    return f.compose_perm(sys.action_perm(i, m))


def vdc_correlation(
    sys: FiniteSystem,
    fs: Sequence[Observable],
    m: Sequence[int],
) -> Fraction:
    """gamma(m): the exact limit over n of <u_{n+m}, u_n>_mu where
    u_n = prod_i f_i o T_i^n.  Equals the integral of the exact limit of the
    shifted-product observables f_i * (f_i o T_i^m)."""
    acts = _check_args(sys, fs, None)
    pbox = period_box(sys, acts)
    mred = tuple(e % P for e, P in zip(m, pbox.periods))
    hs = [f * _shifted(sys, f, i, mred) for i, f in zip(acts, fs)]
    lim = exact_limit(sys, hs)
    return sum((v * w for v, w in zip(lim.values, sys.weights)), ZERO)


def vdc_identity_check(
    sys: FiniteSystem,
    fs: Sequence[Observable],
) -> Tuple[Fraction, Fraction, bool]:
    """Periodic-sequence van der Corput identity:
    ||limit||_2^2 == (1/|P|) sum_{delta in P-box} gamma(delta), exactly."""
    acts = _check_args(sys, fs, None)
    pbox = period_box(sys, acts)
    lim = exact_limit(sys, fs)
    lhsq = l2_square(lim, sys.weights)
    total = ZERO
    for delta in pbox.points():
        total += vdc_correlation(sys, fs, delta)
    rhsq = total / pbox.size
    return lhsq, rhsq, lhsq == rhsq


def average_report(
    sys: FiniteSystem,
    fs: Sequence[Observable],
    box: FolnerBox,
) -> AverageReport:
    truncated = truncated_average(sys, fs, box=box)
    limit = exact_limit(sys, fs)
    return AverageReport(
        truncated=truncated,
        limit=limit,
        deviation=l2_deviation(sys, truncated, limit),
        bound=deviation_bound(sys, fs, box),
        box=box,
    )
