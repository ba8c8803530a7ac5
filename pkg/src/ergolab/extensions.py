"""Pleasantness: the distinguished factor, defect computation, and the
one-step extension built from the Furstenberg self-joining.

The infinitary inverse limit is replaced by bounded iteration with a
stabilization verdict.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from .averages import exact_limit
from .errors import (
    BudgetExceeded,
    InternalInvariantViolation,
    InvarianceViolated,
    NotMeasurable,
)
from .factors import (
    Partition,
    action_isotropy,
    cond_expect,
    difference_isotropy,
    is_measurable,
    join,
)
from .joinings import furstenberg_joining
from .observables import ExactNorm, Observable, ZERO, l2_square
from .parallel import parallel_map
from .system import FiniteSystem


@dataclass(frozen=True)
class ExtensionStage:
    system: FiniteSystem
    factor_map: Tuple[int, ...]  # state upstairs -> state downstairs
    stage: int
    support_tuples: Tuple[Tuple[int, ...], ...]


@dataclass(frozen=True)
class PleasantnessReport:
    pleasant: bool
    defect: ExactNorm
    factor: Partition
    witness: Optional[Tuple[int, ...]]  # basis states (x_1, ..., x_d)

    def __post_init__(self):
        if self.pleasant != self.defect.is_zero:
            raise InternalInvariantViolation("pleasant flag disagrees with defect")


def pleasant_factor(sys: FiniteSystem) -> Partition:
    """Join of the T_1-isotropy partition with the T_i = T_1 difference
    isotropies for i = 2..d."""
    parts = [action_isotropy(sys, 1)]
    parts.extend(difference_isotropy(sys, i, 1) for i in range(2, sys.d + 1))
    return join(parts)


def is_pleasant(
    sys: FiniteSystem,
    budget: int = 10 ** 6,
    threads: int = 1,
) -> PleasantnessReport:
    """Exact pleasantness test over the indicator basis.

    Multilinearity of the limit plus completeness of indicators makes the
    basis check equivalent to the all-of-L^inf quantifier: the defect is
    the max over basis tuples of ||limit(e_{x1} - E[e_{x1}|Xi], e_{x2}, ...)||_2.
    """
    if sys.n ** sys.d > budget:
        raise BudgetExceeded(sys.n ** sys.d, budget)
    xi = pleasant_factor(sys)

    def per_first_state(x1: int):
        e1 = Observable.indicator(sys.n, x1)
        h = e1 - cond_expect(sys, e1, xi)
        best_sq, best_witness = ZERO, None
        if h.is_zero:
            return best_sq, best_witness
        for rest in itertools.product(sys.support, repeat=sys.d - 1):
            fs = [h] + [Observable.indicator(sys.n, x) for x in rest]
            lim = exact_limit(sys, fs)
            sq = l2_square(lim, sys.weights)
            if sq > best_sq:
                best_sq, best_witness = sq, (x1,) + rest
        return best_sq, best_witness

    defect_sq, witness = ZERO, None
    for sq, wit in parallel_map(per_first_state, list(sys.support), threads):
        if sq > defect_sq:
            defect_sq, witness = sq, wit
    return PleasantnessReport(
        pleasant=defect_sq == 0,
        defect=ExactNorm(defect_sq),
        factor=xi,
        witness=witness,
    )


def one_step_extension(sys: FiniteSystem) -> ExtensionStage:
    """The extension whose state space is the support of mu^{*d}, with
    T_1 lifted to the product T_1 x T_2 x ... x T_d and T_i (i >= 2) to its
    full diagonal.  The factor map is the first-coordinate projection."""
    jm = furstenberg_joining(sys)
    supp = jm.support
    index = {t: k for k, t in enumerate(supp)}
    weights = tuple(jm.mass[t] for t in supp)

    def lifted_perm(coord_actions, axis):
        perms = [sys.generator(a, axis) for a in coord_actions]
        return tuple(
            index[tuple(p[x] for p, x in zip(perms, t))] for t in supp
        )

    diag_coords = tuple(range(1, sys.d + 1))
    generators = []
    for i in range(1, sys.d + 1):
        coords = diag_coords if i == 1 else (i,) * sys.d
        generators.append(
            tuple(lifted_perm(coords, j) for j in range(1, sys.r + 1))
        )
    labels = tuple(
        "(" + ",".join(sys.label(x) for x in t) + ")" for t in supp
    )
    ext = FiniteSystem(
        n=len(supp),
        r=sys.r,
        d=sys.d,
        weights=weights,
        generators=tuple(generators),
        labels=labels,
    )
    factor_map = tuple(t[0] for t in supp)
    return ExtensionStage(
        system=ext, factor_map=factor_map, stage=1, support_tuples=tuple(supp)
    )


@dataclass(frozen=True)
class ExtensionRun:
    stages: Tuple[ExtensionStage, ...]
    final_report: PleasantnessReport
    stabilized: bool
    status: str  # "pleasant" | "budget-exceeded" | "max-m-reached"


def iterate_extensions(
    sys: FiniteSystem,
    max_m: int = 3,
    budget: int = 10 ** 6,
    threads: int = 1,
) -> ExtensionRun:
    """Apply one_step_extension until pleasant, the stage budget is hit, or
    max_m stages have been built.  Budget overrun is reported, not raised."""
    if max_m < 1:
        raise ValueError("max_m must be at least 1")
    stages: List[ExtensionStage] = []
    current = sys
    report = is_pleasant(current, budget=budget, threads=threads)
    m = 0
    status = "pleasant" if report.pleasant else "max-m-reached"
    while not report.pleasant and m < max_m:
        try:
            stage = one_step_extension(current)
        except MemoryError:  # pragma: no cover
            status = "budget-exceeded"
            break
        if stage.system.n > budget or stage.system.n ** stage.system.d > budget:
            status = "budget-exceeded"
            break
        stage = ExtensionStage(
            system=stage.system,
            factor_map=stage.factor_map,
            stage=m + 1,
            support_tuples=stage.support_tuples,
        )
        stages.append(stage)
        current = stage.system
        report = is_pleasant(current, budget=budget, threads=threads)
        m += 1
        status = "pleasant" if report.pleasant else "max-m-reached"
    return ExtensionRun(
        stages=tuple(stages),
        final_report=report,
        stabilized=report.pleasant,
        status=status,
    )


def pull_back(stage: ExtensionStage, f: Observable) -> Observable:
    """Lift an observable on the previous system through the factor map."""
    return Observable(tuple(f.values[x] for x in stage.factor_map))


def pleasant_decompose(
    sys: FiniteSystem,
    f: Observable,
    constituents: Sequence[Partition],
) -> List[Tuple[Observable, ...]]:
    """Write an observable measurable w.r.t. the join of the constituent
    partitions as an exact finite sum of products g_1 * g_2 * ... * g_d
    with g_i measurable w.r.t. the i-th constituent.

    Finite spaces need no approximation: a join cell is the intersection of
    one cell from each constituent, so its indicator factors exactly.
    """
    if len(constituents) != sys.d:
        raise NotMeasurable("need one constituent partition per action")
    joined = join(list(constituents))
    if not is_measurable(f, joined):
        raise NotMeasurable("observable is not measurable w.r.t. the join")
    if len(set(f.values)) == 1:
        return [
            tuple(
                [Observable.constant(sys.n, f.values[0])]
                + [Observable.constant(sys.n, 1)] * (sys.d - 1)
            )
        ]
    tuples: List[Tuple[Observable, ...]] = []
    for cell in joined.cells:
        v = f.values[cell[0]]
        if v == 0:
            continue
        rep = cell[0]
        gs = []
        for slot, part in enumerate(constituents):
            ind = Observable.indicator(sys.n, part.cells[part.cell_of[rep]])
            gs.append(v * ind if slot == 0 else ind)
        tuples.append(tuple(gs))
    if not tuples:
        tuples.append(
            tuple(Observable.constant(sys.n, 0) for _ in range(sys.d))
        )
    return tuples


def reduce_pleasant_limit(
    sys: FiniteSystem,
    tuples: Sequence[Tuple[Observable, ...]],
    fs_rest: Sequence[Observable],
) -> Observable:
    """Evaluate the limit for f_1 = sum_k prod_i g_{i,k} by pulling g_1 out
    and folding g_i into f_i, reducing to d-1 actions:

        sum_k g_{1,k} * limit_{2..d}(g_{2,k} f_2, ..., g_{d,k} f_d).

    Asserts exact agreement with the unreduced limit.
    """
    if len(fs_rest) != sys.d - 1:
        raise InvarianceViolated("need d-1 companion observables")
    xi1 = action_isotropy(sys, 1)
    diffs = [difference_isotropy(sys, i, 1) for i in range(2, sys.d + 1)]
    for gs in tuples:
        if len(gs) != sys.d:
            raise InvarianceViolated("tuple arity differs from action count")
        if not is_measurable(gs[0], xi1):
            raise InvarianceViolated("g_1 is not T_1-invariant")
        for g, part in zip(gs[1:], diffs):
            if not is_measurable(g, part):
                raise InvarianceViolated("g_i is not (T_i = T_1)-invariant")
    rest_actions = list(range(2, sys.d + 1))
    reduced = Observable.constant(sys.n, 0)
    for gs in tuples:
        if sys.d == 1:
            reduced = reduced + gs[0]
        else:
            inner_fs = [g * f for g, f in zip(gs[1:], fs_rest)]
            reduced = reduced + gs[0] * exact_limit(
                sys, inner_fs, actions=rest_actions
            )
    f1 = Observable.constant(sys.n, 0)
    for gs in tuples:
        prod = gs[0]
        for g in gs[1:]:
            prod = prod * g
        f1 = f1 + prod
    direct = exact_limit(sys, [f1] + list(fs_rest))
    if direct.values != reduced.values:
        raise InternalInvariantViolation(
            "reduced limit disagrees with the direct limit"
        )
    return reduced
