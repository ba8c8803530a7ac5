"""Self-joinings: the Furstenberg joining, relatively independent joinings,
and the Host-Kra tower.

A joined measure lives on X^k with states encoded as index tuples, stored
sparsely.  Its Z^r-actions act coordinatewise, each coordinate moved by one
of the base actions (or fixed), so an action is just a symbol per
coordinate.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Dict, List, Optional, Sequence, Tuple

from .averages import exact_limit
from .errors import (
    DimensionMismatch,
    InternalInvariantViolation,
    ValidationError,
    ZeroWeightCell,
)
from .factors import Partition, action_isotropy, orbit_partition
from .observables import Observable, ZERO, ONE
from .system import FiniteSystem, compose, identity_perm, invert, period_box

StateTuple = Tuple[int, ...]


@dataclass(frozen=True)
class JoinedAction:
    """A Z^r-action on X^k moving coordinate c by base action coord_actions[c]
    (0 means the coordinate is fixed)."""

    name: str
    coord_actions: Tuple[int, ...]

    def axis_perms(self, base: FiniteSystem, axis: int) -> Tuple:
        ident = identity_perm(base.n)
        return tuple(
            base.generator(a, axis) if a else ident for a in self.coord_actions
        )

    def apply(self, base: FiniteSystem, nvec: Sequence[int], t: StateTuple) -> StateTuple:
        perms = [
            base.action_perm(a, nvec) if a else identity_perm(base.n)
            for a in self.coord_actions
        ]
        return tuple(p[x] for p, x in zip(perms, t))


class JoinedMeasure:
    """Sparse exact probability measure on X^power with named actions."""

    def __init__(
        self,
        base: FiniteSystem,
        power: int,
        mass: Dict[StateTuple, Fraction],
        actions: Dict[str, JoinedAction],
        labels: Optional[Tuple[frozenset, ...]] = None,
    ):
        self.base = base
        self.power = power
        self.mass = {t: m for t, m in mass.items() if m != 0}
        self.actions = dict(actions)
        self.labels = labels
        if any(m < 0 for m in self.mass.values()):
            raise ValidationError("joined masses must be nonnegative")
        if sum(self.mass.values(), ZERO) != ONE:
            raise ValidationError("joined masses must sum to exactly 1")
        if any(len(t) != power for t in self.mass):
            raise ValidationError("state tuple length differs from power")
        for act in self.actions.values():
            if len(act.coord_actions) != power:
                raise ValidationError(f"action {act.name} has wrong arity")
        if labels is not None and len(labels) != power:
            raise ValidationError("labels length differs from power")

    @cached_property
    def support(self) -> List[StateTuple]:
        return sorted(self.mass)

    def marginal(self, c: int) -> Tuple[Fraction, ...]:
        out = [ZERO] * self.base.n
        for t, m in self.mass.items():
            out[t[c]] += m
        return tuple(out)

    def marginals_equal_base(self) -> bool:
        return all(
            self.marginal(c) == self.base.weights for c in range(self.power)
        )

    def pushforward(self, name: str, nvec: Sequence[int]) -> Dict[StateTuple, Fraction]:
        act = self.actions[name]
        out: Dict[StateTuple, Fraction] = {}
        for t, m in self.mass.items():
            out[act.apply(self.base, nvec, t)] = m
        return out

    def is_invariant(self, name: str) -> bool:
        """Invariance under the generators of the named action (hence under
        the whole group)."""
        for j in range(self.base.r):
            unit = tuple(1 if k == j else 0 for k in range(self.base.r))
            if self.pushforward(name, unit) != self.mass:
                return False
        return True


def furstenberg_joining(
    sys: FiniteSystem, base_point: Optional[Sequence[int]] = None
) -> JoinedMeasure:
    """mu^{*d}: average over a full period box of the pushforwards of the
    diagonal measure under S_{d+1}^n = (T_1^n, ..., T_d^n).  Independent of
    the box base point."""
    d = sys.d
    pbox = period_box(sys)
    mass: Dict[StateTuple, Fraction] = {}
    scale = Fraction(1, pbox.size)
    for nvec in pbox.points(base_point):
        perms = [sys.action_perm(i, nvec) for i in range(1, d + 1)]
        for x in sys.support:
            t = tuple(p[x] for p in perms)
            mass[t] = mass.get(t, ZERO) + sys.weights[x] * scale
    actions = {
        f"S{i}": JoinedAction(f"S{i}", (i,) * d) for i in range(1, d + 1)
    }
    diag = JoinedAction(f"S{d + 1}", tuple(range(1, d + 1)))
    actions[diag.name] = diag
    return JoinedMeasure(sys, d, mass, actions)


def diagonal_action_name(jm: JoinedMeasure) -> str:
    return f"S{jm.base.d + 1}"


def joining_integral(
    jm: JoinedMeasure,
    fs: Sequence[Observable],
    g=None,
) -> Fraction:
    """Integral of f_1(x_1) * ... * f_d(x_d) * g(x) against the joined mass.
    g may be None (constant 1), a dict from state tuples to rationals
    (default 0), or a callable."""
    if len(fs) != jm.power:
        raise DimensionMismatch("need one observable per coordinate")
    for f in fs:
        if len(f) != jm.base.n:
            raise DimensionMismatch("observable length differs from base states")
    if g is None:
        geval = lambda t: ONE
    elif isinstance(g, dict):
        geval = lambda t: g.get(t, ZERO)
    else:
        geval = g
    total = ZERO
    for t, m in jm.mass.items():
        prod = m
        for f, x in zip(fs, t):
            v = f.values[x]
            if v == 0:
                prod = ZERO
                break
            prod *= v
        if prod:
            gv = geval(t)
            if gv:
                total += prod * gv
    return total


def orbit_cells(jm: JoinedMeasure, name: str) -> List[Tuple[StateTuple, ...]]:
    """Orbits of the support under the named action; their indicators span
    the invariant functions on the support."""
    supp = jm.support
    index = {t: k for k, t in enumerate(supp)}
    act = jm.actions[name]
    perms = []
    for j in range(jm.base.r):
        coord_perms = act.axis_perms(jm.base, j + 1)
        fwd = tuple(
            index[tuple(p[x] for p, x in zip(coord_perms, t))] for t in supp
        )
        perms.append(fwd)
        perms.append(invert(fwd))
    part = orbit_partition(len(supp), perms)
    return [tuple(supp[k] for k in cell) for cell in part.cells]


@dataclass(frozen=True)
class VdcWitness:
    basis_states: StateTuple  # chosen basis states for f_2..f_d
    cell_representative: StateTuple
    integral: Fraction


def vdc_condition_check(sys: FiniteSystem, f1: Observable):
    """Exhaustive finite form of the joining-controls-averages condition.

    Enumerates the indicator basis for f_2..f_d and the indicators of the
    diagonal-action orbit cells (a spanning set for the invariant g).  When
    all integrals vanish, additionally verifies the conclusion: every
    indicator-basis exact limit with this f_1 is the zero observable.
    Returns (bool, witness-or-None).
    """
    if len(f1) != sys.n:
        raise DimensionMismatch("observable length differs from state count")
    jm = furstenberg_joining(sys)
    cells = orbit_cells(jm, diagonal_action_name(jm))
    cell_of = {}
    for k, cell in enumerate(cells):
        for t in cell:
            cell_of[t] = k
    acc: Dict[Tuple, Fraction] = {}
    for t, m in jm.mass.items():
        v = f1.values[t[0]]
        if v == 0:
            continue
        key = (t[1:], cell_of[t])
        acc[key] = acc.get(key, ZERO) + m * v
    for (rest, k), val in sorted(acc.items()):
        if val != 0:
            return False, VdcWitness(rest, cells[k][0], val)
    # verified conclusion: the lemma promises the limits vanish
    for rest in itertools.product(sys.support, repeat=sys.d - 1):
        fs = [f1] + [Observable.indicator(sys.n, x) for x in rest]
        lim = exact_limit(sys, fs)
        if not lim.is_zero:
            raise InternalInvariantViolation(
                "joining condition held but a basis limit is nonzero"
            )
    return True, None


def rel_indep_joining(sys: FiniteSystem, part: Partition) -> JoinedMeasure:
    """mu tensor_Xi mu: couples two copies to share a Xi-cell and be
    conditionally independent given it."""
    if part.n != sys.n:
        raise ValidationError("partition is over a different state set")
    cw = part.cell_weights(sys.weights)
    mass: Dict[StateTuple, Fraction] = {}
    for k, cell in enumerate(part.cells):
        w = cw[k]
        members = [x for x in cell if sys.weights[x] > 0]
        if not members:
            continue
        if w == 0:
            raise ZeroWeightCell(f"cell {cell} has zero weight")
        for x in members:
            for y in members:
                mass[(x, y)] = sys.weights[x] * sys.weights[y] / w
    return JoinedMeasure(sys, 2, mass, actions={})


def _rel_indep_pairs(
    masses: Dict[StateTuple, Fraction],
    cells: Sequence[Sequence[int]],
    supp: Sequence[StateTuple],
) -> Dict[StateTuple, Fraction]:
    out: Dict[StateTuple, Fraction] = {}
    for cell in cells:
        w = sum((masses[supp[k]] for k in cell), ZERO)
        if w == 0:
            raise ZeroWeightCell("relatively independent step hit a null cell")
        for a in cell:
            for b in cell:
                u, v = supp[a], supp[b]
                out[u + v] = masses[u] * masses[v] / w
    return out


def host_kra_tower(sys: FiniteSystem) -> List[JoinedMeasure]:
    """The tower mu^{[1]}, ..., mu^{[d]} of relatively independent
    self-joinings, with coordinates labelled by subsets of {1..d}.

    Stage 1 joins over the T_1-isotropy factor and lifts T_1 to T_1 x id,
    T_i to T_i x T_i; stage k joins over the isotropy of
    T_1^{[k-1]} (T_k^{[k-1]})^{-1} and lifts T_1^{[k-1]} to
    T_1^{[k-1]} x T_k^{[k-1]}, T_i^{[k-1]} to its diagonal square.
    """
    d = sys.d
    # stage 0: the system itself as a power-1 joined measure
    masses: Dict[StateTuple, Fraction] = {
        (x,): sys.weights[x] for x in sys.support
    }
    labels: Tuple[frozenset, ...] = (frozenset(),)
    acts: Dict[str, Tuple[int, ...]] = {f"T{i}": (i,) for i in range(1, d + 1)}
    stages: List[JoinedMeasure] = []
    for k in range(1, d + 1):
        supp = sorted(masses)
        index = {t: s for s, t in enumerate(supp)}
        if k == 1:
            # orbits of T_1 acting coordinatewise on the stage support
            gen_pairs = [(acts["T1"], None)]
        else:
            gen_pairs = [(acts["T1"], acts[f"T{k}"])]
        perms = []
        for a1, a2 in gen_pairs:
            for j in range(1, sys.r + 1):
                p1 = [
                    sys.generator(a, j) if a else identity_perm(sys.n)
                    for a in a1
                ]
                if a2 is None:
                    coord = p1
                else:
                    p2inv = [
                        invert(sys.generator(a, j)) if a else identity_perm(sys.n)
                        for a in a2
                    ]
                    coord = [compose(q1, q2) for q1, q2 in zip(p1, p2inv)]
                fwd = tuple(
                    index[tuple(p[x] for p, x in zip(coord, t))] for t in supp
                )
                perms.append(fwd)
                perms.append(invert(fwd))
        part = orbit_partition(len(supp), perms)
        masses = _rel_indep_pairs(masses, part.cells, supp)
        new_labels = labels + tuple(a | {k} for a in labels)
        new_acts: Dict[str, Tuple[int, ...]] = {}
        for i in range(1, d + 1):
            if i == 1 and k == 1:
                # first stage lifts T_1 to T_1 x id
                new_acts["T1"] = acts["T1"] + (0,) * len(acts["T1"])
            elif i == 1:
                new_acts["T1"] = acts["T1"] + acts[f"T{k}"]
            else:
                new_acts[f"T{i}"] = acts[f"T{i}"] + acts[f"T{i}"]
        labels, acts = new_labels, new_acts
        stages.append(
            JoinedMeasure(
                sys,
                2 ** k,
                masses,
                {
                    name: JoinedAction(name, coords)
                    for name, coords in acts.items()
                },
                labels=labels,
            )
        )
    return stages


def host_kra_expected_t1(labels: Sequence[frozenset]) -> Tuple[int, ...]:
    """Closed form for the first lifted action: coordinate alpha moves by
    T_1 if alpha is empty, stays fixed if alpha == {1}, and moves by
    T_{max alpha} otherwise."""
    out = []
    for a in labels:
        if not a:
            out.append(1)
        elif a == frozenset({1}):
            out.append(0)
        else:
            out.append(max(a))
    return tuple(out)


def host_kra_structural_check(jm: JoinedMeasure) -> bool:
    """The constructed T_1^{[d]} must match the closed form, coordinate by
    coordinate, and T_i^{[d]} must be the full diagonal for i >= 2."""
    if jm.labels is None:
        raise ValidationError("joined measure carries no coordinate labels")
    if jm.actions["T1"].coord_actions != host_kra_expected_t1(jm.labels):
        return False
    d = jm.base.d
    for i in range(2, d + 1):
        if jm.actions[f"T{i}"].coord_actions != (i,) * jm.power:
            return False
    return True


def hk_condition_check(sys: FiniteSystem, f1: Observable) -> bool:
    """Host-Kra analogue of the joining condition: all integrals of
    f_1 o pi_empty against indicator choices on the other 2^d - 1
    coordinates vanish.  When true, verifies the vanishing of the
    indicator-basis exact limits with this f_1."""
    if len(f1) != sys.n:
        raise DimensionMismatch("observable length differs from state count")
    jm = host_kra_tower(sys)[-1]
    e_idx = jm.labels.index(frozenset())
    acc: Dict[StateTuple, Fraction] = {}
    for t, m in jm.mass.items():
        v = f1.values[t[e_idx]]
        if v == 0:
            continue
        rest = t[:e_idx] + t[e_idx + 1 :]
        acc[rest] = acc.get(rest, ZERO) + m * v
    if any(val != 0 for val in acc.values()):
        return False
    for rest in itertools.product(sys.support, repeat=sys.d - 1):
        fs = [f1] + [Observable.indicator(sys.n, x) for x in rest]
        if not exact_limit(sys, fs).is_zero:
            raise InternalInvariantViolation(
                "Host-Kra condition held but a basis limit is nonzero"
            )
    return True
