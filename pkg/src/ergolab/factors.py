"""Factor lattice: orbit partitions, joins, conditional expectations.

On a finite probability space every (mu-complete) sigma-subalgebra is a
partition of the states, so factors are represented that way.  Partitions
are canonical (cells sorted by least element) so equality is structural.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence, Tuple

from .errors import ValidationError, ZeroWeightCell
from .observables import Observable, ZERO
from .system import FiniteSystem, GroupElement, invert


@dataclass(frozen=True)
class Partition:
    cell_of: Tuple[int, ...]
    cells: Tuple[Tuple[int, ...], ...]

    @staticmethod
    def from_cell_ids(ids: Sequence[int]) -> "Partition":
        """Canonicalize: cells ordered by least member, members sorted."""
        groups: dict = {}
        for x, c in enumerate(ids):
            groups.setdefault(c, []).append(x)
        cells = tuple(
            tuple(sorted(g)) for g in sorted(groups.values(), key=lambda g: min(g))
        )
        cell_of = [0] * len(ids)
        for k, cell in enumerate(cells):
            for x in cell:
                cell_of[x] = k
        return Partition(tuple(cell_of), cells)

    @staticmethod
    def singletons(n: int) -> "Partition":
        return Partition.from_cell_ids(range(n))

    @staticmethod
    def one_cell(n: int) -> "Partition":
        return Partition.from_cell_ids([0] * n)

    @property
    def n(self) -> int:
        return len(self.cell_of)

    @property
    def is_discrete(self) -> bool:
        return len(self.cells) == self.n

    def cell_weights(self, weights: Sequence[Fraction]) -> Tuple[Fraction, ...]:
        return tuple(sum((weights[x] for x in cell), ZERO) for cell in self.cells)

    def refines(self, other: "Partition") -> bool:
        """True if every cell of self sits inside one cell of other."""
        return all(
            len({other.cell_of[x] for x in cell}) == 1 for cell in self.cells
        )


def orbit_partition(n: int, perms: Sequence) -> Partition:
    """Orbits of the group generated by the given permutations of 0..n-1."""
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for p in perms:
        for x in range(n):
            a, b = find(x), find(p[x])
            if a != b:
                parent[b] = a
    return Partition.from_cell_ids([find(x) for x in range(n)])


def isotropy_partition(sys: FiniteSystem, generators: Sequence) -> Partition:
    """Orbit partition of the permutation image of the subgroup spanned by
    the given group elements.  Empty list means the trivial subgroup."""
    perms = []
    for g in generators:
        p = sys.full_perm(g)
        perms.append(p)
        perms.append(invert(p))
    return orbit_partition(sys.n, perms)


def action_subgroup(sys: FiniteSystem, i: int) -> list:
    """Generators of the subgroup acting as T_i (one per axis)."""
    if not 1 <= i <= sys.d:
        raise ValidationError(f"action index {i} out of range 1..{sys.d}")
    return [
        GroupElement.for_action(i, tuple(1 if k == j else 0 for k in range(sys.r)),
                                sys.r, sys.d)
        for j in range(sys.r)
    ]


def action_isotropy(sys: FiniteSystem, i: int) -> Partition:
    """The T_i-isotropy partition (orbits of the action-i generators)."""
    return isotropy_partition(sys, action_subgroup(sys, i))


def difference_isotropy(sys: FiniteSystem, i: int, j: int) -> Partition:
    """Isotropy of the difference action T_i T_j^{-1}, i.e. orbits of the r
    permutations g_{i,k} o g_{j,k}^{-1}."""
    if i == j:
        raise ValidationError("difference isotropy needs two distinct actions")
    gens = []
    for k in range(sys.r):
        unit = tuple(1 if t == k else 0 for t in range(sys.r))
        gens.append(
            GroupElement.for_action(i, unit, sys.r, sys.d)
            + (-GroupElement.for_action(j, unit, sys.r, sys.d))
        )
    return isotropy_partition(sys, gens)


def join(parts: Sequence[Partition]) -> Partition:
    """Common refinement: cells are nonempty intersections of input cells."""
    if not parts:
        raise ValidationError("join needs at least one partition")
    n = parts[0].n
    if any(p.n != n for p in parts):
        raise ValidationError("partitions are over different state sets")
    keys = [tuple(p.cell_of[x] for p in parts) for x in range(n)]
    index = {k: t for t, k in enumerate(dict.fromkeys(keys))}
    return Partition.from_cell_ids([index[k] for k in keys])


def cond_expect(sys: FiniteSystem, f: Observable, part: Partition) -> Observable:
    """Weight-weighted cell average, constant on each cell."""
    if len(f) != sys.n or part.n != sys.n:
        raise ValidationError("observable/partition size mismatch")
    cw = part.cell_weights(sys.weights)
    cell_avgs = []
    for cell, w in zip(part.cells, cw):
        if w == 0:
            raise ZeroWeightCell(f"cell {cell} has zero weight")
        cell_avgs.append(sum((f.values[x] * sys.weights[x] for x in cell), ZERO) / w)
    return Observable(tuple(cell_avgs[part.cell_of[x]] for x in range(sys.n)))


def is_measurable(f: Observable, part: Partition) -> bool:
    return all(
        len({f.values[x] for x in cell}) == 1 for cell in part.cells
    )
