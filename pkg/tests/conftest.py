import random
from fractions import Fraction

import pytest

from ergolab.observables import Observable
from ergolab.scenario import bundled_scenarios, load_scenario
from ergolab.system import FiniteSystem


def cyclic_system(n, steps, weights=None):
    """Z/n with one rank-1 action per step, each rotating by +step."""
    gens = tuple((tuple((x + s) % n for x in range(n)),) for s in steps)
    return FiniteSystem(
        n=n,
        r=1,
        d=len(steps),
        weights=tuple(weights) if weights else (Fraction(1, n),) * n,
        generators=gens,
    )


def random_observable(rng, n, span=3, max_denom=6):
    return Observable.from_values(
        [
            Fraction(rng.randint(-span, span), rng.randint(1, max_denom))
            for _ in range(n)
        ]
    )


def cell_valued_observable(rng, part, span=3, max_denom=6):
    """Random rational observable constant on the cells of a partition."""
    vals = [
        Fraction(rng.randint(-span, span), rng.randint(1, max_denom))
        for _ in part.cells
    ]
    return Observable.from_values([vals[part.cell_of[x]] for x in range(part.n)])


@pytest.fixture(scope="session")
def corpus():
    return [load_scenario(p) for p in bundled_scenarios()]


@pytest.fixture(scope="session")
def finite_corpus(corpus):
    return [s for s in corpus if s.engine == "finite"]


@pytest.fixture(scope="session")
def torus_scenario(corpus):
    return next(s for s in corpus if s.engine == "torus")


@pytest.fixture
def rng():
    return random.Random(20260823)
