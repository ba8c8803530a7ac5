import random
from fractions import Fraction

import pytest

from ergolab.errors import (
    MeasureNotPreserved,
    NonCommuting,
    NonProbabilityWeights,
    ValidationError,
)
from ergolab.system import (
    FiniteSystem,
    GroupElement,
    act,
    compose,
    identity_perm,
    invert,
    perm_order,
    perm_power,
    period_box,
    pushforward,
    validate_system,
)

from conftest import cyclic_system


def brute_order(p):
    q = p
    k = 1
    ident = identity_perm(len(p))
    while q != ident:
        q = compose(p, q)
        k += 1
    return k


def test_perm_order_matches_brute_force():
    rng = random.Random(11)
    for _ in range(50):
        n = rng.randint(1, 9)
        p = list(range(n))
        rng.shuffle(p)
        p = tuple(p)
        assert perm_order(p) == brute_order(p)


def test_perm_power_matches_repeated_composition():
    rng = random.Random(12)
    for _ in range(50):
        n = rng.randint(2, 8)
        p = list(range(n))
        rng.shuffle(p)
        p = tuple(p)
        q = identity_perm(n)
        for e in range(12):
            assert perm_power(p, e) == q
            q = compose(p, q)
        assert perm_power(p, -1) == invert(p)


def test_identity_generators_have_unit_orders():
    sys_ = FiniteSystem(
        n=4,
        r=2,
        d=1,
        weights=(Fraction(1, 4),) * 4,
        generators=((identity_perm(4), identity_perm(4)),),
    )
    assert sys_.orders == ((1, 1),)
    assert period_box(sys_).periods == (1, 1)


def test_noncommuting_generators_rejected():
    swap = (1, 0, 2)
    cycle = (1, 2, 0)
    with pytest.raises(NonCommuting) as exc:
        FiniteSystem(
            n=3,
            r=1,
            d=2,
            weights=(Fraction(1, 3),) * 3,
            generators=((swap,), (cycle,)),
        )
    assert exc.value.state == 0


def test_measure_preservation_enforced():
    with pytest.raises(MeasureNotPreserved):
        FiniteSystem(
            n=2,
            r=1,
            d=1,
            weights=(Fraction(1, 3), Fraction(2, 3)),
            generators=(((1, 0),),),
        )


def test_weights_must_be_probability():
    with pytest.raises(NonProbabilityWeights):
        FiniteSystem(
            n=2,
            r=1,
            d=1,
            weights=(Fraction(1, 2), Fraction(1, 3)),
            generators=((identity_perm(2),),),
        )


def test_period_box_cyclic5():
    # both +1 and +2 have order 5 by brute force
    sys_ = cyclic_system(5, [1, 2])
    assert brute_order(sys_.generator(1, 1)) == 5
    assert brute_order(sys_.generator(2, 1)) == 5
    assert period_box(sys_).periods == (5,)


def test_period_box_cyclic6_mixed_steps():
    # lcm(order(+2), order(+3)) = lcm(3, 2) = 6
    sys_ = cyclic_system(6, [2, 3])
    assert brute_order(sys_.generator(1, 1)) == 3
    assert brute_order(sys_.generator(2, 1)) == 2
    assert period_box(sys_).periods == (6,)


def test_act_zero_element_fixes_everything():
    sys_ = cyclic_system(5, [1, 2])
    zero = GroupElement.zero(sys_.r, sys_.d)
    for x in range(5):
        assert act(sys_, zero, x) == x


def test_act_agrees_with_generator_arithmetic():
    rng = random.Random(13)
    sys_ = cyclic_system(7, [1, 3])
    for _ in range(100):
        e1 = rng.randint(-10, 10)
        e2 = rng.randint(-10, 10)
        g = GroupElement((e1, e2))
        for x in range(7):
            assert act(sys_, g, x) == (x + e1 + 3 * e2) % 7


def test_full_perm_is_additive():
    rng = random.Random(14)
    sys_ = cyclic_system(6, [2, 3])
    for _ in range(50):
        a = GroupElement(tuple(rng.randint(-5, 5) for _ in range(2)))
        b = GroupElement(tuple(rng.randint(-5, 5) for _ in range(2)))
        assert sys_.full_perm(a + b) == compose(sys_.full_perm(a), sys_.full_perm(b))


def test_pushforward_zero_element_is_identity():
    sys_ = cyclic_system(5, [1, 2])
    m = (Fraction(1, 2), Fraction(1, 4), Fraction(1, 8), Fraction(1, 16), Fraction(1, 16))
    zero = GroupElement.zero(1, 2)
    assert pushforward(sys_, zero, m) == m


def test_pushforward_moves_point_mass():
    sys_ = cyclic_system(5, [1, 2])
    for x in range(5):
        m = tuple(Fraction(1) if y == x else Fraction(0) for y in range(5))
        g = GroupElement((1, 1))
        out = pushforward(sys_, g, m)
        target = act(sys_, g, x)
        assert out[target] == 1
        assert sum(out) == 1


def test_validate_system_round_trip():
    raw = {
        "n": 5,
        "r": 1,
        "d": 2,
        "weights": ["1/5"] * 5,
        "generators": [
            {"action": 1, "axis": 1, "perm": [1, 2, 3, 4, 0]},
            {"action": 2, "axis": 1, "perm": [2, 3, 4, 0, 1]},
        ],
    }
    sys_ = validate_system(raw)
    assert sys_.n == 5 and sys_.d == 2
    assert sys_.generator(2, 1) == (2, 3, 4, 0, 1)


def test_validate_system_missing_generator():
    raw = {
        "n": 2,
        "r": 1,
        "d": 2,
        "weights": ["1/2", "1/2"],
        "generators": [{"action": 1, "axis": 1, "perm": [1, 0]}],
    }
    with pytest.raises(ValidationError):
        validate_system(raw)


def test_validate_system_bad_perm():
    raw = {
        "n": 3,
        "r": 1,
        "d": 1,
        "weights": ["1/3"] * 3,
        "generators": [{"action": 1, "axis": 1, "perm": [0, 0, 1]}],
    }
    with pytest.raises(ValidationError):
        validate_system(raw)
