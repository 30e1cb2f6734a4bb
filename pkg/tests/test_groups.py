"""Group arithmetic: laws, word metric, ball enumeration."""

import itertools
import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from convdom import Cyclic, DiscreteHeisenberg, HeisenbergMod, IntegerLattice, parse_group


def products_oracle(group, radius):
    """Independent ball oracle: all products of at most `radius` generators."""
    current = {group.identity}
    seen = {group.identity}
    for _ in range(radius):
        current = {group.multiply(p, g) for p in current for g in group.generators()}
        seen |= current
    return seen


def l1_ball_count(d, r):
    """Closed-form lattice ball count: sum_k 2^k C(d,k) C(r,k)."""
    return sum(2**k * math.comb(d, k) * math.comb(r, k) for k in range(0, min(d, r) + 1))


FINITE_GROUPS = [Cyclic(1), Cyclic(2), Cyclic(5), Cyclic(6), HeisenbergMod(2), HeisenbergMod(3)]
INFINITE_GROUPS = [IntegerLattice(1), IntegerLattice(2), IntegerLattice(3), DiscreteHeisenberg()]


@pytest.mark.parametrize("group", FINITE_GROUPS, ids=str)
def test_finite_group_axioms_exhaustive(group):
    elements = group.elements()
    assert len(elements) == group.order
    assert len(set(elements)) == group.order
    e = group.identity
    for x in elements:
        assert group.multiply(e, x) == x
        assert group.multiply(x, e) == x
        assert group.multiply(x, group.inverse(x)) == e
    for x, y, z in itertools.product(elements, repeat=3):
        assert group.multiply(group.multiply(x, y), z) == group.multiply(x, group.multiply(y, z))


@pytest.mark.parametrize("group", INFINITE_GROUPS, ids=str)
def test_infinite_group_axioms_sampled(group):
    import numpy as np

    rng = np.random.default_rng(0)
    points = group.ball(4)
    e = group.identity
    for _ in range(1000):
        x, y, z = (points[int(i)] for i in rng.integers(len(points), size=3))
        assert group.multiply(group.multiply(x, y), z) == group.multiply(x, group.multiply(y, z))
        assert group.multiply(x, group.inverse(x)) == e
        assert group.multiply(e, x) == x


@pytest.mark.parametrize("group", FINITE_GROUPS + INFINITE_GROUPS, ids=str)
def test_word_metric_properties(group):
    import numpy as np

    rng = np.random.default_rng(1)
    points = group.elements() if group.is_finite else group.ball(4)
    assert group.word_length(group.identity) == 0
    for _ in range(300):
        x, y = (points[int(i)] for i in rng.integers(len(points), size=2))
        lx, ly = group.word_length(x), group.word_length(y)
        assert group.word_length(group.multiply(x, y)) <= lx + ly
        assert group.word_length(group.inverse(x)) == lx
        if x != group.identity:
            assert lx > 0


def test_lattice_examples():
    z2 = IntegerLattice(2)
    assert z2.multiply((1, 2), (3, 4)) == (4, 6)
    assert z2.inverse((1, -3)) == (-1, 3)
    assert z2.word_length((2, -1)) == 3
    z1 = IntegerLattice(1)
    assert z1.ball(2) == [(0,), (-1,), (1,), (-2,), (2,)]
    assert len(z2.ball(1)) == 5


def test_lattice_ball_matches_closed_form():
    for d in (1, 2, 3):
        group = IntegerLattice(d)
        sizes = [len(group.ball(r)) for r in range(6)]
        assert sizes == [l1_ball_count(d, r) for r in range(6)]
        assert sizes == sorted(sizes)


def test_heisenberg_multiplication_and_inverse():
    h = DiscreteHeisenberg()
    assert h.multiply((1, 0, 0), (0, 1, 0)) == (1, 1, 1)
    for a, b, c in itertools.product(range(-2, 3), repeat=3):
        assert h.inverse((a, b, c)) == (-a, -b, a * b - c)
        assert h.multiply((a, b, c), h.inverse((a, b, c))) == (0, 0, 0)


def test_heisenberg_word_lengths():
    h = DiscreteHeisenberg()
    # The central generator is a commutator: shortest word has four letters.
    assert h.word_length((0, 0, 1)) == 4
    assert h.word_length((1, 0, 0)) == 1
    ball2 = h.ball(2)
    assert ball2 == sorted(ball2, key=lambda p: (h.word_length(p), p))
    assert set(ball2) == products_oracle(h, 2)
    assert len(ball2) == 17


def test_ball_ordering_and_monotonicity():
    for group in (IntegerLattice(2), DiscreteHeisenberg(), HeisenbergMod(3), Cyclic(6)):
        previous = 0
        for r in range(4):
            ball = group.ball(r)
            assert set(ball) == products_oracle(group, r)
            assert len(ball) >= previous
            previous = len(ball)
            assert ball == sorted(ball, key=lambda p: (group.word_length(p), p))


def test_cyclic_examples():
    z5 = Cyclic(5)
    assert z5.multiply((3,), (4,)) == (2,)
    assert z5.inverse((2,)) == (3,)
    assert z5.word_length((3,)) == 2
    assert [z5.word_length((k,)) for k in range(5)] == [0, 1, 2, 2, 1]


def test_heisenberg_mod_p_enumeration():
    hp = HeisenbergMod(3)
    assert len(hp.elements()) == 27
    assert hp.multiply((2, 2, 2), (2, 2, 2)) == (1, 1, (2 + 2 + 4) % 3)
    with pytest.raises(ValueError):
        HeisenbergMod(4)


def test_serialization_round_trip():
    for name in ("Z", "Z^2", "Z^3", "Z/5", "H3(Z)", "H3(Z/3)"):
        group = parse_group(name)
        assert parse_group(group.name) == group
    assert parse_group("Z^1") == parse_group("Z")
    with pytest.raises(ValueError):
        parse_group("F_2")
    with pytest.raises(ValueError):
        parse_group("Z/0")


def test_dimension_mismatch_rejected():
    z2 = IntegerLattice(2)
    with pytest.raises(ValueError):
        z2.multiply((1, 2, 3), (0, 0))
    with pytest.raises(ValueError):
        z2.inverse((1,))


coords = st.integers(min_value=-30, max_value=30)


@settings(max_examples=200, deadline=None)
@given(st.tuples(coords, coords, coords), st.tuples(coords, coords, coords), st.tuples(coords, coords, coords))
def test_heisenberg_associativity_hypothesis(x, y, z):
    h = DiscreteHeisenberg()
    assert h.multiply(h.multiply(x, y), z) == h.multiply(x, h.multiply(y, z))


@settings(max_examples=200, deadline=None)
@given(st.tuples(coords, coords), st.tuples(coords, coords))
def test_lattice_word_metric_hypothesis(x, y):
    z2 = IntegerLattice(2)
    assert z2.word_length(z2.multiply(x, y)) <= z2.word_length(x) + z2.word_length(y)
    assert z2.word_length(z2.inverse(x)) == z2.word_length(x)
