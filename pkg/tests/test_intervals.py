"""Interval arithmetic and the two cost-order relations."""

import random

import pytest

from gridsignals import Interval


def test_construction_and_examples():
    assert Interval(8, 14) == Interval(8, 14)
    assert Interval(3, 3).lo == Interval(3, 3).hi == 3
    with pytest.raises(ValueError):
        Interval(5, 2)


def test_addition():
    assert Interval(1, 2) + Interval(3, 4) == Interval(4, 6)
    assert Interval(0, 0) + Interval(7, 13) == Interval(7, 13)
    assert Interval(2, 5) + Interval(2, 5) == Interval(4, 10)


def test_scale():
    assert Interval(3, 5).scale(2) == Interval(6, 10)
    assert Interval(3, 5).scale(0) == Interval(0, 0)
    assert Interval(7, 13).scale(1) == Interval(7, 13)
    with pytest.raises(ValueError):
        Interval(3, 5).scale(-1)


def test_product():
    assert Interval(2, 3) * Interval(4, 5) == Interval(8, 15)
    assert Interval(0, 0) * Interval(4, 5) == Interval(0, 0)
    assert Interval(1, 1) * Interval(7, 13) == Interval(7, 13)
    with pytest.raises(ValueError):
        Interval(-1, 2) * Interval(0, 1)


def test_center():
    assert Interval(8, 14).center == 11
    assert Interval(3, 3).center == 3
    assert Interval(7, 13).center == 10


def test_certainly_below():
    assert Interval(1, 2).certainly_below(Interval(3, 4))
    assert not Interval(1, 4).certainly_below(Interval(4, 6))  # strict
    assert not Interval(7, 13).certainly_below(Interval(8, 14))  # overlap


def test_equality():
    assert Interval(8, 14) == Interval(8, 14)
    assert Interval(8, 14) != Interval(7, 13)
    assert Interval(3, 3) != Interval(3, 4)


def test_precedes():
    assert Interval(7, 13).precedes(Interval(8, 14))
    assert not Interval(8, 14).precedes(Interval(7, 13))
    # incomparable pair: one interval nested in the other
    assert not Interval(1, 4).precedes(Interval(2, 3))
    assert not Interval(2, 3).precedes(Interval(1, 4))


def _all_intervals(bound):
    return [Interval(lo, hi) for lo in range(bound + 1) for hi in range(lo, bound + 1)]


def test_bridge_property_exhaustive_small():
    """A below B and (C precedes A or C equals A) imply C below B."""
    pool = _all_intervals(4)
    for a in pool:
        for b in pool:
            if not a.certainly_below(b):
                continue
            for c in pool:
                if c.precedes(a) or c == a:
                    assert c.certainly_below(b)


def test_bridge_property_random():
    rng = random.Random(20831)
    for _ in range(20000):
        a = Interval(*sorted((rng.uniform(0, 9), rng.uniform(0, 9))))
        b = Interval(*sorted((rng.uniform(0, 9), rng.uniform(0, 9))))
        c = Interval(*sorted((rng.uniform(0, 9), rng.uniform(0, 9))))
        if a.certainly_below(b) and (c.precedes(a) or c == a):
            assert c.certainly_below(b)


def test_precedes_antisymmetric_and_below_implies_precedes():
    pool = _all_intervals(5)
    for a in pool:
        for b in pool:
            assert not (a.precedes(b) and b.precedes(a))
            if a.certainly_below(b):
                assert a.precedes(b)


def test_arithmetic_keeps_ordering_and_center_additivity():
    rng = random.Random(7)
    for _ in range(2000):
        a = Interval(*sorted((rng.uniform(0, 50), rng.uniform(0, 50))))
        b = Interval(*sorted((rng.uniform(0, 50), rng.uniform(0, 50))))
        k = rng.uniform(0, 10)
        for result in (a + b, a.scale(k), a * b):
            assert result.lo <= result.hi
        assert (a + b).center == pytest.approx(a.center + b.center)
