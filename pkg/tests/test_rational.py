import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ibcdof.rational import (INF, SequenceError, Side, as_rat, c_limit, c_sequence,
                             d_boundary, format_rat, is_finite_sequence, kbar,
                             parse_rat, pq_sequence, rat_div)


# -- infinity and parsing -----------------------------------------------------

def test_inf_ordering_and_arithmetic():
    assert INF > Fraction(10 ** 9)
    assert not INF < 3
    assert INF == INF
    assert rat_div(5, INF) == 0
    assert rat_div(3, 0) is INF
    with pytest.raises(ZeroDivisionError):
        rat_div(0, 0)


@pytest.mark.parametrize("text, expected", [
    ("7", Fraction(7)),
    ("7/2", Fraction(7, 2)),
    (" 14/4 ", Fraction(7, 2)),
    ("inf", INF),
])
def test_parse_rat(text, expected):
    assert parse_rat(text) == expected


@pytest.mark.parametrize("text", ["", "x", "1/0", "1/2/3"])
def test_parse_rat_rejects(text):
    with pytest.raises(ValueError):
        parse_rat(text)


@pytest.mark.parametrize("value, expected", [
    (Fraction(3), "3/1"), (Fraction(85, 27), "85/27"), (INF, "inf"), (0, "0/1"),
])
def test_format_rat(value, expected):
    assert format_rat(value) == expected


@given(st.fractions(min_value=0, max_value=10 ** 6))
def test_format_parse_round_trip(x):
    assert parse_rat(format_rat(x)) == x


def test_as_rat_float_inf():
    assert as_rat(float("inf")) is INF
    assert as_rat(INF) is INF
    assert as_rat(3) == Fraction(3)


# -- kbar ---------------------------------------------------------------------

@pytest.mark.parametrize("K, n, expected", [(2, 0, 2), (2, 1, 1), (1, 5, 1), (3, 4, 3), (3, 7, 1)])
def test_kbar(K, n, expected):
    assert kbar(K, n) == expected


# -- pq pairs -----------------------------------------------------------------

@pytest.mark.parametrize("G, K, side, n_max, ps, qs", [
    (3, 1, Side.A, 3, (-1, 0, 1, 2, 3), (0, 1, 2, 3, 4)),
    (3, 2, Side.A, 3, (-1, 0, 1, 2, 7), (0, 1, 4, 7, 24)),
    (3, 1, Side.B, 3, (0, 1, 2, 3, 4), (-1, 0, 1, 2, 3)),
    (4, 1, Side.B, 2, (0, 1, 3, 8), (-1, 0, 1, 3)),
])
def test_pq_sequence_frozen(G, K, side, n_max, ps, qs):
    pairs = pq_sequence(G, K, side, n_max)
    assert tuple(p.p for p in pairs) == ps
    assert tuple(p.q for p in pairs) == qs
    assert [p.n for p in pairs] == list(range(-1, n_max + 1))


@pytest.mark.parametrize("K, length", [(1, 3), (2, 4), (3, 6)])
@pytest.mark.parametrize("side", [Side.A, Side.B])
def test_finite_sequences_stop(K, length, side):
    assert is_finite_sequence(2, K)
    seq = c_sequence(2, K, side, 50)
    assert len(seq) == length
    assert len(seq) <= 6


@pytest.mark.parametrize("G, K", [(2, 4), (2, 5), (3, 1), (3, 2), (5, 4)])
def test_infinite_sequences(G, K):
    assert not is_finite_sequence(G, K)
    assert len(c_sequence(G, K, Side.A, 20)) == 21


def test_pq_sequence_rejects_bad_input():
    with pytest.raises(SequenceError):
        pq_sequence(3, 1, Side.A, -1)
    with pytest.raises((SequenceError, ValueError)):
        pq_sequence(1, 1, Side.A, 2)


# -- C-values -----------------------------------------------------------------

@pytest.mark.parametrize("G, K, side, n_max, expected", [
    (2, 1, Side.A, 2, [INF, Fraction(1), Fraction(0)]),
    (3, 2, Side.A, 3, [INF, Fraction(4), Fraction(7, 2), Fraction(24, 7)]),
    (2, 2, Side.A, 3, [INF, Fraction(2), Fraction(1), Fraction(0)]),
    (3, 1, Side.B, 3, [Fraction(0), Fraction(1, 2), Fraction(2, 3), Fraction(3, 4)]),
])
def test_c_sequence_frozen(G, K, side, n_max, expected):
    assert c_sequence(G, K, side, n_max) == expected


@pytest.mark.parametrize("G, K, side, expected", [
    (3, 2, Side.A, 2 + math.sqrt(2)),
    (3, 2, Side.B, 2 - math.sqrt(2)),
    (3, 1, Side.A, 1.0),
    (3, 1, Side.B, 1.0),
])
def test_c_limit(G, K, side, expected):
    assert c_limit(G, K, side) == pytest.approx(expected, rel=1e-12)


def test_c_limit_finite_sequence_raises():
    with pytest.raises(SequenceError):
        c_limit(2, 1, Side.A)


# -- D-values -----------------------------------------------------------------

@pytest.mark.parametrize("G, K, side, n, expected", [
    (3, 1, Side.B, 2, Fraction(5, 7)),
    (3, 2, Side.A, 1, Fraction(11, 3)),
    (3, 2, Side.A, 0, Fraction(6)),
])
def test_d_boundary_frozen(G, K, side, n, expected):
    assert d_boundary(G, K, side, n) == expected


def test_d_boundary_past_sequence_end():
    with pytest.raises(SequenceError):
        d_boundary(2, 1, Side.A, 2)


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 6), st.integers(1, 5), st.sampled_from([Side.A, Side.B]),
       st.integers(0, 8))
def test_d_between_brackets(G, K, side, n):
    """D_n sits between C_n and C_{n+1}."""
    seq = c_sequence(G, K, side, n + 1)
    if len(seq) < n + 2:
        return
    d = d_boundary(G, K, side, n)
    lo, hi = sorted([seq[n], seq[n + 1]])
    assert lo <= d <= hi
