"""Exact-arithmetic substrate: canonical form, truncation, the rounding
map, and best-approximation intervals."""

import itertools

import pytest

from omegaphase.dyadic import BitString, Dyadic, interval_Im, round_up_mth, truncate


def test_canonical_form():
    assert Dyadic(4, 2) == Dyadic(1, 0)
    assert Dyadic(6, 3) == Dyadic(3, 2)
    assert Dyadic(0, 5).exponent == 0
    d = Dyadic(12, 4)
    assert d.numerator == 3 and d.exponent == 2


def test_parse_and_print_round_trip():
    for text, num, exp in [
        ("3/4", 3, 2),
        ("3/2^2", 3, 2),
        ("0.101", 5, 3),
        ("-0.11", -3, 2),
        ("1.01", 5, 2),
        ("7", 7, 0),
        ("0", 0, 0),
    ]:
        d = Dyadic.parse(text)
        assert d == Dyadic(num, exp)
        assert Dyadic.parse(d.as_ratio_string()) == d
        assert Dyadic.parse(d.to_binary_string()) == d


def test_parse_rejects_non_dyadic():
    with pytest.raises(ValueError):
        Dyadic.parse("1/3")
    with pytest.raises(ValueError):
        Dyadic.parse("abc")


def test_order_agrees_with_fractions():
    values = [Dyadic(k, e) for e in range(0, 5) for k in range(-8, 9)]
    for a, b in itertools.product(values, repeat=2):
        assert (a < b) == (a.as_fraction() < b.as_fraction())
        assert (a == b) == (a.as_fraction() == b.as_fraction())


def test_arithmetic_closure():
    a, b = Dyadic(5, 3), Dyadic(3, 1)
    assert a + b == Dyadic(17, 3)
    assert b - a == Dyadic(7, 3)
    assert a * b == Dyadic(15, 4)
    assert (a - a) == 0
    assert (Dyadic(7, 2)).mod1() == Dyadic(3, 2)
    assert (-Dyadic(1, 2)).mod1() == Dyadic(3, 2)


def test_truncate_examples():
    assert truncate(Dyadic.parse("0.101"), 2) == Dyadic(1, 1)
    assert truncate(Dyadic(3, 2), 2) == Dyadic(3, 2)
    # halting set {"0", "11"} by hand: 2^-1 + 2^-2 = 3/4; drop to one bit
    omega_toy = Dyadic(1, 1) + Dyadic(1, 2)
    assert omega_toy == Dyadic(3, 2)
    assert truncate(omega_toy, 1) == Dyadic(1, 1)


def test_truncate_bounds_and_composition():
    grid = [Dyadic(k, 6) for k in range(64)]
    for x in grid:
        for s in range(0, 8):
            t = truncate(x, s)
            assert t <= x
            assert (x - t) < Dyadic(1, s)
            for u in range(0, 8):
                assert truncate(t, u) == truncate(x, min(s, u))


def test_round_up_mth_examples():
    assert round_up_mth(Dyadic.parse("0.0111"), 2) == Dyadic.parse("0.1011")
    assert round_up_mth(Dyadic.parse("0.0100"), 2) == Dyadic.parse("0.0100")
    # wraps modulo 1
    assert round_up_mth(Dyadic.parse("0.1110"), 1) == Dyadic.parse("0.0110")


def test_round_up_mth_distance_property():
    for n in range(2, 9):
        for z in range(1 << n):
            x = Dyadic(z, n)
            for m in range(1, n):
                moved = (round_up_mth(x, m, n_bits=n) - x).mod1()
                assert moved in (Dyadic(0), Dyadic(1, m))


def test_round_up_mth_rejects_bad_precision():
    with pytest.raises(ValueError):
        round_up_mth(Dyadic(1, 2), 2, n_bits=2)  # m >= declared length
    with pytest.raises(ValueError):
        round_up_mth(Dyadic(1, 4), 1, n_bits=3)  # value needs more bits
    with pytest.raises(ValueError):
        round_up_mth(Dyadic(3, 1), 1)  # outside [0, 1)


def test_interval_examples():
    assert interval_Im(Dyadic(1, 1), 1) == (Dyadic(1, 1),)
    assert interval_Im(Dyadic(15, 4), 2) == (Dyadic(0), Dyadic(3, 2))
    assert interval_Im(Dyadic(5, 3), 2) == (Dyadic(1, 1), Dyadic(3, 2))
    assert interval_Im(Dyadic(0), 3) == (Dyadic(0),)


def test_interval_singleton_iff_on_grid():
    for m in range(1, 5):
        for z in range(1 << 6):
            phi = Dyadic(z, 6)
            members = interval_Im(phi, m)
            on_grid = (phi * Dyadic(1 << m)).is_integer()
            assert (len(members) == 1) == on_grid
            for v in members:
                assert 0 <= v < 1


def test_rounding_lemma_small_grids():
    # estimates within 2^-(m+1) (mod 1) round-truncate into the target set
    for n in range(2, 9):
        size = 1 << n
        for m in range(1, n):
            for w in range(size):
                phi = Dyadic(w, n)
                members = set(interval_Im(phi, m))
                radius = 1 << (n - m - 1)
                for off in range(-radius + 1, radius):
                    z = (w + off) % size
                    image = truncate(round_up_mth(Dyadic(z, n), m, n_bits=n), m)
                    assert image in members


def test_bitstring_round_trip():
    for text in ["", "0", "1", "0110", "0000", "111111"]:
        b = BitString(text)
        assert str(b) == text
        assert len(b) == len(text)
        if text:
            assert BitString.from_dyadic(b.to_dyadic(), len(text)) == b
    assert BitString("").to_dyadic() == Dyadic(0)
    assert BitString.from_dyadic(Dyadic(1, 3), 5) == BitString("00100")
    with pytest.raises(ValueError):
        BitString("012")
    with pytest.raises(ValueError):
        BitString.from_dyadic(Dyadic(1, 5), 3)


def test_bitstring_prefix_and_zero():
    assert BitString("0").is_proper_prefix_of(BitString("01"))
    assert not BitString("01").is_proper_prefix_of(BitString("01"))
    assert not BitString("1").is_proper_prefix_of(BitString("01"))
    assert BitString("").is_proper_prefix_of(BitString("0"))
    assert BitString("000").all_zero() and BitString("").all_zero()
    assert not BitString("010").all_zero()


def test_fractional_bits():
    x = Dyadic.parse("0.1011")
    assert [x.bit(j) for j in range(1, 7)] == [1, 0, 1, 1, 0, 0]
