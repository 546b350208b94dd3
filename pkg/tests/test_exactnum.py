"""Tests for rationals, the quadratic field Q[sqrt(D)] and integer helpers."""

import random
from fractions import Fraction

import pytest

from smoothdual.exactnum import (
    DeltaMismatch,
    QuadNum,
    as_rational,
    binomial,
    format_rational,
    int_root,
    parse_rational,
    quad_arith,
    quad_sign,
)


def q(a, b, delta=2):
    return QuadNum(Fraction(a), Fraction(b), delta)


def _random_quad(rng: random.Random, delta: int) -> QuadNum:
    return QuadNum(
        Fraction(rng.randint(-20, 20), rng.randint(1, 9)),
        Fraction(rng.randint(-20, 20), rng.randint(1, 9)),
        delta,
    )


class TestQuadArith:
    """Field operations on a + b*sqrt(D)."""

    def test_difference_of_squares(self):
        assert quad_arith(q(1, 1), q(1, -1), "mul") == -1

    def test_root_squared_is_radicand(self):
        assert q(0, 1) ** 2 == 2

    def test_inverse_of_one_plus_root_two(self):
        assert quad_arith(QuadNum.of(1, 2), q(1, 1), "div") == q(-1, 1)
        assert q(1, 1) * q(-1, 1) == 1

    def test_negative_power(self):
        assert q(1, 1) ** -2 == (q(-1, 1)) ** 2

    def test_delta_mismatch(self):
        with pytest.raises(DeltaMismatch):
            quad_arith(q(1, 1, 2), q(1, 1, 3), "add")

    def test_division_by_zero(self):
        with pytest.raises(ZeroDivisionError):
            quad_arith(q(1, 1), QuadNum.zero(2), "div")

    def test_unknown_operation(self):
        with pytest.raises(ValueError, match="Unknown"):
            quad_arith(q(1, 1), q(1, 1), "pow")

    def test_perfect_square_radicand_folds(self):
        x = QuadNum(1, 2, 4)
        assert x.a == 5
        assert x.b == 0
        assert x == 5

    def test_invalid_radicand(self):
        with pytest.raises(ValueError):
            QuadNum(1, 1, 0)

    def test_mixed_with_rationals(self):
        assert q(1, 1) + Fraction(1, 2) == q(Fraction(3, 2), 1)
        assert 1 - q(1, 1) == q(0, -1)
        assert 2 / q(0, 1) == q(0, 1)

    def test_hash_matches_rational_value(self):
        assert hash(QuadNum.of(Fraction(3, 4), 2)) == hash(Fraction(3, 4))

    @pytest.mark.parametrize("delta", [2, 3, 5])
    def test_field_axioms_random(self, delta):
        rng = random.Random(1000 + delta)
        for _ in range(10_000):
            x, y, z = (_random_quad(rng, delta) for _ in range(3))
            assert (x + y) * z == x * z + y * z
            assert x * y == y * x
            if not x.is_zero():
                assert x * x.inverse() == 1


class TestQuadSign:
    """Exact sign decisions."""

    def test_examples(self):
        assert quad_sign(q(1, -1)) == -1
        assert quad_sign(q(3, -2)) == 1
        assert quad_sign(q(0, 0)) == 0
        assert quad_sign(q(-3, 2)) == -1

    def test_ordering(self):
        assert q(1, -1) < 0 < q(3, -2)
        assert abs(q(1, -1)) == q(-1, 1)
        assert max(q(0, 1), QuadNum.of(Fraction(3, 2), 2)) == QuadNum.of(Fraction(3, 2), 2)

    @pytest.mark.parametrize("delta", [2, 3, 5])
    def test_sign_agrees_with_enclosure(self, delta):
        rng = random.Random(2000 + delta)
        for _ in range(10_000):
            x = _random_quad(rng, delta)
            if x.is_zero():
                assert quad_sign(x) == 0
                continue
            bits = 16
            box = x.enclose(bits)
            while box.lo <= 0 <= box.hi:
                bits *= 2
                box = x.enclose(bits)
            assert quad_sign(x) == (1 if box.lo > 0 else -1)


class TestSerialization:
    def test_format_always_has_denominator(self):
        assert format_rational(5) == "5/1"
        assert format_rational(Fraction(-6, 8)) == "-3/4"

    def test_parse(self):
        assert parse_rational("-3/4") == Fraction(-3, 4)
        assert parse_rational(" 7 ") == 7
        assert as_rational("2/6") == Fraction(1, 3)

    @pytest.mark.parametrize("text", ["x/2", "1/0", "", "1.5"])
    def test_parse_rejects(self, text):
        with pytest.raises(ValueError):
            parse_rational(text)

    def test_quadnum_json(self):
        x = q(Fraction(1, 2), Fraction(-1, 2))
        assert x.to_json() == {"a": "1/2", "b": "-1/2", "delta": 2}
        assert QuadNum.from_json(x.to_json()) == x

    def test_str(self):
        assert str(q(1, -2)) == "1 - 2*sqrt(2)"
        assert str(QuadNum.of(Fraction(1, 3), 2)) == "1/3"


class TestIntegerHelpers:
    @pytest.mark.parametrize(("n", "k", "expected"), [(9, 3, 2), (81, 3, 4), (65, 6, 2), (1, 5, 1), (4225, 3, 16)])
    def test_int_root_examples(self, n, k, expected):
        assert int_root(n, k) == expected

    def test_int_root_bracket(self):
        rng = random.Random(7)
        for _ in range(500):
            n = rng.randint(1, 10**30)
            k = rng.randint(1, 12)
            r = int_root(n, k)
            assert r**k <= n < (r + 1) ** k

    def test_int_root_rejects(self):
        with pytest.raises(ValueError):
            int_root(0, 2)
        with pytest.raises(ValueError):
            int_root(5, 0)

    def test_binomial(self):
        assert binomial(2, 1) == 2
        assert binomial(18, 9) == 48620
        assert binomial(5, 6) == 0
        assert binomial(5, -1) == 0
        for m in range(30):
            for k in range(m + 1):
                assert binomial(m, k) == binomial(m, m - k)
