import random
from decimal import Decimal, localcontext

import pytest
from hypothesis import given, settings, strategies as st

from arccover.exactnum import (
    DomainError,
    MixedRadicandError,
    PoleError,
    Q,
    Radical,
    bit_complexity,
    compare,
    eval_lrf,
    radical_normalize,
    squarefree_split,
)


def rad(a, b=0, c=1):
    return radical_normalize(Q(a), Q(b), Q(c))


def decimal_value(x: Radical, prec=120) -> Decimal:
    with localcontext() as ctx:
        ctx.prec = prec
        v = Decimal(int(x.a.numerator)) / Decimal(int(x.a.denominator))
        if x.b != 0:
            v += (
                Decimal(int(x.b.numerator))
                / Decimal(int(x.b.denominator))
                * Decimal(x.c).sqrt()
            )
        return v


class TestRationalOps:
    def test_add(self):
        assert Q(1, 2) + Q(1, 3) == Q(5, 6)

    def test_lowest_terms(self):
        assert Q(2, 4) == Q(1, 2)
        assert Q(2, 4).numerator == 1 and Q(2, 4).denominator == 2

    def test_compare(self):
        assert Q(1, 3) < Q(1, 2)

    def test_div_by_zero(self):
        with pytest.raises((ZeroDivisionError, DomainError)):
            Radical.of(1) / Radical.of(0)


class TestNormalize:
    def test_sqrt8(self):
        x = rad(0, 1, 8)
        assert (x.a, x.b, x.c) == (0, 2, 2)

    def test_b_zero_canonical_c(self):
        x = rad(3, 0, 7)
        assert (x.a, x.b, x.c) == (3, 0, 1)

    def test_rational_radicand_perfect_square(self):
        x = rad(0, 1, Q(9, 4))
        assert x.is_rational() and x.a == Q(3, 2)

    def test_idempotent(self):
        x = rad(Q(2, 3), Q(-5, 7), 50)
        y = radical_normalize(x.a, x.b, x.c)
        assert (x.a, x.b, x.c) == (y.a, y.b, y.c)

    def test_negative_radicand(self):
        with pytest.raises(DomainError):
            rad(0, 1, -2)

    def test_squarefree_split(self):
        assert squarefree_split(8) == (2, 2)
        assert squarefree_split(49) == (7, 1)
        assert squarefree_split(1) == (1, 1)
        assert squarefree_split(12 * 12 * 30) == (12, 30)


class TestCompare:
    def test_sqrt2_gt_one(self):
        assert compare(rad(1, 1, 2), rad(2)) > 0

    def test_five_lt_3sqrt3(self):
        assert compare(rad(5), rad(0, 3, 3)) < 0

    def test_equal_canonical(self):
        assert compare(rad(0, 2, 2), rad(0, 1, 8)) == 0

    def test_two_distinct_radicands(self):
        # sqrt(2) + sqrt(3) vs known decimal orderings
        assert compare(rad(0, 1, 2), rad(0, 1, 3)) < 0
        assert compare(rad(1, 1, 2), rad(0, 1, 5)) > 0  # 2.414 > 2.236
        assert compare(rad(-1, 1, 5), rad(0, 1, 2)) < 0  # 1.236 < 1.414

    def test_three_radicands_rejected(self):
        with pytest.raises(MixedRadicandError):
            (rad(0, 1, 2) + rad(0, 1, 3))

    @settings(max_examples=300, deadline=None)
    @given(
        an=st.integers(-50, 50), ad=st.integers(1, 20),
        bn=st.integers(-50, 50), bd=st.integers(1, 20),
        c=st.integers(0, 60),
        dn=st.integers(-50, 50), dd=st.integers(1, 20),
        en=st.integers(-50, 50), ed=st.integers(1, 20),
        f=st.integers(0, 60),
    )
    def test_matches_decimal_oracle(self, an, ad, bn, bd, c, dn, dd, en, ed, f):
        x = rad(Q(an, ad), Q(bn, bd), c)
        y = rad(Q(dn, dd), Q(en, ed), f)
        got = compare(x, y)
        dx, dy = decimal_value(x), decimal_value(y)
        if abs(dx - dy) > Decimal("1e-50"):
            assert got == (1 if dx > dy else -1)
        else:
            assert got == 0


class TestArithmetic:
    def test_same_field_product(self):
        x = rad(1, 1, 2)
        y = rad(2, -3, 2)
        z = x * y
        # (1 + s)(2 - 3s) = 2 - 3s + 2s - 3*2 = -4 - s
        assert (z.a, z.b, z.c) == (-4, -1, 2)

    def test_inverse(self):
        x = rad(0, 1, 2)
        assert (x.inverse().a, x.inverse().b, x.inverse().c) == (0, Q(1, 2), 2)

    def test_floor(self):
        assert rad(0, 1, 2).floor() == 1
        assert rad(0, -1, 2).floor() == -2
        assert rad(Q(7, 2)).floor() == 3
        assert rad(-3, 2, 2).floor() == -1  # 2*1.414-3 = -0.172


class TestEvalLRF:
    def test_conjugate_example(self):
        # f(x) = (2x+1)/(x+1) at sqrt(2): expected 3 - sqrt(2)
        # oracle check: (2*sqrt2+1)/(sqrt2+1) = (2*1.41421356...+1)/(2.41421356...)
        got = eval_lrf(2, 1, 1, 1, rad(0, 1, 2))
        assert (got.a, got.b, got.c) == (3, -1, 2)
        with localcontext() as ctx:
            ctx.prec = 120
            want = decimal_value(rad(3, -1, 2))
            s2 = decimal_value(rad(0, 1, 2))
            have = (2 * s2 + 1) / (s2 + 1)
            assert abs(want - have) < Decimal("1e-100")

    def test_identity(self):
        x = rad(Q(7, 3), Q(1, 2), 5)
        y = eval_lrf(1, 0, 0, 1, x)
        assert (y.a, y.b, y.c) == (x.a, x.b, x.c)

    def test_reciprocal_sqrt2(self):
        y = eval_lrf(0, 1, 1, 0, rad(0, 1, 2))
        assert (y.a, y.b, y.c) == (0, Q(1, 2), 2)

    def test_pole(self):
        with pytest.raises(PoleError):
            eval_lrf(1, 0, 1, -1, rad(1))

    def test_bit_growth_documented_bound(self):
        rng = random.Random(7)
        for _ in range(300):
            coeffs = [Q(rng.randint(-15, 15), rng.randint(1, 15)) for _ in range(4)]
            p, q, r, s = coeffs
            if p * s - q * r == 0:
                continue
            x = rad(
                Q(rng.randint(-15, 15), rng.randint(1, 15)),
                Q(rng.randint(-15, 15), rng.randint(1, 15)),
                rng.randint(0, 30),
            )
            try:
                y = eval_lrf(p, q, r, s, x)
            except PoleError:
                continue
            # derivable worst case for the gcd-reduced conjugate form
            bound = 12 * (bit_complexity(coeffs) + bit_complexity(x)) + 8
            assert bit_complexity(y) <= bound


class TestBitComplexity:
    def test_integer(self):
        assert bit_complexity(5) == 3

    def test_rational(self):
        assert bit_complexity(Q(7, 16)) == 5

    def test_radical(self):
        assert bit_complexity(rad(1, 2, 3)) == 2

    def test_zero(self):
        assert bit_complexity(0) == 0


class TestProperties:
    @settings(max_examples=200, deadline=None)
    @given(
        a=st.fractions(min_value=-10, max_value=10),
        b=st.fractions(min_value=-10, max_value=10),
        c=st.integers(0, 40),
    )
    def test_normalize_idempotent(self, a, b, c):
        x = radical_normalize(Q(a.numerator, a.denominator), Q(b.numerator, b.denominator), c)
        y = radical_normalize(x.a, x.b, x.c)
        assert (x.a, x.b, x.c) == (y.a, y.b, y.c)

    def test_total_order_transitive_sample(self):
        rng = random.Random(3)
        vals = [
            rad(Q(rng.randint(-9, 9), rng.randint(1, 9)),
                Q(rng.randint(-9, 9), rng.randint(1, 9)),
                rng.randint(0, 20))
            for _ in range(40)
        ]
        svals = sorted(vals)
        for i in range(len(svals) - 1):
            assert compare(svals[i], svals[i + 1]) <= 0
