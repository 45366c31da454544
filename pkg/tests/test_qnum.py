"""Fixed-point kernel tests: frozen examples plus arithmetic properties."""

import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from softermax import (
    INPUT_FMT,
    OUTPUT_FMT,
    POWSUM_FMT,
    RECIP_FMT,
    UNNORMED_FMT,
    QFormat,
    QValue,
    add_sat,
    ceil_to_int,
    mul,
    quantize,
    shift_left_sat,
    shift_right,
)

Q106 = POWSUM_FMT
Q62 = INPUT_FMT
Q115 = UNNORMED_FMT
Q17 = OUTPUT_FMT


def fmt_strategy():
    return st.builds(
        QFormat,
        int_bits=st.integers(1, 12),
        frac_bits=st.integers(0, 16),
        signed=st.booleans(),
    )


def raw_in(fmt: QFormat):
    return st.integers(fmt.min_raw, fmt.max_raw)


class TestQFormat:
    def test_table_format_ranges(self):
        assert (Q62.min_raw, Q62.max_raw) == (-128, 127)
        assert (Q62.min_value, Q62.max_value) == (-32.0, 31.75)
        assert (Q115.min_raw, Q115.max_raw) == (0, 65535)
        assert Q106.max_value == 1023.984375
        assert Q17.max_value == 1.9921875

    def test_invalid_formats_rejected(self):
        with pytest.raises(ValueError):
            QFormat(0, 4)
        with pytest.raises(ValueError):
            QFormat(4, -1)
        with pytest.raises(ValueError):
            QFormat(20, 20)

    def test_qvalue_range_enforced(self):
        with pytest.raises(ValueError):
            QValue(128, Q62)
        with pytest.raises(ValueError):
            QValue(-1, Q115)


class TestQuantize:
    def test_exact_value(self):
        q = quantize(1.75, Q106)
        assert q.raw == 112 and q.value == 1.75

    def test_saturates_high(self):
        q = quantize(100.0, Q62)
        assert q.raw == 127 and q.value == 31.75

    def test_saturates_low(self):
        assert quantize(-100.0, Q62).raw == -128

    def test_irrational_rounding(self):
        # round(2**0.75 * 2**15) = 55109, nearest even on the raw grid
        assert quantize(2.0 ** 0.75, Q115).raw == 55109

    def test_ties_to_even(self):
        # 0.3125 * 4 = 1.25 -> 1; 0.375 * 4 = 1.5 -> 2; 0.625 * 4 = 2.5 -> 2
        assert quantize(0.375, Q62).raw == 2
        assert quantize(0.625, Q62).raw == 2

    def test_non_finite_rejected(self):
        for bad in (math.inf, -math.inf, math.nan):
            with pytest.raises(ValueError, match="non-finite"):
                quantize(bad, Q62)

    @given(fmt=fmt_strategy(), data=st.data())
    @settings(max_examples=200)
    def test_round_trip(self, fmt, data):
        raw = data.draw(raw_in(fmt))
        assert quantize(Fraction(raw, fmt.scale), fmt).raw == raw

    def test_round_trip_exhaustive_8_and_16_bit(self):
        for fmt in (Q62, Q17, RECIP_FMT, Q115, Q106, QFormat(8, 8, signed=True)):
            for raw in range(fmt.min_raw, fmt.max_raw + 1):
                assert quantize(Fraction(raw, fmt.scale), fmt).raw == raw

    @given(
        a=st.floats(-2000, 2000, allow_nan=False),
        b=st.floats(-2000, 2000, allow_nan=False),
        fmt=fmt_strategy(),
    )
    @settings(max_examples=300)
    def test_monotone(self, a, b, fmt):
        lo, hi = sorted((a, b))
        assert quantize(lo, fmt).raw <= quantize(hi, fmt).raw


class TestAddSat:
    def test_basic(self):
        assert add_sat(quantize(1.0, Q106), quantize(0.5, Q106)).value == 1.5

    def test_saturation_at_max(self):
        s = add_sat(quantize(1023.0, Q106), quantize(10.0, Q106))
        assert s.value == 1023.984375

    def test_running_sum_example(self):
        assert add_sat(quantize(0.75, Q106), quantize(1.0, Q106)).value == 1.75

    def test_format_mismatch(self):
        with pytest.raises(ValueError, match="mismatch"):
            add_sat(quantize(1.0, Q106), quantize(1.0, Q115))

    @given(data=st.data(), fmt=fmt_strategy())
    @settings(max_examples=200)
    def test_commutative(self, data, fmt):
        a = QValue(data.draw(raw_in(fmt)), fmt)
        b = QValue(data.draw(raw_in(fmt)), fmt)
        assert add_sat(a, b) == add_sat(b, a)

    @given(data=st.data(), fmt=fmt_strategy())
    @settings(max_examples=200)
    def test_associative_without_saturation(self, data, fmt):
        # guard the draw so no partial sum can leave the raw range
        third = st.integers(fmt.min_raw // 3, fmt.max_raw // 3)
        a, b, c = (QValue(data.draw(third), fmt) for _ in range(3))
        assert add_sat(add_sat(a, b), c) == add_sat(a, add_sat(b, c))


class TestMul:
    def test_identity(self):
        r = mul(quantize(1.0, Q115), quantize(1.0, Q17), Q17)
        assert r.value == 1.0

    def test_powers_of_two(self):
        r = mul(quantize(0.5, Q115), quantize(0.5, Q17), Q17)
        assert r.value == 0.25

    def test_floor_truncation(self):
        r = mul(quantize(0.42044, Q115), quantize(0.5703125, Q17), Q17)
        assert r.raw == 30 and r.value == 0.234375

    @given(data=st.data())
    @settings(max_examples=300)
    def test_exact_in_wide_format(self, data):
        # with enough fractional bits the rescaling shift is <= 0, so the
        # product must equal the rational product exactly
        a = QValue(data.draw(st.integers(0, 255)), RECIP_FMT)
        b = QValue(data.draw(st.integers(-128, 127)), QFormat(1, 7, signed=True))
        wide = QFormat(4, 14, signed=True)
        r = mul(a, b, wide)
        assert r.as_fraction() == a.as_fraction() * b.as_fraction()

    @given(data=st.data())
    @settings(max_examples=300)
    def test_floor_against_fraction_oracle(self, data):
        a = QValue(data.draw(st.integers(0, 65535)), Q115)
        b = QValue(data.draw(st.integers(0, 255)), RECIP_FMT)
        r = mul(a, b, Q17)
        exact = a.as_fraction() * b.as_fraction()
        floored = Fraction(math.floor(exact * Q17.scale), Q17.scale)
        assert r.as_fraction() == min(floored, Fraction(Q17.max_raw, Q17.scale))


class TestShifts:
    def test_shift_right_example(self):
        assert shift_right(quantize(1.5, Q106), 1).value == 0.75

    def test_shift_right_identity(self):
        q = quantize(1.0, Q115)
        assert shift_right(q, 0) == q

    def test_shift_right_floor(self):
        assert shift_right(QValue(55109, Q115), 2).raw == 13777

    def test_shift_right_negative_raw_floor(self):
        assert shift_right(QValue(-3, Q62), 1).raw == -2

    def test_shift_right_beyond_width(self):
        assert shift_right(QValue(65535, Q115), 40).raw == 0
        assert shift_right(QValue(-128, Q62), 40).raw == -1

    def test_negative_amount_rejected(self):
        with pytest.raises(ValueError):
            shift_right(quantize(1.0, Q115), -1)
        with pytest.raises(ValueError):
            shift_left_sat(quantize(1.0, Q115), -1)

    def test_shift_left_sat(self):
        assert shift_left_sat(quantize(0.5, Q17), 1).value == 1.0
        assert shift_left_sat(quantize(1.0, Q17), 3).value == 1.9921875
        assert shift_left_sat(quantize(0.25, Q106), 2).value == 1.0

    @given(data=st.data(), fmt=fmt_strategy(), j=st.integers(0, 20), k=st.integers(0, 20))
    @settings(max_examples=300)
    def test_shift_right_composes(self, data, fmt, j, k):
        a = QValue(data.draw(raw_in(fmt)), fmt)
        assert shift_right(a, j + k) == shift_right(shift_right(a, j), k)


class TestCeil:
    @pytest.mark.parametrize(
        "value,expected", [(2.25, 3), (-1.75, -1), (3.0, 3), (0.0, 0), (-0.25, 0)]
    )
    def test_examples(self, value, expected):
        assert ceil_to_int(quantize(value, Q62)) == expected

    @given(data=st.data(), fmt=fmt_strategy())
    @settings(max_examples=300)
    def test_ceiling_gap(self, data, fmt):
        a = QValue(data.draw(raw_in(fmt)), fmt)
        c = ceil_to_int(a)
        assert 0 <= c - a.as_fraction() < 1
