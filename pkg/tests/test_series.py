import random

import pytest
from hypothesis import given, strategies as st

import oracles
from lvalues.errors import InvZero, PrecisionExhausted
from lvalues.exactalg import Poly, field_make
from lvalues.series import LaurentSeries, TruncSeries, iota, monic_normalize

F2 = field_make(2)
F3 = field_make(3)


def L(F, coeffs, lead=0, prec=None):
    return LaurentSeries.from_coeffs(F, coeffs, prec, lead)


def test_geometric_inverse():
    inv = L(F2, [1, 1]).inverse(3)
    assert inv.coefficients(0, 3) == [1, 1, 1, 1]
    assert inv.prec == 3


def test_product_with_polynomial():
    x = LaurentSeries.from_poly([1, 1], F2) * LaurentSeries.monomial(F2, -1)
    assert x == L(F2, [1, 1])


def test_inverse_of_polynomial():
    # 1/(t^2 + t) = t^-2 / (1 + t^-1)
    inv = LaurentSeries.from_poly([0, 1, 1], F2).inverse(4)
    assert inv.val() == 2
    assert inv.coefficients(0, 4) == [0, 0, 1, 1, 1]


def test_precision_is_tracked():
    x = L(F3, [1, 2, 1], prec=2)
    y = x * x
    assert y.prec == 2
    with pytest.raises(PrecisionExhausted):
        y[3]
    assert (x + L(F3, [0, 0, 0, 0, 1])).prec == 2


def test_failures_are_loud():
    with pytest.raises(InvZero):
        LaurentSeries.zero(F2).inverse(3)
    with pytest.raises(InvZero):
        L(F2, [], prec=4).inverse(3)
    with pytest.raises(PrecisionExhausted):
        # 1/t^-5 starts at t^5, so asking for nothing above t^9 leaves no coefficient
        L(F2, [1], lead=5, prec=5).inverse(-10)


@given(st.lists(st.integers(0, 2), min_size=1, max_size=8), st.integers(-3, 3), st.integers(2, 10))
def test_inverse_roundtrip(coeffs, lead, n):
    x = L(F3, [1] + coeffs, lead=lead)
    y = x.inverse(n)
    one = x * y
    assert one.prec >= n + lead - 1 or one.prec is None
    assert one.coefficients(0, one.prec) == [1] + [0] * one.prec


@given(st.lists(st.integers(0, 1), min_size=1, max_size=6), st.lists(st.integers(0, 1), min_size=1, max_size=6))
def test_multiplication_commutes_and_distributes(a, b):
    x, y = L(F2, a, lead=-2), L(F2, b, lead=1)
    z = L(F2, [1, 1], lead=0)
    assert x * y == y * x
    assert (x + y) * z == x * z + y * z


def test_qpower_is_frobenius():
    x = L(F3, [1, 2, 0, 1], lead=-1)
    assert x.qpower(3) == x * x * x


def test_iota_examples():
    poly, series = iota(Poly.from_list(F2, [0, 1, 1]), 3)
    assert poly == Poly.from_list(F2, [0, 1, 1], "T")
    assert series.to_list() == [0, 0, 0]
    _, series = iota(L(F2, [1, 0, 1], prec=3), 4)
    assert series.to_list() == [1, 0, 1, 0]
    x = LaurentSeries.monomial(F2, -1) * L(F2, [1, 1]).inverse(3)
    _, series = iota(x, 3)
    assert series.to_list() == [0, 1, 1]
    with pytest.raises(PrecisionExhausted):
        iota(L(F2, [1], prec=1), 4)


def test_monic_normalize_examples():
    assert monic_normalize(TruncSeries.from_list(F3, [2, 2])).to_list() == [1, 1]
    assert monic_normalize(TruncSeries.from_list(F2, [1, 0, 1])).to_list() == [1, 0, 1]
    assert monic_normalize(Poly.from_list(F3, [0, 1, 0, 2], "T")) == Poly.from_list(F3, [0, 2, 0, 1], "T")
    with pytest.raises(InvZero):
        monic_normalize(Poly.from_list(F3, []))


def test_trunc_series_formats():
    s = TruncSeries.from_list(F3, [1, 0, 2, 1])
    assert s.machine() == "[1, 0, 2, 1]"
    assert str(s) == "1 + 2*T^-2 + T^-3"


@given(st.integers(0, 10**6), st.integers(1, 9))
def test_trunc_series_against_oracle(seed, N):
    rng = random.Random(seed)
    a = [rng.randrange(3) for _ in range(N)]
    b = [1 + rng.randrange(2)] + [rng.randrange(3) for _ in range(N - 1)]
    A, B = TruncSeries.from_list(F3, a), TruncSeries.from_list(F3, b)
    assert (A * B).to_list() == oracles.series_mul(a, b, 3, N)
    assert (A / B * B).to_list() == a
