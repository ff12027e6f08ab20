"""Exact period combinations: arithmetic, numerics, span membership."""
import math
from fractions import Fraction as F

import pytest

from curvelog.constants import (CONSTANTS, ZETA_REDUCTIONS,
                                ConstantCombination as CC, in_zeta_span,
                                span_lattice_gap, zeta_span_residual)


def test_rational_arithmetic():
    x = CC.rational(F(2, 3)) + CC.rational(F(1, 3))
    assert x == CC.one()
    assert x.is_rational() and x.rational_value() == 1
    assert not (x - x)
    assert (x - x) == CC.zero()


def test_monomial_products_add_exponents():
    z2 = CC.zeta(2)
    ip = CC.ipi()
    prod = ip * ip * z2
    # one term: (i pi)^2 * zeta(2)
    ((key, coeff),) = prod.terms.items()
    ipi_pow, zetas = key
    assert ipi_pow == 2 and zetas == ((2,),)
    assert coeff == 1


def test_zeta_product_is_formal_not_expanded():
    p = CC.zeta(2) * CC.zeta(3)
    ((key, _),) = p.terms.items()
    assert key[1] == ((2,), (3,))  # kept as an unordered product basis


def test_numeric_values():
    assert abs(CC.zeta(2).numeric() - math.pi ** 2 / 6) < 1e-12
    assert abs(CC.zeta(3).numeric() - 1.2020569031595942) < 1e-12
    assert abs(CC.ipi(2).numeric() + math.pi ** 2) < 1e-12
    # increasing convention: the inner exponent comes first
    assert CC.zeta(1, 2).numeric_eq(CC.zeta(3), tol=1e-10)


def test_numeric_eq_distinguishes():
    assert not CC.zeta(2).numeric_eq(CC.zeta(3), tol=1e-6)


def test_integrality():
    assert (CC.zeta(2, coeff=3) - CC.ipi(1, 5)).is_integral()
    assert not CC.zeta(2, coeff=F(1, 2)).is_integral()


def test_weights():
    x = CC.ipi(1) * CC.zeta(2) + CC.zeta(5)
    assert x.weights() == {3, 5}


def test_divergent_zeta_rejected():
    with pytest.raises(ValueError):
        CC.zeta(2, 1)  # last index 1 diverges


def test_json_roundtrip():
    x = CC.zeta(2, 3, coeff=F(-7, 2)) + CC.ipi(3) + CC.rational(F(1, 6))
    back = CC.from_json(x.to_json())
    assert back == x


def test_ring_contract():
    assert CONSTANTS.zero == CC.zero()
    assert CONSTANTS.one == CC.one()
    assert CONSTANTS.embed(F(1, 2)) == CC.rational(F(1, 2))
    assert CONSTANTS.close(CC.zeta(1, 2), CC.zeta(3), 1e-9)


def test_zeta_reductions_are_numerically_exact():
    for word, (a, b, r) in ZETA_REDUCTIONS.items():
        reduced = CC.ipi(a, r) * (CC.zeta(3) if b else 1)
        assert CC.zeta(*word).numeric_eq(reduced, tol=1e-10), word


def test_span_lattice_gaps():
    # one zeta(2) factor fits from exponent 2, the weight-4 words from 4,
    # and products refine the lattice further with each factor
    assert [span_lattice_gap(a) for a in range(7)] == [
        F(1), F(1), F(1, 6), F(1, 6), F(1, 360), F(1, 360), F(1, 2160)]


def test_span_membership_frozen_cases():
    inside = [
        CC.one(),
        CC.ipi(3, F(8, 6)),                    # (2 i pi)^3 / 3!
        CC.ipi(4, F(16, 24)),                  # (2 i pi)^4 / 4!
        CC.zeta(1, 1, 2, coeff=3),
        CC.zeta(2) * CC.zeta(3),
        CC.zeta(1, 2, coeff=F(3, 2)) - CC.zeta(3, coeff=F(3, 2)),  # value 0
        CC.zeta(1, 3, coeff=7) - CC.zeta(2, 2),
        CC.ipi(5, F(1, 360)),
        CC.ipi(6, F(1, 2160)),
    ]
    outside = [
        CC.rational(F(1, 2)),
        CC.ipi(1, F(1, 6)),
        CC.zeta(2, coeff=F(1, 2)),
        CC.zeta(2) * CC.zeta(3) * F(1, 6),
        CC.ipi(5, F(1, 720)),
    ]
    for c in inside:
        assert zeta_span_residual(c) == 0.0
        assert in_zeta_span(c)
    for c in outside:
        assert zeta_span_residual(c) > 1e-2
        assert not in_zeta_span(c)


def test_span_residual_scales_with_the_missing_part():
    # residual of an off-lattice multiple is the numeric size of the
    # distance to the nearest lattice member
    assert abs(zeta_span_residual(CC.rational(F(5, 2))) - 0.5) < 1e-12
    assert abs(zeta_span_residual(CC.ipi(1, F(1, 6))) - math.pi / 6) < 1e-12
