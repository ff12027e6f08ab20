"""Deformation expansion of the neck transport and its building blocks."""
import cmath
import itertools
import math
from fractions import Fraction

import pytest

from curvelog.associator import ode_transport
from curvelog.constants import ConstantCombination as CC
from curvelog.ncseries import COMPLEX, RATIONAL, NCSeries
from curvelog.sewing import (SEW, SewCoeff, Zone, dressed_neck_transport,
                             frame_series, kappa_residual, log_conjugate,
                             ordered_exp, sew_specialize, strip_kappa)


def test_sewcoeff_algebra():
    a = SewCoeff.of(Fraction(3), dy=1)
    b = SewCoeff.of(Fraction(2), dl=1)
    s = a + b
    assert s.terms[(1, 0, 0)] == CC.rational(3)
    assert s.terms[(0, 1, 0)] == CC.rational(2)
    prod = a * b
    assert list(prod.terms) == [(1, 1, 0)]
    assert prod.terms[(1, 1, 0)] == CC.rational(6)
    assert not (a - a)
    assert a.shift_y(2).terms == {(3, 0, 0): CC.rational(3)}
    with pytest.raises(ValueError):
        b.shift_y(-1)
    mixed = SewCoeff({(0, 0, 1): CC.rational(1), (2, 0, 0): CC.rational(5)})
    assert mixed.drop_y_above(1).terms == {(0, 0, 1): CC.rational(1)}
    assert mixed.kappa_part().terms == {(0, 0, 1): CC.rational(1)}
    assert mixed.without_kappa().terms == {(2, 0, 0): CC.rational(5)}


def test_sewcoeff_numeric_and_json():
    c = SewCoeff({(1, 1, 1): CC.rational(2)})
    y = 0.03
    expect = 2 * y * (cmath.log(y) / (2j * math.pi)) * math.log(0.5)
    assert abs(c.numeric(y) - expect) < 1e-14
    round_trip = SewCoeff.from_json(c.to_json())
    assert round_trip == c
    assert SewCoeff.from_json(SewCoeff().to_json()) == SewCoeff()


def _unit_series():
    return NCSeries.unit(("x",), 4, SEW)


def test_zone_antiderivative_frozen():
    s = _unit_series()
    proto = s
    # d/dw of w^(p+1)/(p+1) = w^p
    z = Zone(proto, {(2, 0): s}).antiderivative()
    assert set(z.terms) == {(3, 0)}
    assert (z.terms[(3, 0)] - s.scale(SewCoeff.of(Fraction(1, 3)))).is_zero()
    # d/dw of log(w)^(q+1)/(q+1) = log(w)^q / w
    z = Zone(proto, {(-1, 1): s}).antiderivative()
    assert set(z.terms) == {(0, 2)}
    assert (z.terms[(0, 2)] - s.scale(SewCoeff.of(Fraction(1, 2)))).is_zero()
    # d/dw of (w log w - w) = log w
    z = Zone(proto, {(0, 1): s}).antiderivative()
    assert set(z.terms) == {(1, 1), (1, 0)}
    assert (z.terms[(1, 1)] - s).is_zero()
    assert (z.terms[(1, 0)] + s).is_zero()


def test_zone_bound_evaluations():
    s = _unit_series()
    assert (Zone(s, {(0, 0): s, (3, 0): s}).eval_zero() - s).is_zero()
    with pytest.raises(ValueError):
        Zone(s, {(-1, 0): s}).eval_zero()
    with pytest.raises(ValueError):
        Zone(s, {(0, 2): s}).eval_zero()
    # at the cut w = 1/2: w^p -> (1/2)^p, log w -> kappa
    got = Zone(s, {(1, 1): s}).eval_cut()
    expect = s.scale(SewCoeff({(0, 0, 1): CC.rational(Fraction(1, 2))}))
    assert (got - expect).is_zero()
    # at w = y/(1/2): w^p -> 2^p y^p, log w -> 2 i pi l - kappa
    got = Zone(s, {(1, 0): s}).eval_y_over_cut()
    assert (got - s.scale(SewCoeff.of(2, dy=1))).is_zero()
    got = Zone(s, {(0, 1): s}).eval_y_over_cut()
    expect = s.scale(SewCoeff({(0, 1, 0): CC.ipi(1, 2),
                               (0, 0, 1): CC.rational(-1)}))
    assert (got - expect).is_zero()


def test_log_conjugate_expands_in_brackets():
    alpha = ("a", "b")
    a = NCSeries.letter("a", alpha, 3, SEW)
    b = NCSeries.letter("b", alpha, 3, SEW)
    conj = log_conjugate(a, Zone.const(b), +1)
    assert (conj.terms[(0, 0)] - b).is_zero()
    assert (conj.terms[(0, 1)] - a.bracket(b)).is_zero()
    assert (conj.terms[(0, 2)]
            - a.bracket(a.bracket(b)).scale(SewCoeff.of(Fraction(1, 2)))
            ).is_zero()
    # opposite sign flips the odd layers
    back = log_conjugate(a, Zone.const(b), -1)
    assert (back.terms[(0, 1)] + a.bracket(b)).is_zero()


def test_frame_series_satisfies_its_recursion():
    alpha = ("x", "u", "v")
    x = NCSeries.letter("x", alpha, 3, RATIONAL)
    u = NCSeries.letter("u", alpha, 3, RATIONAL)
    v = NCSeries.letter("v", alpha, 3, RATIONAL)
    tails = [u + v, v.scale(Fraction(2)), u * v]
    hs = frame_series(x, tails, 5)
    assert (hs[0] - NCSeries.unit(alpha, 3, RATIONAL)).is_zero()
    for m in range(1, 6):
        rhs = NCSeries.zero(alpha, 3, RATIONAL)
        for j in range(min(m, len(tails))):
            rhs = rhs + tails[j] * hs[m - 1 - j]
        lhs = hs[m].scale(Fraction(m)) - x.bracket(hs[m])
        assert (lhs - rhs).is_zero()


def test_ordered_exp_constant_kernel():
    x = NCSeries.letter("x", ("x",), 4, SEW)
    unit = NCSeries.unit(("x",), 4, SEW)
    kernel = Zone(unit, {(0, 0): x})
    got = ordered_exp(kernel, lambda z: z.eval_zero(),
                      lambda z: z.eval_cut(), depth=5, ymax=0)
    expect = x.scale(SewCoeff.of(Fraction(1, 2))).exp()
    assert (got - expect).is_zero()


def test_ordered_exp_log_kernel():
    x = NCSeries.letter("x", ("x",), 4, SEW)
    unit = NCSeries.unit(("x",), 4, SEW)
    kernel = Zone(unit, {(-1, 0): x})
    got = ordered_exp(kernel, lambda z: Zone.const(z.eval_cut()).eval_zero(),
                      lambda z: z.eval_y_over_cut(), depth=5, ymax=4)
    # integral of dw/w from 1/2 to y/(1/2) is log y + 2 log 2,
    # i.e. 2 i pi l - 2 kappa
    expect = x.scale(SewCoeff({(0, 1, 0): CC.ipi(1, 2),
                               (0, 0, 1): CC.rational(-2)})).exp()
    assert (got - expect).is_zero()
    # sanity: wrong lower bound does not collapse to the same element
    assert not (got - x.scale(SewCoeff({(0, 1, 0): CC.ipi(1, 2)})).exp()
                ).is_zero()


def _letters(ring):
    alpha = ("A", "B", "C")
    return alpha, tuple(NCSeries.letter(x, alpha, 2, ring) for x in alpha)


def test_dressed_transport_matches_direct_integration():
    alpha, (A, B, C) = _letters(SEW)
    _, (An, Bn, Cn) = _letters(COMPLEX)
    y = 1 / 64
    oracle = ode_transport({0.0: An, y: Bn, 1.0: Cn}, y, 1.0,
                           scale_src=y, scale_dst=1.0, delta=y / 4)

    def err(ydeg):
        d = dressed_neck_transport(A, B, C, ydeg=ydeg, xorder=24, kmax=18)
        n = sew_specialize(d, y, 1e-12)
        return max(abs(n.coefficient(w) - oracle.coefficient(w))
                   for k in range(3)
                   for w in itertools.product(alpha, repeat=k)), d

    e0, _ = err(0)
    e1, _ = err(1)
    e2, d2 = err(2)
    assert e2 < 5e-5
    # one more order in y buys roughly a factor of y
    assert e1 < e0 / 20
    assert e2 < e1 / 20
    # the y-constant layer carries no cut symbol beyond truncation dust
    assert kappa_residual(d2) < 1e-6
    # but the correction layers do: the cut symbol is load-bearing there
    kappa_terms = [c for coeff in d2.terms.values()
                   for (dy, dl, dk), c in coeff.terms.items()
                   if dk > 0 and dy > 0]
    assert kappa_terms
    stripped = sew_specialize(strip_kappa(d2), y, 1e-12)
    worst_stripped = max(
        abs(stripped.coefficient(w) - oracle.coefficient(w))
        for k in range(3) for w in itertools.product(alpha, repeat=k))
    assert worst_stripped > 100 * e2


def test_constant_layer_is_the_undeformed_product():
    alpha, (A, B, C) = _letters(SEW)
    d0 = dressed_neck_transport(A, B, C, ydeg=0, xorder=24, kmax=18)
    # y-constant layer at y -> specialization must be grouplike
    y = 1 / 64
    assert sew_specialize(d0, y, 1e-12).is_grouplike(tol=1e-5)
