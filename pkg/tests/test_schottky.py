"""Moebius normal forms, word matrices, fixed points, multipliers."""
import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from curvelog.cpseries import TruncatedSeries as TS
from curvelog.schottky import (DegenerateWord, cross_ratio, edge_moebius,
                               fixed_points_multiplier, multiplier_data,
                               phi_matrix, random_closed_word, verify_graph,
                               verify_word, word_matrix)
from curvelog.stable_graph import (Chart, Edge, NotComposable, NotReduced,
                                   StableGraph, Tail)


def tate_curve():
    g = StableGraph(["v0"], [Edge("e0", "v0", 0, "v0", 1)],
                    [Tail("t1", "v0", 1)])
    return g.with_chart(Chart({"e0+": F(0), "t1": F(1)}, ["e0-"]))


def dumbbell_charted(seed=5):
    g = StableGraph(["v0", "v1"],
                    [Edge("e0", "v0", 0, "v0", 1),
                     Edge("e1", "v0", 2, "v1", 0),
                     Edge("e2", "v1", 1, "v1", 2)], [])
    return g.specialize_chart(seed=seed)


def test_tate_generator_is_scaling():
    g = tate_curve()
    m = phi_matrix(g, "e0+", trunc=6)
    y = TS.variable("e0", ("e0",), 6)
    assert (m.a - y).is_zero() and m.b.is_zero() and m.c.is_zero()
    assert m.d.constant_term() == 1 and len(m.d.terms) == 1


def test_tate_multiplier_exact():
    d = multiplier_data(tate_curve(), ["e0+"], trunc=6)
    y = TS.variable("e0", ("e0",), 6)
    assert (d.beta - y).is_zero()
    assert (d.x - TS.constant(1, ("e0",), 6)).is_zero()


def test_half_edge_inverse_pair():
    g = dumbbell_charted()
    m = phi_matrix(g, "e1+", trunc=4)
    mi = phi_matrix(g, "e1-", trunc=4)
    prod = mi @ m
    y = TS.variable("e1", tuple(sorted(g.edges)), 4)
    assert (prod.a - y).is_zero() and (prod.d - y).is_zero()
    assert prod.b.is_zero() and prod.c.is_zero()
    assert (m.det() + y).is_zero()  # finite-finite determinant is -y


def test_word_matrix_composition_and_errors():
    g = dumbbell_charted()
    w = ["e1+", "e2+", "e1-"]
    vs = tuple(sorted(g.edges))
    m = word_matrix(g, w, vars=vs, trunc=4)
    m2 = word_matrix(g, ["e2+", "e1-"], vars=vs, trunc=4)
    m1 = word_matrix(g, ["e1+"], vars=vs, trunc=4)
    comp = m2 @ m1
    for p, q in zip(m.entries(), comp.entries()):
        assert (p - q).is_zero()
    with pytest.raises(NotReduced):
        word_matrix(g, ["e1+", "e1-"])
    with pytest.raises(NotComposable):
        word_matrix(g, ["e0+", "e2+"])


def test_multiplier_requires_cyclically_reduced():
    g = dumbbell_charted()
    with pytest.raises(DegenerateWord):
        multiplier_data(g, ["e1+", "e2+", "e1-"])  # conjugated loop
    with pytest.raises(NotComposable):
        multiplier_data(g, ["e1+"])  # not closed


def test_eigen_relations_exact():
    g = dumbbell_charted()
    d = multiplier_data(g, ["e0+"], trunc=6)
    assert (d.x + d.x_prime - d.trace).is_zero()
    assert (d.x * d.x_prime - d.det).is_zero()
    assert (d.u * d.trace - d.x).is_zero()
    one = TS.constant(1, d.x.vars, d.x.trunc)
    assert (d.u * d.u - d.u + d.nu).is_zero()
    assert d.u.constant_term() == 1
    assert (d.beta * d.x - d.x_prime).is_zero()
    assert one.trunc == 6


def test_fixed_points_residual_and_orders():
    g = dumbbell_charted()
    rep = verify_word(g, ["e0+"], trunc=6)
    assert rep["pass"]
    assert rep["orders"]["beta"] == {"e0": 1}
    rep = verify_word(g, ["e0+", "e1+", "e2+", "e1-"], trunc=6)
    assert rep["pass"]
    assert rep["orders"]["beta"] == {"e0": 1, "e1": 2, "e2": 1}
    assert rep["orders"]["alpha"] >= 1 and rep["orders"]["alpha_prime"] >= 1


def test_fixed_point_at_infinity_raises():
    with pytest.raises(DegenerateWord):
        fixed_points_multiplier(tate_curve(), ["e0-"], trunc=4)


def test_attractive_seed_is_incoming_branch():
    g = dumbbell_charted()
    d = fixed_points_multiplier(g, ["e2+"], trunc=5)
    assert d.alpha.constant_term() == g.chart.x("e2+")
    assert d.alpha_prime.constant_term() == g.chart.x("e2-")


def test_inverse_word_swaps_fixed_points():
    g = dumbbell_charted()
    w = ["e1+", "e2+", "e1-", "e0+"]
    d = fixed_points_multiplier(g, w, trunc=5)
    wi = [h[:-1] + ("-" if h.endswith("+") else "+") for h in reversed(w)]
    di = fixed_points_multiplier(g, wi, trunc=5)
    assert (d.alpha - di.alpha_prime).is_zero()
    assert (d.alpha_prime - di.alpha).is_zero()


def test_cross_ratio_matches_rationals():
    vs = ("z",)
    c = lambda v: TS.constant(F(v), vs, 3)
    got = cross_ratio(c(2), c(3), c(5), c(7))
    expect = F((2 - 5) * (3 - 7), (2 - 7) * (3 - 5))
    assert got.constant_term() == expect and len(got.terms) == 1


def test_verify_graph_theta():
    g = StableGraph(["v0", "v1"],
                    [Edge("e0", "v0", 0, "v1", 0),
                     Edge("e1", "v0", 1, "v1", 1),
                     Edge("e2", "v0", 2, "v1", 2)], []).specialize_chart(seed=3)
    rep = verify_graph(g, max_len=4, trunc=6)
    assert rep["pass"] and rep["n_words"] == 18


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10 ** 6), st.integers(2, 5))
def test_random_word_residuals(seed, length):
    g = dumbbell_charted(seed=9)
    rng = random.Random(seed)
    w = random_closed_word(g, rng, length)
    rep = verify_word(g, w, trunc=5)
    assert rep["pass"], (w, rep)
