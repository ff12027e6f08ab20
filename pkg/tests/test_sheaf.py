"""Residue sheaves and the monodromy move calculus on stable graphs."""
import itertools

import pytest

from curvelog.associator import kz_associator
from curvelog.catalog import stable_graphs
from curvelog.constants import ConstantCombination as CC
from curvelog.elliptic import monodromy_around_zero
from curvelog.logpoly import LogPoly
from curvelog.sheaf import (MonodromyCalculator, UnsupportedDressing,
                            build_sheaf, decompose_element,
                            reassemble_element, specialize_logs)

GENUS_TAILS = [(0, 3), (0, 4), (0, 5), (0, 6), (1, 1), (1, 2), (1, 3), (2, 0)]
GRAPH_COUNTS = {(0, 3): 1, (0, 4): 1, (0, 5): 1, (0, 6): 2,
                (1, 1): 1, (1, 2): 2, (1, 3): 3, (2, 0): 2}


def _four_tails_calculator(trunc):
    graph = next(g for g in stable_graphs(0, 4) if len(g.edges) == 1)
    return MonodromyCalculator(build_sheaf(graph, trunc))


def test_invariants_hold_across_catalog():
    for g, n in GENUS_TAILS:
        graphs = stable_graphs(g, n)
        assert len(graphs) == GRAPH_COUNTS[(g, n)]
        for graph in graphs:
            sheaf = build_sheaf(graph, 3)  # raises if any invariant fails
            assert set(sheaf.tree_edges) | set(sheaf.cycle_edges) \
                == set(graph.edges)
            assert not set(sheaf.tree_edges) & set(sheaf.cycle_edges)
            n_tails = len(graph.tails)
            expected_letters = (n_tails - 1 if n_tails else 0) \
                + 2 * len(sheaf.cycle_edges)
            assert len(sheaf.alphabet) == expected_letters


def test_three_tails_local_move_is_the_kz_associator():
    calc = MonodromyCalculator(build_sheaf(stable_graphs(0, 3)[0], 3))
    elem = calc.path(calc.tail_path_moves("t1", "t2"))
    expect = kz_associator(3).map_coefficients(
        lambda c: LogPoly.constant(calc.lvars, c), calc.ring) \
        .rename({"X0": "X_t1", "X1": "X_t2"}).extend(calc.sheaf.alphabet)
    assert (elem - expect).is_zero()


def test_one_loop_recipe_matches_elliptic_monodromy():
    trunc = 4
    graph = stable_graphs(1, 1)[0]
    calc = MonodromyCalculator(build_sheaf(graph, trunc))
    recipe = [("local", "v0", "t1", "e0+"), ("turn", "v0", "e0+"),
              ("local", "v0", "e0+", "t1")]
    got = calc.path(recipe)
    ref = monodromy_around_zero(trunc).rename(
        {"T": "T_e0", "A": "A_e0"}).extend(calc.sheaf.alphabet)
    worst = 0.0
    for n in range(trunc + 1):
        for word in itertools.product(calc.sheaf.alphabet, repeat=n):
            poly = got.coefficient(word)
            for expo, comb in poly.terms.items():
                if any(expo):  # the loop never crosses an edge: log-free
                    assert abs(comb.numeric(1e-12)) < 1e-12
            diff = poly.constant_part().numeric(1e-12) \
                - ref.coefficient(word).numeric(1e-12)
            worst = max(worst, abs(diff))
    assert worst < 1e-9


def test_four_tails_path_decomposition_table():
    calc = _four_tails_calculator(4)
    elem = calc.path(calc.tail_path_moves("t1", "t3"))
    report = decompose_element(elem)
    assert report["n_entries"] == 223
    assert report["max_log_degree"] == 4
    assert report["all_integral"] is True
    assert report["violations"] == []
    back = reassemble_element(report, calc.ring)
    assert (back - elem).is_zero()
    assert elem.is_grouplike(tol=1e-8)
    # the only letters with a linear term are the two on the starting
    # chart, carried by the edge-crossing factor
    assert elem.coefficient(("X_t1",)).coefficient((1,)) == CC.ipi(1, -2)
    assert elem.coefficient(("X_t2",)).coefficient((1,)) == CC.ipi(1, -2)
    assert not elem.coefficient(("X_t3",))


def test_path_validates_chart_states():
    calc = _four_tails_calculator(2)
    with pytest.raises(ValueError):
        # after the local move the path sits on e0-, not on t2
        calc.path([("local", "v0", "t1", "e0-"), ("local", "v0", "t2", "t1")])
    with pytest.raises(ValueError):
        # crossing e0- departs from e0+ over at v1, not from v0
        calc.path([("local", "v0", "t1", "e0-"), ("cross", "e0-")])
    with pytest.raises(ValueError):
        calc.turn("v0", "t3")  # t3 lives on the other chart


def test_homotopy_invariance_under_backtracking():
    calc = _four_tails_calculator(3)
    base = calc.tail_path_moves("t1", "t3")
    elem = calc.path(base)
    # retrace the edge: cross back and forth once more
    retraced = base[:2] + [("cross", "e0-"), ("cross", "e0+")] + base[2:]
    assert (calc.path(retraced) - elem).is_zero()
    # a full turn and its inverse cancel exactly
    turned = base[:2] + [("turn", "v1", "e0+", 1),
                         ("turn", "v1", "e0+", -1)] + base[2:]
    assert (calc.path(turned) - elem).is_zero()


def test_dressing_refuses_unsupported_shapes():
    calc = _four_tails_calculator(2)
    with pytest.raises(UnsupportedDressing):
        calc.dressed_tail_transport("t1", "t4", ydeg=1)
    with pytest.raises(UnsupportedDressing):
        calc.dressed_tail_transport("t2", "t3", ydeg=1)
    with pytest.raises(UnsupportedDressing):
        calc.dressed_tail_transport("t1", "t2", ydeg=1)
    loop = MonodromyCalculator(build_sheaf(stable_graphs(1, 1)[0], 2))
    with pytest.raises(UnsupportedDressing):
        loop.dressed_tail_transport("t1", "t1", ydeg=1)


def test_dressed_constant_layer_matches_move_pipeline():
    from curvelog.sewing import sew_specialize

    calc = _four_tails_calculator(2)
    dressed = calc.dressed_tail_transport("t1", "t3", ydeg=0,
                                          xorder=24, kmax=18)
    pipeline = calc.path(calc.tail_path_moves("t1", "t3"))
    yval = 1 / 64
    num_dressed = sew_specialize(dressed, yval, 1e-12)
    num_pipe = specialize_logs(pipeline, {"e0": yval}, 1e-12)
    worst = max(abs(num_dressed.coefficient(w) - num_pipe.coefficient(w))
                for n in range(3)
                for w in itertools.product(calc.sheaf.alphabet, repeat=n))
    assert worst < 1e-5
