"""Graph catalogs: enumeration counts, isomorphism, move connectivity."""
import pytest

from curvelog.catalog import (_multigraphs, canonical_key, isomorphic,
                              moves_connected, stable_graphs,
                              whitehead_neighbors)
from curvelog.stable_graph import Edge, StableGraph, Tail


def count_multigraphs(deg):
    return sum(1 for _ in _multigraphs(list(deg)))


def test_multigraph_enumeration_small():
    # (3,3): triple edge, or edge plus a loop at each end
    assert count_multigraphs([3, 3]) == 2
    # (2,2): double edge, or two loops
    assert count_multigraphs([2, 2]) == 2
    # (4,): two loops at one vertex
    assert count_multigraphs([4]) == 1
    # (2,1,1): {v0v1, v0v2}, or {loop v0, v1v2} (disconnected but the raw
    # enumerator does not filter connectivity)
    assert count_multigraphs([2, 1, 1]) == 2


# Small counts verified by hand (see each type's listing); larger ones are
# regression pins produced by the same enumerator.
TRIVALENT_COUNTS = {(1, 1): 1, (1, 2): 2, (2, 0): 2, (2, 1): 3,
                    (2, 2): 9, (3, 0): 5, (3, 1): 12, (3, 2): 49}
STABLE_COUNTS = {(0, 3): 1, (0, 4): 2, (0, 5): 3, (0, 6): 7,
                 (1, 1): 1, (1, 2): 3, (1, 3): 7, (2, 0): 3}


@pytest.mark.parametrize("gn", sorted(TRIVALENT_COUNTS))
def test_trivalent_counts(gn):
    cat = stable_graphs(*gn)
    assert len(cat) == TRIVALENT_COUNTS[gn]
    for gr in cat:
        assert gr.validate() == gn
        assert gr.is_trivalent()
        g, n = gn
        assert len(gr.vertices) == 2 * g - 2 + n
        assert len(gr.edges) == 3 * g - 3 + n


@pytest.mark.parametrize("gn", sorted(STABLE_COUNTS))
def test_stable_counts(gn):
    cat = stable_graphs(*gn, trivalent_only=False)
    assert len(cat) == STABLE_COUNTS[gn]
    for gr in cat:
        assert gr.validate() == gn


def test_theta_and_dumbbell_in_catalog():
    theta = StableGraph(["v0", "v1"],
                        [Edge("e0", "v0", 0, "v1", 0),
                         Edge("e1", "v0", 1, "v1", 1),
                         Edge("e2", "v0", 2, "v1", 2)], [])
    dumbbell = StableGraph(["a", "b"],
                           [Edge("x", "a", 0, "a", 1),
                            Edge("y", "a", 2, "b", 0),
                            Edge("z", "b", 1, "b", 2)], [])
    cat = stable_graphs(2, 0)
    assert any(isomorphic(g, theta) for g in cat)
    assert any(isomorphic(g, dumbbell) for g in cat)
    assert not isomorphic(theta, dumbbell)


def test_canonical_key_is_relabeling_invariant():
    g1 = StableGraph(["p", "q"],
                     [Edge("a", "p", 0, "q", 0), Edge("b", "q", 1, "p", 1),
                      Edge("c", "p", 2, "q", 2)], [])
    g2 = StableGraph(["v0", "v1"],
                     [Edge("e0", "v1", 0, "v0", 0), Edge("e1", "v0", 1, "v1", 1),
                      Edge("e2", "v1", 2, "v0", 2)], [])
    assert canonical_key(g1) == canonical_key(g2)


def test_whitehead_moves_connect_small_catalogs():
    for gn in [(2, 0), (1, 2), (2, 1), (0, 4), (0, 5)]:
        cat = stable_graphs(*gn)
        assert moves_connected(cat), gn


def test_theta_dumbbell_are_whitehead_neighbors():
    cat = stable_graphs(2, 0)
    keys = {canonical_key(g) for g in cat}
    nbrs = whitehead_neighbors(cat[0])
    assert keys <= nbrs | {canonical_key(cat[0])}
