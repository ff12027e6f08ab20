"""Enumeration of stable graphs of a given type up to isomorphism.

Graphs are generated as labeled multigraphs (stub matching per vertex,
loops allowed) plus a tail-count vector, then deduplicated by the
minimum of the encoding over all vertex permutations.  Tail numbering is
not part of the isomorphism class: the catalog assigns ``nu`` in vertex
order, so two graphs differing only by renumbered tails are listed once.
"""
from __future__ import annotations

import itertools
from typing import Iterator, Sequence

from .stable_graph import Edge, StableGraph, Tail

EdgePair = tuple[int, int]
Encoding = tuple[tuple[EdgePair, ...], tuple[int, ...]]


def _multigraphs(deg: list[int], start: int = 0) -> Iterator[list[EdgePair]]:
    """All multigraphs on labeled vertices with the given stub degrees.

    Each multigraph (edge multiset) is produced exactly once: vertex i's
    stubs are resolved before vertex i+1's, into loops and connections to
    later vertices only.
    """
    i = start
    while i < len(deg) and deg[i] == 0:
        i += 1
    if i == len(deg):
        yield []
        return
    later = list(range(i + 1, len(deg)))
    for loops in range(deg[i] // 2 + 1):
        rest = deg[i] - 2 * loops
        for combo in _distribute(rest, [deg[j] for j in later]):
            nd = list(deg)
            nd[i] = 0
            for j, m in zip(later, combo):
                nd[j] -= m
            head = [(i, i)] * loops + [x for j, m in zip(later, combo)
                                       for x in [(i, j)] * m]
            for tail_part in _multigraphs(nd, i + 1):
                yield head + tail_part


def _distribute(total: int, caps: list[int]) -> Iterator[tuple[int, ...]]:
    if not caps:
        if total == 0:
            yield ()
        return
    for m in range(min(total, caps[0]) + 1):
        for rest in _distribute(total - m, caps[1:]):
            yield (m,) + rest


def _connected(n_vertices: int, edges: Sequence[EdgePair]) -> bool:
    if n_vertices == 1:
        return True
    adj: dict[int, set[int]] = {i: set() for i in range(n_vertices)}
    for i, j in edges:
        adj[i].add(j)
        adj[j].add(i)
    seen = {0}
    stack = [0]
    while stack:
        v = stack.pop()
        for w in adj[v]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return len(seen) == n_vertices


def _canonical(n_vertices: int, edges: Sequence[EdgePair],
               tails: Sequence[int]) -> Encoding:
    """Minimum encoding over vertex relabelings.

    Only permutations preserving the local invariant (tail count, degree,
    loop count) can realize the minimum, so the search runs within those
    classes; class blocks are laid out in sorted order, which is itself
    permutation invariant.
    """
    deg = [0] * n_vertices
    loops = [0] * n_vertices
    for i, j in edges:
        deg[i] += 1
        deg[j] += 1
        if i == j:
            loops[i] += 1
    cls = [(tails[i], deg[i], loops[i]) for i in range(n_vertices)]
    order = sorted(range(n_vertices), key=lambda i: cls[i])
    groups = [list(grp) for _, grp in
              itertools.groupby(order, key=lambda i: cls[i])]
    best: Encoding | None = None
    for parts in itertools.product(*[itertools.permutations(g) for g in groups]):
        perm = [0] * n_vertices
        newidx = 0
        for part in parts:
            for v in part:
                perm[v] = newidx
                newidx += 1
        pe = tuple(sorted(tuple(sorted((perm[i], perm[j]))) for i, j in edges))
        pt = [0] * n_vertices
        for i in range(n_vertices):
            pt[perm[i]] = tails[i]
        enc = (pe, tuple(pt))
        if best is None or enc < best:
            best = enc
    assert best is not None
    return best


def _build(encoding: Encoding) -> StableGraph:
    edges_enc, tails_enc = encoding
    n_vertices = len(tails_enc)
    vertices = [f"v{i}" for i in range(n_vertices)]
    slot = {v: -1 for v in vertices}

    def next_slot(v: str) -> int:
        slot[v] += 1
        return slot[v]

    edges = []
    for k, (i, j) in enumerate(edges_enc):
        vi, vj = vertices[i], vertices[j]
        edges.append(Edge(f"e{k}", vi, next_slot(vi), vj, next_slot(vj)))
    tails = []
    nu = 1
    for i, c in enumerate(tails_enc):
        for _ in range(c):
            tails.append(Tail(f"t{nu}", vertices[i], nu))
            nu += 1
    return StableGraph(vertices, edges, tails)


def stable_graphs(g: int, n: int, trivalent_only: bool = True) -> list[StableGraph]:
    """All stable graphs of type (g, n) up to isomorphism.

    A stable graph here has first Betti number g, n tails, and valence
    at least three everywhere (exactly three when ``trivalent_only``).
    """
    if 2 * g - 2 + n <= 0:
        raise ValueError("unstable type")
    out: dict[Encoding, StableGraph] = {}
    max_v = 2 * g - 2 + n
    v_range = [max_v] if trivalent_only else range(1, max_v + 1)
    for nv in v_range:
        ne = g + nv - 1
        if ne < 0:
            continue
        for tails in _tail_vectors(n, nv):
            if trivalent_only:
                deg = [3 - c for c in tails]
                if any(d < 0 for d in deg) or sum(deg) != 2 * ne:
                    continue
                deg_choices = [deg]
            else:
                deg_choices = list(_degree_vectors(2 * ne, nv, tails))
            for deg in deg_choices:
                for edges in _multigraphs(list(deg)):
                    if not _connected(nv, edges):
                        continue
                    val = [deg[i] + tails[i] for i in range(nv)]
                    if any(v < 3 for v in val):
                        continue
                    key = _canonical(nv, edges, tails)
                    if key not in out:
                        gr = _build(key)
                        gr.validate(expect=(g, n))
                        out[key] = gr
    return [out[k] for k in sorted(out)]


def _tail_vectors(n: int, nv: int) -> Iterator[tuple[int, ...]]:
    if nv == 1:
        yield (n,)
        return
    for head in range(n + 1):
        for rest in _tail_vectors(n - head, nv - 1):
            yield (head,) + rest


def _degree_vectors(total: int, nv: int,
                    tails: Sequence[int]) -> Iterator[tuple[int, ...]]:
    """Edge-stub degree vectors with valence >= 3 after adding tails."""
    if nv == 1:
        need = max(0, 3 - tails[0])
        if total >= need:
            yield (total,)
        return
    need = max(0, 3 - tails[0])
    for d in range(need, total + 1):
        for rest in _degree_vectors(total - d, nv - 1, tails[1:]):
            yield (d,) + rest


def canonical_key(graph: StableGraph) -> Encoding:
    """Isomorphism invariant (tail numbering ignored)."""
    idx = {v: i for i, v in enumerate(graph.vertices)}
    edges = [(idx[e.from_vertex], idx[e.to_vertex]) for e in graph.edges.values()]
    tails = [0] * len(graph.vertices)
    for t in graph.tails.values():
        tails[idx[t.vertex]] += 1
    return _canonical(len(graph.vertices), edges, tails)


def isomorphic(g1: StableGraph, g2: StableGraph) -> bool:
    return canonical_key(g1) == canonical_key(g2)


def whitehead_neighbors(graph: StableGraph) -> set[Encoding]:
    """Canonical keys of all trivalent graphs reachable by contracting a
    non-loop edge and re-expanding the merged vertex."""
    out: set[Encoding] = set()
    for eid, e in graph.edges.items():
        if e.from_vertex == e.to_vertex:
            continue
        merged = graph.contract_edge(eid)
        v = e.from_vertex
        branches = merged.branches_at(v)
        for b1, b2 in itertools.combinations(branches, 2):
            expanded = merged.expand_vertex(v, b1, b2)
            if expanded.is_trivalent():
                out.add(canonical_key(expanded))
    return out


def moves_connected(graphs: Sequence[StableGraph]) -> bool:
    """True when contract/expand moves connect the whole catalog."""
    if len(graphs) <= 1:
        return True
    keys = [canonical_key(g) for g in graphs]
    index = {k: i for i, k in enumerate(keys)}
    seen = {0}
    stack = [0]
    while stack:
        i = stack.pop()
        for k in whitehead_neighbors(graphs[i]):
            j = index.get(k)
            if j is not None and j not in seen:
                seen.add(j)
                stack.append(j)
    return len(seen) == len(graphs)
