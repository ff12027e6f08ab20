"""Residue assignments on stable graphs and their monodromy calculus.

Every branch of a stable graph (tails and half-edges) carries a residue
element in a free Lie-exponential algebra: tails are letters, the two
halves of each cycle edge carry the Bernoulli-type elements built from
a dedicated letter pair, the halves of tree edges are opposite, and the
branches at each vertex sum to zero.  These constraints have a unique
solution once one distinguished tail is eliminated (leaf-to-root along
the spanning tree); for graphs without tails the letters satisfy one
global relation — the sum of the letter brackets — and computations
happen in the quotient by the two-sided ideal it generates.

On top of the residues, paths on the graph generate monodromy elements
by three moves: transporting between two branches at a vertex (an
associator in the two residues), turning around a branch (exponential
of 2 i pi times its residue), and crossing an edge (exponential of the
edge-log symbol times the residue for tree edges; the node factor for
cycle edges).  Coefficients are polynomials in the normalized edge
logarithms over exact period combinations, and every element admits a
finite tabular decomposition whose entries absorb the factorials of the
log exponents.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product as iter_product
from math import factorial
from typing import Mapping, Sequence

from .associator import kz_associator
from .constants import ConstantCombination, in_zeta_span
from .elliptic import w_infinity, w_zero
from .logpoly import LogPoly, logpoly_ring
from .ncseries import NCSeries, RATIONAL, Ring
from .stable_graph import StableGraph, edge_of, flip, half

Word = tuple[int, ...]


class GlueInconsistent(ValueError):
    """The residue constraints admit no solution."""


class NonIntegralCoefficient(ValueError):
    """A decomposition entry leaves the integral span of the basis."""


class UnsupportedDressing(ValueError):
    """Deformation corrections are not implemented for this layout."""


def tail_letter(tail_id: str) -> str:
    return f"X_{tail_id}"


def node_letters(edge_id: str) -> tuple[str, str]:
    return f"T_{edge_id}", f"A_{edge_id}"


# ---------------------------------------------------------------------------
# quotient by the global relation (graphs without tails)


class IdealReducer:
    """Canonical representatives modulo the two-sided ideal generated by
    a homogeneous degree-two relation, per word degree."""

    def __init__(self, alphabet: Sequence[str], relation: NCSeries,
                 trunc: int):
        self.alphabet = tuple(alphabet)
        self.trunc = trunc
        if any(len(w) != 2 for w in relation.terms):
            raise ValueError("relation must be homogeneous of degree two")
        rel = sorted(relation.terms.items())
        n = len(self.alphabet)
        self.pivots: dict[Word, dict[Word, Fraction]] = {}
        for d in range(2, trunc + 1):
            for a in range(d - 1):
                for u in iter_product(range(n), repeat=a):
                    for v in iter_product(range(n), repeat=d - 2 - a):
                        row = {u + w + v: Fraction(c) for w, c in rel}
                        self._insert(row)

    def _insert(self, row: dict[Word, Fraction]) -> None:
        while row:
            piv = min(row)
            prow = self.pivots.get(piv)
            if prow is None:
                c = row.pop(piv)
                self.pivots[piv] = {piv: Fraction(1),
                                    **{w: q / c for w, q in row.items()}}
                return
            c = row.pop(piv)
            for w, q in prow.items():
                if w == piv:
                    continue
                s = row.get(w, Fraction(0)) - c * q
                if s:
                    row[w] = s
                else:
                    row.pop(w, None)

    def reduce(self, series: NCSeries) -> NCSeries:
        """Eliminate every pivot word; ring-agnostic (rational pivots)."""
        terms = dict(series.terms)
        embed = series.ring.embed
        zero = series.ring.zero
        for piv in sorted(self.pivots):
            c = terms.get(piv)
            if c is None or c == zero:
                continue
            for w, q in self.pivots[piv].items():
                s = terms.get(w, zero) - c * embed(q)
                if s != zero:
                    terms[w] = s
                else:
                    terms.pop(w, None)
        return NCSeries(series.alphabet, series.trunc, series.ring, terms)


# ---------------------------------------------------------------------------
# the residue sheaf


@dataclass
class ResidueSheaf:
    graph: StableGraph
    trunc: int
    alphabet: tuple[str, ...]
    residues: dict[str, NCSeries]
    tree_edges: tuple[str, ...]
    cycle_edges: tuple[str, ...]
    dropped_tail: str | None
    relation: NCSeries | None = None
    reducer: IdealReducer | None = field(default=None, repr=False)

    def residue(self, branch: str) -> NCSeries:
        return self.residues[branch]

    def reduce(self, series: NCSeries) -> NCSeries:
        return self.reducer.reduce(series) if self.reducer else series

    def vertex_sum(self, v: str) -> NCSeries:
        total = NCSeries.zero(self.alphabet, self.trunc, RATIONAL)
        for b in self.graph.branches_at(v):
            total = total + self.residues[b]
        return total

    def check_invariants(self) -> None:
        g = self.graph
        for v in g.vertices:
            if not self.reduce(self.vertex_sum(v)).is_zero():
                raise GlueInconsistent(f"branches at {v} do not sum to zero")
        for eid in self.tree_edges:
            s = self.residues[half(eid, "+")] + self.residues[half(eid, "-")]
            if not s.is_zero():
                raise GlueInconsistent(f"halves of tree edge {eid} not opposite")
        for eid in self.cycle_edges:
            t_name, _ = node_letters(eid)
            t = NCSeries.letter(t_name, self.alphabet, self.trunc, RATIONAL)
            coeffs = [Fraction(1, factorial(n)) for n in range(self.trunc)]
            twisted = t.ad_series(coeffs, self.residues[half(eid, "+")])
            if not (twisted + self.residues[half(eid, "-")]).is_zero():
                raise GlueInconsistent(f"node identity fails at {eid}")


def build_sheaf(graph: StableGraph, trunc: int) -> ResidueSheaf:
    tree, cycle = graph.maximal_subtree()
    tails = sorted(graph.tails.values(), key=lambda t: t.nu)
    dropped = tails[-1].id if tails else None
    kept = [t.id for t in tails[:-1]] if tails else []

    alphabet = tuple(tail_letter(t) for t in kept) + tuple(
        name for eid in cycle for name in node_letters(eid))
    if not alphabet:
        raise GlueInconsistent("graph carries no letters (no tails, genus 0?)")

    residues: dict[str, NCSeries] = {}
    for t in kept:
        residues[t] = NCSeries.letter(tail_letter(t), alphabet, trunc, RATIONAL)
    for eid in cycle:
        t_name, a_name = node_letters(eid)
        ren = {"T": t_name, "A": a_name}
        residues[half(eid, "+")] = \
            w_zero(trunc).rename(ren).extend(alphabet)
        residues[half(eid, "-")] = \
            w_infinity(trunc).rename(ren).extend(alphabet)

    root = graph.tails[dropped].vertex if dropped else graph.vertices[0]

    # orientation of tree edges toward the root: BFS order.  A half-edge
    # sits at its terminus, so the branch at the child vertex w is the
    # half h with origin at the parent and terminus at w.
    order = [root]
    parent_branch: dict[str, str] = {}
    seen = {root}
    frontier = [root]
    while frontier:
        nxt = []
        for v in frontier:
            for eid in tree:
                for h in (half(eid, "+"), half(eid, "-")):
                    if graph.origin(h) == v and graph.terminus(h) not in seen:
                        w = graph.terminus(h)
                        seen.add(w)
                        parent_branch[w] = h
                        order.append(w)
                        nxt.append(w)
        frontier = nxt
    if set(order) != set(graph.vertices):
        raise GlueInconsistent("spanning tree does not reach every vertex")

    for v in reversed(order[1:]):
        up = parent_branch[v]
        total = NCSeries.zero(alphabet, trunc, RATIONAL)
        for b in graph.branches_at(v):
            if b == up:
                continue
            total = total + residues[b]
        residues[up] = -total
        residues[flip(up)] = total

    relation = None
    reducer = None
    if cycle and not tails:
        relation = NCSeries.zero(alphabet, trunc, RATIONAL)
        for eid in cycle:
            t_name, a_name = node_letters(eid)
            t = NCSeries.letter(t_name, alphabet, trunc, RATIONAL)
            a = NCSeries.letter(a_name, alphabet, trunc, RATIONAL)
            relation = relation + t.bracket(a)
        reducer = IdealReducer(alphabet, relation, trunc)

    root_sum = NCSeries.zero(alphabet, trunc, RATIONAL)
    for b in graph.branches_at(root):
        if b != dropped:
            root_sum = root_sum + residues[b]
    if dropped is not None:
        residues[dropped] = -root_sum
    else:
        closing = reducer.reduce(root_sum) if reducer else root_sum
        if not closing.is_zero():
            raise GlueInconsistent("global residue relation fails")

    sheaf = ResidueSheaf(graph, trunc, alphabet, residues,
                         tuple(tree), tuple(cycle), dropped,
                         relation, reducer)
    sheaf.check_invariants()
    return sheaf


# ---------------------------------------------------------------------------
# monodromy moves

Move = tuple


def log_symbol(edge_id: str) -> str:
    return f"l_{edge_id}"


class MonodromyCalculator:
    """Composes path-grammar moves into monodromy elements."""

    def __init__(self, sheaf: ResidueSheaf):
        self.sheaf = sheaf
        self.graph = sheaf.graph
        self.trunc = sheaf.trunc
        self.lvars = tuple(log_symbol(e) for e in sorted(self.graph.edges))
        self.ring: Ring = logpoly_ring(self.lvars)
        self._embed = lambda c: LogPoly.constant(self.lvars, c)
        self.residues = {
            b: s.map_coefficients(
                lambda c: LogPoly.constant(self.lvars,
                                           ConstantCombination.rational(c)),
                self.ring)
            for b, s in sheaf.residues.items()}
        self._local_cache: dict[tuple[str, str], NCSeries] = {}

    def unit(self) -> NCSeries:
        return NCSeries.unit(self.sheaf.alphabet, self.trunc, self.ring)

    # -- the three move kinds ------------------------------------------

    def local(self, vertex: str, src: str, dst: str) -> NCSeries:
        branches = self.graph.branches_at(vertex)
        if src not in branches or dst not in branches or src == dst:
            raise ValueError(f"bad local move at {vertex}: {src} -> {dst}")
        key = (src, dst)
        cached = self._local_cache.get(key)
        if cached is None:
            phi = kz_associator(self.trunc)
            cached = phi.substitute(
                {"X0": self.residues[src], "X1": self.residues[dst]},
                embed=self._embed)
            self._local_cache[key] = cached
        return cached

    def turn(self, vertex: str, branch: str, k: int = 1) -> NCSeries:
        if branch not in self.graph.branches_at(vertex):
            raise ValueError(f"{branch} is not a branch at {vertex}")
        factor = LogPoly.constant(self.lvars, ConstantCombination.ipi(1, 2 * k))
        return self.residues[branch].scale(factor).exp()

    def cross(self, h: str) -> NCSeries:
        eid = edge_of(h)
        two_ipi_log = LogPoly.symbol(self.lvars, log_symbol(eid),
                                     ConstantCombination.ipi(1, 2))
        if eid in self.sheaf.tree_edges:
            # Crossing along h lands at the vertex of h; the deformation
            # factor y^X carries the residue of the departing branch, so
            # that the arrival chart sees its node letter with weight -1.
            return self.residues[flip(h)].scale(two_ipi_log).exp()
        if eid not in self.sheaf.cycle_edges:
            raise ValueError(f"{eid} is not an edge")
        t_name, _ = node_letters(eid)
        t = NCSeries.letter(t_name, self.sheaf.alphabet, self.trunc, self.ring)
        w_inf = self.residues[half(eid, "-")]
        if h.endswith("+"):
            return w_inf.scale(-two_ipi_log).exp() * t.exp()
        return (-t).exp() * w_inf.scale(two_ipi_log).exp()

    # -- path composition ----------------------------------------------

    def _step(self, move: Move) -> tuple[NCSeries, tuple, tuple]:
        kind = move[0]
        if kind == "local":
            _, v, src, dst = move
            return self.local(v, src, dst), (v, src), (v, dst)
        if kind == "turn":
            _, v, b = move[:3]
            k = move[3] if len(move) > 3 else 1
            return self.turn(v, b, k), (v, b), (v, b)
        if kind == "cross":
            # traverse the edge along h: depart from the branch flip(h)
            # at origin(h), arrive on the branch h at terminus(h)
            _, h = move
            start = (self.graph.origin(h), flip(h))
            end = (self.graph.terminus(h), h)
            return self.cross(h), start, end
        raise ValueError(f"unknown move {move!r}")

    def path(self, moves: Sequence[Move]) -> NCSeries:
        """Monodromy of a move sequence (composed in traversal order)."""
        total = self.unit()
        state: tuple | None = None
        for move in moves:
            matrix, start, end = self._step(move)
            if state is not None and state != start:
                raise ValueError(
                    f"move {move!r} starts at {start}, path is at {state}")
            state = end
            total = matrix * total
        return total

    # -- standard paths --------------------------------------------------

    def tail_path_moves(self, src_tail: str, dst_tail: str) -> list[Move]:
        """Moves for the spanning-tree path between two tails."""
        g = self.graph
        v0 = g.tails[src_tail].vertex
        v1 = g.tails[dst_tail].vertex
        walk = g.tree_path(v0, v1, list(self.sheaf.tree_edges))
        moves: list[Move] = []
        at_branch = src_tail
        at_vertex = v0
        for h in walk:
            moves.append(("local", at_vertex, at_branch, flip(h)))
            moves.append(("cross", h))
            at_branch = h
            at_vertex = g.terminus(h)
        moves.append(("local", at_vertex, at_branch, dst_tail))
        return moves

    def loop_moves(self, word: Sequence[str]) -> list[Move]:
        """Moves for a closed half-edge word, based at the departure
        branch of its first step.  Arriving and departing on the same
        branch (a cyclically unreduced corner) is an identity transport
        and contributes no move."""
        g = self.graph
        g.check_path(list(word), closed=True, reduced=True)
        moves: list[Move] = []
        for i, h in enumerate(word):
            if i and word[i - 1] != flip(h):
                moves.append(("local", g.origin(h), word[i - 1], flip(h)))
            moves.append(("cross", h))
        if word[-1] != flip(word[0]):
            moves.append(("local", g.origin(word[0]), word[-1],
                          flip(word[0])))
        return moves

    # -- deformation corrections -----------------------------------------

    def dressed_tail_transport(self, src_tail: str, dst_tail: str, *,
                               ydeg: int, xorder: int = 36,
                               kmax: int = 26) -> NCSeries:
        """Tail-to-tail transport with corrections up to ``y^ydeg`` in
        the edge parameter, for a two-vertex tree whose path tails sit
        at the middle slot of both charts.

        Coefficients live in the sew ring (powers of ``y``, of
        ``log(y) / (2 i pi)`` and of the internal cut symbol); the
        ``y``-constant layer agrees with :meth:`path` over the moves of
        :meth:`tail_path_moves` on the same tails.
        """
        from .sewing import SEW, SewCoeff, dressed_neck_transport

        g = self.graph
        if len(g.edges) != 1 or self.sheaf.cycle_edges:
            raise UnsupportedDressing(
                "deformation corrections need a single tree edge")
        v_src = g.tails[src_tail].vertex
        v_dst = g.tails[dst_tail].vertex
        if v_src == v_dst:
            raise UnsupportedDressing(
                "the path tails must sit on opposite charts")
        src_branches = g.branches_at(v_src)
        dst_branches = g.branches_at(v_dst)
        if src_branches[1] != src_tail or dst_branches[1] != dst_tail:
            raise UnsupportedDressing(
                "the path tails must occupy the middle chart slot")

        def embed(branch: str) -> NCSeries:
            return self.sheaf.residues[branch].map_coefficients(
                lambda fr: SewCoeff.of(fr), SEW)

        spectator = embed(src_branches[2])
        return dressed_neck_transport(
            spectator, embed(src_tail), embed(dst_tail),
            ydeg=ydeg, xorder=xorder, kmax=kmax)


# ---------------------------------------------------------------------------
# tabular decomposition of monodromy elements


def decompose_element(elem: NCSeries) -> dict:
    """Entry table of a monodromy element.

    The entry at (word, log-exponent e) is the coefficient of the
    corresponding monomial multiplied by the factorials of the
    exponents; ``reassemble_element`` inverts this exactly.  Each entry
    also records whether its value lies in the Z-span of products of
    (i*pi)-powers and zeta values (the value-level membership test of
    :func:`curvelog.constants.in_zeta_span`).
    """
    entries = []
    violations = []
    max_deg = 0
    for w in sorted(elem.terms, key=lambda w: (len(w), w)):
        poly: LogPoly = elem.terms[w]
        for e in sorted(poly.terms):
            cc = poly.terms[e]
            scale = 1
            for k in e:
                scale *= factorial(k)
            entry = cc * Fraction(scale)
            ok = in_zeta_span(entry)
            idx = len(entries)
            entries.append({
                "word": [elem.alphabet[i] for i in w],
                "log_exp": list(e),
                "coeff": entry.to_json(),
                "integral": ok,
            })
            if not ok:
                violations.append(idx)
            max_deg = max(max_deg, sum(e))
    return {
        "alphabet": list(elem.alphabet),
        "lvars": list(next(iter(elem.terms.values())).vars)
        if elem.terms else [],
        "trunc": elem.trunc,
        "entries": entries,
        "n_entries": len(entries),
        "max_log_degree": max_deg,
        "all_integral": not violations,
        "violations": violations,
    }


def reassemble_element(report: dict, ring: Ring) -> NCSeries:
    alphabet = tuple(report["alphabet"])
    lvars = tuple(report["lvars"])
    idx = {a: i for i, a in enumerate(alphabet)}
    terms: dict[Word, LogPoly] = {}
    for entry in report["entries"]:
        w = tuple(idx[l] for l in entry["word"])
        e = tuple(entry["log_exp"])
        scale = 1
        for k in e:
            scale *= factorial(k)
        cc = ConstantCombination.from_json(entry["coeff"]) * Fraction(1, scale)
        poly = terms.get(w, LogPoly.zero(lvars)) + LogPoly(lvars, {e: cc})
        terms[w] = poly
    return NCSeries(alphabet, report["trunc"], ring, terms)


def assert_integral(report: dict) -> None:
    if not report["all_integral"]:
        bad = [report["entries"][i] for i in report["violations"][:3]]
        raise NonIntegralCoefficient(
            f"{len(report['violations'])} entries leave the integral span; "
            f"first: {bad}")


def specialize_logs(elem: NCSeries, edge_values: Mapping[str, complex],
                    prec: float = 1e-12) -> NCSeries:
    """Numeric specialization: every edge symbol becomes
    ``log(y_edge) / (2 i pi)`` for the supplied gluing values."""
    import cmath
    from .ncseries import COMPLEX
    values = {log_symbol(e): cmath.log(complex(y)) / (2j * cmath.pi)
              for e, y in edge_values.items()}
    return elem.map_coefficients(
        lambda p: p.evaluate(values, prec), COMPLEX)
