"""Moebius generators over exact series rings and their fixed-point data.

Every half-edge ``h`` of a charted graph carries a Moebius matrix in the
edge parameters ``y_e``.  When both endpoint coordinates are finite the
normal form is

    phi_h = [[x_h, -x_h*x_{-h} + y], [1, -x_{-h}]],

the unique map with ``(phi(z) - x_h) * (z - x_{-h}) = y``: it sends a
neighbourhood of the source branch point to a neighbourhood of the
target branch point, with the edge parameter as the coupling constant.
When an endpoint sits at infinity the same bilinear relation (with local
coordinate ``1/z``) gives the degenerate normal forms; both halves at
infinity is excluded by the chart invariants.

Matrices act on the left, so the walk ``h1 then h2`` has matrix
``phi_{h2} @ phi_{h1}``.  At ``y = 0`` every generator is rank one,
which is what makes traces and fixed-point seeds units exactly when the
word is (cyclically) reduced.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .cpseries import TruncatedSeries as TS, solve_quadratic
from .stable_graph import StableGraph, edge_of, flip


class DegenerateWord(ValueError):
    """The word has no loxodromic normal form in this chart."""


@dataclass
class Moebius:
    a: TS
    b: TS
    c: TS
    d: TS

    def __matmul__(self, o: "Moebius") -> "Moebius":
        return Moebius(self.a * o.a + self.b * o.c,
                       self.a * o.b + self.b * o.d,
                       self.c * o.a + self.d * o.c,
                       self.c * o.b + self.d * o.d)

    def det(self) -> TS:
        return self.a * self.d - self.b * self.c

    def trace(self) -> TS:
        return self.a + self.d

    def adjugate(self) -> "Moebius":
        """Projective inverse: ``M @ M.adjugate() = det(M) * Id``."""
        return Moebius(self.d, -self.b, -self.c, self.a)

    def apply(self, z: TS) -> TS:
        """Evaluate the fractional-linear map at a series point.

        When the denominator vanishes at the origin but is a monomial
        times a unit, and the numerator shares that monomial (the point
        approaches the pole no faster than it must), the common factor
        cancels exactly; the result loses that much truncation order.
        """
        num = self.a * z + self.b
        den = self.c * z + self.d
        if den.is_unit():
            return num * den.invert()
        low = den.lowest_part()
        if len(low.terms) != 1:
            raise DegenerateWord("image of point is not a series")
        (exp,) = low.terms
        num = num.divide_monomial(exp)
        den = den.divide_monomial(exp)
        if not den.is_unit():
            raise DegenerateWord("image of point is not a series")
        return num * den.invert()

    def apply_infinity(self) -> TS:
        return self.a * self.c.invert()

    def entries(self) -> tuple[TS, TS, TS, TS]:
        return self.a, self.b, self.c, self.d

    @staticmethod
    def identity(vars: tuple[str, ...], trunc: int) -> "Moebius":
        one = TS.constant(1, vars, trunc)
        zero = TS.constant(0, vars, trunc)
        return Moebius(one, zero, zero, one)


def _as_series(x, vars: tuple[str, ...], trunc: int) -> TS:
    if isinstance(x, TS):
        if x.vars != vars or x.trunc != trunc:
            raise ValueError("series chart value has wrong ring")
        return x
    return TS.constant(Fraction(x), vars, trunc)


def edge_moebius(x_h, x_mh, y: TS) -> Moebius:
    """Normal form for one half-edge.

    ``x_h`` / ``x_mh`` are the target / source branch coordinates, each a
    rational, a series, or ``None`` for the point at infinity; ``y`` is
    the edge parameter as a series.
    """
    vars, trunc = y.vars, y.trunc
    one = TS.constant(1, vars, trunc)
    zero = TS.constant(0, vars, trunc)
    if x_h is None and x_mh is None:
        raise DegenerateWord("both endpoints at infinity")
    if x_h is None:
        return Moebius(one, -_as_series(x_mh, vars, trunc), zero, y)
    if x_mh is None:
        return Moebius(y, _as_series(x_h, vars, trunc), zero, one)
    xh = _as_series(x_h, vars, trunc)
    xm = _as_series(x_mh, vars, trunc)
    return Moebius(xh, -(xh * xm) + y, one, -xm)


def word_vars(word: Sequence[str]) -> tuple[str, ...]:
    """Edge-parameter variables appearing in a word, in canonical order."""
    return tuple(sorted({edge_of(h) for h in word}))


def phi_matrix(graph: StableGraph, h: str,
               vars: tuple[str, ...] | None = None, trunc: int = 6) -> Moebius:
    """Generator matrix for half-edge ``h`` in the graph's chart."""
    if graph.chart is None:
        raise ValueError("graph has no chart")
    e = edge_of(h)
    if vars is None:
        vars = tuple(sorted(graph.edges))
    if e not in vars:
        raise ValueError(f"variable ring misses edge {e}")
    y = TS.variable(e, vars, trunc)
    return edge_moebius(graph.chart.x(h), graph.chart.x(flip(h)), y)


def word_matrix(graph: StableGraph, word: Sequence[str],
                vars: tuple[str, ...] | None = None, trunc: int = 6) -> Moebius:
    """Matrix of the composite map along a reduced path (applied left to
    right, so the first step's matrix sits rightmost)."""
    if not word:
        raise ValueError("empty word")
    graph.check_path(word, closed=False, reduced=True)
    if vars is None:
        vars = word_vars(word)
    m = phi_matrix(graph, word[0], vars, trunc)
    for h in word[1:]:
        m = phi_matrix(graph, h, vars, trunc) @ m
    return m


def cross_ratio(a: TS, b: TS, c: TS, d: TS) -> TS:
    """[a, b; c, d] = (a-c)(b-d) / ((a-d)(b-c)); denominator must be a unit."""
    return (a - c) * (b - d) * ((a - d) * (b - c)).invert()


@dataclass
class FixedPointData:
    word: list[str]
    matrix: Moebius
    trace: TS
    det: TS
    x: TS          # unit eigenvalue
    x_prime: TS    # complementary eigenvalue (positive order)
    beta: TS       # multiplier x_prime / x
    u: TS          # x / trace
    nu: TS         # det / trace^2
    alpha: TS | None = None        # attractive fixed point
    alpha_prime: TS | None = None  # repulsive fixed point


def _require_cyclically_reduced(graph: StableGraph, word: Sequence[str]) -> None:
    graph.check_path(word, closed=True, reduced=True)
    if len(word) >= 2 and word[0] == flip(word[-1]):
        raise DegenerateWord("word is not cyclically reduced")


def multiplier_data(graph: StableGraph, word: Sequence[str],
                    trunc: int = 6) -> FixedPointData:
    """Eigenvalue split and multiplier of a closed cyclically reduced word.

    The trace is a unit exactly because the word is cyclically reduced
    and the chart is generic; the two eigenvalues are separated by their
    orders (unit vs. positive order) and the multiplier is their ratio.
    """
    _require_cyclically_reduced(graph, word)
    vars = word_vars(word)
    m = word_matrix(graph, word, vars, trunc)
    tr = m.trace()
    t0 = tr.constant_term()
    if t0 == 0:
        raise DegenerateWord("trace vanishes at the origin")
    det = m.det()
    one = TS.constant(1, vars, trunc)
    x = solve_quadratic(one, -tr, det, t0)
    x_prime = tr - x
    inv_x = x.invert()
    inv_tr = tr.invert()
    return FixedPointData(list(word), m, tr, det, x, x_prime,
                          x_prime * inv_x, x * inv_tr, det * inv_tr * inv_tr)


def fixed_points_multiplier(graph: StableGraph, word: Sequence[str],
                            trunc: int = 6) -> FixedPointData:
    """Multiplier plus attractive/repulsive fixed points as series.

    The fixed points are the roots of ``c z^2 + (d - a) z - b``; their
    zeroth-order seeds are the chart coordinates of the incoming branch
    ``x_{h_last}`` and the outgoing branch ``x_{-h_first}``, which must
    be finite (re-chart the graph otherwise).
    """
    data = multiplier_data(graph, word, trunc)
    seed_a = graph.chart.x(word[-1])
    seed_r = graph.chart.x(flip(word[0]))
    if seed_a is None or seed_r is None:
        raise DegenerateWord("fixed point at infinity in this chart")
    m = data.matrix
    a1 = m.d - m.a
    a0 = -m.b
    data.alpha = solve_quadratic(m.c, a1, a0, Fraction(seed_a))
    data.alpha_prime = solve_quadratic(m.c, a1, a0, Fraction(seed_r))
    return data


def edge_multiplicity(word: Sequence[str]) -> dict[str, int]:
    mult: dict[str, int] = {}
    for h in word:
        e = edge_of(h)
        mult[e] = mult.get(e, 0) + 1
    return mult


def verify_word(graph: StableGraph, word: Sequence[str],
                trunc: int = 6) -> dict:
    """Check the normal-form predictions for one closed word.

    * ``alpha``: the attractive fixed point differs from the incoming
      branch coordinate by a multiple of the last edge's parameter;
    * ``alpha_prime``: symmetrically, by a multiple of the first edge's;
    * ``beta``: the multiplier's lowest part is a single monomial whose
      exponent vector is the edge multiplicity of the word;
    * ``residual``: both fixed points are exactly fixed by the word map.
    """
    data = fixed_points_multiplier(graph, word, trunc)
    vars = data.x.vars
    last_edge = edge_of(word[-1])
    first_edge = edge_of(word[0])
    xa = TS.constant(graph.chart.x(word[-1]), vars, trunc)
    xr = TS.constant(graph.chart.x(flip(word[0])), vars, trunc)
    da = data.alpha - xa
    dr = data.alpha_prime - xr
    ord_a = da.ideal_order((last_edge,))
    ord_r = dr.ideal_order((first_edge,))
    mult = edge_multiplicity(word)
    low = data.beta.lowest_part()
    expect_exp = tuple(mult.get(v, 0) for v in vars)
    beta_ok = (len(low.terms) == 1 and expect_exp in low.terms)
    res_a = (data.matrix.a * data.alpha + data.matrix.b
             - data.alpha * (data.matrix.c * data.alpha + data.matrix.d))
    res_r = (data.matrix.a * data.alpha_prime + data.matrix.b
             - data.alpha_prime * (data.matrix.c * data.alpha_prime
                                   + data.matrix.d))
    checks = {
        "alpha_divisible": ord_a >= 1,
        "alpha_prime_divisible": ord_r >= 1,
        "beta_monomial": beta_ok,
        "residual": res_a.is_zero() and res_r.is_zero(),
        "eigen_split": (data.x * data.x_prime - data.det).is_zero(),
    }
    return {
        "word": list(word),
        "orders": {
            "alpha": ord_a,
            "alpha_prime": ord_r,
            "beta": {e: mult[e] for e in sorted(mult)},
        },
        "checks": checks,
        "pass": all(checks.values()),
    }


def random_closed_word(graph: StableGraph, rng, length: int) -> list[str]:
    """Random cyclically reduced closed word of exactly this length."""
    halves = graph.half_edges()
    for _ in range(20000):
        word = [rng.choice(halves)]
        while len(word) < length:
            opts = [h for h in halves
                    if graph.origin(h) == graph.terminus(word[-1])
                    and h != flip(word[-1])]
            if not opts:
                break
            word.append(rng.choice(opts))
        if len(word) != length:
            continue
        if graph.origin(word[0]) != graph.terminus(word[-1]):
            continue
        if length >= 2 and word[0] == flip(word[-1]):
            continue
        return word
    raise ValueError(f"no closed word of length {length} found")


def verify_graph(graph: StableGraph, max_len: int = 4,
                 trunc: int = 6) -> dict:
    """Run :func:`verify_word` over every cyclically reduced closed word
    up to the given length (one representative per rotation class)."""
    words = graph.closed_words(max_len)
    reports = [verify_word(graph, w, trunc) for w in words]
    return {
        "type": list(graph.gn_type()),
        "n_words": len(reports),
        "pass": all(r["pass"] for r in reports),
        "words": reports,
    }
