"""Truncated multivariate power series with exact rational coefficients.

A series is truncated at a fixed total degree: terms of total degree
strictly above ``trunc`` are dropped by every operation.  Coefficients are
``fractions.Fraction`` throughout, so all arithmetic is exact.  Variables
are named; the variable tuple is part of the series and two series must
agree on it before they can be combined (use :func:`align` to merge).

The representation is a sparse dict mapping exponent tuples to nonzero
coefficients.  Ring operations keep the invariant that no zero coefficient
is stored.
"""
from __future__ import annotations

import json
import math
from fractions import Fraction
from typing import Iterable, Mapping

Exponent = tuple[int, ...]

_ZERO = Fraction(0)
_ONE = Fraction(1)


def _as_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value)
    raise TypeError(f"not an exact scalar: {value!r}")


class TruncatedSeries:
    __slots__ = ("vars", "trunc", "terms")

    def __init__(self, vars: Iterable[str], trunc: int,
                 terms: Mapping[Exponent, Fraction] | None = None):
        self.vars = tuple(vars)
        if trunc < 0:
            raise ValueError("truncation degree must be >= 0")
        self.trunc = int(trunc)
        clean: dict[Exponent, Fraction] = {}
        if terms:
            nv = len(self.vars)
            for exp, c in terms.items():
                exp = tuple(int(e) for e in exp)
                if len(exp) != nv:
                    raise ValueError("exponent arity mismatch")
                if any(e < 0 for e in exp):
                    raise ValueError("negative exponent")
                if sum(exp) > self.trunc:
                    continue
                c = _as_fraction(c)
                if c != 0:
                    clean[exp] = c
        self.terms = clean

    # ------------------------------------------------------------------
    # constructors

    @classmethod
    def constant(cls, value, vars: Iterable[str], trunc: int) -> "TruncatedSeries":
        vars = tuple(vars)
        c = _as_fraction(value)
        if c == 0:
            return cls(vars, trunc)
        return cls(vars, trunc, {(0,) * len(vars): c})

    @classmethod
    def variable(cls, name: str, vars: Iterable[str], trunc: int) -> "TruncatedSeries":
        vars = tuple(vars)
        idx = vars.index(name)
        exp = tuple(1 if i == idx else 0 for i in range(len(vars)))
        return cls(vars, trunc, {exp: _ONE})

    def copy(self) -> "TruncatedSeries":
        out = TruncatedSeries.__new__(TruncatedSeries)
        out.vars = self.vars
        out.trunc = self.trunc
        out.terms = dict(self.terms)
        return out

    # ------------------------------------------------------------------
    # inspection

    def is_zero(self) -> bool:
        return not self.terms

    def constant_term(self) -> Fraction:
        return self.terms.get((0,) * len(self.vars), _ZERO)

    def is_unit(self) -> bool:
        return self.constant_term() != 0

    def order(self) -> int | float:
        """Minimal total degree of a nonzero term (``math.inf`` for 0)."""
        if not self.terms:
            return math.inf
        return min(sum(e) for e in self.terms)

    def ideal_order(self, ideal_vars: Iterable[str] | None = None) -> int | float:
        """Minimal total degree counted on ``ideal_vars`` only.

        With the default (all variables) this is :meth:`order`.  Returns
        ``math.inf`` for the zero series.
        """
        if not self.terms:
            return math.inf
        if ideal_vars is None:
            return self.order()
        idx = [i for i, v in enumerate(self.vars) if v in set(ideal_vars)]
        return min(sum(e[i] for i in idx) for e in self.terms)

    def homogeneous_part(self, degree: int) -> "TruncatedSeries":
        terms = {e: c for e, c in self.terms.items() if sum(e) == degree}
        return TruncatedSeries(self.vars, self.trunc, terms)

    def lowest_part(self) -> "TruncatedSeries":
        d = self.order()
        if d is math.inf:
            return TruncatedSeries(self.vars, self.trunc)
        return self.homogeneous_part(int(d))

    def coefficient(self, exp: Exponent) -> Fraction:
        return self.terms.get(tuple(exp), _ZERO)

    def __eq__(self, other) -> bool:
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        return (self.vars == other.vars and self.trunc == other.trunc
                and self.terms == other.terms)

    def __hash__(self):
        raise TypeError("TruncatedSeries is mutable-ish; not hashable")

    def __repr__(self) -> str:
        if not self.terms:
            return "<series 0>"
        bits = []
        for exp in sorted(self.terms)[:6]:
            mono = "*".join(f"{v}^{e}" for v, e in zip(self.vars, exp) if e)
            bits.append(f"{self.terms[exp]}{'*' + mono if mono else ''}")
        more = "+..." if len(self.terms) > 6 else ""
        return f"<series {' + '.join(bits)}{more} (D={self.trunc})>"

    # ------------------------------------------------------------------
    # ring operations

    def _check_compat(self, other: "TruncatedSeries") -> None:
        if self.vars != other.vars:
            raise ValueError(f"variable mismatch: {self.vars} vs {other.vars}")
        if self.trunc != other.trunc:
            raise ValueError("truncation mismatch")

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = TruncatedSeries.constant(other, self.vars, self.trunc)
        self._check_compat(other)
        terms = dict(self.terms)
        for e, c in other.terms.items():
            s = terms.get(e, _ZERO) + c
            if s:
                terms[e] = s
            else:
                terms.pop(e, None)
        out = TruncatedSeries.__new__(TruncatedSeries)
        out.vars, out.trunc, out.terms = self.vars, self.trunc, terms
        return out

    __radd__ = __add__

    def __neg__(self):
        out = TruncatedSeries.__new__(TruncatedSeries)
        out.vars, out.trunc = self.vars, self.trunc
        out.terms = {e: -c for e, c in self.terms.items()}
        return out

    def __sub__(self, other):
        if isinstance(other, (int, Fraction)):
            other = TruncatedSeries.constant(other, self.vars, self.trunc)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, value) -> "TruncatedSeries":
        c = _as_fraction(value)
        out = TruncatedSeries.__new__(TruncatedSeries)
        out.vars, out.trunc = self.vars, self.trunc
        out.terms = {} if c == 0 else {e: c * k for e, k in self.terms.items()}
        return out

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        self._check_compat(other)
        a, b = self.terms, other.terms
        if len(a) > len(b):
            a, b = b, a
        trunc = self.trunc
        bdeg = [(e, sum(e), c) for e, c in b.items()]
        out: dict[Exponent, Fraction] = {}
        get = out.get
        for ea, ca in a.items():
            da = sum(ea)
            room = trunc - da
            for eb, db, cb in bdeg:
                if db > room:
                    continue
                e = tuple(x + y for x, y in zip(ea, eb))
                s = get(e)
                p = ca * cb
                if s is None:
                    out[e] = p
                else:
                    s = s + p
                    if s:
                        out[e] = s
                    else:
                        del out[e]
        res = TruncatedSeries.__new__(TruncatedSeries)
        res.vars, res.trunc, res.terms = self.vars, self.trunc, out
        return res

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("use invert() for negative powers")
        result = TruncatedSeries.constant(1, self.vars, self.trunc)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base if n > 1 else base
            n >>= 1
        return result

    def invert(self) -> "TruncatedSeries":
        """Multiplicative inverse; the constant term must be nonzero."""
        c0 = self.constant_term()
        if c0 == 0:
            raise ValueError("series is not a unit (zero constant term)")
        inv0 = 1 / c0
        # graded recurrence: h_d = -inv0 * sum_{i=1..d} f_i h_{d-i}
        f_parts = _grade(self.terms)
        h_parts: dict[int, dict[Exponent, Fraction]] = {
            0: {(0,) * len(self.vars): inv0}}
        for d in range(1, self.trunc + 1):
            acc: dict[Exponent, Fraction] = {}
            for i in range(1, d + 1):
                fi = f_parts.get(i)
                hj = h_parts.get(d - i)
                if not fi or not hj:
                    continue
                _conv_into(acc, fi, hj)
            part = {e: -inv0 * c for e, c in acc.items() if c}
            if part:
                h_parts[d] = part
        terms: dict[Exponent, Fraction] = {}
        for part in h_parts.values():
            terms.update(part)
        out = TruncatedSeries.__new__(TruncatedSeries)
        out.vars, out.trunc, out.terms = self.vars, self.trunc, terms
        return out

    def divide(self, other: "TruncatedSeries") -> "TruncatedSeries":
        return self * other.invert()

    def divide_monomial(self, exp: Exponent, coeff=1) -> "TruncatedSeries":
        """Exact division by ``coeff * x^exp``; every term must be divisible.

        A series exact to degree D determines the quotient only up to
        degree D - deg(exp), so the truncation drops accordingly.
        """
        exp = tuple(exp)
        c = _as_fraction(coeff)
        if c == 0:
            raise ZeroDivisionError("zero monomial")
        terms: dict[Exponent, Fraction] = {}
        for e, k in self.terms.items():
            ne = tuple(a - b for a, b in zip(e, exp))
            if any(x < 0 for x in ne):
                raise ValueError(f"term {e} not divisible by {exp}")
            terms[ne] = k / c
        out = TruncatedSeries.__new__(TruncatedSeries)
        out.vars, out.trunc, out.terms = self.vars, self.trunc - sum(exp), terms
        return out

    # ------------------------------------------------------------------
    # structural operations

    def truncate(self, new_trunc: int) -> "TruncatedSeries":
        if new_trunc > self.trunc:
            raise ValueError("cannot raise truncation (information lost)")
        if new_trunc == self.trunc:
            return self.copy()
        terms = {e: c for e, c in self.terms.items() if sum(e) <= new_trunc}
        return TruncatedSeries(self.vars, new_trunc, terms)

    def rename(self, mapping: Mapping[str, str]) -> "TruncatedSeries":
        new_vars = tuple(mapping.get(v, v) for v in self.vars)
        if len(set(new_vars)) != len(new_vars):
            raise ValueError("renaming collides")
        return TruncatedSeries(new_vars, self.trunc, self.terms)

    def extend(self, vars: Iterable[str]) -> "TruncatedSeries":
        """Reinterpret over a superset variable tuple."""
        vars = tuple(vars)
        pos = []
        for v in self.vars:
            if v not in vars:
                raise ValueError(f"variable {v} missing from extension")
            pos.append(vars.index(v))
        nv = len(vars)
        terms: dict[Exponent, Fraction] = {}
        for e, c in self.terms.items():
            ne = [0] * nv
            for p, x in zip(pos, e):
                ne[p] = x
            terms[tuple(ne)] = c
        return TruncatedSeries(vars, self.trunc, terms)

    def substitute(self, images: Mapping[str, "TruncatedSeries"]) -> "TruncatedSeries":
        """Substitute series for variables.

        Every substituted image must have zero constant term (the result
        would otherwise need re-expansion beyond the truncation).  Images
        must share one variable tuple and truncation; unsubstituted
        variables must appear in the image ring under the same name.
        """
        if not images:
            return self.copy()
        sample = next(iter(images.values()))
        tvars, ttrunc = sample.vars, sample.trunc
        for name, img in images.items():
            if img.vars != tvars or img.trunc != ttrunc:
                raise ValueError("substitution images disagree on ring")
            if img.constant_term() != 0:
                raise ValueError(f"image of {name} has a constant term")
        base: dict[str, TruncatedSeries] = {}
        for v in self.vars:
            if v in images:
                base[v] = images[v]
            else:
                base[v] = TruncatedSeries.variable(v, tvars, ttrunc)
        one = TruncatedSeries.constant(1, tvars, ttrunc)
        # cache powers of each variable image
        powers: dict[str, list[TruncatedSeries]] = {v: [one] for v in self.vars}
        result = TruncatedSeries(tvars, ttrunc)
        for e, c in sorted(self.terms.items()):
            mono = one.scale(c)
            for v, k in zip(self.vars, e):
                if k == 0:
                    continue
                plist = powers[v]
                while len(plist) <= k:
                    plist.append(plist[-1] * base[v])
                mono = mono * plist[k]
            result = result + mono
        return result

    # ------------------------------------------------------------------
    # serialization

    def to_json(self) -> dict:
        items = []
        for e in sorted(self.terms):
            c = self.terms[e]
            items.append({"exp": list(e), "num": c.numerator, "den": c.denominator})
        return {"vars": list(self.vars), "trunc": self.trunc, "terms": items}

    @classmethod
    def from_json(cls, data: dict) -> "TruncatedSeries":
        terms = {tuple(t["exp"]): Fraction(t["num"], t["den"]) for t in data["terms"]}
        return cls(tuple(data["vars"]), int(data["trunc"]), terms)

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, separators=(",", ":"))

    @classmethod
    def loads(cls, text: str) -> "TruncatedSeries":
        return cls.from_json(json.loads(text))


def _grade(terms: Mapping[Exponent, Fraction]) -> dict[int, dict[Exponent, Fraction]]:
    parts: dict[int, dict[Exponent, Fraction]] = {}
    for e, c in terms.items():
        parts.setdefault(sum(e), {})[e] = c
    return parts


def _conv_into(acc: dict[Exponent, Fraction],
               a: Mapping[Exponent, Fraction],
               b: Mapping[Exponent, Fraction]) -> None:
    if len(a) > len(b):
        a, b = b, a
    get = acc.get
    for ea, ca in a.items():
        for eb, cb in b.items():
            e = tuple(x + y for x, y in zip(ea, eb))
            s = get(e)
            acc[e] = ca * cb if s is None else s + ca * cb


def align(*series: TruncatedSeries) -> list[TruncatedSeries]:
    """Re-express the given series over the union of their variables."""
    vars = tuple(sorted({v for s in series for v in s.vars}))
    trunc = min(s.trunc for s in series)
    return [s.truncate(trunc).extend(vars) if s.trunc != trunc else s.extend(vars)
            for s in series]


def solve_quadratic(a2: TruncatedSeries, a1: TruncatedSeries,
                    a0: TruncatedSeries, root0: Fraction) -> TruncatedSeries:
    """Solve ``a2*z^2 + a1*z + a0 = 0`` for the branch with constant term
    ``root0``, order by order in total degree.

    The linearization divisor ``2*a2(0)*root0 + a1(0)`` must be nonzero
    (simple root); otherwise ``ZeroDivisionError`` is raised.  All inputs
    must share variables and truncation.
    """
    a2._check_compat(a1)
    a2._check_compat(a0)
    vars, trunc = a2.vars, a2.trunc
    root0 = _as_fraction(root0)
    if a2.constant_term() * root0 ** 2 + a1.constant_term() * root0 \
            + a0.constant_term() != 0:
        raise ValueError("root0 does not solve the constant-term quadratic")
    div = 2 * a2.constant_term() * root0 + a1.constant_term()
    if div == 0:
        raise ZeroDivisionError("quadratic linearization is degenerate")
    inv_div = 1 / div
    p2 = _grade(a2.terms)
    p1 = _grade(a1.terms)
    p0 = _grade(a0.terms)
    zero_exp = (0,) * len(vars)
    z_parts: dict[int, dict[Exponent, Fraction]] = {}
    if root0 != 0:
        z_parts[0] = {zero_exp: root0}
    for d in range(1, trunc + 1):
        acc: dict[Exponent, Fraction] = {}
        # a2 * z * z contributions of total degree d, excluding the term
        # containing z_d itself (i = 0 and one factor of degree d with the
        # other of degree 0 and a2 of degree 0)
        for i in range(0, d + 1):
            ai = p2.get(i)
            if not ai:
                continue
            for j in range(0, d - i + 1):
                k = d - i - j
                if j == d or k == d:
                    # involves z_d; folded into the divisor
                    continue
                zj = z_parts.get(j)
                zk = z_parts.get(k)
                if not zj or not zk:
                    continue
                tmp: dict[Exponent, Fraction] = {}
                _conv_into(tmp, zj, zk)
                _conv_into(acc, ai, tmp)
        # the i>0, one-factor-z_d terms of a2*z^2: 2*a2_i*z0*z_d only when
        # j or k equals d needs z0; handled via divisor only for i=0.
        # For i>0 they involve z_d * a2_i which has degree > d unless z0
        # exists; but then total degree = i + d > d.  So nothing to add.
        for i in range(1, d + 1):
            ai = p1.get(i)
            zj = z_parts.get(d - i)
            if ai and zj:
                _conv_into(acc, ai, zj)
        if d in p0:
            for e, c in p0[d].items():
                acc[e] = acc.get(e, _ZERO) + c
        # a1_0 * z_d + 2 a2_0 z_0 z_d + acc = 0
        part = {e: -c * inv_div for e, c in acc.items() if c}
        if part:
            z_parts[d] = part
    terms: dict[Exponent, Fraction] = {}
    for part in z_parts.values():
        terms.update(part)
    out = TruncatedSeries.__new__(TruncatedSeries)
    out.vars, out.trunc, out.terms = vars, trunc, terms
    return out
