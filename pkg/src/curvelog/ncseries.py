"""Truncated noncommutative power series with pluggable coefficients.

Words are tuples of letter indices; everything of length beyond the
truncation is dropped.  Coefficients live in a ring described by a small
:class:`Ring` record (zero, one, embedding of rationals, JSON codec),
so the same series type serves exact rational computations, symbolic
period combinations, log-polynomials, and complex numerics.

Group-likeness is the shuffle-relation test: an element with constant
term 1 is group-like iff ``c(u) c(v) = sum_w <u sh v, w> c(w)`` for all
word pairs inside the truncation, which is the coefficient form of
"coproduct of the element = element tensor element".
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import product
from typing import Callable, Mapping, Sequence

Word = tuple[int, ...]


@dataclass(frozen=True)
class Ring:
    name: str
    zero: object
    one: object
    embed: Callable          # Fraction | int -> element
    encode: Callable         # element -> JSON-able
    decode: Callable         # JSON-able -> element
    close: Callable | None = None   # (a, b, tol) -> bool, for numeric rings


def _frac_encode(c: Fraction) -> str:
    return f"{c.numerator}/{c.denominator}"


RATIONAL = Ring("rational", Fraction(0), Fraction(1), Fraction,
                _frac_encode, Fraction)

COMPLEX = Ring("complex", complex(0), complex(1), complex,
               lambda c: {"re": c.real, "im": c.imag},
               lambda d: complex(d["re"], d["im"]),
               close=lambda a, b, tol: abs(a - b) <= tol)


@lru_cache(maxsize=None)
def shuffle_words(u: Word, v: Word) -> tuple[tuple[Word, int], ...]:
    """Shuffle product of two words as (word, multiplicity) pairs."""
    if not u:
        return ((v, 1),)
    if not v:
        return ((u, 1),)
    out: dict[Word, int] = {}
    for w, m in shuffle_words(u[1:], v):
        key = (u[0],) + w
        out[key] = out.get(key, 0) + m
    for w, m in shuffle_words(u, v[1:]):
        key = (v[0],) + w
        out[key] = out.get(key, 0) + m
    return tuple(sorted(out.items()))


class NCSeries:
    __slots__ = ("alphabet", "trunc", "ring", "terms")

    def __init__(self, alphabet: Sequence[str], trunc: int, ring: Ring,
                 terms: Mapping[Word, object] | None = None):
        self.alphabet = tuple(alphabet)
        if len(set(self.alphabet)) != len(self.alphabet):
            raise ValueError("duplicate letters")
        self.trunc = int(trunc)
        self.ring = ring
        self.terms: dict[Word, object] = {}
        if terms:
            for w, c in terms.items():
                if len(w) <= self.trunc and c != ring.zero:
                    self.terms[tuple(w)] = c

    # ------------------------------------------------------------------
    # constructors and inspection

    @classmethod
    def zero(cls, alphabet, trunc, ring=RATIONAL) -> "NCSeries":
        return cls(alphabet, trunc, ring)

    @classmethod
    def unit(cls, alphabet, trunc, ring=RATIONAL) -> "NCSeries":
        return cls(alphabet, trunc, ring, {(): ring.one})

    @classmethod
    def letter(cls, name: str, alphabet, trunc, ring=RATIONAL) -> "NCSeries":
        i = tuple(alphabet).index(name)
        return cls(alphabet, trunc, ring, {(i,): ring.one})

    def copy(self) -> "NCSeries":
        return NCSeries(self.alphabet, self.trunc, self.ring, self.terms)

    def coefficient(self, word: Sequence[str]):
        idx = tuple(self.alphabet.index(l) for l in word)
        return self.terms.get(idx, self.ring.zero)

    def word_name(self, w: Word) -> str:
        return "".join(self.alphabet[i] for i in w) if w else "1"

    def constant_term(self):
        return self.terms.get((), self.ring.zero)

    def is_zero(self) -> bool:
        return not self.terms

    def order(self) -> int:
        if not self.terms:
            return self.trunc + 1
        return min(len(w) for w in self.terms)

    def homogeneous_part(self, d: int) -> "NCSeries":
        return NCSeries(self.alphabet, self.trunc, self.ring,
                        {w: c for w, c in self.terms.items() if len(w) == d})

    def truncate(self, new_trunc: int) -> "NCSeries":
        if new_trunc > self.trunc:
            raise ValueError("cannot raise truncation")
        return NCSeries(self.alphabet, new_trunc, self.ring,
                        {w: c for w, c in self.terms.items()
                         if len(w) <= new_trunc})

    def map_coefficients(self, fn: Callable, ring: Ring) -> "NCSeries":
        return NCSeries(self.alphabet, self.trunc, ring,
                        {w: fn(c) for w, c in self.terms.items()})

    def _compat(self, other: "NCSeries") -> None:
        if self.alphabet != other.alphabet:
            raise ValueError("alphabet mismatch")
        if self.trunc != other.trunc:
            raise ValueError("truncation mismatch")
        if self.ring.name != other.ring.name:
            raise ValueError("coefficient ring mismatch")

    # ------------------------------------------------------------------
    # ring operations

    def __add__(self, other: "NCSeries") -> "NCSeries":
        self._compat(other)
        terms = dict(self.terms)
        zero = self.ring.zero
        for w, c in other.terms.items():
            s = terms.get(w, zero) + c
            if s != zero:
                terms[w] = s
            else:
                terms.pop(w, None)
        return NCSeries(self.alphabet, self.trunc, self.ring, terms)

    def __neg__(self) -> "NCSeries":
        return NCSeries(self.alphabet, self.trunc, self.ring,
                        {w: -c for w, c in self.terms.items()})

    def __sub__(self, other: "NCSeries") -> "NCSeries":
        return self + (-other)

    def scale(self, value) -> "NCSeries":
        """Multiply by a scalar: a rational (embedded) or ring element."""
        if isinstance(value, (int, Fraction)):
            value = self.ring.embed(Fraction(value))
        if value == self.ring.zero:
            return NCSeries.zero(self.alphabet, self.trunc, self.ring)
        return NCSeries(self.alphabet, self.trunc, self.ring,
                        {w: value * c for w, c in self.terms.items()})

    def __mul__(self, other: "NCSeries") -> "NCSeries":
        self._compat(other)
        out: dict[Word, object] = {}
        zero = self.ring.zero
        trunc = self.trunc
        for w1, c1 in self.terms.items():
            room = trunc - len(w1)
            for w2, c2 in other.terms.items():
                if len(w2) > room:
                    continue
                w = w1 + w2
                p = c1 * c2
                s = out.get(w)
                if s is None:
                    if p != zero:
                        out[w] = p
                else:
                    s = s + p
                    if s != zero:
                        out[w] = s
                    else:
                        del out[w]
        return NCSeries(self.alphabet, self.trunc, self.ring, out)

    def bracket(self, other: "NCSeries") -> "NCSeries":
        return self * other - other * self

    def shuffle_mul(self, other: "NCSeries") -> "NCSeries":
        self._compat(other)
        terms: dict[Word, object] = {}
        zero = self.ring.zero
        for w1, c1 in self.terms.items():
            for w2, c2 in other.terms.items():
                if len(w1) + len(w2) > self.trunc:
                    continue
                p = c1 * c2
                for w, m in shuffle_words(w1, w2):
                    s = terms.get(w, zero) + p * self.ring.embed(m)
                    if s != zero:
                        terms[w] = s
                    else:
                        terms.pop(w, None)
        return NCSeries(self.alphabet, self.trunc, self.ring, terms)

    def exp(self) -> "NCSeries":
        if self.order() < 1:
            raise ValueError("exp needs a series without constant term")
        out = NCSeries.unit(self.alphabet, self.trunc, self.ring)
        power = out
        fact = Fraction(1)
        for n in range(1, self.trunc + 1):
            power = power * self
            fact *= n
            out = out + power.scale(1 / fact)
        return out

    def log(self) -> "NCSeries":
        y = self - NCSeries.unit(self.alphabet, self.trunc, self.ring)
        if self.constant_term() != self.ring.one or y.order() < 1:
            raise ValueError("log needs constant term one")
        out = NCSeries.zero(self.alphabet, self.trunc, self.ring)
        power = NCSeries.unit(self.alphabet, self.trunc, self.ring)
        for n in range(1, self.trunc + 1):
            power = power * y
            out = out + power.scale(Fraction((-1) ** (n + 1), n))
        return out

    def invert(self) -> "NCSeries":
        """Inverse of a series with constant term one."""
        if self.constant_term() != self.ring.one:
            raise ValueError("invert needs constant term one")
        y = NCSeries.unit(self.alphabet, self.trunc, self.ring) - self
        out = NCSeries.unit(self.alphabet, self.trunc, self.ring)
        power = NCSeries.unit(self.alphabet, self.trunc, self.ring)
        for _ in range(self.trunc):
            power = power * y
            if power.is_zero():
                break
            out = out + power
        return out

    def ad(self, other: "NCSeries") -> "NCSeries":
        return self.bracket(other)

    def ad_series(self, coeffs: Sequence[Fraction],
                  arg: "NCSeries") -> "NCSeries":
        """Evaluate ``sum_n coeffs[n] ad_self^n(arg)``."""
        out = arg.scale(coeffs[0]) if coeffs else \
            NCSeries.zero(self.alphabet, self.trunc, self.ring)
        cur = arg
        for n in range(1, len(coeffs)):
            cur = self.bracket(cur)
            if cur.is_zero():
                break
            if coeffs[n]:
                out = out + cur.scale(coeffs[n])
        return out

    def substitute(self, images: Mapping[str, "NCSeries"],
                   embed: Callable | None = None) -> "NCSeries":
        """Ring homomorphism sending each letter to a series of positive
        order; ``embed`` maps source coefficients into the target ring."""
        if not images:
            raise ValueError("no images")
        target = next(iter(images.values()))
        for name in self.alphabet:
            if name not in images:
                raise ValueError(f"letter {name} has no image")
            img = images[name]
            if img.order() < 1:
                raise ValueError(f"image of {name} has a constant term")
            if (img.alphabet, img.trunc, img.ring.name) != \
                    (target.alphabet, target.trunc, target.ring.name):
                raise ValueError("images live in different rings")
        if embed is None:
            embed = target.ring.embed if target.ring.name != self.ring.name \
                else (lambda c: c)
        out = NCSeries.zero(target.alphabet, target.trunc, target.ring)
        for w, c in self.terms.items():
            piece = NCSeries.unit(target.alphabet, target.trunc, target.ring)
            for i in w:
                piece = piece * images[self.alphabet[i]]
                if piece.is_zero():
                    break
            out = out + piece.scale(embed(c))
        return out

    def rename(self, mapping: Mapping[str, str]) -> "NCSeries":
        new_alpha = tuple(mapping.get(a, a) for a in self.alphabet)
        if len(set(new_alpha)) != len(new_alpha):
            raise ValueError("renaming collides")
        return NCSeries(new_alpha, self.trunc, self.ring, self.terms)

    def extend(self, alphabet: Sequence[str]) -> "NCSeries":
        alphabet = tuple(alphabet)
        pos = [alphabet.index(a) for a in self.alphabet]
        return NCSeries(alphabet, self.trunc, self.ring,
                        {tuple(pos[i] for i in w): c
                         for w, c in self.terms.items()})

    # ------------------------------------------------------------------
    # structure tests

    def is_grouplike(self, tol: float | None = None) -> bool:
        """Shuffle-relation test for group-likeness."""
        if not self._eq_coeff(self.constant_term(), self.ring.one, tol):
            return False
        # relations must hold for every pair of nonempty words, including
        # pairs whose coefficient is zero; enumerate all words up to trunc
        letters = range(len(self.alphabet))
        universe: list[Word] = []
        for n in range(1, self.trunc + 1):
            universe.extend(product(letters, repeat=n))
        zero = self.ring.zero
        for i, u in enumerate(universe):
            for v in universe[i:]:
                if len(u) + len(v) > self.trunc:
                    continue
                lhs = self.terms.get(u, zero) * self.terms.get(v, zero)
                rhs = zero
                for w, m in shuffle_words(u, v):
                    c = self.terms.get(w)
                    if c is not None:
                        rhs = rhs + c * self.ring.embed(m)
                if not self._eq_coeff(lhs, rhs, tol):
                    return False
        return True

    def _eq_coeff(self, a, b, tol) -> bool:
        if tol is not None and self.ring.close is not None:
            return self.ring.close(a, b, tol)
        return a == b

    # ------------------------------------------------------------------
    # serialization

    def to_json(self) -> dict:
        items = []
        for w in sorted(self.terms, key=lambda w: (len(w), w)):
            items.append({"word": [self.alphabet[i] for i in w],
                          "coeff": self.ring.encode(self.terms[w])})
        return {"alphabet": list(self.alphabet), "trunc": self.trunc,
                "ring": self.ring.name, "terms": items}

    @classmethod
    def from_json(cls, data: dict, ring: Ring) -> "NCSeries":
        if data.get("ring", ring.name) != ring.name:
            raise ValueError("ring mismatch")
        alphabet = tuple(data["alphabet"])
        idx = {a: i for i, a in enumerate(alphabet)}
        terms = {tuple(idx[l] for l in t["word"]): ring.decode(t["coeff"])
                 for t in data["terms"]}
        return cls(alphabet, int(data["trunc"]), ring, terms)

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, separators=(",", ":"))

    def __repr__(self) -> str:
        parts = [f"{self.terms[w]}*{self.word_name(w)}"
                 for w in sorted(self.terms, key=lambda w: (len(w), w))[:6]]
        more = "+..." if len(self.terms) > 6 else ""
        return f"<nc {' + '.join(parts) or '0'}{more} (W={self.trunc})>"
