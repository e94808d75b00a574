"""Exact cyclotomic scalars: finite Q-linear combinations of roots of unity.

A value is stored as a sparse map {r: c} meaning sum of c * e(r) over
exponents r in Q/[0,1).  Exponents are kept in a canonical basis so that
dictionary equality is field equality: splitting r into prime-power
components k/p^a (lowest terms), each component satisfies k < phi(p^a).
Reduction uses the p^a-th cyclotomic polynomial, one rewrite step per
component.  The field contains all eighth and p-power roots of unity and
the square roots of the primes (as Gauss sums), so every scalar produced
by the finite Weil-representation models is represented exactly.
"""

from __future__ import annotations

import cmath
from fractions import Fraction

from mp2local.localfield import Mu8


def _factor(n: int):
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            a = 0
            while n % d == 0:
                n //= d
                a += 1
            out.append((d, a))
        d += 1
    if n > 1:
        out.append((n, 1))
    return out


def _split_exponent(r: Fraction):
    """CRT split of r mod 1 into prime-power parts {p: k/p^a}."""
    r %= 1
    if r == 0:
        return {}
    den, num = r.denominator, r.numerator
    parts = {}
    for p, a in _factor(den):
        pa = p**a
        rest = den // pa
        parts[p] = Fraction(num * pow(rest, -1, pa) % pa, pa)
    return parts


def _reduce_part(part: Fraction):
    """Rewrite e(k/p^a) in basis exponents j/p^a with j < phi(p^a).

    Returns a list of (exponent, sign) pairs; a single cyclotomic-
    polynomial step suffices because k < p^a.
    """
    den = part.denominator
    k = part.numerator
    p, a = _factor(den)[0]
    pa = p**a
    k = k * (pa // den) % pa
    phi = pa - pa // p
    if k < phi:
        return [(Fraction(k, pa), 1)]
    step = pa // p
    return [(Fraction(k - (p - 1 - t) * step, pa), -1) for t in range(p - 1)]


_CANON_CACHE: dict = {}


def _canonical_terms(r: Fraction):
    """Expand e(r) as [(basis exponent, +-1)] in the canonical basis."""
    hit = _CANON_CACHE.get(r)
    if hit is not None:
        return hit
    parts = _split_exponent(r)
    terms = [(Fraction(0), 1)]
    for part in parts.values():
        new = []
        for e0, s0 in terms:
            for e1, s1 in _reduce_part(part):
                new.append(((e0 + e1) % 1, s0 * s1))
        terms = new
    _CANON_CACHE[r] = terms
    return terms


class Cyc:
    """Element of the union of the cyclotomic fields, exact."""

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        self.terms = dict(terms) if terms else {}

    # -- constructors -------------------------------------------------

    @classmethod
    def zero(cls):
        return cls()

    @classmethod
    def one(cls):
        return cls({Fraction(0): Fraction(1)})

    @classmethod
    def rational(cls, c):
        c = Fraction(c)
        return cls({Fraction(0): c}) if c else cls()

    @classmethod
    def root(cls, r, coeff=1):
        """coeff * e(r) for a rational exponent r."""
        coeff = Fraction(coeff)
        if coeff == 0:
            return cls()
        out = {}
        for e, s in _canonical_terms(Fraction(r)):
            out[e] = out.get(e, Fraction(0)) + s * coeff
        return cls({e: c for e, c in out.items() if c})

    @classmethod
    def from_mu8(cls, z: Mu8):
        if z.zero:
            return cls()
        return cls.root(Fraction(z.e, 8))

    @classmethod
    def sqrt_q(cls, p: int):
        """sqrt(p) as an exact cyclotomic (Gauss sum for odd p)."""
        if p == 2:
            return cls.root(Fraction(1, 8)) + cls.root(Fraction(7, 8))
        g = cls.zero()
        for t in range(1, p):
            s = 1 if pow(t, (p - 1) // 2, p) == 1 else -1
            g = g + cls.root(Fraction(t, p), s)
        if p % 4 == 1:
            return g
        return g * cls.root(Fraction(3, 4))   # divide i out

    @classmethod
    def q_half_power(cls, p: int, m: int):
        """p^(m/2) exactly, any integer m."""
        if m % 2 == 0:
            return cls.rational(Fraction(p) ** (m // 2))
        return cls.sqrt_q(p) * cls.rational(Fraction(p) ** ((m - 1) // 2))

    # -- ring operations ----------------------------------------------

    def __add__(self, other):
        out = dict(self.terms)
        for e, c in other.terms.items():
            s = out.get(e, Fraction(0)) + c
            if s:
                out[e] = s
            elif e in out:
                del out[e]
        return Cyc(out)

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return Cyc({e: -c for e, c in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Cyc.rational(other)
        out = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                c = c1 * c2
                for e, s in _canonical_terms((e1 + e2) % 1):
                    k = out.get(e, Fraction(0)) + s * c
                    if k:
                        out[e] = k
                    elif e in out:
                        del out[e]
        return Cyc(out)

    __rmul__ = __mul__

    def conj(self):
        out = Cyc()
        for e, c in self.terms.items():
            out = out + Cyc.root(-e % 1, c)
        return out

    def add_rotated_into(self, acc: dict, r: Fraction, mult=1):
        """acc += mult * e(r) * self, on a raw canonical-exponent dict."""
        for e, c in self.terms.items():
            cm = c * mult
            for e2, s in _canonical_terms((r + e) % 1):
                k = acc.get(e2, 0) + s * cm
                if k:
                    acc[e2] = k
                elif e2 in acc:
                    del acc[e2]

    @classmethod
    def from_raw(cls, acc: dict):
        return cls({e: Fraction(c) for e, c in acc.items() if c})

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Cyc.rational(other)
        if not isinstance(other, Cyc):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def is_zero(self):
        return not self.terms

    def is_rational(self):
        return all(e == 0 for e in self.terms)

    def rational_value(self) -> Fraction:
        if not self.terms:
            return Fraction(0)
        if not self.is_rational():
            raise ValueError(f"{self} is not rational")
        return self.terms[Fraction(0)]

    def cvalue(self) -> complex:
        return sum(
            (complex(c) * cmath.exp(2j * cmath.pi * float(e))
             for e, c in self.terms.items()),
            0j,
        )

    def __repr__(self):
        if not self.terms:
            return "Cyc(0)"
        bits = [f"{c}*e({e})" for e, c in sorted(self.terms.items())]
        return "Cyc(" + " + ".join(bits) + ")"
