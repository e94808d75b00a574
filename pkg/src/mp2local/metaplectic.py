"""The metaplectic double cover of SL2(Q_p) as pairs [g, zeta].

Multiplication twists by the Kubota 2-cocycle c(g1,g2) =
(b(g1)/b(g1g2), b(g2)/b(g1g2)) built from Hilbert symbols of the
b-entries (b(g) = c if c != 0 else d).  The genuine character epsilon on
the inverse image of Gamma0(4) is given by its piecewise closed form in
Weil indices, with a conjugated variant epsilon-check on
Gamma[4 d^-1, d].  Iwasawa and Borel-cell decompositions factor an
arbitrary element through explicit unipotent/torus/Weyl words with all
signs carried by cover multiplication, so reassembly is exact.

The real cover appears only through the factor of automorphy j~ on the
upper half plane.
"""

from __future__ import annotations

import cmath
from fractions import Fraction

from mp2local.localfield import (
    AdditiveCharacter,
    Mu8,
    PadicNumber,
    PrecisionError,
    hilbert_symbol,
    hilbert_symbol_real,
    weil_index,
    weil_index_ratio,
)


class Mp2Element:
    """Pair [g, zeta]: 2x2 determinant-1 matrix over Q_p and a sign."""

    __slots__ = ("p", "a", "b", "c", "d", "zeta")

    def __init__(self, p, a, b, c, d, zeta=1, check=False):
        self.p = p
        self.a, self.b, self.c, self.d = a, b, c, d
        self.zeta = zeta
        assert zeta in (1, -1)
        if check:
            det = a * d - b * c
            if not det.eq_at_precision(1):
                raise ValueError(f"determinant {det} is not 1")

    # -- constructors -------------------------------------------------

    @classmethod
    def from_matrix(cls, p, rows, zeta=1, precision=None):
        ent = [
            x if isinstance(x, PadicNumber)
            else PadicNumber.from_rational(p, x, precision)
            for x in rows
        ]
        return cls(p, *ent, zeta=zeta, check=True)

    @classmethod
    def identity(cls, p, precision=None):
        return cls.from_matrix(p, [1, 0, 0, 1], precision=precision)

    @classmethod
    def u_sharp(cls, p, b, zeta=1, precision=None):
        return cls.from_matrix(p, [1, b, 0, 1], zeta, precision)

    @classmethod
    def u_flat(cls, p, b, zeta=1, precision=None):
        return cls.from_matrix(p, [1, 0, b, 1], zeta, precision)

    @classmethod
    def m_elt(cls, p, a, zeta=1, precision=None):
        if not isinstance(a, PadicNumber):
            a = PadicNumber.from_rational(p, a, precision)
        return cls(p, a, PadicNumber.zero(p), PadicNumber.zero(p),
                   a.inverse(), zeta)

    @classmethod
    def w_elt(cls, p, a, zeta=1, precision=None):
        if not isinstance(a, PadicNumber):
            a = PadicNumber.from_rational(p, a, precision)
        z = PadicNumber.zero(p)
        return cls(p, z, -a.inverse(), a, z, zeta)

    # -- group structure ----------------------------------------------

    def matrix(self):
        return (self.a, self.b, self.c, self.d)

    def b_entry(self) -> PadicNumber:
        """The cocycle slot: c when c != 0, else d."""
        if self.c.is_zero():
            return self.d
        if self.c.is_inexact():
            raise PrecisionError("lower-left entry ambiguous against zero")
        return self.c

    def __mul__(self, other):
        assert self.p == other.p
        a = self.a * other.a + self.b * other.c
        b = self.a * other.b + self.b * other.d
        c = self.c * other.a + self.d * other.c
        d = self.c * other.b + self.d * other.d
        prod = Mp2Element(self.p, a, b, c, d, self.zeta * other.zeta)
        bb = prod.b_entry()
        s = hilbert_symbol(self.b_entry() / bb, other.b_entry() / bb)
        prod.zeta *= s
        return prod

    def inverse(self):
        g = Mp2Element(self.p, self.d, -self.b, -self.c, self.a, self.zeta)
        # fix the sign so that self * inverse = [1, +1]
        chk = self * g
        g.zeta *= chk.zeta
        return g

    def flip(self):
        return Mp2Element(self.p, self.a, self.b, self.c, self.d, -self.zeta)

    def matrix_eq(self, other) -> bool:
        return all(
            x.eq_at_precision(y)
            for x, y in zip(self.matrix(), other.matrix())
        )

    def __eq__(self, other):
        if not isinstance(other, Mp2Element):
            return NotImplemented
        return self.zeta == other.zeta and self.matrix_eq(other)

    def __repr__(self):
        return (f"[{self.a} {self.b}; {self.c} {self.d}; "
                f"zeta={self.zeta:+d}]")


def b_function(g: Mp2Element) -> PadicNumber:
    return g.b_entry()


def multiply(g1: Mp2Element, g2: Mp2Element) -> Mp2Element:
    return g1 * g2


def kubota_cocycle(g1: Mp2Element, g2: Mp2Element) -> int:
    """The bare 2-cocycle value on matrix parts."""
    prod = (g1 * g2)
    return prod.zeta * g1.zeta * g2.zeta


class CongruenceSubgroupSpec:
    """Gamma[p^x d^-1, p^y d]: a in o, d in o, b in p^x d^-1, c in p^y d."""

    def __init__(self, psi: AdditiveCharacter, x: int, y: int, name=""):
        self.psi = psi
        self.p = psi.p
        self.x = x
        self.y = y
        self.name = name

    @classmethod
    def gamma0_1(cls, psi):
        return cls(psi, 0, 0, "Gamma0(1)")

    @classmethod
    def gamma0_pi(cls, psi):
        return cls(psi, 0, 1, "Gamma0(pi)")

    @classmethod
    def gamma_pi_d(cls, psi):
        return cls(psi, 1, 0, "Gamma[pi/d,d]")

    @classmethod
    def gamma0_4(cls, psi):
        e2 = 1 if psi.p == 2 else 0
        return cls(psi, 0, 2 * e2, "Gamma0(4)")

    @classmethod
    def gamma_4d_d(cls, psi):
        e2 = 1 if psi.p == 2 else 0
        return cls(psi, 2 * e2, 0, "Gamma[4/d,d]")

    @classmethod
    def e_kernel_support(cls, psi):
        e2 = 1 if psi.p == 2 else 0
        return cls(psi, -2 * e2, 2 * e2, "Gamma[1/4d,4d]")

    def contains_matrix(self, g: Mp2Element) -> bool:
        c = self.psi.c_index
        return (
            g.a.val_ge(0)
            and g.d.val_ge(0)
            and g.b.val_ge(self.x - c)
            and g.c.val_ge(self.y + c)
        )

    def __repr__(self):
        return self.name or f"Gamma[p^{self.x}/d, p^{self.y} d]"


def epsilon(gamma: Mp2Element, psi: AdditiveCharacter) -> Mu8:
    """The genuine character on the cover of Gamma0(4)."""
    spec = CongruenceSubgroupSpec.gamma0_4(psi)
    if not spec.contains_matrix(gamma):
        raise ValueError("epsilon is only defined over Gamma0(4)")
    zeta = Mu8.from_sign(gamma.zeta)
    c, d = gamma.c, gamma.d
    if c.is_zero():
        return weil_index_ratio(d, _one(gamma.p), psi) * zeta
    if gamma.p != 2 and d.val_ge(1):
        return zeta
    return weil_index_ratio(c, c * d, psi) * zeta


def epsilon_check(gamma: Mp2Element, psi: AdditiveCharacter) -> Mu8:
    """epsilon conjugated by m(2), defined over Gamma[4 d^-1, d]."""
    spec = CongruenceSubgroupSpec.gamma_4d_d(psi)
    if not spec.contains_matrix(gamma):
        raise ValueError("epsilon-check is only defined over Gamma[4/d,d]")
    m2 = Mp2Element.m_elt(gamma.p, 2)
    return epsilon(m2.inverse() * gamma * m2, psi)


def epsilon_extended(psi: AdditiveCharacter, kind: str, m: int,
                     mu_exp: int = 0) -> Mu8:
    """Character value at a torus-normalizer representative.

    kind "t": m(pi^m) -> alpha(pi^m)/alpha(1); kind "w":
    w_{delta mu^-1 pi^m} -> alpha(delta mu^-1 pi^m); q odd only for "w".
    """
    p = psi.p
    if kind == "t":
        a = PadicNumber.from_rational(p, Fraction(p) ** m)
        return weil_index_ratio(a, _one(p), psi)
    arg = PadicNumber.from_rational(
        p, Fraction(p) ** (psi.c_index - mu_exp + m))
    return weil_index(arg, psi)


def _one(p):
    return PadicNumber.from_rational(p, 1)


# -- decompositions ---------------------------------------------------

def iwasawa_decompose(g: Mp2Element, psi: AdditiveCharacter):
    """g = u_sharp(b0) m(a0) k with k in the cover of Gamma[d^-1, d].

    Exact in the cover: reassembling the three factors reproduces g
    including the sign.
    """
    p = g.p
    c_idx = psi.c_index
    if g.c.is_zero():
        t = g.d.valuation()
    elif g.d.is_zero():
        t = g.c.valuation() - c_idx
    else:
        t = min(g.c.valuation() - c_idx, g.d.valuation())
    a0 = PadicNumber.from_rational(p, Fraction(p) ** (-t))
    cr, dr = g.c * a0, g.d * a0
    zero = PadicNumber.zero(p)
    if not dr.is_zero() and dr.valuation() == 0:
        k = Mp2Element(p, dr.inverse(), zero, cr, dr)
    else:
        k = Mp2Element(p, zero, -cr.inverse(), cr, dr)
    probe = Mp2Element.m_elt(p, a0) * k
    # u_sharp(b0) adds b0 * (bottom row) to the top row
    if not probe.d.is_zero():
        b0 = (g.b - probe.b) / probe.d
    else:
        b0 = (g.a - probe.a) / probe.c
    trial = Mp2Element.u_sharp(p, b0) * probe
    if not trial.matrix_eq(g):
        raise PrecisionError("iwasawa reassembly mismatch")
    if trial.zeta != g.zeta:
        k = k.flip()
    return b0, a0, k


def borel_cell_decompose(k: Mp2Element, gamma_type: str,
                         psi: AdditiveCharacter):
    """Factor k in the cover of Gamma[d^-1,d] as  b * [cell rep] * gamma.

    gamma lies in the cover of the subgroup named by gamma_type
    ("G1", "G0pi", "Gpid", "G04"), the cell representative is one of
    I, w_delta, u_flat(2 delta), and b is upper triangular.  All three
    factors are explicit cover elements with exact reassembly.
    """
    p = k.p
    delta = psi.delta
    c_idx = psi.c_index
    e2 = 1 if p == 2 else 0

    def finish(bpart, cell, rep, gamma):
        probe = bpart * rep * gamma
        if not probe.matrix_eq(k):
            raise PrecisionError("cell decomposition mismatch")
        if probe.zeta != k.zeta:
            bpart = bpart.flip()
        return bpart, cell, gamma

    cv = None if k.c.is_zero() else k.c.valuation() - c_idx
    if gamma_type == "G1":
        ident = Mp2Element.identity(p)
        return finish(k, "I", ident, ident)

    if gamma_type == "Gpid":
        in_i_cell = (not k.d.is_zero()) and k.d.valuation() == 0
    else:
        lvl = 1 if gamma_type == "G0pi" else 2 * e2
        in_i_cell = cv is None or cv >= lvl

    if in_i_cell:
        d = k.d
        bpart = (Mp2Element.u_sharp(p, k.b / d)
                 * Mp2Element.m_elt(p, d.inverse()))
        gamma = Mp2Element.u_flat(p, k.c / d)
        return finish(bpart, "I", Mp2Element.identity(p), gamma)

    if gamma_type == "G04" and cv == 1:
        # u_flat(2 delta) cell: pull the Gamma0(4)-part c/d - 2 delta out
        d = k.d
        rep = Mp2Element.u_flat(p, delta * 2)
        bpart = (Mp2Element.u_sharp(p, k.b / d)
                 * Mp2Element.m_elt(p, d.inverse()))
        gamma = rep.inverse() * Mp2Element.u_flat(p, k.c / d)
        return finish(bpart, "ub2", rep, gamma)

    # w_delta cell
    t = k.a / k.c
    rep = Mp2Element.w_elt(p, delta)
    bpart = Mp2Element.u_sharp(p, t)
    gamma = (rep.inverse() * Mp2Element.u_sharp(p, -t)) * k
    return finish(bpart, "w", rep, gamma)


GAMMA_SPECS = {
    "G1": CongruenceSubgroupSpec.gamma0_1,
    "G0pi": CongruenceSubgroupSpec.gamma0_pi,
    "Gpid": CongruenceSubgroupSpec.gamma_pi_d,
    "G04": CongruenceSubgroupSpec.gamma0_4,
}


def double_coset_label(g: Mp2Element, gamma_type: str,
                       psi: AdditiveCharacter):
    """Canonical double-coset label of g, e.g. ("t", 2) or ("w", -1)."""
    from mp2local import hecke

    ctx = hecke.GroupContext(psi, gamma_type)
    loc = hecke.locate(ctx, g)
    if loc is None:
        raise ValueError("element lies outside the labelled double cosets")
    return loc[0]


# -- real place: factor of automorphy ---------------------------------

def real_b(mat) -> float:
    a, b, c, d = mat
    return c if c != 0 else d


def real_mat_mul(m1, m2):
    a1, b1, c1, d1 = m1
    a2, b2, c2, d2 = m2
    return (a1 * a2 + b1 * c2, a1 * b2 + b1 * d2,
            c1 * a2 + d1 * c2, c1 * b2 + d1 * d2)


def real_cocycle(m1, m2) -> int:
    m12 = real_mat_mul(m1, m2)
    bb = real_b(m12)
    return hilbert_symbol_real(real_b(m1) / bb, real_b(m2) / bb)


def moebius(mat, tau: complex) -> complex:
    a, b, c, d = mat
    return (a * tau + b) / (c * tau + d)


def tilde_j(mat, zeta: int, tau: complex) -> complex:
    """Factor of automorphy on the real cover: j~([g,zeta], tau).

    Squares to c tau + d; the principal square root (cut along the
    negative reals) fixes the branch, and zeta flips the sign.
    """
    a, b, c, d = mat
    if c == 0:
        root = cmath.sqrt(complex(d))
        return zeta * root if d > 0 else -zeta * root
    return zeta * cmath.sqrt(c * tau + d)
