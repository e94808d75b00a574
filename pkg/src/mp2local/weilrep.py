"""Finite models of the Schwartz space of Q_p and the Weil representation.

A Schwartz function is stored by its values on the finite quotient
p^-M o / p^N o (support inside p^-M, invariant under translation by
p^N).  Values are exact cyclotomic scalars, so the generator formulas

    u_sharp(b):  phi(x) -> psi(b x^2) phi(x)
    m(a):        phi(x) -> (alpha(1)/alpha(a)) |a|^(1/2) phi(a x)
    w_a:         phi(x) -> conj(alpha(a)) |2/a|^(1/2) phi-hat(-2x/a)

act exactly (half powers of q are exact Gauss-sum cyclotomics).  An
arbitrary cover element acts through its Bruhat word with the sign
recovered by cover multiplication.

The module also provides the two idempotent kernels: e supported on the
maximal compact K with value q^e Vol(K)^-1 (phi0, omega(g) phi0), and E,
its conjugate by w_{2 delta}, supported on Gamma[1/4d, 4d].
"""

from __future__ import annotations

import math
from fractions import Fraction

from mp2local.cyclotomic import Cyc, _canonical_terms as _canon
from mp2local.localfield import (
    AdditiveCharacter,
    Mu8,
    PadicNumber,
    weil_index,
    weil_index_ratio,
)
from mp2local.metaplectic import CongruenceSubgroupSpec, Mp2Element

MODEL_BOUND = 14


class ModelOverflow(ArithmeticError):
    """Requested support/period exponents exceed the configured bound."""


class SchwartzFunction:
    """Finitely supported, locally constant function on Q_p.

    values maps j in [0, p^(M+N)) to the value at x = j p^-M; absent
    keys are zero.
    """

    __slots__ = ("p", "M", "N", "values")

    def __init__(self, p, M, N, values):
        if M > MODEL_BOUND or N > MODEL_BOUND:
            raise ModelOverflow(f"model ({M},{N}) exceeds bound {MODEL_BOUND}")
        self.p = p
        self.M = M
        self.N = N
        self.values = {j: v for j, v in values.items() if not v.is_zero()}

    @classmethod
    def indicator(cls, p, val_floor, M=None, N=None):
        """Characteristic function of p^val_floor o."""
        M = max(0, -val_floor) if M is None else M
        N = max(1, val_floor + 1) if N is None else N
        vals = {}
        for j in range(p ** (M + N)):
            if j == 0 or _ival(j, p) - M >= val_floor:
                vals[j] = Cyc.one()
        return cls(p, M, N, vals)

    @classmethod
    def coset_indicator(cls, p, shift: Fraction, val_floor: int):
        """Characteristic function of shift + p^val_floor o."""
        M = max(0, -_fval(shift, p, none_val=0), -val_floor)
        N = max(val_floor + 1, 1)
        vals = {}
        q = Fraction(p)
        for j in range(p ** (M + N)):
            x = j * q**-M
            if _fval(x - shift, p, none_val=10**9) >= val_floor:
                vals[j] = Cyc.one()
        return cls(p, M, N, vals)

    def index_point(self, j) -> Fraction:
        return Fraction(j, self.p**self.M)

    def support_indices(self):
        return sorted(self.values)

    def value(self, j):
        return self.values.get(j % self.p ** (self.M + self.N), Cyc.zero())

    def value_at(self, x: Fraction):
        """Value at a rational point of Q_p."""
        v = _fval(x, self.p, none_val=10**9)
        if v < -self.M:
            return Cyc.zero()
        size = self.p ** (self.M + self.N)
        num = x * self.p**self.M
        j = num.numerator * pow(num.denominator, -1, size) % size
        return self.value(j)

    def refine(self, M, N):
        """Re-tabulate on a finer/larger model; values are unchanged."""
        if M < self.M or N < self.N:
            raise ValueError("refinement cannot shrink the model")
        if (M, N) == (self.M, self.N):
            return self
        p = self.p
        scale = p ** (M - self.M)
        size_old = p ** (self.M + self.N)
        vals = {}
        for j_old, v in self.values.items():
            # x = j_old p^-M_old + t, t running over p^N_old / p^N
            for t in range(p ** (N - self.N)):
                j = j_old * scale + t * p ** (M + self.N)
                vals[j % (p ** (M + N))] = v
        return SchwartzFunction(p, M, N, vals)

    def compact(self):
        """Shrink to the minimal (M, N) describing the same function."""
        p = self.p
        if not self.values:
            return SchwartzFunction(p, 0, 1, {})
        # smallest valid support exponent
        vmin = min(
            (_ival(j, p) - self.M for j in self.values if j),
            default=0,
        )
        M2 = max(0, -vmin)
        shift = self.M - M2
        vals = self.values
        if shift > 0:
            vals = {j // p**shift: v for j, v in vals.items()}
        # smallest period exponent: values constant on coarser cosets
        N2 = self.N
        while N2 > 1:
            size = p ** (M2 + N2 - 1)
            table = {}
            ok = True
            for j, v in vals.items():
                r = j % size
                if r in table:
                    if table[r] != v:
                        ok = False
                        break
                else:
                    table[r] = v
            if ok:
                # every coset must be fully covered or fully zero
                full = p ** (M2 + N2)
                for r, v in table.items():
                    if any(vals.get(r + k * size) != v
                           for k in range(full // size)):
                        ok = False
                        break
            if not ok:
                break
            vals = table
            N2 -= 1
        return SchwartzFunction(p, M2, N2, vals)

    def common_model(self, other):
        M = max(self.M, other.M)
        N = max(self.N, other.N)
        return self.refine(M, N), other.refine(M, N)

    def __add__(self, other):
        f, g = self.common_model(other)
        vals = dict(f.values)
        for j, v in g.values.items():
            vals[j] = vals.get(j, Cyc.zero()) + v
        return SchwartzFunction(f.p, f.M, f.N, vals)

    def __sub__(self, other):
        return self + other.scale(Cyc.rational(-1))

    def scale(self, c: Cyc):
        return SchwartzFunction(
            self.p, self.M, self.N,
            {j: c * v for j, v in self.values.items()}
        )

    def __eq__(self, other):
        if not isinstance(other, SchwartzFunction):
            return NotImplemented
        f, g = self.common_model(other)
        return f.values == g.values

    def __repr__(self):
        return (f"Schwartz(p={self.p}, M={self.M}, N={self.N}, "
                f"{len(self.values)} pts)")


def _ival(n, p):
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def _fval(x: Fraction, p, none_val=None):
    if x == 0:
        return none_val
    return _ival(x.numerator, p) - _ival(x.denominator, p)


def phi0(p) -> SchwartzFunction:
    """Characteristic function of the ring of integers."""
    return SchwartzFunction.indicator(p, 0)


def phi0_prime(p) -> SchwartzFunction:
    """Characteristic function of (1/2) o; only interesting for p = 2."""
    e2 = 1 if p == 2 else 0
    return SchwartzFunction.indicator(p, -e2)


def phi_lambda(p, lam: int) -> SchwartzFunction:
    """Characteristic function of lam/2 + o, lam in o/2o."""
    return SchwartzFunction.coset_indicator(p, Fraction(lam, 2), 0)


# -- the representation ----------------------------------------------

def _dft_raw(vals, n, p, base):
    """X_i = sum_j vals[j] e(base i j), radix-p Cooley-Tukey, exact.

    vals and the result map indices to raw canonical-exponent dicts.
    """
    if n == 1 or not vals:
        return dict(vals)
    m = n // p
    subs = []
    for r in range(p):
        sub = {j // p: v for j, v in vals.items() if j % p == r}
        subs.append(_dft_raw(sub, m, p, base * p % 1) if sub else None)
    out = {}
    for s in range(m):
        cols = [(r, subs[r][s]) for r in range(p)
                if subs[r] is not None and s in subs[r]]
        if not cols:
            continue
        for t in range(p):
            i = s + t * m
            acc: dict = {}
            for r, z in cols:
                rot = base * i * r % 1
                for e, c in z.items():
                    for e2, sg in _canon((rot + e) % 1):
                        k = acc.get(e2, 0) + sg * c
                        if k:
                            acc[e2] = k
                        elif e2 in acc:
                            del acc[e2]
            if acc:
                out[i] = acc
    return out


def fourier_transform(phi: SchwartzFunction,
                      psi: AdditiveCharacter) -> SchwartzFunction:
    """phi-hat(x) = |delta|^(1/2) * integral of phi(y) psi(xy) dy."""
    p = phi.p
    c = psi.c_index
    M2, N2 = phi.N + c, phi.M - c
    if N2 < 1:
        phi = phi.refine(phi.M + (1 - N2), phi.N)
        M2, N2 = phi.N + c, phi.M - c
    n = p ** (M2 + N2)       # equals the input grid size
    vol = Fraction(1, p**phi.N)
    norm = Cyc.q_half_power(p, -c)
    # psi(x y) = e(base * i * j) on the index grid; only the p-part of
    # the scale contributes to the fractional part
    dep = M2 + phi.M - psi.scale.valuation()
    if dep <= 0:
        base = Fraction(0)
    else:
        if psi.scale.N < dep:
            raise ModelOverflow("character digits exhausted by the model")
        base = -Fraction(psi.scale.u % p**dep, p**dep) % 1
    raw_in = {j: v.terms for j, v in phi.values.items()}
    raw_out = _dft_raw(raw_in, n, p, base)
    scale = norm * vol
    out = {}
    for i, acc in raw_out.items():
        val = Cyc.from_raw(acc) * scale
        if not val.is_zero():
            out[i] = val
    return SchwartzFunction(p, M2, N2, out).compact()


def _psi_expo(psi: AdditiveCharacter, t: Fraction) -> Fraction:
    """Exponent r with psi(t) = e(r) for rational t."""
    s = psi.scale.as_fraction() * t
    p = psi.p
    if s == 0:
        return Fraction(0)
    vd = _ival(s.denominator, p)
    if vd == 0:
        return Fraction(0)
    m = p**vd
    rest = s.denominator // m
    num = s.numerator * pow(rest, -1, m) % m
    return -Fraction(num, m) % 1


def _op_u_sharp(b: PadicNumber, phi, psi):
    p = phi.p
    bf = b.as_fraction()
    if bf == 0:
        return phi
    # refine so that psi(b x^2) is constant on the period cosets
    c, M, N = psi.c_index, phi.M, phi.N
    e2 = 1 if p == 2 else 0
    vb = _fval(bf, p)
    need = max(N, -c - vb + M - e2, (-c - vb + 1) // 2)
    phi = phi.refine(M, need)
    out = {}
    for j, v in phi.values.items():
        x = Fraction(j, p**phi.M)
        out[j] = Cyc.root(_psi_expo(psi, bf * x * x)) * v
    return SchwartzFunction(p, phi.M, phi.N, out).compact()


def _op_m(a: PadicNumber, phi, psi):
    p = phi.p
    va = a.valuation()
    ua = a.as_fraction() / Fraction(p) ** va
    M2, N2 = phi.M + va, phi.N - va
    if M2 < 0 or N2 < 1:
        grow = max(0, -M2, 1 - N2)
        phi = phi.refine(phi.M + grow, phi.N + grow)
        M2, N2 = phi.M + va, phi.N - va
    size = p ** (phi.M + phi.N)
    scalar = (Cyc.from_mu8(weil_index_ratio(_pone(p), a, psi))
              * Cyc.q_half_power(p, -va))
    out = {}
    ures = ua.numerator * pow(ua.denominator, -1, size) % size
    uinv = pow(ures, -1, size)
    for j, v in phi.values.items():
        # new index i with a * (i p^-M2) = j p^-M: i = j / ua mod size
        out[j * uinv % size] = scalar * v
    return SchwartzFunction(p, M2, N2, out).compact()


def _op_w(a: PadicNumber, phi, psi):
    p = phi.p
    e2 = 1 if p == 2 else 0
    va = a.valuation()
    hat = fourier_transform(phi, psi)
    # substitute x -> -2x/a and scale
    b = PadicNumber.from_rational(p, -2) / a
    vb = b.valuation()
    ub = b.as_fraction() / Fraction(p) ** vb
    M2, N2 = hat.M + vb, hat.N - vb
    if M2 < 0 or N2 < 1:
        grow = max(0, -M2, 1 - N2)
        hat = hat.refine(hat.M + grow, hat.N + grow)
        M2, N2 = hat.M + vb, hat.N - vb
    size = p ** (hat.M + hat.N)
    ures = ub.numerator * pow(ub.denominator, -1, size) % size
    uinv = pow(ures, -1, size)
    out = {}
    for j, v in hat.values.items():
        out[j * uinv % size] = v
    scalar = (Cyc.from_mu8(weil_index(a, psi).conj())
              * Cyc.q_half_power(p, va - e2))
    return SchwartzFunction(p, M2, N2, out).scale(scalar).compact()


def _pone(p):
    return PadicNumber.from_rational(p, 1)


def bruhat_word(g: Mp2Element):
    """Generator word for the matrix part: each item is (kind, argument)."""
    if g.c.is_zero():
        a = g.a
        return [("u", g.a * g.b), ("m", a)]
    return [("u", g.a / g.c), ("w", g.c), ("u", g.d / g.c)]


def weil_action(g: Mp2Element, phi: SchwartzFunction,
                psi: AdditiveCharacter) -> SchwartzFunction:
    """omega_psi(g) phi, exact on the finite model."""
    p = g.p
    word = bruhat_word(g)
    lift = Mp2Element.identity(p)
    for kind, arg in word:
        if kind == "u":
            lift = lift * Mp2Element.u_sharp(p, arg)
        elif kind == "m":
            lift = lift * Mp2Element.m_elt(p, arg)
        else:
            lift = lift * Mp2Element.w_elt(p, arg)
    assert lift.matrix_eq(g)
    out = phi
    for kind, arg in reversed(word):
        if kind == "u":
            out = _op_u_sharp(arg, out, psi)
        elif kind == "m":
            out = _op_m(arg, out, psi)
        else:
            out = _op_w(arg, out, psi)
    if g.zeta != lift.zeta:
        out = out.scale(Cyc.rational(-1))
    return out


def inner_product(phi1: SchwartzFunction, phi2: SchwartzFunction) -> Cyc:
    """(phi1, phi2) = integral of phi1 conj(phi2); positive definite."""
    f, g = phi1.common_model(phi2)
    vol = Fraction(1, f.p**f.N)
    acc = Cyc.zero()
    for j, v in f.values.items():
        w = g.values.get(j)
        if w is not None:
            acc = acc + v * w.conj()
    return acc * vol


# -- idempotent kernels ----------------------------------------------

def compact_index(p) -> int:
    """[Gamma0(1) : Gamma0(4)] computed by orbit counting mod 4.

    Bottom rows of the compact modulo 4 up to unit scaling classify the
    cosets, so the index is the number of such orbits; nothing is
    hard-coded.
    """
    if p != 2:
        return 1
    n = 4
    uni = {(c, d) for c in range(n) for d in range(n)
           if math.gcd(math.gcd(c, d), n) == 1}
    units = [u for u in range(n) if u % 2]
    orbits = {min((u * c % n, u * d % n) for u in units) for c, d in uni}
    return len(orbits)


class KernelFunction:
    """epsilon-bi-equivariant kernel given by a matrix coefficient."""

    def __init__(self, psi, support: CongruenceSubgroupSpec, cosets,
                 base_value):
        self.psi = psi
        self.p = psi.p
        self.support = support
        self.cosets = cosets          # left-coset reps of support/Gamma
        self._base = base_value

    def value(self, g: Mp2Element) -> Cyc:
        if not self.support.contains_matrix(g):
            return Cyc.zero()
        return self._base(g)

    def convolve_value(self, other, g: Mp2Element) -> Cyc:
        """(self * other)(g) as a finite sum over self's coset reps."""
        acc = Cyc.zero()
        for h in self.cosets:
            acc = acc + self.value(h) * other.value(h.inverse() * g)
        return acc


def _check_cosets(reps, gamma_spec, index):
    """Representatives must be pairwise distinct modulo the subgroup."""
    assert len(reps) == index
    for i, h in enumerate(reps):
        for j, k in enumerate(reps):
            if i != j:
                assert not gamma_spec.contains_matrix(h.inverse() * k), (i, j)
    return reps


def _k_cosets(psi):
    """Left-coset representatives of K over Gamma0(4) at p = 2.

    Classified by the first column (a : c/delta) in P^1(Z/4): the four
    lower-unipotent points, the Weyl point, and one point with a = 2.
    """
    p = psi.p
    if p != 2:
        return [Mp2Element.identity(p)]
    delta = psi.delta
    dinv = delta.inverse()
    reps = [Mp2Element.u_flat(p, delta * c) for c in (0, 1, 2, 3)]
    reps.append(Mp2Element.w_elt(p, delta))
    reps.append(Mp2Element.from_matrix(
        p, [2, dinv.as_fraction(), delta.as_fraction(), 1]))
    return _check_cosets(reps, CongruenceSubgroupSpec.gamma0_4(psi),
                         compact_index(p))


def _ekernel_cosets(psi):
    """Left-coset representatives of Gamma[1/4d,4d] over Gamma0(4).

    w_{2 delta} normalizes Gamma0(4), so conjugating the K-list works.
    """
    p = psi.p
    if p != 2:
        return [Mp2Element.identity(p)]
    w2d = Mp2Element.w_elt(p, psi.delta * 2)
    reps = [w2d * h * w2d.inverse() for h in _k_cosets(psi)]
    return _check_cosets(reps, CongruenceSubgroupSpec.gamma0_4(psi),
                         compact_index(p))


def ek_kernel(psi) -> KernelFunction:
    """The idempotent e supported on the maximal compact."""
    p = psi.p
    e2 = 1 if p == 2 else 0
    vol = compact_index(p)
    f0 = phi0(p)
    norm = Cyc.rational(Fraction(p**e2, vol))

    def base(g):
        return norm * inner_product(f0, weil_action(g, f0, psi))

    return KernelFunction(psi, CongruenceSubgroupSpec.gamma0_1(psi),
                          _k_cosets(psi), base)


def Ek_kernel(psi) -> KernelFunction:
    """The idempotent E, the w_{2 delta}-conjugate of e."""
    p = psi.p
    if p != 2:
        return ek_kernel(psi)
    e2 = 1
    vol = compact_index(p)
    f0 = phi0(p)
    norm = Cyc.rational(Fraction(p**e2, vol))

    def base(g):
        return norm * inner_product(f0, weil_action(g, f0, psi))

    return KernelFunction(psi, CongruenceSubgroupSpec.e_kernel_support(psi),
                          _ekernel_cosets(psi), base)
