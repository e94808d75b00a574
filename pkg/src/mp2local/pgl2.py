"""Hecke algebras of PGL2(Q_p) for the comparison corollaries.

Elements are rational 2x2 matrices modulo scalars, kept exact.  For the
maximal compact (entries weighted by the different) the operators are
the characteristic functions of the diag(pi^m, 1) double cosets; for the
Iwahori subgroup both diag(pi^m, 1) and the Weyl-type elements
[[0, 1/delta], [pi^m delta, 0]] occur.  Convolution by left-coset sums
reproduces, with integer structure constants, the same relation table as
the genuine metaplectic algebras, which is the generators-and-relations
form of the comparison isomorphisms.
"""

from __future__ import annotations

from fractions import Fraction

DEFAULT_WINDOW = 8


def _val(x: Fraction, p: int):
    if x == 0:
        return None
    n, d, v = x.numerator, x.denominator, 0
    while n % p == 0:
        n //= p
        v += 1
    while d % p == 0:
        d //= p
        v -= 1
    return v


class PGL2Element:
    """Rational matrix modulo scalars."""

    __slots__ = ("p", "m")

    def __init__(self, p, rows):
        self.p = p
        self.m = tuple(Fraction(x) for x in rows)
        assert self.m[0] * self.m[3] - self.m[1] * self.m[2] != 0

    def __mul__(self, other):
        a1, b1, c1, d1 = self.m
        a2, b2, c2, d2 = other.m
        return PGL2Element(self.p, (
            a1 * a2 + b1 * c2, a1 * b2 + b1 * d2,
            c1 * a2 + d1 * c2, c1 * b2 + d1 * d2,
        ))

    def inverse(self):
        a, b, c, d = self.m
        return PGL2Element(self.p, (d, -b, -c, a))

    def __eq__(self, other):
        # equality in PGL2: proportional matrices
        a1, b1, c1, d1 = self.m
        a2, b2, c2, d2 = other.m
        for x, y in zip(self.m, other.m):
            if x != 0 and y != 0:
                lam = x / y
                return all(u == lam * v for u, v in zip(self.m, other.m))
            if (x == 0) != (y == 0):
                return False
        return True

    def __repr__(self):
        return f"PGL2{self.m}"


class PGL2Context:
    """Iwahori or maximal-compact Hecke algebra context."""

    def __init__(self, p, c_index=0, kind="iwahori", window=DEFAULT_WINDOW):
        assert kind in ("iwahori", "maximal")
        self.p = p
        self.c = c_index
        self.kind = kind
        self.window = window
        self.delta = Fraction(p) ** c_index
        self._cosets: dict = {}

    def member(self, g: PGL2Element) -> bool:
        """Membership in the compact subgroup, scalars allowed for."""
        p = self.p
        det = g.m[0] * g.m[3] - g.m[1] * g.m[2]
        dv = _val(det, p)
        if dv % 2:
            return False
        lam = Fraction(p) ** (-dv // 2)
        a, b, c, d = (lam * x for x in g.m)
        ylev = self.c + (1 if self.kind == "iwahori" else 0)
        return (
            _vge(a, 0, p) and _vge(d, 0, p)
            and _vge(b, -self.c, p) and _vge(c, ylev, p)
        )

    def labels(self):
        if self.kind == "maximal":
            return [("t", m) for m in range(self.window + 1)]
        return ([("t", m) for m in range(-self.window, self.window + 1)]
                + [("w", m) for m in range(-self.window, self.window + 1)])

    def rep_element(self, label):
        kind, m = label
        p = self.p
        if kind == "t":
            return PGL2Element(p, (Fraction(p) ** m, 0, 0, 1))
        return PGL2Element(
            p, (0, 1 / self.delta, Fraction(p) ** m * self.delta, 0))

    def coset_reps(self, label):
        cached = self._cosets.get(label)
        if cached is not None:
            return cached
        p = self.p
        kind, m = label
        reps = []
        base = self.rep_element(label)
        if self.kind == "maximal":
            # primitive column-lattice Hermite forms of determinant pi^m
            for i in range(m + 1):
                j = m - i
                for s in range(p**i):
                    sv = 10**6 if s == 0 else _val(Fraction(s), p)
                    if min(i, j, sv) != 0:
                        continue
                    reps.append(PGL2Element(
                        p, (Fraction(p)**i, Fraction(s) / self.delta,
                            0, Fraction(p)**j)))
        elif kind == "t":
            if m >= 0:
                for s in range(p**m):
                    reps.append(PGL2Element(
                        p, (1, Fraction(s) / self.delta, 0, 1)) * base)
            else:
                for s in range(p**(-m)):
                    reps.append(PGL2Element(
                        p, (1, 0, Fraction(s * p) * self.delta, 1)) * base)
        else:
            if m >= 1:
                for s in range(p**(m - 1)):
                    reps.append(PGL2Element(
                        p, (1, 0, Fraction(s * p) * self.delta, 1)) * base)
            else:
                for s in range(p**(1 - m)):
                    reps.append(PGL2Element(
                        p, (1, Fraction(s) / self.delta, 0, 1)) * base)
        self._cosets[label] = reps
        return reps


def _vge(x: Fraction, bound, p):
    v = _val(x, p)
    return v is None or v >= bound


class PGL2Hecke:
    """Finite rational combination of double-coset characteristic fns."""

    def __init__(self, ctx, coeffs=None):
        self.ctx = ctx
        self.coeffs = {k: Fraction(v) for k, v in (coeffs or {}).items()
                       if v}

    @classmethod
    def basis(cls, ctx, label, coeff=1):
        return cls(ctx, {label: coeff})

    def __add__(self, other):
        out = dict(self.coeffs)
        for k, v in other.coeffs.items():
            s = out.get(k, Fraction(0)) + v
            if s:
                out[k] = s
            elif k in out:
                del out[k]
        return PGL2Hecke(self.ctx, out)

    def scale(self, c):
        return PGL2Hecke(self.ctx,
                         {k: Fraction(c) * v for k, v in self.coeffs.items()})

    def __eq__(self, other):
        return isinstance(other, PGL2Hecke) and self.coeffs == other.coeffs

    def evaluate(self, g: PGL2Element) -> Fraction:
        det = g.m[0] * g.m[3] - g.m[1] * g.m[2]
        detv = _val(det, self.ctx.p)
        for label, coeff in self.coeffs.items():
            # the det class mod squares separates the double cosets
            if (label[1] - detv) % 2:
                continue
            for rep in self.ctx.coset_reps(label):
                if self.ctx.member(rep.inverse() * g):
                    return coeff
        return Fraction(0)

    def __repr__(self):
        return " + ".join(f"({v})*[{k[0]}{k[1]}]"
                          for k, v in sorted(self.coeffs.items())) or "0"


def pgl2_convolve(X: PGL2Hecke, Y: PGL2Hecke) -> PGL2Hecke:
    ctx = X.ctx
    out = {}
    rad = (max(abs(m) + 1 for _, m in X.coeffs)
           + max(abs(m) + 1 for _, m in Y.coeffs))
    for label in ctx.labels():
        if abs(label[1]) > rad:
            continue
        r = ctx.rep_element(label)
        acc = Fraction(0)
        for lb, coeff in X.coeffs.items():
            for rep in ctx.coset_reps(lb):
                acc += coeff * Y.evaluate(rep.inverse() * r)
        if acc:
            out[label] = acc
    return PGL2Hecke(ctx, out)


def pgl2_standard_ops(ctx: PGL2Context):
    ops = {"I": PGL2Hecke.basis(ctx, ("t", 0))}
    rng = (range(ctx.window + 1) if ctx.kind == "maximal"
           else range(-ctx.window, ctx.window + 1))
    for m in rng:
        ops[f"T{m}"] = PGL2Hecke.basis(ctx, ("t", m))
    if ctx.kind == "iwahori":
        for m in range(-ctx.window, ctx.window + 1):
            ops[f"U{m}"] = PGL2Hecke.basis(ctx, ("w", m))
    return ops


def pgl2_relation_suite(ctx: PGL2Context, tmax: int = 5):
    """The same relation table as the metaplectic algebras, verified."""
    ops = pgl2_standard_ops(ctx)
    q = ctx.p
    cases = []

    def check(name, lhs, rhs):
        cases.append({"case": name, "ok": lhs == rhs,
                      "lhs": repr(lhs), "rhs": repr(rhs)})

    T = lambda m: ops[f"T{m}"]
    if ctx.kind == "maximal":
        check("T1*T1 = (q+1) + T2", pgl2_convolve(T(1), T(1)),
              T(0).scale(q + 1) + T(2))
        for m in range(2, tmax + 1):
            check(f"T1*T{m} = q T{m-1} + T{m+1}",
                  pgl2_convolve(T(1), T(m)), T(m - 1).scale(q) + T(m + 1))
    else:
        U = lambda m: ops[f"U{m}"]
        check("U0*U1 = T1", pgl2_convolve(U(0), U(1)), T(1))
        check("U1*U0 = T-1", pgl2_convolve(U(1), U(0)), T(-1))
        check("U0*U0 = (q-1) U0 + q", pgl2_convolve(U(0), U(0)),
              U(0).scale(q - 1) + ops["I"].scale(q))
        check("U1*U1 = 1", pgl2_convolve(U(1), U(1)), ops["I"])
        for m in range(0, tmax):
            check(f"U1*T{m} = U{m+1}", pgl2_convolve(U(1), T(m)), U(m + 1))
            check(f"U0*T{-m} = U{-m}", pgl2_convolve(U(0), T(-m)), U(-m))
        pairs = [(m1, m2) for m1 in range(-3, 4) for m2 in range(-3, 4)
                 if m1 * m2 >= 0 and abs(m1 + m2) <= tmax
                 and abs(m1) + abs(m2) <= tmax]
        for m1, m2 in pairs:
            check(f"T{m1}*T{m2} = T{m1+m2}",
                  pgl2_convolve(T(m1), T(m2)), T(m1 + m2))
    return cases


def comparison_table(mp2_cases, pgl2_cases):
    """Structure-constant comparison: matching named relations agree."""
    mp2 = {c["case"]: c["ok"] for c in mp2_cases}
    rows = []
    for c in pgl2_cases:
        name = c["case"]
        rows.append({
            "case": name,
            "pgl2_ok": c["ok"],
            "mp2_ok": mp2.get(name),
            "match": c["ok"] and mp2.get(name, False),
        })
    return rows
