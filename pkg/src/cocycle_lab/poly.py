"""Sparse multivariate polynomials with exact symbolic coefficients.

Coefficients are KNumbers (rational plus Q-linear symbol terms); exponents are
small non-negative integers.  Integer-valuedness of rational polynomials is
decided exactly through the binomial (falling-factorial) basis: writing
x^k = sum_j S2(k,j) j! C(x,j), a polynomial takes integer values on all of Z^n
if and only if all its multi-binomial coefficients are integers.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .exact import KNumber


@dataclass(frozen=True)
class Poly:
    nv: int
    table: object  # SymbolTable of every coefficient
    terms: tuple  # ((exps tuple, KNumber), ...) canonical: sorted, no zeros

    @staticmethod
    def make(nv, table, terms):
        acc = {}
        for exps, c in (terms.items() if isinstance(terms, dict) else terms):
            exps = tuple(int(e) for e in exps)
            if len(exps) != nv or any(e < 0 for e in exps):
                raise ValueError("bad exponent vector")
            if not isinstance(c, KNumber):
                c = KNumber.make(table, c)
            acc[exps] = acc[exps] + c if exps in acc else c
        items = tuple(sorted((e, c) for e, c in acc.items() if not c.is_zero()))
        return Poly(nv, table, items)

    @staticmethod
    def zero(nv, table):
        return Poly(nv, table, ())

    @staticmethod
    def const(nv, table, c):
        return Poly.make(nv, table, {(0,) * nv: c})

    @staticmethod
    def var(nv, table, i):
        e = [0] * nv
        e[i] = 1
        return Poly.make(nv, table, {tuple(e): Fraction(1)})

    def is_zero(self):
        return not self.terms

    def __add__(self, other):
        if not isinstance(other, Poly):
            other = Poly.const(self.nv, self.table, other)
        if other.nv != self.nv:
            raise ValueError("variable count mismatch")
        return Poly.make(self.nv, self.table, list(self.terms) + list(other.terms))

    def __neg__(self):
        return Poly(self.nv, self.table, tuple((e, -c) for e, c in self.terms))

    def __sub__(self, other):
        if not isinstance(other, Poly):
            other = Poly.const(self.nv, self.table, other)
        return self + (-other)

    def scale(self, q):
        if isinstance(q, KNumber):
            return Poly.make(self.nv, self.table, [(e, c * q) for e, c in self.terms])
        q = Fraction(q)
        if not q:
            return Poly.zero(self.nv, self.table)
        return Poly(self.nv, self.table, tuple((e, c.scale(q)) for e, c in self.terms))

    def __mul__(self, other):
        if not isinstance(other, Poly):
            return self.scale(other)
        if other.nv != self.nv:
            raise ValueError("variable count mismatch")
        acc = {}
        for e1, c1 in self.terms:
            for e2, c2 in other.terms:
                e = tuple(a + b for a, b in zip(e1, e2))
                c = c1 * c2  # symbol-times-symbol products raise here
                acc[e] = acc[e] + c if e in acc else c
        return Poly.make(self.nv, self.table, acc)

    def substitute(self, mapping):
        """Replace variable i by mapping[i] (a Poly in the *target* variables);
        variables absent from the mapping must not occur."""
        if not self.terms:
            tgt = next(iter(mapping.values()))
            return Poly.zero(tgt.nv, self.table)
        tgt_nv = next(iter(mapping.values())).nv
        powers = {}

        def power(i, e):
            if (i, e) not in powers:
                p = Poly.const(tgt_nv, self.table, Fraction(1))
                for _ in range(e):
                    p = p * mapping[i]
                powers[(i, e)] = p
            return powers[(i, e)]

        out = Poly.zero(tgt_nv, self.table)
        for exps, c in self.terms:
            term = Poly.const(tgt_nv, self.table, Fraction(1))
            for i, e in enumerate(exps):
                if e:
                    if i not in mapping:
                        raise ValueError(f"variable {i} has no substitution")
                    term = term * power(i, e)
            out = out + term.scale(c)
        return out

    def compose_linear(self, matrix, tgt_nv):
        """Substitute variable i by the linear form sum matrix[i][j] * y_j."""
        mapping = {}
        for i in range(self.nv):
            row = matrix[i]
            mapping[i] = Poly.make(tgt_nv, self.table,
                                   {tuple(1 if t == j else 0 for t in range(tgt_nv)): row[j]
                                    for j in range(tgt_nv) if row[j]})
            if not row or not any(row):
                mapping[i] = Poly.zero(tgt_nv, self.table)
        return self.substitute(mapping)

    def eval(self, point):
        if len(point) != self.nv:
            raise ValueError("point has wrong dimension")
        acc = KNumber.make(self.table, 0)
        for exps, c in self.terms:
            v = 1
            for x, e in zip(point, exps):
                for _ in range(e):
                    v *= x
            if v:
                acc = acc + c.scale(v)
        return acc

    def symbol_component(self, name):
        """Rational polynomial (Fraction terms dict) of the given symbol."""
        return {e: c.coeff(name) for e, c in self.terms if c.coeff(name)}

    def rational_component(self):
        return {e: c.const for e, c in self.terms if c.const}

    def used_symbols(self):
        out = []
        for _, c in self.terms:
            for n in c.symbol_names():
                if n not in out:
                    out.append(n)
        return out

    def max_degree(self):
        return max((max(e) for e, _ in self.terms), default=0)

    def rebase(self, table):
        return Poly(self.nv, table, tuple((e, c.rebase(table)) for e, c in self.terms))


@lru_cache(maxsize=None)
def _stirling2(k, j):
    if k == j == 0:
        return 1
    if k == 0 or j == 0:
        return 0
    return j * _stirling2(k - 1, j) + _stirling2(k - 1, j - 1)


@lru_cache(maxsize=None)
def _fact(j):
    return 1 if j == 0 else j * _fact(j - 1)


def binomial_coefficients(rational_terms, nv):
    """Coefficients of a rational polynomial in the multi-binomial basis
    prod_i C(x_i, j_i).  The polynomial is integer-valued on Z^nv iff all of
    them are integers."""
    acc = {}
    for exps, c in rational_terms.items():
        # expand prod x_i^{k_i} = sum over j_i of S2(k_i,j_i) j_i! C(x_i, j_i)
        partial = {(): Fraction(c)}
        for k in exps:
            nxt = {}
            for js, coef in partial.items():
                for j in range(k + 1):
                    s = _stirling2(k, j)
                    if not s:
                        continue
                    key = js + (j,)
                    add = coef * s * _fact(j)
                    nxt[key] = nxt.get(key, Fraction(0)) + add
            partial = nxt
        for js, coef in partial.items():
            acc[js] = acc.get(js, Fraction(0)) + coef
    return acc


def is_integer_valued(rational_terms, nv):
    return all(c.denominator == 1 for c in binomial_coefficients(rational_terms, nv).values())
