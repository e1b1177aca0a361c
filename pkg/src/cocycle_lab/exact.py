"""Exact scalars: rationals plus Q-linear combinations of named symbols.

A KNumber is c0 + sum(c_j * sym_j) over Fraction coefficients.  Symbols come
in two flavors: thetas (declared irrational, axiomatically Q-linearly
independent modulo the declared relations) and xis (free parameters,
optionally carrying a torsion order m meaning m*xi is an integer).

A RationalityContext records which symbol combinations are asserted to be
rational, integral, or irrational; classify() decides the status of a value
from those facts by exact linear algebra, and split() performs the binary
rational/irrational case split when the status is genuinely open.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from fractions import Fraction

from . import zlinalg as zl

Rational = Fraction

INTEGER = "integer"
RATIONAL = "rational"
IRRATIONAL = "irrational"
UNDETERMINED = "undetermined"


def _canon_relation(const, items):
    items = tuple((n, Fraction(c)) for n, c in items if c)
    lead = items[0][1] if items else Fraction(const)
    if lead < 0:
        const = -const
        items = tuple((n, -c) for n, c in items)
    return (Fraction(const), items)


@dataclass(frozen=True)
class SymbolTable:
    thetas: tuple = ()
    xis: tuple = ()  # (name, torsion order); order 0 = no torsion axiom
    relations: tuple = ()  # (const, ((name, coeff), ...)) identically zero

    def __post_init__(self):
        names = list(self.thetas) + [n for n, _ in self.xis]
        if len(set(names)) != len(names):
            raise ValueError("duplicate symbol names")
        for _, m in self.xis:
            if m < 0:
                raise ValueError("torsion order must be >= 0")
        object.__setattr__(self, "relations",
                           tuple(_canon_relation(c, items) for c, items in self.relations))

    @property
    def names(self):
        return tuple(self.thetas) + tuple(n for n, _ in self.xis)

    def is_theta(self, name):
        return name in self.thetas

    def torsion_order(self, name):
        for n, m in self.xis:
            if n == name:
                return m
        return 0

    def with_xis(self, new_xis):
        """Extended table with additional parameter symbols appended."""
        return SymbolTable(self.thetas, self.xis + tuple(new_xis), self.relations)

    def index(self, name):
        return self.names.index(name)


@dataclass(frozen=True)
class KNumber:
    table: SymbolTable
    const: Fraction
    coeffs: tuple  # sorted (name, Fraction) pairs, no zeros

    @staticmethod
    def make(table, const=0, coeffs=None):
        const = Fraction(const)
        items = []
        if coeffs:
            seen = {}
            for n, c in (coeffs.items() if isinstance(coeffs, dict) else coeffs):
                if n not in table.names:
                    raise ValueError(f"unknown symbol {n!r}")
                seen[n] = seen.get(n, Fraction(0)) + Fraction(c)
            items = [(n, c) for n, c in seen.items() if c]
            items.sort(key=lambda p: table.index(p[0]))
        return KNumber(table, const, tuple(items))

    def _check(self, other):
        if self.table is not other.table and self.table != other.table:
            raise ValueError("symbol-table mismatch")

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            return KNumber(self.table, self.const + other, self.coeffs)
        self._check(other)
        d = dict(self.coeffs)
        for n, c in other.coeffs:
            d[n] = d.get(n, Fraction(0)) + c
        return KNumber.make(self.table, self.const + other.const, d)

    __radd__ = __add__

    def __neg__(self):
        return KNumber(self.table, -self.const, tuple((n, -c) for n, c in self.coeffs))

    def __sub__(self, other):
        if isinstance(other, (int, Fraction)):
            return self + (-other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, q):
        q = Fraction(q)
        if q == 0:
            return KNumber(self.table, Fraction(0), ())
        return KNumber(self.table, self.const * q, tuple((n, c * q) for n, c in self.coeffs))

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        self._check(other)
        if self.coeffs and other.coeffs:
            raise ValueError("products of symbols are not supported")
        if other.coeffs:
            return other.scale(self.const)
        return self.scale(other.const)

    __rmul__ = __mul__

    def is_zero(self):
        return self.const == 0 and not self.coeffs

    def is_constant(self):
        return not self.coeffs

    def symbol_names(self):
        return [n for n, _ in self.coeffs]

    def coeff(self, name):
        for n, c in self.coeffs:
            if n == name:
                return c
        return Fraction(0)

    def rebase(self, table):
        """Same value over an extended symbol table."""
        return KNumber.make(table, self.const, dict(self.coeffs))

    def __str__(self):
        parts = []
        if self.const or not self.coeffs:
            parts.append(str(self.const))
        for n, c in self.coeffs:
            if c == 1:
                parts.append(n)
            elif c == -1:
                parts.append(f"-{n}")
            else:
                parts.append(f"{c}*{n}")
        out = parts[0]
        for p in parts[1:]:
            out += f" - {p[1:]}" if p.startswith("-") else f" + {p}"
        return out


def knum(table, const=0, **coeffs):
    return KNumber.make(table, const, coeffs)


def symbol(table, name, q=1):
    return KNumber.make(table, 0, {name: q})


class _QEchelon:
    """Row-echelon basis over Q with exact reduction."""

    def __init__(self, width):
        self.width = width
        self.rows = []  # (pivot index, row) with row[pivot] == 1

    def reduce(self, v):
        v = list(v)
        for piv, row in self.rows:
            if v[piv]:
                f = v[piv]
                v = [x - f * y for x, y in zip(v, row)]
        return v

    def add(self, v):
        r = self.reduce(v)
        piv = next((i for i, x in enumerate(r) if x), None)
        if piv is None:
            return False
        r = [x / r[piv] for x in r]
        self.rows.append((piv, r))
        self.rows.sort(key=lambda p: p[0])
        # back-substitute to keep full reduction
        for i, (p, row) in enumerate(self.rows):
            red = row
            for p2, row2 in self.rows:
                if p2 != p and red[p2]:
                    f = red[p2]
                    red = [x - f * y for x, y in zip(red, row2)]
            self.rows[i] = (p, red)
        return True

    def contains(self, v):
        return not any(self.reduce(v))


@dataclass(frozen=True)
class Classification:
    kind: str
    denominator: int | None = None  # for integer/rational: m with m*x in Z (if known)
    residual: tuple | None = None  # canonical open symbol part, for splitting

    def is_rational(self):
        return self.kind in (INTEGER, RATIONAL)


@dataclass(frozen=True)
class RationalityContext:
    table: SymbolTable
    rational: tuple = ()  # KNumbers asserted to lie in Q
    integral: tuple = ()  # KNumbers asserted to lie in Z
    irrational: tuple = ()  # KNumbers asserted to lie outside Q
    assumptions: tuple = ()  # human-readable trail of split() choices

    def __post_init__(self):
        for f in self.rational + self.integral + self.irrational:
            if f.table != self.table:
                raise ValueError("fact does not belong to this symbol table")

    # -- internal vector views -------------------------------------------

    def _vec(self, x):
        names = self.table.names
        return [x.coeff(n) for n in names]

    def _relation_echelon(self):
        """Echelon over (symbols..., const); relations are identically zero.

        Column order is (xis..., thetas..., const): pivots land on parameter
        symbols first, so relations rewrite parameters in terms of thetas and
        rationals — forced irrationality stays visible on theta coordinates —
        and the constant is never used as a pivot."""
        names = self.table.names
        ntheta = len(self.table.thetas)
        perm = list(range(ntheta, len(names))) + list(range(ntheta))  # xi-first
        ech = _QEchelon(len(names) + 1)
        for const, items in self.table.relations:
            w = [Fraction(0)] * len(names)
            for n, c in items:
                w[names.index(n)] += c
            ech.add([w[i] for i in perm] + [Fraction(const)])
        # a relation reducing to a pure nonzero constant is contradictory
        bad = any(piv == len(names) for piv, _ in ech.rows)
        return ech, perm, bad

    def _reduce_relations(self, x):
        ech, perm, _ = self._relation_echelon()
        w = self._vec(x)
        r = ech.reduce([w[i] for i in perm] + [Fraction(x.const)])
        out = [Fraction(0)] * len(perm)
        for pos, i in enumerate(perm):
            out[i] = r[pos]
        return r[-1], out

    def _fact_parts(self):
        """Relation-reduced (symbol part, constant) of rational and integral facts,
        torsion axioms included among the integral facts."""
        rat, integ = [], []
        for f in self.rational:
            c, v = self._reduce_relations(f)
            if any(v):
                rat.append((v, c))
        for f in self.integral:
            c, v = self._reduce_relations(f)
            integ.append((v, c))
        for n, m in self.table.xis:
            if m:
                c, v = self._reduce_relations(symbol(self.table, n, m))
                integ.append((v, c))
        return rat, integ

    def _span(self):
        rat, integ = self._fact_parts()
        ech = _QEchelon(len(self.table.names))
        for v, _ in rat + integ:
            ech.add(v)
        return ech

    # -- public API -------------------------------------------------------

    def is_consistent(self):
        ech, _, bad = self._relation_echelon()
        if bad:
            return False
        names = self.table.names
        ntheta = len(self.table.thetas)
        span = self._span()
        # the rational span must not contain a nonzero pure-theta vector:
        # find combinations of span basis rows with zero xi-part
        rows = [row for _, row in span.rows]
        if rows:
            xi_cols = list(range(ntheta, len(names)))
            # integer matrix of xi-parts of the basis rows
            den = 1
            for row in rows:
                for j in xi_cols:
                    den = den * row[j].denominator // math.gcd(den, row[j].denominator)
            mat = [[int(rows[i][j] * den) for i in range(len(rows))] for j in xi_cols]
            if not xi_cols:
                combos = [[1 if i == k else 0 for i in range(len(rows))] for k in range(len(rows))]
            else:
                combos = zl.kernel_int(mat)
            for combo in combos:
                vec = [sum(Fraction(combo[i]) * rows[i][j] for i in range(len(rows)))
                       for j in range(len(names))]
                if any(vec[:ntheta]):
                    return False
        implicit = [symbol(self.table, n) for n in self.table.thetas]
        for f in list(self.irrational) + implicit:
            _, v = self._reduce_relations(f)
            if not any(v):
                return False  # declared irrational but constant
            if span.contains(v):
                return False  # declared irrational but in the rational span
        return True

    def classify(self, x):
        c, v = self._reduce_relations(x)
        names = self.table.names
        ntheta = len(self.table.thetas)
        if not any(v):
            den = c.denominator
            return Classification(INTEGER if den == 1 else RATIONAL, den)
        span = self._span()
        residual = span.reduce(v)
        if any(residual):
            if not any(residual[ntheta:]):
                return Classification(IRRATIONAL)  # theta axiom
            for f in self.irrational:
                _, fv = self._reduce_relations(f)
                fres = span.reduce(fv)
                q = _collinear(residual, fres)
                if q is not None and q != 0:
                    return Classification(IRRATIONAL)
            return Classification(UNDETERMINED, residual=tuple(residual))
        # rational: try for a denominator bound from the integral facts alone
        _, integ = self._fact_parts()
        ivecs = [u for u, _ in integ if any(u)]
        iconsts = [b for u, b in integ if any(u)]
        den_all = c.denominator
        for x_ in v:
            den_all = den_all * x_.denominator // math.gcd(den_all, x_.denominator)
        for u, b in integ:
            for x_ in list(u) + [b]:
                den_all = den_all * x_.denominator // math.gcd(den_all, x_.denominator)
        D = den_all
        if ivecs:
            cols = [[int(x_ * D) for x_ in u] for u in ivecs]
            mat = [[col[i] for col in cols] for i in range(len(names))]
            target = [int(x_ * D) for x_ in v]
            sol = zl.solve_int(mat, target)
            if sol is not None:
                # x = c + sum(sol_j * (z_j - b_j)) with z_j integers
                off = c - sum(Fraction(s) * b for s, b in zip(sol, iconsts))
                den = off.denominator
                return Classification(INTEGER if den == 1 else RATIONAL, den)
            hn = zl.col_hnf(mat)
            hcols = [list(col) for col in zip(*hn)] if hn else []
            m = zl.denominator_in_lattice([tuple(col) for col in hcols], target) if hcols else None
            if m is not None:
                # m*v = sum(n_j * u_j) with n_j integers, so
                # m*x = m*c - sum(n_j * b_j) + (an integer)
                sol2 = zl.solve_int(mat, [m * t for t in target])
                off = m * c - sum(Fraction(s) * b for s, b in zip(sol2, iconsts))
                den = m * off.denominator
                return Classification(INTEGER if den == 1 else RATIONAL, den)
        return Classification(RATIONAL, None)

    def assume_rational(self, x, note=None):
        return replace(self, rational=self.rational + (x,),
                       assumptions=self.assumptions + ((note or f"{x} rational"),))

    def assume_integral(self, x, note=None):
        return replace(self, integral=self.integral + (x,),
                       assumptions=self.assumptions + ((note or f"{x} integral"),))

    def assume_irrational(self, x, note=None):
        return replace(self, irrational=self.irrational + (x,),
                       assumptions=self.assumptions + ((note or f"{x} irrational"),))

    def split(self, x):
        """Binary rational/irrational case split on x.

        Returns (rational branch, irrational branch); a branch is None when the
        corresponding assumption is inconsistent with this context."""
        rat = self.assume_rational(x)
        irr = self.assume_irrational(x)
        return (rat if rat.is_consistent() else None,
                irr if irr.is_consistent() else None)


def _collinear(a, b):
    """q with a == q*b, or None."""
    q = None
    for x, y in zip(a, b):
        if y == 0:
            if x != 0:
                return None
        else:
            r = x / y
            if q is None:
                q = r
            elif q != r:
                return None
    if q is None:
        return Fraction(0) if not any(a) else None
    return q


def empty_context(table):
    return RationalityContext(table)
