"""2-cocycles as exponentiated phase polynomials sigma = e^{2 pi i Q}.

All verdict-relevant consumers read cocycles only through their
antisymmetrization Q~(g,h) = Q(g,h) - Q(h,g) on *commuting* argument pairs
(twisted centers, the phi_D pairing, FC computations).  Cocycles produced by
quotient induction therefore carry an extra bilinear ``correction`` term,
exact on commuting pairs, that accounts for the coordinate-reduction carries a
purely polynomial phase cannot express; see induce_gamma.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field, replace
from fractions import Fraction

from . import zlinalg as zl
from .exact import (INTEGER, IRRATIONAL, RATIONAL, UNDETERMINED, KNumber,
                    RationalityContext, SymbolTable, symbol)
from .groups import GroupPresentation, Morphism, QuotientData
from .poly import Poly, is_integer_valued


class CocycleError(ValueError):
    pass


@dataclass(frozen=True)
class Cocycle:
    group: GroupPresentation
    table: SymbolTable
    phase: Poly  # in 2n variables: g_1..g_n, h_1..h_n
    correction: Poly | None = None  # added to the antisymmetrization on commuting pairs

    def __post_init__(self):
        if self.phase.nv != 2 * self.group.n:
            raise ValueError("phase variable count must be 2 * (group coordinates)")

    @property
    def n(self):
        return self.group.n

    def value(self, a, b):
        """Phase Q(a, b) as a KNumber (mod Z is the physical content)."""
        return self.phase.eval(tuple(a) + tuple(b))


def trivial_cocycle(group, table=None):
    table = table or SymbolTable()
    return Cocycle(group, table, Poly.zero(2 * group.n, table))


def phase_from_monomials(group, table, monomials):
    """monomials: iterable of (coefficient, g-exponents, h-exponents)."""
    n = group.n
    terms = []
    for c, ge, he in monomials:
        terms.append((tuple(ge) + tuple(he), c if isinstance(c, KNumber) else KNumber.make(table, c)))
    return Cocycle(group, table, Poly.make(2 * n, table, terms))


# ---------------------------------------------------------------------------
# the shared "vanishes mod Z" test for polynomials with symbolic coefficients


def phase_is_integral(p, table):
    """True iff the polynomial takes values in Z for every integer point and
    every admissible assignment of the symbols (free symbols range over R;
    a torsion symbol of order m ranges over (1/m)Z)."""
    return integrality_violation(p, table) is None


def integrality_violation(p, table):
    for name in p.used_symbols():
        comp = p.symbol_component(name)
        m = table.torsion_order(name)
        if m:
            # the symbol ranges over (1/m)Z, so the component must be
            # divisible by m as an integer-valued polynomial
            scaled = {e: c / m for e, c in comp.items()}
            if not is_integer_valued(scaled, p.nv):
                return f"coefficient of symbol {name} not divisible by its torsion order {m}"
        else:
            if comp:
                return f"non-vanishing coefficient of free symbol {name}"
    if not is_integer_valued(p.rational_component(), p.nv):
        return "rational part is not integer-valued"
    return None


# ---------------------------------------------------------------------------
# group-law substitution helpers


def _law_polys(group, table, nv, first, second):
    """Polynomials (in nv variables) for the coordinates of x*y where x sits
    at variable offset ``first`` and y at offset ``second``."""
    n = group.n
    out = []
    for k in range(n):
        terms = {}
        e = [0] * nv
        e[first + k] = 1
        terms[tuple(e)] = Fraction(1)
        e = [0] * nv
        e[second + k] = 1
        terms[tuple(e)] = terms.get(tuple(e), Fraction(0)) + 1
        for k2, i, j, c in group.bilinear:
            if k2 == k:
                e = [0] * nv
                e[first + i] += 1
                e[second + j] += 1
                key = tuple(e)
                terms[key] = terms.get(key, Fraction(0)) + c
        out.append(Poly.make(nv, table, terms))
    return out


def _vars(nv, table, offset, n):
    return [Poly.var(nv, table, offset + i) for i in range(n)]


def cocycle_defect(c):
    """D(g,h,k) = Q(g,h) + Q(g*h, k) - Q(h,k) - Q(g, h*k) in 3n variables."""
    n = c.n
    nv = 3 * n
    t = c.table
    g = _vars(nv, t, 0, n)
    h = _vars(nv, t, n, n)
    k = _vars(nv, t, 2 * n, n)
    gh = _law_polys(c.group, t, nv, 0, n)
    hk = _law_polys(c.group, t, nv, n, 2 * n)

    def q(xs, ys):
        mapping = {i: xs[i] for i in range(n)}
        mapping.update({n + i: ys[i] for i in range(n)})
        return c.phase.substitute(mapping)

    return q(g, h) + q(gh, k) - q(h, k) - q(g, hk)


def validate_cocycle(c):
    """None when valid; otherwise a human-readable violation report."""
    n = c.n
    t = c.table
    if c.phase.max_degree() > 3:
        return "phase degree exceeds the supported bound (3 per variable)"
    # normalization sigma(g, e) = sigma(e, g) = 1
    zero = [Poly.zero(n, t)] * n
    gvars = _vars(n, t, 0, n)
    mapping_ge = {i: gvars[i] for i in range(n)}
    mapping_ge.update({n + i: zero[i] for i in range(n)})
    viol = integrality_violation(c.phase.substitute(mapping_ge), t)
    if viol:
        return f"normalization Q(g, e) not in Z: {viol}"
    mapping_eg = {i: zero[i] for i in range(n)}
    mapping_eg.update({n + i: gvars[i] for i in range(n)})
    viol = integrality_violation(c.phase.substitute(mapping_eg), t)
    if viol:
        return f"normalization Q(e, g) not in Z: {viol}"
    # well-definedness modulo the torsion moduli, in each argument slot
    for arg in (0, 1):
        for i in range(n):
            m = c.group.moduli[i]
            if not m:
                continue
            mapping = {}
            for v in range(2 * n):
                p = Poly.var(2 * n, t, v)
                if v == arg * n + i:
                    p = p + Poly.const(2 * n, t, Fraction(m))
                mapping[v] = p
            shifted = c.phase.substitute(mapping)
            viol = integrality_violation(shifted - c.phase, t)
            if viol:
                return (f"phase is not well defined modulo {m} on coordinate "
                        f"{c.group.names[i]} (argument {arg + 1}): {viol}")
    viol = integrality_violation(cocycle_defect(c), t)
    if viol:
        return f"cocycle identity fails: {viol}"
    return None


# ---------------------------------------------------------------------------
# antisymmetrization and the condition engine


def antisym(c):
    """Q~(g,h) with sigma~ = e^{2 pi i Q~}; includes the induced-cocycle carry
    correction, so the result is exact (mod Z) on commuting argument pairs."""
    n = c.n
    mapping = {i: Poly.var(2 * n, c.table, n + i) for i in range(n)}
    mapping.update({n + i: Poly.var(2 * n, c.table, i) for i in range(n)})
    swapped = c.phase.substitute(mapping)
    out = c.phase - swapped
    if c.correction is not None:
        out = out + c.correction
    return out


def _pairing_rows(c, gens):
    """For generators v_a of a central subgroup, the matrix of KNumbers
    rows[a][j] = Q~(v_a, e_j), after verifying that (g, h) -> Q~(g, h) is a
    bicharacter mod Z on (subgroup) x G.

    The verification is two exact polynomial identities in the subgroup
    parameters z and the group coordinates y, with g(z) = sum_a z_a v_a:
      Q~(g(z), y) = sum_j y_j Q~(g(z), e_j)   (character in the second slot)
      Q~(g(z), e_j) = sum_a z_a Q~(v_a, e_j)  (character in the first slot)
    """
    n = c.n
    t = c.table
    k = len(gens)
    q = antisym(c)
    nv = k + n  # z variables then y variables
    gz = []
    for i in range(n):
        gz.append(Poly.make(nv, t, {tuple(1 if v == a else 0 for v in range(nv)): Fraction(gens[a][i])
                                    for a in range(k) if gens[a][i]}))
    mapping = {i: gz[i] for i in range(n)}
    mapping.update({n + i: Poly.var(nv, t, k + i) for i in range(n)})
    qz = q.substitute(mapping)  # Q~(g(z), y) in variables (z, y)
    qzj = []
    for j in range(n):
        sub = {a: Poly.var(nv, t, a) for a in range(k)}
        sub.update({k + i: Poly.const(nv, t, Fraction(1 if i == j else 0)) for i in range(n)})
        qzj.append(qz.substitute(sub))  # Q~(g(z), e_j), still in nv variables
    lin = Poly.zero(nv, t)
    for j in range(n):
        lin = lin + Poly.var(nv, t, k + j) * qzj[j]
    viol = integrality_violation(qz - lin, t)
    if viol:
        raise CocycleError(
            f"pairing is not a character in its second argument: {viol}")
    rows = [[q.eval(tuple(gens[a]) + tuple(1 if i == j else 0 for i in range(n)))
             for j in range(n)] for a in range(k)]
    for j in range(n):
        lin = Poly.zero(nv, t)
        for a in range(k):
            lin = lin + Poly.var(nv, t, a).scale(rows[a][j])
        viol = integrality_violation(qzj[j] - lin, t)
        if viol:
            raise CocycleError(
                f"pairing is not a character in its first argument: {viol}")
    return rows


def central_parametrization(lattice):
    """Generators (ambient vectors) and torsion moduli presenting the subgroup
    as Z^k / diag(moduli); coordinates there parametrize it faithfully."""
    basis = [list(col) for col in lattice.hnf_basis]
    if not basis:
        return [], []
    struct = lattice.subgroup_structure()
    u = [list(r) for r in struct.coords]
    from .groups import _mat_inverse_unimodular

    p = _mat_inverse_unimodular(u)
    k = len(basis)
    gens, mods = [], []
    for tcol in range(k):
        m = struct.moduli[tcol]
        if m == 1:
            continue
        vec = [sum(p[a][tcol] * basis[a][i] for a in range(k)) for i in range(len(basis[0]))]
        gens.append(tuple(vec))
        mods.append(m)
    return gens, mods


@dataclass(frozen=True)
class CaseLeaf:
    ctx: RationalityContext
    lattice: zl.SubgroupLattice
    conditions: tuple = ()  # human-readable "form in Z" strings
    skipped: tuple = ()  # conditions dropped for lack of a denominator bound


def condition_lattice(ctx, forms, zmoduli, gen_names, case_budget=256):
    """Case tree for {z : F(z) in Z for every F in forms}.

    Each form is a list of KNumber coefficients (one per z-coordinate).
    Symbol components classified irrational force equations; rational
    components force congruences modulo their denominator class; undetermined
    components split the context.  Components whose denominator class is
    unknown are recorded and skipped — this never changes the rank of the
    solution lattice, only its (finite) index.
    """
    leaves = []
    stack = [ctx]
    while stack:
        cur = stack.pop()
        if len(leaves) + len(stack) > case_budget:
            raise BudgetExceeded(case_budget)
        eqs, congs, conds, skipped = [], [], [], []
        pending_split = None
        for form in forms:
            names = []
            for kn in form:
                for s in kn.symbol_names():
                    if s not in names:
                        names.append(s)
            const_row = [kn.const for kn in form]
            if any(x.denominator != 1 for x in const_row):
                congs.append((const_row, 1))
                conds.append(_render_form(const_row, None, gen_names))
            for s in names:
                row = [kn.coeff(s) for kn in form]
                if not any(row):
                    continue
                cls = cur.classify(symbol(cur.table, s))
                if cls.kind == IRRATIONAL:
                    eqs.append(row)
                    conds.append(_render_form(row, s, gen_names) + " = 0 forced (irrational factor)")
                elif cls.kind in (INTEGER, RATIONAL):
                    if cls.denominator is None:
                        skipped.append(_render_form(row, s, gen_names)
                                       + " (rational factor, denominator unknown; "
                                         "congruence skipped, rank unaffected)")
                    else:
                        congs.append((row, cls.denominator))
                        conds.append(_render_form(row, s, gen_names)
                                     + f" = 0 (mod {cls.denominator})")
                else:
                    pending_split = s
                    break
            if pending_split:
                break
        if pending_split:
            rat, irr = cur.split(symbol(cur.table, pending_split))
            for child in (rat, irr):
                if child is not None:
                    stack.append(child)
            continue
        lat = zl.solve_mixed_system(tuple(zmoduli), eqs, congs)
        leaves.append(CaseLeaf(cur, lat, tuple(conds), tuple(skipped)))
    return leaves


class BudgetExceeded(Exception):
    def __init__(self, budget):
        super().__init__(f"case budget of {budget} leaves exceeded")
        self.budget = budget


def _render_form(row, sym, gen_names):
    parts = []
    for c, name in zip(row, gen_names):
        if not c:
            continue
        coef = "" if c == 1 else f"{c}*"
        parts.append(f"{coef}{name}")
    body = " + ".join(parts) if parts else "0"
    if sym:
        return f"{sym}*({body})"
    return f"{body} in Z"


def _rebase_ctx(ctx, table):
    if ctx.table == table:
        return ctx
    return replace(ctx, table=table,
                   rational=tuple(x.rebase(table) for x in ctx.rational),
                   integral=tuple(x.rebase(table) for x in ctx.integral),
                   irrational=tuple(x.rebase(table) for x in ctx.irrational))


def _map_leaves_to_ambient(leaves, gens, ambient_moduli):
    out = []
    n = len(ambient_moduli)
    for leaf in leaves:
        cols = []
        for z in leaf.lattice.hnf_basis:
            vec = [sum(z[a] * gens[a][i] for a in range(len(gens))) for i in range(n)]
            if any(vec):
                cols.append(tuple(vec))
        lat = zl.SubgroupLattice(tuple(ambient_moduli), tuple(cols))
        out.append(replace(leaf, lattice=lat))
    return out


def twisted_center(c, ctx, case_budget=256):
    """Case tree of (context, lattice) for Z(G, sigma) = {central g with
    sigma~(g, h) = 1 for all h}."""
    ctx = _rebase_ctx(ctx, c.table)
    center = c.group.center()
    _check_additive(c.group, center)
    gens, zmods = central_parametrization(center)
    if not gens:
        empty = zl.zero_lattice(c.group.moduli)
        return [CaseLeaf(ctx, empty, ("center is trivial",))]
    rows = _pairing_rows(c, gens)  # also verifies the character property
    # condition per group generator j: sum_a z_a * Q~(v_a, e_j) in Z
    forms = [[rows[a][j] for a in range(len(gens))] for j in range(c.n)]
    gen_names = _gen_names(gens, c.group)
    leaves = condition_lattice(ctx, forms, zmods, gen_names, case_budget)
    return _map_leaves_to_ambient(leaves, gens, c.group.moduli)


def _check_additive(group, lattice):
    """The parametrizations used here require subgroup elements to multiply
    coordinate-wise (mod torsion), i.e. the bilinear correction of any product
    of basis elements must vanish modulo the coordinate moduli."""
    basis = lattice.hnf_basis
    for va in basis:
        for vb in basis:
            for k in range(group.n):
                corr = sum(c * va[i] * vb[j]
                           for kk, i, j, c in group.bilinear if kk == k)
                m = group.moduli[k]
                if corr % m if m else corr:
                    raise CocycleError(
                        "subgroup elements do not multiply coordinate-wise; "
                        "unsupported presentation shape")


def _gen_names(gens, group):
    names = []
    for i, v in enumerate(gens):
        nz = [t for t, x in enumerate(v) if x]
        if len(nz) == 1 and v[nz[0]] == 1:
            names.append(group.names[nz[0]])
        else:
            names.append(f"z{i+1}")
    return names


# ---------------------------------------------------------------------------
# coboundaries, inflation, restriction


def coboundary(group, table, phi):
    """Phase of the coboundary of e^{2 pi i phi}: (d phi)(g,h) = phi(g*h) - phi(g) - phi(h).

    phi is a Poly in n variables with phi(e) in Z."""
    n = group.n
    ec = phi.eval((0,) * n)
    if not (ec.is_constant() and ec.const.denominator == 1):
        raise CocycleError("phi(e) must be an integer phase")
    nv = 2 * n
    gh = _law_polys(group, table, nv, 0, n)
    pg = phi.substitute({i: Poly.var(nv, table, i) for i in range(n)})
    ph = phi.substitute({i: Poly.var(nv, table, n + i) for i in range(n)})
    pgh = phi.substitute({i: gh[i] for i in range(n)})
    return pgh - pg - ph


def is_cohomologous(c1, c2, phi):
    """True iff Q1 - Q2 - d(phi) vanishes mod Z identically."""
    d = coboundary(c1.group, c1.table, phi)
    return phase_is_integral(c1.phase - c2.phase - d, c1.table)


def twist_by_coboundary(c, phi):
    d = coboundary(c.group, c.table, phi)
    return replace(c, phase=c.phase + d)


def inflate(c, projection):
    """Pull a cocycle on G/N back to G along the projection morphism."""
    g = projection.source
    n = g.n
    nq = projection.target.n
    mat = [list(row) for row in projection.matrix]  # nq x n
    lin = [[mat[i][j] for j in range(n)] + [0] * n for i in range(nq)]
    lin += [[0] * n + [mat[i][j] for j in range(n)] for i in range(nq)]
    phase = c.phase.compose_linear(lin, 2 * n)
    corr = c.correction.compose_linear(lin, 2 * n) if c.correction is not None else None
    return Cocycle(g, c.table, phase, corr)


def restrict(c, embedding):
    """Restrict to a subgroup presented by an embedding morphism."""
    sub = embedding.source
    mat = [list(row) for row in embedding.matrix]  # n x ns
    ns = sub.n
    lin = []
    for i in range(c.n):
        lin.append([mat[i][j] for j in range(ns)] + [0] * ns)
    for i in range(c.n):
        lin.append([0] * ns + [mat[i][j] for j in range(ns)])
    phase = c.phase.compose_linear(lin, 2 * ns)
    corr = c.correction.compose_linear(lin, 2 * ns) if c.correction is not None else None
    return Cocycle(sub, c.table, phase, corr)


def restrict_to_lattice(c, lattice):
    """Restrict to a subgroup given as a SubgroupLattice; coordinates of the
    result are the parametrization coordinates of the lattice."""
    gens, zmods = central_parametrization(lattice)
    k = len(gens)
    gmat = [[gens[a][i] for a in range(k)] for i in range(c.n)]  # n x k
    sub = sub_presentation(c.group, gens, zmods)
    emb = Morphism(sub, c.group, tuple(tuple(row) for row in gmat))
    return restrict(c, emb), emb, gens, zmods


def sub_presentation(group, gens, zmods):
    """Presentation of the subgroup generated by ``gens`` (with torsion moduli
    zmods) in its own coordinates.  Supported when products of generators stay
    in the generated lattice, which holds for the kernels and centers handled
    here; the bilinear tensor is transported via one fixed solution."""
    k = len(gens)
    n = group.n
    lat = zl.SubgroupLattice(group.moduli, tuple(tuple(v) for v in gens))
    entries = []
    for a in range(k):
        for b in range(k):
            corr = [0] * n
            for kk, i, j, c in group.bilinear:
                corr[kk] += c * gens[a][i] * gens[b][j]
            if not any(corr):
                continue
            if not lat.contains(corr):
                raise CocycleError("subgroup is not closed under the group law")
            coeffs = _coords_in_parametrization(corr, gens, zmods, group.moduli)
            for t, val in enumerate(coeffs):
                if val:
                    entries.append((t, a, b, val))
    return GroupPresentation(tuple(zmods), tuple(entries))


def _coords_in_parametrization(vec, gens, zmods, ambient_moduli):
    """Express vec (in ambient coordinates) in the generator coordinates,
    solving modulo the ambient torsion."""
    n = len(ambient_moduli)
    k = len(gens)
    cols = [list(g) for g in gens]
    for i, m in enumerate(ambient_moduli):
        if m:
            cols.append([m if t == i else 0 for t in range(n)])
    mat = [[col[i] for col in cols] for i in range(n)]
    sol = zl.solve_int(mat, list(vec))
    if sol is None:
        raise CocycleError("element is not in the subgroup")
    out = [sol[a] % zmods[a] if zmods[a] else sol[a] for a in range(k)]
    return out


# ---------------------------------------------------------------------------
# quotient push-down and induced cocycles


def push_to_quotient(c, qd):
    """omega = sigma o (section x section) on G/N; the result is validated
    and a failure is reported, never silently corrected."""
    nq = qd.group.n
    p = [list(row) for row in qd.section.matrix]  # n x nq
    lin = []
    for i in range(c.n):
        lin.append([p[i][j] for j in range(nq)] + [0] * nq)
    for i in range(c.n):
        lin.append([0] * nq + [p[i][j] for j in range(nq)])
    phase = c.phase.compose_linear(lin, 2 * nq)
    corr = c.correction.compose_linear(lin, 2 * nq) if c.correction is not None else None
    out = Cocycle(qd.group, c.table, phase, corr)
    viol = validate_cocycle(out)
    if viol:
        raise CocycleError(
            "push-down is not a 2-cocycle; a cohomology correction would be "
            f"required, which is outside the supported constructions: {viol}")
    return out


def gamma_symbols(qd, prefix="gamma"):
    """Fresh parameter symbols, one per invariant factor of N."""
    struct = qd.subgroup.subgroup_structure()
    new = []
    stripped = []
    for m in struct.moduli:
        if m == 1:
            stripped.append(None)
            continue
        name = f"{prefix}{len(new)+1}"
        new.append((name, m if m else 0))
        stripped.append(name)
    return new, stripped, struct


def gamma_phase_of(element, qd, table, struct, names_by_factor):
    """gamma(element) as a KNumber phase: sum xi_t * u_t over the invariant
    factor coordinates u of the element inside N."""
    basis = [list(col) for col in qd.subgroup.hnf_basis]
    coeffs = zl.solve_rational(basis, list(element)) if basis else None
    if coeffs is None or any(x.denominator != 1 for x in coeffs):
        raise CocycleError("section defect left the subgroup (section inconsistency)")
    u = [sum(struct.coords[t][a] * int(coeffs[a]) for a in range(len(coeffs)))
         for t in range(len(coeffs))]
    acc = KNumber.make(table, 0)
    for t, name in enumerate(names_by_factor):
        if name is None:
            continue
        m = struct.moduli[t]
        val = u[t] % m if m else u[t]
        if val:
            acc = acc + symbol(table, name, val)
    return acc


def induce_gamma(c, qd, prefix="gamma"):
    """omega_gamma = gamma(defect) * omega with gamma represented symbolically.

    The section defect c(x)c(y)c(xy)^{-1} is bilinear for the linear section;
    the torsion-coordinate carries that a polynomial cannot express are
    recorded in ``correction``, which restores exactness of the
    antisymmetrization on commuting pairs (the only place it is consumed).
    """
    g_top = qd.projection.source
    q = qd.group
    nq = q.n
    new_syms, names_by_factor, struct = gamma_symbols(qd, prefix)
    table = c.table.with_xis(new_syms)
    phase = c.phase.rebase(table)
    corr = c.correction.rebase(table) if c.correction is not None else Poly.zero(2 * nq, table)
    if not new_syms:
        return replace(c, table=table, phase=phase,
                       correction=corr if not corr.is_zero() else None)
    p = [list(row) for row in qd.section.matrix]  # n x nq

    # defect delta(x, y) = B_G(Px, Py) - P B_Q(x, y), coordinate vectors of
    # bilinear coefficients each lying in N
    dcoef = {}
    for (i, j) in itertools.product(range(nq), range(nq)):
        vec = [0] * g_top.n
        for k, a, b, coef in g_top.bilinear:
            vec[k] += coef * p[a][i] * p[b][j]
        for k2, a, b, coef in q.bilinear:
            if a == i and b == j:
                for t in range(g_top.n):
                    vec[t] -= coef * p[t][k2]
        if any(vec):
            dcoef[(i, j)] = vec
    terms = []
    for (i, j), vec in dcoef.items():
        kn = gamma_phase_of(vec, qd, table, struct, names_by_factor)
        if kn.is_zero():
            continue
        e = [0] * (2 * nq)
        e[i] += 1
        e[nq + j] += 1
        terms.append((tuple(e), kn))
    phase = phase + Poly.make(2 * nq, table, terms)

    # carry corrections: for a torsion coordinate k of the quotient with
    # modulus d and lift n_k = d * P e_k, commuting pairs satisfy
    # Qtrue~ = Qpoly~ + (kappa_k(x,y)/d) * gamma(n_k) with kappa_k the
    # integer commutator coordinate
    for t in range(nq):
        d = q.moduli[t]
        if not d:
            continue
        lift = qd.torsion_lifts[t]
        kn = gamma_phase_of(list(lift), qd, table, struct, names_by_factor)
        if kn.is_zero():
            continue
        kterms = []
        for k2, a, b, coef in q.bilinear:
            if k2 != t or not coef:
                continue
            e = [0] * (2 * nq)
            e[a] += 1
            e[nq + b] += 1
            kterms.append((tuple(e), KNumber.make(table, Fraction(coef, d)) * kn))
            e = [0] * (2 * nq)
            e[b] += 1
            e[nq + a] += 1
            kterms.append((tuple(e), KNumber.make(table, Fraction(-coef, d)) * kn))
        corr = corr + Poly.make(2 * nq, table, kterms)
    # no validator run here: the gamma phase of a torsion quotient has a
    # non-polynomial floor remainder, absorbed into ``correction`` for the
    # commuting pairs that every downstream consumer pairs against
    return Cocycle(q, table, phase, corr if not corr.is_zero() else None)


# ---------------------------------------------------------------------------
# phi_D pairing and the two-step kernel


def phi_map(c, d_lattice, ctx, case_budget=256):
    """M = ker(phi_D) as a case tree, plus the pairing rows for surjectivity
    checks: phi_D(g)(d) = sigma~(d, g)."""
    ctx = _rebase_ctx(ctx, c.table)
    center = c.group.center()
    for col in d_lattice.gens:
        if not center.contains(list(col)):
            raise CocycleError("D must be a central subgroup")
    _check_additive(c.group, d_lattice)
    gens, zmods = central_parametrization(d_lattice)
    if not gens:
        return [CaseLeaf(ctx, c.group.full_lattice(), ("D is trivial",))], [], []
    rows = _pairing_rows(c, gens)
    # condition on g (full coordinates): Q~(d_a, g) in Z for all a
    forms = []
    for a in range(len(gens)):
        forms.append([rows[a][j] for j in range(c.n)])
    leaves = condition_lattice(ctx, forms, c.group.moduli, c.group.names, case_budget)
    return leaves, rows, zmods


def phi_surjective(rows, zmods, group, ctx):
    """Whether phi_D: G -> D^ is surjective: (True | False | None, reason).

    Decidable (here) exactly when D is finite with concrete pairing phases:
    the pairing must hit every character of prod Z/m_a."""
    if any(m == 0 for m in zmods):
        return False, "D has a free factor; a countable discrete group never surjects onto its dual torus"
    tvecs = []
    for j in range(group.n):
        vec = []
        for a, m in enumerate(zmods):
            val = rows[a][j]
            if not val.is_constant():
                return None, (f"pairing phase {val} depends on a symbol; "
                              "surjectivity is undetermined")
            scaled = val.const * m
            if scaled.denominator != 1:
                return False, (f"pairing value e^(2 pi i {val}) is not an "
                               f"order-{m} root of unity")
            vec.append(int(scaled) % m)
        tvecs.append(vec)
    lat = zl.SubgroupLattice(tuple(zmods), tuple(tuple(v) for v in tvecs))
    full = lat.index() == 1
    return full, None if full else "pairing image is a proper subgroup of the dual"


# ---------------------------------------------------------------------------
# products


def product_split(c, n1):
    """Split sigma on a direct product G1 x G2 into (sigma1, sigma2, f) with
    sigma(g,h) = sigma1(g1,h1) sigma2(g2,h2) f(h1,g2); f must be a
    bihomomorphism and the reassembly must equal sigma mod Z, otherwise
    not-product-form (None)."""
    n = c.n
    n2 = n - n1
    t = c.table
    nv = 2 * n

    def block_subst(x1_on, x2_on, y1_on, y2_on):
        mapping = {}
        for i in range(n):
            on = (x1_on if i < n1 else x2_on)
            mapping[i] = Poly.var(nv, t, i) if on else Poly.zero(nv, t)
        for i in range(n):
            on = (y1_on if i < n1 else y2_on)
            mapping[n + i] = Poly.var(nv, t, n + i) if on else Poly.zero(nv, t)
        return c.phase.substitute(mapping)

    q11 = block_subst(True, False, True, False)
    q22 = block_subst(False, True, False, True)
    cross = block_subst(False, True, True, False)  # Q((0,g2),(h1,0))
    # f must be bilinear in (g2, h1): every term must have total degree 1 in
    # each block
    for exps, _ in cross.terms:
        d2 = sum(exps[n1:n])
        d1 = sum(exps[n + 0:n + n1])
        if (d1, d2) != (1, 1):
            return None
    resid = c.phase - q11 - q22 - cross
    if not phase_is_integral(resid, t):
        return None
    g1 = GroupPresentation(c.group.moduli[:n1],
                           tuple(e for e in c.group.bilinear if e[0] < n1),
                           c.group.names[:n1])
    g2 = GroupPresentation(c.group.moduli[n1:],
                           tuple((k - n1, i - n1, j - n1, v) for k, i, j, v in c.group.bilinear if k >= n1),
                           c.group.names[n1:])
    emb1 = Morphism(g1, c.group, tuple(tuple(1 if (i == j and i < n1) else 0 for j in range(n1))
                                       for i in range(n)))
    emb2 = Morphism(g2, c.group, tuple(tuple(1 if (i - n1 == j and i >= n1) else 0 for j in range(n2))
                                       for i in range(n)))
    s1 = restrict(c, emb1)
    s2 = restrict(c, emb2)
    fmat = [[KNumber.make(t, 0)] * n1 for _ in range(n2)]
    for exps, coef in cross.terms:
        i2 = next(i for i in range(n1, n) if exps[i])
        j1 = next(j for j in range(n1) if exps[n + j])
        fmat[i2 - n1][j1] = fmat[i2 - n1][j1] + coef
    return s1, s2, fmat
