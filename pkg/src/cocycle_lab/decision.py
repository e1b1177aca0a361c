"""Verdict engine for Z-stability of twisted group C*-algebras.

The central notion is non-rationality of the 2-cocycle: every iterated
quotient by twisted centers must have infinite index over its twisted center.
For finitely generated nilpotent groups this is equivalent to Z-stability,
pureness and nowhere-scatteredness of the reduced twisted group C*-algebra,
so a single flag drives all three.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from . import groups, zlinalg as zl
from .cocycles import (BudgetExceeded, Cocycle, CocycleError, induce_gamma,
                       phase_is_integral, phi_map, phi_surjective,
                       product_split, push_to_quotient, restrict_to_lattice,
                       twisted_center, validate_cocycle)
from .exact import INTEGER, empty_context
from .poly import Poly

ZSTABLE = "ZStable"
NOT_ZSTABLE = "NotZStable"
UNDECIDED = "Undecided"

SIMPLE_YES = "yes"
SIMPLE_NO = "no"
SIMPLE_UNKNOWN = "not-determined"

DEFAULT_CASE_BUDGET = 256

KLEPPNER_CONVENTION = (
    "FC(G,sigma) computed as {g in FC(G) : antisymmetrized phase of (g, h) "
    "integral for all h in the centralizer of g}; evaluated here only when "
    "FC(G) equals the center, where the centralizer is all of G")


@dataclass(frozen=True)
class Branch:
    label: str
    assumptions: tuple
    lattice: object  # SubgroupLattice or None
    index: object  # int | math.inf | None
    verdict: str
    child: object = None  # TraceNode | None
    notes: tuple = ()

    def to_dict(self):
        return {
            "label": self.label,
            "assumptions": list(self.assumptions),
            "lattice": [list(c) for c in self.lattice.hnf_basis] if self.lattice else None,
            "index": ("infinite" if self.index is math.inf else self.index),
            "verdict": self.verdict,
            "notes": list(self.notes),
            "child": self.child.to_dict() if self.child else None,
        }


@dataclass(frozen=True)
class TraceNode:
    level: int
    group: object
    branches: tuple
    verdict: str
    notes: tuple = ()

    def to_dict(self):
        return {
            "level": self.level,
            "group": {"moduli": list(self.group.moduli), "names": list(self.group.names)},
            "verdict": self.verdict,
            "notes": list(self.notes),
            "branches": [b.to_dict() for b in self.branches],
        }


@dataclass(frozen=True)
class Verdict:
    z_stable: str  # ZSTABLE | NOT_ZSTABLE | UNDECIDED
    simple: str = SIMPLE_UNKNOWN
    certificate: TraceNode = None
    notes: tuple = ()

    @property
    def nowhere_scattered(self):
        return self.z_stable

    @property
    def pure(self):
        return self.z_stable

    def to_dict(self):
        return {
            "z_stable": self.z_stable,
            "nowhere_scattered": self.nowhere_scattered,
            "pure": self.pure,
            "simple": self.simple,
            "notes": list(self.notes),
            "trace": self.certificate.to_dict() if self.certificate else None,
        }


def _combine(branch_verdicts):
    """A node is ZStable iff every branch is; a single rational branch sinks it."""
    if any(v == NOT_ZSTABLE for v in branch_verdicts):
        return NOT_ZSTABLE
    if any(v == UNDECIDED for v in branch_verdicts):
        return UNDECIDED
    return ZSTABLE


def _leaf_label(leaf):
    parts = list(leaf.ctx.assumptions)
    return "; ".join(parts) if parts else "unconditional"


# ---------------------------------------------------------------------------
# the general recursion


def decide(c, ctx=None, case_budget=DEFAULT_CASE_BUDGET):
    """Non-rationality verdict by the recursive quotient-by-twisted-center
    decomposition; the certificate tree records every case leaf.

    When the recursion leaves cases unresolved (a quotient outside the
    supported constructions, or the case budget), the single-quotient
    criterion for 2-step groups is tried as a fallback before giving up."""
    ctx = ctx or empty_context(c.table)
    viol = validate_cocycle(c)
    if viol:
        raise CocycleError(f"input is not a 2-cocycle: {viol}")
    node = _decide_node(c, ctx, 0, case_budget)
    if node.verdict != UNDECIDED:
        return Verdict(z_stable=node.verdict, certificate=node)
    try:
        out = decide_two_step(c, None, ctx, case_budget)
    except (CocycleError, ValueError, BudgetExceeded):
        out = None
    if isinstance(out, Verdict) and out.z_stable != UNDECIDED:
        cert = TraceNode(out.certificate.level, out.certificate.group,
                         out.certificate.branches, out.certificate.verdict,
                         out.certificate.notes +
                         ("generic recursion left cases unresolved; verdict "
                          "from the single-quotient criterion",))
        return Verdict(z_stable=out.z_stable, certificate=cert)
    return Verdict(z_stable=UNDECIDED, certificate=node)


def _decide_node(c, ctx, level, case_budget):
    g = c.group
    if g.is_finite():
        return TraceNode(level, g, (), NOT_ZSTABLE,
                         ("group is finite: index over the twisted center is finite",))
    try:
        leaves = twisted_center(c, ctx, case_budget)
    except BudgetExceeded as e:
        return TraceNode(level, g, (), UNDECIDED, (f"undecided: {e}",))
    except CocycleError as e:
        return TraceNode(level, g, (), UNDECIDED, (f"undecided: {e}",))
    branches = []
    for leaf in leaves:
        idx = leaf.lattice.index()
        notes = leaf.conditions + leaf.skipped
        if idx is not math.inf:
            branches.append(Branch(_leaf_label(leaf), leaf.ctx.assumptions,
                                   leaf.lattice, idx, NOT_ZSTABLE, notes=notes +
                                   ("rational point: the twisted center has finite index",)))
            continue
        if leaf.lattice.is_finite():
            branches.append(Branch(_leaf_label(leaf), leaf.ctx.assumptions,
                                   leaf.lattice, idx, ZSTABLE, notes=notes +
                                   ("twisted center finite while the group is infinite",)))
            continue
        try:
            qd = groups.quotient_by_central(g, leaf.lattice)
            w = push_to_quotient(c, qd)
            wg = induce_gamma(w, qd, prefix=f"gamma{level + 1}_")
            child = _decide_node(wg, leaf.ctx, level + 1, case_budget)
            branches.append(Branch(_leaf_label(leaf), leaf.ctx.assumptions,
                                   leaf.lattice, idx, child.verdict, child=child,
                                   notes=notes))
        except (CocycleError, ValueError) as e:
            branches.append(Branch(_leaf_label(leaf), leaf.ctx.assumptions,
                                   leaf.lattice, idx, UNDECIDED,
                                   notes=notes + (f"undecided: {e}",)))
    return TraceNode(level, g, tuple(branches), _combine([b.verdict for b in branches]))


# ---------------------------------------------------------------------------
# abelian groups and non-commutative tori


def decide_abelian(c, ctx=None, case_budget=DEFAULT_CASE_BUDGET):
    """Single-level rule for abelian groups: Z-stable iff the twisted center
    has infinite index in every case leaf."""
    if not c.group.is_abelian():
        raise ValueError("decide_abelian requires an abelian presentation")
    ctx = ctx or empty_context(c.table)
    viol = validate_cocycle(c)
    if viol:
        raise CocycleError(f"input is not a 2-cocycle: {viol}")
    leaves = twisted_center(c, ctx, case_budget)
    branches = []
    for leaf in leaves:
        idx = leaf.lattice.index()
        v = ZSTABLE if idx is math.inf else NOT_ZSTABLE
        branches.append(Branch(_leaf_label(leaf), leaf.ctx.assumptions,
                               leaf.lattice, idx, v,
                               notes=leaf.conditions + leaf.skipped))
    node = TraceNode(0, c.group, tuple(branches),
                     _combine([b.verdict for b in branches]))
    return Verdict(z_stable=node.verdict, certificate=node)


def decide_torus(theta, table, ctx=None, case_budget=DEFAULT_CASE_BUDGET):
    """Non-commutative torus verdict from an alternating KNumber matrix:
    builds the phase sum_{i<j} Theta[i][j] g_i h_j on Z^n (whose
    antisymmetrization is exactly Theta) and delegates to the abelian rule."""
    n = len(theta)
    for i in range(n):
        if len(theta[i]) != n:
            raise ValueError("Theta must be square")
        if not theta[i][i].is_zero():
            raise ValueError("Theta must be alternating (nonzero diagonal)")
        for j in range(n):
            if not (theta[i][j] + theta[j][i]).is_zero():
                raise ValueError("Theta must be alternating")
    g = groups.abelian((0,) * n)
    terms = []
    for i in range(n):
        for j in range(i + 1, n):
            if theta[i][j].is_zero():
                continue
            e = [0] * (2 * n)
            e[i] = 1
            e[n + j] = 1
            terms.append((tuple(e), theta[i][j]))
    c = Cocycle(g, table, Poly.make(2 * n, table, terms))
    return decide_abelian(c, ctx, case_budget)


# ---------------------------------------------------------------------------
# 2-step shortcut and generalized Heisenberg groups


def commutator_subgroup(g):
    gens = []
    for i in range(g.n):
        for j in range(i + 1, g.n):
            vec = tuple(g.b(k, i, j) - g.b(k, j, i) for k in range(g.n))
            if any(vec):
                gens.append(vec)
    return zl.SubgroupLattice(g.moduli, tuple(gens))


@dataclass(frozen=True)
class Inapplicable:
    reason: str


def decide_two_step(c, d_in_quotient=None, ctx=None, case_budget=DEFAULT_CASE_BUDGET):
    """Single-quotient criterion for 2-step groups.

    Requires a central subgroup D of G/Z(G,sigma) inside the image of the
    center with (i) the commutator subgroup of the quotient contained in D,
    (ii) the pushed-down cocycle trivial on D x D, (iii) the pairing
    phi_D surjective.  Then Z-stability holds iff [M : Z(M, Res omega_gamma)]
    is infinite for all gamma, with M = ker(phi_D).

    Returns a Verdict, or Inapplicable when a hypothesis fails.
    """
    ctx = ctx or empty_context(c.table)
    viol = validate_cocycle(c)
    if viol:
        raise CocycleError(f"input is not a 2-cocycle: {viol}")
    leaves = twisted_center(c, ctx, case_budget)
    branches = []
    for leaf in leaves:
        out = _two_step_leaf(c, leaf, d_in_quotient, case_budget)
        if isinstance(out, Inapplicable):
            return out
        branches.append(out)
    node = TraceNode(0, c.group, tuple(branches),
                     _combine([b.verdict for b in branches]))
    return Verdict(z_stable=node.verdict, certificate=node)


def _two_step_leaf(c, leaf, d_in_quotient, case_budget):
    g = c.group
    if g.is_finite() or leaf.lattice.index() is not math.inf:
        return Branch(_leaf_label(leaf), leaf.ctx.assumptions, leaf.lattice,
                      leaf.lattice.index(), NOT_ZSTABLE,
                      notes=leaf.conditions +
                      ("twisted center has finite index; every M is finite",))
    try:
        qd = groups.quotient_by_central(g, leaf.lattice)
        w = push_to_quotient(c, qd)
    except (CocycleError, ValueError) as e:
        return Inapplicable(f"quotient construction failed: {e}")
    quo = qd.group
    if d_in_quotient is None:
        cols = [tuple(qd.projection.apply_raw(list(col)))
                for col in g.center().hnf_basis]
        dlat = zl.SubgroupLattice(quo.moduli, tuple(cols))
    else:
        dlat = d_in_quotient
    # (i) commutator subgroup of the quotient sits inside D
    comm = commutator_subgroup(quo)
    for col in comm.hnf_basis:
        if not dlat.contains(list(col)):
            return Inapplicable("hypothesis (i) fails: commutator subgroup of the "
                                "quotient is not contained in D")
    # D central in the quotient
    center_q = quo.center()
    for col in dlat.gens:
        if not center_q.contains(list(col)):
            return Inapplicable("D is not central in the quotient")
    # (ii) the pushed-down cocycle is trivial on D x D
    try:
        rw, _, _, _ = restrict_to_lattice(w, dlat)
    except CocycleError as e:
        return Inapplicable(f"hypothesis (ii) not checkable: {e}")
    if not phase_is_integral(rw.phase, w.table):
        return Inapplicable("hypothesis (ii) fails: the cocycle is not trivial on D x D")
    # (iii) surjectivity of the pairing
    try:
        mleaves, rows, zmods = phi_map(w, dlat, leaf.ctx, case_budget)
    except (CocycleError, BudgetExceeded) as e:
        return Inapplicable(f"pairing computation failed: {e}")
    surj, reason = phi_surjective(rows, zmods, quo, leaf.ctx)
    if surj is not True:
        return Inapplicable(f"hypothesis (iii) fails or is undetermined: {reason}")
    # the index condition over all gamma, on M = ker(phi_D)
    wg = induce_gamma(w, qd, prefix="gammaM_")
    subbranches = []
    for mleaf in mleaves:
        try:
            rm, _, _, _ = restrict_to_lattice(wg, mleaf.lattice)
            inner = twisted_center(rm, mleaf.ctx, case_budget)
        except (CocycleError, BudgetExceeded) as e:
            subbranches.append(Branch("M-leaf", mleaf.ctx.assumptions, mleaf.lattice,
                                      None, UNDECIDED, notes=(f"undecided: {e}",)))
            continue
        for il in inner:
            idx = il.lattice.index()
            v = ZSTABLE if idx is math.inf else NOT_ZSTABLE
            subbranches.append(Branch(_leaf_label(il), il.ctx.assumptions,
                                      il.lattice, idx, v,
                                      notes=il.conditions + il.skipped))
    child = TraceNode(1, quo, tuple(subbranches),
                      _combine([b.verdict for b in subbranches]),
                      notes=("M = ker(phi_D); condition: [M : Z(M, Res omega_gamma)] "
                             "infinite for all gamma",))
    return Branch(_leaf_label(leaf), leaf.ctx.assumptions, leaf.lattice,
                  math.inf, child.verdict, child=child, notes=leaf.conditions)


def decide_heisenberg(c, ctx=None, case_budget=DEFAULT_CASE_BUDGET):
    """Generalized Heisenberg shortcut: D = Z(H)/Z(H,sigma)."""
    g = c.group
    recv = g.receiving_coords()
    if len(recv) > 1:
        raise ValueError("decide_heisenberg expects a Heisenberg-shaped presentation "
                         "(a single receiving coordinate)")
    out = decide_two_step(c, None, ctx, case_budget)
    if isinstance(out, Inapplicable):
        raise CocycleError(f"Heisenberg criterion inapplicable: {out.reason}")
    return out


# ---------------------------------------------------------------------------
# products


@dataclass(frozen=True)
class ProductRuleOutcome:
    applicable: bool
    verdict: str = UNDECIDED
    reason: str = ""


def decide_product(c, n1, ctx=None, case_budget=DEFAULT_CASE_BUDGET):
    """One-sided product rules for cocycles on products of abelian groups.

    Forward rule: if f(., g2) is trivial whenever (g1, g2) lies in the twisted
    center of the product, then Z-stability of the first factor forces
    Z-stability of the product.  Converse rule: if f is trivial against
    Z(G1, sigma1) x Z(G2, sigma2) in both slots, a product that is Z-stable
    must have a Z-stable factor (contrapositive: two rational factors sink the
    product).  Anything else: inapplicable.
    """
    ctx = ctx or empty_context(c.table)
    g = c.group
    if not g.is_abelian():
        return ProductRuleOutcome(False, reason="product rules cover abelian factors only")
    split = product_split(c, n1)
    if split is None:
        return ProductRuleOutcome(False, reason="cocycle is not in product form")
    s1, s2, fmat = split
    n2 = g.n - n1

    def f_trivial_against(vec2, cctx):
        # f(h1, g2) with g2 = vec2, for every generator h1
        for j1 in range(n1):
            val = sum((fmat[i2][j1] * vec2[i2] for i2 in range(n2)),
                      fmat[0][j1].scale(0))
            if cctx.classify(val).kind != INTEGER:
                return False
        return True

    def f_trivial_first_slot(vec1, cctx):
        for i2 in range(n2):
            val = sum((fmat[i2][j1] * vec1[j1] for j1 in range(n1)),
                      fmat[i2][0].scale(0))
            if cctx.classify(val).kind != INTEGER:
                return False
        return True

    # forward rule
    forward_ok = True
    for leaf in twisted_center(c, ctx, case_budget):
        for col in leaf.lattice.hnf_basis:
            if not f_trivial_against([col[n1 + i] for i in range(n2)], leaf.ctx):
                forward_ok = False
                break
        if not forward_ok:
            break
    v1 = decide_abelian(s1, ctx, case_budget)
    if forward_ok and v1.z_stable == ZSTABLE:
        return ProductRuleOutcome(True, ZSTABLE,
                                  "first factor Z-stable and f vanishes against the "
                                  "twisted center of the product")
    # converse rule (contrapositive)
    v2 = decide_abelian(s2, ctx, case_budget)
    converse_ok = True
    for leaf in twisted_center(s1, ctx, case_budget):
        for col in leaf.lattice.hnf_basis:
            if not f_trivial_first_slot(list(col), leaf.ctx):
                converse_ok = False
    for leaf in twisted_center(s2, ctx, case_budget):
        for col in leaf.lattice.hnf_basis:
            if not f_trivial_against(list(col), leaf.ctx):
                converse_ok = False
    if converse_ok and v1.z_stable == NOT_ZSTABLE and v2.z_stable == NOT_ZSTABLE:
        return ProductRuleOutcome(True, NOT_ZSTABLE,
                                  "both factors rational and f vanishes against "
                                  "Z(G1,sigma1) x Z(G2,sigma2)")
    return ProductRuleOutcome(False, reason="product-rule hypotheses not satisfied")


# ---------------------------------------------------------------------------
# simplicity


def decide_simplicity(c, ctx=None, case_budget=DEFAULT_CASE_BUDGET):
    """Kleppner-style tri-state simplicity verdict.

    Supported exactly when FC(G) equals the center: then the twisted FC-group
    is the twisted center, and simplicity holds iff it is trivial in a leaf.
    Returns (verdict, branches, notes)."""
    ctx = ctx or empty_context(c.table)
    g = c.group
    notes = [KLEPPNER_CONVENTION]
    fc = g.fc_center()
    if not fc.same_subgroup(g.center()):
        notes.append("FC(G) is strictly larger than the center; the convention "
                     "above is not evaluated on non-central elements")
        return SIMPLE_UNKNOWN, (), tuple(notes)
    leaves = twisted_center(c, ctx, case_budget)
    branches = []
    for leaf in leaves:
        v = SIMPLE_YES if leaf.lattice.is_trivial() else SIMPLE_NO
        branches.append(Branch(_leaf_label(leaf), leaf.ctx.assumptions,
                               leaf.lattice, leaf.lattice.index(), v,
                               notes=leaf.conditions + leaf.skipped))
    verdicts = {b.verdict for b in branches}
    overall = verdicts.pop() if len(verdicts) == 1 else SIMPLE_UNKNOWN
    if overall == SIMPLE_UNKNOWN and branches:
        notes.append("simplicity depends on the rationality case; see branches")
    return overall, tuple(branches), tuple(notes)
