"""Exact integer-matrix normal forms and lattice computations.

Matrices are lists of rows of Python ints (arbitrary precision).  Subgroups
of a coordinate module Z^n / (torsion moduli) are represented by generator
columns; the canonical form is a column-style Hermite normal form that always
includes the torsion generators m_i * e_i.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction


def identity(n):
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def transpose(a):
    return [list(col) for col in zip(*a)] if a else []


def mat_mul(a, b):
    if not a or not b:
        return []
    bt = transpose(b)
    return [[sum(x * y for x, y in zip(row, col)) for col in bt] for row in a]


def mat_vec(a, v):
    return [sum(x * y for x, y in zip(row, v)) for row in a]


def det(a):
    """Determinant by fraction-free Gaussian elimination (Bareiss)."""
    n = len(a)
    if n == 0:
        return 1
    m = [row[:] for row in a]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for i in range(k + 1, n):
                if m[i][k] != 0:
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


def row_hnf(a, with_transform=False):
    """Row-style Hermite normal form.

    Returns H (same shape, zero rows trimmed) with pivots positive, entries
    above each pivot reduced into [0, pivot).  With ``with_transform`` also
    returns unimodular U with U*a = H (H untrimmed in that product sense).
    """
    h = [row[:] for row in a]
    rows = len(h)
    cols = len(h[0]) if rows else 0
    u = identity(rows)
    r = 0
    for c in range(cols):
        # find a pivot row at or below r with nonzero entry in column c
        piv = None
        for i in range(r, rows):
            if h[i][c] != 0:
                piv = i
                break
        if piv is None:
            continue
        h[r], h[piv] = h[piv], h[r]
        u[r], u[piv] = u[piv], u[r]
        # euclidean elimination below
        while True:
            nz = [i for i in range(r + 1, rows) if h[i][c] != 0]
            if not nz:
                break
            # pick smallest nonzero |entry| among r..rows as pivot
            best = min([r] + nz, key=lambda i: abs(h[i][c]))
            if best != r:
                h[r], h[best] = h[best], h[r]
                u[r], u[best] = u[best], u[r]
            for i in range(r + 1, rows):
                if h[i][c] != 0:
                    q = h[i][c] // h[r][c]
                    h[i] = [x - q * y for x, y in zip(h[i], h[r])]
                    u[i] = [x - q * y for x, y in zip(u[i], u[r])]
        if h[r][c] < 0:
            h[r] = [-x for x in h[r]]
            u[r] = [-x for x in u[r]]
        # reduce entries above the pivot
        for i in range(r):
            q = h[i][c] // h[r][c]
            if q:
                h[i] = [x - q * y for x, y in zip(h[i], h[r])]
                u[i] = [x - q * y for x, y in zip(u[i], u[r])]
        r += 1
        if r == rows:
            break
    if with_transform:
        return h, u
    return [row for row in h if any(row)]


def col_hnf(a, with_transform=False):
    """Column-style HNF: echelon columns, positive pivots; a*V = H."""
    if not a:
        return ([], []) if with_transform else []
    at = transpose(a)
    if with_transform:
        h, u = row_hnf(at, with_transform=True)
        return transpose(h), transpose(u)
    return transpose(row_hnf(at))


def kernel_int(a):
    """Saturated basis (list of columns) of {x in Z^c : a*x = 0}."""
    if not a:
        return []
    cols = len(a[0])
    if cols == 0:
        return []
    h, v = col_hnf(a, with_transform=True)
    vt = transpose(v)  # columns of v
    ht = transpose(h)
    return [vt[j] for j in range(cols) if not any(ht[j])]


def snf(a):
    """Smith normal form: U*a*V = D with D diagonal, d1 | d2 | ..., U,V unimodular."""
    m = [row[:] for row in a]
    rows = len(m)
    cols = len(m[0]) if rows else 0
    u = identity(rows)
    v = identity(cols)

    def swap_rows(i, j):
        m[i], m[j] = m[j], m[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        for row in m:
            row[i], row[j] = row[j], row[i]
        for row in v:
            row[i], row[j] = row[j], row[i]

    def addmul_row(i, j, q):  # row_i -= q*row_j
        m[i] = [x - q * y for x, y in zip(m[i], m[j])]
        u[i] = [x - q * y for x, y in zip(u[i], u[j])]

    def addmul_col(i, j, q):  # col_i -= q*col_j
        for row in m:
            row[i] -= q * row[j]
        for row in v:
            row[i] -= q * row[j]

    t = 0
    while t < min(rows, cols):
        # find smallest nonzero entry in the trailing block
        best = None
        for i in range(t, rows):
            for j in range(t, cols):
                if m[i][j] != 0 and (best is None or abs(m[i][j]) < abs(m[best[0]][best[1]])):
                    best = (i, j)
        if best is None:
            break
        swap_rows(t, best[0])
        swap_cols(t, best[1])
        again = False
        for i in range(t + 1, rows):
            if m[i][t] != 0:
                addmul_row(i, t, m[i][t] // m[t][t])
                if m[i][t] != 0:
                    again = True
        for j in range(t + 1, cols):
            if m[t][j] != 0:
                addmul_col(j, t, m[t][j] // m[t][t])
                if m[t][j] != 0:
                    again = True
        if again:
            continue
        # divisibility fix-up: m[t][t] must divide the rest of the block
        bad = None
        for i in range(t + 1, rows):
            for j in range(t + 1, cols):
                if m[i][j] % m[t][t] != 0:
                    bad = i
                    break
            if bad is not None:
                break
        if bad is not None:
            addmul_row(t, bad, -1)
            continue
        if m[t][t] < 0:
            m[t] = [-x for x in m[t]]
            u[t] = [-x for x in u[t]]
        t += 1
    return u, m, v


def solve_int(a, b):
    """One integer solution x of a*x = b, or None."""
    if not a:
        return None
    h, v = col_hnf(a, with_transform=True)
    ht = transpose(h) if h else []
    ncols = len(v[0]) if v else 0
    y = [0] * ncols
    r = [x for x in b]
    # columns of h are echelon: match pivots top-down
    for j in range(len(ht)):
        col = ht[j]
        piv = next((i for i, x in enumerate(col) if x != 0), None)
        if piv is None:
            continue
        if r[piv] % col[piv] != 0:
            return None
        q = r[piv] // col[piv]
        y[j] = q
        r = [x - q * c for x, c in zip(r, col)]
    if any(r):
        return None
    return mat_vec(v, y)


def solve_rational(cols, v):
    """Coefficients expressing v as a Q-combination of the given columns, or None.

    ``cols`` must be Q-linearly independent (e.g. nonzero HNF columns)."""
    if not cols:
        return None if any(v) else []
    n = len(cols[0])
    aug = [[Fraction(cols[j][i]) for j in range(len(cols))] + [Fraction(v[i])] for i in range(n)]
    ncol = len(cols)
    r = 0
    pivots = []
    for c in range(ncol):
        piv = next((i for i in range(r, n) if aug[i][c] != 0), None)
        if piv is None:
            return None  # dependent columns; caller passes independent sets
        aug[r], aug[piv] = aug[piv], aug[r]
        pv = aug[r][c]
        aug[r] = [x / pv for x in aug[r]]
        for i in range(n):
            if i != r and aug[i][c] != 0:
                f = aug[i][c]
                aug[i] = [x - f * y for x, y in zip(aug[i], aug[r])]
        pivots.append(r)
        r += 1
    sol = [aug[pivots[c]][ncol] for c in range(ncol)]
    for i in range(n):
        if i not in pivots and aug[i][ncol] != 0:
            return None
    return sol


def reduce_mod_columns(hcols, v):
    """Canonical representative of v modulo the column span of an HNF basis."""
    r = list(v)
    for col in hcols:
        piv = next((i for i, x in enumerate(col) if x != 0), None)
        if piv is None:
            continue
        q = r[piv] // col[piv]
        if q:
            r = [x - q * c for x, c in zip(r, col)]
    return r


def member(hcols, v):
    return not any(reduce_mod_columns(hcols, v))


@dataclass(frozen=True)
class QuotientStructure:
    """ambient/sub as Z^free_rank x prod Z/d_i, with coordinate map y = coords*x."""

    free_rank: int
    factors: tuple  # invariant factors > 1
    coords: tuple  # rows of the full unimodular coordinate map U
    moduli: tuple  # modulus per U-coordinate (1 entries mean the coord dies)


@dataclass(frozen=True)
class SubgroupLattice:
    """Subgroup of Z^n / (moduli) given by generator columns, canonical via HNF.

    ``moduli[i] == 0`` marks a free coordinate; ``m > 0`` a Z/m coordinate.
    The HNF basis always contains the torsion generators m_i * e_i, so two
    generating sets of the same subgroup yield identical bases.
    """

    moduli: tuple
    gens: tuple  # tuple of generator columns (tuples of ints)
    hnf_basis: tuple = field(init=False, compare=False)

    def __post_init__(self):
        n = len(self.moduli)
        cols = [list(c) for c in self.gens]
        for c in cols:
            if len(c) != n:
                raise ValueError("generator length does not match ambient rank")
        for i, m in enumerate(self.moduli):
            if m:
                cols.append([m if j == i else 0 for j in range(n)])
        if cols:
            mat = transpose(cols)
            h = col_hnf(mat)
            basis = tuple(tuple(c) for c in transpose(h) if any(c))
        else:
            basis = ()
        object.__setattr__(self, "hnf_basis", basis)

    @property
    def n(self):
        return len(self.moduli)

    def contains(self, v):
        v = [x for x in v]
        return member(self.hnf_basis, v)

    def reduce(self, v):
        return reduce_mod_columns(self.hnf_basis, list(v))

    def key(self):
        return (self.moduli, self.hnf_basis)

    def same_subgroup(self, other):
        return self.key() == other.key()

    def free_indices(self):
        return [i for i, m in enumerate(self.moduli) if m == 0]

    def index(self):
        """[ambient : self] as an int, or math.inf."""
        q = self.quotient_structure()
        if q.free_rank:
            return math.inf
        return math.prod(q.factors)

    def quotient_structure(self):
        """Invariant factors and free rank of ambient/self."""
        n = self.n
        mat = transpose([list(c) for c in self.hnf_basis]) if self.hnf_basis else [[0] * 0 for _ in range(n)]
        if not self.hnf_basis:
            mat = [[0] for _ in range(n)]
        u, d, _ = snf(mat)
        diag = []
        for i in range(n):
            di = d[i][i] if i < len(d) and i < len(d[0]) else 0
            diag.append(abs(di))
        factors = tuple(x for x in diag if x > 1)
        free_rank = sum(1 for x in diag if x == 0)
        return QuotientStructure(
            free_rank=free_rank,
            factors=factors,
            coords=tuple(tuple(r) for r in u),
            moduli=tuple(diag),
        )

    def subgroup_structure(self):
        """Invariant factors and free rank of the subgroup itself.

        Generators are the HNF basis columns; relations express the ambient
        torsion lattice in terms of them."""
        basis = [list(c) for c in self.hnf_basis]
        if not basis:
            return QuotientStructure(free_rank=0, factors=(), coords=(), moduli=())
        k = len(basis)
        rel_cols = []
        for i, m in enumerate(self.moduli):
            if m:
                target = [m if j == i else 0 for j in range(self.n)]
                sol = solve_rational(basis, target)
                # torsion generators are inside the basis span by construction
                rel_cols.append([int(x) for x in sol])
        if rel_cols:
            mat = transpose(rel_cols)
        else:
            mat = [[0] for _ in range(k)]
        u, d, _ = snf(mat)
        diag = []
        for i in range(k):
            di = d[i][i] if i < len(d) and (d and i < len(d[0])) else 0
            diag.append(abs(di))
        factors = tuple(x for x in diag if x > 1)
        free_rank = sum(1 for x in diag if x == 0)
        return QuotientStructure(
            free_rank=free_rank,
            factors=factors,
            coords=tuple(tuple(r) for r in u),
            moduli=tuple(diag),
        )

    def is_finite(self):
        return self.subgroup_structure().free_rank == 0

    def is_trivial(self):
        zero = SubgroupLattice(self.moduli, ())
        return self.hnf_basis == zero.hnf_basis


def rank_int(a):
    if not a or not a[0]:
        return 0
    return len(row_hnf(a))


def full_lattice(moduli):
    n = len(moduli)
    return SubgroupLattice(tuple(moduli), tuple(tuple(1 if i == j else 0 for i in range(n)) for j in range(n)))


def zero_lattice(moduli):
    return SubgroupLattice(tuple(moduli), ())


def clear_denominators(row):
    d = 1
    for x in row:
        d = d * Fraction(x).denominator // math.gcd(d, Fraction(x).denominator)
    return [int(Fraction(x) * d) for x in row], d


def solve_mixed_system(moduli, equalities, congruences):
    """Integer points with row.x = 0 for equalities and row.x = 0 (mod m) per congruence.

    Rows may have Fraction entries; the result is a SubgroupLattice over the
    given ambient moduli.  Equality rows must not touch torsion coordinates
    (the condition would not be well defined on the quotient)."""
    n = len(moduli)
    eq_rows = []
    for row in equalities:
        r, _ = clear_denominators(row)
        if not any(r):
            continue
        for i, m in enumerate(moduli):
            if m and r[i] != 0:
                raise ValueError("equality row is not well defined modulo ambient torsion")
        eq_rows.append(r)
    if eq_rows:
        kern = kernel_int(eq_rows)
    else:
        kern = [ [1 if i == j else 0 for i in range(n)] for j in range(n)]
    # torsion generators must satisfy the equalities; they do whenever the rows
    # are well defined (coefficient divisible by the modulus => m*e_i maps to 0
    # only if coefficient*m == 0; enforce by intersecting instead of assuming)
    k = len(kern)
    cong_rows = []
    mods = []
    for row, m in congruences:
        if m <= 0:
            raise ValueError("congruence modulus must be positive")
        r, d = clear_denominators(row)
        for i, mi in enumerate(moduli):
            if mi and (r[i] * mi) % (m * d) != 0:
                raise ValueError("congruence row is not well defined modulo ambient torsion")
        cong_rows.append(r)
        mods.append(m * d)
    if not kern:
        return zero_lattice(tuple(moduli))
    if cong_rows:
        # rows in kernel coordinates
        ck = [[sum(r[i] * kern[j][i] for i in range(n)) for j in range(k)] for r in cong_rows]
        aug = [row[:] + [mods[i] if i == t else 0 for t in range(len(cong_rows))]
               for i, row in enumerate(ck)]
        # x solves ck*y ≡ 0 iff (y, z) in kernel of [ck | diag(mods)]
        full = kernel_int(aug)
        ys = [col[:k] for col in full]
    else:
        ys = [[1 if i == j else 0 for i in range(k)] for j in range(k)]
    gens = []
    for y in ys:
        g = [sum(kern[j][i] * y[j] for j in range(k)) for i in range(n)]
        if any(g):
            gens.append(tuple(g))
    return SubgroupLattice(tuple(moduli), tuple(gens))


def denominator_in_lattice(hcols, v):
    """Minimal m >= 1 with m*v in the column span, or None if v is outside the Q-span."""
    cols = [list(c) for c in hcols]
    # scale v to integers first
    d = 1
    for x in v:
        d = d * Fraction(x).denominator // math.gcd(d, Fraction(x).denominator)
    vi = [int(Fraction(x) * d) for x in v]
    if not any(vi):
        return 1
    sol = solve_rational(cols, vi) if cols else None
    if sol is None:
        return None
    m = 1
    for c in sol:
        m = m * c.denominator // math.gcd(m, c.denominator)
    # m*vi in lattice; v = vi/d, so need minimal t with t*vi/d in lattice:
    # t*vi/d in L  <=>  (t/d)*sol integral  <=> d*m | t*m ... compute directly
    # minimal t such that (t/d)*c integral for all c: t = lcm over c of d*den(c)/gcd stuff
    t = 1
    for c in sol:
        cc = c / d
        t = t * cc.denominator // math.gcd(t, cc.denominator)
    return t
