"""Frame and Riesz-sequence existence verdicts for coherent systems over
lattices in nilpotent Lie groups, plus the multiwindow bound recursion.

The sufficiency directions require the non-rationality flag produced by the
decision module; the necessity directions are only known for homogeneous
groups and are gated behind an explicit flag.  All density comparisons use
exact rational interval certificates.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from . import groups
from .cocycles import Cocycle, phase_from_monomials
from .exact import SymbolTable, empty_context, symbol

YES = "yes"
NO_BY_NECESSITY = "no-by-necessity"
UNDECIDED_TF = "undecided"


@dataclass(frozen=True)
class DensityDatum:
    """Certified value of d_pi * covol(Gamma): an exact rational interval
    [lower, upper] containing the real number, optionally labelled by a
    symbolic expression for reports."""
    lower: Fraction
    upper: Fraction
    symbolic: str = ""

    def __post_init__(self):
        lo, up = Fraction(self.lower), Fraction(self.upper)
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", up)
        if lo > up:
            raise ValueError("density interval has lower > upper")

    def versus_one(self):
        """-1, 0, or +1 when the certificate decides the comparison with 1;
        raises when the interval straddles 1 indecisively."""
        if self.upper < 1:
            return -1
        if self.lower > 1:
            return 1
        if self.lower == self.upper == 1:
            return 0
        raise ValueError(
            f"density interval [{self.lower}, {self.upper}] does not decide the "
            "comparison with 1; supply a tighter certificate")


@dataclass(frozen=True)
class FrameVerdict:
    frame_exists_smooth: str  # yes | no-by-necessity | undecided
    riesz_exists_smooth: str
    rationale: tuple

    def to_dict(self):
        return {
            "frame_exists_smooth": self.frame_exists_smooth,
            "riesz_exists_smooth": self.riesz_exists_smooth,
            "rationale": list(self.rationale),
        }


def frame_verdict(nonrational, density, homogeneous=False):
    """Existence of smooth coherent frames / Riesz sequences at the certified
    density.  Sufficiency needs a non-rational cocycle and a strict inequality;
    the converse 'no' directions apply to homogeneous groups only."""
    side = density.versus_one()
    rationale = []
    if side == 0:
        return FrameVerdict(UNDECIDED_TF, UNDECIDED_TF,
                            ("density value equals 1: neither inequality is strict",))
    if side < 0:
        if nonrational:
            frame = YES
            rationale.append("nonrational cocycle and density < 1: "
                             "a smooth frame exists")
        else:
            frame = UNDECIDED_TF
            rationale.append("density < 1 but the cocycle is not known "
                             "nonrational: sufficiency does not apply")
        if homogeneous:
            riesz = NO_BY_NECESSITY
            rationale.append("homogeneous group with density < 1: a smooth "
                             "Riesz sequence requires density > 1")
        else:
            riesz = UNDECIDED_TF
            rationale.append("necessity of density > 1 for Riesz sequences is "
                             "only known for homogeneous groups")
        return FrameVerdict(frame, riesz, tuple(rationale))
    if nonrational:
        riesz = YES
        rationale.append("nonrational cocycle and density > 1: a smooth "
                         "Riesz sequence exists")
    else:
        riesz = UNDECIDED_TF
        rationale.append("density > 1 but the cocycle is not known "
                         "nonrational: sufficiency does not apply")
    if homogeneous:
        frame = NO_BY_NECESSITY
        rationale.append("homogeneous group with density > 1: a smooth frame "
                         "requires density < 1")
    else:
        frame = UNDECIDED_TF
        rationale.append("necessity of density < 1 for frames is only known "
                         "for homogeneous groups")
    return FrameVerdict(frame, riesz, tuple(rationale))


MULTIWINDOW_CONVENTION = (
    "recursion f(n+1) = 9^n (n+1) (f(n)+1) - 1 applied for all n >= 1 with "
    "f(1) = 1")


@dataclass(frozen=True)
class MultiwindowBound:
    m: int
    windows: int
    statement: str
    notes: tuple = (MULTIWINDOW_CONVENTION,)


def multiwindow_f(n):
    if n < 1:
        raise ValueError("multiwindow recursion needs n >= 1")
    v = 1
    for k in range(1, n):
        v = 9 ** k * (k + 1) * (v + 1) - 1
    return v


def multiwindow_bound(h_h2, h_g):
    """Upper bound m on the number of extra smooth windows: m+1 windows give a
    multiwindow frame at density < 1.  h_h2 is the Hirsch length of the second
    homology of the lattice (user input; for Z^n it is n(n-1)/2) and h_g the
    Hirsch length of the lattice itself."""
    n = h_h2 + h_g
    if h_h2 < 0 or h_g < 0 or n < 1:
        raise ValueError("Hirsch lengths must be nonnegative with positive sum")
    m = multiwindow_f(n)
    return MultiwindowBound(
        m, m + 1,
        f"there exist eta_1, ..., eta_{m + 1} smooth windows forming a "
        f"multiwindow frame (m = f({n}) = {m})")


# ---------------------------------------------------------------------------
# the Z x H3(Z) family


GABOR_COVOL = "alpha * beta^4"


def gabor_family(t1="free", t2="free"):
    """The standard family on Z x H3(Z): coordinates (k1, k2, k3, k4), phase
    -t1 k1 l3 + t2 k4 l2 + t2 k4^2 l3 / 2 with t1 = alpha*beta and
    t2 = beta^3.

    Each parameter status is 'irrational' (declared as an axiomatically
    irrational symbol), 'free' (rationality left open; verdicts split on it),
    or a positive integer a, meaning the parameter is rational with minimal
    denominator a (a*t integral).

    Returns (cocycle, context, covol_note).  The covolume of the concrete
    lattice is alpha * beta^4; verdicts additionally need a user-supplied
    rational interval certificate for d_pi * covol.
    """
    thetas, xis = [], []
    for name, status in (("t1", t1), ("t2", t2)):
        if status == "irrational":
            thetas.append(name)
        elif status == "free":
            xis.append((name, 0))
        elif isinstance(status, int) and status >= 1:
            xis.append((name, status))
        else:
            raise ValueError("parameter status must be 'irrational', 'free', or "
                             "a positive integer denominator")
    g = groups.z_times_h3()
    table = SymbolTable(thetas=tuple(thetas), xis=tuple(xis))
    s1, s2 = symbol(table, "t1"), symbol(table, "t2")
    c = phase_from_monomials(g, table, [
        (-s1, (1, 0, 0, 0), (0, 0, 1, 0)),
        (s2, (0, 0, 0, 1), (0, 1, 0, 0)),
        (s2.scale(Fraction(1, 2)), (0, 0, 0, 2), (0, 0, 1, 0)),
    ])
    return c, empty_context(table), GABOR_COVOL
