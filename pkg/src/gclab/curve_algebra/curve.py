"""Hyperelliptic curves y^2 = f(x) and points/divisors on them.

The working objects for the quadratic-differential linear algebra: a genus-g
curve presented by a squarefree f of degree 2g+1 or 2g+2, points on it
(finite generic, finite branch, and the one or two points over x = infinity),
and effective divisors with multiplicities.
"""

from dataclasses import dataclass, field

import numpy as np

from ..errors import CoincidentPoints, ConfigInvalid, RootIsolationFailure

BRANCH_SNAP = 1e-8          # |x - root| below this snaps a point to the branch locus
ROOT_SEPARATION = 1e-8      # squarefreeness demand on pairwise root distance


class HyperellipticCurve:
    """y^2 = f(x), deg f in {2g+1, 2g+2}, f squarefree.

    The vector space attached to the curve is the 3(g-1)-dimensional space of
    holomorphic quadratic differentials, in the monomial basis

        x^j dx^2/y^2  (j = 0..2g-2)   and   x^j dx^2/y  (j = 0..g-3).

    Each basis element has zero-divisor degree 4(g-1) on the curve.
    """

    def __init__(self, genus, f_coeffs):
        genus = int(genus)
        if genus < 2:
            raise ConfigInvalid("genus must be >= 2")
        coeffs = np.asarray(f_coeffs, dtype=complex).ravel()
        # strip trailing (numerical) zeros so degree is honest
        while len(coeffs) > 1 and coeffs[-1] == 0:
            coeffs = coeffs[:-1]
        deg = len(coeffs) - 1
        if deg not in (2 * genus + 1, 2 * genus + 2):
            raise ConfigInvalid(
                "deg f = %d incompatible with genus %d (need %d or %d)"
                % (deg, genus, 2 * genus + 1, 2 * genus + 2))
        self.genus = genus
        self.coeffs = coeffs
        self.degree = deg
        self.even_degree = (deg == 2 * genus + 2)
        self._roots = self._isolated_roots()

    # ---- polynomial plumbing -------------------------------------------

    def f(self, x):
        return np.polyval(self.coeffs[::-1], x)

    def f_prime(self, x):
        dc = self.coeffs[1:] * np.arange(1, len(self.coeffs))
        return np.polyval(dc[::-1], x)

    def _isolated_roots(self):
        roots = np.roots(self.coeffs[::-1])
        # polish once with Newton so branch charts see c0 ~ machine zero
        for _ in range(3):
            fp = self.f_prime(roots)
            step = self.f(roots) / np.where(fp == 0, 1.0, fp)
            roots = roots - step
        scale = 1.0 + np.max(np.abs(roots)) if len(roots) else 1.0
        for i in range(len(roots)):
            for j in range(i + 1, len(roots)):
                if abs(roots[i] - roots[j]) <= ROOT_SEPARATION * scale:
                    raise RootIsolationFailure(
                        "f is not squarefree at working precision: roots %s, %s"
                        % (roots[i], roots[j]))
        order = np.lexsort((roots.imag, roots.real))
        return roots[order]

    @property
    def branch_x(self):
        return self._roots

    # ---- basis bookkeeping ---------------------------------------------

    @property
    def n_basis(self):
        return 3 * (self.genus - 1)

    @property
    def basis_labels(self):
        g = self.genus
        labels = ["x^%d dx^2/y^2" % j for j in range(2 * g - 1)]
        labels += ["x^%d dx^2/y" % j for j in range(g - 2)]
        return labels

    def zero_divisor_degree(self):
        return 4 * (self.genus - 1)

    # ---- points ----------------------------------------------------------

    def point(self, x, sheet=+1):
        """Finite point with given x; sheet picks the y = +-sqrt branch.

        x within BRANCH_SNAP of a root of f snaps to the exact branch point.
        """
        x = complex(x)
        scale = 1.0 + np.max(np.abs(self._roots))
        d = np.abs(self._roots - x)
        i = int(np.argmin(d))
        if d[i] <= BRANCH_SNAP * scale:
            return CurvePoint(kind="branch", x=complex(self._roots[i]),
                              sheet=0, y=0.0, curve=self)
        y = complex(sheet) * np.sqrt(complex(self.f(x)))
        return CurvePoint(kind="generic", x=x, sheet=int(sheet), y=y,
                          curve=self)

    def point_at_infinity(self, sheet=+1):
        if self.even_degree:
            return CurvePoint(kind="infinity_even", x=None, sheet=int(sheet),
                              y=None, curve=self)
        return CurvePoint(kind="infinity_odd", x=None, sheet=0, y=None,
                          curve=self)

    def branch_points(self):
        pts = [self.point(x0) for x0 in self._roots]
        if not self.even_degree:
            pts.append(self.point_at_infinity())
        return pts

    def hyperelliptic_involution(self, p):
        """(x, y) -> (x, -y); fixes branch points and permutes the two
        even-degree infinities."""
        if p.kind == "generic":
            return self.point(p.x, -p.sheet)
        if p.kind == "infinity_even":
            return self.point_at_infinity(-p.sheet)
        return p


@dataclass(frozen=True)
class CurvePoint:
    kind: str            # generic | branch | infinity_even | infinity_odd
    x: object            # complex or None at infinity
    sheet: int           # +-1; 0 where the sheets meet
    y: object
    curve: object = field(repr=False, compare=False, default=None)

    @property
    def at_infinity(self):
        return self.x is None

    @property
    def is_branch(self):
        return self.kind in ("branch", "infinity_odd")

    def key(self):
        """Hashable identity used for coincidence checks."""
        if self.at_infinity:
            return (self.kind, self.sheet)
        return (self.kind, complex(self.x), self.sheet)

    def label(self):
        if self.kind == "infinity_odd":
            return "inf"
        if self.kind == "infinity_even":
            return "inf%+d" % self.sheet
        if self.kind == "branch":
            return "branch(%s)" % _cfmt(self.x)
        return "(%s, sheet %+d)" % (_cfmt(self.x), self.sheet)


def _cfmt(z):
    return "%.6g%+.6gj" % (z.real, z.imag)


class Divisor:
    """Effective divisor sum n_j p_j with n_j >= 1 and distinct p_j."""

    def __init__(self, points_with_mults):
        entries = []
        for p, m in points_with_mults:
            m = int(m)
            if m < 1:
                raise ConfigInvalid("divisor multiplicities must be >= 1")
            entries.append((p, m))
        self.entries = entries
        self._check_distinct()

    def _check_distinct(self):
        finite = [abs(p.x) for p, _ in self.entries if not p.at_infinity]
        spread = max(finite) + 1.0 if finite else 1.0
        for i in range(len(self.entries)):
            for j in range(i + 1, len(self.entries)):
                p, q = self.entries[i][0], self.entries[j][0]
                if p.kind != q.kind or p.at_infinity != q.at_infinity:
                    continue
                if p.at_infinity:
                    if p.sheet == q.sheet:
                        raise CoincidentPoints(
                            "duplicate infinity in divisor; merge multiplicities")
                    continue
                same_sheet = (p.sheet == q.sheet) or p.is_branch
                if same_sheet and abs(p.x - q.x) <= 1e-12 * spread:
                    raise CoincidentPoints(
                        "divisor lists the same point twice (%s); "
                        "use a multiplicity instead" % p.label())

    @property
    def degree(self):
        return sum(m for _, m in self.entries)

    def __iter__(self):
        return iter(self.entries)

    def reduced_by(self, index):
        """Divisor with entry `index` removed entirely."""
        rest = [e for k, e in enumerate(self.entries) if k != index]
        d = object.__new__(Divisor)
        d.entries = rest
        return d

    def label(self):
        return " + ".join(("%d*" % m if m > 1 else "") + p.label()
                          for p, m in self.entries) or "0"
