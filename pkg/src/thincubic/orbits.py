"""Orbit representatives of pairs of ternary forms over a binary cubic.

Distinguished and Delta-distinguished representatives, the congruence
criteria for an integral Delta-distinguished representative together
with an independent brute-force search, associated binary quartics,
and the real splitting type of a pair.
"""
import logging
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from math import gcd

import numpy as np

from . import realroots as rr
from .errors import DegenerateForm, NotMaximal, NotNormalized, TypeMismatch
from .forms import (ANTIDIAGONAL, BinaryCubicForm, LatticeClass, QFPair,
                    TernaryQuadraticForm, resolvent_coefficients,
                    squarefree_split)
from .local import is_maximal, kappa_inf

log = logging.getLogger(__name__)

__all__ = [
    "BinaryQuarticForm", "RealSplittingType", "DeltaDistReason",
    "DeltaDistResult", "Space", "distinguished_rep", "delta_distinguished_rep",
    "delta_dist_integral_W", "delta_dist_integral_Wvee", "delta_dist_search",
    "delta_dist_criteria", "associated_quartic", "delta_dist_antidiagonal",
    "count_real_roots", "real_soluble_delta_dist", "real_splitting_type",
    "real_orbit_reps", "real_mass", "cubic_real_roots",
]

H = Fraction(1, 2)


class Space(Enum):
    W = "W"
    Wvee = "Wvee"


class RealSplittingType(Enum):
    S1111 = "(1111)"
    S112 = "(112)"
    S22sharp = "(22#)"
    S22plus = "(22+)"
    S22minus = "(22-)"


class DeltaDistReason(Enum):
    GcdFail = "GcdFail"
    CongruenceFail = "CongruenceFail"
    TableFail = "TableFail"
    Found = "Found"
    NotFound = "NotFound"
    SearchFail = "SearchFail"


@dataclass(frozen=True)
class DeltaDistResult:
    exists: bool
    witness: QFPair = None
    reason: DeltaDistReason = DeltaDistReason.Found

    def to_json(self):
        return {"exists": self.exists, "reason": self.reason.value,
                "witness": self.witness.to_json() if self.witness else None}

    @classmethod
    def from_json(cls, obj):
        w = obj.get("witness")
        return cls(obj["exists"], QFPair.from_json(w) if w else None,
                   DeltaDistReason(obj["reason"]))


def _pair(A, B):
    return QFPair(TernaryQuadraticForm(A), TernaryQuadraticForm(B))


def distinguished_rep(f: BinaryCubicForm) -> QFPair:
    """Pair with a11 = b11 = 0 and resolvent f."""
    if f.disc == 0:
        raise DegenerateForm("zero discriminant")
    a, b, c, d = f.coeffs
    return _pair(((0, 0, H), (0, -a, 0), (H, 0, -c)),
                 ((0, H, 0), (H, b, 0), (0, 0, d)))


def delta_distinguished_rep(f: BinaryCubicForm) -> QFPair:
    """Rational pair with resolvent f whose leading 2x2 minors both vanish."""
    a, b, c, d = f.coeffs
    if a == 0 or d == 0:
        raise DegenerateForm("need ad != 0")
    if f.disc == 0:
        raise DegenerateForm("zero discriminant")
    q = Fraction(1, 4 * a * d)
    return _pair(((-a, 0, 0), (0, 0, H), (0, H, b * q)),
                 ((0, 0, H), (0, d, 0), (H, 0, -c * q)))


def _minors_vanish(pair: QFPair) -> bool:
    A, B = pair.A.gram, pair.B.gram
    return (A[0][0] * A[1][1] - A[0][1] ** 2 == 0
            and B[0][0] * B[1][1] - B[0][1] ** 2 == 0)


# integral Delta-distinguished criteria

_MOD4 = {
    (1, 1): {(0, 0): {(1, 1)}, (0, 1): {(1, 3)}, (1, 0): {(3, 1)},
             (1, 1): {(0, 0), (1, 2), (2, 1)}},
    (1, 3): {(0, 0): {(3, 1)}, (0, 1): {(3, 3)}, (1, 0): {(1, 1)},
             (1, 1): {(0, 0), (2, 1), (3, 2)}},
    (3, 3): {(0, 0): {(3, 3)}, (0, 1): {(3, 1)}, (1, 0): {(1, 3)},
             (1, 1): {(0, 0), (2, 3), (3, 2)}},
}

_MOD8 = {
    (1, 2): {(1, 0): {(0, 1), (4, 1)},
             (1, 1): {(0, 0), (2, 1), (2, 4), (4, 4), (6, 0), (6, 1)}},
    (1, 6): {(1, 0): {(0, 1), (4, 1)},
             (1, 1): {(0, 0), (2, 0), (2, 1), (4, 4), (6, 1), (6, 4)}},
    (3, 2): {(1, 0): {(0, 3), (4, 3)},
             (1, 1): {(0, 0), (2, 3), (2, 4), (4, 4), (6, 0), (6, 3)}},
    (3, 6): {(1, 0): {(0, 3), (4, 3)},
             (1, 1): {(0, 0), (2, 0), (2, 3), (4, 4), (6, 3), (6, 4)}},
    (5, 2): {(1, 0): {(0, 5), (4, 5)},
             (1, 1): {(0, 0), (2, 4), (2, 5), (4, 4), (6, 0), (6, 5)}},
    (5, 6): {(1, 0): {(0, 5), (4, 5)},
             (1, 1): {(0, 0), (2, 0), (2, 5), (4, 4), (6, 4), (6, 5)}},
    (7, 2): {(1, 0): {(0, 7), (4, 7)},
             (1, 1): {(0, 0), (2, 4), (2, 7), (4, 4), (6, 0), (6, 7)}},
    (7, 6): {(1, 0): {(0, 7), (4, 7)},
             (1, 1): {(0, 0), (2, 0), (2, 7), (4, 4), (6, 4), (6, 7)}},
}


def _table_cell(ak, dk, am, dm, b, c):
    """Residue table lookup; unlisted rows come from (a,b,c,d) -> (d,c,b,a)."""
    if (ak * dk) % 2:
        key = (ak % 4, dk % 4)
        if key in _MOD4:
            return (b % 4, c % 4) in _MOD4[key][(am % 2, dm % 2)]
        key = (dk % 4, ak % 4)
        return (c % 4, b % 4) in _MOD4[key][(dm % 2, am % 2)]
    if dk % 2 == 0:
        row = _MOD8[(ak % 8, dk % 8)]
        return (b % 8, c % 8) in row.get((am % 2, dm % 2), ())
    row = _MOD8[(dk % 8, ak % 8)]
    return (c % 8, b % 8) in row.get((dm % 2, am % 2), ())


def delta_dist_criteria(f: BinaryCubicForm, space: Space = Space.W) -> DeltaDistReason:
    """Evaluate the gcd, congruence and (for W) residue-table conditions."""
    a, b, c, d = f.coeffs
    sa, sd = squarefree_split(a), squarefree_split(d)
    ak, am, dk, dm = sa.k, sa.m, sd.k, sd.m
    if gcd(ak, d) != 1 or gcd(a, dk) != 1:
        return DeltaDistReason.GcdFail
    if (b * b - 4 * a * c) % dk or (c * c - 4 * b * d) % ak:
        return DeltaDistReason.CongruenceFail
    if space is Space.W and not _table_cell(ak, dk, am, dm, b, c):
        return DeltaDistReason.TableFail
    return DeltaDistReason.Found


def _criterion(f, space):
    if f.a == 0 or f.d == 0:
        raise DegenerateForm("need ad != 0")
    if not is_maximal(f):
        raise NotMaximal("form is not maximal")
    reason = delta_dist_criteria(f, space)
    if reason is not DeltaDistReason.Found:
        return DeltaDistResult(False, None, reason)
    found = delta_dist_search(f, space, check=False)
    if found.exists:
        return found
    log.warning("criterion holds but search found no witness for %s", f.coeffs)
    return DeltaDistResult(True, None, DeltaDistReason.SearchFail)


def delta_dist_integral_W(f: BinaryCubicForm) -> DeltaDistResult:
    """Integral Delta-distinguished representative on W over f (sufficient criterion)."""
    return _criterion(f, Space.W)


def delta_dist_integral_Wvee(f: BinaryCubicForm) -> DeltaDistResult:
    """Integral Delta-distinguished representative on W-dual over 4f."""
    return _criterion(f, Space.Wvee)


def delta_dist_search(f: BinaryCubicForm, space: Space = Space.W,
                      check: bool = True) -> DeltaDistResult:
    """Brute-force search for an integral Delta-distinguished pair.

    The pair has the shape
        A = [[-a11, 0, a13/2], [0, 0, a23/2], [a13/2, a23/2, a33]]
        B = [[0, 0, b13/2], [0, b22, b23/2], [b13/2, b23/2, b33]]
    (entries a13, ... without the halves for W-dual), with a11 = a_k,
    a23 = +-a_m, b22 = d_k, b13 = +-d_m.  Integrality of a33 and b33
    only depends on a13 and b23 modulo 8|a_k d_k|, so the scan is complete.
    """
    if isinstance(space, str):
        space = Space(space)
    a, b, c, d = f.coeffs
    if a == 0 or d == 0:
        raise DegenerateForm("need ad != 0")
    if check and not is_maximal(f):
        raise NotMaximal("form is not maximal")
    sa, sd = squarefree_split(a), squarefree_split(d)
    a11, b22 = sa.k, sd.k
    M = 8 * abs(a11 * b22)
    den = (4 if space is Space.W else 1) * a11 * b22
    r = np.arange(M, dtype=object if max(abs(b), abs(c)) > 10 ** 9 else np.int64)
    A13 = r[:, None]
    B23 = r[None, :]
    for a23 in (sa.m, -sa.m):
        for b13 in (sd.m, -sd.m):
            N1 = b - A13 * A13 * b22 + 2 * a11 * a23 * B23
            N2 = a11 * B23 * B23 - 2 * A13 * b13 * b22 - c
            ok = (N1 % den == 0) & (N2 % den == 0)
            hits = np.argwhere(ok)
            if len(hits) == 0:
                continue
            i, j = (int(t) for t in hits[0])
            a13, b23 = i, j
            a33 = Fraction(int(b - a13 * a13 * b22 + 2 * a11 * a23 * b23), den)
            b33 = Fraction(int(a11 * b23 * b23 - 2 * a13 * b13 * b22 - c), den)
            s = H if space is Space.W else 1
            pair = _pair(((-a11, 0, s * a13), (0, 0, s * a23), (s * a13, s * a23, a33)),
                         ((0, 0, s * b13), (0, b22, s * b23), (s * b13, s * b23, b33)))
            target = 1 if space is Space.W else 4
            res = resolvent_coefficients(pair.A, pair.B)
            want = tuple(target * t for t in f.coeffs)
            if res != want or not _minors_vanish(pair):
                raise AssertionError("search produced an invalid witness")
            cls = {pair.A.lattice_class, pair.B.lattice_class}
            allowed = ({LatticeClass.HalfIntegral, LatticeClass.IntegerMatrix}
                       if space is Space.W else {LatticeClass.IntegerMatrix})
            if not cls <= allowed:
                raise AssertionError("witness is not integral")
            return DeltaDistResult(True, pair, DeltaDistReason.Found)
    return DeltaDistResult(False, None, DeltaDistReason.NotFound)


# binary quartics and real solubility

@dataclass(frozen=True)
class BinaryQuarticForm:
    """c4 x^4 + c3 x^3 y + c2 x^2 y^2 + c1 x y^3 + c0 y^4."""
    c4: Fraction
    c3: Fraction
    c2: Fraction
    c1: Fraction
    c0: Fraction

    def __post_init__(self):
        for n in ("c4", "c3", "c2", "c1", "c0"):
            object.__setattr__(self, n, Fraction(getattr(self, n)))

    @property
    def coeffs(self):
        return (self.c4, self.c3, self.c2, self.c1, self.c0)

    def __call__(self, x, y=1):
        return sum(t * x ** (4 - i) * y ** i for i, t in enumerate(self.coeffs))


def associated_quartic(pair: QFPair) -> BinaryQuarticForm:
    """Quartic b11/4 x^4 + b12 x^3y + b22 x^2y^2 + 2 b23 xy^3 + b33 y^4.

    A must equal the anti-diagonal form; b13 is first cleared by adding a
    multiple of it to B.
    """
    if pair.A != ANTIDIAGONAL:
        raise NotNormalized("A is not the anti-diagonal form")
    B = pair.B
    t = B[0, 2]
    B = B + ANTIDIAGONAL.scale(-t)
    return BinaryQuarticForm(B[0, 0] / 4, B[0, 1], B[1, 1], 2 * B[1, 2], B[2, 2])


def delta_dist_antidiagonal(f: BinaryCubicForm) -> QFPair:
    """The Delta-distinguished pair for monic f moved to A = anti-diagonal.

    The substitution (x, y, z) -> (y, x - b z/(2d), 2z) has determinant
    +-2, so the pair has resolvent 4f as required on W-dual.
    """
    a, b, c, d = f.coeffs
    if a != 1:
        raise ValueError("f must be monic")
    if d == 0:
        raise DegenerateForm("need d != 0")
    g = ((0, 1, 0), (1, 0, 0), (0, Fraction(-b, 2 * d), 2))
    rep = delta_distinguished_rep(f)
    return QFPair(rep.A.act(g), rep.B.act(g))


def count_real_roots(q: BinaryQuarticForm) -> int:
    """Distinct real projective roots, by Sturm sequences on both charts."""
    if not any(q.coeffs):
        raise ValueError("zero quartic")
    affine = list(reversed(q.coeffs))      # q(x, 1), constant first
    n = rr.count_roots(affine)
    # the point [1:0] is a root exactly when the x^4 coefficient vanishes
    return n + (1 if q.c4 == 0 else 0)


def real_soluble_delta_dist(f: BinaryCubicForm, method: str = "roots") -> bool:
    """Real solubility of the Delta-distinguished orbit over 4f, f monic.

    Soluble iff Disc(f) < 0, or d > 0, or all three roots are positive.
    For b = 0 the last case cannot occur (the roots sum to zero), which
    leaves the familiar rule "Disc < 0, or Disc > 0 and d > 0".
    ``method="quartic"`` decides the same question from the associated
    quartic instead: z^2 = q has a real point iff q takes positive values.
    """
    if f.a != 1:
        raise ValueError("f must be monic")
    if f.disc == 0:
        raise DegenerateForm("zero discriminant")
    if method == "quartic":
        q = associated_quartic(delta_dist_antidiagonal(f))
        # disc != 0 so every real root of q is simple and q changes sign there
        return q.c4 > 0 or count_real_roots(q) > 0
    if method != "roots":
        raise ValueError(f"unknown method {method!r}")
    if f.disc < 0 or f.d > 0:
        return True
    return rr.count_roots_between([f.d, f.c, f.b, f.a], Fraction(0), "+inf") == 3


# real splitting types

def _cubic_disc(a, b, c, d):
    return (b * b * c * c - 4 * a * c ** 3 - 4 * b ** 3 * d
            - 27 * a * a * d * d + 18 * a * b * c * d)


def _e2(M):
    return (M[0][0] * M[1][1] - M[0][1] ** 2 + M[0][0] * M[2][2] - M[0][2] ** 2
            + M[1][1] * M[2][2] - M[1][2] ** 2)


def _pencil(pair, t):
    return [[t * p - q for p, q in zip(r, s)] for r, s in zip(pair.A.gram, pair.B.gram)]


def _e2_poly(pair):
    """e2(tA - B) as a quadratic polynomial in t, constant term first."""
    v0, v1, v2 = (_e2(_pencil(pair, t)) for t in (0, 1, 2))
    c2 = (v2 - 2 * v1 + v0) / 2
    c1 = v1 - v0 - c2
    return [v0, c1, c2]


def _sign_r_plus_w_sqrt(r, w, t):
    """Sign of r + w sqrt(t), t > 0."""
    sr = (r > 0) - (r < 0)
    sw = (w > 0) - (w < 0)
    if sw == 0 or sr == sw:
        return sr if sr else sw
    if sr == 0:
        return sw
    lhs, rhs = r * r, w * w * t
    if lhs == rhs:
        return 0
    return sr if lhs > rhs else sw


def _bil(G, u, v):
    return sum(G[i][j] * u[i] * v[j] for i in range(3) for j in range(3))


def _sign_on_conic(A, B) -> int:
    """Sign of B at a real point of the isotropic conic A = 0."""
    G = [list(r) for r in A.gram]
    Bg = B.gram
    e = [[Fraction(int(i == j)) for j in range(3)] for i in range(3)]
    if A.det == 0:
        # a kernel vector is a real point
        for v in _kernel(G):
            return _sign_r_plus_w_sqrt(_bil(Bg, v, v), 0, 1)
    basis, D = [], []
    for w in e:
        for u, du in zip(basis, D):
            k = _bil(G, w, u) / du
            w = [x - k * y for x, y in zip(w, u)]
        n = _bil(G, w, w)
        if n == 0:
            return _sign_r_plus_w_sqrt(_bil(Bg, w, w), 0, 1)
        basis.append(w)
        D.append(n)
    for i in range(3):
        for j in range(3):
            if D[i] > 0 > D[j]:
                t = -D[j] / D[i]
                vi, vj = basis[i], basis[j]
                r = t * _bil(Bg, vi, vi) + _bil(Bg, vj, vj)
                w = 2 * _bil(Bg, vi, vj)
                return _sign_r_plus_w_sqrt(r, w, t)
    raise ValueError("conic has no real points")


def _kernel(G):
    """Basis of the rational kernel of a singular 3x3 matrix."""
    M = [list(map(Fraction, r)) for r in G]
    pivots, row = [], 0
    for col in range(3):
        piv = next((i for i in range(row, 3) if M[i][col] != 0), None)
        if piv is None:
            continue
        M[row], M[piv] = M[piv], M[row]
        M[row] = [x / M[row][col] for x in M[row]]
        for i in range(3):
            if i != row and M[i][col] != 0:
                M[i] = [x - M[i][col] * y for x, y in zip(M[i], M[row])]
        pivots.append(col)
        row += 1
    out = []
    for free in (c for c in range(3) if c not in pivots):
        v = [Fraction(0)] * 3
        v[free] = Fraction(1)
        for r, pc in enumerate(pivots):
            v[pc] = -M[r][free]
        out.append(v)
    return out


def real_splitting_type(pair: QFPair) -> RealSplittingType:
    """Real splitting type of a pair whose resolvent has nonzero discriminant."""
    a, b, c, d = resolvent_coefficients(pair.A, pair.B)
    D = _cubic_disc(a, b, c, d)
    if D == 0:
        raise DegenerateForm("resolvent has zero discriminant")
    if D < 0:
        return RealSplittingType.S112
    E = _e2_poly(pair)
    F = [d, c, b, a]
    signs = [rr.sign_at_root(E, F, iv) for iv in rr.isolate(F)]
    if a == 0:
        signs.append((_e2(pair.A.gram) > 0) - (_e2(pair.A.gram) < 0))
    indefinite = sum(1 for s in signs if s < 0)
    if indefinite == 3:
        return RealSplittingType.S1111
    if indefinite != 1:
        raise ArithmeticError(f"unexpected pencil signature {signs}")
    if pair.A.det != 0 and kappa_inf(pair.A) == -1:
        return RealSplittingType.S22sharp
    s = _sign_on_conic(pair.A, pair.B)
    return RealSplittingType.S22plus if s > 0 else RealSplittingType.S22minus


def cubic_real_roots(f: BinaryCubicForm, width=Fraction(1, 2 ** 60)):
    """Isolating intervals (lo, hi] of the real roots of f(x,1), refined to width."""
    F = [f.d, f.c, f.b, f.a]
    return [rr.refine(F, iv, width) if iv[0] != iv[1] else iv for iv in rr.isolate(F)]


def real_orbit_reps(f: BinaryCubicForm, width=Fraction(1, 2 ** 60)) -> list:
    """The four diagonal pairs over a monic f with three real roots.

    Roots are exact when rational, otherwise interval midpoints of the
    requested width.
    """
    if f.a != 1:
        raise ValueError("f must be monic")
    if f.disc <= 0:
        raise ValueError("need disc > 0")
    roots = []
    for lo, hi in cubic_real_roots(f, width):
        roots.append(lo if lo == hi else _rational_root_in(f, lo, hi))
    r1, r2, r3 = roots
    diag = TernaryQuadraticForm.diag
    return [QFPair(diag(-1, 1, -1), diag(-r1, r2, -r3)),
            QFPair(diag(1, -1, -1), diag(r1, -r2, -r3)),
            QFPair(diag(-1, -1, 1), diag(-r1, -r2, r3)),
            QFPair(diag(1, 1, 1), diag(r1, r2, r3))]


def _rational_root_in(f, lo, hi):
    """An exact rational root in (lo, hi] if there is one, else the midpoint."""
    from sympy import Poly, Rational, symbols
    x = symbols("x")
    for r in Poly([f.a, f.b, f.c, f.d], x).ground_roots():
        r = Fraction(int(r.p), int(r.q)) if isinstance(r, Rational) else None
        if r is not None and lo < r <= hi:
            return r
    return (lo + hi) / 2


def real_mass(f: BinaryCubicForm, eps1: int, eps2: int, t: RealSplittingType) -> Fraction:
    """Archimedean mass for the splitting types (1111), (112) and (22+)."""
    D = f.disc
    if (t is RealSplittingType.S112) != (D < 0) or D == 0:
        raise TypeMismatch(f"type {t.value} incompatible with disc {D}")
    if eps1 != 1:
        return Fraction(0)
    if t is RealSplittingType.S1111:
        return Fraction(1, 4) if eps2 == 1 else Fraction(0)
    if t is RealSplittingType.S112:
        return Fraction(1, 2) if eps2 == 1 else Fraction(0)
    if t is RealSplittingType.S22plus:
        if f.a == 0:
            raise ValueError("need a != 0")
        F = [f.d, f.c, f.b, f.a]
        positive = rr.count_roots_between(F, Fraction(0), "+inf")
        nonneg = positive + (1 if f.d == 0 else 0)
        cond = positive >= 2 or nonneg == 0
        m11 = Fraction(1, 4) if cond else Fraction(0)
        if eps2 == 1:
            return m11
        if eps2 == -1:
            return Fraction(1, 4) - m11
    return Fraction(0)
