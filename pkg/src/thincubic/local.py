"""Local analysis of binary cubic forms at a prime p.

Splitting types, Dedekind maximality, sufficient ramification, the kappa
invariants of ternary forms, the closed-form local densities and an
exhaustive mod p^2 oracle that checks them.
"""
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction

import numpy as np

from .arith import is_cube_mod, legendre, roots_quadratic_mod, valuation
from .errors import (DegenerateForm, Imprimitive, NotMaximal, OracleBound,
                     UnlistedCase, UnsupportedReduction)
from .forms import BinaryCubicForm, TernaryQuadraticForm, squarefree_split

__all__ = [
    "SplittingTypeP", "RamSide", "LocalDensityReport", "splitting_type_mod_p",
    "is_maximal_at", "is_suff_ramified", "kappa_p", "kappa_inf",
    "maximal_density", "ram_density", "density_oracle", "local_mass",
    "averaged_mass_factor", "table_counts", "ORACLE_BOUND", "is_maximal",
]

ORACLE_BOUND = 13


class SplittingTypeP(Enum):
    T111 = "(111)"
    T12 = "(12)"
    T3 = "(3)"
    T11sq = "(11^2)"
    T1sq1 = "(1^21)"
    T1cube = "(1^3)"


class RamSide(Enum):
    ASide = "a"
    DSide = "d"


# polynomials over F_p, lists of coefficients from the constant term up

def _trim(P):
    P = list(P)
    while P and P[-1] == 0:
        P.pop()
    return P


def _pmod(P, Q, p):
    P = _trim(P)
    Q = _trim(Q)
    inv = pow(Q[-1], -1, p)
    while len(P) >= len(Q):
        c = P[-1] * inv % p
        s = len(P) - len(Q)
        for i, q in enumerate(Q):
            P[s + i] = (P[s + i] - c * q) % p
        P = _trim(P)
    return P


def _pmul(P, Q, p):
    out = [0] * (len(P) + len(Q) - 1)
    for i, s in enumerate(P):
        for j, t in enumerate(Q):
            out[i + j] = (out[i + j] + s * t) % p
    return out


def _pgcd(P, Q, p):
    P, Q = _trim(P), _trim(Q)
    while Q:
        P, Q = Q, _pmod(P, Q, p)
    if P:
        inv = pow(P[-1], -1, p)
        P = [t * inv % p for t in P]
    return P


def _pderiv(P, p):
    return _trim([(i * P[i]) % p for i in range(1, len(P))])


def _xpow_mod(e, M, p):
    """x^e mod M over F_p."""
    result, base = [1], [0, 1]
    while e:
        if e & 1:
            result = _pmod(_pmul(result, base, p), M, p)
        base = _pmod(_pmul(base, base, p), M, p)
        e >>= 1
    return result


def _count_roots(P, p):
    """Number of distinct roots in F_p of a nonzero polynomial."""
    P = _trim(P)
    if len(P) <= 1:
        return 0
    xp = _xpow_mod(p, P, p) + [0, 0]
    xp[1] = (xp[1] - 1) % p
    return len(_pgcd(P, xp, p)) - 1


def _roots(P, p):
    """Distinct roots in F_p of a nonzero polynomial of degree <= 3."""
    P = _trim(P)
    deg = len(P) - 1
    if deg <= 0:
        return []
    if p < 64 or deg == 3:
        return [r for r in range(p) if _eval(P, r, p) == 0]
    if deg == 1:
        return [(-P[0] * pow(P[1], -1, p)) % p]
    return roots_quadratic_mod(P[2], P[1], P[0], p)


def _eval(P, x, p):
    v = 0
    for t in reversed(P):
        v = (v * x + t) % p
    return v


def _multiplicities(P, p):
    """Multiplicities of the roots in F_p of P, by brute force."""
    out = []
    for r in range(p):
        k, Q = 0, _trim(P)
        while len(Q) > 1 and _eval(Q, r, p) == 0:
            # synthetic division by (x - r)
            acc, quo = 0, []
            for t in reversed(Q):
                acc = (acc * r + t) % p
                quo.append(acc)
            Q = list(reversed(quo[:-1]))
            k += 1
        if k:
            out.append(k)
    return out


def _affine(f: BinaryCubicForm, p):
    """f(x,1) mod p, constant term first, plus the multiplicity of [1:0]."""
    co = [t % p for t in f.coeffs]
    m = 0
    while m < 3 and co[m] == 0:
        m += 1
    return _trim([co[3], co[2], co[1], co[0]]), m


def splitting_type_mod_p(f: BinaryCubicForm, p: int) -> SplittingTypeP:
    """Factorisation pattern of f over F_p.

    >>> splitting_type_mod_p(BinaryCubicForm(1, 1, 0, 1), 2)
    <SplittingTypeP.T3: '(3)'>
    """
    if all(t % p == 0 for t in f.coeffs):
        raise Imprimitive(f"f vanishes mod {p}")
    P, m = _affine(f, p)
    n = 3 - m
    if n == 0:
        return SplittingTypeP.T1cube
    if n == 1:
        return SplittingTypeP.T1sq1
    if p <= 3:
        # the derivative misses multiplicities in characteristic <= degree
        mults = sorted(_multiplicities(P, p))
        if m == 1:
            mults = sorted(mults + [1])
        if sum(mults) < 3:
            return SplittingTypeP.T12 if len(mults) == 1 else SplittingTypeP.T3
        return {(1, 1, 1): SplittingTypeP.T111, (1, 2): SplittingTypeP.T11sq,
                (3,): SplittingTypeP.T1cube}[tuple(mults)]
    g = _pgcd(P, _pderiv(P, p), p)
    dg = len(g) - 1
    if n == 2:
        if dg >= 1:
            return SplittingTypeP.T11sq
        return SplittingTypeP.T111 if _count_roots(P, p) == 2 else SplittingTypeP.T12
    if dg >= 2:
        return SplittingTypeP.T1cube
    if dg == 1:
        return SplittingTypeP.T11sq
    return {3: SplittingTypeP.T111, 1: SplittingTypeP.T12,
            0: SplittingTypeP.T3}[_count_roots(P, p)]


def is_maximal_at(f: BinaryCubicForm, p: int) -> bool:
    """Dedekind's criterion for R_f at p, tested at every root in P^1(F_p)."""
    D = f.disc
    if D == 0:
        raise DegenerateForm("zero discriminant")
    if all(t % p == 0 for t in f.coeffs):
        return False
    if D % (p * p):
        return True
    a, b = f.a, f.b
    if a % p == 0 and a % (p * p) == 0 and b % p == 0:
        return False
    # an affine root can only trigger the test if it is a multiple root
    P, _ = _affine(f, p)
    if len(P) <= 1:
        return True
    g = _pgcd(P, _pderiv(P, p), p)
    if len(g) <= 1:
        return True
    pp = p * p
    for r in _roots(g, p):
        if f(r, 1) % pp == 0 and f.dx(r, 1) % p == 0:
            return False
    return True


def _unit_times_square(P, p) -> bool:
    """Is the polynomial P (constant term first) alpha * g^2 over F_p?"""
    P = _trim([t % p for t in P])
    if not P:
        return False
    deg = len(P) - 1
    if deg % 2:
        return False
    if deg == 0:
        return True
    if deg == 2:
        if p == 2:
            return P[1] == 0
        return (P[1] * P[1] - 4 * P[0] * P[2]) % p == 0
    raise ValueError("degree above 2")


def _aside_square(f, p):
    return f.a % p == 0 and _unit_times_square([f.d, f.c, f.b], p)


def _dside_square(f, p):
    return f.d % p == 0 and _unit_times_square([f.a, f.b, f.c], p)


def is_suff_ramified(f: BinaryCubicForm, p: int, side: RamSide) -> bool:
    """f(x,1) (ASide) or f(1,y) (DSide) is a unit times a square mod p.

    Requires p | a_k (resp. p | d_k), otherwise False.  Maximality at p
    is the caller's precondition and is not checked here.
    """
    if side is RamSide.ASide:
        if f.a == 0 or squarefree_split(f.a).k % p:
            return False
        return _aside_square(f, p)
    if f.d == 0 or squarefree_split(f.d).k % p:
        return False
    return _dside_square(f, p)


def _gram_mod(A: TernaryQuadraticForm, p):
    """Gram matrix of 2A mod p (integral for half-integral A)."""
    out = []
    for row in A.gram:
        r = []
        for t in row:
            t = 2 * t
            if t.denominator % p == 0:
                raise UnsupportedReduction("entry not p-integral")
            r.append(t.numerator * pow(t.denominator, -1, p) % p)
        out.append(r)
    return out


def _rank_mod(M, p):
    M = [list(r) for r in M]
    rank, col = 0, 0
    n = len(M)
    for col in range(n):
        piv = next((i for i in range(rank, n) if M[i][col] % p), None)
        if piv is None:
            continue
        M[rank], M[piv] = M[piv], M[rank]
        inv = pow(M[rank][col], -1, p)
        for i in range(n):
            if i != rank and M[i][col] % p:
                c = M[i][col] * inv
                M[i] = [(x - c * y) % p for x, y in zip(M[i], M[rank])]
        rank += 1
    return rank


def _is_zero_mod(A, p):
    return all(A(*v) % p == 0 for v in [(x, y, z) for x in range(p)
                                        for y in range(p) for z in range(p)])


def kappa_p(A: TernaryQuadraticForm, p: int) -> int:
    """0 if A mod p is smooth, +1 for two rational lines, -1 for conjugate lines."""
    d4 = 4 * A.det
    if d4.denominator % p == 0:
        raise UnsupportedReduction("determinant not p-integral")
    if (d4.numerator % p) != 0:
        return 0
    if p == 2:
        pts = 0
        for v in [(1, 0, 0), (0, 1, 0), (0, 0, 1), (1, 1, 0), (1, 0, 1),
                  (0, 1, 1), (1, 1, 1)]:
            val = A(*v)
            if val.denominator % 2 == 0:
                raise UnsupportedReduction("form not 2-integral")
            pts += val.numerator % 2 == 0
        if pts == 5:
            return 1
        if pts == 1:
            return -1
        raise UnsupportedReduction(f"reduction mod 2 has {pts} points")
    M = _gram_mod(A, p)
    if _rank_mod(M, p) != 2:
        raise UnsupportedReduction("reduction has rank at most 1")
    # restrict to two coordinates spanning a complement of the kernel
    for i, j in ((0, 1), (0, 2), (1, 2)):
        det2 = (M[i][i] * M[j][j] - M[i][j] * M[j][i]) % p
        if det2:
            return legendre(-det2, p)
    raise UnsupportedReduction("no nondegenerate 2x2 minor")


def kappa_inf(A: TernaryQuadraticForm) -> int:
    """+1 if A is indefinite, -1 if definite; exact."""
    g = A.gram
    if A.det == 0:
        raise DegenerateForm("singular form")
    # signature via Gaussian elimination with symmetric pivoting
    M = [list(r) for r in g]
    signs = []
    n = 3
    idx = list(range(n))
    while idx:
        piv = next((i for i in idx if M[i][i] != 0), None)
        if piv is None:
            # all remaining diagonals vanish but some off-diagonal does not:
            # the form contains a hyperbolic plane
            return 1
        signs.append(1 if M[piv][piv] > 0 else -1)
        idx.remove(piv)
        for i in idx:
            c = M[i][piv] / M[piv][piv]
            for j in idx:
                M[i][j] -= c * M[piv][j]
    return -1 if len(set(signs)) == 1 else 1


# closed forms

def _nu(n, p):
    return valuation(n, p)


def maximal_density(p: int, a: int, d: int) -> Fraction:
    """Closed-form density of forms in U_{a,d}(Z_p) that are maximal at p."""
    if a == 0 or d == 0:
        raise ValueError("a and d must be nonzero")
    q = Fraction(1, p)
    va, vd = _nu(a, p), _nu(d, p)
    if va == 0 and vd == 0:
        if p % 3 == 1:
            chi = 1 if is_cube_mod(d, p) else 0
            return 1 - 3 * (q ** 2 - q ** 3) * chi
        return 1 - q ** 2 + q ** 3
    lo, hi = min(va, vd), max(va, vd)
    if lo == 0:
        if hi == 1:
            return 1 - q ** 2 + q ** 3
        return (1 - q) * (1 - q ** 2)
    if va == 1 and vd == 1:
        return 1 - q ** 2
    if lo == 1:
        return 1 - q
    if lo >= 2:
        return (1 - q) ** 2
    raise UnlistedCase((p, va, vd))


def ram_density(p: int, a: int, d: int, side: RamSide) -> Fraction:
    """Closed-form density of side-sufficiently-ramified forms among maximal ones."""
    if a == 0 or d == 0:
        raise ValueError("a and d must be nonzero")
    if side is RamSide.DSide:
        a, d = d, a
    va, vd = _nu(a, p), _nu(d, p)
    if va == 1 and vd == 0:
        return Fraction(p * p - p + 1, p ** 3 - p + 1)
    if va >= 2 and vd == 0:
        return Fraction((p - 1) ** 2, p ** 3 - p + 1)
    if va == 1 and vd == 1:
        return Fraction(1, p + 1)
    if va >= 2 and vd == 1:
        return Fraction(1, p)
    return Fraction(0)


def table_counts(p: int, a: int, d: int) -> dict:
    """Splitting-type counts of maximal (b,c) mod p^2 from the proof tables.

    Keys are SplittingTypeP; absent types have count 0.
    """
    T = SplittingTypeP
    va, vd = _nu(a, p), _nu(d, p)
    if va == 0 and vd == 0:
        if p % 3 == 1:
            chi = 1 if is_cube_mod(d, p) else 0
            return {T.T111: p * p * Fraction((p - 1) * (p - 4), 6) + p * p * chi,
                    T.T12: Fraction(p ** 3 * (p - 1), 2),
                    T.T3: p * p * (Fraction(p * p + p + 1, 3) - chi),
                    T.T11sq: p * (p - 1) * (p - 1 - 3 * chi),
                    T.T1cube: p * (p - 1)}
        return {T.T111: Fraction(p * p * (p - 2) * (p - 3), 6),
                T.T12: Fraction(p ** 3 * (p - 1), 2),
                T.T3: Fraction(p ** 3 * (p + 1), 3),
                T.T11sq: p * (p - 1) * (p - 2),
                T.T1cube: p * (p - 1)}
    if vd == 0 or va == 0:
        flip = va == 0
        v = vd if flip else va
        out = {T.T111: Fraction(p * p * (p - 1) * (p - 2), 2),
               T.T12: Fraction(p ** 3 * (p - 1), 2),
               T.T1sq1: p * p * (p - 1) if v == 1 else 0,
               T.T11sq: p * (p - 1) ** 2,
               T.T1cube: p * p if v == 1 else 0}
        if flip:
            # under x <-> y the double root at (1,0) moves to (0,1)
            out[T.T11sq] += out[T.T1sq1]
            out[T.T1sq1] = 0
        return out
    return {T.T111: p * p * (p - 1) ** 2,
            T.T1sq1: p * p * (p - 1) if va == 1 else 0,
            T.T11sq: p * p * (p - 1) if vd == 1 else 0}


@dataclass
class LocalDensityReport:
    p: int
    a: int
    d: int
    maximal_density: Fraction
    aside_ram_density: Fraction
    dside_ram_density: Fraction
    splitting_histogram: dict = field(default_factory=dict)
    maximal_count: int = 0

    def to_json(self):
        from .forms import frac_str
        return {"p": self.p, "a": self.a, "d": self.d,
                "maximal_density": frac_str(self.maximal_density),
                "aside_ram_density": frac_str(self.aside_ram_density),
                "dside_ram_density": frac_str(self.dside_ram_density),
                "maximal_count": self.maximal_count,
                "splitting_histogram": {k.value if isinstance(k, SplittingTypeP) else k: int(v)
                                        for k, v in self.splitting_histogram.items()}}

    @classmethod
    def from_json(cls, obj):
        return cls(obj["p"], obj["a"], obj["d"], Fraction(obj["maximal_density"]),
                   Fraction(obj["aside_ram_density"]), Fraction(obj["dside_ram_density"]),
                   {SplittingTypeP(k): v for k, v in obj["splitting_histogram"].items()},
                   obj["maximal_count"])


def _nonmaximal_grid(a, d, p):
    """Boolean (p^2 x p^2) array over (b, c): Dedekind fails at some root.

    Written independently of is_maximal_at: every point of P^1(F_p) is
    tried by brute force.
    """
    pp = p * p
    b = np.arange(pp, dtype=np.int64)[:, None]
    c = np.arange(pp, dtype=np.int64)[None, :]
    bad = np.zeros((pp, pp), dtype=bool)
    if a % pp == 0:
        bad |= (b % p == 0) & (c == c)
    for r in range(p):
        fr = (a * r ** 3 + b * r * r + c * r + d) % pp
        fx = (3 * a * r * r + 2 * b * r + c) % p
        bad |= (fr == 0) & (fx == 0)
    if a % p == 0 and d % p == 0:
        bad |= (b % p == 0) & (c % p == 0)
    return bad


def density_oracle(p: int, a: int, d: int, bound: int = ORACLE_BOUND) -> LocalDensityReport:
    """Exhaustive count over (b, c) in (Z/p^2)^2 with a, d fixed."""
    if p > bound:
        raise OracleBound(f"p={p} exceeds oracle bound {bound}")
    if a == 0 or d == 0:
        raise ValueError("a and d must be nonzero")
    pp = p * p
    ok = ~_nonmaximal_grid(a, d, p)
    hist = {t: 0 for t in SplittingTypeP}
    ram_a = ram_d = 0
    # splitting type and the square conditions only see f mod p
    for b0 in range(p):
        for c0 in range(p):
            n = int(ok[b0::p, c0::p].sum())
            if n == 0:
                continue
            f = BinaryCubicForm(a, b0, c0, d)
            hist[splitting_type_mod_p(f, p)] += n
            ram_a += n * _aside_square(f, p)
            ram_d += n * _dside_square(f, p)
    total = int(ok.sum())
    return LocalDensityReport(
        p, a, d, Fraction(total, pp * pp),
        Fraction(ram_a, total) if total else Fraction(0),
        Fraction(ram_d, total) if total else Fraction(0),
        {k: v for k, v in hist.items() if v}, total)


def local_mass(f: BinaryCubicForm, p: int, eps1: int, eps2: int) -> Fraction:
    """Mass_p^{eps1, eps2}(f) for f maximal at p."""
    if not is_maximal_at(f, p):
        raise NotMaximal(f"form not maximal at {p}")
    in_a, in_d = f.a % p == 0, f.d % p == 0
    ram_a = in_a and is_suff_ramified(f, p, RamSide.ASide)
    ram_d = in_d and is_suff_ramified(f, p, RamSide.DSide)
    h, q = Fraction(1, 2), Fraction(1, 4)
    if not in_a and not in_d:
        return Fraction(1) if (eps1, eps2) == (0, 0) else Fraction(0)
    if in_a and not in_d:
        if eps2 != 0 or eps1 not in (1, -1):
            return Fraction(0)
        if ram_a:
            return Fraction(1) if eps1 == 1 else Fraction(0)
        return h
    if in_d and not in_a:
        if eps1 != 0 or eps2 not in (1, -1):
            return Fraction(0)
        if ram_d:
            return Fraction(1) if eps2 == 1 else Fraction(0)
        return h
    if eps1 not in (1, -1) or eps2 not in (1, -1):
        return Fraction(0)
    if ram_d:
        return h if eps2 == 1 else Fraction(0)
    if ram_a:
        return h if eps1 == 1 else Fraction(0)
    return q


def averaged_mass_factor(p: int, a: int, d: int, eps1: int = 0, eps2: int = 0) -> Fraction:
    """Average of local_mass over maximal forms, via the closed-form densities."""
    in_a, in_d = a % p == 0, d % p == 0
    if (eps1 != 0) != in_a or (eps2 != 0) != in_d:
        return Fraction(0)
    rho = ram_density(p, a, d, RamSide.ASide)
    lam = ram_density(p, a, d, RamSide.DSide)
    if not in_a and not in_d:
        return Fraction(1)
    if in_a and not in_d:
        return Fraction(1, 2) + eps1 * rho / 2
    if in_d and not in_a:
        return Fraction(1, 2) + eps2 * lam / 2
    return Fraction(1, 4) + eps1 * rho / 4 + eps2 * lam / 4


def is_maximal(f: BinaryCubicForm) -> bool:
    """Maximal at every prime: only primes with p^2 | disc need testing."""
    from .arith import factor
    D = f.disc
    if D == 0:
        raise DegenerateForm("zero discriminant")
    return all(is_maximal_at(f, p) for p, e in factor(D).items() if e >= 2)
