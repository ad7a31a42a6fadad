"""Exact real root counting and isolation by Sturm sequences over Q.

Polynomials are lists of rationals, constant term first.

>>> count_roots([-1, 0, 1])
2
>>> isolate([-2, 0, 1])
[(Fraction(-4, 1), Fraction(0, 1)), (Fraction(0, 1), Fraction(4, 1))]
"""
from fractions import Fraction
from math import floor

__all__ = ["trim", "sturm", "count_roots", "count_roots_between",
           "isolate", "refine", "sign_at_root", "squarefree", "peval"]


def trim(P):
    P = [Fraction(t) for t in P]
    while P and P[-1] == 0:
        P.pop()
    return P


def peval(P, x):
    v = Fraction(0)
    for t in reversed(P):
        v = v * x + t
    return v


def _deriv(P):
    return trim([i * P[i] for i in range(1, len(P))])


def _divmod(P, Q):
    P, Q = trim(P), trim(Q)
    q = [Fraction(0)] * max(len(P) - len(Q) + 1, 1)
    while len(P) >= len(Q) and P:
        c = P[-1] / Q[-1]
        s = len(P) - len(Q)
        q[s] = c
        for i, t in enumerate(Q):
            P[s + i] -= c * t
        P = trim(P)
    return q, P


def _gcd(P, Q):
    P, Q = trim(P), trim(Q)
    while Q:
        P, Q = Q, _divmod(P, Q)[1]
    return [t / P[-1] for t in P] if P else P


def squarefree(P):
    """P divided by gcd(P, P')."""
    P = trim(P)
    g = _gcd(P, _deriv(P))
    if len(g) <= 1:
        return P
    return trim(_divmod(P, g)[0])


def sturm(P):
    P = squarefree(P)
    seq = [P, _deriv(P)]
    while len(seq[-1]) > 1:
        r = _divmod(seq[-2], seq[-1])[1]
        if not r:
            break
        seq.append([-t for t in r])
    return seq


def _sign(x):
    return (x > 0) - (x < 0)


def _variations(signs):
    signs = [s for s in signs if s]
    return sum(1 for u, v in zip(signs, signs[1:]) if u != v)


def _signs_at(seq, x):
    if x == "+inf":
        return [_sign(P[-1]) if P else 0 for P in seq]
    if x == "-inf":
        return [(_sign(P[-1]) * (-1) ** (len(P) - 1)) if P else 0 for P in seq]
    return [_sign(peval(P, x)) for P in seq]


def count_roots(P) -> int:
    """Number of distinct real roots of a nonzero polynomial."""
    P = trim(P)
    if len(P) <= 1:
        return 0
    seq = sturm(P)
    return _variations(_signs_at(seq, "-inf")) - _variations(_signs_at(seq, "+inf"))


def count_roots_between(P, lo, hi, seq=None) -> int:
    """Distinct real roots in the half-open interval (lo, hi]; lo/hi may be +-inf."""
    P = trim(P)
    if len(P) <= 1:
        return 0
    seq = seq or sturm(P)
    return _variations(_signs_at(seq, lo)) - _variations(_signs_at(seq, hi))


def _cauchy_bound(P):
    return 1 + max(abs(t / P[-1]) for t in P[:-1]) if len(P) > 1 else Fraction(1)


def isolate(P):
    """Disjoint intervals (lo, hi], one per distinct real root, sorted.

    Endpoints are rational; an interval with lo == hi is an exact root.
    """
    P = squarefree(trim(P))
    if len(P) <= 1:
        return []
    seq = sturm(P)
    B = Fraction(floor(_cauchy_bound(P)) + 1)
    out = []
    stack = [(-B, B)]
    while stack:
        lo, hi = stack.pop()
        n = count_roots_between(P, lo, hi, seq)
        if n == 0:
            continue
        if n == 1:
            if peval(P, hi) == 0:
                out.append((hi, hi))
            else:
                out.append((lo, hi))
            continue
        mid = (lo + hi) / 2
        stack.append((lo, mid))
        stack.append((mid, hi))
    return sorted(out)


def refine(P, iv, width):
    """Shrink an isolating interval of a squarefree P below the given width."""
    P = squarefree(trim(P))
    lo, hi = iv
    while hi - lo > width:
        mid = (lo + hi) / 2
        v = peval(P, mid)
        if v == 0:
            return (mid, mid)
        if _sign(v) == _sign(peval(P, hi)):
            hi = mid
        else:
            lo = mid
    return (lo, hi)


def sign_at_root(Q, P, iv) -> int:
    """Sign of Q at the unique root of P isolated by iv."""
    Q = trim(Q)
    if not Q:
        return 0
    P = squarefree(trim(P))
    lo, hi = iv
    if lo == hi:
        return _sign(peval(Q, lo))
    g = _gcd(P, Q)
    if len(g) > 1 and count_roots_between(g, lo, hi) == 1:
        return 0
    qseq = sturm(Q)
    while count_roots_between(Q, lo, hi, qseq) or peval(Q, hi) == 0:
        lo, hi = refine(P, (lo, hi), (hi - lo) / 2)
        if lo == hi:
            return _sign(peval(Q, lo))
    return _sign(peval(Q, hi))
