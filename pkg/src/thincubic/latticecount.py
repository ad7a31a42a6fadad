"""Integral ternary quadratic forms of fixed determinant in skewed boxes.

A form has rows (a, b/2, d/2), (b/2, c, e/2), (d/2, e/2, f), so that

    k = 4 det = -(f * Delta + Q(e, d)),  Delta = b^2 - 4ac,  Q = a e^2 - b e d + c d^2.

For Delta != 0 the last coordinate is determined by the other five; for
Delta = 0 the whole f-range either counts or not.
"""
import itertools
import math
from dataclasses import asdict, dataclass

import numpy as np
from numba import njit

from .errors import RangeTooLarge

__all__ = ["SkewBox", "CountBreakdown", "count_fixed_det", "count_bruteforce",
           "count_transformed_box", "skew_ratio", "growth_exponent",
           "four_det", "WEIGHTS"]

# exponents (of s1, s2) for the range of each coordinate a, b, c, d, e, f
WEIGHTS = ((-4, -2), (-1, -2), (2, -2), (-1, 1), (2, 1), (2, 4))
MAX_RANGE = 2000


@dataclass(frozen=True)
class SkewBox:
    s1: float = 1.0
    s2: float = 1.0
    Y: float = 1.0
    base: tuple = (1, 1, 1, 1, 1, 1)

    def __post_init__(self):
        if min(self.s1, self.s2, self.Y) <= 0:
            raise ValueError("s1, s2 and Y must be positive")

    @property
    def bounds(self) -> tuple:
        """Integer half-widths R: coordinate alpha ranges over |alpha| <= R_alpha."""
        out = []
        for (u, v), b in zip(WEIGHTS, self.base):
            r = b * self.s1 ** u * self.s2 ** v * self.Y
            out.append(int(math.floor(r + 1e-9)))
        return tuple(out)


@dataclass(frozen=True)
class CountBreakdown:
    N_delta_zero: int = 0
    N_delta_nonzero: int = 0
    N_star_delta_zero: int = 0
    N_star_delta_nonzero: int = 0

    @property
    def N(self) -> int:
        return self.N_delta_zero + self.N_delta_nonzero

    @property
    def N_star(self) -> int:
        return self.N_star_delta_zero + self.N_star_delta_nonzero

    def to_json(self):
        out = asdict(self)
        out.update(N=self.N, N_star=self.N_star)
        return out

    @classmethod
    def from_json(cls, obj):
        return cls(obj["N_delta_zero"], obj["N_delta_nonzero"],
                   obj["N_star_delta_zero"], obj["N_star_delta_nonzero"])


def four_det(a, b, c, d, e, f):
    return 4 * a * c * f - a * e * e - b * b * f + b * d * e - c * d * d


@njit(cache=True)
def _count5(k, Ra, Rb, Rc, Rd, Re, Rf):
    """Returns (N0, N1, N0*, N1*) for Delta = 0 / != 0.

    Uses the symmetries (b, d) -> (-b, -d) and (d, e) -> (-d, -e), both of
    which fix 4 det, to scan b >= 0, d >= 0 with multiplicity weights.
    Divisibility by Delta is tested through a rounded float quotient that
    is then confirmed in exact integer arithmetic.
    """
    n0 = 0
    n1 = 0
    s0 = 0
    s1 = 0
    nf = 2 * Rf + 1
    for a in range(-Ra, Ra + 1):
        for b in range(0, Rb + 1):
            wb = 1 if b == 0 else 2
            for c in range(-Rc, Rc + 1):
                D = b * b - 4 * a * c
                inv = 1.0 / D if D != 0 else 0.0
                for d in range(0, Rd + 1):
                    w = wb * (1 if d == 0 else 2)
                    cd2 = c * d * d
                    bd = b * d
                    cnt = 0
                    if D != 0:
                        for e in range(-Re, Re + 1):
                            num = -k - (a * e * e - bd * e + cd2)
                            qi = np.int64(np.floor(num * inv + 0.5))
                            if qi * D == num and -Rf <= qi <= Rf:
                                cnt += 1
                        n1 += cnt * w
                        if a != 0:
                            s1 += cnt * w
                    else:
                        for e in range(-Re, Re + 1):
                            if a * e * e - bd * e + cd2 == -k:
                                cnt += 1
                        n0 += cnt * w * nf
                        if a != 0:
                            s0 += cnt * w * nf
    return n0, n1, s0, s1


def _weights_ok(bounds):
    if max(bounds) > MAX_RANGE:
        raise RangeTooLarge(f"coefficient range {max(bounds)} exceeds {MAX_RANGE}")


def _check_k(k, lattice):
    if k == 0:
        raise ValueError("k must be nonzero")
    if lattice not in ("half", "integer"):
        raise ValueError("lattice must be 'half' or 'integer'")
    if lattice == "integer" and k % 4:
        raise ValueError("integer-matrix forms have 4 det = 0 mod 4; no solutions for this k")


def count_fixed_det(k: int, box: SkewBox, lattice: str = "half") -> CountBreakdown:
    """Count forms in the box with 4 det = k.

    ``lattice="integer"`` restricts to integer Gram matrices (b, d, e even).
    """
    _check_k(k, lattice)
    bounds = box.bounds
    _weights_ok(bounds)
    if lattice == "integer":
        n0, n1, s0, s1 = _count5_even(k, *bounds)
    else:
        n0, n1, s0, s1 = _count5(k, *bounds)
    return CountBreakdown(int(n0), int(n1), int(s0), int(s1))


@njit(cache=True)
def _count5_even(k, Ra, Rb, Rc, Rd, Re, Rf):
    n0 = 0
    n1 = 0
    s0 = 0
    s1 = 0
    nf = 2 * Rf + 1
    e0 = -(Re - Re % 2)
    for a in range(-Ra, Ra + 1):
        for b in range(0, Rb + 1, 2):
            wb = 1 if b == 0 else 2
            for c in range(-Rc, Rc + 1):
                D = b * b - 4 * a * c
                for d in range(0, Rd + 1, 2):
                    w = wb * (1 if d == 0 else 2)
                    cnt = 0
                    for e in range(e0, Re + 1, 2):
                        Q = a * e * e - b * d * e + c * d * d
                        if D != 0:
                            num = -k - Q
                            if num % D == 0 and -Rf <= num // D <= Rf:
                                cnt += 1
                        elif Q == -k:
                            cnt += nf
                    cnt *= w
                    if D != 0:
                        n1 += cnt
                        if a != 0:
                            s1 += cnt
                    else:
                        n0 += cnt
                        if a != 0:
                            s0 += cnt
    return n0, n1, s0, s1


def count_bruteforce(k: int, box: SkewBox, lattice: str = "half") -> CountBreakdown:
    """Six nested loops over the box, vectorised over the last coordinate."""
    _check_k(k, lattice)
    Ra, Rb, Rc, Rd, Re, Rf = box.bounds
    fs = np.arange(-Rf, Rf + 1)
    n0 = n1 = s0 = s1 = 0
    step = 2 if lattice == "integer" else 1
    rng = lambda R, st=1: [x for x in range(-R, R + 1) if x % st == 0]
    for a, b, c, d, e in itertools.product(rng(Ra), rng(Rb, step), rng(Rc),
                                           rng(Rd, step), rng(Re, step)):
        vals = 4 * a * c * fs - a * e * e - b * b * fs + b * d * e - c * d * d
        hits = int(np.count_nonzero(vals == k))
        if b * b - 4 * a * c == 0:
            n0 += hits
            s0 += hits if a else 0
        else:
            n1 += hits
            s1 += hits if a else 0
    return CountBreakdown(n0, n1, s0, s1)


def _apply(g, coeffs):
    """Coefficients of g A g^T for A given by (a,b,c,d,e,f)."""
    a, b, c, d, e, f = coeffs
    M = np.array([[2 * a, b, d], [b, 2 * c, e], [d, e, 2 * f]], dtype=np.int64)
    G = np.asarray(g, dtype=np.int64)
    N = G @ M @ G.T
    return (N[0, 0] // 2, N[0, 1], N[1, 1] // 2, N[0, 2], N[1, 2], N[2, 2] // 2)


def _coeff_matrix(g):
    """6x6 integer matrix of A -> g A g^T on (a, b, c, d, e, f)."""
    cols = [_apply(g, tuple(int(i == j) for j in range(6))) for i in range(6)]
    return np.array(cols, dtype=np.int64).T


def count_transformed_box(k: int, box: SkewBox, g) -> int:
    """Count forms A with 4 det = k in g . box = {g B g^T : B in box}.

    Brute force over the bounding box of the image, testing membership
    through the inverse action.  Since g is unimodular and integral the
    image lattice is the same, so the answer must equal the plain count.
    """
    g = np.asarray(g, dtype=np.int64)
    if round(np.linalg.det(g)) not in (1, -1):
        raise ValueError("g must be unimodular")
    ginv = np.rint(np.linalg.inv(g)).astype(np.int64)
    L, Linv = _coeff_matrix(g), _coeff_matrix(ginv)
    R = np.array(box.bounds, dtype=np.int64)
    _weights_ok(R)
    # the map is linear, so each image coordinate is extremal at a corner
    half = np.abs(L) @ R
    axes = [np.arange(-h, h + 1) for h in half[:5]]
    grid = np.stack([x.ravel() for x in np.meshgrid(*axes, indexing="ij")])
    count = 0
    for f in range(-half[5], half[5] + 1):
        a, b, c, d, e = grid
        vals = 4 * a * c * f - a * e * e - b * b * f + b * d * e - c * d * d
        sel = grid[:, vals == k]
        if sel.shape[1] == 0:
            continue
        full = np.vstack([sel, np.full(sel.shape[1], f)])
        pre = Linv @ full
        count += int(np.count_nonzero(np.all(np.abs(pre) <= R[:, None], axis=0)))
    return count


def skew_ratio(k: int, Y: float, s_list, lattice: str = "half") -> list:
    """Counts under torus skews, with ratios to the unskewed count and to the bound shapes."""
    base = count_fixed_det(k, SkewBox(1, 1, Y), lattice)
    rows = []
    for s1, s2 in s_list:
        cb = count_fixed_det(k, SkewBox(s1, s2, Y), lattice)
        rows.append({
            "s1": s1, "s2": s2, "counts": cb.to_json(),
            "ratio": cb.N / base.N if base.N else float("nan"),
            "env_delta_nonzero": cb.N_delta_nonzero / (s1 ** 3 * Y ** 3),
            "env_delta_zero": cb.N_delta_zero / (s2 ** 3 * Y ** 3 + s1 ** 4 * s2 ** 5 * Y ** 2),
            "env_star_delta_nonzero": cb.N_star_delta_nonzero / Y ** 3,
            "env_star_delta_zero": cb.N_star_delta_zero / (s2 ** 3 * Y ** 3),
        })
    return rows


def growth_exponent(k: int, Ys, field: str = "N", lattice: str = "half") -> dict:
    """Least-squares slope of log N against log Y over the ladder."""
    Ys = list(Ys)
    if len(Ys) < 3 or len(set(Ys)) < len(Ys):
        raise ValueError("need at least 3 distinct ladder points")
    _check_k(k, lattice)
    counts = []
    for Y in Ys:
        cb = count_fixed_det(k, SkewBox(1, 1, Y), lattice)
        counts.append(getattr(cb, field))
    if min(counts) <= 0:
        raise ValueError("zero count on the ladder; cannot fit")
    x, y = np.log(Ys), np.log(counts)
    slope, intercept = np.polyfit(x, y, 1)
    return {"slope": float(slope), "intercept": float(intercept),
            "Ys": [float(t) for t in Ys], "counts": [int(c) for c in counts],
            "field": field}
