"""Binary cubic forms, ternary quadratic forms and pairs of them.

Everything here is exact: integers for cubic coefficients and
``fractions.Fraction`` for Gram matrix entries.  Values are immutable.

>>> f = BinaryCubicForm(1, 0, 1, 1)
>>> f.disc
-31
>>> gl2_act(((0, 1), (1, 0)), BinaryCubicForm(1, 2, 3, 4))
BinaryCubicForm(a=-4, b=-3, c=-2, d=-1)
"""
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from functools import cached_property
from math import isqrt
import operator

from .arith import factor

__all__ = [
    "BinaryCubicForm", "TernaryQuadraticForm", "QFPair", "HeightKind",
    "LatticeClass", "SquarefreeSplit", "disc", "resolvent", "height",
    "height_below", "gl2_act", "sl3_act", "squarefree_split", "det3",
    "ANTIDIAGONAL", "frac_str", "parse_frac", "resolvent_coefficients",
]


def frac_str(q) -> str:
    q = Fraction(q)
    return f"{q.numerator}/{q.denominator}"


def parse_frac(s) -> Fraction:
    if isinstance(s, (int, Fraction)):
        return Fraction(s)
    return Fraction(str(s))


@dataclass(frozen=True)
class BinaryCubicForm:
    """ax^3 + bx^2y + cxy^2 + dy^3 with integer coefficients."""
    a: int
    b: int
    c: int
    d: int

    def __post_init__(self):
        for name in "abcd":
            object.__setattr__(self, name, operator.index(getattr(self, name)))

    @property
    def coeffs(self):
        return (self.a, self.b, self.c, self.d)

    @cached_property
    def disc(self) -> int:
        a, b, c, d = self.coeffs
        return (b * b * c * c - 4 * a * c ** 3 - 4 * b ** 3 * d
                - 27 * a * a * d * d + 18 * a * b * c * d)

    def __call__(self, x, y=1):
        a, b, c, d = self.coeffs
        return a * x ** 3 + b * x * x * y + c * x * y * y + d * y ** 3

    def dx(self, x, y=1):
        """Partial derivative in x."""
        return 3 * self.a * x * x + 2 * self.b * x * y + self.c * y * y

    def swap(self) -> "BinaryCubicForm":
        """f(y, x): exchanges the roles of a and d."""
        return BinaryCubicForm(self.d, self.c, self.b, self.a)

    def to_json(self):
        return list(self.coeffs)

    @classmethod
    def from_json(cls, obj):
        if isinstance(obj, str):
            obj = [int(t) for t in obj.replace(" ", "").split(",")]
        return cls(*[int(t) for t in obj])


def disc(f: BinaryCubicForm) -> int:
    return f.disc


class LatticeClass(Enum):
    IntegerMatrix = "IntegerMatrix"
    HalfIntegral = "HalfIntegral"
    General = "General"


def det3(m) -> Fraction:
    return (m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]))


def _adj3(m):
    return tuple(
        tuple((m[(j + 1) % 3][(i + 1) % 3] * m[(j + 2) % 3][(i + 2) % 3]
               - m[(j + 1) % 3][(i + 2) % 3] * m[(j + 2) % 3][(i + 1) % 3])
              for j in range(3))
        for i in range(3))


def _matmul(x, y):
    return tuple(tuple(sum(x[i][k] * y[k][j] for k in range(len(y)))
                       for j in range(len(y[0]))) for i in range(len(x)))


def _transpose(x):
    return tuple(zip(*x))


@dataclass(frozen=True)
class TernaryQuadraticForm:
    """Symmetric 3x3 Gram matrix with rational entries."""
    gram: tuple

    def __post_init__(self):
        g = self.gram
        if len(g) == 9 and not isinstance(g[0], (tuple, list)):
            g = [g[0:3], g[3:6], g[6:9]]
        g = tuple(tuple(parse_frac(t) for t in row) for row in g)
        if len(g) != 3 or any(len(r) != 3 for r in g):
            raise ValueError("Gram matrix must be 3x3")
        for i in range(3):
            for j in range(i):
                if g[i][j] != g[j][i]:
                    raise ValueError("Gram matrix is not symmetric")
        object.__setattr__(self, "gram", g)

    @classmethod
    def diag(cls, *entries):
        return cls(tuple(tuple(entries[i] if i == j else 0 for j in range(3))
                         for i in range(3)))

    @classmethod
    def from_coefficients(cls, a11, a22, a33, a12, a13, a23):
        """From the polynomial a11x^2 + ... + a12xy + a13xz + a23yz."""
        h = Fraction(1, 2)
        return cls(((a11, h * a12, h * a13),
                    (h * a12, a22, h * a23),
                    (h * a13, h * a23, a33)))

    def __getitem__(self, ij):
        i, j = ij
        return self.gram[i][j]

    @property
    def lattice_class(self) -> LatticeClass:
        g = self.gram
        if all(t.denominator == 1 for row in g for t in row):
            return LatticeClass.IntegerMatrix
        if all(g[i][i].denominator == 1 for i in range(3)) and all(
                (2 * g[i][j]).denominator == 1 for i in range(3) for j in range(3)):
            return LatticeClass.HalfIntegral
        return LatticeClass.General

    @cached_property
    def det(self) -> Fraction:
        return det3(self.gram)

    def adjugate(self):
        return _adj3(self.gram)

    def act(self, g) -> "TernaryQuadraticForm":
        """g A g^T."""
        return TernaryQuadraticForm(_matmul(_matmul(g, self.gram), _transpose(g)))

    def __call__(self, x, y, z):
        v = (x, y, z)
        return sum(self.gram[i][j] * v[i] * v[j] for i in range(3) for j in range(3))

    def __add__(self, other):
        return TernaryQuadraticForm(tuple(tuple(p + q for p, q in zip(r, s))
                                          for r, s in zip(self.gram, other.gram)))

    def scale(self, t) -> "TernaryQuadraticForm":
        t = Fraction(t)
        return TernaryQuadraticForm(tuple(tuple(t * q for q in r) for r in self.gram))

    def to_json(self):
        return [frac_str(t) for row in self.gram for t in row]

    @classmethod
    def from_json(cls, obj):
        return cls(tuple(obj))


ANTIDIAGONAL = TernaryQuadraticForm(((0, 0, 1), (0, -1, 0), (1, 0, 0)))


def _trace_prod(x, y):
    return sum(x[i][k] * y[k][i] for i in range(3) for k in range(3))


def resolvent_coefficients(A: TernaryQuadraticForm, B: TernaryQuadraticForm) -> tuple:
    """Rational coefficients of 4 det(xA - yB), x^3 first."""
    cs = (A.det, -_trace_prod(A.adjugate(), B.gram),
          _trace_prod(A.gram, B.adjugate()), -B.det)
    return tuple(4 * t for t in cs)


def resolvent(A: TernaryQuadraticForm, B: TernaryQuadraticForm) -> BinaryCubicForm:
    """4 det(xA - yB) as a binary cubic form."""
    out = []
    for t in resolvent_coefficients(A, B):
        if t.denominator != 1:
            raise ValueError("resolvent is not integral")
        out.append(int(t))
    return BinaryCubicForm(*out)


@dataclass(frozen=True)
class QFPair:
    A: TernaryQuadraticForm
    B: TernaryQuadraticForm

    @cached_property
    def resolvent(self) -> BinaryCubicForm:
        return resolvent(self.A, self.B)

    def det_pencil(self, x, y=1) -> Fraction:
        """det(xA - yB) at a point."""
        m = tuple(tuple(x * p - y * q for p, q in zip(r, s))
                  for r, s in zip(self.A.gram, self.B.gram))
        return det3(m)

    def to_json(self):
        return {"A": self.A.to_json(), "B": self.B.to_json()}

    @classmethod
    def from_json(cls, obj):
        return cls(TernaryQuadraticForm.from_json(obj["A"]),
                   TernaryQuadraticForm.from_json(obj["B"]))


class HeightKind(Enum):
    Balanced = "bal"
    Weighted = "wei"


def height(f: BinaryCubicForm, kind: HeightKind):
    """Balanced: max(|b|,|c|).  Weighted: max(|b|, sqrt|c|).

    The weighted value is an int whenever it is exact, else a float; use
    ``height_below`` for exact comparisons.
    """
    b, c = abs(f.b), abs(f.c)
    if kind is HeightKind.Balanced:
        return max(b, c)
    r = isqrt(c)
    if b * b >= c:
        return b
    if r * r == c:
        return r
    return c ** 0.5


def height_below(f: BinaryCubicForm, X, kind: HeightKind) -> bool:
    """Exact test of height(f) < X."""
    X = Fraction(X)
    b, c = abs(f.b), abs(f.c)
    if kind is HeightKind.Balanced:
        return b < X and c < X
    if X <= 0:
        return False
    return b < X and c < X * X


def _linmul(p, q):
    out = [0] * (len(p) + len(q) - 1)
    for i, s in enumerate(p):
        for j, t in enumerate(q):
            out[i + j] += s * t
    return out


def gl2_act(gamma, f: BinaryCubicForm) -> BinaryCubicForm:
    """Twisted action det(gamma)^-1 f((x, y) gamma)."""
    (g11, g12), (g21, g22) = gamma
    det = g11 * g22 - g12 * g21
    if det not in (1, -1):
        raise ValueError("gamma must have determinant +-1")
    # linear forms in (x, y) as coefficient lists [x, y]
    u, v = [g11, g21], [g12, g22]
    total = [0, 0, 0, 0]
    for k, coef in enumerate(f.coeffs):
        term = [1]
        for _ in range(3 - k):
            term = _linmul(term, u)
        for _ in range(k):
            term = _linmul(term, v)
        for i, t in enumerate(term):
            total[i] += coef * t
    return BinaryCubicForm(*[det * t for t in total])


def sl3_act(g, pair: QFPair) -> QFPair:
    g = tuple(tuple(operator.index(t) for t in row) for row in g)
    if det3(g) != 1:
        raise ValueError("g must have determinant 1")
    return QFPair(pair.A.act(g), pair.B.act(g))


@dataclass(frozen=True)
class SquarefreeSplit:
    k: int
    m: int


def squarefree_split(n: int) -> SquarefreeSplit:
    """n = k m^2 with k squarefree carrying the sign of n.

    >>> squarefree_split(-8)
    SquarefreeSplit(k=-2, m=2)
    """
    if n == 0:
        raise ValueError("squarefree_split(0) is undefined")
    k, m = (1 if n > 0 else -1), 1
    for p, e in factor(n).items():
        k *= p ** (e % 2)
        m *= p ** (e // 2)
    return SquarefreeSplit(k, m)
