"""Enumerating and sampling thin families at bounded height.

``enumerate_family`` scans the whole height box in (b, c) lexicographic
order.  At X = 10^3 a box holds about 4 * 10^6 forms, so the statistical
checks use ``sample_family`` instead, which draws (b, c) uniformly from
the same box with a seeded generator.
"""
import logging
import math
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np

from .arith import factor
from .averages import ExplicitResidues, FamilySpec
from .errors import DegenerateForm
from .forms import BinaryCubicForm, HeightKind, squarefree_split
from .local import RamSide, is_maximal, is_suff_ramified
from .orbits import delta_dist_integral_W

log = logging.getLogger(__name__)

__all__ = ["FamilyStats", "FamilySample", "enumerate_family", "sample_family",
           "empirical_delta_density", "binomial_band", "FACTOR_LIMIT"]

# discriminants above this are not factored; such forms count as unresolved
FACTOR_LIMIT = 10 ** 40


@dataclass
class FamilyStats:
    scanned: int = 0
    total: int = 0
    maximal: int = 0
    aside_ram: int = 0
    dside_ram: int = 0
    positive_disc: int = 0
    delta_dist: Optional[int] = None
    unresolved: int = 0

    def to_json(self):
        return asdict(self)

    @classmethod
    def from_json(cls, obj):
        return cls(**obj)


@dataclass
class FamilySample:
    spec: FamilySpec
    X: float
    kind: HeightKind
    forms: list = field(default_factory=list)
    stats: FamilyStats = field(default_factory=FamilyStats)
    seed: Optional[int] = None

    def to_json(self, with_forms=True):
        out = {"spec": self.spec.to_json(), "X": self.X, "kind": self.kind.value,
               "stats": self.stats.to_json(), "seed": self.seed}
        if with_forms:
            out["forms"] = [list(f.coeffs) for f in self.forms]
        return out

    @classmethod
    def from_json(cls, obj):
        return cls(FamilySpec.from_json(obj["spec"]), obj["X"], HeightKind(obj["kind"]),
                   [BinaryCubicForm(*c) for c in obj.get("forms", [])],
                   FamilyStats.from_json(obj["stats"]), obj.get("seed"))


def _box(X, kind):
    """Half-open ranges |b| < Rb, |c| < Rc for height < X."""
    if X <= 0:
        raise ValueError("X must be positive")
    Rb = math.ceil(X)
    Rc = math.ceil(X * X) if kind is HeightKind.Weighted else Rb
    return Rb, Rc


def _admits(spec, b, c):
    for p, cond in spec.local_conditions.items():
        if isinstance(cond, ExplicitResidues) and not cond.admits(b, c):
            return False
    return True


def _ram_primes(n):
    k = abs(squarefree_split(n).k)
    return sorted(factor(k)) if k > 1 else []


class _Classifier:
    def __init__(self, spec, with_delta):
        self.spec = spec
        self.pa = _ram_primes(spec.a)
        self.pd = _ram_primes(spec.d)
        self.with_delta = with_delta

    def __call__(self, b, c, stats, out):
        f = BinaryCubicForm(self.spec.a, b, c, self.spec.d)
        D = f.disc
        if D == 0:
            return
        stats.scanned += 1
        if D > 0:
            stats.positive_disc += 1
        if (D > 0) != (self.spec.sign > 0) or not _admits(self.spec, b, c):
            return
        stats.total += 1
        if abs(D) > FACTOR_LIMIT:
            stats.unresolved += 1
            return
        try:
            if not is_maximal(f):
                return
        except DegenerateForm:
            return
        stats.maximal += 1
        if all(is_suff_ramified(f, p, RamSide.ASide) for p in self.pa):
            stats.aside_ram += 1
        if all(is_suff_ramified(f, p, RamSide.DSide) for p in self.pd):
            stats.dside_ram += 1
        if self.with_delta and delta_dist_integral_W(f).exists:
            stats.delta_dist += 1
        if out is not None:
            out.append(f)


def enumerate_family(spec: FamilySpec, X, kind: HeightKind = HeightKind.Balanced,
                     with_delta: bool = False, stats_only: bool = False) -> FamilySample:
    """All maximal forms in the family with height < X, ordered by (b, c)."""
    Rb, Rc = _box(X, kind)
    stats = FamilyStats(delta_dist=0 if with_delta else None)
    forms = None if stats_only else []
    classify = _Classifier(spec, with_delta)
    for b in range(-Rb + 1, Rb):
        for c in range(-Rc + 1, Rc):
            classify(b, c, stats, forms)
    if stats.unresolved:
        log.warning("%d forms left unresolved", stats.unresolved)
    return FamilySample(spec, X, kind, forms or [], stats)


def sample_family(spec: FamilySpec, X, kind: HeightKind = HeightKind.Balanced,
                  n: int = 20000, seed: int = 0, with_delta: bool = True) -> FamilySample:
    """Classify n uniform draws (with replacement) from the height box.

    Draws of the wrong discriminant sign or outside the local conditions
    are counted in ``scanned`` but do not enter ``total``.
    """
    Rb, Rc = _box(X, kind)
    rng = np.random.default_rng(seed)
    bs = rng.integers(-Rb + 1, Rb, size=n)
    cs = rng.integers(-Rc + 1, Rc, size=n)
    stats = FamilyStats(delta_dist=0 if with_delta else None)
    forms = []
    classify = _Classifier(spec, with_delta)
    for b, c in zip(bs.tolist(), cs.tolist()):
        classify(b, c, stats, forms)
    return FamilySample(spec, X, kind, forms, stats, seed)


def empirical_delta_density(spec: FamilySpec, X, kind: HeightKind = HeightKind.Balanced,
                            n: Optional[int] = None, seed: int = 0) -> float:
    """Fraction of maximal forms with an integral Delta-distinguished pair.

    Exhaustive when n is None, otherwise from n uniform draws.
    """
    if n is None:
        s = enumerate_family(spec, X, kind, with_delta=True, stats_only=True)
    else:
        s = sample_family(spec, X, kind, n=n, seed=seed)
    if s.stats.maximal == 0:
        raise ValueError("no maximal forms in range")
    return s.stats.delta_dist / s.stats.maximal


def binomial_band(successes: int, trials: int, expected, width: float = 3.0) -> dict:
    """z-score of an observed proportion against an expected one."""
    p = float(expected)
    phat = successes / trials
    sigma = math.sqrt(max(p * (1 - p), 1e-300) / trials)
    z = (phat - p) / sigma if p * (1 - p) > 0 else (0.0 if phat == p else math.inf)
    return {"observed": phat, "expected": p, "sigma": sigma, "z": z,
            "within": abs(z) <= width}
