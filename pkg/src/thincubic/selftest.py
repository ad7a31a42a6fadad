"""Oracle-versus-closed-form suites behind ``thincubic selftest``.

Each suite returns a list of check records ``{"suite", "case", "ok", ...}``.
Mismatches that belong to the documented families of closed-form
defects are marked ``known``; see ``KNOWN_DEFECTS``.
"""
import itertools
from fractions import Fraction

from .averages import (FamilySpec, Table1Family, avg_cl2_bound, genus_sum_bound,
                       hanke_identity_check, table1_formula)
from .errors import NotMaximal
from .forms import BinaryCubicForm, frac_str
from .latticecount import SkewBox, count_bruteforce, count_fixed_det
from .local import (RamSide, density_oracle, is_maximal, maximal_density,
                    ram_density, table_counts)
from .orbits import Space, delta_dist_criteria, delta_dist_search

__all__ = ["KNOWN_DEFECTS", "run_selftest", "density_cases"]

PRIMES = (2, 3, 5, 7, 11, 13)

# closed-form cells known to disagree with exhaustive counting
KNOWN_DEFECTS = {
    "maximal_density": "p = 1 mod 3, p not dividing ad: true density is 1 - p^-2 + p^-3",
    "ram_density": "valuation >= 2 on one side, unit on the other: true density is 1/(p+1)",
    "table_counts": "p = 1 mod 3, p not dividing ad: counts depend on whether d/a is a cube",
}


def _known(name, p, va, vd, side=None):
    if name in ("maximal_density", "table_counts"):
        return va == 0 and vd == 0 and p % 3 == 1
    if name == "ram_density":
        v_own, v_other = (va, vd) if side is RamSide.ASide else (vd, va)
        return v_own >= 2 and v_other == 0
    return False


def density_cases(p):
    """Representatives (a, d) for each valuation pair in {0,1,2}^2.

    Units run over 1 and a non-cube (when one exists) so that both values
    of the cube character are exercised.
    """
    units = [1]
    if p % 3 == 1:
        units.append(next(u for u in range(2, p) if pow(u, (p - 1) // 3, p) != 1))
    for va, vd in itertools.product(range(3), repeat=2):
        for u in units:
            yield va, vd, p ** va, u * p ** vd


def _density_suite():
    out = []
    for p in PRIMES:
        for va, vd, a, d in density_cases(p):
            rep = density_oracle(p, a, d)
            case = f"p={p} a={a} d={d}"
            checks = [("maximal_density", None, rep.maximal_density, maximal_density(p, a, d)),
                      ("ram_density", RamSide.ASide, rep.aside_ram_density,
                       ram_density(p, a, d, RamSide.ASide)),
                      ("ram_density", RamSide.DSide, rep.dside_ram_density,
                       ram_density(p, a, d, RamSide.DSide))]
            for name, side, got, want in checks:
                ok = got == want
                out.append({"suite": "densities", "case": case + (f" {side.value}" if side else ""),
                            "check": name, "oracle": frac_str(got), "closed_form": frac_str(want),
                            "ok": ok, "known": not ok and _known(name, p, va, vd, side)})
            table = {k: int(v) for k, v in table_counts(p, a, d).items() if v}
            ok = table == {k: v for k, v in rep.splitting_histogram.items() if v}
            out.append({"suite": "densities", "case": case, "check": "table_counts",
                        "ok": ok, "known": not ok and _known("table_counts", p, va, vd)})
    return out


def _delta_suite(bound=12):
    out = []
    mismatches = 0
    n = 0
    for a, d in itertools.product(range(1, 4), repeat=2):
        for b, c in itertools.product(range(-bound, bound + 1), repeat=2):
            f = BinaryCubicForm(a, b, c, d)
            if f.disc == 0 or not is_maximal(f):
                continue
            for space in Space:
                crit = delta_dist_criteria(f, space).value == "Found"
                if crit != delta_dist_search(f, space, check=False).exists:
                    mismatches += 1
                n += 1
    out.append({"suite": "delta-dist", "case": f"a,d in 1..3, |b|,|c| <= {bound}",
                "checks": n, "mismatches": mismatches, "ok": mismatches == 0, "known": False})
    return out


def _lattice_suite():
    box = SkewBox(1, 1, 1)
    bad = [k for k in range(-12, 13) if k
           and count_fixed_det(k, box) != count_bruteforce(k, box)]
    return [{"suite": "lattice-count", "case": "bounds 1, |k| <= 12",
             "mismatched_k": bad, "ok": not bad, "known": False}]


def _average_suite():
    out = []
    bad = []
    for a, d in itertools.product(range(-8, 9), repeat=2):
        if a == 0 or d == 0:
            continue
        for s in (1, -1):
            spec = FamilySpec(a, d, s)
            if avg_cl2_bound(spec).bound != genus_sum_bound(spec):
                bad.append((a, d, s))
    out.append({"suite": "averages", "case": "closed form vs genus sum, |a|,|d| <= 8",
                "mismatched": bad, "ok": not bad, "known": False})
    want = {(Table1Family.Full, 3, 0): Fraction(5, 4), (Table1Family.Full, 1, 1): Fraction(3, 2),
            (Table1Family.Monogenised, 3, 0): Fraction(3, 2),
            (Table1Family.Monogenised, 1, 1): Fraction(2),
            (Table1Family.UnitMonogenised, 3, 0): Fraction(2),
            (Table1Family.UnitMonogenised, 1, 1): Fraction(45, 14)}
    ok = all(table1_formula(fam, r1, r2) == v for (fam, r1, r2), v in want.items())
    out.append({"suite": "averages", "case": "table1 families", "ok": ok, "known": False})
    ok = all(hanke_identity_check(t, trials=20, seed=t) for t in range(1, 6))
    out.append({"suite": "averages", "case": "sign-vector product identity", "ok": ok,
                "known": False})
    return out


def run_selftest(strict: bool = False) -> dict:
    """Run every suite.  Passes unless some mismatch is not a known defect
    (or, with strict, unless everything matches)."""
    checks = _density_suite() + _delta_suite() + _lattice_suite() + _average_suite()
    failed = [c for c in checks if not c["ok"]]
    unexpected = [c for c in failed if not c["known"]]
    passed = not (failed if strict else unexpected)
    return {"passed": passed, "n_checks": len(checks), "n_failed": len(failed),
            "n_known": len(failed) - len(unexpected), "known_defects": KNOWN_DEFECTS,
            "checks": checks}
