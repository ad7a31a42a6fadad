"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line."""
import itertools
import random
import time
from fractions import Fraction

import pytest

from thincubic.arith import primes_upto
from thincubic.averages import (REFERENCE_GRID, FamilySpec, Table1Family, delta_sigma,
                                family_rho_lambda, hanke_identity_check, pi_d_estimate,
                                table1_formula, table2_grid)
from thincubic.forms import (BinaryCubicForm, QFPair, TernaryQuadraticForm,
                             resolvent_coefficients, sl3_act)
from thincubic.latticecount import SkewBox, count_bruteforce, count_fixed_det, growth_exponent
from thincubic.local import (RamSide, density_oracle, is_maximal, local_mass,
                             maximal_density, ram_density, table_counts)
from thincubic.orbits import (DeltaDistReason, RealSplittingType, Space, delta_dist_criteria,
                              delta_dist_integral_W, delta_dist_integral_Wvee,
                              delta_dist_search, real_mass, real_orbit_reps, real_splitting_type)
from thincubic.sampler import binomial_band, sample_family

F = BinaryCubicForm


@pytest.fixture
def report(capsys):
    def emit(n, ok, detail):
        with capsys.disabled():
            print(f"\nCRITERION {n}: {'PASS' if ok else 'FAIL'} - {detail}")
    return emit


def test_criterion_1_table2(report):
    t0 = time.perf_counter()
    grid = table2_grid()
    elapsed = time.perf_counter() - t0
    excluded = {(2, 5), (5, 2), (5, 5)}
    bad = []
    for r in grid:
        key = (r["a"], r["d"])
        pub_real, pub_cplx = REFERENCE_GRID[key]
        if r["complex_rendered"] != pub_cplx:
            bad.append((key, "complex", r["complex_rendered"], pub_cplx))
        if key in excluded:
            if not r["real_discrepancy"]:
                bad.append((key, "real flag missing", r["real_rendered"], pub_real))
        elif r["real_rendered"] != pub_real:
            bad.append((key, "real", r["real_rendered"], pub_real))
    cells = {(r["a"], r["d"]): r["real_rendered"] for r in grid}
    emitted = [cells[k] for k in ((2, 5), (5, 2), (5, 5))]
    ok = not bad and emitted == ["1.419", "1.419", "1.333"] and elapsed < 1
    report(1, ok, f"{len(bad)} cell mismatches {bad}; excluded cells emit {emitted}; "
                  f"{elapsed:.3f}s")
    assert emitted == ["1.419", "1.419", "1.333"]
    assert elapsed < 1
    assert not bad


def test_criterion_2_table1(report):
    T = Table1Family
    want = {(T.Full, 3, 0): Fraction(5, 4), (T.Full, 1, 1): Fraction(3, 2),
            (T.Monogenised, 3, 0): Fraction(3, 2), (T.Monogenised, 1, 1): Fraction(2),
            (T.UnitMonogenised, 3, 0): Fraction(2),
            (T.UnitMonogenised, 1, 1): 3 + Fraction(3, 14)}
    got = {k: table1_formula(*k) for k in want}
    ok = got == want
    report(2, ok, "six table1 averages exact" if ok else f"got {got}")
    assert ok


def _valuation_cases():
    for p in (2, 3, 5, 7, 11, 13):
        units = [1]
        if p % 3 == 1:
            units.append(next(u for u in range(2, p) if pow(u, (p - 1) // 3, p) != 1))
        for va, vd in itertools.product(range(3), repeat=2):
            for u in units:
                yield p, p ** va, u * p ** vd


def test_criterion_3_density_oracle(report):
    t0 = time.perf_counter()
    bad = []
    n = 0
    for p, a, d in _valuation_cases():
        rep = density_oracle(p, a, d)
        pairs = [("maximal", rep.maximal_density, maximal_density(p, a, d)),
                 ("aside", rep.aside_ram_density, ram_density(p, a, d, RamSide.ASide)),
                 ("dside", rep.dside_ram_density, ram_density(p, a, d, RamSide.DSide))]
        for name, got, want in pairs:
            n += 1
            if got != want:
                bad.append(f"p={p} a={a} d={d} {name}: oracle {got} vs closed {want}")
        n += 1
        table = {k: int(v) for k, v in table_counts(p, a, d).items() if v}
        if table != {k: v for k, v in rep.splitting_histogram.items() if v}:
            bad.append(f"p={p} a={a} d={d} histogram")
    elapsed = time.perf_counter() - t0
    ok = not bad and elapsed < 120
    report(3, ok, f"{len(bad)}/{n} exact comparisons differ in {elapsed:.1f}s"
                  + ("" if ok else "; " + "; ".join(bad)))
    assert elapsed < 120
    assert not bad


def test_criterion_4_delta_dist(report):
    t0 = time.perf_counter()
    rng = random.Random(2024)
    mismatches, witnesses, total = [], 0, 0
    per_family = {}
    for a, d in itertools.product(range(1, 6), repeat=2):
        n = 0
        while n < 500:
            f = F(a, rng.randint(-50, 50), rng.randint(-50, 50), d)
            if f.disc == 0 or not is_maximal(f):
                continue
            n += 1
            for space, crit in ((Space.W, delta_dist_integral_W),
                                (Space.Wvee, delta_dist_integral_Wvee)):
                total += 1
                c = delta_dist_criteria(f, space) is DeltaDistReason.Found
                s = delta_dist_search(f, space, check=False)
                if c != s.exists:
                    mismatches.append((f.coeffs, space.value))
                if s.exists:
                    scale = 1 if space is Space.W else 4
                    res = resolvent_coefficients(s.witness.A, s.witness.B)
                    if res != tuple(scale * t for t in f.coeffs):
                        mismatches.append((f.coeffs, space.value, "witness"))
                    witnesses += 1
                if c:
                    r = crit(f)
                    if not r.exists or r.witness is None:
                        mismatches.append((f.coeffs, space.value, "criterion witness"))
        per_family[(a, d)] = n
    elapsed = time.perf_counter() - t0
    ok = not mismatches and elapsed < 300 and min(per_family.values()) >= 500
    report(4, ok, f"{total} comparisons over 25 families, {len(mismatches)} mismatches, "
                  f"{witnesses} witnesses verified, {elapsed:.1f}s")
    assert not mismatches
    assert elapsed < 300


FAMILIES = [(1, 1), (2, 1), (1, 2), (2, 2), (1, 4)]


def _closed_maximal(a, d, P=10 ** 4):
    out = Fraction(1)
    for p in primes_upto(P):
        out *= maximal_density(p, a, d)
    return out


def _exhaustive_maximal(a, d, P=10 ** 4):
    # local factor 1 - p^-2 + p^-3 away from ad, as exhaustive counting gives
    out = Fraction(1)
    for p in primes_upto(P):
        if (a * d) % p:
            out *= 1 - Fraction(1, p * p) + Fraction(1, p ** 3)
        else:
            out *= maximal_density(p, a, d)
    return out


def test_criterion_5_empirical_densities(report):
    t0 = time.perf_counter()
    failures, lines = [], []
    for a, d in FAMILIES:
        spec = FamilySpec(a, d, 1)
        s = sample_family(spec, 1000, n=20000, seed=a * 10 + d).stats
        rho, lam = family_rho_lambda(spec)
        checks = [("maximal", s.maximal, s.total, _closed_maximal(a, d)),
                  ("aside", s.aside_ram, s.maximal, rho),
                  ("dside", s.dside_ram, s.maximal, lam),
                  ("delta", s.delta_dist, s.maximal, delta_sigma(spec))]
        for name, k, n, want in checks:
            band = binomial_band(k, n, want)
            lines.append(f"({a},{d}) {name} {band['observed']:.4f} vs {float(want):.4f} "
                         f"z={band['z']:+.1f}")
            if not band["within"]:
                failures.append(lines[-1])
                if name == "maximal":
                    alt = binomial_band(k, n, _exhaustive_maximal(a, d))
                    failures[-1] += f" (z={alt['z']:+.1f} against counted local factors)"
    elapsed = time.perf_counter() - t0
    ok = not failures and elapsed < 300
    report(5, ok, f"{len(failures)}/{len(lines)} fractions outside 3 sigma, {elapsed:.1f}s"
                  + ("" if ok else "; " + "; ".join(failures)))
    assert elapsed < 300
    assert not failures


def test_criterion_6_lattice_count(report):
    t0 = time.perf_counter()
    box = SkewBox(1, 1, 3)
    bad = [k for k in range(-40, 41) if k and count_fixed_det(k, box) != count_bruteforce(k, box)]
    fit = growth_exponent(4, [8, 16, 32, 64])
    elapsed = time.perf_counter() - t0
    ok = not bad and 2.6 <= fit["slope"] <= 3.4 and elapsed < 180
    report(6, ok, f"oracle mismatches at k={bad}; slope {fit['slope']:.3f} over "
                  f"counts {fit['counts']}; {elapsed:.1f}s")
    assert not bad
    assert 2.6 <= fit["slope"] <= 3.4
    assert elapsed < 180


def _random_sl3(rng):
    while True:
        g = [[rng.randint(-2, 2) for _ in range(3)] for _ in range(3)]
        det = (g[0][0] * (g[1][1] * g[2][2] - g[1][2] * g[2][1])
               - g[0][1] * (g[1][0] * g[2][2] - g[1][2] * g[2][0])
               + g[0][2] * (g[1][0] * g[2][1] - g[1][1] * g[2][0]))
        if det == 1:
            return g


def test_criterion_7_structural(report):
    t0 = time.perf_counter()
    rng = random.Random(7)
    problems = []
    # resolvent invariance
    for _ in range(100):
        A = TernaryQuadraticForm.from_coefficients(*[rng.randint(-5, 5) for _ in range(6)])
        B = TernaryQuadraticForm.from_coefficients(*[rng.randint(-5, 5) for _ in range(6)])
        p = QFPair(A, B)
        q = sl3_act(_random_sl3(rng), p)
        if resolvent_coefficients(q.A, q.B) != resolvent_coefficients(A, B):
            problems.append("resolvent invariance")
    # local masses sum to 1
    n = 0
    while n < 400:
        pr = rng.choice([2, 3, 5, 7])
        a = rng.choice([1, pr, pr * pr, 2 * pr + 1])
        d = rng.choice([1, pr, pr + 2])
        f = F(a, rng.randint(-30, 30), rng.randint(-30, 30), d)
        if f.disc == 0 or not is_maximal(f):
            continue
        n += 1
        if sum(local_mass(f, pr, e1, e2) for e1 in (-1, 0, 1) for e2 in (-1, 0, 1)) != 1:
            problems.append(f"mass sum {f.coeffs} at {pr}")
    # product identity
    if not all(hanke_identity_check(t, trials=100, seed=t) for t in range(1, 7)):
        problems.append("sign-vector product identity")
    # Pi_d = 1 for d > 0
    if any(pi_d_estimate(d)["value"] != 1 for d in (1, 9, 17)):
        problems.append("Pi_d for d > 0")
    # real masses
    R = RealSplittingType
    if real_mass(F(1, 0, -1, 0), 1, 1, R.S1111) != Fraction(1, 4):
        problems.append("mass (1111)")
    if real_mass(F(1, 0, 1, 1), 1, 1, R.S112) != Fraction(1, 2):
        problems.append("mass (112)")
    for f, want in ((F(1, -4, 1, 6), Fraction(1, 4)), (F(1, 4, 1, -6), 0),
                    (F(1, 6, 11, 6), Fraction(1, 4))):
        if real_mass(f, 1, 1, R.S22plus) != want or \
                real_mass(f, 1, -1, R.S22plus) != Fraction(1, 4) - want:
            problems.append(f"mass (22+) {f.coeffs}")
    types = [real_splitting_type(q) for q in real_orbit_reps(F(1, -4, 1, 6))]
    if types != [R.S1111, R.S22minus, R.S22plus, R.S22sharp]:
        problems.append(f"real orbit types {types}")
    elapsed = time.perf_counter() - t0
    ok = not problems and elapsed < 60
    report(7, ok, f"{len(problems)} identity failures, {elapsed:.1f}s"
                  + ("" if ok else f": {problems}"))
    assert not problems
    assert elapsed < 60


def test_criterion_8_scope(report):
    # the empirical columns are not produced, and every bound is labelled as a bound
    from thincubic.averages import avg_cl2_bound
    row = table2_grid()[0]
    no_empirical = not any("empirical" in k for k in row)
    label = avg_cl2_bound(FamilySpec(1, 1)).to_json()["label"]
    ok = no_empirical and label == "bound (conjecturally exact)"
    report(8, ok, "empirical class-group columns and asymptotic statements out of scope; "
                  "criteria 3-7 stand in for them")
    assert ok
