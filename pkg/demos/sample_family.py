"""Draw forms from a thin family and compare fractions with the predictions."""
from fractions import Fraction

from thincubic.arith import primes_upto
from thincubic.averages import FamilySpec, delta_sigma, family_rho_lambda
from thincubic.local import maximal_density
from thincubic.sampler import binomial_band, sample_family


def main(a=1, d=2, X=300, n=5000):
    spec = FamilySpec(a, d, 1)
    s = sample_family(spec, X, n=n, seed=0).stats
    predicted = Fraction(1)
    for p in primes_upto(10 ** 4):
        predicted *= maximal_density(p, a, d)
    rho, lam = family_rho_lambda(spec)
    print(f"family a={a} d={d}, {s.total} draws of positive discriminant")
    for name, k, m, want in (("maximal", s.maximal, s.total, predicted),
                             ("a-side ramified", s.aside_ram, s.maximal, rho),
                             ("d-side ramified", s.dside_ram, s.maximal, lam),
                             ("Delta-distinguished", s.delta_dist, s.maximal, delta_sigma(spec))):
        band = binomial_band(k, m, want)
        print(f"  {name:<20} {band['observed']:.4f} vs {band['expected']:.4f}  z={band['z']:+.2f}")


if __name__ == "__main__":
    main()
