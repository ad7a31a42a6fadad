"""Compare closed-form local densities with exhaustive counting mod p^2.

The oracle enumerates (b, c) mod p^2 with a, d fixed and tests maximality
and ramification directly, so it shares no code with the closed forms.
"""
import sys

from thincubic.forms import frac_str
from thincubic.local import RamSide, density_oracle, maximal_density, ram_density


def main(primes=(2, 3, 5, 7)):
    for p in primes:
        for a, d in ((1, 1), (1, 2), (p, 1), (1, p), (p * p, 1)):
            rep = density_oracle(p, a, d)
            closed = (maximal_density(p, a, d), ram_density(p, a, d, RamSide.ASide),
                      ram_density(p, a, d, RamSide.DSide))
            counted = (rep.maximal_density, rep.aside_ram_density, rep.dside_ram_density)
            marks = ["" if x == y else " <-" for x, y in zip(closed, counted)]
            print(f"p={p:<2} a={a:<3} d={d:<3} "
                  + "   ".join(f"{frac_str(x)} vs {frac_str(y)}{m}"
                              for x, y, m in zip(closed, counted, marks)))


if __name__ == "__main__":
    main(tuple(int(t) for t in sys.argv[1:]) or (2, 3, 5, 7))
