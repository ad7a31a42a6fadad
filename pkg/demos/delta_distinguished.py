"""Decide which forms admit an integral Delta-distinguished pair, two ways.

The residue criterion answers instantly; the search looks for an explicit
pair and checks that its resolvent is the form.
"""
import itertools

from thincubic.forms import BinaryCubicForm, resolvent
from thincubic.local import is_maximal
from thincubic.orbits import Space, delta_dist_criteria, delta_dist_search


def main(a=2, d=3, bound=6):
    agree = found = total = 0
    for b, c in itertools.product(range(-bound, bound + 1), repeat=2):
        f = BinaryCubicForm(a, b, c, d)
        if f.disc == 0 or not is_maximal(f):
            continue
        total += 1
        crit = delta_dist_criteria(f, Space.W)
        res = delta_dist_search(f, Space.W)
        agree += (crit.value == "Found") == res.exists
        if res.exists:
            found += 1
            if found == 1:
                print("first witness for", f.coeffs)
                print("  A =", res.witness.A)
                print("  B =", res.witness.B)
                print("  resolvent:", resolvent(res.witness.A, res.witness.B).coeffs)
    print(f"{total} maximal forms, {found} with a pair, criterion agrees on {agree}")


if __name__ == "__main__":
    main()
