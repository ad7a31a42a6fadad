"""Print the 5x5 grid of class-group average bounds for x -> a x^3 + ... + d y^3.

Cells where the exact bound does not render to the reference three-digit
value are marked with '*'.
"""
from thincubic.averages import table2_grid


def main():
    grid = {(r["a"], r["d"]): r for r in table2_grid()}
    for label, key, flag in (("real", "real_rendered", "real_discrepancy"),
                             ("complex", "complex_rendered", "complex_discrepancy")):
        print(f"\n{label} fields")
        print("d\\a  " + "".join(f"{a:>9}" for a in range(1, 6)))
        for d in range(1, 6):
            row = "".join(f"{grid[a, d][key] + ('*' if grid[a, d][flag] else ' '):>9}"
                          for a in range(1, 6))
            print(f"{d:<5}{row}")


if __name__ == "__main__":
    main()
