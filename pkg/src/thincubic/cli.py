"""Command-line front end.  Every command prints one JSON envelope

    {"command", "version", "seed", "params", "payload", "warnings"}

except ``sample`` (JSON lines, stats trailer last) and ``avg table2 --csv``.
Exit status: 0 on success, 1 on a computation error, 2 on a usage error.
"""
import argparse
import csv
import io
import json
import logging
import os
import sys
from fractions import Fraction

from . import __version__
from .errors import ThinCubicError
from .forms import BinaryCubicForm, HeightKind, frac_str

ENV_THREADS = "THINCUBIC_THREADS"


class _Collect(logging.Handler):
    def __init__(self):
        super().__init__(logging.WARNING)
        self.messages = []

    def emit(self, record):
        self.messages.append(record.getMessage())


def _jsonable(x):
    if isinstance(x, Fraction):
        return frac_str(x)
    if isinstance(x, BinaryCubicForm):
        return list(x.coeffs)
    if hasattr(x, "to_json"):
        return _jsonable(x.to_json())
    if isinstance(x, dict):
        return {str(k.value if hasattr(k, "value") else k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if hasattr(x, "value") and x.__class__.__module__.startswith("thincubic"):
        return x.value
    return x


def _form(s):
    try:
        parts = [int(t) for t in s.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad form {s!r}; expected a,b,c,d")
    if len(parts) != 4:
        raise argparse.ArgumentTypeError("a form needs four coefficients")
    return BinaryCubicForm(*parts)


def _sign(s):
    if s in ("+", "+1", "1", "pos"):
        return 1
    if s in ("-", "-1", "neg"):
        return -1
    raise argparse.ArgumentTypeError("sign must be + or -")


def _height(s):
    try:
        return HeightKind(s)
    except ValueError:
        raise argparse.ArgumentTypeError("height must be bal or wei")


def _floats(s):
    try:
        return [float(t) for t in s.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad list {s!r}")


# commands; each returns (payload, seed)

def cmd_avg(args):
    from .averages import (AverageKind, FamilySpec, Table1Family, avg_cl2_bound,
                           avg_sel2_bound, genus_sum_bound, table1_formula, table2_grid)
    if args.mode == "table2":
        rows = table2_grid()
        if args.csv:
            return _csv(rows), None
        return rows, None
    if args.mode == "table1":
        return [{"family": fam.value, "signature": [r1, r2],
                 "bound": table1_formula(fam, r1, r2)}
                for fam in Table1Family for r1, r2 in ((3, 0), (1, 1))], None
    if args.mode == "sel2":
        if args.d is None:
            raise _Usage("avg sel2 needs --d")
        spec = FamilySpec(1, args.d, args.sign)
        rep = avg_sel2_bound(spec, args.height, samples=args.samples, seed=args.seed)
        stochastic = rep.kind is AverageKind.Sel2RealNeg
        return rep.to_json(), (args.seed if stochastic else None)
    if args.a is None or args.d is None:
        raise _Usage("avg needs --a and --d (or a mode: table1, table2, sel2)")
    spec = FamilySpec(args.a, args.d, args.sign)
    out = avg_cl2_bound(spec).to_json()
    out["genus_sum"] = frac_str(genus_sum_bound(spec))
    return out, None


def _csv(rows):
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=list(rows[0]))
    w.writeheader()
    for r in rows:
        w.writerow({k: frac_str(v) if isinstance(v, Fraction) else v for k, v in r.items()})
    return buf.getvalue()


def cmd_densities(args):
    from .local import RamSide, density_oracle, maximal_density, ram_density, table_counts
    p, a, d = args.p, args.a, args.d
    closed = {"maximal_density": maximal_density(p, a, d),
              "aside_ram_density": ram_density(p, a, d, RamSide.ASide),
              "dside_ram_density": ram_density(p, a, d, RamSide.DSide),
              "splitting_histogram": {k: int(v) for k, v in table_counts(p, a, d).items()}}
    out = {"p": p, "a": a, "d": d, "closed_form": closed}
    if args.oracle:
        rep = density_oracle(p, a, d)
        out["oracle"] = rep.to_json()
        hist = {k: v for k, v in closed["splitting_histogram"].items() if v}
        agree = {"maximal_density": rep.maximal_density == closed["maximal_density"],
                 "aside_ram_density": rep.aside_ram_density == closed["aside_ram_density"],
                 "dside_ram_density": rep.dside_ram_density == closed["dside_ram_density"],
                 "splitting_histogram": hist == rep.splitting_histogram}
        out["agree"] = agree
        for k, ok in agree.items():
            if not ok:
                logging.getLogger("thincubic").warning("oracle and closed form differ: %s", k)
    return out, None


def cmd_delta_dist(args):
    from .orbits import (Space, delta_dist_integral_W, delta_dist_integral_Wvee,
                         delta_dist_search)
    f, space = args.form, Space(args.space)
    res = (delta_dist_integral_W if space is Space.W else delta_dist_integral_Wvee)(f)
    out = {"form": list(f.coeffs), "space": space.value, "criterion": res.to_json()}
    if args.search:
        s = delta_dist_search(f, space)
        out["search"] = s.to_json()
        out["agree"] = s.exists == res.exists
    return out, None


def cmd_maximality(args):
    from .arith import factor
    from .local import is_maximal_at
    f = args.form
    D = f.disc
    if D == 0:
        from .errors import DegenerateForm
        raise DegenerateForm("zero discriminant")
    primes = [args.p] if args.p else [p for p, e in factor(D).items() if e >= 2]
    per = {str(p): is_maximal_at(f, p) for p in primes}
    out = {"form": list(f.coeffs), "disc": D, "tested_primes": per}
    if not args.p:
        out["maximal"] = all(per.values())
    return out, None


def cmd_splitting(args):
    from .local import splitting_type_mod_p
    from .orbits import (delta_dist_antidiagonal, real_orbit_reps,
                         real_soluble_delta_dist, real_splitting_type)
    f = args.form
    out = {"form": list(f.coeffs), "disc": f.disc}
    if args.p:
        out["p"] = args.p
        out["type"] = splitting_type_mod_p(f, args.p).value
    if args.real:
        if f.a == 1 and f.d != 0 and f.disc != 0:
            out["delta_dist_real_type"] = real_splitting_type(delta_dist_antidiagonal(f)).value
            out["delta_dist_real_soluble"] = real_soluble_delta_dist(f)
        if f.a == 1 and f.disc > 0:
            out["real_orbits"] = [real_splitting_type(q).value for q in real_orbit_reps(f)]
    if not args.p and not args.real:
        raise _Usage("splitting needs --p and/or --real")
    return out, None


def cmd_count_detk(args):
    from .latticecount import SkewBox, count_bruteforce, count_fixed_det, growth_exponent
    if args.mode == "fit":
        if not args.ys:
            raise _Usage("count-detk fit needs --ys")
        return growth_exponent(args.k, args.ys, field=args.field, lattice=args.lattice), None
    if args.Y is None:
        raise _Usage("count-detk needs --Y")
    box = SkewBox(args.s1, args.s2, args.Y)
    cb = count_fixed_det(args.k, box, args.lattice)
    out = {"bounds": list(box.bounds), "counts": cb.to_json()}
    if args.oracle:
        ob = count_bruteforce(args.k, box, args.lattice)
        out["oracle"] = ob.to_json()
        out["agree"] = ob == cb
    return out, None


def cmd_pi(args):
    from .averages import pi_d_estimate
    ladder = tuple(args.ladder) if args.ladder else (1e2, 1e3, 1e4)
    r = pi_d_estimate(args.d, args.height, X_ladder=ladder, samples=args.samples,
                      seed=args.seed)
    return r, args.seed


def cmd_sample(args):
    from .averages import FamilySpec
    from .sampler import enumerate_family, sample_family
    spec = FamilySpec(args.a, args.d, args.sign)
    if args.n:
        s = sample_family(spec, args.X, args.height, n=args.n, seed=args.seed,
                          with_delta=args.delta)
        seed = args.seed
    else:
        s = enumerate_family(spec, args.X, args.height, with_delta=args.delta,
                             stats_only=args.stats_only)
        seed = None
    return s, seed


def cmd_selftest(args):
    from .selftest import run_selftest
    r = run_selftest(strict=args.strict)
    if not args.verbose:
        r["checks"] = [c for c in r["checks"] if not c["ok"]]
    return r, None


class _Usage(Exception):
    pass


def build_parser():
    p = argparse.ArgumentParser(prog="thincubic", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    p.add_argument("--threads", type=int, default=None,
                   help=f"cap on worker threads (default ${ENV_THREADS} or all cores)")
    p.add_argument("--out", default=None, help="write output to FILE instead of stdout")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("avg", help="theoretical average bounds")
    s.add_argument("mode", nargs="?", choices=["table1", "table2", "sel2"])
    s.add_argument("--a", type=int)
    s.add_argument("--d", type=int)
    s.add_argument("--sign", type=_sign, default=1)
    s.add_argument("--height", type=_height, default=HeightKind.Weighted)
    s.add_argument("--samples", type=int, default=10 ** 6)
    s.add_argument("--seed", type=int, default=0)
    g = s.add_mutually_exclusive_group()
    g.add_argument("--csv", action="store_true")
    g.add_argument("--json", action="store_true")
    s.set_defaults(func=cmd_avg)

    s = sub.add_parser("densities", help="local densities at p, optionally with the oracle")
    s.add_argument("--p", type=int, required=True)
    s.add_argument("--a", type=int, required=True)
    s.add_argument("--d", type=int, required=True)
    s.add_argument("--oracle", action="store_true")
    s.set_defaults(func=cmd_densities)

    s = sub.add_parser("delta-dist", help="integral Delta-distinguished representatives")
    s.add_argument("--form", type=_form, required=True)
    s.add_argument("--space", choices=["W", "Wvee"], default="W")
    s.add_argument("--search", action="store_true")
    s.set_defaults(func=cmd_delta_dist)

    s = sub.add_parser("maximality", help="Dedekind criterion")
    s.add_argument("--form", type=_form, required=True)
    s.add_argument("--p", type=int)
    s.set_defaults(func=cmd_maximality)

    s = sub.add_parser("splitting", help="splitting type mod p and over the reals")
    s.add_argument("--form", type=_form, required=True)
    s.add_argument("--p", type=int)
    s.add_argument("--real", action="store_true")
    s.set_defaults(func=cmd_splitting)

    s = sub.add_parser("count-detk", help="forms of fixed 4*det in a skewed box")
    s.add_argument("mode", nargs="?", choices=["fit"])
    s.add_argument("--k", type=int, required=True)
    s.add_argument("--Y", type=float)
    s.add_argument("--s1", type=float, default=1.0)
    s.add_argument("--s2", type=float, default=1.0)
    s.add_argument("--ys", type=_floats)
    s.add_argument("--field", default="N",
                   choices=["N", "N_star", "N_delta_zero", "N_delta_nonzero",
                            "N_star_delta_zero", "N_star_delta_nonzero"])
    s.add_argument("--lattice", choices=["half", "integer"], default="half")
    s.add_argument("--oracle", action="store_true")
    s.set_defaults(func=cmd_count_detk)

    s = sub.add_parser("pi", help="Monte Carlo estimate of the real-root proportion")
    s.add_argument("--d", type=int, required=True)
    s.add_argument("--height", type=_height, default=HeightKind.Weighted)
    s.add_argument("--samples", type=int, default=10 ** 6)
    s.add_argument("--ladder", type=_floats)
    s.add_argument("--seed", type=int, default=0)
    s.set_defaults(func=cmd_pi)

    s = sub.add_parser("sample", help="maximal forms of a thin family")
    s.add_argument("--a", type=int, required=True)
    s.add_argument("--d", type=int, required=True)
    s.add_argument("--X", type=float, required=True)
    s.add_argument("--height", type=_height, default=HeightKind.Balanced)
    s.add_argument("--sign", type=_sign, default=1)
    s.add_argument("--stats-only", action="store_true")
    s.add_argument("--delta", action="store_true", help="also count Delta-distinguished forms")
    s.add_argument("--n", type=int, help="uniform draws instead of a full scan")
    s.add_argument("--seed", type=int, default=0)
    s.set_defaults(func=cmd_sample)

    s = sub.add_parser("selftest", help="oracle versus closed-form suites")
    s.add_argument("--strict", action="store_true", help="fail on known closed-form defects too")
    s.add_argument("--verbose", action="store_true", help="list passing checks as well")
    s.set_defaults(func=cmd_selftest)
    return p


def _params(args):
    skip = {"func", "out", "command"}
    return _jsonable({k: v for k, v in vars(args).items() if k not in skip})


def _set_threads(n):
    if n is None:
        n = os.environ.get(ENV_THREADS)
    if n is None:
        return
    import numba
    numba.set_num_threads(max(1, min(int(n), numba.config.NUMBA_NUM_THREADS)))


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    collect = _Collect()
    root = logging.getLogger("thincubic")
    root.addHandler(collect)
    try:
        _set_threads(args.threads)
        payload, seed = args.func(args)
    except _Usage as e:
        parser.error(str(e))
    except (ThinCubicError, ValueError, ArithmeticError) as e:
        print(f"thincubic {args.command}: {type(e).__name__}: {e}", file=sys.stderr)
        return 1
    finally:
        root.removeHandler(collect)
    out = open(args.out, "w") if args.out else sys.stdout
    try:
        if args.command == "sample":
            for f in payload.forms:
                out.write(json.dumps(list(f.coeffs)) + "\n")
            trailer = _envelope(args, payload.to_json(with_forms=False), seed, collect)
            out.write(json.dumps(trailer) + "\n")
        elif isinstance(payload, str):
            out.write(payload)
        else:
            out.write(json.dumps(_envelope(args, payload, seed, collect), indent=1) + "\n")
    finally:
        if out is not sys.stdout:
            out.close()
    if args.command == "selftest" and not payload["passed"]:
        return 1
    return 0


def _envelope(args, payload, seed, collect):
    return {"command": args.command, "version": __version__, "seed": seed,
            "params": _params(args), "payload": _jsonable(payload),
            "warnings": collect.messages}


if __name__ == "__main__":
    sys.exit(main())
