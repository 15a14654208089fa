"""Command-line front end: identity, lvalue, stickelberger, field, verify,
sweep.

Exit codes: 0 all checks passed; 1 some check failed; 2 datum/config error;
3 undecided (not a failure: raise --bits).
"""

import argparse
import json
import sys
from fractions import Fraction

from .ball import set_working_precision
from .grpring import InputError
from .lfun import (AbelianFieldRealization, DirichletChar, LSpec,
                   l_jet, stickelberger_element)
from .numfld import (DatumError, QuadField, class_number,
                     class_group_structure, fundamental_unit,
                     is_fundamental_discriminant)
from .sublat import CapacityError, norm_sum_identity, enumerate_omega_star
from .verify import (ConfigError, Scenario, certificate_summary,
                     load_scenario, run_scenario)


def main(argv=None):
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--bits", type=int, default=argparse.SUPPRESS,
                        help="working precision in bits (default 128)")
    common.add_argument("--order", type=int, default=argparse.SUPPRESS,
                        help="jet truncation order override")
    common.add_argument("--jobs", type=int, default=argparse.SUPPRESS,
                        help="parallel scenario workers for sweep")
    common.add_argument("--out", default=argparse.SUPPRESS,
                        help="write the JSON report to this path")
    parser = argparse.ArgumentParser(
        prog="stark-lab", parents=[common],
        description="Exact and certified-numeric checks for equivariant "
                    "L-value identities over abelian fields")
    parser.set_defaults(bits=128, order=None, jobs=1, out=None)
    sub = parser.add_subparsers(dest="command", required=True)

    p_id = sub.add_parser("identity", parents=[common],
                          help="expand the subgroup-norm identity on (Z/p)^m")
    p_id.add_argument("--p", type=int, required=True)
    p_id.add_argument("--m", type=int, required=True)

    p_lv = sub.add_parser("lvalue", parents=[common],
                          help="certified L-jet at s = 0")
    p_lv.add_argument("--modulus", type=int, required=True)
    p_lv.add_argument("--char-index", type=int, default=0,
                      help="index into the character list of the modulus "
                           "realization (0 = trivial)")
    p_lv.add_argument("--kernel", type=int, nargs="*", default=None,
                      help="kernel generators of the realization (defaults "
                           "to the quadratic realization for fundamental "
                           "discriminants)")
    p_lv.add_argument("--S", type=str, nargs="*", default=["inf"])
    p_lv.add_argument("--T", type=int, nargs="*", default=[])

    p_st = sub.add_parser("stickelberger", parents=[common],
                          help="Stickelberger element of an abelian field")
    p_st.add_argument("--field", required=True,
                      help='"Q", a fundamental discriminant, or "d1,d2"')
    p_st.add_argument("--S", type=str, nargs="+", required=True)
    p_st.add_argument("--V", type=str, nargs="*", default=[])
    p_st.add_argument("--T", type=int, nargs="*", default=[])

    p_f = sub.add_parser("field", parents=[common], help="quadratic field data")
    p_f.add_argument("--disc", type=int, required=True)
    p_f.add_argument("what", choices=["classgroup", "unit"])

    p_v = sub.add_parser("verify", parents=[common], help="run a scenario file")
    p_v.add_argument("scenario", help="path to a scenario JSON file")

    p_s = sub.add_parser("sweep", parents=[common], help="run every scenario in a directory")
    p_s.add_argument("directory")

    args = parser.parse_args(argv)
    set_working_precision(args.bits)
    try:
        return _dispatch(args)
    except (DatumError, ConfigError, InputError, CapacityError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def _dispatch(args):
    if args.command == "identity":
        element = norm_sum_identity(args.p, args.m)
        hs = enumerate_omega_star(args.p, args.m)
        print(f"sum of subgroup norms over {hs.count_proper()} hyperplanes "
              f"+ correction = {args.p}^{args.m - 1}")
        print(f"identity element: {element!r}")
        print("PASS")
        return 0

    if args.command == "lvalue":
        if args.kernel is None:
            if not is_fundamental_discriminant(args.modulus) \
                    and args.modulus != 1:
                print("error: give --kernel or a fundamental discriminant",
                      file=sys.stderr)
                return 2
            real = AbelianFieldRealization.rationals() if args.modulus == 1 \
                else AbelianFieldRealization.quadratic(args.modulus)
        else:
            real = AbelianFieldRealization(args.modulus, args.kernel)
        chars = real.group.all_characters()
        if not 0 <= args.char_index < len(chars):
            print(f"error: char index out of range 0..{len(chars)-1}",
                  file=sys.stderr)
            return 2
        chi = real.dirichlet(chars[args.char_index])
        S = _places(args.S)
        spec = LSpec(chi, S, args.T, truncation=args.order, prec=args.bits)
        jet = l_jet(spec)
        report = {
            "modulus": args.modulus,
            "char_index": args.char_index,
            "S": S, "T": args.T,
            "order": jet.order,
            "coeffs": [_coeff_json(c) for c in jet.coeffs],
            "params": jet.params,
        }
        _emit(report, args.out)
        return 0

    if args.command == "stickelberger":
        real = _field_realization(args.field)
        theta = stickelberger_element(real, _places(args.S),
                                      _places(args.V), args.T,
                                      prec=args.bits,
                                      truncation=args.order)
        _emit(theta.to_json(), args.out)
        return 0

    if args.command == "field":
        D = args.disc
        if args.what == "classgroup":
            cg = class_group_structure(D)
            from .hnf import invariant_factors_from_diagonal
            diag, _, _ = cg.structure.invariants()
            inv = invariant_factors_from_diagonal(diag)
            _emit({"disc": D, "h": class_number(D),
                   "invariant_factors": inv or [1]}, args.out)
            return 0
        if D <= 0:
            print("error: units require a real quadratic field",
                  file=sys.stderr)
            return 2
        eps = fundamental_unit(D)
        from .ball import ball_log
        _emit({"disc": D,
               "unit": {"a": str(eps.a), "b": str(eps.b),
                        "sqrt": QuadField(D).m},
               "norm": int(eps.norm()),
               "log": ball_log(eps.embedding_ball()).to_json()}, args.out)
        return 0

    if args.command == "verify":
        scn = load_scenario(args.scenario)
        scn.bits = args.bits if args.bits != 128 else scn.bits
        cert = run_scenario(scn)
        print(certificate_summary(cert))
        if args.out:
            with open(args.out, "w") as fh:
                json.dump(cert, fh, indent=2, default=str)
        return cert["exit_code"]

    if args.command == "sweep":
        import glob
        import os
        paths = sorted(glob.glob(os.path.join(args.directory, "*.json")))
        if not paths:
            print("error: no scenario files found", file=sys.stderr)
            return 2
        certs = _run_many(paths, args.jobs)
        for cert in certs:
            print(certificate_summary(cert))
        codes = [c["exit_code"] for c in certs]
        if args.out:
            with open(args.out, "w") as fh:
                json.dump(certs, fh, indent=2, default=str)
        if any(c == 2 for c in codes):
            return 2
        if any(c == 1 for c in codes):
            return 1
        if any(c == 3 for c in codes):
            return 3
        return 0
    raise AssertionError("unreachable")


def _run_many(paths, jobs):
    if jobs <= 1:
        return [run_scenario(load_scenario(p)) for p in paths]
    from concurrent.futures import ProcessPoolExecutor
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(_run_one_path, paths))


def _run_one_path(path):
    return run_scenario(load_scenario(path))


def _places(values):
    out = []
    for v in values:
        out.append("inf" if v in ("inf", "oo") else int(v))
    return out


def _field_realization(text):
    if text.strip().upper() == "Q":
        return AbelianFieldRealization.rationals()
    if "," in text:
        discs = [int(x) for x in text.split(",")]
        return AbelianFieldRealization.multiquadratic(discs)
    return AbelianFieldRealization.quadratic(int(text))


def _coeff_json(c):
    from .ball import Ball, CBall
    if isinstance(c, Fraction):
        return f"{c.numerator}/{c.denominator}"
    if isinstance(c, Ball):
        return c.to_json()
    if isinstance(c, CBall):
        return {"re": c.re.to_json(), "im": c.im.to_json()}
    return str(c)


def _emit(obj, out):
    text = json.dumps(obj, indent=2, default=str)
    print(text)
    if out:
        with open(out, "w") as fh:
            fh.write(text + "\n")


if __name__ == "__main__":
    sys.exit(main())
