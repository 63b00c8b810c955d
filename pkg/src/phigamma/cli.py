"""Command line front end.

    phigamma analyze MODULE          validation, t_N / t_H, admissibility, HN slopes
    phigamma slopes MODULE           HN and Newton slopes
    phigamma construct MODULE        glue, verify, determinant slope
    phigamma verify MODULE           the verification report only
    phigamma recover MODULE          glue then read the filtered module back
    phigamma ord SERIES              order estimate
    phigamma iota SERIES --level n   t-expansion in K_n[[t]]
    phigamma membership MODULE CANDIDATE
    phigamma selftest                the acceptance suite

Exit codes: 0 success, 1 a check or verdict failed (or a library error), 2 usage.
"""
from __future__ import annotations

import argparse
import json
import sys

from . import io
from .construction import det_slope_certificate, glue, recover_filtered, same_filtered, sized_profile, verify_module
from .errors import ParseError, PhiGammaError, ValidationError
from .filtered import hn_slopes, invariants_tn_th, is_admissible, newton_slopes
from .membership import SemistableData, membership
from .robba import LogRobbaElement, PrecisionProfile, RobbaElement, iota, log_operators, ord_estimate

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def basis_names(d):
    return list("efg") if d <= 3 else [f"e{i + 1}" for i in range(d)]


def vector_name(v, names):
    parts = []
    for c, name in zip(v, names):
        if not c:
            continue
        mag = abs(c)
        coef = "" if mag == 1 else f"{io.fmt(mag)}"
        sign = "-" if c < 0 else "+"
        parts.append((sign, f"{coef}{name}"))
    if not parts:
        return "0"
    head = ("-" if parts[0][0] == "-" else "") + parts[0][1]
    return head + "".join(f" {s} {t}" for s, t in parts[1:])


def span_name(basis, d):
    names = basis_names(d)
    return "span(" + ", ".join(vector_name(v, names) for v in basis) + ")"


def _pair(text, flag):
    try:
        a, b = text.split(":")
        return int(a), int(b)
    except ValueError:
        raise UsageError(f"{flag} expects A:B with integers, got {text!r}") from None


def profile_from_args(args, p=None):
    kw = {}
    if p is not None:
        if args.p is not None and args.p != p:
            raise UsageError(f"--p {args.p} disagrees with the module's p = {p}")
        kw["p"] = p
    elif args.p is not None:
        kw["p"] = args.p
    if args.prec_p is not None:
        kw["P"] = args.prec_p
    if args.t_prec is not None:
        kw["T"] = args.t_prec
    if args.x_window:
        kw["kmin"], kw["kmax"] = _pair(args.x_window, "--x-window")
    if args.levels:
        kw["n0"], kw["n1"] = _pair(args.levels, "--levels")
    try:
        return PrecisionProfile(**kw)
    except (TypeError, ValueError) as exc:
        raise UsageError(f"bad precision profile: {exc}") from None


def _module(args):
    D = io.parse(args.module, kind="module")
    profile_from_args(args, D.p)
    return D


def _jsonable(x):
    if isinstance(x, (RobbaElement, LogRobbaElement)):
        return io.series_to_json(x, with_profile=False)
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, bool) or x is None or isinstance(x, (int, str)):
        return x
    try:
        return io.fmt(x)
    except (TypeError, ValueError):
        return str(x)


def _slopes_text(slopes):
    return "[" + ", ".join(io.fmt(s) for s in slopes) + "]"


# ---------------------------------------------------------------- commands

def cmd_analyze(args):
    D = _module(args)
    tn, th = invariants_tn_th(D)
    adm = is_admissible(D)
    hn = hn_slopes(D)
    witness = span_name(adm.witness.basis, D.dim) if adm.witness is not None else None
    report = {"valid": True, "t_N": tn, "t_H": th, "admissible": bool(adm), "witness": witness,
              "reason": adm.reason, "slopes": hn.slopes, "notes": hn.notes}
    if args.json:
        return report, EXIT_OK
    head = f"admissible: {str(bool(adm)).lower()}"
    if witness:
        head += f"; witness: {witness}"
    head += f"; slopes: {_slopes_text(hn.slopes)}"
    lines = [f"t_N = {tn}, t_H = {th}", head] + [f"note: {n}" for n in hn.notes]
    return "\n".join(lines), EXIT_OK


def cmd_slopes(args):
    D = _module(args)
    hn = hn_slopes(D)
    newton, _ = newton_slopes(D.phi, D.p)
    report = {"hn_slopes": hn.slopes, "newton_slopes": newton, "notes": hn.notes}
    if args.json:
        return report, EXIT_OK
    lines = [f"HN slopes: {_slopes_text(hn.slopes)}", f"Newton slopes of phi: {_slopes_text(newton)}"]
    return "\n".join(lines + [f"note: {n}" for n in hn.notes]), EXIT_OK


def _glued(args):
    D = _module(args)
    profile = profile_from_args(args, D.p)
    if args.auto_window:
        profile = sized_profile(D, profile)
    return D, profile, glue(D, profile)


def _sections_text(M):
    names = basis_names(M.rank)
    out = []
    for k, g in enumerate(M.sections):
        body = " + ".join(f"({x!r})*{names[i]}" for i, x in enumerate(g) if not x.is_zero())
        out.append(f"  g{k + 1} = {body or '0'}")
    return out


def cmd_construct(args):
    D, profile, M = _glued(args)
    report = verify_module(M, D, profile)
    slope = det_slope_certificate(M)
    tn, th = invariants_tn_th(D)
    ok = report.ok and slope == tn - th
    if args.json:
        return {"profile": io.profile_to_json(profile), "sections": M.sections, "phi_matrix": M.phi_matrix,
                "det_slope": slope, "t_N_minus_t_H": tn - th, "checks": report.checks, "ok": ok}, \
            EXIT_OK if ok else EXIT_FAIL
    lines = ["sections:"] + _sections_text(M) + ["phi-matrix:"]
    lines += ["  [" + ", ".join(repr(x) for x in row) + "]" for row in M.phi_matrix]
    lines += [f"det slope: {slope} (t_N - t_H = {tn - th})", str(report)]
    return "\n".join(lines), EXIT_OK if ok else EXIT_FAIL


def cmd_verify(args):
    D, profile, M = _glued(args)
    report = verify_module(M, D, profile)
    if args.json:
        return {"checks": report.checks, "ok": report.ok}, EXIT_OK if report.ok else EXIT_FAIL
    return str(report), EXIT_OK if report.ok else EXIT_FAIL


def cmd_recover(args):
    D, profile, M = _glued(args)
    R = recover_filtered(M, profile)
    same = same_filtered(R, D)
    if args.json:
        return {"module": io.module_to_json(R), "matches_input": same}, EXIT_OK if same else EXIT_FAIL
    return io.dumps(io.module_to_json(R)) + f"\nmatches input: {str(same).lower()}", EXIT_OK if same else EXIT_FAIL


def _series(args):
    return io.parse(args.series, kind="series", defaults=profile_from_args(args))


def cmd_ord(args):
    est = ord_estimate(_series(args))
    if args.json:
        return {"ord": est.value, "tag": est.tag}, EXIT_OK
    return str(est), EXIT_OK


def _tseries_json(s):
    return {"start": s.start, "prec": s.prec, "coeffs": [[io.fmt(c) for c in x.coeffs] for x in s.coeffs]}


def cmd_iota(args):
    f = _series(args)
    n = args.level if args.level is not None else f.profile.n0
    if isinstance(f, LogRobbaElement):
        image = log_operators("iota", f, n)
        if args.json:
            return {"level": n, "log_powers": [_tseries_json(c) for c in image.coeffs]}, EXIT_OK
        return "\n".join(f"Lambda^{k}: {c!r}" for k, c in enumerate(image.coeffs)), EXIT_OK
    image = iota(f, n)
    if args.json:
        return {"level": n, **_tseries_json(image)}, EXIT_OK
    return f"iota_{n}: {image!r}", EXIT_OK


def cmd_membership(args):
    D = _module(args)
    data = SemistableData.from_module(D)
    x, profile = io.parse(args.candidate, kind="candidate", defaults=profile_from_args(args, D.p))
    if profile.p != D.p:
        raise UsageError(f"candidate profile has p = {profile.p}, module has p = {D.p}")
    verdict = membership(x, data, profile)
    code = EXIT_OK if verdict.member else EXIT_FAIL
    if args.json:
        return {"member": verdict.member, "cond1": verdict.cond1, "cond2": verdict.cond2,
                "cond3": verdict.cond3, "notes": verdict.notes}, code
    return verdict.summary(), code


def cmd_selftest(args):
    from .selftest import run_all

    outcomes = run_all(profile_from_args(args))
    passed = sum(o.passed for o in outcomes)
    code = EXIT_OK if passed == len(outcomes) else EXIT_FAIL
    if args.json:
        return {"criteria": [{"number": o.number, "name": o.name, "passed": o.passed, "detail": o.detail}
                             for o in outcomes], "passed": passed, "total": len(outcomes)}, code
    return "\n".join([o.line() for o in outcomes] + [f"{passed}/{len(outcomes)} criteria pass"]), code


COMMANDS = {
    "analyze": (cmd_analyze, ["module"]),
    "slopes": (cmd_slopes, ["module"]),
    "construct": (cmd_construct, ["module"]),
    "verify": (cmd_verify, ["module"]),
    "recover": (cmd_recover, ["module"]),
    "ord": (cmd_ord, ["series"]),
    "iota": (cmd_iota, ["series"]),
    "membership": (cmd_membership, ["module", "candidate"]),
    "selftest": (cmd_selftest, []),
}


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--p", type=int, help="residue characteristic")
    common.add_argument("--prec-p", type=int, help="p-adic working precision P")
    common.add_argument("--t-prec", type=int, help="t-adic precision T at each level")
    common.add_argument("--x-window", metavar="KMIN:KMAX", help="X-exponent window")
    common.add_argument("--levels", metavar="N0:N1", help="window levels")
    common.add_argument("--json", action="store_true", help="machine-readable output")
    common.add_argument("--auto-window", action="store_true",
                        help="enlarge T and kmax as the module requires (glue-based commands)")
    parser = argparse.ArgumentParser(prog="phigamma", description="Filtered (phi,N)-modules and (phi,Gamma)-modules "
                                                                   "over a windowed Robba ring.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, positional) in COMMANDS.items():
        sp = sub.add_parser(name, parents=[common])
        for pos in positional:
            sp.add_argument(pos)
        if name == "iota":
            sp.add_argument("--level", type=int)
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    handler = COMMANDS[args.command][0]
    try:
        result, code = handler(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ParseError, ValidationError) as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_USAGE if isinstance(exc, ParseError) else EXIT_FAIL
    except PhiGammaError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL
    if args.json:
        print(json.dumps(_jsonable(result), indent=2, sort_keys=True))
    else:
        print(result)
    return code


if __name__ == "__main__":
    sys.exit(main())
