"""Command-line front end: ``qtwist identities | rmatrix | classical | chain``.

Exit codes: 0 all checks pass, 1 some check failed, 2 usage error or singular point.
"""

import argparse
import re
import sys

from . import __version__
from .report import CheckReport, Check, make_check, parse_rational, timed

EXIT_USAGE = 2


class UsageError(Exception):
    pass


def _rational_arg(text):
    try:
        return parse_rational(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


# -- identities ---------------------------------------------------------------------------

def cmd_identities(args):
    from .identities import CATALOGUES, EXACT_IDS, PARAMETERS, verify_identity

    bindings = {}
    for item in args.params:
        if item == "symbolic":
            continue
        if "=" not in item:
            raise UsageError(f"--params expects 'symbolic' or name=value, got {item!r}")
        k, v = item.split("=", 1)
        if k not in PARAMETERS:
            raise UsageError(f"unknown identity parameter {k!r}")
        bindings[k] = parse_rational(v)
    report = CheckReport("identities", {**{p: "symbolic" for p in PARAMETERS}, **bindings})
    report.parameters["catalog"] = args.catalog
    report.parameters["order"] = args.order
    for ident in CATALOGUES[args.catalog]:
        runs = []
        if ident in EXACT_IDS:
            if ident in ("Q12", "Q12W"):
                runs.append((ident, None))
            runs.extend((f"{ident}[n={n}]", n) for n in range(1, 6))
        else:
            runs.append((ident, None))
        for label, n in runs:
            report.add(timed(_identity_check, verify_identity, ident, label, args.order, bindings, n))
    return report


def _identity_check(verify, ident, label, order, bindings, n):
    res = verify(ident, order=order, bindings=bindings or None, n=n)
    return make_check(label, res.ok, res.detail)


# -- rmatrix --------------------------------------------------------------------------------

def cmd_rmatrix(args):
    from . import rmatrix as rm
    from .exactalg import VARS

    report = CheckReport("rmatrix", {"family": args.family, "action": args.action,
                                      "mode": args.mode}, seed=args.seed)
    fam, action = args.family, args.action
    if action == "build":
        s = rm.SPECTRAL[fam]
        m = rm.build_RF(rm.RFamily(fam), VARS.var(f"{s}1"), VARS.var(f"{s}2"))
        report.extra["matrix"] = rm.matrix_to_json(m)
        entries = sum(len(r) for r in m.rows)
        report.add(make_check("build", entries == 16, f"{entries} entries"))
    elif action == "rzz":
        report.add(timed(rm.verify_rzz, fam))
    elif action == "twist":
        if fam != "trig":
            raise UsageError("the twist action applies to the trig family (closed-form F)")
        report.add(timed(rm.verify_twist))
    elif action == "ybe":
        report.add(timed(rm.verify_YBE, fam, args.mode, args.trials, args.seed))
    elif action == "cocycle":
        if fam != "trig":
            raise UsageError("the cocycle action runs in the trig evaluation representation")
        if args.mode == "symbolic":
            report.add(timed(rm.verify_cocycle_rep))
        else:
            report.add(timed(rm.verify_cocycle_sampled, args.trials, args.seed))
    return report


# -- classical --------------------------------------------------------------------------------

def cmd_classical(args):
    from . import rmatrix as rm

    report = CheckReport("classical", {"action": args.action, "kind": args.kind})
    if args.action == "gauge":
        report.add(timed(rm.verify_gauge_equiv))
    else:
        kinds = rm.CLASSICAL_KINDS if args.kind == "all" else (args.kind,)
        for k in kinds:
            report.add(timed(rm.verify_CYBE, k))
    return report


# -- chain ------------------------------------------------------------------------------------

def _chain_spec(args):
    from .chain import ChainSpec

    if args.family == "trig":
        need = {"q": args.q, "a": args.a, "b": args.b}
        s2 = args.z2
        s2_name = "z2"
    else:
        need = {"eta": args.eta, "xi": args.xi}
        if args.family == "rat":
            need["q"] = args.q
        elif args.q is not None and args.q != 1:
            raise UsageError("the yang family requires q = 1")
        s2 = args.u2
        s2_name = "u2"
    missing = [k for k, v in need.items() if v is None]
    if s2 is None:
        missing.append(s2_name)
    if missing:
        raise UsageError(f"missing parameters for {args.family}: {', '.join('--' + m for m in missing)}")
    return ChainSpec(args.sites, args.family, need, s2), {**need, s2_name: s2}


def cmd_chain(args):
    from . import chain as ch
    from .report import RationalSampler, fmt_rational

    spec, params = _chain_spec(args)
    params = {"family": args.family, "sites": args.sites, "action": args.action, **params}
    report = CheckReport("chain", params, seed=args.seed)
    exact = spec.N <= ch.MAX_EXACT_SITES
    # a singular parameter point raises here and exits with status 2
    ch.r_matrix_at(spec, spec.s2)
    ch.r_derivative_at(spec)
    if args.action == "commute":
        z1, z2 = args.z1, args.z2p
        if z1 is None or z2 is None:
            draws = ch.random_spectral(spec, RationalSampler(args.seed), 2)
            z1 = draws[0] if z1 is None else z1
            z2 = draws[1] if z2 is None else z2
        report.parameters.update({"z1": z1, "z2p": z2})
        report.add(timed(ch.verify_transfer_commute, spec, z1, z2))
    elif args.action == "hamiltonian":
        report.add(timed(ch.compare_hamiltonians, spec))
        if spec.N <= 6:
            report.add(timed(ch.verify_literal_route, spec))
        H = ch.hamiltonian_from_transfer(spec)
        report.add(timed(ch.verify_translation, H, spec.N))
        report.add(timed(ch.verify_charge_triangular, H, spec.N))
    elif args.action == "isospectral":
        if not exact:
            raise UsageError(f"isospectral needs exact mode (sites <= {ch.MAX_EXACT_SITES})")
        report.add(timed(ch.verify_isospectral, spec))
    elif args.action == "jordan":
        if not exact:
            raise UsageError(f"jordan needs exact mode (sites <= {ch.MAX_EXACT_SITES})")
        check = timed(ch.jordan_check, spec, args.seed)
        report.add(check)
        report.extra["spectrum"] = check.data["report"].as_dict()
    elif args.action == "spectrum":
        H = ch.hamiltonian_closed(spec)
        if exact:
            check = timed(_spectrum_check, ch, spec, H)
            report.add(check)
            report.extra["charpoly"] = [fmt_rational(c) for c in check.data["charpoly"]]
            ev = check.data["eigenvalues"]
        else:
            ev = ch.spectrum_float(H, ch.charges(spec.N))
            report.add(Check("spectrum", "skip", f"float only above {ch.MAX_EXACT_SITES} sites"))
        report.extra["eigenvalues"] = [[round(z.real, 12), round(z.imag, 12)] for z in ev]
    return report


def _spectrum_check(ch, spec, H):
    from .linalg import charpoly, check_against_exact, rational_eigenvalues
    ev = ch.spectrum_float(H, ch.charges(spec.N))
    cp = charpoly(H)
    worst = check_against_exact(ev, rational_eigenvalues(H, ev))
    ok = worst <= 1e-9
    return make_check("spectrum", ok, f"{len(ev)} eigenvalues; rational ones match exact roots "
                      f"to {worst:.3g}", charpoly=cp, eigenvalues=ev)


# -- parser -----------------------------------------------------------------------------------

def build_parser():
    from .identities import CATALOGUES
    from .rmatrix import CLASSICAL_KINDS, FAMILIES

    p = argparse.ArgumentParser(prog="qtwist", description="Exact algebraic verification checks.",
                                epilog="exit status: 0 all checks pass, 1 a check failed, "
                                       "2 usage error or singular parameter point")
    p.add_argument("--version", action="version", version=f"qtwist {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--format", choices=("json", "text"), default="json")

    sp = sub.add_parser("identities", help="run an identity catalogue")
    sp.add_argument("--catalog", choices=tuple(CATALOGUES), default="q-core")
    sp.add_argument("--order", type=int, default=6)
    sp.add_argument("--params", nargs="+", default=["symbolic"],
                    help="'symbolic' or name=value bindings (exact rationals)")
    common(sp)

    sp = sub.add_parser("rmatrix", help="twisted R-matrix checks")
    sp.add_argument("--family", choices=FAMILIES, default="trig")
    sp.add_argument("--action", choices=("build", "twist", "ybe", "cocycle", "rzz"), required=True)
    sp.add_argument("--mode", choices=("symbolic", "sampled"), default="symbolic")
    sp.add_argument("--trials", type=int, default=20)
    sp.add_argument("--seed", type=int, default=0)
    common(sp)

    sp = sub.add_parser("classical", help="classical r-matrix checks")
    sp.add_argument("--action", choices=("cybe", "gauge"), required=True)
    sp.add_argument("--kind", choices=CLASSICAL_KINDS + ("all",), default="all")
    common(sp)

    sp = sub.add_parser("chain", help="periodic chain checks")
    # let "-7/2" (and "-1.5", rejected later with a clear message) parse as values
    sp._negative_number_matcher = re.compile(r"^-\.?\d[\d./eE+-]*$")
    sp.add_argument("--family", choices=FAMILIES, required=True)
    sp.add_argument("--sites", type=int, required=True)
    helps = {
        "z2": "inhomogeneity of the trig chain",
        "u2": "inhomogeneity of the rat and yang chains",
        "z1": "first spectral parameter for commute (seeded draw if omitted)",
        "z2p": "second spectral parameter for commute (seeded draw if omitted)",
    }
    for name in ("q", "a", "b", "z2", "eta", "xi", "u2", "z1", "z2p"):
        sp.add_argument(f"--{name}", type=_rational_arg,
                        help=helps.get(name, "exact rational, e.g. 3 or -7/2"))
    sp.add_argument("--action", choices=("commute", "hamiltonian", "isospectral", "jordan", "spectrum"),
                    required=True)
    sp.add_argument("--seed", type=int, default=0)
    common(sp)
    return p


COMMANDS = {"identities": cmd_identities, "rmatrix": cmd_rmatrix,
            "classical": cmd_classical, "chain": cmd_chain}


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "order", 1) < 0:
        parser.error("--order must be non-negative")
    if getattr(args, "trials", 1) < 1:
        parser.error("--trials must be positive")
    try:
        report = COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"qtwist: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ZeroDivisionError as exc:
        print(f"qtwist: singular parameter point: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        print(f"qtwist: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    print(report.to_json() if args.format == "json" else report.to_text())
    return report.exit_code()


if __name__ == "__main__":
    sys.exit(main())
