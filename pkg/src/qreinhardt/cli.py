"""Command-line interface; every subcommand prints one JSON report.

Exit status: 0 when all verdicts pass, 1 on a failed verdict, 2 on bad input.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .action import WeightMatrix, validate_action
from .bergman import build_kernel, dense_cross_check, metric_data, rep_coords
from .domains import domain_from_json, monomial_moment
from .errors import InputError, InvalidActionError, NumericalError, PreconditionError
from .polymap import PolynomialMap, ResonantMap, invert_resonant, is_resonant
from .resonance import resonance_profile
from .verify import fixture_suite, verify_theorem

DEFAULT_SEED = 0


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _load(path: str) -> dict:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path} is not valid JSON: {exc}") from None


def _index(text: str) -> tuple[int, ...]:
    try:
        out = tuple(int(x) for x in text.replace(" ", "").split(",") if x != "")
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None
    if not out:
        raise argparse.ArgumentTypeError("empty multi-index")
    return out


def _default(o):
    if isinstance(o, np.bool_):
        return bool(o)
    if isinstance(o, np.integer):
        return int(o)
    if isinstance(o, np.floating):
        return float(o)
    if isinstance(o, complex):
        return [o.real, o.imag]
    raise TypeError(f"not JSON serializable: {type(o).__name__}")


def _header(args, **extra) -> dict:
    h = {"tool": "qreinhardt", "version": __version__, "command": args.command}
    h.update(extra)
    return h


# ---------------------------------------------------------------------------
# subcommands


def cmd_validate(args):
    M = WeightMatrix.from_json(_load(args.weights))
    cert = validate_action(M)
    report = _header(args, weights=M.to_json(), **cert.to_json())
    if M.r == 1:
        report["gcd_normalized"] = M.gcd_normalized()
    return report, 0 if cert.valid else 2


def cmd_resonance(args):
    M = WeightMatrix.from_json(_load(args.weights))
    prof = resonance_profile(M)
    return _header(args, **prof.to_json()), 0


def _weights_arg(args) -> WeightMatrix:
    if not args.weights:
        raise InputError(f"'map {args.action}' needs --weights")
    return WeightMatrix.from_json(_load(args.weights))


def cmd_map(args):
    maps = [PolynomialMap.from_json(_load(p)) for p in args.maps]
    if args.action == "compose":
        if len(maps) != 2:
            raise InputError("'map compose' takes two map files: outer inner")
        out = maps[0].compose(maps[1])
        return _header(args, action="compose", result=out.to_json(), degree=out.degree()), 0
    if len(maps) != 1:
        raise InputError(f"'map {args.action}' takes one map file")
    f = maps[0]
    M = _weights_arg(args)
    if args.action == "check":
        v = is_resonant(f, M)
        return _header(args, action="check", weights=M.to_json(), **v.to_json()), 0 if v.passed else 1
    # invert
    v = is_resonant(f, M)
    if not v.passed:
        i, a = v.violations[0]
        raise InputError(f"map is not resonant for these weights: component {i + 1}, z^{list(a)}")
    prof = resonance_profile(M)
    sigma = ResonantMap(f, M, prof)
    inv = invert_resonant(sigma)
    round_trip = f.compose(inv.map) == PolynomialMap.identity(f.n) and inv.map.compose(f) == PolynomialMap.identity(f.n)
    report = _header(
        args,
        action="invert",
        result=inv.map.to_json(),
        degree=inv.degree(),
        mu=prof.mu,
        round_trip=round_trip,
        **{"pass": round_trip and inv.degree() <= prof.mu},
    )
    return report, 0 if report["pass"] else 1


def cmd_moments(args):
    D = domain_from_json(_load(args.domain))
    mv = monomial_moment(D, args.alpha, args.beta, args.method, args.samples, args.seed, args.threads)
    return (
        _header(args, seed=args.seed, domain=D.to_json(), alpha=list(args.alpha), beta=list(args.beta), moment=mv.to_json()),
        0,
    )


def cmd_repcoords(args):
    D = domain_from_json(_load(args.domain))
    K = build_kernel(D, args.method, args.samples, args.seed, args.threads)
    T = metric_data(K, tol=args.tol)
    rc = rep_coords(K, T, tol=args.tol)
    report = _header(
        args,
        seed=args.seed,
        method=K.method,
        domain=D.to_json(),
        resonance=K.profile.to_json(),
        kernel=K.to_json(),
        metric=T.to_json(),
        sigma=rc.to_json(),
    )
    flags = dict(T.flags, **rc.flags)
    if args.dense_cap is not None or args.dense:
        dr = dense_cross_check(D, args.dense_cap, K.method, args.samples, args.seed)
        report["dense"] = dr.to_json()
        flags["dense_agreement"] = dr.passed(args.tol)
    if K.method == "monte_carlo":
        # Monte Carlo noise shows up in the structural checks; only the
        # statistical dense test carries a verdict
        flags = {k: v for k, v in flags.items() if k in ("T00_positive_definite", "dense_agreement")}
    report["flags"] = flags
    report["pass"] = all(flags.values())
    return report, 0 if report["pass"] else 1


def cmd_verify(args):
    D1 = domain_from_json(_load(args.d1))
    D2 = domain_from_json(_load(args.d2))
    f = PolynomialMap.from_json(_load(args.f))
    rep = verify_theorem(D1, D2, f, args.samples, args.tol, args.seed)
    report = _header(args, seed=args.seed, method="exact", **rep.to_json())
    return report, 0 if rep.verdict else 1


def cmd_suite(args):
    rep = fixture_suite(args.seed, args.budget, args.corrupt, args.fuzz)
    return _header(args, **rep), 0 if rep["pass"] else 1


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="qreinhardt", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"qreinhardt {__version__}")
    p.add_argument("--out", help="write the JSON report here instead of stdout")
    p.add_argument("--threads", type=int, default=1, help="cap on worker threads (results do not depend on it)")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("validate", help="certificate for (in)validity of a torus action")
    s.add_argument("weights")
    s.set_defaults(func=cmd_validate)

    s = sub.add_parser("resonance", help="resonance sets, orders and proper ordering")
    s.add_argument("weights")
    s.set_defaults(func=cmd_resonance)

    s = sub.add_parser("map", help="exact operations on polynomial maps")
    s.add_argument("action", choices=["invert", "compose", "check"])
    s.add_argument("maps", nargs="+")
    s.add_argument("--weights")
    s.set_defaults(func=cmd_map)

    s = sub.add_parser("moments", help="monomial moment <z^alpha, z^beta> over a domain")
    s.add_argument("domain")
    s.add_argument("--alpha", type=_index, required=True)
    s.add_argument("--beta", type=_index, required=True)
    s.add_argument("--method", default="auto", choices=["auto", "closed_form", "pushforward", "monte_carlo", "quadrature"])
    s.add_argument("--samples", type=int, default=100_000)
    s.add_argument("--seed", type=int, default=DEFAULT_SEED)
    s.set_defaults(func=cmd_moments)

    s = sub.add_parser("repcoords", help="Bergman representative coordinates at the origin")
    s.add_argument("domain")
    s.add_argument("--dense-cap", type=int, default=None)
    s.add_argument("--dense", action="store_true", help="run the dense cross-check at the default cap")
    s.add_argument("--method", default="auto", choices=["auto", "closed_form", "pushforward", "monte_carlo"])
    s.add_argument("--samples", type=int, default=1_000_000)
    s.add_argument("--seed", type=int, default=DEFAULT_SEED)
    s.add_argument("--tol", type=float, default=1e-9)
    s.set_defaults(func=cmd_repcoords)

    s = sub.add_parser("verify", help="check f = sigma2^-1 o J_f o sigma1 and the degree bound")
    s.add_argument("d1")
    s.add_argument("d2")
    s.add_argument("f")
    s.add_argument("--samples", type=int, default=1000)
    s.add_argument("--tol", type=float, default=1e-7)
    s.add_argument("--seed", type=int, default=DEFAULT_SEED)
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("suite", help="run the built-in fixture battery")
    s.add_argument("--seed", type=int, default=DEFAULT_SEED)
    s.add_argument("--budget", type=int, default=200_000, help="Monte Carlo samples; 0 skips Monte Carlo fixtures")
    s.add_argument("--fuzz", type=int, default=1000, help="random weight matrices for the antisymmetry fuzz")
    s.add_argument("--corrupt", action="store_true", help="inject the (1,3)-weight negative control")
    s.set_defaults(func=cmd_suite)
    return p


def run(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        args = build_parser().parse_args(argv)
        if args.threads < 1:
            raise UsageError("--threads must be at least 1")
        report, code = args.func(args)
    except UsageError as exc:
        print(f"qreinhardt: error: {exc}", file=stderr)
        return 2
    except InvalidActionError as exc:
        print(f"qreinhardt: {exc}", file=stderr)
        print(json.dumps({"tool": "qreinhardt", "version": __version__, **exc.certificate.to_json()}), file=stdout)
        return 2
    except (InputError, PreconditionError) as exc:
        print(f"qreinhardt: input error: {exc}", file=stderr)
        return 2
    except NumericalError as exc:
        print(f"qreinhardt: numerical error: {exc} {json.dumps(exc.diagnostics, default=_default)}", file=stderr)
        return 1
    text = json.dumps(report, indent=2, default=_default) + "\n"
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8", newline="\n")
    else:
        stdout.write(text)
    if code == 2 and "gamma" in report:
        print(f"qreinhardt: action is not valid: z^gamma invariant for gamma={report['gamma']}", file=stderr)
    elif code == 1:
        print("qreinhardt: verdict failed", file=stderr)
    return code


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
