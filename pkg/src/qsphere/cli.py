"""Command-line front end.

Exit codes: 0 success, 2 parse error, 3 invalid parameter, 4 failed check.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence

import mpmath

from .haar import APoly, expectation, haar, haar_curve, simplex_reduce, theta
from .parser import IndexRangeError, ParseError, algebra_kind, evaluate, parse
from .qmatrix import UPoly, check_central, check_laplace, matrix_algebra, quantum_minor
from .rep import TruncParams, build_rep, diagonal_consistency, relation_residual
from .scalarq import PoleError, QRat, QScalar, as_fraction, format_pochhammer, rat_eval
from .sphere import NCPoly, sphere

EXIT_OK, EXIT_PARSE, EXIT_PARAM, EXIT_CHECK = 0, 2, 3, 4

Q_COMM_TOL = 1e-13
STAR_TOL = 1e-12
DIAG_TOL = 1e-12


class ParamError(ValueError):
    pass


# -- JSON encoding ---------------------------------------------------------

def _frac(c) -> str:
    c = Fraction(c)
    return f"{c.numerator}/{c.denominator}"


def qscalar_json(x: QScalar) -> List[List[Any]]:
    return [[e, _frac(c)] for e, c in x.items()]


def qrat_json(x: QRat) -> Dict[str, Any]:
    return {"num": qscalar_json(x.num), "den": qscalar_json(x.den)}


def element_json(x) -> List[Dict[str, Any]]:
    out = []
    if isinstance(x, NCPoly):
        alg = x.algebra
        for w, c in x.words():
            out.append({"coeff": qrat_json(QRat(c)), "word": [str(alg.letter(k)) for k in w]})
    elif isinstance(x, UPoly):
        alg = x.algebra
        for w, c in x.words():
            out.append({"coeff": qrat_json(QRat(c)),
                        "word": ["u[%d,%d]" % alg.pair(k) for k in w]})
    elif isinstance(x, APoly):
        for m, c in x.items():
            word = []
            for j, e in enumerate(m, start=1):
                word.extend([f"A{j}"] * e)
            out.append({"coeff": qrat_json(QRat(c)), "word": word})
    return out


# -- helpers ---------------------------------------------------------------

def _signature(args) -> int:
    if args.ell is not None and args.N is not None and args.N != args.ell + 1:
        raise ParamError("--ell and --N disagree")
    ell = args.ell if args.ell is not None else (args.N - 1 if args.N is not None else 1)
    if ell < 1:
        raise ParamError("ell must be at least 1 (N at least 2)")
    return ell


def _q_value(text: str, *, allow_one: bool = True) -> Fraction:
    try:
        q = as_fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise ParamError(f"bad q value {text!r}") from exc
    upper_ok = q <= 1 if allow_one else q < 1
    if not (q > 0 and upper_ok):
        raise ParamError(f"q must lie in (0, 1{']' if allow_one else ')'}, got {text}")
    return q


def _index_list(text: str) -> List[int]:
    try:
        return [int(t) for t in text.replace(" ", "").split(",") if t]
    except ValueError as exc:
        raise ParamError(f"bad index list {text!r}") from exc


def _element(args, ell: int):
    if not args.expr:
        raise ParamError("this command needs an expression")
    node = parse(args.expr)
    kind = algebra_kind(node) or "sphere"
    if kind == "matrix":
        return evaluate(node, matrix_algebra(ell + 1))
    return evaluate(node, sphere(ell))


def _sphere_element(args, ell: int) -> NCPoly:
    x = _element(args, ell)
    if not isinstance(x, NCPoly):
        raise ParamError("this command works on sphere elements (z/A atoms)")
    return x


def _decimal(x: Fraction, digits: int) -> str:
    with mpmath.workdps(digits + 5):
        v = mpmath.mpf(x.numerator) / x.denominator
    return mpmath.nstr(v, digits)


# -- commands --------------------------------------------------------------

def cmd_normalize(args, ell):
    x = _element(args, ell)
    return str(x), element_json(x), EXIT_OK


def cmd_expect(args, ell):
    x = expectation(_sphere_element(args, ell))
    return str(x), element_json(x), EXIT_OK


def cmd_theta(args, ell):
    x = theta(_sphere_element(args, ell))
    return str(x), element_json(x), EXIT_OK


def cmd_simplex(args, ell):
    x = _sphere_element(args, ell)
    if expectation(x) != x:
        raise ParamError("simplex needs a diagonal element; apply `expect` first")
    p = simplex_reduce(x)
    return str(p), element_json(p), EXIT_OK


def cmd_haar(args, ell):
    x = _sphere_element(args, ell)
    value = haar(x)
    if args.at_q is None:
        return format_pochhammer(value), qrat_json(value), EXIT_OK
    q = _q_value(args.at_q)
    try:
        v = rat_eval(value, q)
    except PoleError as exc:
        raise ParamError(str(exc)) from exc
    text = str(v)
    payload: Dict[str, Any] = {"q": _frac(q), "value": _frac(v)}
    if args.prec is not None:
        if args.prec < 1:
            raise ParamError("--prec must be positive")
        payload["decimal"] = _decimal(v, args.prec)
        text += f"\n~ {payload['decimal']}"
    return text, payload, EXIT_OK


def cmd_qminor(args, ell):
    N = ell + 1
    rows, cols = _index_list(args.rows), _index_list(args.cols)
    if any(not 1 <= i <= N for i in rows + cols):
        raise ParamError(f"indices must lie in 1..{N}")
    try:
        x = quantum_minor(rows, cols, N)
    except ValueError as exc:
        raise ParamError(str(exc)) from exc
    return str(x), element_json(x), EXIT_OK


def _check(fn, args, ell):
    N = ell + 1
    if N not in (2, 3):
        raise ParamError("identity checks are supported for N = 2 and N = 3")
    res = fn(N)
    payload = {"ok": res.ok, "checked": len(res.checked)}
    if res.ok:
        return "true", payload, EXIT_OK
    payload["witness"] = list(res.witness)
    payload["residual"] = element_json(res.residual)
    return f"false at {res.witness}: {res.residual}", payload, EXIT_CHECK


def cmd_central(args, ell):
    return _check(check_central, args, ell)


def cmd_laplace(args, ell):
    return _check(check_laplace, args, ell)


def cmd_repcheck(args, ell):
    q = _q_value(args.q, allow_one=False)
    x = None
    if args.expr:
        x = _sphere_element(args, ell)
        if expectation(x) != x:
            raise ParamError("diagonal check needs an element with E(x) = x")
    try:
        params = TruncParams(ell, float(q), args.dim, args.torus)
        rep = build_rep(params)
        margin = args.margin if args.margin is not None else min(2, params.d - 1)
        res = relation_residual(rep, params, margin)
        rpt = None if x is None else diagonal_consistency(x, params, args.margin, rep=rep)
    except ValueError as exc:
        raise ParamError(str(exc)) from exc
    ok = res["q_commutation"] <= Q_COMM_TOL and res["star_commutator"] <= STAR_TOL \
        and res["sphere"] <= STAR_TOL
    payload: Dict[str, Any] = dict(res)
    if rpt is not None:
        payload["diagonal"] = rpt.deviation
        ok = ok and rpt.deviation <= DIAG_TOL
    payload["ok"] = ok
    lines = [f"{k}: {v:.3e}" for k, v in payload.items() if k != "ok"]
    lines.append("ok" if ok else "FAILED")
    return "\n".join(lines), payload, EXIT_OK if ok else EXIT_CHECK


def _grid(text: str, include_one: bool) -> List[Fraction]:
    try:
        a, b, steps = text.split(":")
        a, b, steps = as_fraction(a), as_fraction(b), int(steps)
    except (ValueError, ZeroDivisionError) as exc:
        raise ParamError(f"bad grid {text!r}; expected a:b:steps") from exc
    if steps < 1:
        raise ParamError("grid needs at least one step")
    if steps == 1:
        pts = [a]
    else:
        pts = [a + (b - a) * i / (steps - 1) for i in range(steps)]
    if include_one and (not pts or pts[-1] != 1):
        pts.append(Fraction(1))
    for p in pts:
        if not 0 < p <= 1:
            raise ParamError(f"grid value {p} outside (0, 1]")
    return pts


def cmd_curve(args, ell):
    x = _sphere_element(args, ell)
    pts = _grid(args.grid, args.include_1)
    try:
        curve = haar_curve(x, pts)
    except PoleError as exc:
        raise ParamError(str(exc)) from exc
    lines = [f"{q} {v} {float(v):.12g}" for q, v in curve]
    payload = [{"q": _frac(q), "value": _frac(v)} for q, v in curve]
    return "\n".join(lines), payload, EXIT_OK


COMMANDS = {
    "normalize": cmd_normalize,
    "haar": cmd_haar,
    "expect": cmd_expect,
    "theta": cmd_theta,
    "simplex": cmd_simplex,
    "qminor": cmd_qminor,
    "central-check": cmd_central,
    "laplace-check": cmd_laplace,
    "repcheck": cmd_repcheck,
    "curve": cmd_curve,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--ell", type=int, default=None, help="sphere rank l (N = l + 1)")
    common.add_argument("--N", type=int, default=None, help="matrix size N (l = N - 1)")
    common.add_argument("--json", action="store_true", help="emit JSON on stdout")

    parser = argparse.ArgumentParser(prog="qsphere", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, help_text, expr=True, optional_expr=False):
        p = sub.add_parser(name, parents=[common], help=help_text)
        if expr:
            p.add_argument("expr", nargs="?" if optional_expr else None)
        else:
            p.set_defaults(expr=None)
        return p

    add("normalize", "rewrite to canonical form")
    p = add("haar", "Haar state value")
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--exact", action="store_true", help="exact rational function (default)")
    mode.add_argument("--at-q", dest="at_q", default=None, help="evaluate at a rational q")
    p.add_argument("--prec", type=int, default=None, help="also print this many decimal digits")
    add("expect", "conditional expectation onto the diagonal")
    add("theta", "modular automorphism")
    add("simplex", "express a diagonal element through A_1..A_l")
    p = add("qminor", "quantum minor", expr=False)
    p.add_argument("--rows", required=True)
    p.add_argument("--cols", required=True)
    add("central-check", "quantum determinant is central", expr=False)
    add("laplace-check", "row q-Laplace expansion", expr=False)
    p = add("repcheck", "truncated representation residuals", optional_expr=True)
    p.add_argument("--q", required=True)
    p.add_argument("--dim", type=int, default=16)
    p.add_argument("--torus", type=int, default=4)
    p.add_argument("--margin", type=int, default=None,
                   help="interior margin (default 2, or the degree for the diagonal check)")
    p = add("curve", "Haar values on a q grid")
    p.add_argument("--grid", required=True, help="a:b:steps")
    p.add_argument("--include-1", dest="include_1", action="store_true")
    return parser


def run(argv: Optional[Sequence[str]] = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        ell = _signature(args)
        text, payload, code = COMMANDS[args.command](args, ell)
    except IndexRangeError as exc:
        print(f"invalid parameter: {exc}", file=stderr)
        return EXIT_PARAM
    except ParseError as exc:
        print(f"parse error: {exc}", file=stderr)
        return EXIT_PARSE
    except ParamError as exc:
        print(f"invalid parameter: {exc}", file=stderr)
        return EXIT_PARAM
    if args.json:
        doc = {"signature": {"ell": ell, "N": ell + 1}, "input": args.expr, "result": payload}
        print(json.dumps(doc), file=stdout)
    else:
        print(text, file=stdout)
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
