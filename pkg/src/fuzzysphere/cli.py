"""Command-line entry point: coefficient queries, basis emission, products, verification."""
from __future__ import annotations

import argparse
import json
import re
import sys

import numpy as np

from . import matrep
from .coefficients import clebsch_gordan, wigner_6j
from .surd import HalfInt
from .symalg import build_pmn
from .symalg.convert import to_sympy
from .verify import SUITES, SuiteConfig, run_suite

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def _spin(text: str) -> HalfInt:
    try:
        return HalfInt.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _positive_float(text: str) -> float:
    v = float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError("tolerance must be positive")
    return v


def _surd_payload(value) -> dict:
    return {"exact": value.to_json(), "text": str(value), "float": float(value)}


def _matrix_json(a) -> dict:
    a = np.asarray(a, dtype=complex)
    return {"real": a.real.tolist(), "imag": a.imag.tolist()}


def cmd_cg(args) -> tuple[dict, int]:
    v = clebsch_gordan(args.j1, args.j2, args.j, args.m1, args.m2, args.m)
    labels = {k: str(getattr(args, k)) for k in ("j1", "j2", "j", "m1", "m2", "m")}
    return {"labels": labels, "value": _surd_payload(v)}, EXIT_OK


def cmd_sixj(args) -> tuple[dict, int]:
    js = [getattr(args, f"j{i}") for i in range(1, 7)]
    v = wigner_6j(*js)
    return {"labels": [str(j) for j in js], "value": _surd_payload(v)}, EXIT_OK


def cmd_basis(args) -> tuple[dict, int]:
    n, m = args.n, args.m
    if n < 0 or abs(m) > n:
        raise UsageError(f"invalid label n={n}, m={m}")
    out: dict = {"n": n, "m": m, "format": args.format}
    if args.format == "hahn":
        f = build_pmn(n, m)
        out["expression"] = str(to_sympy(f)).replace("Rsq", "R**2")
        out["normal_form"] = f.to_json()
        return out, EXIT_OK
    if args.k is None:
        raise UsageError("--k is required for --format matrix")
    rep = matrep.make_rep(args.k, args.epsilon)
    p = matrep.pmn_matrix(rep, n, m)
    norm = matrep.norm_closed_form(n, rep.epsilon, rep.Rsq)
    out.update({
        "k": str(rep.k),
        "epsilon": rep.epsilon,
        "basis": [str(w) for w in rep.weights],
        "matrix": _matrix_json(p),
        "norm": norm,
        "zero_norm": norm == 0,
    })
    if n > rep.k.twice:
        out["warning"] = f"n={n} > 2k: the element vanishes in this representation"
    return out, EXIT_OK


def cmd_product(args) -> tuple[dict, int]:
    for n, m in ((args.n1, args.m1), (args.n2, args.m2)):
        if n < 0 or abs(m) > n:
            raise UsageError(f"invalid label n={n}, m={m}")
    rep = matrep.make_rep(args.k)
    report = matrep.decompose_product(rep, args.n1, args.m1, args.n2, args.m2)
    return report.to_json(), EXIT_OK


def cmd_verify(args) -> tuple[dict, int]:
    if args.suite != "all" and args.suite not in SUITES:
        raise UsageError(f"unknown suite {args.suite!r}; choose from all, {', '.join(SUITES)}")
    cap = matrep.k_cap()
    if args.k_max < 0 or args.k_max > cap:
        raise UsageError(f"--k-max must lie in [0, {cap}]")
    if args.n_max is not None and args.n_max < 0:
        raise UsageError("--n-max must be nonnegative")
    cfg = SuiteConfig(args.suite, args.k_max, args.n_max, args.tol, args.seed, args.exact)
    report = run_suite(cfg)
    return report, EXIT_OK if report["passed"] else EXIT_FAIL


def _text_report(report: dict) -> str:
    lines = []
    for r in report["results"]:
        for c in r["checks"]:
            bound = f"[{c['low']:g}, {c['bound']:g}]" if c["kind"] == "range" else f"{c['bound']:g}"
            lines.append(f"{c['status'].upper():8s} {r['suite']:14s} {c['name']}: {c['value']:.3e} (bound {bound})")
    lines.append("PASSED" if report["passed"] else "FAILED")
    return "\n".join(lines)


_NEG_FRACTION = re.compile(r"^-\d+/\d+$")


def _join_negative_fractions(argv: list[str]) -> list[str]:
    """argparse reads "-1/2" as an option; glue such values onto their flag."""
    out: list[str] = []
    for tok in argv:
        if out and out[-1].startswith("--") and "=" not in out[-1] and _NEG_FRACTION.match(tok):
            out[-1] = f"{out[-1]}={tok}"
        else:
            out.append(tok)
    return out


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="fuzzysphere", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    cg = sub.add_parser("cg", help="Clebsch-Gordan coefficient <j1 m1; j2 m2 | j m>")
    for name in ("j1", "j2", "j", "m1", "m2", "m"):
        cg.add_argument(f"--{name}", type=_spin, required=True)
    cg.set_defaults(func=cmd_cg)

    sj = sub.add_parser("sixj", help="Wigner 6-j symbol {j1 j2 j3; j4 j5 j6}")
    for i in range(1, 7):
        sj.add_argument(f"--j{i}", type=_spin, required=True)
    sj.set_defaults(func=cmd_sixj)

    b = sub.add_parser("basis", help="emit P^m_n as a normal form or as a matrix")
    b.add_argument("--k", type=_spin)
    b.add_argument("--n", type=int, required=True)
    b.add_argument("--m", type=int, required=True)
    b.add_argument("--format", choices=("hahn", "matrix"), default="hahn")
    b.add_argument("--epsilon", type=float, default=1.0)
    b.set_defaults(func=cmd_basis)

    pr = sub.add_parser("product", help="expand P^{m1}_{n1} P^{m2}_{n2} in a spin-k representation")
    pr.add_argument("--k", type=_spin, required=True)
    for name in ("n1", "m1", "n2", "m2"):
        pr.add_argument(f"--{name}", type=int, required=True)
    pr.set_defaults(func=cmd_product)

    v = sub.add_parser("verify", help="run a named verification suite")
    v.add_argument("--suite", required=True, help=f"one of: all, {', '.join(SUITES)}")
    v.add_argument("--k-max", type=int, default=6)
    v.add_argument("--n-max", type=int)
    v.add_argument("--tol", type=_positive_float, help="override every tolerance bound")
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--exact", action="store_true", help="add exact-arithmetic comparisons (k <= 2)")
    v.add_argument("--out", help="write the report here instead of stdout")
    v.add_argument("--format", choices=("json", "text"), default="json")
    v.set_defaults(func=cmd_verify)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        argv = sys.argv[1:] if argv is None else list(argv)
        args = parser.parse_args(_join_negative_fractions(argv))
        payload, code = args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ValueError, ZeroDivisionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if getattr(args, "format", None) == "text" and args.command == "verify":
        text = _text_report(payload)
    else:
        text = json.dumps(payload, indent=2, default=str)
    out = getattr(args, "out", None)
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
