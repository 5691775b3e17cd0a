"""Command line front end (``toric-qh``).

Exit status: 0 when the command ran and the verdict (if any) is
consistent, 2 when it ran and found a contradiction, 1 on any error.
"""

from __future__ import annotations

import argparse
import logging
import re
import sys
from dataclasses import replace
from fractions import Fraction
from typing import Sequence

from . import __version__
from .errors import PipelineError, ToolkitError
from .index_core import (
    Partition,
    RotationNumbers,
    cz_index,
    decompose,
    extremal_census,
    index_defect,
    index_table,
    is_extremal,
    is_extremal_by_floors,
    iteration_identity_check,
    parse_vector,
    to_fraction,
)
from .novikov import NovikovSeries, PeriodGroup
from .orbit_search import find_lemma_iterate
from .pipeline import Report, Scenario, run_cached
from .qh_engine import (
    cp_n_spec,
    power,
    product,
    replay_theorem,
    verify_point_identity,
)

DEFAULT_HORIZON = 100_000
DEFAULT_CUTOFF = Fraction(-10)

_VALUE_FLAGS = ("--rho", "--parts", "--betti", "--cutoff", "--omega")
_NEGATIVE = re.compile(r"^-[\d.]")


def _attach_negative_values(argv: Sequence[str]) -> list[str]:
    """Rewrite ``--rho -1/100`` as ``--rho=-1/100`` so argparse keeps the value."""
    out: list[str] = []
    i = 0
    while i < len(argv):
        arg = argv[i]
        if arg in _VALUE_FLAGS and i + 1 < len(argv) and _NEGATIVE.match(argv[i + 1]):
            out.append(f"{arg}={argv[i + 1]}")
            i += 2
            continue
        out.append(arg)
        i += 1
    return out


def _emit(args: argparse.Namespace, report: Report) -> None:
    sys.stdout.write(report.machine() if args.format == "machine" else report.human())


# -- series expressions -----------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(inv)|(s)|(\d+(?:/\d+)?)|(.))")


class _ExprParser:
    """Recursive descent over ``+``, ``*``, ``^``, parentheses and ``inv(...)``.

    ``s^e`` takes a rational exponent (``s^-1/2`` or ``s^(-1/2)``);
    ``(expr)^k`` takes an integer, negative powers invert to the cutoff.
    """

    def __init__(self, text: str, gamma: PeriodGroup, cutoff: Fraction) -> None:
        self.tokens = []
        for m in _TOKEN.finditer(text):
            if m.group(0).strip() == "":
                continue
            kind = "inv" if m.group(1) else "s" if m.group(2) else "num" if m.group(3) else "op"
            self.tokens.append((kind, m.group(0).strip()))
        self.pos = 0
        self.gamma = gamma
        self.cutoff = cutoff

    def peek(self) -> tuple[str, str] | None:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def take(self, value: str | None = None) -> tuple[str, str]:
        tok = self.peek()
        if tok is None or (value is not None and tok[1] != value):
            raise ValueError(f"expected {value or 'token'} at position {self.pos}")
        self.pos += 1
        return tok

    def parse(self) -> NovikovSeries:
        value = self.expr()
        if self.peek() is not None:
            raise ValueError(f"unexpected {self.peek()[1]!r}")
        return value

    def expr(self) -> NovikovSeries:
        value = self.term()
        while self.peek() == ("op", "+"):
            self.take()
            value = value + self.term()
        return value

    def term(self) -> NovikovSeries:
        value = self.factor()
        while self.peek() == ("op", "*"):
            self.take()
            value = value * self.factor()
        return value

    def exponent(self) -> Fraction:
        sign = 1
        if self.peek() == ("op", "("):
            self.take()
            e = self.exponent()
            self.take(")")
            return e
        if self.peek() == ("op", "-"):
            self.take()
            sign = -1
        kind, text = self.take()
        if kind != "num":
            raise ValueError(f"bad exponent {text!r}")
        return sign * Fraction(text)

    def factor(self) -> NovikovSeries:
        kind, text = self.take()
        if kind == "s":
            e = Fraction(1)
            if self.peek() == ("op", "^"):
                self.take()
                e = self.exponent()
            return NovikovSeries.monomial(e, self.gamma)
        if kind == "num":
            base = NovikovSeries.one(self.gamma) if Fraction(text) % 2 else NovikovSeries.zero(self.gamma)
        elif kind == "inv":
            self.take("(")
            inner = self.expr()
            self.take(")")
            base = inner.invert(self.cutoff)
        elif text == "(":
            base = self.expr()
            self.take(")")
        else:
            raise ValueError(f"unexpected {text!r}")
        if self.peek() == ("op", "^"):
            self.take()
            k = self.exponent()
            if k.denominator != 1:
                raise ValueError("only s takes rational exponents")
            if k < 0:
                base = base.invert(self.cutoff)
                k = -k
            out = NovikovSeries.one(self.gamma)
            for _ in range(int(k)):
                out = out * base
            base = out
        return base


def evaluate_series(text: str, gamma: PeriodGroup, cutoff: Fraction) -> NovikovSeries:
    return _ExprParser(text, gamma, cutoff).parse()


# -- commands ---------------------------------------------------------------

def _path(args: argparse.Namespace) -> RotationNumbers:
    return RotationNumbers(parse_vector(args.rho))


def cmd_index(args: argparse.Namespace) -> int:
    path = _path(args)
    report = Report()
    items = []
    for k, mu, mean in index_table(path, args.kmax):
        items.append((f"mu_{k}", "degenerate" if mu is None else mu))
        items.append((f"mean_{k}", mean))
        if mu is not None and path.is_nondegenerate(1):
            items.append((f"identity_{k}", iteration_identity_check(path, k)))
    report.add("index", [("rho", str(path))] + items)
    _emit(args, report)
    return 0


def cmd_decompose(args: argparse.Namespace) -> int:
    path = _path(args)
    split = decompose(path, args.k)
    report = Report()
    report.add("decompose", [
        ("rho", str(path)),
        ("k", args.k),
        ("loop_part", split.loop_part),
        ("short_angles", split.short_angles),
        ("loop", split.loop),
        ("mu", cz_index(path, args.k)),
        ("mean_index", split.mean_index),
    ])
    _emit(args, report)
    return 0


def cmd_partition_check(args: argparse.Namespace) -> int:
    path = _path(args)
    part = Partition(int(p) for p in args.parts.split(","))
    report = Report()
    report.add("partition", [
        ("rho", str(path)),
        ("partition", str(part)),
        ("extremal", is_extremal(path, part)),
        ("extremal_by_floors", is_extremal_by_floors(path, part)),
        ("defect", index_defect(path, part)),
    ])
    _emit(args, report)
    return 0


def cmd_partition_census(args: argparse.Namespace) -> int:
    path = _path(args)
    census = extremal_census(path, args.kmax)
    report = Report()
    report.add("census", [("rho", str(path))] + [
        (f"k{k}", f"{ext}/{tot}") for k, (ext, tot) in census.items()
    ])
    _emit(args, report)
    return 0


def cmd_lemma_find(args: argparse.Namespace) -> int:
    path = _path(args)
    w = find_lemma_iterate(path, args.N, args.horizon)
    report = Report()
    report.add("lemma", [
        ("m", w.m), ("d", w.d), ("loop", w.loop), ("mu_m", w.mu_m),
        ("lambda", w.lambdas), ("window_width", w.width), ("r_max", w.r_max),
        ("extremal_all", w.all_certified),
    ])
    _emit(args, report)
    return 0


def cmd_novikov_eval(args: argparse.Namespace) -> int:
    gamma = PeriodGroup.parse(args.gamma)
    value = evaluate_series(args.expression, gamma, args.cutoff)
    report = Report()
    report.add("novikov", [
        ("gamma", gamma.to_text()),
        ("value", value.to_token()),
        ("text", value.to_text()),
    ])
    _emit(args, report)
    return 0


def _class(spec, label: str):
    aliases = {"pt": "[pt]", "M": "[M]", "u^0": "[M]", f"u^{spec.n}": "[pt]"}
    if spec.n == 1:
        aliases["u"] = "[pt]"
    return spec.basis_class(aliases.get(label, label))


def cmd_qh_mul(args: argparse.Namespace) -> int:
    spec = cp_n_spec(args.n, args.omega)
    x = product(spec, _class(spec, args.a), _class(spec, args.b))
    report = Report()
    report.add("qh", [("ring", spec.name), ("product", x.to_text()),
                      ("renamed", x.to_text(renamed=True)), ("degree", x.degree())])
    _emit(args, report)
    return 0


def cmd_qh_pow(args: argparse.Namespace) -> int:
    spec = cp_n_spec(args.n, args.omega)
    x = power(spec, _class(spec, args.a), args.r)
    report = Report()
    report.add("qh", [("ring", spec.name), ("power", x.to_text()),
                      ("renamed", x.to_text(renamed=True)), ("degree", x.degree())])
    _emit(args, report)
    return 0


def cmd_qh_verify(args: argparse.Namespace) -> int:
    spec = cp_n_spec(args.n, args.omega)
    rep = verify_point_identity(spec)
    report = Report()
    report.add("eq2", [
        ("ring", spec.name), ("holds", rep.holds),
        ("alpha", rep.alpha.to_text() if rep.alpha is not None else None),
        ("alpha_renamed", rep.alpha_renamed(spec.omega0).to_text() if rep.alpha is not None else None),
        ("alpha_invertible", rep.alpha_invertible),
        ("alpha_degree", rep.alpha_degree),
    ])
    _emit(args, report)
    return 0 if rep.holds else 2


def cmd_theorem_replay(args: argparse.Namespace) -> int:
    betti = tuple(int(b) for b in args.betti.split(","))
    v = replay_theorem(args.n, args.N, betti)
    report = Report()
    report.add("theorem", [
        ("status", v.status), ("reason", v.reason),
        ("forced", ";".join(f"{d}:{k}" for d, k in v.forced) or None),
        ("violations", ";".join(f"{d}:{b}" for d, b in v.violations) or None),
        ("conclusion", v.conclusion or None),
        ("notes", " / ".join(v.notes) or None),
    ])
    _emit(args, report)
    return 0 if v.consistent else 2


def cmd_pipeline_run(args: argparse.Namespace) -> int:
    scenario = Scenario.load(args.scenario)
    overrides = {}
    if args.horizon is not None:
        overrides["horizon"] = args.horizon
    if args.cutoff is not None:
        overrides["series_cutoff"] = args.cutoff
    if overrides:
        scenario = replace(scenario, **overrides)
    report = run_cached(scenario, args.cache_dir)
    _emit(args, report)
    return report.exit_code


# -- parser -----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("human", "machine"), default="human")
    common.add_argument("--horizon", type=int, default=None)
    common.add_argument("--cutoff", type=to_fraction, default=None)
    common.add_argument("--cache-dir", default=None)

    parser = argparse.ArgumentParser(prog="toric-qh", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("index", parents=[common], help="table of mu(Phi^k)")
    p.add_argument("--rho", required=True)
    p.add_argument("--kmax", type=int, default=12)
    p.set_defaults(func=cmd_index)

    p = sub.add_parser("decompose", parents=[common], help="loop/short-path split")
    p.add_argument("--rho", required=True)
    p.add_argument("-k", type=int, default=1)
    p.set_defaults(func=cmd_decompose)

    part = sub.add_parser("partition", help="extremal partitions")
    psub = part.add_subparsers(dest="action", required=True)
    p = psub.add_parser("check", parents=[common])
    p.add_argument("--rho", required=True)
    p.add_argument("--parts", required=True, help="comma-separated parts, e.g. 1,1")
    p.set_defaults(func=cmd_partition_check)
    p = psub.add_parser("census", parents=[common])
    p.add_argument("--rho", required=True)
    p.add_argument("--kmax", type=int, default=12)
    p.set_defaults(func=cmd_partition_census)

    lemma = sub.add_parser("lemma", help="torus-orbit search")
    lsub = lemma.add_subparsers(dest="action", required=True)
    p = lsub.add_parser("find", parents=[common])
    p.add_argument("--rho", required=True)
    p.add_argument("--N", type=int, required=True)
    p.set_defaults(func=cmd_lemma_find)

    nov = sub.add_parser("novikov", help="Novikov field arithmetic")
    nsub = nov.add_subparsers(dest="action", required=True)
    p = nsub.add_parser("eval", parents=[common])
    p.add_argument("expression", help="e.g. 'inv(1 + s^-1)' or '(1+s^-1)*(1+s^-1)'")
    p.add_argument("--gamma", default="1", help="period group generators")
    p.set_defaults(func=cmd_novikov_eval)

    qh = sub.add_parser("qh", help="quantum homology of CP^n")
    qsub = qh.add_subparsers(dest="action", required=True)
    p = qsub.add_parser("mul", parents=[common])
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--omega", type=to_fraction, default=Fraction(1))
    p.add_argument("a")
    p.add_argument("b")
    p.set_defaults(func=cmd_qh_mul)
    p = qsub.add_parser("pow", parents=[common])
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--omega", type=to_fraction, default=Fraction(1))
    p.add_argument("a")
    p.add_argument("r", type=int)
    p.set_defaults(func=cmd_qh_pow)
    p = qsub.add_parser("verify-eq2", parents=[common])
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--omega", type=to_fraction, default=Fraction(1))
    p.set_defaults(func=cmd_qh_verify)

    thm = sub.add_parser("theorem", help="replay the degree argument")
    tsub = thm.add_subparsers(dest="action", required=True)
    p = tsub.add_parser("replay", parents=[common])
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--betti", required=True)
    p.set_defaults(func=cmd_theorem_replay)

    pipe = sub.add_parser("pipeline", help="run a scenario file end to end")
    ppsub = pipe.add_subparsers(dest="action", required=True)
    p = ppsub.add_parser("run", parents=[common])
    p.add_argument("scenario")
    p.set_defaults(func=cmd_pipeline_run)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(_attach_negative_values(sys.argv[1:] if argv is None else argv))
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    if getattr(args, "horizon", None) is None and args.func is cmd_lemma_find:
        args.horizon = DEFAULT_HORIZON
    if getattr(args, "cutoff", None) is None and args.func is cmd_novikov_eval:
        args.cutoff = DEFAULT_CUTOFF
    try:
        return args.func(args)
    except PipelineError as exc:
        print(f"error in {exc.stage} stage: {exc.cause!r}", file=sys.stderr)
        return 1
    except (ToolkitError, ValueError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
