"""Command-line front end.

Exit codes: 0 success, 2 usage error, 3 parse or validation error,
4 estimation failure. Diagnostics go to stderr as ``error[CODE]: message``.
"""

from __future__ import annotations

import argparse
import csv
import io
import sys
import warnings
from typing import Iterable, Sequence

from . import __version__
from .errors import (
    ConvergenceWarning,
    DomainError,
    EstimationError,
    FixtureGeometryError,
    ParamError,
    ScenarioSyntaxError,
    ScenarioValidationError,
    SchemaError,
)
from .evaluation import (
    Label,
    NegligenceCase,
    PortfolioAnalysis,
    classify_portfolio,
    hand_rule,
)
from .montecarlo import EstimationConfig, EstimationMode
from .scenario_io import DEFAULT_FIG3_SEED, generate_fig3_fixture, parse_scenario, serialize_scenario

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_INVALID = 3
EXIT_ESTIMATION = 4

SCATTER_HEADER = ("id", "p_cat", "expected_social_cost", "label", "margin")
LINES_HEADER = ("rival_id", "slope", "intercept")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def fmt(x) -> str:
    """Shortest round-trip decimal for floats; lowercase booleans."""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, float):
        return repr(x)
    return str(x)


def to_csv(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([fmt(v) for v in row])
    return buf.getvalue()


def _u64(text: str) -> int:
    value = int(text, 0)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError(f"{text} is not an unsigned 64-bit integer")
    return value


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"{text} is not a positive integer")
    return value


def _positive_float(text: str) -> float:
    value = float(text)
    if not value > 0:
        raise argparse.ArgumentTypeError(f"{text} is not a positive number")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="safetymargin", description="Protective-system alternative analysis.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="verb", required=True, parser_class=_Parser)

    def scenario_cmd(name, help):
        p = sub.add_parser(name, help=help)
        p.add_argument("--scenario", required=True, help="scenario JSON file")
        p.add_argument("--out", default="-", help="output path (default: stdout)")
        return p

    def estimation_flags(p):
        p.add_argument("--seed", type=_u64, help="override the scenario seed")
        p.add_argument("--samples", type=_positive_int, help="Monte Carlo sample cap per conditional law")
        p.add_argument("--stderr", type=_positive_float, help="relative stderr target (default 1e-3)")
        p.add_argument("--force-mc", action="store_true", help="sample finite-support laws too")
        p.add_argument("--strict", action="store_true", help="fail when Monte Carlo misses its stderr target")
        p.add_argument("--workers", type=_positive_int, default=1, help="evaluation threads")

    scenario_cmd("validate", "check a scenario file")
    for name, help in (
        ("evaluate", "per-alternative expected social cost"),
        ("classify", "optimal selection, labels, margins and reliability premiums"),
        ("bounds", "point-slope bound checks against the optimum"),
    ):
        estimation_flags(scenario_cmd(name, help))
    p = scenario_cmd("plot-data", "CSV series for the cost/probability scatter or bound lines")
    estimation_flags(p)
    p.add_argument("--table", choices=("scatter", "bounds"), default="scatter")

    p = sub.add_parser("hand-rule", help="calculus-of-negligence verdict")
    p.add_argument("--burden", type=float, required=True)
    p.add_argument("--p", type=float, required=True, dest="p_harm")
    p.add_argument("--loss", type=float, required=True)

    p = sub.add_parser("gen-fig3", help="write the 27-alternative illustration scenario")
    p.add_argument("--seed", type=_u64, default=DEFAULT_FIG3_SEED)
    p.add_argument("--out", default="-")
    return parser


def _write(out: str, text: str | bytes) -> None:
    data = text.encode("utf-8") if isinstance(text, str) else text
    if out == "-":
        sys.stdout.buffer.write(data)
        sys.stdout.flush()
    else:
        with open(out, "wb") as fh:
            fh.write(data)


def _load(args):
    try:
        with open(args.scenario, "rb") as fh:
            raw = fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read scenario: {exc}") from None
    return parse_scenario(raw)


def _config(args, scenario) -> EstimationConfig:
    return EstimationConfig(
        mode=EstimationMode.FORCE_MONTE_CARLO if args.force_mc else EstimationMode.EXACT_PREFERRED,
        max_samples=args.samples if args.samples is not None else scenario.samples_per_alternative,
        target_stderr=args.stderr if args.stderr is not None else 1e-3,
        seed=args.seed if args.seed is not None else scenario.seed,
        strict=args.strict,
    )


def _analysis(args) -> PortfolioAnalysis:
    s = _load(args).scenario
    return classify_portfolio(s, _config(args, s), workers=args.workers)


def scatter_csv(analysis: PortfolioAnalysis) -> str:
    return to_csv(
        SCATTER_HEADER,
        (
            (e.id, e.p_cat, e.expected_social_cost, analysis.labels[e.id].value, analysis.margins[e.id])
            for e in analysis.evaluations
        ),
    )


def lines_csv(analysis: PortfolioAnalysis) -> str:
    return to_csv(LINES_HEADER, ((b.rival_id, b.slope, b.intercept) for b in analysis.bound_checks))


def classify_csv(analysis: PortfolioAnalysis) -> str:
    rows = []
    for e in analysis.evaluations:
        label = analysis.labels[e.id]
        premium = "" if label is Label.SOCIALLY_OPTIMAL else analysis.reliability_premiums[e.id]
        rows.append((e.id, label.value, e.p_cat, e.expected_social_cost, analysis.margins[e.id], premium))
    header = ("id", "label", "p_cat", "expected_social_cost", "margin", "reliability_premium")
    return to_csv(header, rows)


def _run(args) -> int:
    if args.verb == "validate":
        try:
            doc = _load(args)
        except ScenarioValidationError as exc:
            _write(args.out, "".join(f"{v}\n" for v in exc.violations))
            raise
        _write(args.out, f"OK: {len(doc.scenario.alternatives)} alternative(s)\n")
        return EXIT_OK

    if args.verb == "evaluate":
        s = _load(args).scenario
        cfg = _config(args, s)
        evals = classify_portfolio(s, cfg, workers=args.workers).evaluations
        header = ("id", "c_good", "c_fail", "c_premium", "p_cat", "expected_social_cost", "stderr")
        rows = ((e.id, e.c_good, e.c_fail, e.c_premium, e.p_cat, e.expected_social_cost, e.stderr) for e in evals)
        _write(args.out, to_csv(header, rows))
        return EXIT_OK

    if args.verb == "classify":
        _write(args.out, classify_csv(_analysis(args)))
        return EXIT_OK

    if args.verb == "bounds":
        analysis = _analysis(args)
        header = ("optimal_id", "rival_id", "slope", "intercept", "satisfied", "degenerate")
        rows = ((b.optimal_id, b.rival_id, b.slope, b.intercept, b.satisfied, b.degenerate) for b in analysis.bound_checks)
        _write(args.out, to_csv(header, rows))
        return EXIT_OK

    if args.verb == "plot-data":
        analysis = _analysis(args)
        _write(args.out, scatter_csv(analysis) if args.table == "scatter" else lines_csv(analysis))
        return EXIT_OK

    if args.verb == "hand-rule":
        verdict = hand_rule(NegligenceCase(args.burden, args.p_harm, args.loss))
        print(verdict.value)
        return EXIT_OK

    if args.verb == "gen-fig3":
        _write(args.out, serialize_scenario(generate_fig3_fixture(args.seed)))
        return EXIT_OK

    raise UsageError(f"unknown command {args.verb!r}")


def _fail(code: str, message: str, status: int) -> int:
    print(f"error[{code}]: {message}", file=sys.stderr)
    return status


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        return _fail("E_USAGE", str(exc), EXIT_USAGE)

    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        try:
            status = _run(args)
        except UsageError as exc:
            status = _fail("E_USAGE", str(exc), EXIT_USAGE)
        except ScenarioSyntaxError as exc:
            status = _fail("E_SYNTAX", str(exc), EXIT_INVALID)
        except SchemaError as exc:
            status = _fail("E_SCHEMA", str(exc), EXIT_INVALID)
        except ScenarioValidationError as exc:
            status = _fail("E_VALIDATION", str(exc), EXIT_INVALID)
        except (ParamError, DomainError) as exc:
            status = _fail("E_PARAM", str(exc), EXIT_INVALID)
        except FixtureGeometryError as exc:
            status = _fail("E_FIXTURE", str(exc), EXIT_INVALID)
        except EstimationError as exc:
            status = _fail("E_ESTIMATION", str(exc), EXIT_ESTIMATION)
    for w in caught:
        code = "W_CONVERGENCE" if issubclass(w.category, ConvergenceWarning) else "W_RUNTIME"
        print(f"warning[{code}]: {w.message}", file=sys.stderr)
    return status


if __name__ == "__main__":
    sys.exit(main())
