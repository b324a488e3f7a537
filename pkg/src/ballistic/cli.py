"""``ballistic`` command-line entry point.

Subcommands ``bd``, ``bcov`` and ``simulate``.  Exit codes: 0 success,
2 malformed input file, 3 data that fails validation, 4 conflicting or
missing arguments, 5 variables with different sample sizes.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from dataclasses import dataclass

import numpy as np

from . import __version__
from ._types import BCovWeight, BDKind, GroupedSample, TestResult
from .exceptions import BallisticError, UnknownScenarioError
from .metrics import METRICS
from .simulate import SCENARIOS, rejection_rates, to_csv
from .estimators import _bcor
from .permutation import PermutationPlan, bcov_permutation_test, bd_permutation_test
from .validation import check_variables, to_distance

EXIT_MALFORMED = 2
EXIT_INVALID = 3
EXIT_CONFLICT = 4
EXIT_SIZE_MISMATCH = 5

DELIMITERS = ",\t;"  # ascending tie priority


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


@dataclass
class Table:
    columns: list[str] | None
    rows: list[list[str]]
    first_line: int  # 1-based file line of rows[0]


def _is_number(cell: str) -> bool:
    try:
        float(cell)
    except ValueError:
        return False
    return True


def sniff_delimiter(line: str) -> str:
    """Most frequent of comma, tab and semicolon in ``line``; comma if none.

    Ties go to semicolon, then tab, since a comma may be a decimal mark.
    """
    counts = [(line.count(c), i, c) for i, c in enumerate(DELIMITERS)]
    best = max(counts)
    return best[2] if best[0] > 0 else ","


def read_table(path: str, delimiter: str | None = None, header: bool | None = None) -> Table:
    """Split a delimited text file into string cells.

    ``header=None`` treats the first row as column names when any of its
    cells is not a number.
    """
    try:
        with open(path, newline="") as fh:
            text = fh.read()
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc.strerror}", EXIT_MALFORMED) from None
    lines = text.splitlines()
    numbered = [(i + 1, ln) for i, ln in enumerate(lines) if ln.strip()]
    if not numbered:
        raise CliError(f"{path}: file is empty", EXIT_MALFORMED)
    delim = delimiter or sniff_delimiter(numbered[0][1])
    parsed = [
        (lineno, [c.strip() for c in row])
        for lineno, row in zip(
            (n for n, _ in numbered), csv.reader((ln for _, ln in numbered), delimiter=delim)
        )
    ]
    if header is None:
        header = not all(_is_number(c) for c in parsed[0][1])
    columns = None
    if header:
        columns = parsed[0][1]
        parsed = parsed[1:]
    if not parsed:
        raise CliError(f"{path}: no data rows", EXIT_MALFORMED)
    width = len(columns) if columns is not None else len(parsed[0][1])
    for lineno, row in parsed:
        if len(row) != width:
            raise CliError(
                f"{path}: row {lineno} has {len(row)} fields, expected {width}", EXIT_MALFORMED
            )
    return Table(columns, [row for _, row in parsed], parsed[0][0])


def numeric(table: Table, path: str, skip: int | None = None) -> np.ndarray:
    """Float matrix of every column except ``skip``; reports the first bad cell."""
    keep = [j for j in range(len(table.rows[0])) if j != skip]
    out = np.empty((len(table.rows), len(keep)))
    for i, row in enumerate(table.rows):
        for jj, j in enumerate(keep):
            try:
                out[i, jj] = float(row[j])
            except ValueError:
                raise CliError(
                    f"{path}: non-numeric value {row[j]!r} at row {table.first_line + i}, "
                    f"column {j + 1}",
                    EXIT_MALFORMED,
                ) from None
    return out


def _parse_sizes(text: str) -> list[int]:
    try:
        sizes = [int(s) for s in text.split(",") if s.strip()]
    except ValueError:
        raise CliError(f"--sizes must be comma-separated integers, got {text!r}", EXIT_CONFLICT) from None
    return sizes


def _fmt(x: float) -> str:
    return repr(float(f"{x:.8g}"))


def _stat_line(name: str, result: TestResult) -> str:
    line = f"{name} = {_fmt(result.statistic)}"
    if result.p_value is not None:
        line += f", p-value = {_fmt(result.p_value)}"
    return line


def bd_report(result: TestResult, data: str) -> str:
    sizes = " ".join(str(s) for s in result.sizes)
    return "\n".join(
        [
            "",
            f"\t{result.method}",
            "",
            f"data:  {data}",
            f"number of observations = {sum(result.sizes)}, group sizes: {sizes}",
            f"replicates = {result.replicates}, kbd.type = {result.variant}",
            _stat_line("bd", result),
            f"alternative hypothesis: {result.alternative}",
            "",
        ]
    )


def bcov_report(result: TestResult, data: str, bcor=None) -> str:
    lines = [
        "",
        f"\t{result.method}",
        "",
        f"data:  {data}",
        f"number of observations = {result.sizes[0]}",
        f"replicates = {result.replicates}, weight: {result.variant}",
        _stat_line(f"bcov.{result.variant}", result),
    ]
    if bcor is not None:
        lines.append(f"bcor.{result.variant} = {_fmt(bcor.select(result.variant))}")
    lines += [f"alternative hypothesis: {result.alternative}", ""]
    return "\n".join(lines)


def cmd_bd(args) -> str:
    if args.sizes is not None and args.labels_col is not None:
        raise CliError("--sizes and --labels-col are mutually exclusive", EXIT_CONFLICT)
    if args.sizes is None and args.labels_col is None:
        raise CliError("give the groups with --sizes or --labels-col", EXIT_CONFLICT)
    if args.distance and args.labels_col is not None:
        raise CliError("--labels-col cannot be combined with --distance; use --sizes", EXIT_CONFLICT)
    kind = BDKind.parse(args.kbd_type)
    sizes = _parse_sizes(args.sizes) if args.sizes is not None else None
    header = args.header if args.labels_col is None else True
    table = read_table(args.input, args.delimiter, header)
    skip = None
    if args.labels_col is not None:
        if args.labels_col not in table.columns:
            raise CliError(f"no column named {args.labels_col!r} in {args.input}", EXIT_CONFLICT)
        skip = table.columns.index(args.labels_col)
    values = numeric(table, args.input, skip)
    if skip is not None:
        if values.shape[1] == 0:
            raise CliError(f"{args.input}: no coordinate columns besides the labels", EXIT_MALFORMED)
        groups = GroupedSample.from_labels([row[skip] for row in table.rows])
    else:
        groups = GroupedSample.from_sizes(sizes)
    if groups.k < 2:
        raise BallisticError("need at least two groups")
    dist = to_distance(values, args.distance, args.metric)
    if groups.n != dist.n:
        raise BallisticError(f"group sizes add up to {groups.n} but there are {dist.n} observations")
    plan = PermutationPlan.shuffle_labels(dist.n, args.permutations, args.seed)
    result = bd_permutation_test(dist, groups, plan, kind, args.threads)
    if args.json:
        return result.to_json() + "\n"
    return bd_report(result, args.input)


def cmd_bcov(args) -> str:
    if len(args.input) < 2:
        raise CliError("bcov needs at least two --input files", EXIT_CONFLICT)
    weight = BCovWeight.parse(args.weight)
    arrays = [numeric(read_table(p, args.delimiter, args.header), p) for p in args.input]
    sizes = [len(a) for a in arrays]
    if len(set(sizes)) != 1:
        pairs = ", ".join(f"{p}: {n}" for p, n in zip(args.input, sizes))
        raise CliError(f"variables have different numbers of observations ({pairs})", EXIT_SIZE_MISMATCH)
    mats = check_variables(arrays, distance=args.distance, metric=args.metric)
    plan = PermutationPlan.shuffle_margins(mats[0].n, len(mats), args.permutations, args.seed)
    result = bcov_permutation_test(mats, plan, weight, args.threads)
    bcor = _bcor(result, mats) if args.bcor else None
    if args.json:
        doc = result.to_dict()
        if bcor is not None:
            doc["bcor"] = dict(bcor._asdict())
        return json.dumps(doc, indent=2) + "\n"
    return bcov_report(result, " and ".join(args.input), bcor)


def cmd_simulate(args) -> str:
    try:
        grid = [int(s) for s in args.n.split(",") if s.strip()]
    except ValueError:
        raise CliError(f"--n must be comma-separated integers, got {args.n!r}", EXIT_CONFLICT) from None
    try:
        rows = rejection_rates(args.scenario, grid, args.reps, args.permutations, args.seed, args.threads)
    except UnknownScenarioError as exc:
        raise CliError(str(exc), EXIT_CONFLICT) from None
    return to_csv(rows)


def _common(p: argparse.ArgumentParser, default_m: int = 99) -> None:
    p.add_argument("--permutations", type=int, default=default_m, help="replicates; 0 gives the statistic only")
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--threads", type=int, default=0, help="worker threads; 0 uses every core")


def _input_opts(p: argparse.ArgumentParser) -> None:
    p.add_argument("--distance", action="store_true", help="input holds a distance matrix")
    p.add_argument("--metric", choices=sorted(METRICS), default="euclidean")
    p.add_argument("--delimiter", help="field separator (default: detect comma, tab or semicolon)")
    p.add_argument(
        "--header",
        action=argparse.BooleanOptionalAction,
        default=None,
        help="first row holds column names (default: detect)",
    )
    p.add_argument("--json", action="store_true", help="print a JSON document instead of the report")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ballistic", description="Ball Divergence and Ball Covariance tests.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    bd = sub.add_parser("bd", help="K-sample test of equal distributions")
    bd.add_argument("--input", required=True, help="pooled sample CSV")
    bd.add_argument("--labels-col", help="column holding the group label of each row")
    bd.add_argument("--sizes", help="consecutive group sizes, e.g. 50,50")
    bd.add_argument("--kbd-type", default="sum", help="sum, summax or max")
    _input_opts(bd)
    _common(bd)
    bd.set_defaults(func=cmd_bd)

    bc = sub.add_parser("bcov", help="test of (mutual) independence")
    bc.add_argument("--input", action="append", required=True, help="one CSV per variable; repeat")
    bc.add_argument("--weight", default="constant", help="constant, probability or chisquare")
    bc.add_argument("--bcor", action="store_true", help="also report Ball Correlation")
    _input_opts(bc)
    _common(bc)
    bc.set_defaults(func=cmd_bcov)

    sim = sub.add_parser("simulate", help="rejection rates of a built-in scenario")
    sim.add_argument("--scenario", required=True, help=", ".join(SCENARIOS))
    sim.add_argument("--n", default="30", help="comma-separated sample sizes")
    sim.add_argument("--reps", type=int, default=500)
    _common(sim, default_m=199)
    sim.set_defaults(func=cmd_simulate)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        out = args.func(args)
    except CliError as exc:
        print(f"ballistic: error: {exc}", file=sys.stderr)
        return exc.code
    except BallisticError as exc:
        # covers distance-matrix checks, group problems and bad option values
        print(f"ballistic: error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except ValueError as exc:
        print(f"ballistic: error: {exc}", file=sys.stderr)
        return EXIT_CONFLICT
    sys.stdout.write(out)
    return 0
