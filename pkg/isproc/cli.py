"""Command line interface for instruction sequence processing.

Exit codes: 0 converged or pass, 1 usage or input error, 2 diverged or
fail, 3 inconclusive or budget exhausted. Every report ends with a
machine-readable trailer line.
"""
import argparse
import glob
import logging
import os.path
import re
import sys

from isproc.__version__ import __version__
from isproc.counter import MAX_REGISTERS, OPERATIONS, counter_table
from isproc.error import (
    CorpusError,
    DialectError,
    FamilySpecError,
    InterfaceError,
    InvalidHaltError,
    IsqSyntaxError,
    NormalFormError,
    StateSpaceError,
    UnitSpecError,
)
from isproc.families import (
    builtin_unit,
    load_family,
    load_program,
    load_unit,
    load_witnesses,
)
from isproc.funits import BOOL, BelowVerdict, check_below_witness, degrees
from isproc.isa import Dialect
from isproc.natunits import rmlful, run_rml
from isproc.processing import DEFAULT_FUEL, Budget, Verdict, run
from isproc.report import wbformat
from isproc.report.workbook import ReportTable, write_out
from isproc.tape import (
    SolverVerdict,
    check_solution,
    decide_halting_dup,
    diagonal_refute,
    generate_corpus,
    interpreter_diagonal,
)
from isproc.threads import extract
from isproc.utils import config_lines, read_text


EXIT_OK = 0
EXIT_ERROR = 1
EXIT_FAIL = 2
EXIT_UNKNOWN = 3

VERDICT_EXIT = {
    Verdict.CONVERGED: EXIT_OK,
    Verdict.DIVERGED: EXIT_FAIL,
    Verdict.EXHAUSTED: EXIT_UNKNOWN,
}

REPORT_EXIT = {
    "pass": EXIT_OK,
    "fail": EXIT_FAIL,
    "inconclusive": EXIT_UNKNOWN,
}

INPUT_ERRORS = (
    CorpusError,
    DialectError,
    FamilySpecError,
    InterfaceError,
    InvalidHaltError,
    IsqSyntaxError,
    NormalFormError,
    OSError,
    StateSpaceError,
    UnitSpecError,
)

NATURAL_PROG = re.compile(r"\d+\Z", re.ASCII)
STATE_RANGE_PROG = re.compile(r"(\d+)\.\.(\d+)\Z", re.ASCII)


def natural(text):
    """Argument type for natural numbers."""
    if not NATURAL_PROG.match(text):
        raise argparse.ArgumentTypeError(f'"{text}" is not a natural number')
    return int(text)


def register_count(text):
    """Argument type for the bounded counter width."""
    n = natural(text)
    if not 1 <= n <= MAX_REGISTERS:
        msg = f"counter width must be in [1, {MAX_REGISTERS}], got {n}"
        raise argparse.ArgumentTypeError(msg)
    return n


class CliArgumentParser(argparse.ArgumentParser):
    """Argument parser exiting with code 1 on usage errors."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def budget_from_args(args):
    """Return the Budget given by --fuel and --exact."""
    return Budget(args.fuel, args.exact)


def add_budget_arguments(parser):
    """Add --fuel and --exact."""
    fuel_help = f"Maximum number of steps per run. Default {DEFAULT_FUEL}."
    parser.add_argument("--fuel", type=natural, default=DEFAULT_FUEL, help=fuel_help)
    exact_help = "Detect divergence by revisited states, still within the fuel."
    parser.add_argument("--exact", action="store_true", help=exact_help)


def add_excel_argument(parser):
    """Add -e/--excel."""
    excel_help = "Also write the report table to this .xlsx file."
    parser.add_argument("-e", "--excel", help=excel_help)


def load_units(specs):
    """Load --unit NAME=PATH options into a dict."""
    units = {}
    for spec in specs or []:
        name, sep, path = spec.partition("=")
        if not sep:
            raise UnitSpecError(f'Expected NAME=PATH, got "{spec}"')
        units[name.strip()] = load_unit(path.strip())
    return units


def run_command(args):
    """Run a program against a service family."""
    program = load_program(args.program)
    family = load_family(args.family, load_units(args.unit))
    outcome = run(program, family, budget_from_args(args), trace=args.trace)
    if outcome.trace:
        for line in outcome.trace:
            print(line)
    print(f"reply={outcome.reply} steps={outcome.steps}")
    if outcome.converged:
        if outcome.family:
            print(outcome.family.describe())
    elif outcome.verdict is Verdict.DIVERGED:
        logging.warning(
            "Apply is only used on converging runs; the apply view here is the "
            "empty family"
        )
        print(f"witness={outcome.witness}")
    return VERDICT_EXIT[outcome.verdict]


def extract_command(args):
    """Print the thread of a program."""
    program = load_program(args.program)
    print(extract(program).to_text())
    return EXIT_OK


def rml_run_command(args):
    """Run an RML program on a natural input."""
    program = load_program(args.program, Dialect.PGLBSBT)
    outcome = run_rml(program, args.input, budget_from_args(args))
    if outcome.verdict is Verdict.CONVERGED:
        reply, value = outcome.output
        print(f"reply={'T' if reply else 'F'} value={value} steps={outcome.steps}")
    elif outcome.verdict is Verdict.DIVERGED:
        print(f"reply=D steps={outcome.steps}")
    else:
        print(f"reply=U steps={outcome.steps}")
    return VERDICT_EXIT[outcome.verdict]


def rml_compile_command(args):
    """Print the Univ program of an RML program."""
    program = load_program(args.program, Dialect.PGLBSBT)
    print(rmlful(program))
    return EXIT_OK


def parse_state_range(text):
    """Parse ``a..b`` into an inclusive range of naturals."""
    match = STATE_RANGE_PROG.match(text)
    if not match:
        raise StateSpaceError(f'Expected a state range "a..b", got "{text}"')
    return list(range(int(match.group(1)), int(match.group(2)) + 1))


def below_command(args):
    """Check witnesses for one unit being below another."""
    lower = load_unit(args.left)
    upper = load_unit(args.right)
    witnesses = load_witnesses(args.witness)
    states = parse_state_range(args.states) if args.states else None
    report = check_below_witness(lower, upper, witnesses, states, budget_from_args(args))
    example = report.counterexample
    if example is not None:
        print(
            f"counterexample method={example.method} state={example.state} "
            f"expected={example.expected} got={example.got.status.value}"
            f":{example.got.reply},{example.got.state}"
        )
    print(f"checked={report.checked}")
    print(f"verdict={report.verdict.value}")
    return REPORT_EXIT[report.verdict.value]


def format_table(table):
    """Render an operation table over the Booleans, e.g. ``T->(T,F) F->(F,F)``."""
    parts = []
    for state, (value, following) in zip(BOOL.states, table):
        parts.append(
            f"{BOOL.encode(state)}->({BOOL.encode(value)},{BOOL.encode(following)})"
        )
    return " ".join(parts)


def degrees_command(args):
    """Count functional unit degrees over the Booleans."""
    found = sorted(degrees(BOOL), key=lambda d: (len(d.derived), sorted(d.derived)))
    table = ReportTable("degrees", ["degree", "derived", "representative"])
    for i, degree in enumerate(found, start=1):
        representative = "; ".join(format_table(t) for t in degree.representative)
        print(f"degree {i}: derived={len(degree.derived)} representative={{{representative}}}")
        table.append([i, len(degree.derived), representative])
    print(f"degrees={len(found)}")
    if args.excel:
        write_out(args.excel, [table])
        logging.info(f"Wrote degrees to {args.excel}")
    return EXIT_OK


def counter_table_command(args):
    """Tabulate the bounded counter replies."""
    rows = counter_table(args.n)
    header = [f"b{i}" for i in range(args.n)] + list(OPERATIONS) + ["ok"]
    table = ReportTable(f"counter-{args.n}", header)
    for row in rows:
        cells = ["T" if s else "F" for s in row.states]
        cells += [str(row.replies[op]) for op in OPERATIONS]
        cells.append("yes" if row.ok else "no")
        highlight = None if row.ok else wbformat.STATUS_HIGHLIGHT["fail"]
        table.append(cells, highlight)
    print(table.to_text())
    ok = all(row.ok for row in rows)
    print(f"verdict={'pass' if ok else 'fail'}")
    if args.excel:
        write_out(args.excel, [table])
        logging.info(f"Wrote counter table to {args.excel}")
    return EXIT_OK if ok else EXIT_FAIL


def load_corpus(directory):
    """Read programs ``*.isq`` and tape contents ``tapes.txt`` from a directory.

    Every program is paired with every tape content; the empty tape when
    there is no ``tapes.txt``.
    """
    paths = sorted(glob.glob(os.path.join(directory, "*.isq")))
    if not paths:
        raise CorpusError(f"No .isq programs in {directory}")
    programs = [load_program(path, Dialect.PGLBSBT) for path in paths]
    tapes_path = os.path.join(directory, "tapes.txt")
    tapes = [""]
    if os.path.exists(tapes_path):
        tapes = [line.text for line in config_lines(read_text(tapes_path))]
    return [(y, v) for y in programs for v in tapes]


def check_solution_command(args):
    """Check a halting solver on a corpus."""
    solver = load_program(args.solver, Dialect.PGLBSBT)
    unit = builtin_unit(args.unit)
    if args.corpus:
        corpus = load_corpus(args.corpus)
    else:
        corpus = generate_corpus(unit.interface, args.generate, seed=args.seed)
    methods = unit.interface if args.reflexive else None
    report = check_solution(solver, unit, corpus, budget_from_args(args), methods)
    table = ReportTable("check-solution", ["verdict", "checked", "failed", "program", "tape"])
    if report.witness is not None:
        witness = report.witness
        print(f"failed={report.condition.value}")
        print(f"program={witness.program}")
        print(f"tape={witness.state}")
        print(f"solver={witness.solver} expected={witness.expected}")
        row = [report.condition.value, str(witness.program), str(witness.state)]
    else:
        row = ["", "", ""]
    print(f"checked={report.checked}")
    print(f"verdict={report.verdict.value}")
    if args.excel:
        highlight = wbformat.STATUS_HIGHLIGHT[report.verdict.value]
        table.append([report.verdict.value, report.checked] + row, highlight)
        write_out(args.excel, [table])
        logging.info(f"Wrote solver check to {args.excel}")
    return REPORT_EXIT[report.verdict.value]


def diagonal_command(args):
    """Build and evaluate the diagonal program for a solver."""
    solver = load_program(args.solver, Dialect.PGLBSBT)
    unit = builtin_unit(args.unit)
    refute = interpreter_diagonal if args.interpreter else diagonal_refute
    report = refute(solver, unit, budget_from_args(args))
    print(f"diagonal={report.program}")
    print(f"solver={report.solver.reply} steps={report.solver.steps}")
    print(f"diagonal_run={report.target.reply} steps={report.target.steps}")
    if report.condition is not None:
        print(f"failed={report.condition.value}")
    print(f"verdict={report.verdict.value}")
    if report.verdict is SolverVerdict.PASS:
        return EXIT_OK
    return REPORT_EXIT[report.verdict.value]


def decide_dup_command(args):
    """Decide halting of a dup-only program."""
    program = load_program(args.program, Dialect.PGLBSBT)
    halts = decide_halting_dup(program)
    print(f"verdict={'halts' if halts else 'diverges'}")
    return EXIT_OK


def build_parser():
    """Return the argument parser with all subcommands."""
    prog_desc = "Run instruction sequences against services and run experiments."
    parser = CliArgumentParser(prog="isproc", description=prog_desc)
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument(
        "-v", "--verbose", action="store_true", help="Log debug messages to stderr."
    )
    commands = parser.add_subparsers(dest="command", parser_class=CliArgumentParser)
    commands.required = True

    run_parser = commands.add_parser("run", help="Run a program on a service family.")
    run_parser.add_argument("--program", required=True, help="Path to .isq program.")
    run_parser.add_argument("--family", required=True, help="Path to .fam family.")
    unit_help = "Extra unit for funit(NAME, state), as NAME=PATH. Repeatable."
    run_parser.add_argument("--unit", action="append", help=unit_help)
    run_parser.add_argument("--trace", action="store_true", help="Print every step.")
    add_budget_arguments(run_parser)
    run_parser.set_defaults(handler=run_command)

    extract_parser = commands.add_parser("extract", help="Print the thread of a program.")
    extract_parser.add_argument("--program", required=True, help="Path to .isq program.")
    extract_parser.set_defaults(handler=extract_command)

    rml_parser = commands.add_parser("rml", help="Register machine programs.")
    rml_commands = rml_parser.add_subparsers(dest="rml_command", parser_class=CliArgumentParser)
    rml_commands.required = True
    rml_run = rml_commands.add_parser("run", help="Run an RML program.")
    rml_run.add_argument("--program", required=True, help="Path to .isq RML program.")
    rml_run.add_argument("--input", type=natural, required=True, help="Content of r0.")
    add_budget_arguments(rml_run)
    rml_run.set_defaults(handler=rml_run_command)
    rml_compile = rml_commands.add_parser("compile", help="Translate to a Univ program.")
    rml_compile.add_argument("--program", required=True, help="Path to .isq RML program.")
    rml_compile.set_defaults(handler=rml_compile_command)

    below_parser = commands.add_parser("below", help="Check a unit is below another.")
    below_parser.add_argument("--left", required=True, help="Path to the lower unit.")
    below_parser.add_argument("--right", required=True, help="Path to the upper unit.")
    below_parser.add_argument("--witness", required=True, help="Path to .map witnesses.")
    states_help = "States to check as a..b; default all or the standard samples."
    below_parser.add_argument("--states", help=states_help)
    add_budget_arguments(below_parser)
    below_parser.set_defaults(handler=below_command)

    degrees_parser = commands.add_parser("degrees", help="Count unit degrees.")
    degrees_parser.add_argument("--space", choices=["bool"], default="bool")
    add_excel_argument(degrees_parser)
    degrees_parser.set_defaults(handler=degrees_command)

    counter_parser = commands.add_parser("counter-table", help="Bounded counter table.")
    counter_parser.add_argument(
        "--n", type=register_count, required=True, help="Register count."
    )
    add_excel_argument(counter_parser)
    counter_parser.set_defaults(handler=counter_table_command)

    halting_parser = commands.add_parser("halting", help="Halting problem experiments.")
    halting_commands = halting_parser.add_subparsers(
        dest="halting_command", parser_class=CliArgumentParser
    )
    halting_commands.required = True
    check = halting_commands.add_parser("check-solution", help="Check a solver.")
    check.add_argument("--solver", required=True, help="Path to .isq solver.")
    check.add_argument("--unit", default="halting-oracle", help="Built-in tape unit.")
    source = check.add_mutually_exclusive_group(required=True)
    source.add_argument("--corpus", help="Directory of .isq programs and tapes.txt.")
    source.add_argument("--generate", type=natural, help="Generate a corpus of this size.")
    check.add_argument("--seed", type=int, default=0, help="Seed for --generate.")
    check.add_argument(
        "--reflexive", action="store_true", help="Also require the solver in L(I)."
    )
    add_budget_arguments(check)
    add_excel_argument(check)
    check.set_defaults(handler=check_solution_command)
    diagonal = halting_commands.add_parser("diagonal", help="Diagonal refutation.")
    diagonal.add_argument("--solver", required=True, help="Path to .isq solver.")
    diagonal.add_argument("--unit", default="tape-dup", help="Built-in unit with dup.")
    diagonal.add_argument(
        "--interpreter", action="store_true", help="Use the interpreter diagonal."
    )
    add_budget_arguments(diagonal)
    diagonal.set_defaults(handler=diagonal_command)
    decide = halting_commands.add_parser("decide-dup", help="Decide a dup-only program.")
    decide.add_argument("--program", required=True, help="Path to .isq program.")
    decide.set_defaults(handler=decide_dup_command)
    return parser


def main(argv=None):
    """Run the command line interface and return the exit code."""
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        format="%(asctime)s - %(levelname)s - %(message)s",
        datefmt="%m/%d/%Y %I:%M:%S %p",
        level=logging.DEBUG if args.verbose else logging.WARNING,
    )
    try:
        return args.handler(args)
    except INPUT_ERRORS as err:
        print(f"isproc: error: {err}", file=sys.stderr)
        return EXIT_ERROR


def isproc_cli():
    """Console script entry point."""
    sys.exit(main())


if __name__ == "__main__":
    isproc_cli()
