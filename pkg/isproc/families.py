"""Reading service families, functional units, witnesses and programs.

Family files (``.fam``) hold one ``focus = behavior(args)`` per line:

    b0 = boolreg(T)
    f = counter(5)
    f = univ(1)
    f = univ3(0)
    f = tape("|101:11")
    f = funit(decrn(2), 7)
    g = empty()

Unit files (``.fu``) either name a built-in unit on a single line
(``counter``, ``decrn(3)``, ``univ``, ``univ3``, ``tape-dup``,
``halting-oracle``) or give a finite table with lines
``state, method -> reply, state``. The first state named is the default.
Excel files with columns ``state, method, reply, next`` work the same.

Witness files (``.map``) hold ``method = program`` lines. Lines starting
with ``#`` are comments in all three formats.
"""
import os.path
import re

from isproc.error import FamilySpecError, UnitSpecError, StateSpaceError
from isproc.funits import FiniteSpace, FunctionalUnit, MethodOperation, NAT
from isproc.isa import BasicInstruction, Dialect, parse
from isproc.natunits import counter_unit, decrn_unit, univ3_unit, univ_unit
from isproc.report.workbook import read_rows
from isproc.services import EMPTY_SERVICE, BooleanRegister, ServiceFamily
from isproc.tape import SBS, TapeState, dup_unit, halting_oracle_unit
from isproc.utils import config_lines, read_text, split_arguments, unquote


FAMILY_LINE_PROG = re.compile(r"([a-z][a-z0-9_]*)\s*=\s*([a-z][a-z0-9_]*)\s*\((.*)\)\Z")
UNIT_NAME_PROG = re.compile(r"([a-z][a-z0-9_-]*)(?:\((\d+)\))?\Z", re.ASCII)
TABLE_LINE_PROG = re.compile(r"([^,]+),\s*([^,]+?)\s*->\s*([TF])\s*,\s*(.+)\Z")
WITNESS_LINE_PROG = re.compile(r"([a-z][a-z0-9_]*)\s*=\s*(.+)\Z")
NATURAL_PROG = re.compile(r"\d+\Z", re.ASCII)

BUILTIN_UNITS = {
    "counter": counter_unit,
    "univ": univ_unit,
    "univ3": univ3_unit,
    "tape-dup": dup_unit,
    "halting-oracle": halting_oracle_unit,
}


def builtin_unit(name):
    """Return the built-in unit called ``name``, e.g. ``decrn(3)``.

    Raises:
        UnitSpecError: For unknown names
    """
    match = UNIT_NAME_PROG.match(name.strip())
    if match:
        base, argument = match.groups()
        if base == "decrn" and argument is not None:
            return decrn_unit(int(argument))
        if base in BUILTIN_UNITS and argument is None:
            return BUILTIN_UNITS[base]()
    raise UnitSpecError(f'Unknown functional unit "{name}"')


def parse_state(unit, text):
    """Parse ``text`` as a state of the space of ``unit``."""
    text = unquote(text.strip())
    space = unit.space
    if space == NAT:
        if not NATURAL_PROG.match(text):
            raise StateSpaceError(f'"{text}" is not a natural number')
        return int(text)
    if space == SBS:
        return TapeState.parse(text)
    return space.parse(text)


def _unit_argument(unit, args, number):
    if len(args) != 1:
        raise FamilySpecError(f"Line {number}: expected one argument")
    try:
        return unit.service(parse_state(unit, args[0]))
    except StateSpaceError as err:
        raise FamilySpecError(f"Line {number}: {err}") from err


def parse_behavior(behavior, args, number, units=None):
    """Return the service for one family line.

    Args:
        behavior (str): boolreg, counter, univ, univ3, tape, funit or empty
        args (list): The argument texts
        number (int): Line number for messages
        units (dict): Extra units by name for funit
    """
    if behavior == "boolreg":
        if args not in (["T"], ["F"]):
            raise FamilySpecError(f"Line {number}: boolreg takes T or F")
        return BooleanRegister(args[0] == "T")
    if behavior == "empty":
        if args:
            raise FamilySpecError(f"Line {number}: empty takes no arguments")
        return EMPTY_SERVICE
    if behavior in ("counter", "univ", "univ3"):
        return _unit_argument(builtin_unit(behavior), args, number)
    if behavior == "tape":
        return _unit_argument(dup_unit(), args, number)
    if behavior == "funit":
        if len(args) != 2:
            raise FamilySpecError(f"Line {number}: funit takes a unit and a state")
        name = args[0]
        if units and name in units:
            unit = units[name]
        else:
            try:
                unit = builtin_unit(name)
            except UnitSpecError as err:
                raise FamilySpecError(f"Line {number}: {err}") from err
        return _unit_argument(unit, args[1:], number)
    raise FamilySpecError(f'Line {number}: unknown behavior "{behavior}"')


def parse_family(text, units=None) -> ServiceFamily:
    """Parse family file text.

    Raises:
        FamilySpecError: On malformed lines or a focus given twice
    """
    entries = {}
    for number, line in config_lines(text):
        match = FAMILY_LINE_PROG.match(line)
        if not match:
            raise FamilySpecError(f'Line {number}: cannot read "{line}"')
        focus, behavior, argument_text = match.groups()
        if focus in entries:
            raise FamilySpecError(f'Line {number}: focus "{focus}" given twice')
        args = split_arguments(argument_text)
        entries[focus] = parse_behavior(behavior, args, number, units)
    return ServiceFamily(entries)


def load_family(path, units=None) -> ServiceFamily:
    """Read a .fam file."""
    return parse_family(read_text(path), units)


def unit_from_rows(rows, name="unit") -> FunctionalUnit:
    """Build a finite unit from (state, method, reply, next) rows.

    Raises:
        UnitSpecError: On a repeated or missing (state, method) pair
    """
    states = []
    table = {}
    methods = []
    for state, method, reply, following in rows:
        method = BasicInstruction("f", method).method
        for s in (state, following):
            if s not in states:
                states.append(s)
        if method not in methods:
            methods.append(method)
        if (state, method) in table:
            raise UnitSpecError(f"{method} given twice for state {state}")
        table[(state, method)] = (reply == "T", following)
    missing = [(s, m) for s in states for m in methods if (s, m) not in table]
    if missing:
        s, m = missing[0]
        raise UnitSpecError(f"{m} is not defined in state {s}; operations are total")
    space = FiniteSpace(states, name=name)
    operations = {}
    for method in methods:
        lookup = {s: table[(s, method)] for s in states}
        operations[method] = MethodOperation(method, lookup.__getitem__)
    return FunctionalUnit(space, operations, name=name)


def parse_unit(text, name="unit") -> FunctionalUnit:
    """Parse unit file text: a built-in name or a finite table."""
    lines = list(config_lines(text))
    if len(lines) == 1 and "->" not in lines[0].text:
        return builtin_unit(lines[0].text)
    rows = []
    for number, line in lines:
        match = TABLE_LINE_PROG.match(line)
        if not match:
            raise UnitSpecError(f'Line {number}: cannot read "{line}"')
        rows.append(tuple(part.strip() for part in match.groups()))
    if not rows:
        raise UnitSpecError("Unit file has no table rows")
    return unit_from_rows(rows, name)


def load_unit(path) -> FunctionalUnit:
    """Read a unit from a .fu, .xls or .xlsx file."""
    name, ext = os.path.splitext(os.path.basename(path))
    if ext in (".xls", ".xlsx"):
        rows = read_rows(path)
        if not rows or [h.lower() for h in rows[0][:4]] != ["state", "method", "reply", "next"]:
            raise UnitSpecError("Unit sheet needs columns state, method, reply, next")
        return unit_from_rows([tuple(row[:4]) for row in rows[1:] if any(row)], name)
    return parse_unit(read_text(path), name)


def parse_witnesses(text):
    """Parse witness file text into a dict of method to PGLBsbt program."""
    witnesses = {}
    for number, line in config_lines(text):
        match = WITNESS_LINE_PROG.match(line)
        if not match:
            raise UnitSpecError(f'Line {number}: cannot read "{line}"')
        method, program = match.groups()
        if method in witnesses:
            raise UnitSpecError(f'Line {number}: witness for "{method}" given twice')
        witnesses[method] = parse(program, Dialect.PGLBSBT)
    return witnesses


def load_witnesses(path):
    """Read a .map file."""
    return parse_witnesses(read_text(path))


def load_program(path, dialect=Dialect.PGLBBT):
    """Read a .isq file."""
    return parse(read_text(path).strip(), dialect)
