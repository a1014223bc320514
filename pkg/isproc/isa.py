"""Instruction sequences of PGLBbt and its strict variant PGLBsbt.

Text form of an instruction sequence, one primitive instruction per token
and tokens separated by ``;``:

    f.m         plain basic instruction
    +f.m        positive test instruction
    -f.m        negative test instruction
    #l          forward jump over l positions
    \\#l         backward jump over l positions
    !           plain termination (PGLBbt only)
    !t          positive termination
    !f          negative termination

Whitespace between tokens is free. Identifiers are lowercased, so
``F.Get`` and ``f.get`` are the same basic instruction. The canonical
printed form uses `` ; `` between instructions and nothing else.

Example:

    >>> seq = parse("+f.get ; !t ; !f")
    >>> str(swap(seq))
    '+f.get ; !f ; !t'
"""
from collections import namedtuple
import enum
import re
from typing import Iterable, List, Sequence

from isproc.error import DialectError, InterfaceError, IsqSyntaxError


IDENTIFIER_RE = r"[a-z][a-z0-9_]*"
IDENTIFIER_PROG = re.compile(IDENTIFIER_RE + r"\Z")

TOKEN_RE = r"""
            ^(?:
                (?P<halt>!(?P<value>[tf])?)         # termination
            |
                (?P<back>\\)?\#(?P<offset>\d+)      # forward or backward jump
            |
                (?P<sign>[+-])?                     # optional test sign
                (?P<focus>[A-Za-z][A-Za-z0-9_]*)    # focus
                \.
                (?P<method>[A-Za-z][A-Za-z0-9_]*)   # method
            )$
            """


# pylint: disable=no-member
TOKEN_PROG = re.compile(TOKEN_RE, re.VERBOSE)


class Dialect(enum.Enum):
    """The two program notations."""

    PGLBBT = "pglbbt"
    PGLBSBT = "pglbsbt"


class Kind(enum.Enum):
    """Kinds of primitive instruction."""

    PLAIN = "plain"
    POS_TEST = "pos_test"
    NEG_TEST = "neg_test"
    FWD_JUMP = "fwd_jump"
    BWD_JUMP = "bwd_jump"
    HALT = "halt"
    HALT_POS = "halt_pos"
    HALT_NEG = "halt_neg"


BASIC_KINDS = (Kind.PLAIN, Kind.POS_TEST, Kind.NEG_TEST)
JUMP_KINDS = (Kind.FWD_JUMP, Kind.BWD_JUMP)
HALT_KINDS = (Kind.HALT, Kind.HALT_POS, Kind.HALT_NEG)


class BasicInstruction(namedtuple("BasicInstruction", ["focus", "method"])):
    """A focus.method pair."""

    __slots__ = ()

    def __new__(cls, focus, method):
        focus = focus.lower()
        method = method.lower()
        for name in (focus, method):
            if not IDENTIFIER_PROG.match(name):
                raise IsqSyntaxError(f'Bad identifier "{name}"')
        return super().__new__(cls, focus, method)

    @classmethod
    def from_text(cls, text):
        """Build from "focus.method" text."""
        focus, _, method = text.partition(".")
        return cls(focus, method)

    def __str__(self):
        return f"{self.focus}.{self.method}"


class Instruction(namedtuple("Instruction", ["kind", "basic", "offset"])):
    """A primitive instruction.

    Basic kinds carry ``basic``, jump kinds carry ``offset``, the
    termination kinds carry neither.
    """

    __slots__ = ()

    @classmethod
    def plain(cls, basic):
        """Plain basic instruction."""
        return cls(Kind.PLAIN, _as_basic(basic), None)

    @classmethod
    def pos_test(cls, basic):
        """Positive test instruction."""
        return cls(Kind.POS_TEST, _as_basic(basic), None)

    @classmethod
    def neg_test(cls, basic):
        """Negative test instruction."""
        return cls(Kind.NEG_TEST, _as_basic(basic), None)

    @classmethod
    def fwd_jump(cls, offset):
        """Forward jump instruction."""
        return cls(Kind.FWD_JUMP, None, _as_offset(offset))

    @classmethod
    def bwd_jump(cls, offset):
        """Backward jump instruction."""
        return cls(Kind.BWD_JUMP, None, _as_offset(offset))

    @property
    def is_basic(self):
        """True for plain, positive test and negative test instructions."""
        return self.kind in BASIC_KINDS

    @property
    def is_jump(self):
        """True for jump instructions."""
        return self.kind in JUMP_KINDS

    @property
    def is_halt(self):
        """True for termination instructions."""
        return self.kind in HALT_KINDS

    def target(self, position):
        """Position reached by a jump instruction at ``position``."""
        if self.kind is Kind.FWD_JUMP:
            return position + self.offset
        if self.kind is Kind.BWD_JUMP:
            return position - self.offset
        raise TypeError(f"Not a jump instruction: {self}")

    def __str__(self):
        if self.kind is Kind.PLAIN:
            return str(self.basic)
        if self.kind is Kind.POS_TEST:
            return f"+{self.basic}"
        if self.kind is Kind.NEG_TEST:
            return f"-{self.basic}"
        if self.kind is Kind.FWD_JUMP:
            return f"#{self.offset}"
        if self.kind is Kind.BWD_JUMP:
            return f"\\#{self.offset}"
        return {Kind.HALT: "!", Kind.HALT_POS: "!t", Kind.HALT_NEG: "!f"}[self.kind]


HALT = Instruction(Kind.HALT, None, None)
HALT_POS = Instruction(Kind.HALT_POS, None, None)
HALT_NEG = Instruction(Kind.HALT_NEG, None, None)


def _as_basic(basic):
    if isinstance(basic, BasicInstruction):
        return basic
    return BasicInstruction.from_text(basic)


def _as_offset(offset):
    if isinstance(offset, bool) or not isinstance(offset, int) or offset < 0:
        raise ValueError(f"Jump offset must be a natural number, got {offset!r}")
    return offset


class InstrSeq:
    """An immutable, non-empty sequence of primitive instructions.

    Positions are 1-based, as in the thread extraction equations: use
    ``seq.at(i)`` for the instruction at position ``i``. Python indexing
    (``seq[0]``) stays 0-based.
    """

    __slots__ = ("_instructions", "_dialect", "_hash")

    def __init__(self, instructions: Iterable[Instruction], dialect=Dialect.PGLBBT):
        instructions = tuple(instructions)
        if not instructions:
            raise ValueError("An instruction sequence has at least one instruction")
        dialect = Dialect(dialect)
        if dialect is Dialect.PGLBSBT and HALT in instructions:
            position = instructions.index(HALT) + 1
            msg = f"Plain termination at position {position} is not PGLBsbt"
            raise DialectError(msg)
        self._instructions = instructions
        self._dialect = dialect
        self._hash = None

    @property
    def instructions(self):
        """The instructions as a tuple."""
        return self._instructions

    @property
    def dialect(self):
        """The program notation this sequence belongs to."""
        return self._dialect

    def at(self, position):
        """Return the instruction at 1-based ``position``."""
        if not 1 <= position <= len(self):
            raise IndexError(position)
        return self._instructions[position - 1]

    def with_dialect(self, dialect):
        """Return the same instructions under another dialect."""
        return InstrSeq(self._instructions, dialect)

    def basic_instructions(self):
        """Return the set of basic instructions occurring in the sequence."""
        return {u.basic for u in self if u.is_basic}

    def foci(self):
        """Return the set of foci occurring in the sequence."""
        return {basic.focus for basic in self.basic_instructions()}

    def methods(self, focus=None):
        """Return the set of methods, optionally only those under ``focus``."""
        return {
            basic.method
            for basic in self.basic_instructions()
            if focus is None or basic.focus == focus
        }

    def check_interface(self, focus, methods):
        """Raise InterfaceError unless the sequence is in L(methods) at focus.

        Args:
            focus (str): The only focus allowed
            methods: The allowed method names
        """
        allowed = set(methods)
        for position, instruction in enumerate(self, start=1):
            if not instruction.is_basic:
                continue
            basic = instruction.basic
            if basic.focus != focus or basic.method not in allowed:
                msg = (
                    f'Instruction "{instruction}" at position {position} is '
                    f"outside interface {focus}.{{{', '.join(sorted(allowed))}}}"
                )
                raise InterfaceError(msg)

    def in_interface(self, focus, methods):
        """Test membership in L(methods) with the given focus."""
        try:
            self.check_interface(focus, methods)
        except InterfaceError:
            return False
        return True

    def __len__(self):
        return len(self._instructions)

    def __iter__(self):
        return iter(self._instructions)

    def __getitem__(self, key):
        return self._instructions[key]

    def __eq__(self, other):
        if not isinstance(other, InstrSeq):
            return NotImplemented
        return (
            self._dialect is other._dialect
            and self._instructions == other._instructions
        )

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self._dialect, self._instructions))
        return self._hash

    def __str__(self):
        return to_text(self)

    def __repr__(self):
        return f"InstrSeq({to_text(self)!r}, {self._dialect.value})"


def _line_col(text, index):
    """Return the 1-based line and column of ``index`` in ``text``."""
    line = text.count("\n", 0, index) + 1
    column = index - (text.rfind("\n", 0, index) + 1) + 1
    return line, column


def parse_instruction(token):
    """Parse one token into an Instruction.

    Raises:
        IsqSyntaxError: When the token does not follow the grammar
    """
    match = TOKEN_PROG.match(token)
    if not match:
        raise IsqSyntaxError(f'Unknown instruction "{token}"')
    if match.group("halt"):
        value = match.group("value")
        if value is None:
            return HALT
        return HALT_POS if value == "t" else HALT_NEG
    if match.group("offset") is not None:
        offset = int(match.group("offset"))
        if match.group("back"):
            return Instruction.bwd_jump(offset)
        return Instruction.fwd_jump(offset)
    basic = BasicInstruction(match.group("focus"), match.group("method"))
    sign = match.group("sign")
    if sign == "+":
        return Instruction.pos_test(basic)
    if sign == "-":
        return Instruction.neg_test(basic)
    return Instruction.plain(basic)


def parse(text: str, dialect=Dialect.PGLBBT) -> InstrSeq:
    """Parse instruction sequence text.

    Args:
        text: Instructions separated by ";"
        dialect: PGLBbt (default) or PGLBsbt

    Returns:
        The parsed InstrSeq

    Raises:
        IsqSyntaxError: On malformed text, with line and column
        DialectError: On "!" when parsing PGLBsbt
    """
    dialect = Dialect(dialect)
    instructions = []
    start = 0
    for chunk in text.split(";"):
        stripped = chunk.strip()
        leading = len(chunk) - len(chunk.lstrip())
        line, column = _line_col(text, start + leading)
        if not stripped:
            raise IsqSyntaxError("Missing instruction", line, column)
        try:
            instruction = parse_instruction(stripped)
        except IsqSyntaxError as err:
            raise IsqSyntaxError(f'Unknown instruction "{stripped}"', line, column) from err
        if dialect is Dialect.PGLBSBT and instruction == HALT:
            msg = f"Plain termination at line {line}, column {column} is not PGLBsbt"
            raise DialectError(msg)
        instructions.append(instruction)
        start += len(chunk) + 1
    return InstrSeq(instructions, dialect)


def to_text(seq: Sequence[Instruction]) -> str:
    """Print the canonical text form."""
    return " ; ".join(str(instruction) for instruction in seq)


def swap(seq: InstrSeq) -> InstrSeq:
    """Exchange positive and negative termination instructions."""
    exchange = {HALT_POS: HALT_NEG, HALT_NEG: HALT_POS}
    return InstrSeq((exchange.get(u, u) for u in seq), seq.dialect)


def ftod(seq: InstrSeq) -> InstrSeq:
    """Replace every negative termination by the deadlocking jump #0."""
    deadlock = Instruction.fwd_jump(0)
    return InstrSeq((deadlock if u == HALT_NEG else u for u in seq), seq.dialect)


def power(instruction: Instruction, n: int, dialect=Dialect.PGLBBT) -> InstrSeq:
    """Return ``instruction`` repeated n times; the 0th power is ``#1``."""
    if n < 0:
        raise ValueError(f"Power must be a natural number, got {n}")
    if n == 0:
        return InstrSeq([Instruction.fwd_jump(1)], dialect)
    return InstrSeq([instruction] * n, dialect)


def concat(seqs: List[InstrSeq]) -> InstrSeq:
    """Concatenate instruction sequences without touching jumps.

    Raises:
        ValueError: On an empty list
        DialectError: When the sequences do not share a dialect
    """
    seqs = list(seqs)
    if not seqs:
        raise ValueError("Nothing to concatenate")
    dialects = {seq.dialect for seq in seqs}
    if len(dialects) > 1:
        raise DialectError("Cannot concatenate sequences of different dialects")
    instructions = [u for seq in seqs for u in seq]
    return InstrSeq(instructions, seqs[0].dialect)


def strict(text: str) -> InstrSeq:
    """Parse PGLBsbt text."""
    return parse(text, Dialect.PGLBSBT)
