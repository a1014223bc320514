"""Tape states, program encoding and the halting problem experiments.

A tape state is a string over ``0``, ``1`` and ``:`` with a head marker,
written ``"v|w"``. Programs are encoded on the tape as the bits of the
ASCII bytes of their canonical text, most significant bit first.

A program x solves the halting problem for L(I) with respect to a unit H
when, for every y in L(I) and tape content v, x converges on
``|y':v`` (y' the encoding of y) and replies T exactly when y converges
on ``|v``. With Dup in the unit no program of L(I) does this; the
diagonal constructions here exhibit the failing instance. Over the empty
base the halting unit does solve it for L({halting}).
"""
from collections import deque, namedtuple
import enum
import logging
import random
import re

from isproc.error import CorpusError, IsqSyntaxError, DialectError, StateSpaceError
from isproc.funits import FOCUS, FunctionalUnit, StateSpace, check_program
from isproc.isa import (
    HALT_NEG,
    HALT_POS,
    BasicInstruction,
    Dialect,
    Instruction,
    InstrSeq,
    Kind,
    concat,
    ftod,
    strict,
    swap,
)
from isproc.processing import Budget, Value, Verdict, run
from isproc.services import singleton
from isproc.threads import NodeKind, extract


TAPE_PROG = re.compile(r"([01:]*)\|([01:]*)\Z")
HALTING = "halting"
DUP = "dup"
DEFAULT_TAPE_FUEL = 100_000
CALL_LOG_LIMIT = 10_000


class TapeState(namedtuple("TapeState", ["left", "right"])):
    """Tape contents left and right of the head."""

    __slots__ = ()

    @classmethod
    def parse(cls, text):
        """Parse ``"v|w"``.

        Raises:
            StateSpaceError: On other characters or a missing head marker
        """
        match = TAPE_PROG.match(text)
        if not match:
            raise StateSpaceError(f'Not a tape state: "{text}"')
        return cls(match.group(1), match.group(2))

    @classmethod
    def at_start(cls, content):
        """Tape with the head before ``content``."""
        return cls("", content)

    @property
    def content(self):
        """Left and right joined."""
        return self.left + self.right

    def __str__(self):
        return f"{self.left}|{self.right}"


EMPTY_TAPE = TapeState("", "")


class TapeSpace(StateSpace):
    """Tape states; the default is the empty tape."""

    name = "sbs"

    @property
    def default(self):
        return EMPTY_TAPE

    def samples(self, seed=0):
        """The empty tape and short random tapes."""
        rng = random.Random(seed)
        states = [EMPTY_TAPE]
        for _ in range(20):
            content = "".join(rng.choice("01:") for _ in range(rng.randrange(8)))
            cut = rng.randrange(len(content) + 1)
            states.append(TapeState(content[:cut], content[cut:]))
        return states

    def encode(self, state):
        return str(state)

    def render(self, state):
        return f'"{state}"'

    def __contains__(self, state):
        return isinstance(state, TapeState) and TAPE_PROG.match(str(state)) is not None

    def __eq__(self, other):
        return isinstance(other, TapeSpace)

    def __hash__(self):
        return hash(self.name)


SBS = TapeSpace()


def dup(state: TapeState):
    """Duplicate the bits before the first colon, head moved to the start."""
    content = state.content
    bits = content.split(":", 1)[0]
    return True, TapeState.at_start(f"{bits}:{content}")


def dup_unit() -> FunctionalUnit:
    """The unit with the single method dup."""
    return FunctionalUnit(SBS, {DUP: dup}, name="tape-dup", family_form="tape({state})")


def encode_program(x: InstrSeq) -> str:
    """Return the bits of the ASCII text of ``x``."""
    return "".join(f"{byte:08b}" for byte in str(x).encode("ascii"))


def decode_program(bits: str, methods=None):
    """Return the PGLBsbt program encoded by ``bits``, or None.

    Only canonical encodings decode. With ``methods`` the program must also
    lie in L(methods) at focus f.
    """
    if not bits or len(bits) % 8 or set(bits) - {"0", "1"}:
        return None
    text = bytes(int(bits[i : i + 8], 2) for i in range(0, len(bits), 8))
    try:
        x = strict(text.decode("ascii"))
    except (UnicodeDecodeError, IsqSyntaxError, DialectError):
        return None
    if encode_program(x) != bits:
        return None
    if methods is not None and not x.in_interface(FOCUS, methods):
        return None
    return x


def colon_count(state: TapeState):
    """Number of colons on the tape."""
    return state.content.count(":")


def _converges_halting_only(thread, first_reply):
    """Decide convergence of a L({halting}) thread on the halting unit.

    The first halting call replies ``first_reply`` and empties the tape;
    every later call replies F on the empty tape.
    """
    node_id, called = thread.root, False
    seen = set()
    while True:
        node = thread.nodes[node_id]
        if node.kind is NodeKind.DEAD:
            return False
        if node.is_leaf:
            return True
        if (node_id, called) in seen:
            return False
        seen.add((node_id, called))
        if node.kind is NodeKind.TAU:
            node_id = node.then
            continue
        reply = first_reply if not called else False
        called = True
        node_id = node.then if reply else node.orelse


class HaltingOracle:
    """The method operation Halting over the empty base.

    ``calls`` keeps (colons, depth) for the latest top-level evaluations,
    depth being how many programs were decoded on the way down. At most
    ``call_limit`` entries are kept.
    """

    def __init__(self, call_limit=CALL_LOG_LIMIT):
        self.calls = deque(maxlen=call_limit)

    def evaluate(self, content):
        """Return (reply, depth) for tape content with the head at the start.

        Segments decode left to right until one fails; the last decoded
        program sees reply F from the rest of the tape.
        """
        programs = []
        while ":" in content:
            segment, content = content.split(":", 1)
            x = decode_program(segment, {HALTING})
            if x is None:
                break
            programs.append(x)
        reply = False
        for x in reversed(programs):
            reply = _converges_halting_only(extract(x), reply)
        return reply, len(programs)

    def __call__(self, state: TapeState):
        reply, depth = self.evaluate(state.content)
        self.calls.append((colon_count(state), depth))
        logging.debug(f"Halting on {state} gives {reply} at depth {depth}")
        return reply, EMPTY_TAPE


def halting_oracle_unit(oracle=None) -> FunctionalUnit:
    """The unit {halting} whose operation decides halting for L({halting})."""
    oracle = oracle or HaltingOracle()
    return FunctionalUnit(SBS, {HALTING: oracle}, name="halting-oracle")


def run_on_tape(x, unit, state, budget=None):
    """Run ``x`` against the unit service at focus f in ``state``."""
    budget = budget or Budget.exhaustive(DEFAULT_TAPE_FUEL)
    return run(x, singleton(FOCUS, unit.service(state)), budget)


class SolverVerdict(enum.Enum):
    """Outcome of a halting solver check."""

    PASS = "pass"
    FAIL = "fail"
    INCONCLUSIVE = "inconclusive"


class Condition(enum.Enum):
    """Which solver condition failed."""

    TOTALITY = "totality"
    CORRECTNESS = "correctness"
    MEMBERSHIP = "membership"


SolverWitness = namedtuple("SolverWitness", ["program", "state", "solver", "expected"])
SolverReport = namedtuple("SolverReport", ["verdict", "condition", "witness", "checked"])


def _solver_input(y, v):
    return TapeState.at_start(f"{encode_program(y)}:{v}")


def check_solution(x, unit, corpus, budget=None, methods=None) -> SolverReport:
    """Check that ``x`` solves the halting problem on ``corpus``.

    Args:
        x: Candidate solver, a program over the interface of ``unit``
        unit: FunctionalUnit over tape states
        corpus: (y, v) pairs, y a program and v the tape content
        budget: Budget per run
        methods: When given, also check that x lies in L(methods)

    Returns:
        SolverReport; budget exhaustion gives INCONCLUSIVE, never PASS
    """
    check_program(x, unit.interface)
    if methods is not None and not x.in_interface(FOCUS, methods):
        witness = SolverWitness(x, None, None, None)
        return SolverReport(SolverVerdict.FAIL, Condition.MEMBERSHIP, witness, 0)
    inconclusive = False
    checked = 0
    for y, v in corpus:
        checked += 1
        state = _solver_input(y, v)
        solver = run_on_tape(x, unit, state, budget)
        if solver.verdict is Verdict.EXHAUSTED:
            inconclusive = True
            continue
        if not solver.reply.is_boolean:
            witness = SolverWitness(y, state, solver.reply, None)
            return SolverReport(SolverVerdict.FAIL, Condition.TOTALITY, witness, checked)
        target = run_on_tape(y, unit, TapeState.at_start(v), budget)
        if target.verdict is Verdict.EXHAUSTED:
            inconclusive = True
            continue
        expected = Value.T if target.converged else Value.F
        if solver.reply is not expected:
            witness = SolverWitness(y, state, solver.reply, expected)
            return SolverReport(
                SolverVerdict.FAIL, Condition.CORRECTNESS, witness, checked
            )
    verdict = SolverVerdict.INCONCLUSIVE if inconclusive else SolverVerdict.PASS
    return SolverReport(verdict, None, None, checked)


DiagonalReport = namedtuple(
    "DiagonalReport", ["verdict", "condition", "program", "solver", "target"]
)
DiagonalReport.__doc__ = """A diagonal instance and both sides evaluated.

``solver`` is the outcome of x on the diagonal input, ``target`` the
outcome of the diagonal program on its own encoding.
"""


def diagonal_program(x: InstrSeq) -> InstrSeq:
    """Return ``f.dup ; ftod(swap(x))``."""
    return concat([strict("f.dup"), ftod(swap(x))])


def interpreter_program(x: InstrSeq) -> InstrSeq:
    """Return ``f.dup ; swap(x)``."""
    return concat([strict("f.dup"), swap(x)])


def _diagonal(x, unit, y, budget, interpreter):
    check_program(x, unit.interface)
    if DUP not in unit.interface:
        raise StateSpaceError("Diagonal programs need the dup method")
    bits = encode_program(y)
    solver = run_on_tape(x, unit, TapeState.at_start(f"{bits}:{bits}"), budget)
    target = run_on_tape(y, unit, TapeState.at_start(bits), budget)
    if Verdict.EXHAUSTED in (solver.verdict, target.verdict):
        return DiagonalReport(SolverVerdict.INCONCLUSIVE, None, y, solver, target)
    if not solver.reply.is_boolean:
        return DiagonalReport(SolverVerdict.FAIL, Condition.TOTALITY, y, solver, target)
    if interpreter:
        agrees = target.converged and target.reply is solver.reply
    else:
        agrees = (solver.reply is Value.T) == target.converged
    if agrees:
        logging.warning(f"Diagonal program {y} shows no contradiction")
        return DiagonalReport(SolverVerdict.PASS, None, y, solver, target)
    return DiagonalReport(SolverVerdict.FAIL, Condition.CORRECTNESS, y, solver, target)


def diagonal_refute(x: InstrSeq, unit=None, budget=None) -> DiagonalReport:
    """Refute ``x`` as a halting solver with the diagonal program.

    x must answer T on ``|y':y'`` exactly when y converges on ``|y'``,
    where y is ``f.dup ; ftod(swap(x))``; one of the two fails.
    """
    unit = unit or dup_unit()
    return _diagonal(x, unit, diagonal_program(x), budget, interpreter=False)


def interpreter_diagonal(x: InstrSeq, unit=None, budget=None) -> DiagonalReport:
    """Refute ``x`` as an always terminating reflexive interpreter.

    With y = ``f.dup ; swap(x)`` the replies of x on ``|y':y'`` and of y on
    ``|y'`` differ whenever x converges there.
    """
    unit = unit or dup_unit()
    return _diagonal(x, unit, interpreter_program(x), budget, interpreter=True)


def check_interpreter(x, unit, corpus, budget=None, methods=None) -> SolverReport:
    """Check that ``x`` interprets the programs of ``corpus``.

    For every (y, v) where y converges on ``|v``, x must converge on
    ``|y':v`` with the same reply and the same final tape.
    """
    check_program(x, unit.interface)
    if methods is not None and not x.in_interface(FOCUS, methods):
        witness = SolverWitness(x, None, None, None)
        return SolverReport(SolverVerdict.FAIL, Condition.MEMBERSHIP, witness, 0)
    inconclusive = False
    checked = 0
    for y, v in corpus:
        target = run_on_tape(y, unit, TapeState.at_start(v), budget)
        if target.verdict is Verdict.EXHAUSTED:
            inconclusive = True
            continue
        if not target.converged:
            continue
        checked += 1
        state = _solver_input(y, v)
        solver = run_on_tape(x, unit, state, budget)
        if solver.verdict is Verdict.EXHAUSTED:
            inconclusive = True
            continue
        if not solver.converged:
            witness = SolverWitness(y, state, solver.reply, target.reply)
            return SolverReport(SolverVerdict.FAIL, Condition.TOTALITY, witness, checked)
        if solver.reply is not target.reply or solver.family != target.family:
            witness = SolverWitness(y, state, solver.reply, target.reply)
            return SolverReport(
                SolverVerdict.FAIL, Condition.CORRECTNESS, witness, checked
            )
    verdict = SolverVerdict.INCONCLUSIVE if inconclusive else SolverVerdict.PASS
    return SolverReport(verdict, None, None, checked)


def decide_halting_dup(x: InstrSeq) -> bool:
    """Decide whether a L({dup}) program halts; the tape does not matter.

    Dup always replies T, so f.dup and +f.dup become #1 and -f.dup becomes
    #2, which leaves a jump-only program.
    """
    check_program(x, {DUP})
    replaced = []
    for u in x:
        if u.kind is Kind.NEG_TEST:
            replaced.append(Instruction.fwd_jump(2))
        elif u.is_basic:
            replaced.append(Instruction.fwd_jump(1))
        else:
            replaced.append(u)
    thread = extract(InstrSeq(replaced, Dialect.PGLBSBT))
    return thread.node().kind is not NodeKind.DEAD


def random_program(rng, methods, length, max_jump=3, halts=True) -> InstrSeq:
    """Return a random PGLBsbt program over ``methods`` at focus f."""
    choices = []
    for method in sorted(methods):
        basic = BasicInstruction(FOCUS, method)
        choices.extend(
            [Instruction.plain(basic), Instruction.pos_test(basic), Instruction.neg_test(basic)]
        )
    choices.extend(Instruction.fwd_jump(l) for l in range(max_jump + 1))
    choices.extend(Instruction.bwd_jump(l) for l in range(1, max_jump + 1))
    if halts:
        choices.extend([HALT_POS, HALT_NEG])
    if not choices:
        raise CorpusError("No instructions to choose from")
    return InstrSeq([rng.choice(choices) for _ in range(length)], Dialect.PGLBSBT)


def random_bits(rng, length):
    """Return a random bit string."""
    return "".join(rng.choice("01") for _ in range(length))


def nested_tape(programs, tail=""):
    """Return ``y1':y2':...:tail`` for programs y1, y2, ..."""
    return ":".join([encode_program(y) for y in programs] + [tail])


def generate_corpus(methods, size, seed=0, max_length=5, nesting=2):
    """Return ``size`` seeded (program, tape content) pairs.

    Contents are random bits or encodings of further programs, so that
    halting calls inside the programs see decodable input.
    """
    if size < 0:
        raise CorpusError(f"Corpus size must be a natural number, got {size}")
    rng = random.Random(seed)
    corpus = []
    for _ in range(size):
        y = random_program(rng, methods, rng.randint(1, max_length))
        if rng.random() < 0.5:
            v = random_bits(rng, rng.randrange(6))
        else:
            depth = rng.randint(1, nesting)
            inner = [
                random_program(rng, methods, rng.randint(1, max_length))
                for _ in range(depth)
            ]
            v = nested_tape(inner, random_bits(rng, rng.randrange(4)))
        corpus.append((y, v))
    return corpus
