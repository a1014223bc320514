"""Functional units, derived method operations and functional unit degrees.

A functional unit is a finite set of named method operations over one
state space. Every method operation is total: it maps a state to a
Boolean reply and a next state. Running an instruction sequence from
L(I) against the unit at focus ``f`` yields a derived method operation,
which is partial where the run diverges.

For finite state spaces the set of derived method operations is computed
exactly by a closure over partial functions. Units over the Booleans with
the same derived set share a degree; there are twelve.
"""
import abc
from collections import namedtuple
import enum
import itertools
import logging
import random
from typing import Dict, Iterable, Iterator

from isproc.error import DialectError, InterfaceError, NormalFormError, StateSpaceError
from isproc.isa import (
    HALT_NEG,
    HALT_POS,
    BasicInstruction,
    Dialect,
    Instruction,
    InstrSeq,
    Kind,
    concat,
    strict,
)
from isproc.processing import Budget, Value, Verdict, run
from isproc.services import Reply, Service, singleton


FOCUS = "f"
DEFAULT_SPACE_BOUND = 4
SAMPLE_RANGE = 101
SAMPLE_RANDOM = 50
SAMPLE_CEILING = 10 ** 6


class StateSpace(abc.ABC):
    """A state space with a canonical default state."""

    name = "space"
    finite = False

    @property
    @abc.abstractmethod
    def default(self):
        """The fixed state taken after an off-interface method."""

    @abc.abstractmethod
    def samples(self, seed=0):
        """Return a list of states to test on."""

    def encode(self, state) -> str:
        """Canonical string of a state."""
        return str(state)

    def render(self, state) -> str:
        """State as written in family files."""
        return self.encode(state)

    def __contains__(self, state):
        return True

    def __repr__(self):
        return f"<{type(self).__name__} {self.name}>"


class FiniteSpace(StateSpace):
    """An explicitly enumerated state space; the first state is the default."""

    finite = True

    def __init__(self, states, name="finite", labels=None):
        self.states = tuple(states)
        if not self.states:
            raise StateSpaceError("A state space has at least one state")
        if len(set(self.states)) != len(self.states):
            raise StateSpaceError(f"Repeated states in {self.states}")
        self.name = name
        self.labels = dict(labels or {})
        self._index = {state: i for i, state in enumerate(self.states)}

    @property
    def default(self):
        return self.states[0]

    def samples(self, seed=0):
        return list(self.states)

    def index(self, state):
        """Position of ``state`` in the enumeration."""
        return self._index[state]

    def encode(self, state):
        return self.labels.get(state, str(state))

    def parse(self, text):
        """Return the state whose encoding is ``text``."""
        for state in self.states:
            if self.encode(state) == text:
                return state
        raise StateSpaceError(f'No state "{text}" in space {self.name}')

    def __contains__(self, state):
        return state in self._index

    def __len__(self):
        return len(self.states)

    def __eq__(self, other):
        if not isinstance(other, FiniteSpace):
            return NotImplemented
        return self.states == other.states

    def __hash__(self):
        return hash(self.states)


BOOL = FiniteSpace((True, False), name="bool", labels={True: "T", False: "F"})


class NaturalSpace(StateSpace):
    """The natural numbers with arbitrary precision; default 0."""

    name = "nat"

    @property
    def default(self):
        return 0

    def samples(self, seed=0):
        """0 to 100 and 50 seeded random values below one million."""
        rng = random.Random(seed)
        extra = [rng.randrange(SAMPLE_CEILING) for _ in range(SAMPLE_RANDOM)]
        return list(range(SAMPLE_RANGE)) + extra

    def __contains__(self, state):
        return isinstance(state, int) and not isinstance(state, bool) and state >= 0

    def __eq__(self, other):
        return isinstance(other, NaturalSpace)

    def __hash__(self):
        return hash(self.name)


NAT = NaturalSpace()


class MethodOperation:
    """A total function from states to (reply, state) pairs."""

    __slots__ = ("name", "fn")

    def __init__(self, name, fn):
        self.name = name
        self.fn = fn

    @classmethod
    def from_table(cls, space: FiniteSpace, table, name="op"):
        """Operation given as one (reply, state) pair per state, in order."""
        lookup = dict(zip(space.states, table))
        return cls(name, lookup.__getitem__)

    def __call__(self, state):
        return self.fn(state)

    def table(self, space: FiniteSpace):
        """Return the operation as a tuple over the states of ``space``."""
        return tuple(self.fn(state) for state in space.states)

    def __repr__(self):
        return f"<MethodOperation {self.name}>"


class FunctionalUnit:
    """A finite map from method names to method operations on one space.

    Attributes:
        space: The state space
        operations: dict of method name to MethodOperation
        name: Name used in family files
        family_form: Format for ``describe``; gets ``name`` and ``state``
    """

    def __init__(self, space, operations=None, name="unit", family_form=None):
        self.space = space
        self.operations: Dict[str, MethodOperation] = {}
        for method, operation in (operations or {}).items():
            if not isinstance(operation, MethodOperation):
                operation = MethodOperation(method, operation)
            self.operations[BasicInstruction(FOCUS, method).method] = operation
        self.name = name
        self.family_form = family_form or "funit({name}, {state})"

    @classmethod
    def empty(cls, space):
        """The unit without operations; its services block every method."""
        return cls(space, {}, name="empty")

    @property
    def interface(self):
        """The method names of the unit."""
        return frozenset(self.operations)

    def restrict(self, methods: Iterable[str]):
        """Return the unit restricted to ``methods``.

        The result is named after the kept methods so that its services
        encode apart from those of the full unit.
        """
        keep = set(methods)
        operations = {m: op for m, op in self.operations.items() if m in keep}
        name = f"{self.name}[{','.join(sorted(operations))}]"
        return FunctionalUnit(self.space, operations, name=name)

    def service(self, state):
        """Return the service of this unit in ``state``."""
        return UnitService(self, state)

    def describe(self, state):
        """The unit in ``state`` in family file syntax."""
        return self.family_form.format(name=self.name, state=self.space.render(state))

    def __getitem__(self, method):
        return self.operations[method]

    def __contains__(self, method):
        return method in self.operations

    def __len__(self):
        return len(self.operations)

    def __repr__(self):
        methods = ", ".join(sorted(self.operations))
        return f"<FunctionalUnit {self.name} {{{methods}}}>"


class UnitService(Service):
    """The service of a functional unit in some state."""

    __slots__ = ("unit", "state")

    def __init__(self, unit: FunctionalUnit, state):
        self.unit = unit
        self.state = state

    def process(self, method):
        operation = self.unit.operations.get(method)
        if operation is None:
            space = self.unit.space
            return Reply.B, UnitService(FunctionalUnit.empty(space), space.default)
        value, state = operation(self.state)
        return Reply.of(value), UnitService(self.unit, state)

    def encode(self):
        return f"{self.unit.name}:{self.unit.space.encode(self.state)}"

    def describe(self):
        if self.is_empty:
            return "empty()"
        return self.unit.describe(self.state)

    @property
    def is_empty(self):
        return not self.unit.operations


def unit_service(unit: FunctionalUnit, state) -> UnitService:
    """Return the service of ``unit`` in ``state``."""
    if state not in unit.space:
        raise StateSpaceError(f"{state!r} is not a state of {unit.space.name}")
    return unit.service(state)


def check_program(x: InstrSeq, methods):
    """Raise unless ``x`` is a PGLBsbt program over focus f and ``methods``.

    Raises:
        DialectError: If ``x`` is not PGLBsbt
        InterfaceError: If ``x`` leaves the interface
    """
    if x.dialect is not Dialect.PGLBSBT:
        raise DialectError(f'"{x}" is not a PGLBsbt instruction sequence')
    x.check_interface(FOCUS, methods)


class Definedness(enum.Enum):
    """Whether a derived operation is defined in a state."""

    DEFINED = "defined"
    UNDEFINED = "undefined"
    UNKNOWN = "unknown"


DerivedValue = namedtuple("DerivedValue", ["status", "reply", "state"])


class PartialMethodOperation:
    """The method operation derived from a program and a unit.

    Values are computed on demand and cached per state encoding.
    """

    def __init__(self, program: InstrSeq, unit: FunctionalUnit, budget=None):
        self.program = program
        self.unit = unit
        self.budget = budget or Budget.exhaustive()
        self._cache = {}

    def __call__(self, state) -> DerivedValue:
        key = self.unit.space.encode(state)
        if key not in self._cache:
            self._cache[key] = self._evaluate(state)
        return self._cache[key]

    def _evaluate(self, state):
        family = singleton(FOCUS, self.unit.service(state))
        outcome = run(self.program, family, self.budget)
        if outcome.verdict is Verdict.EXHAUSTED:
            return DerivedValue(Definedness.UNKNOWN, None, None)
        if outcome.verdict is Verdict.DIVERGED:
            return DerivedValue(Definedness.UNDEFINED, None, None)
        final = outcome.family[FOCUS]
        return DerivedValue(Definedness.DEFINED, outcome.reply is Value.T, final.state)

    def defined(self, state):
        """True, False, or None when the budget ran out."""
        status = self(state).status
        if status is Definedness.UNKNOWN:
            return None
        return status is Definedness.DEFINED

    def on(self, states):
        """Return (state, DerivedValue) pairs for ``states``."""
        return [(state, self(state)) for state in states]


def derived_op(x: InstrSeq, unit: FunctionalUnit, samples=None, budget=None):
    """Return the method operation that ``x`` derives over ``unit``.

    Args:
        x: A PGLBsbt program over focus f and the interface of ``unit``
        unit: The functional unit
        samples: States to evaluate right away
        budget: Budget per run, exact by default

    Returns:
        PartialMethodOperation
    """
    check_program(x, unit.interface)
    operation = PartialMethodOperation(x, unit, budget)
    if samples is not None:
        operation.on(samples)
    return operation


class BelowVerdict(enum.Enum):
    """Outcome of a witness check."""

    PASS = "pass"
    FAIL = "fail"
    INCONCLUSIVE = "inconclusive"


Counterexample = namedtuple("Counterexample", ["method", "state", "expected", "got"])
BelowReport = namedtuple("BelowReport", ["verdict", "counterexample", "checked"])


def check_below_witness(lower, upper, witnesses, states=None, budget=None):
    """Check that every operation of ``lower`` is derived from ``upper``.

    Args:
        lower: FunctionalUnit whose operations are claimed derivable
        upper: FunctionalUnit they are derived from
        witnesses: dict of method of ``lower`` to a program over ``upper``
        states: States to check, all states or the default samples if None
        budget: Budget per run

    Returns:
        BelowReport with the first counterexample, if any

    Raises:
        InterfaceError: If a method of ``lower`` has no witness
        StateSpaceError: If the units have different state spaces
    """
    if lower.space != upper.space:
        raise StateSpaceError(
            f"Units over different state spaces: {lower.space.name} and {upper.space.name}"
        )
    missing = lower.interface - set(witnesses)
    if missing:
        raise InterfaceError(f"No witness for methods {sorted(missing)}")
    states = list(lower.space.samples() if states is None else states)
    checked = 0
    inconclusive = False
    for method in sorted(lower.interface):
        derived = derived_op(witnesses[method], upper, budget=budget)
        for state in states:
            expected = lower[method](state)
            got = derived(state)
            checked += 1
            if got.status is Definedness.UNKNOWN:
                inconclusive = True
                continue
            if got.status is Definedness.UNDEFINED or (got.reply, got.state) != expected:
                example = Counterexample(method, state, expected, got)
                logging.info(f"Witness for {method} fails in state {state!r}")
                return BelowReport(BelowVerdict.FAIL, example, checked)
    verdict = BelowVerdict.INCONCLUSIVE if inconclusive else BelowVerdict.PASS
    return BelowReport(verdict, None, checked)


def _jump(source, target):
    """Jump instruction at ``source`` reaching ``target``; #0 on itself."""
    if target >= source:
        return Instruction.fwd_jump(target - source)
    return Instruction.bwd_jump(source - target)


def normalize(x: InstrSeq) -> InstrSeq:
    """Rewrite ``x`` into positive tests and jumps followed by ``!t ; !f``.

    Every instruction becomes a block of three; a ``#0`` after the blocks
    catches control that leaves the program.

    Raises:
        DialectError: If ``x`` is not PGLBsbt
    """
    if x.dialect is not Dialect.PGLBSBT:
        raise DialectError(f'"{x}" is not a PGLBsbt instruction sequence')
    k = len(x)
    dead, true, false = 3 * k + 1, 3 * k + 2, 3 * k + 3

    def start(i):
        return 3 * (i - 1) + 1 if 1 <= i <= k else dead

    result = []
    for i, u in enumerate(x, start=1):
        p = start(i)
        if u.is_basic:
            then, orelse = start(i + 1), start(i + 2)
            if u.kind is Kind.NEG_TEST:
                then, orelse = orelse, then
            elif u.kind is Kind.PLAIN:
                orelse = then
            result.extend(
                [Instruction.pos_test(u.basic), _jump(p + 1, then), _jump(p + 2, orelse)]
            )
            continue
        if u.is_jump:
            target = start(u.target(i))
        elif u == HALT_POS:
            target = true
        else:
            target = false
        result.extend([_jump(p, target), Instruction.fwd_jump(0), Instruction.fwd_jump(0)])
    result.extend([Instruction.fwd_jump(0), HALT_POS, HALT_NEG])
    return InstrSeq(result, Dialect.PGLBSBT)


def is_normal_form(x: InstrSeq) -> bool:
    """Test for positive tests and in-range jumps followed by ``!t ; !f``."""
    n = len(x)
    if x.dialect is not Dialect.PGLBSBT or n < 2:
        return False
    if x.at(n - 1) != HALT_POS or x.at(n) != HALT_NEG:
        return False
    for i in range(1, n - 1):
        u = x.at(i)
        if u.kind is Kind.POS_TEST:
            continue
        if not u.is_jump or not 1 <= u.target(i) <= n:
            return False
    return True


def _check_normal_form(x, what):
    if not is_normal_form(x):
        raise NormalFormError(f'{what} "{x}" is not in test-jump normal form')


def _adjust(u, q, p, delta):
    """Shift jump ``u`` at ``q`` that crosses position ``p``."""
    if u.kind is Kind.FWD_JUMP and q < p < u.target(q):
        return Instruction.fwd_jump(u.offset + delta)
    if u.kind is Kind.BWD_JUMP and q > p >= u.target(q):
        return Instruction.bwd_jump(u.offset + delta)
    return u


def inline_methods(x: InstrSeq, bodies: Dict[str, InstrSeq]) -> InstrSeq:
    """Replace every ``+f.m`` with m in ``bodies`` by the body of m.

    A body ``v1 ; ... ; vk ; !t ; !f`` goes in as ``v1 ; ... ; vk``. Its
    exits to k+1 and k+2 then land on the true and false successors of the
    replaced test, and jumps over the replaced test grow by k - 1.

    Raises:
        NormalFormError: If ``x`` or a body is not in normal form
    """
    _check_normal_form(x, "Program")
    for method, body in bodies.items():
        _check_normal_form(body, f"Body of {method}")
    instructions = list(x)
    p = 1
    while p <= len(instructions) - 2:
        u = instructions[p - 1]
        if u.kind is Kind.POS_TEST and u.basic.focus == FOCUS and u.basic.method in bodies:
            block = list(bodies[u.basic.method])[:-2]
            delta = len(block) - 1
            adjusted = [
                _adjust(v, q, p, delta) for q, v in enumerate(instructions, start=1)
            ]
            instructions = adjusted[: p - 1] + block + adjusted[p:]
            p += len(block)
        else:
            p += 1
    return InstrSeq(instructions, Dialect.PGLBSBT)


def _derive_closure(unit: FunctionalUnit, bound=DEFAULT_SPACE_BOUND):
    """Return every derivable partial function with a witness program.

    Partial functions are tuples over the state indices holding a
    (reply, state index) pair or None. The closure starts from the
    functions of ``!t``, ``!f`` and ``#0`` and adds, for each method m and
    derivable g and h, the function that performs m and continues as g on
    reply T and as h on reply F.
    """
    space = unit.space
    if not space.finite:
        raise StateSpaceError(f"Space {space.name} is not finite")
    if len(space) > bound:
        raise StateSpaceError(f"Space {space.name} has more than {bound} states")
    n = len(space)
    found = {
        tuple((True, s) for s in range(n)): strict("!t"),
        tuple((False, s) for s in range(n)): strict("!f"),
        tuple(None for _ in range(n)): strict("#0"),
    }
    tables = {}
    for method in sorted(unit.interface):
        tables[method] = [
            (value, space.index(state)) for value, state in unit[method].table(space)
        ]
    changed = True
    while changed:
        changed = False
        for method, table in tables.items():
            reach_t = sorted({s for value, s in table if value})
            reach_f = sorted({s for value, s in table if not value})
            proj_t = {}
            proj_f = {}
            for function, program in found.items():
                proj_t.setdefault(tuple(function[s] for s in reach_t), (function, program))
                proj_f.setdefault(tuple(function[s] for s in reach_f), (function, program))
            basic = Instruction.pos_test(BasicInstruction(FOCUS, method))
            for (g, p1), (h, p2) in itertools.product(proj_t.values(), proj_f.values()):
                combined = tuple(g[s] if value else h[s] for value, s in table)
                if combined in found:
                    continue
                program = concat(
                    [
                        InstrSeq(
                            [basic, Instruction.fwd_jump(2), Instruction.fwd_jump(len(p1) + 1)],
                            Dialect.PGLBSBT,
                        ),
                        p1,
                        p2,
                    ]
                )
                found[combined] = program
                changed = True
    result = {}
    for function, program in found.items():
        if None in function:
            continue
        table = tuple((value, space.states[s]) for value, s in function)
        result[table] = program
    logging.debug(f"{len(found)} derivable functions, {len(result)} total")
    return result


def enumerate_derived_ops(unit: FunctionalUnit, bound=DEFAULT_SPACE_BOUND):
    """Return the total derived method operations of a finite unit as tables.

    A table holds one (reply, state) pair per state in space order.

    Raises:
        StateSpaceError: If the space is infinite or larger than ``bound``
    """
    return frozenset(_derive_closure(unit, bound))


def derived_witnesses(unit: FunctionalUnit, bound=DEFAULT_SPACE_BOUND):
    """Return a dict of derived operation table to a program deriving it."""
    return _derive_closure(unit, bound)


def below_finite(lower: FunctionalUnit, upper: FunctionalUnit) -> bool:
    """Decide whether every operation of ``lower`` is derived from ``upper``."""
    if lower.space != upper.space:
        raise StateSpaceError("Units over different state spaces")
    derived = enumerate_derived_ops(upper)
    return all(op.table(lower.space) in derived for op in lower.operations.values())


def equivalent_finite(left: FunctionalUnit, right: FunctionalUnit) -> bool:
    """Decide whether two finite units have the same degree."""
    return below_finite(left, right) and below_finite(right, left)


def is_extension(unit: FunctionalUnit, larger: FunctionalUnit, samples=None) -> bool:
    """Test whether every named operation of ``unit`` is also in ``larger``.

    On infinite spaces operations are compared on ``samples``.
    """
    if unit.space != larger.space or not unit.interface <= larger.interface:
        return False
    space = unit.space
    if space.finite:
        states = space.states
    else:
        states = space.samples() if samples is None else samples
    for method, operation in unit.operations.items():
        other = larger[method]
        if operation is other:
            continue
        if any(operation(s) != other(s) for s in states):
            return False
    return True


def all_operations(space: FiniteSpace):
    """Return every method operation of a finite space as a table."""
    pairs = [(value, state) for value in (True, False) for state in space.states]
    return [tuple(table) for table in itertools.product(pairs, repeat=len(space))]


def unit_from_tables(space: FiniteSpace, tables, name="unit"):
    """Build a unit with methods m0, m1, ... from operation tables."""
    operations = {
        f"m{i}": MethodOperation.from_table(space, table, f"m{i}")
        for i, table in enumerate(tables)
    }
    return FunctionalUnit(space, operations, name=name)


Degree = namedtuple("Degree", ["derived", "representative"])


def degrees(space: FiniteSpace = BOOL):
    """Return the functional unit degrees over ``space``.

    Every set of method operations is a unit; units are grouped by their
    set of derived operations. For each degree the representative is the
    smallest operation set, first in enumeration order.
    """
    operations = all_operations(space)
    index = {table: i for i, table in enumerate(operations)}
    memo = {}

    def close(mask):
        if mask not in memo:
            tables = [operations[i] for i in range(len(operations)) if mask >> i & 1]
            derived = enumerate_derived_ops(unit_from_tables(space, tables))
            closed = 0
            for table in derived:
                closed |= 1 << index[table]
            memo[mask] = closed
        return memo[mask]

    closure = {0: close(0)}
    extend = {}
    found = {}
    for mask in range(1, 1 << len(operations)):
        high = mask.bit_length() - 1
        base = closure[mask & ~(1 << high)]
        if base >> high & 1:
            closure[mask] = base
        else:
            key = (base, high)
            if key not in extend:
                extend[key] = close(base | 1 << high)
            closure[mask] = extend[key]
    for mask in sorted(closure, key=lambda m: (bin(m).count("1"), m)):
        found.setdefault(closure[mask], mask)
    result = []
    for closed, mask in found.items():
        derived = frozenset(operations[i] for i in range(len(operations)) if closed >> i & 1)
        representative = [operations[i] for i in range(len(operations)) if mask >> i & 1]
        result.append(Degree(derived, representative))
    return result


def count_degrees_bool() -> int:
    """Return the number of functional unit degrees over the Booleans."""
    return len(degrees(BOOL))


def program_alphabet(methods, max_jump, focus=FOCUS):
    """Return every PGLBsbt instruction over ``methods`` and jumps up to ``max_jump``."""
    alphabet = []
    for method in sorted(methods):
        basic = BasicInstruction(focus, method)
        alphabet.extend(
            [Instruction.plain(basic), Instruction.pos_test(basic), Instruction.neg_test(basic)]
        )
    alphabet.extend(Instruction.fwd_jump(l) for l in range(max_jump + 1))
    alphabet.extend(Instruction.bwd_jump(l) for l in range(1, max_jump + 1))
    alphabet.extend([HALT_POS, HALT_NEG])
    return alphabet


def enumerate_programs(methods, max_length, max_jump=2) -> Iterator[InstrSeq]:
    """Yield every PGLBsbt program over ``methods`` up to ``max_length``."""
    alphabet = program_alphabet(methods, max_jump)
    for length in range(1, max_length + 1):
        for instructions in itertools.product(alphabet, repeat=length):
            yield InstrSeq(instructions, Dialect.PGLBSBT)


def _opcodes(alphabet, methods):
    """Encode instructions as (kind, argument) pairs for ``_walk``."""
    index = {method: i for i, method in enumerate(sorted(methods))}
    codes = []
    for u in alphabet:
        if u.is_basic:
            codes.append((u.kind, index[u.basic.method]))
        elif u.is_jump:
            codes.append((Kind.FWD_JUMP, u.target(0)))
        else:
            codes.append((Kind.HALT_POS, u == HALT_POS))
    return codes


def _walk(code, tables, start, limit):
    """Run encoded ``code`` on state index ``start``; None if it does not halt.

    Jumps leave the state alone, so more than ``limit`` steps means a cycle.
    """
    k = len(code)
    position = 1
    state = start
    for _ in range(limit):
        if not 1 <= position <= k:
            return None
        kind, argument = code[position - 1]
        if kind is Kind.HALT_POS:
            return argument, state
        if kind is Kind.FWD_JUMP:
            position += argument
            continue
        value, state = tables[argument][state]
        if kind is Kind.PLAIN or (kind is Kind.POS_TEST) == value:
            position += 1
        else:
            position += 2
    return None


def derived_ops_by_programs(unit: FunctionalUnit, max_length, max_jump=2):
    """Return the total operations derived by programs up to ``max_length``.

    Raises:
        StateSpaceError: If the space is infinite
    """
    space = unit.space
    if not space.finite:
        raise StateSpaceError(f"Space {space.name} is not finite")
    n = len(space)
    tables = [
        [(value, space.index(state)) for value, state in unit[method].table(space)]
        for method in sorted(unit.interface)
    ]
    alphabet = _opcodes(program_alphabet(unit.interface, max_jump), unit.interface)
    found = set()
    for length in range(1, max_length + 1):
        limit = length * n + 1
        for code in itertools.product(alphabet, repeat=length):
            values = []
            for start in range(n):
                value = _walk(code, tables, start, limit)
                if value is None:
                    break
                values.append(value)
            else:
                found.add(tuple((reply, space.states[s]) for reply, s in values))
    logging.debug(f"{len(found)} total operations from programs up to length {max_length}")
    return frozenset(found)
