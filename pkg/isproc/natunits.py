"""Functional units over the natural numbers and the register machine language.

Counter and Decr_n are the small units. Univ packs six registers into one
natural, register i being the exponent of the i-th prime, and RML programs
translate to Univ programs with ``rmlful``. Univ3 recovers all twenty Univ
operations from three.

RML programs use foci r0 to r5 with methods succ, pred and iszero and no
termination instructions. A run halts when control reaches the position
right after the last instruction. r0 holds the input, r1 the Boolean
output (0 is T) and r2 the natural output.
"""
from collections import namedtuple
import logging

from isproc.error import DialectError, InterfaceError, InvalidHaltError, StateSpaceError
from isproc.funits import FOCUS, NAT, FunctionalUnit, MethodOperation
from isproc.isa import (
    BasicInstruction,
    Dialect,
    Instruction,
    InstrSeq,
    Kind,
    concat,
    power,
    strict,
)
from isproc.processing import Budget, Verdict, as_thread, step
from isproc.services import singleton
from isproc.threads import NodeKind


PRIMES = (2, 3, 5, 7, 11, 13)
REGISTERS = tuple(f"r{i}" for i in range(len(PRIMES)))
RML_METHODS = ("succ", "pred", "iszero")
G2_LIMIT = 19


def valuation(x, p):
    """Return the largest y with p**y dividing x; 0 for x = 0."""
    if x == 0:
        return 0
    y = 0
    while x % p == 0:
        x //= p
        y += 1
    return y


def setzero(x):
    """Setzero(x) = (T, 0)."""
    return True, 0


def incr(x):
    """Incr(x) = (T, x + 1)."""
    return True, x + 1


def decr(x):
    """Decr(x) = (F, 0) at 0, (T, x - 1) otherwise."""
    if x == 0:
        return False, 0
    return True, x - 1


def iszero(x):
    """Iszero(x) = (x = 0, x)."""
    return x == 0, x


def counter_unit() -> FunctionalUnit:
    """The unbounded counter."""
    operations = {
        "setzero": setzero,
        "incr": incr,
        "decr": decr,
        "iszero": iszero,
    }
    return FunctionalUnit(NAT, operations, name="counter", family_form="counter({state})")


def decrn_operation(n):
    """Decr_n(x) = (T, x - n) if x >= n, else (F, 0)."""

    def decrn(x):
        if x >= n:
            return True, x - n
        return False, 0

    return MethodOperation(f"decr_{n}", decrn)


def decrn_unit(n) -> FunctionalUnit:
    """The unit with methods decr_n and iszero."""
    if n < 1:
        raise ValueError(f"decrn needs n >= 1, got {n}")
    operations = {f"decr_{n}": decrn_operation(n), "iszero": iszero}
    return FunctionalUnit(NAT, operations, name=f"decrn({n})")


def decrn_witness(n) -> InstrSeq:
    """Program deriving Decr_n from decr and iszero.

    Tests for zero before each of the n decrements; a zero counter jumps
    to the final !f.
    """
    lines = []
    for j in range(n):
        lines.extend(["+f.iszero", f"#{3 * (n - j)}", "f.decr"])
    return strict(" ; ".join(lines + ["!t", "!f"]))


def univ_method_names():
    """Univ methods in index order: exp2, fact5, then succ, pred, iszero per register."""
    names = ["exp2", "fact5"]
    for register in REGISTERS:
        names.extend(f"{register}_{method}" for method in RML_METHODS)
    return names


def _univ_operations():
    def exp2(x):
        return True, 2 ** x

    def fact5(x):
        return True, valuation(x, 5)

    operations = {"exp2": exp2, "fact5": fact5}
    for register, p in zip(REGISTERS, PRIMES):

        def succ(x, p=p):
            return True, p * x

        def pred(x, p=p):
            if x % p == 0:
                return True, x // p
            return False, x

        def is_zero(x, p=p):
            return x % p != 0, x

        operations[f"{register}_succ"] = succ
        operations[f"{register}_pred"] = pred
        operations[f"{register}_iszero"] = is_zero
    return operations


def univ_unit() -> FunctionalUnit:
    """The universal unit over the naturals, twenty operations."""
    return FunctionalUnit(NAT, _univ_operations(), name="univ", family_form="univ({state})")


def univ_operations_indexed():
    """Return the Univ operations as a list in index order."""
    unit = univ_unit()
    return [unit[name] for name in univ_method_names()]


def g1(x):
    """G1(x) = (T, 2**x)."""
    return True, 2 ** x


def g2(x):
    """Multiply by 3 up to 3**19, then divide it out again.

    Only naturals of the form 2**a * 3**b are accepted; all others give
    (F, 0).
    """
    a = valuation(x, 2)
    b = valuation(x, 3)
    if x == 0 or x != 2 ** a * 3 ** b:
        return False, 0
    if b < G2_LIMIT:
        return True, 3 * x
    if b == G2_LIMIT:
        return True, x // 3 ** G2_LIMIT
    return False, 0


def make_g3():
    """Return G3: the Univ operation indexed by the 3-exponent, on the 2-exponent."""
    operations = univ_operations_indexed()

    def g3(x):
        i = valuation(x, 3)
        if i >= len(operations):
            return False, 0
        return operations[i](valuation(x, 2))

    return g3


def univ3_unit() -> FunctionalUnit:
    """The three-method universal unit."""
    operations = {"g1": g1, "g2": g2, "g3": make_g3()}
    return FunctionalUnit(NAT, operations, name="univ3", family_form="univ3({state})")


def univ3_pattern(i) -> InstrSeq:
    """Program deriving the i-th Univ operation from Univ3."""
    g2_instruction = Instruction.plain(BasicInstruction(FOCUS, "g2"))
    return concat(
        [
            strict("f.g1"),
            power(g2_instruction, i, Dialect.PGLBSBT),
            strict("+f.g3 ; !t ; !f"),
        ]
    )


def check_rml(program: InstrSeq):
    """Raise unless ``program`` is an RML program.

    Raises:
        DialectError: On termination instructions or the wrong dialect
        InterfaceError: On instructions outside r0..r5 and succ, pred, iszero
    """
    if program.dialect is not Dialect.PGLBSBT:
        raise DialectError("RML programs are PGLBsbt")
    for position, u in enumerate(program, start=1):
        if u.is_halt:
            raise DialectError(f"RML program terminates at position {position}")
        if u.is_basic and (
            u.basic.focus not in REGISTERS or u.basic.method not in RML_METHODS
        ):
            raise InterfaceError(f'"{u}" at position {position} is not an RML instruction')


RmlOutcome = namedtuple("RmlOutcome", ["verdict", "output", "steps", "trace"])


def _register_reply(registers, basic):
    i = REGISTERS.index(basic.focus)
    if basic.method == "succ":
        registers[i] += 1
        return True
    if basic.method == "pred":
        if registers[i] == 0:
            return False
        registers[i] -= 1
        return True
    return registers[i] == 0


def run_rml(program: InstrSeq, value, budget=None, trace=False) -> RmlOutcome:
    """Run an RML program on input ``value``.

    Returns:
        RmlOutcome with output (r1 = 0, r2) on convergence. The trace holds
        the register contents at the start and after every basic instruction.

    Raises:
        InvalidHaltError: If control leaves the program anywhere but k + 1
        StateSpaceError: If ``value`` is not a natural number
    """
    if value not in NAT:
        raise StateSpaceError(f"RML input must be a natural number, got {value!r}")
    check_rml(program)
    budget = budget or Budget()
    k = len(program)
    registers = [value, 0, 0, 0, 0, 0]
    log = [tuple(registers)] if trace else None
    position = 1
    steps = 0
    seen = set()
    while True:
        if position == k + 1:
            output = (registers[1] == 0, registers[2])
            return RmlOutcome(Verdict.CONVERGED, output, steps, log)
        if not 1 <= position <= k:
            raise InvalidHaltError(f"Control reaches position {position} of {k}")
        if budget.exact:
            key = (position, tuple(registers))
            if key in seen:
                return RmlOutcome(Verdict.DIVERGED, None, steps, log)
            seen.add(key)
        if steps >= budget.fuel:
            return RmlOutcome(Verdict.EXHAUSTED, None, steps, log)
        steps += 1
        u = program.at(position)
        if u.is_jump:
            if u.offset == 0:
                return RmlOutcome(Verdict.DIVERGED, None, steps, log)
            position = u.target(position)
            continue
        reply = _register_reply(registers, u.basic)
        if log is not None:
            log.append(tuple(registers))
        if u.kind is Kind.PLAIN:
            position += 1
        elif (u.kind is Kind.POS_TEST) == reply:
            position += 1
        else:
            position += 2


def phi(u: Instruction) -> Instruction:
    """Map an RML instruction to the Univ instruction acting the same way."""
    if not u.is_basic:
        return u
    basic = BasicInstruction(FOCUS, f"{u.basic.focus}_{u.basic.method}")
    return Instruction(u.kind, basic, None)


READOUT = strict("-f.r1_iszero ; #3 ; f.fact5 ; !t ; f.fact5 ; !f")


def rmlful(program: InstrSeq) -> InstrSeq:
    """Translate an RML program to a program over Univ with the same result."""
    check_rml(program)
    body = InstrSeq((phi(u) for u in program), Dialect.PGLBSBT)
    return concat([strict("f.exp2"), body, READOUT])


def encode_registers(registers):
    """Return the product of p_i ** c_i."""
    result = 1
    for p, c in zip(PRIMES, registers):
        result *= p ** c
    return result


LockstepReport = namedtuple("LockstepReport", ["ok", "step", "expected", "got"])


def lockstep_check(program: InstrSeq, value, budget=None) -> LockstepReport:
    """Run ``program`` and its Univ translation side by side.

    After the leading exp2 and after each register instruction the Univ
    state must equal the prime encoding of the registers.

    Returns:
        LockstepReport with the first mismatching step, if any
    """
    budget = budget or Budget.fuelled(10_000)
    outcome = run_rml(program, value, budget, trace=True)
    expected = [encode_registers(registers) for registers in outcome.trace]
    thread = as_thread(rmlful(program))
    family = singleton(FOCUS, univ_unit().service(value))
    node_id = thread.root
    for i, want in enumerate(expected):
        if thread.nodes[node_id].kind is not NodeKind.POST:
            return LockstepReport(False, i, want, None)
        result = step(thread, node_id, family)
        node_id, family = result.node, result.family
        got = family[FOCUS].state
        if got != want:
            logging.info(f"Lockstep mismatch at step {i}: {got} != {want}")
            return LockstepReport(False, i, want, got)
    return LockstepReport(True, None, None, None)


RML_CORPUS = {
    "incr": "+r0.iszero ; #4 ; r0.pred ; r2.succ ; \\#4 ; r2.succ",
    "decr": (
        "+r0.iszero ; #7 ; r0.pred ; +r0.iszero ; #5 ; r0.pred ; r2.succ ; "
        "\\#4 ; r1.succ"
    ),
    "iszero": (
        "+r0.iszero ; #2 ; r1.succ ; +r0.iszero ; #4 ; r0.pred ; r2.succ ; \\#4"
    ),
    "setzero": "+r0.iszero ; #3 ; r0.pred ; \\#3",
    "double": "+r0.iszero ; #5 ; r0.pred ; r2.succ ; r2.succ ; \\#5",
}

RML_EXPECTED = {
    "incr": incr,
    "decr": decr,
    "iszero": iszero,
    "setzero": setzero,
    "double": lambda x: (True, 2 * x),
}


def rml_corpus():
    """Return the named RML programs with the function each computes."""
    return {
        name: (strict(text), RML_EXPECTED[name]) for name, text in RML_CORPUS.items()
    }
