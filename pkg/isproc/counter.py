"""A bounded counter over n Boolean registers b0, ..., b(n-1).

Register b_i holds bit i of the counter, T standing for 0 and F for 1.
The four programs set the counter to zero, increment and decrement it
modulo 2**n and test it on zero; SUCC and PRED reply F exactly when they
wrap around.
"""
from collections import namedtuple
import itertools

from isproc.isa import parse
from isproc.processing import Budget, run
from isproc.services import BooleanRegister, compose, singleton


MAX_REGISTERS = 12
OPERATIONS = ("SETZERO", "SUCC", "PRED", "ISZERO")


def register_name(i):
    """Focus of register i."""
    return f"b{i}"


def bounded_counter_programs(n):
    """Return the four counter programs for ``n`` registers by name."""
    if not 1 <= n <= MAX_REGISTERS:
        raise ValueError(f"Counter width must be in [1, {MAX_REGISTERS}], got {n}")
    regs = [register_name(i) for i in range(n)]
    setzero = [f"{b}.set_t" for b in regs] + ["!t"]
    succ = [
        part
        for b in regs
        for part in (f"-{b}.get", "#3", f"{b}.set_f", "!t", f"{b}.set_t")
    ] + ["!f"]
    pred = [
        part
        for b in regs
        for part in (f"+{b}.get", "#3", f"{b}.set_t", "!t", f"{b}.set_f")
    ] + ["!f"]
    iszero = [part for b in regs for part in (f"-{b}.get", "!f")] + ["!t"]
    texts = dict(zip(OPERATIONS, (setzero, succ, pred, iszero)))
    return {name: parse(" ; ".join(parts)) for name, parts in texts.items()}


def register_family(states):
    """Return the family b0.BR(s0) + ... + b(n-1).BR(s(n-1))."""
    return compose(
        *(singleton(register_name(i), BooleanRegister(s)) for i, s in enumerate(states))
    )


def counter_value(family, n):
    """Read the counter held by the registers of ``family``."""
    return sum(
        1 << i for i in range(n) if not family[register_name(i)].value
    )


def expected_reply(operation, states):
    """The reply of ``operation`` in closed form."""
    if operation == "SETZERO":
        return True
    if operation == "SUCC":
        return any(states)
    if operation == "PRED":
        return not all(states)
    return all(states)


def expected_value(operation, value, n):
    """The counter after ``operation``."""
    modulus = 1 << n
    if operation == "SETZERO":
        return 0
    if operation == "SUCC":
        return (value + 1) % modulus
    if operation == "PRED":
        return (value - 1) % modulus
    return value


CounterRow = namedtuple("CounterRow", ["states", "replies", "values", "ok"])


def counter_table(n):
    """Run every counter program on every register configuration.

    Returns:
        One CounterRow per configuration, b0 varying slowest, T before F.
        ``replies`` and ``values`` map operation names to the simulated
        reply and the counter afterwards.
    """
    programs = bounded_counter_programs(n)
    budget = Budget.exhaustive()
    rows = []
    for states in itertools.product((True, False), repeat=n):
        family = register_family(states)
        start = counter_value(family, n)
        replies = {}
        values = {}
        ok = True
        for operation in OPERATIONS:
            outcome = run(programs[operation], family, budget)
            replies[operation] = outcome.reply
            values[operation] = counter_value(outcome.family, n)
            want = "T" if expected_reply(operation, states) else "F"
            ok = ok and outcome.reply.value == want
            ok = ok and values[operation] == expected_value(operation, start, n)
        rows.append(CounterRow(states, replies, values, ok))
    return rows
