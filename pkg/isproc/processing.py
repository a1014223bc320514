"""Instruction sequence processing: use, abstracting use, apply and reply.

All four operators are computed from ``run`` or from a product
construction over (thread node, service family) pairs. Threads may be
passed as RegularThread or as InstrSeq, which is extracted first.

Divergence is a value, never an exception. In exact mode a run that
revisits a (thread node, family state) pair has diverged; in fuel mode a
run that needs more steps than its fuel ends with an EXHAUSTED verdict,
which is an honest "unknown", not the divergent reply D.
"""
from collections import namedtuple
import enum
import logging

from isproc.error import StateSpaceError
from isproc.isa import InstrSeq
from isproc.services import EMPTY_FAMILY, Reply, ServiceFamily
from isproc.threads import (
    Node,
    NodeKind,
    RegularThread,
    ThreadBuilder,
    equal,
    extract,
)


DEFAULT_FUEL = 1_000_000
DEFAULT_PRODUCT_BOUND = 100_000

TAU = "tau"


class Budget(namedtuple("Budget", ["fuel", "exact"])):
    """How long a run may go on and whether to detect revisited states.

    Exact budgets still carry fuel, so exact runs against infinite state
    spaces stop.
    """

    __slots__ = ()

    def __new__(cls, fuel=DEFAULT_FUEL, exact=False):
        if fuel < 0:
            raise ValueError(f"Fuel must be a natural number, got {fuel}")
        return super().__new__(cls, fuel, exact)

    @classmethod
    def exhaustive(cls, fuel=DEFAULT_FUEL):
        """Exact budget: cycle detection on (node, family state)."""
        return cls(fuel, True)

    @classmethod
    def fuelled(cls, fuel):
        """Plain step budget."""
        return cls(fuel, False)

    def __str__(self):
        mode = "exact" if self.exact else "fuel"
        return f"{mode}({self.fuel})"


class Verdict(enum.Enum):
    """How a run ended."""

    CONVERGED = "converged"
    DIVERGED = "diverged"
    EXHAUSTED = "exhausted"


class Value(enum.Enum):
    """Reply of an instruction sequence: T, F, M, D, or U for unknown."""

    T = "T"
    F = "F"
    M = "M"
    D = "D"
    U = "U"

    @property
    def is_boolean(self):
        """True for T and F."""
        return self in (Value.T, Value.F)

    def __str__(self):
        return self.value


LEAF_VALUES = {
    NodeKind.STOP: Value.M,
    NodeKind.STOP_POS: Value.T,
    NodeKind.STOP_NEG: Value.F,
}

class ExecOutcome(
    namedtuple(
        "ExecOutcome", ["verdict", "reply", "family", "steps", "witness", "trace"]
    )
):
    """Result of running a thread against a service family.

    ``family`` is the final family of a converging run and None otherwise;
    ``witness`` describes why a run diverged.
    """

    __slots__ = ()

    @property
    def converged(self):
        """True when the run reached S, S+ or S-."""
        return self.verdict is Verdict.CONVERGED

    @property
    def apply_view(self):
        """Family per the apply operator: the empty family on divergence."""
        if self.verdict is Verdict.CONVERGED:
            return self.family
        if self.verdict is Verdict.DIVERGED:
            return EMPTY_FAMILY
        return None


Step = namedtuple("Step", ["node", "family", "action", "reply"])


def as_thread(x) -> RegularThread:
    """Return ``x`` as a thread, extracting instruction sequences."""
    if isinstance(x, InstrSeq):
        return extract(x)
    return x


def step(thread: RegularThread, node_id, family: ServiceFamily) -> Step:
    """Perform the action at ``node_id``.

    Returns:
        The next node id and family, the action taken and the service reply.
        The node is None when the action deadlocks: the focus is missing or
        the service blocks.
    """
    node = thread.nodes[node_id]
    if node.kind is NodeKind.TAU:
        return Step(node.then, family, TAU, Reply.T)
    if node.kind is not NodeKind.POST:
        raise ValueError(f"Node {node_id} is a leaf and performs no action")
    action = node.action
    service = family.get(action.focus)
    if service is None:
        return Step(None, family, action, Reply.B)
    reply, service = service.process(action.method)
    if reply is Reply.B:
        return Step(None, family, action, reply)
    family = family.replace(action.focus, service)
    successor = node.then if reply is Reply.T else node.orelse
    return Step(successor, family, action, reply)


def run(x, family: ServiceFamily, budget: Budget = None, trace=False) -> ExecOutcome:
    """Run a thread or instruction sequence against ``family``.

    Args:
        x: RegularThread or InstrSeq
        family: The service family
        budget: Fuel and mode, default fuel mode with DEFAULT_FUEL
        trace: Keep one line per step

    Returns:
        ExecOutcome
    """
    thread = as_thread(x)
    budget = budget or Budget()
    node_id = thread.root
    steps = 0
    seen = set()
    log = [] if trace else None
    while True:
        node = thread.nodes[node_id]
        if node.kind is NodeKind.DEAD:
            return ExecOutcome(
                Verdict.DIVERGED, Value.D, None, steps, f"D reached at n{node_id}", log
            )
        if node.is_leaf:
            return ExecOutcome(
                Verdict.CONVERGED, LEAF_VALUES[node.kind], family, steps, None, log
            )
        if budget.exact:
            key = (node_id, family.encode())
            if key in seen:
                witness = f"cycle at n{node_id} with family {{{family.encode()}}}"
                return ExecOutcome(Verdict.DIVERGED, Value.D, None, steps, witness, log)
            seen.add(key)
        if steps >= budget.fuel:
            logging.debug(f"Run stopped after {steps} steps, fuel exhausted")
            return ExecOutcome(Verdict.EXHAUSTED, Value.U, None, steps, None, log)
        result = step(thread, node_id, family)
        steps += 1
        if log is not None:
            log.append(f"{steps} n{node_id} {result.action} {result.reply}")
        if result.node is None:
            if result.action.focus in family:
                witness = f"{result.action} blocked at n{node_id}"
            else:
                witness = f"{result.action} has no service at n{node_id}"
            return ExecOutcome(Verdict.DIVERGED, Value.D, None, steps, witness, log)
        node_id, family = result.node, result.family


def reply(x, family, budget=None) -> Value:
    """The reply operator; U when the budget runs out."""
    return run(x, family, budget).reply


def apply(x, family, budget=None):
    """The apply operator; None when the budget runs out."""
    outcome = run(x, family, budget)
    if outcome.verdict is Verdict.DIVERGED:
        logging.warning("Apply used on a run that does not converge")
    return outcome.apply_view


def converges(x, family, budget=None):
    """True or False for convergence, None when unknown."""
    outcome = run(x, family, budget)
    if outcome.verdict is Verdict.EXHAUSTED:
        return None
    return outcome.converged


def converges_boolean(x, family, budget=None):
    """Convergence with a Boolean reply; None when unknown."""
    outcome = run(x, family, budget)
    if outcome.verdict is Verdict.EXHAUSTED:
        return None
    return outcome.reply.is_boolean


def _product(thread, family, bound, settle):
    """Build the product thread over (node, family) pairs.

    ``settle`` maps a key to the key whose node is emitted, or None for D;
    it lets abstracting use skip processed actions.
    """
    builder = ThreadBuilder(limit=bound)
    dead_id, _ = builder.node_id(None)
    builder.define(dead_id, Node.leaf(NodeKind.DEAD))
    pending = []

    def node_for(key):
        key = settle(key)
        if key is None:
            return dead_id
        node_id, is_new = builder.node_id(key)
        if is_new:
            pending.append((node_id, key))
        return node_id

    try:
        root_id = node_for((thread.root, family))
        while pending:
            node_id, (old, current) = pending.pop()
            node = thread.nodes[old]
            if node.is_leaf:
                builder.define(node_id, node)
            elif node.kind is NodeKind.TAU:
                builder.define(node_id, Node.tau(node_for((node.then, current))))
            elif node.action.focus not in current:
                builder.define(
                    node_id,
                    Node.post(
                        node.action,
                        node_for((node.then, current)),
                        node_for((node.orelse, current)),
                    ),
                )
            else:
                result = step(thread, old, current)
                if result.node is None:
                    builder.define(node_id, Node.leaf(NodeKind.DEAD))
                else:
                    builder.define(
                        node_id, Node.tau(node_for((result.node, result.family)))
                    )
    except OverflowError as err:
        msg = f"Use product grows beyond {bound} states"
        raise StateSpaceError(msg) from err
    return builder.build(root_id)


def use_thread(x, family, bound=DEFAULT_PRODUCT_BOUND) -> RegularThread:
    """The use operator: the thread left after ``family`` processed its part.

    Raises:
        StateSpaceError: If the product exceeds ``bound`` states
    """
    thread = as_thread(x)
    return _product(thread, family, bound, lambda key: key)


def abstracting_use(x, family, bound=DEFAULT_PRODUCT_BOUND) -> RegularThread:
    """The abstracting use operator: use without tau for processed actions.

    An endless chain of processed actions becomes D.
    """
    thread = as_thread(x)

    def settle(key):
        seen = set()
        while True:
            node_id, current = key
            node = thread.nodes[node_id]
            if node.kind is not NodeKind.POST or node.action.focus not in current:
                return key
            if key in seen or len(seen) > bound:
                return None
            seen.add(key)
            result = step(thread, node_id, current)
            if result.node is None:
                return None
            key = (result.node, result.family)

    return _product(thread, family, bound, settle)


class IspoVerdict(enum.Enum):
    """Outcome of checking the use, reply and apply association laws."""

    PASS = "pass"
    FAIL = "fail"
    INVALID = "invalid"
    INCONCLUSIVE = "inconclusive"


IspoReport = namedtuple("IspoReport", ["verdict", "failures"])


def check_ispo(x, u: ServiceFamily, v: ServiceFamily, budget=None) -> IspoReport:
    """Check that processing by ``u`` then ``v`` equals processing by both.

    Three equations are checked: use association, reply through use and
    apply through use with the foci of ``u`` encapsulated.

    Returns:
        IspoReport with the names of the failed equations
    """
    shared = u.foci() & v.foci()
    if shared:
        return IspoReport(IspoVerdict.INVALID, [f"shared foci {sorted(shared)}"])
    thread = as_thread(x)
    budget = budget or Budget.exhaustive()
    both = u.compose(v)
    used = use_thread(thread, u)
    failures = []
    if not equal(use_thread(thread, both), use_thread(used, v)):
        failures.append("use")
    left = run(thread, both, budget)
    right = run(used, v, budget)
    if Verdict.EXHAUSTED in (left.verdict, right.verdict):
        return IspoReport(IspoVerdict.INCONCLUSIVE, failures)
    if left.reply is not right.reply:
        failures.append("reply")
    if left.apply_view.encapsulate(u.foci()) != right.apply_view:
        failures.append("apply")
    verdict = IspoVerdict.FAIL if failures else IspoVerdict.PASS
    return IspoReport(verdict, failures)
