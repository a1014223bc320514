"""Tests for running threads against service families."""
import unittest

from hypothesis import assume, given, settings, strategies as st

from isproc.error import StateSpaceError
from isproc.isa import HALT, HALT_NEG, HALT_POS, InstrSeq, ftod, parse, swap
from isproc.processing import (
    Budget,
    IspoVerdict,
    Value,
    Verdict,
    abstracting_use,
    apply,
    check_ispo,
    converges,
    reply,
    run,
    use_thread,
)
from isproc.services import (
    EMPTY_FAMILY,
    BooleanRegister,
    Reply,
    ServiceFamily,
    compose,
    encapsulate,
    singleton,
)
from isproc.threads import (
    DEAD,
    STOP,
    STOP_NEG,
    STOP_POS,
    contract_tau,
    equal,
    extract,
    post,
    project,
    tau,
)
from isproc.natunits import counter_unit

from tests.strategies import (
    REGISTER_FOCI,
    REGISTER_METHODS,
    register_families,
    register_programs,
)


def registers(**values):
    return ServiceFamily({focus: BooleanRegister(v) for focus, v in values.items()})


class RunTest(unittest.TestCase):
    """Single runs."""

    def test_set_true(self):
        """Setting a register converges with the reply of the termination."""
        outcome = run(parse("b0.set_t ; !t"), registers(b0=False))
        self.assertEqual(Verdict.CONVERGED, outcome.verdict)
        self.assertEqual(Value.T, outcome.reply)
        self.assertEqual(1, outcome.steps)
        self.assertEqual(registers(b0=True), outcome.family)

    def test_leaves(self):
        """Replies of the leaves."""
        for thread, value in ((STOP_POS, Value.T), (STOP_NEG, Value.F), (STOP, Value.M)):
            self.assertEqual(value, reply(thread, EMPTY_FAMILY))
        self.assertEqual(Value.D, reply(DEAD, registers(b0=True)))

    def test_test_branches(self):
        """A positive test follows the register content."""
        program = parse("+b0.get ; !t ; !f")
        self.assertEqual(Value.T, reply(program, registers(b0=True)))
        self.assertEqual(Value.F, reply(program, registers(b0=False)))

    def test_exact_cycle(self):
        """Exact budgets find revisited states."""
        outcome = run(parse("b0.get ; \\#1"), registers(b0=False), Budget.exhaustive())
        self.assertEqual(Verdict.DIVERGED, outcome.verdict)
        self.assertEqual("cycle at n0 with family {b0=br:F}", outcome.witness)
        self.assertEqual(EMPTY_FAMILY, outcome.apply_view)

    def test_fuel_runs_out(self):
        """Fuel budgets stop with an unknown reply."""
        outcome = run(parse("b0.get ; \\#1"), registers(b0=False), Budget.fuelled(10))
        self.assertEqual(Verdict.EXHAUSTED, outcome.verdict)
        self.assertEqual(Value.U, outcome.reply)
        self.assertEqual(10, outcome.steps)
        self.assertIsNone(outcome.apply_view)
        self.assertIsNone(converges(parse("b0.get ; \\#1"), registers(b0=False), Budget(10)))

    def test_exact_keeps_fuel(self):
        """Exact runs on infinite spaces still stop."""
        family = singleton("f", counter_unit().service(0))
        outcome = run(parse("f.incr ; \\#1"), family, Budget.exhaustive(50))
        self.assertEqual(Verdict.EXHAUSTED, outcome.verdict)

    def test_missing_service(self):
        """An action without a service deadlocks."""
        outcome = run(parse("g.m ; !t"), registers(b0=True))
        self.assertEqual(Value.D, outcome.reply)
        self.assertEqual("g.m has no service at n0", outcome.witness)

    def test_blocked_method(self):
        """A method outside the interface deadlocks."""
        outcome = run(parse("b0.incr ; !t"), registers(b0=True))
        self.assertEqual(Verdict.DIVERGED, outcome.verdict)
        self.assertEqual("b0.incr blocked at n0", outcome.witness)

    def test_trace(self):
        """Traces hold one line per step."""
        outcome = run(parse("+b0.get ; !t ; !f"), registers(b0=True), trace=True)
        self.assertEqual(["1 n0 b0.get T"], outcome.trace)

    def test_apply_on_divergence(self):
        """Apply gives the empty family and warns."""
        with self.assertLogs(level="WARNING"):
            family = apply(parse("b0.set_f ; #0"), registers(b0=True))
        self.assertEqual(EMPTY_FAMILY, family)


def with_halts(x, halt):
    """Replace every termination instruction of ``x`` by ``halt``."""
    return InstrSeq((halt if u.is_halt else u for u in x), x.dialect)


def threads(max_size=5):
    return register_programs(max_size).map(extract)


EXACT = Budget.exhaustive()


class ReplyLawTest(unittest.TestCase):
    """Termination constants, reply consistency, swap and ftod."""

    @settings(max_examples=500, deadline=None)
    @given(register_programs(), register_families())
    def test_single_termination_constant(self, x, u):
        """A converging program with one kind of termination replies with it."""
        for halt, value in ((HALT_POS, Value.T), (HALT_NEG, Value.F), (HALT, Value.M)):
            outcome = run(with_halts(x, halt), u, EXACT)
            if outcome.converged:
                self.assertEqual(value, outcome.reply)

    @settings(max_examples=500, deadline=None)
    @given(register_programs(), register_families())
    def test_verdict_matches_reply(self, x, u):
        """Convergence goes with T, F or M and divergence with D."""
        outcome = run(x, u, EXACT)
        self.assertNotEqual(Verdict.EXHAUSTED, outcome.verdict)
        self.assertEqual(outcome.converged, outcome.reply in (Value.T, Value.F, Value.M))
        self.assertEqual(outcome.verdict is Verdict.DIVERGED, outcome.reply is Value.D)

    @settings(max_examples=500, deadline=None)
    @given(register_programs(), register_families())
    def test_swap_and_ftod(self, x, u):
        """swap exchanges T and F; ftod keeps T and turns F into D."""
        value = reply(x, u, EXACT)
        if value is Value.T:
            self.assertEqual(Value.F, reply(swap(x), u, EXACT))
            self.assertEqual(Value.T, reply(ftod(x), u, EXACT))
        elif value is Value.F:
            self.assertEqual(Value.T, reply(swap(x), u, EXACT))
            self.assertEqual(Value.D, reply(ftod(x), u, EXACT))

    @settings(max_examples=200, deadline=None)
    @given(register_programs(), register_families(), st.integers(0, 40))
    def test_fuel_agrees_with_exact(self, x, u, fuel):
        """A fuel run that does not run out ends as the exact run does."""
        fuelled = run(x, u, Budget.fuelled(fuel))
        assume(fuelled.verdict is not Verdict.EXHAUSTED)
        exact = run(x, u, EXACT)
        self.assertEqual(exact.verdict, fuelled.verdict)
        self.assertEqual(exact.reply, fuelled.reply)
        self.assertEqual(exact.apply_view, fuelled.apply_view)


class ApplyReplyAxiomTest(unittest.TestCase):
    """Apply and reply on leaves, tau and postconditional threads."""

    def assert_same_run(self, left, right):
        self.assertEqual(right.reply, left.reply)
        self.assertEqual(right.apply_view, left.apply_view)

    @settings(max_examples=200, deadline=None)
    @given(register_families())
    def test_leaves(self, u):
        """S+, S- and S keep the family; D leaves the empty family."""
        for thread, value in ((STOP_POS, Value.T), (STOP_NEG, Value.F), (STOP, Value.M)):
            outcome = run(thread, u, EXACT)
            self.assertEqual(value, outcome.reply)
            self.assertEqual(u, outcome.apply_view)
        outcome = run(DEAD, u, EXACT)
        self.assertEqual(Value.D, outcome.reply)
        self.assertEqual(EMPTY_FAMILY, outcome.apply_view)

    @settings(max_examples=200, deadline=None)
    @given(threads(), register_families())
    def test_tau_is_skipped(self, x, u):
        """tau o x runs as x."""
        self.assert_same_run(run(tau(x), u, EXACT), run(x, u, EXACT))

    @settings(max_examples=200, deadline=None)
    @given(
        threads(),
        threads(),
        st.sampled_from(REGISTER_FOCI),
        st.sampled_from(REGISTER_METHODS),
        register_families(),
    )
    def test_unserved_focus(self, x, y, focus, method, u):
        """An action on a focus without a service gives D and the empty family."""
        outcome = run(post(f"{focus}.{method}", x, y), encapsulate({focus}, u), EXACT)
        self.assertEqual(Value.D, outcome.reply)
        self.assertEqual(EMPTY_FAMILY, outcome.apply_view)

    @settings(max_examples=200, deadline=None)
    @given(
        threads(),
        threads(),
        st.sampled_from(REGISTER_FOCI),
        st.sampled_from(REGISTER_METHODS),
        st.booleans(),
        register_families(),
    )
    def test_processed_action(self, x, y, focus, method, value, u):
        """The service reply picks the branch and its effect carries over; B gives D."""
        rest = encapsulate({focus}, u)
        family = compose(singleton(focus, BooleanRegister(value)), rest)
        outcome = run(post(f"{focus}.{method}", x, y), family, EXACT)
        answer, service = BooleanRegister(value).process(method)
        if answer is Reply.B:
            self.assertEqual(Value.D, outcome.reply)
            self.assertEqual(EMPTY_FAMILY, outcome.apply_view)
            return
        branch = x if answer is Reply.T else y
        expected = run(branch, compose(singleton(focus, service), rest), EXACT)
        self.assert_same_run(outcome, expected)


class UseTest(unittest.TestCase):
    """The use and abstracting use operators."""

    def test_use_turns_actions_into_tau(self):
        """Processed actions become tau."""
        thread = use_thread(parse("+b0.get ; !t ; !f"), registers(b0=True))
        self.assertEqual(tau(STOP_POS), thread)

    def test_use_keeps_other_foci(self):
        """Actions on other foci stay."""
        program = parse("+g.m ; !t ; !f")
        self.assertEqual(extract(program), use_thread(program, registers(b0=True)))

    def test_abstracting_use(self):
        """Abstracting use skips processed actions."""
        thread = abstracting_use(parse("b0.set_f ; +b0.get ; !t ; !f"), registers(b0=True))
        self.assertEqual(STOP_NEG, thread)

    def test_processed_loop(self):
        """An endless processed loop is D."""
        thread = abstracting_use(parse("b0.get ; \\#1"), registers(b0=True))
        self.assertEqual(DEAD, thread)

    def test_product_bound(self):
        """Infinite products stop at the bound."""
        family = singleton("f", counter_unit().service(0))
        with self.assertRaises(StateSpaceError):
            use_thread(parse("f.incr ; \\#1"), family, bound=100)

    def test_post_of_processed_branches(self):
        """Use follows the reply of the service."""
        thread = post("b0.get", STOP_POS, STOP_NEG)
        self.assertTrue(equal(tau(STOP_NEG), use_thread(thread, registers(b0=False))))

    @settings(max_examples=200, deadline=None)
    @given(register_programs(), register_families(("b0",)), register_families(("b1",)))
    def test_ispo(self, x, u, v):
        """Processing by u and v in turn equals processing by both."""
        report = check_ispo(x, u, v)
        self.assertEqual(IspoVerdict.PASS, report.verdict, report.failures)

    @settings(max_examples=200, deadline=None)
    @given(register_programs(), register_families(), register_families())
    def test_ispo_shared_foci(self, x, u, v):
        """Shared foci make the instance invalid."""
        assume(u.foci() & v.foci())
        self.assertEqual(IspoVerdict.INVALID, check_ispo(x, u, v).verdict)

    @settings(max_examples=200, deadline=None)
    @given(register_programs(), register_families())
    def test_abstracting_use_contracts_use(self, x, u):
        """Abstracting use is use with tau contracted."""
        thread = extract(x)
        self.assertTrue(
            equal(abstracting_use(thread, u), contract_tau(use_thread(thread, u)))
        )

    @settings(max_examples=200, deadline=None)
    @given(register_programs(), register_families())
    def test_reply_through_use(self, x, u):
        """Using all services first leaves the same reply."""
        budget = Budget.exhaustive()
        self.assertEqual(
            reply(x, u, budget), reply(use_thread(x, u), EMPTY_FAMILY, budget)
        )

    @settings(max_examples=200, deadline=None)
    @given(register_programs(), register_families())
    def test_use_empty_family(self, x, u):
        """The empty family processes nothing."""
        thread = extract(x)
        self.assertEqual(thread, use_thread(thread, EMPTY_FAMILY))

    @settings(max_examples=200, deadline=None)
    @given(threads(), register_families(), st.integers(0, 8))
    def test_use_commutes_with_projection(self, t, u, n):
        """Projecting after use is using the projection."""
        self.assertTrue(
            equal(project(use_thread(t, u), n).thread, use_thread(project(t, n).thread, u))
        )

    @settings(max_examples=200, deadline=None)
    @given(threads(), register_families(), st.sampled_from(REGISTER_FOCI), st.booleans())
    def test_use_processes_root_action(self, x, u, focus, value):
        """A processed get becomes tau in front of the used branch."""
        rest = encapsulate({focus}, u)
        family = compose(singleton(focus, BooleanRegister(value)), rest)
        thread = post(f"{focus}.get", x, DEAD)
        expected = tau(use_thread(x, family)) if value else tau(DEAD)
        self.assertTrue(equal(expected, use_thread(thread, family)))


if __name__ == "__main__":
    unittest.main()
