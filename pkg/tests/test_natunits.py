"""Tests for the natural number units and register machine programs."""
import unittest

from isproc.error import DialectError, InterfaceError, InvalidHaltError, StateSpaceError
from isproc.funits import BelowVerdict, Definedness, check_below_witness, derived_op
from isproc.isa import Instruction, strict
from isproc.natunits import (
    G2_LIMIT,
    counter_unit,
    decrn_unit,
    decrn_witness,
    g2,
    lockstep_check,
    make_g3,
    phi,
    rml_corpus,
    rmlful,
    run_rml,
    univ3_pattern,
    univ3_unit,
    univ_method_names,
    univ_operations_indexed,
    univ_unit,
    valuation,
)
from isproc.processing import Budget, Verdict


class OperationTest(unittest.TestCase):
    """Counter, Univ and Univ3 operations."""

    def test_valuation(self):
        """Exponents of primes, 0 at 0."""
        self.assertEqual(3, valuation(250, 5))
        self.assertEqual(0, valuation(7, 2))
        self.assertEqual(0, valuation(0, 3))

    def test_counter(self):
        """Decrement stops at zero with reply F."""
        unit = counter_unit()
        self.assertEqual((False, 0), unit["decr"](0))
        self.assertEqual((True, 4), unit["decr"](5))
        self.assertEqual((True, 0), unit["setzero"](9))
        self.assertEqual((False, 9), unit["iszero"](9))

    def test_univ(self):
        """Register operations act on prime exponents."""
        unit = univ_unit()
        self.assertEqual(20, len(unit))
        self.assertEqual((True, 2), unit["r0_succ"](1))
        self.assertEqual((True, 2), unit["r1_pred"](6))
        self.assertEqual((False, 4), unit["r1_pred"](4))
        self.assertEqual((False, 5), unit["r2_iszero"](5))
        self.assertEqual((True, 5), unit["r0_iszero"](5))
        self.assertEqual((True, 8), unit["exp2"](3))
        self.assertEqual((True, 3), unit["fact5"](250))
        self.assertEqual("exp2", univ_method_names()[0])

    def test_g2(self):
        """G2 counts up the 3-exponent and then divides it out."""
        self.assertEqual((True, 12), g2(4))
        self.assertEqual((True, 4), g2(4 * 3 ** G2_LIMIT))
        self.assertEqual((False, 0), g2(5))
        self.assertEqual((False, 0), g2(0))

    def test_g3_out_of_range(self):
        """G3 beyond the twentieth operation replies F."""
        self.assertEqual((False, 0), make_g3()(3 ** 20))

    def test_univ3_patterns(self):
        """Every Univ operation is derived from Univ3."""
        unit = univ3_unit()
        for i, operation in enumerate(univ_operations_indexed()):
            derived = derived_op(univ3_pattern(i), unit)
            for x in range(12):
                with self.subTest(i=i, x=x):
                    value = derived(x)
                    self.assertEqual(Definedness.DEFINED, value.status)
                    self.assertEqual(operation(x), (value.reply, value.state))

    def test_decrn_below_counter(self):
        """Decr_n is derived from decr and iszero."""
        lower_iszero = strict("+f.iszero ; !t ; !f")
        upper = counter_unit().restrict({"decr", "iszero"})
        for n in range(1, 11):
            with self.subTest(n=n):
                witnesses = {f"decr_{n}": decrn_witness(n), "iszero": lower_iszero}
                report = check_below_witness(decrn_unit(n), upper, witnesses, range(40))
                self.assertEqual(BelowVerdict.PASS, report.verdict)

    def test_decrn_witness(self):
        """The witness tests before each decrement."""
        expected = "+f.iszero ; #6 ; f.decr ; +f.iszero ; #3 ; f.decr ; !t ; !f"
        self.assertEqual(expected, str(decrn_witness(2)))


class RmlTest(unittest.TestCase):
    """Register machine programs and their Univ translation."""

    def test_corpus(self):
        """Every corpus program computes its function."""
        for name, (program, fn) in rml_corpus().items():
            for n in range(61):
                with self.subTest(name=name, n=n):
                    outcome = run_rml(program, n)
                    self.assertEqual(Verdict.CONVERGED, outcome.verdict)
                    self.assertEqual(fn(n), outcome.output)

    def test_translation(self):
        """Translated programs derive the same operation over Univ."""
        unit = univ_unit()
        for name, (program, fn) in rml_corpus().items():
            derived = derived_op(rmlful(program), unit)
            for n in range(61):
                with self.subTest(name=name, n=n):
                    value = derived(n)
                    self.assertEqual(Definedness.DEFINED, value.status)
                    self.assertEqual(run_rml(program, n).output, (value.reply, value.state))

    def test_lockstep(self):
        """The Univ state encodes the registers after every instruction."""
        for name, (program, _) in rml_corpus().items():
            for n in range(21):
                with self.subTest(name=name, n=n):
                    self.assertTrue(lockstep_check(program, n).ok)

    def test_divergence_agrees(self):
        """A looping program diverges on both sides."""
        program = strict("r0.succ ; \\#1")
        budget = Budget.fuelled(200)
        self.assertEqual(Verdict.EXHAUSTED, run_rml(program, 0, budget).verdict)
        loop = strict("r1.iszero ; \\#1")
        self.assertEqual(Verdict.DIVERGED, run_rml(loop, 3, Budget.exhaustive()).verdict)
        derived = derived_op(rmlful(loop), univ_unit())
        self.assertEqual(Definedness.UNDEFINED, derived(3).status)

    def test_rmlful_shape(self):
        """exp2, the mapped body, then the read-out."""
        translated = rmlful(strict("r2.succ"))
        self.assertEqual(1 + 1 + 6, len(translated))
        expected = "f.exp2 ; f.r2_succ ; -f.r1_iszero ; #3 ; f.fact5 ; !t ; f.fact5 ; !f"
        self.assertEqual(expected, str(translated))
        self.assertEqual("f.r0_iszero", str(phi(Instruction.plain("r0.iszero"))))

    def test_empty_loop(self):
        """Jumping straight to the exit gives (T, 0)."""
        outcome = run_rml(strict("#1"), 5)
        self.assertEqual((True, 0), outcome.output)

    def test_invalid_programs(self):
        """RML has no terminations, six registers and leaves only at the end."""
        with self.assertRaises(DialectError):
            run_rml(strict("r0.succ ; !t"), 0)
        with self.assertRaises(InterfaceError):
            run_rml(strict("r7.succ"), 0)
        with self.assertRaises(InvalidHaltError):
            run_rml(strict("#3"), 0)

    def test_input_not_natural(self):
        """Inputs must be naturals."""
        for value in (-1, 2.5, True, "3"):
            with self.subTest(value=value):
                with self.assertRaises(StateSpaceError):
                    run_rml(strict("#1"), value)


if __name__ == "__main__":
    unittest.main()
