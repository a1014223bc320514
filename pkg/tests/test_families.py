"""Tests for family, unit and witness files."""
import os.path
import tempfile
import unittest

import xlsxwriter

from isproc.error import FamilySpecError, StateSpaceError, UnitSpecError
from isproc.families import (
    builtin_unit,
    load_unit,
    parse_family,
    parse_state,
    parse_unit,
    parse_witnesses,
)
from isproc.isa import Dialect
from isproc.natunits import univ_unit
from isproc.tape import TapeState, dup_unit


NEG_UNIT = """\
# negation over two states
T, neg -> F, F
F, neg -> T, T
"""


class FamilyFileTest(unittest.TestCase):
    """Service family files."""

    def test_parse(self):
        """Every behavior prints back the same."""
        text = "\n".join(
            [
                "b0 = boolreg(T)",
                "# a comment",
                "",
                "c = counter(5)",
                "f = funit(decrn(2), 7)",
                'g = tape("|101:11")',
                "h = empty()",
                "u = univ(12)",
                "w = univ3(0)",
            ]
        )
        expected = text.replace("# a comment\n\n", "")
        self.assertEqual(expected, parse_family(text).describe())

    def test_custom_unit(self):
        """funit can name units loaded from files."""
        family = parse_family("f = funit(neg, F)", {"neg": parse_unit(NEG_UNIT, "neg")})
        self.assertEqual("f = funit(neg, F)", family.describe())

    def test_errors(self):
        """Malformed lines raise with their line number."""
        bad = {
            "b0 = boolreg(T)\nb0 = boolreg(F)": "given twice",
            "b0 = bool(T)": "unknown behavior",
            "b0 boolreg(T)": "cannot read",
            "f = counter(x)": "Line 1",
            "f = funit(nope, 1)": "nope",
            "f = tape(abc)": "Line 1",
        }
        for text, message in bad.items():
            with self.subTest(text=text):
                with self.assertRaisesRegex(FamilySpecError, message):
                    parse_family(text)

    def test_parse_state(self):
        """States parse per space."""
        self.assertEqual(TapeState("1", "0"), parse_state(dup_unit(), '"1|0"'))
        self.assertEqual(12, parse_state(univ_unit(), "12"))
        with self.assertRaises(StateSpaceError):
            parse_state(univ_unit(), "-1")

    def test_parse_state_ascii_digits(self):
        """Only ASCII digits make a natural."""
        for text in ("\u00b2", "\u0663", "1\u00b2", "", "+3"):
            with self.subTest(text=text):
                with self.assertRaises(StateSpaceError):
                    parse_state(univ_unit(), text)
        self.assertEqual(7, parse_state(univ_unit(), " 7 "))


class UnitFileTest(unittest.TestCase):
    """Unit and witness files."""

    def test_table(self):
        """Finite tables make units; the first state is the default."""
        unit = parse_unit(NEG_UNIT, "neg")
        self.assertEqual(("T", "F"), unit.space.states)
        self.assertEqual((False, "F"), unit["neg"]("T"))
        self.assertEqual("T", unit.space.default)

    def test_not_total(self):
        """Every method is defined in every state."""
        with self.assertRaisesRegex(UnitSpecError, "not defined"):
            parse_unit("a, m -> T, b\na, n -> T, a\nb, m -> F, a")

    def test_builtin(self):
        """Built-in names, including decrn(n)."""
        self.assertEqual({"decr_3", "iszero"}, set(parse_unit("decrn(3)").interface))
        self.assertEqual({"halting"}, set(builtin_unit("halting-oracle").interface))
        with self.assertRaises(UnitSpecError):
            builtin_unit("decrn")

    def test_excel(self):
        """Units read from a worksheet."""
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, "neg.xlsx")
            wb = xlsxwriter.Workbook(path)
            ws = wb.add_worksheet()
            rows = [
                ["state", "method", "reply", "next"],
                ["T", "neg", "F", "F"],
                ["F", "neg", "T", "T"],
            ]
            for i, row in enumerate(rows):
                ws.write_row(i, 0, row)
            wb.close()
            unit = load_unit(path)
        self.assertEqual("neg", unit.name)
        self.assertEqual((True, "T"), unit["neg"]("F"))

    def test_witnesses(self):
        """Witness files map methods to PGLBsbt programs."""
        witnesses = parse_witnesses("# w\ndecr_2 = f.decr ; f.decr ; !t\n")
        self.assertEqual(Dialect.PGLBSBT, witnesses["decr_2"].dialect)
        with self.assertRaises(UnitSpecError):
            parse_witnesses("a = !t\na = !f")


if __name__ == "__main__":
    unittest.main()
