"""Tests for services and service families."""
import unittest

from hypothesis import given, settings, strategies as st

from isproc.services import (
    EMPTY_FAMILY,
    EMPTY_SERVICE,
    BooleanRegister,
    Reply,
    ServiceFamily,
    compose,
    encapsulate,
    foci,
    singleton,
)

from tests.strategies import REGISTER_FOCI, register_families


FOCUS_SETS = st.sets(st.sampled_from(REGISTER_FOCI + ("g",)))
SERVICES = st.one_of(st.booleans().map(BooleanRegister), st.just(EMPTY_SERVICE))


class BooleanRegisterTest(unittest.TestCase):
    """The Boolean register service."""

    def test_methods(self):
        """set_t and set_f store and reply, get reads."""
        register = BooleanRegister(False)
        self.assertEqual((Reply.T, BooleanRegister(True)), register.process("set_t"))
        self.assertEqual((Reply.F, BooleanRegister(False)), register.process("set_f"))
        self.assertEqual((Reply.F, register), register.process("get"))

    def test_other_method(self):
        """Other methods block and leave the empty service."""
        reply, service = BooleanRegister(True).process("incr")
        self.assertIs(Reply.B, reply)
        self.assertIs(EMPTY_SERVICE, service)
        self.assertTrue(service.is_empty)

    def test_describe(self):
        """Registers print in family file syntax."""
        self.assertEqual("boolreg(F)", BooleanRegister(False).describe())


class ServiceFamilyTest(unittest.TestCase):
    """Composition and encapsulation."""

    def test_describe(self):
        """Families print sorted by focus."""
        family = compose(
            singleton("b1", BooleanRegister(False)), singleton("b0", BooleanRegister(True))
        )
        self.assertEqual("b0 = boolreg(T)\nb1 = boolreg(F)", family.describe())

    def test_clash(self):
        """A focus on both sides holds the empty service."""
        left = singleton("b0", BooleanRegister(True))
        with self.assertLogs(level="WARNING"):
            family = left.compose(singleton("b0", BooleanRegister(False)))
        self.assertIs(EMPTY_SERVICE, family["b0"])

    def test_encapsulate(self):
        """Encapsulation removes foci."""
        family = ServiceFamily({"b0": BooleanRegister(), "b1": BooleanRegister()})
        self.assertEqual({"b1"}, foci(encapsulate({"b0", "g"}, family)))


class CompositionTest(unittest.TestCase):
    """Composition of service families."""

    @settings(max_examples=200, deadline=None)
    @given(register_families())
    def test_empty_family_is_unit(self, u):
        """Composing with the empty family changes nothing."""
        self.assertEqual(u, compose(u, EMPTY_FAMILY))
        self.assertEqual(u, compose(EMPTY_FAMILY, u))

    @settings(max_examples=200, deadline=None)
    @given(register_families(), register_families())
    def test_commutes(self, u, v):
        """Composition is commutative, also on clashes."""
        self.assertEqual(compose(u, v), compose(v, u))
        self.assertEqual(foci(u) | foci(v), foci(compose(u, v)))

    @settings(max_examples=200, deadline=None)
    @given(register_families(), register_families(), register_families())
    def test_associates(self, u, v, w):
        """Composition is associative, also on clashes."""
        self.assertEqual(compose(compose(u, v), w), compose(u, compose(v, w)))

    @settings(max_examples=200, deadline=None)
    @given(st.sampled_from(REGISTER_FOCI + ("g",)), SERVICES, SERVICES)
    def test_clash_leaves_empty_service(self, focus, left, right):
        """Two services at one focus compose to the empty service there."""
        with self.assertLogs(level="WARNING"):
            family = compose(singleton(focus, left), singleton(focus, right))
        self.assertEqual(singleton(focus, EMPTY_SERVICE), family)


class EncapsulationTest(unittest.TestCase):
    """Encapsulation and foci."""

    @settings(max_examples=200, deadline=None)
    @given(FOCUS_SETS)
    def test_empty_family(self, h):
        """Nothing to remove from the empty family."""
        self.assertEqual(EMPTY_FAMILY, encapsulate(h, EMPTY_FAMILY))

    @settings(max_examples=200, deadline=None)
    @given(st.sampled_from(REGISTER_FOCI), FOCUS_SETS, SERVICES)
    def test_singleton(self, focus, h, service):
        """A singleton survives exactly when its focus is not encapsulated."""
        single = singleton(focus, service)
        encapsulated = encapsulate(h | {focus}, single)
        self.assertEqual(EMPTY_FAMILY, encapsulated)
        self.assertEqual(single, encapsulate(h - {focus}, single))

    @settings(max_examples=200, deadline=None)
    @given(FOCUS_SETS, register_families(), register_families())
    def test_distributes(self, h, u, v):
        """Encapsulation distributes over composition."""
        self.assertEqual(
            encapsulate(h, compose(u, v)), compose(encapsulate(h, u), encapsulate(h, v))
        )

    @settings(max_examples=200, deadline=None)
    @given(FOCUS_SETS, FOCUS_SETS, register_families())
    def test_combines(self, h, k, u):
        """Encapsulating twice is encapsulating the union."""
        self.assertEqual(encapsulate(h | k, u), encapsulate(h, encapsulate(k, u)))
        self.assertEqual(foci(u) - h, foci(encapsulate(h, u)))

    def test_foci(self):
        """Foci of the empty family and of a composition."""
        self.assertEqual(set(), foci(EMPTY_FAMILY))
        family = compose(singleton("b0", BooleanRegister()), singleton("g", EMPTY_SERVICE))
        self.assertEqual({"b0", "g"}, foci(family))

    @settings(max_examples=200, deadline=None)
    @given(register_families(), register_families())
    def test_disjoint_foci(self, u, v):
        """Foci are disjoint exactly when encapsulating one leaves the other."""
        disjoint = not foci(u) & foci(v)
        self.assertEqual(disjoint, encapsulate(foci(u), v) == v)

    @settings(max_examples=200, deadline=None)
    @given(st.sampled_from(REGISTER_FOCI + ("g",)), register_families())
    def test_focus_not_in_family(self, focus, u):
        """A focus is absent exactly when encapsulating it changes nothing."""
        self.assertEqual(focus not in foci(u), encapsulate({focus}, u) == u)


if __name__ == "__main__":
    unittest.main()
