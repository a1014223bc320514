"""Services, service families and the service family operators.

A service processes one method at a time and answers with a reply and the
service it turns into. Every service here is an immutable value with a
canonical ``encode()`` string, which is what makes divergence detection
by state revisiting possible.

A service family maps foci to services. Composition collapses a focus
present on both sides to the empty service, and encapsulation removes
foci.
"""
import abc
import enum
import logging
from typing import Dict, Iterable, Tuple


class Reply(enum.Enum):
    """Reply produced by a service on processing a method."""

    T = "T"
    F = "F"
    B = "B"

    @classmethod
    def of(cls, value: bool):
        """Reply T for True, F for False."""
        return cls.T if value else cls.F

    def __str__(self):
        return self.value


class Service(abc.ABC):
    """An immutable service."""

    @abc.abstractmethod
    def process(self, method: str) -> Tuple[Reply, "Service"]:
        """Process ``method``, returning the reply and the next service."""

    @abc.abstractmethod
    def encode(self) -> str:
        """Canonical encoding of the service state."""

    @abc.abstractmethod
    def describe(self) -> str:
        """The behaviour in family file syntax, e.g. ``boolreg(T)``."""

    @property
    def is_empty(self):
        """True when no method can ever be processed."""
        return False

    def __eq__(self, other):
        if not isinstance(other, Service):
            return NotImplemented
        return self.encode() == other.encode()

    def __hash__(self):
        return hash(self.encode())

    def __repr__(self):
        return f"<{type(self).__name__} {self.describe()}>"


class EmptyService(Service):
    """The service that is unable to process any method."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def process(self, method):
        return Reply.B, self

    def encode(self):
        return "empty"

    def describe(self):
        return "empty()"

    @property
    def is_empty(self):
        return True


EMPTY_SERVICE = EmptyService()


class BooleanRegister(Service):
    """Boolean register with methods set_t, set_f and get.

    ``set_t`` and ``set_f`` store a value and reply with it, ``get`` replies
    the content. Any other method turns the register into the empty service.
    """

    METHODS = ("set_t", "set_f", "get")

    __slots__ = ("value",)

    def __init__(self, value=True):
        if isinstance(value, Reply):
            value = value is Reply.T
        self.value = bool(value)

    def process(self, method):
        if method == "set_t":
            return Reply.T, BooleanRegister(True)
        if method == "set_f":
            return Reply.F, BooleanRegister(False)
        if method == "get":
            return Reply.of(self.value), self
        return Reply.B, EMPTY_SERVICE

    def encode(self):
        return "br:T" if self.value else "br:F"

    def describe(self):
        return "boolreg(T)" if self.value else "boolreg(F)"


def boolean_register(initial=True) -> BooleanRegister:
    """Return a Boolean register holding ``initial``."""
    return BooleanRegister(initial)


class ServiceFamily:
    """A finite map from foci to services.

    Instances are immutable. Build them with ``singleton`` and ``compose``
    or directly from a mapping.
    """

    __slots__ = ("_entries", "_encoding")

    def __init__(self, entries: Dict[str, Service] = None):
        self._entries = dict(sorted((entries or {}).items()))
        self._encoding = None

    @classmethod
    def singleton(cls, focus, service):
        """The family ``focus.service``."""
        return cls({focus: service})

    def compose(self, other: "ServiceFamily") -> "ServiceFamily":
        """Compose with another family; shared foci become the empty service."""
        entries = dict(self._entries)
        for focus, service in other.items():
            if focus in entries:
                logging.warning(
                    f'Composing service families that share focus "{focus}"; '
                    f"it now holds the empty service"
                )
                entries[focus] = EMPTY_SERVICE
            else:
                entries[focus] = service
        return ServiceFamily(entries)

    def encapsulate(self, foci: Iterable[str]) -> "ServiceFamily":
        """Remove the services with focus in ``foci``."""
        removed = set(foci)
        return ServiceFamily(
            {f: s for f, s in self._entries.items() if f not in removed}
        )

    def foci(self):
        """Return the set of foci."""
        return set(self._entries)

    def replace(self, focus, service):
        """Return a copy with the service at ``focus`` replaced."""
        entries = dict(self._entries)
        entries[focus] = service
        return ServiceFamily(entries)

    def get(self, focus, default=None):
        """Return the service at ``focus`` or ``default``."""
        return self._entries.get(focus, default)

    def items(self):
        """Return (focus, service) pairs in focus order."""
        return self._entries.items()

    def encode(self):
        """Canonical encoding of all service states."""
        if self._encoding is None:
            self._encoding = ";".join(
                f"{focus}={service.encode()}" for focus, service in self.items()
            )
        return self._encoding

    def describe(self):
        """Return the family in family file syntax, one focus per line."""
        return "\n".join(
            f"{focus} = {service.describe()}" for focus, service in self.items()
        )

    def __getitem__(self, focus):
        return self._entries[focus]

    def __contains__(self, focus):
        return focus in self._entries

    def __iter__(self):
        return iter(self._entries)

    def __len__(self):
        return len(self._entries)

    def __eq__(self, other):
        if not isinstance(other, ServiceFamily):
            return NotImplemented
        return self.encode() == other.encode()

    def __hash__(self):
        return hash(self.encode())

    def __repr__(self):
        return f"ServiceFamily({{{self.encode()}}})"


EMPTY_FAMILY = ServiceFamily()


def singleton(focus: str, service: Service) -> ServiceFamily:
    """Return the singleton family ``focus.service``."""
    return ServiceFamily.singleton(focus, service)


def compose(*families: ServiceFamily) -> ServiceFamily:
    """Compose any number of families, left to right."""
    result = EMPTY_FAMILY
    for family in families:
        result = result.compose(family)
    return result


def encapsulate(foci: Iterable[str], family: ServiceFamily) -> ServiceFamily:
    """Return the family without the services at ``foci``."""
    return family.encapsulate(foci)


def foci(family: ServiceFamily):
    """Return the foci of ``family``."""
    return family.foci()
