"""Error classes for package."""


class IsqSyntaxError(Exception):
    """Instruction sequence text does not follow the grammar."""

    def __init__(self, msg, line=1, column=1):
        super().__init__(f"line {line}, column {column}: {msg}")
        self.line = line
        self.column = column


class DialectError(Exception):
    """Instruction sequence not allowed in the requested dialect."""


class InterfaceError(Exception):
    """Instruction sequence uses foci or methods outside an interface."""


class NormalFormError(Exception):
    """Instruction sequence is not in test-jump normal form."""


class StateSpaceError(Exception):
    """State space too large or not enumerable for the request."""


class InvalidHaltError(Exception):
    """Register machine program left its body anywhere but the exit."""


class FamilySpecError(Exception):
    """General service family file error."""


class UnitSpecError(Exception):
    """General functional unit file error."""


class CorpusError(Exception):
    """General corpus error."""
