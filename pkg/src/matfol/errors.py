"""Exception hierarchy shared by all matfol modules."""


class MatfolError(Exception):
    """Base class for every error raised by the library."""


class UnknownElement(MatfolError, KeyError):
    def __init__(self, label, where="ground set"):
        self.label = label
        super().__init__(f"unknown element {label!r} (not in {where})")

    def __str__(self):
        return self.args[0]


class SizeBoundTooLarge(MatfolError):
    """An exhaustive enumeration would exceed its configured budget."""


class BudgetExceeded(MatfolError):
    """A brute-force evaluation would exceed its configured budget."""


class NotBinary(MatfolError):
    pass


class SumPreconditionViolated(MatfolError):
    def __init__(self, condition, elements=(), path=()):
        self.condition = condition
        self.elements = tuple(elements)
        self.path = tuple(path)
        msg = condition
        if self.elements:
            msg += f" (elements: {', '.join(map(str, self.elements))})"
        if self.path:
            msg += f" [at node {' / '.join(self.path)}]"
        super().__init__(msg)


class InvalidTree(MatfolError):
    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations) or "invalid decomposition tree")


class ElementShared(MatfolError):
    pass


class TreeNotNormalized(MatfolError):
    pass


class MdwcFailure(MatfolError):
    pass


class InvalidInstance(MatfolError):
    pass


class NotGraphic(MatfolError):
    pass


class NotCographic(MatfolError):
    pass


class TTNotSimple(MatfolError):
    pass


class KernelTooLarge(MatfolError):
    pass


class FormatError(MatfolError):
    """Malformed JSON input; ``field`` names the offending key path."""

    def __init__(self, message, field=None):
        self.field = field
        if field:
            message = f"{field}: {message}"
        super().__init__(message)


class FormulaSyntaxError(MatfolError, SyntaxError):
    """Parse failure at a character offset, with the tokens that would have fit."""

    def __init__(self, message, position=None, expected=()):
        self.position = position
        self.expected = tuple(expected)
        text = message
        if position is not None:
            text = f"{message} at offset {position}"
        if self.expected:
            text += f" (expected {' or '.join(self.expected)})"
        super().__init__(text)

    def __str__(self):
        return self.args[0]


class ScopeError(MatfolError):
    pass


class LocalityViolation(MatfolError):
    pass
