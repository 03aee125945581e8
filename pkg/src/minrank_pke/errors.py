"""Exception hierarchy shared by every module."""


class MinRankError(Exception):
    """Base class for all errors raised by this package."""


class DimensionError(MinRankError, ValueError):
    """Operands have incompatible shapes, or a size guard was exceeded."""


class ParamError(MinRankError, ValueError):
    """Parameter set violates a hard precondition (e.g. ``t`` does not divide ``n``)."""


class FormatError(MinRankError, ValueError):
    """A serialized object is malformed: bad magic, version, length or dimensions."""


class MismatchError(MinRankError, ValueError):
    """Key and ciphertext (or instance) parameters do not agree."""


class BudgetExceededError(MinRankError, RuntimeError):
    """An algorithm hit its iteration / query budget before finishing."""


class InapplicableError(MinRankError, ValueError):
    """An attack's applicability condition fails for the given parameters."""


class UnderdeterminedError(MinRankError, RuntimeError):
    """A linearized system has too large a solution space to enumerate."""
