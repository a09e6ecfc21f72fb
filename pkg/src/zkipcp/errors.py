"""Exception types shared across the package.

Protocol-level rejections (bad round check, failed low-degree test, ...) are
reported as reject verdicts on transcripts, not exceptions; the exceptions
here signal contract violations by the caller or resource limits.
"""


class ZkipcpError(Exception):
    pass


class NotPrime(ZkipcpError):
    pass


class NotIrreducible(ZkipcpError):
    pass


class DivideByZero(ZkipcpError, ZeroDivisionError):
    pass


class SubsetTooLarge(ZkipcpError):
    pass


class FieldMismatch(ZkipcpError):
    pass


class ArityMismatch(ZkipcpError):
    pass


class IncompleteTable(ZkipcpError):
    pass


class BudgetExceeded(ZkipcpError):
    """Dense representation would exceed the configured coefficient budget."""


class InconsistentConstraints(ZkipcpError):
    pass


class FieldTooSmall(ZkipcpError):
    pass


class NoMajority(ZkipcpError):
    """Self-correction found no majority value; proximity promise violated."""


class BudgetExhausted(ZkipcpError):
    """A budgeted oracle received its b-th query (only b-1 are permitted)."""


class NotMultilinear(ZkipcpError):
    pass


class NotSubgroup(ZkipcpError):
    pass


class DegreeTooHigh(ZkipcpError):
    pass


class DegreeTooLow(ZkipcpError):
    pass


class DegreeMismatch(ZkipcpError):
    pass


class MissingLeaf(ZkipcpError):
    pass


class WiringMismatch(ZkipcpError):
    pass
