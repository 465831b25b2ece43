"""Shared exception types."""


class CapacityError(Exception):
    """An operation exceeded a hard size bound (qubits, support, enumeration)."""


class DecodeFailure(Exception):
    """Observed word is farther than t errors from every codeword."""

    def __init__(self, message, syndrome=None, raw_parity=None):
        super().__init__(message)
        self.syndrome = syndrome
        self.raw_parity = raw_parity


class UnsupportedCodeError(Exception):
    """The code lacks the structure this operation requires."""


class LeakageError(Exception):
    """State weight outside the code space exceeds the tolerance."""

    def __init__(self, message, leakage=None):
        super().__init__(message)
        self.leakage = leakage


class GadgetAbort(Exception):
    """A gadget exhausted its retry budget and gave up."""


class SyndromeFailure(GadgetAbort):
    """Repeated syndrome measurement never produced a consistent run."""

    def __init__(self, message, record=None):
        super().__init__(message)
        self.record = record
