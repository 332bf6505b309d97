class SynthesisError(ValueError):
    pass


class OutOfRange(SynthesisError):
    pass


class BadSum(SynthesisError):
    pass


class DyadicTarget(SynthesisError):
    """Denominator is a power of two; use the loop-free dyadic chain instead."""


class DegenerateTarget(SynthesisError):
    pass


class NotDyadic(SynthesisError):
    pass


class NotNormalized(SynthesisError):
    pass


class EmptyInput(SynthesisError):
    pass


class TooManyLeaves(SynthesisError):
    pass


class TreeMismatch(SynthesisError):
    pass
