"""Exception and warning types shared across the package."""


class OutOfRange(ValueError):
    """A scalar argument lies outside the domain of the operation."""


class NotHermitian(ValueError):
    pass


class InvalidDensityMatrix(ValueError):
    """Matrix is not Hermitian, unit-trace and positive semidefinite."""


class ChannelOutputInvalid(InvalidDensityMatrix):
    pass


class NonRealCorrelation(ValueError):
    pass


class FormulaInapplicable(ValueError):
    """The correlation-matrix fidelity formula does not hold for this state."""


class DegenerateTopWarning(UserWarning):
    """The largest eigenvalue of a Choi state is degenerate."""


class NotConvergedWarning(UserWarning):
    """No restart of the rank-one search reached its step tolerance."""


def check_range(name, value, lo, hi, lo_open=False, hi_open=False):
    """Raise :class:`OutOfRange` unless ``value`` lies in the given interval."""
    value = float(value)
    below = value <= lo if lo_open else value < lo
    above = value >= hi if hi_open else value > hi
    if below or above or value != value:
        left = "(" if lo_open else "["
        right = ")" if hi_open else "]"
        raise OutOfRange(f"{name}={value!r} outside {left}{lo}, {hi}{right}")
    return value
