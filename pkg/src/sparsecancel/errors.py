"""Exception hierarchy shared by all modules."""


class SparseCancelError(Exception):
    """Base class for library errors."""


class InvalidArgumentError(SparseCancelError, ValueError):
    pass


class DegenerateInputError(SparseCancelError, ValueError):
    """A signal or dictionary column has zero energy."""


class UnderdeterminedError(SparseCancelError, ValueError):
    """Fewer observations than unknowns."""


class SingularDictionaryError(SparseCancelError, ArithmeticError):
    """Gram matrix could not be factored, even with diagonal loading."""


class DegenerateColumnError(SparseCancelError, ArithmeticError):
    """A new column is (numerically) in the span of the selected ones."""


class ConfigError(SparseCancelError, ValueError):
    pass
