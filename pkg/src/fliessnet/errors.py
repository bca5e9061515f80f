"""Exception types shared across the package."""


class FliessnetError(Exception):
    """Base class for all library errors."""


class ParseError(FliessnetError, ValueError):
    """Malformed textual input: word, coefficient, or JSON document."""


class AlphabetError(FliessnetError, ValueError):
    """Letter index outside the ambient alphabet, or mismatched alphabets."""


class NodeIndexError(FliessnetError, IndexError):
    """Node index outside 1..m."""


class SubgraphBudgetError(FliessnetError):
    """Forward-path enumeration would exceed the configured node budget."""


class ConditionError(FliessnetError):
    """A relative-degree certificate cannot be evaluated on this network."""


class DomainError(FliessnetError, ValueError):
    """Numeric argument outside the mathematical domain of the function."""


class ModelError(FliessnetError):
    """Network nodes do not fit the requested simulation backend."""


class NoConvergence(FliessnetError):
    """Iteration failed to converge within its budget."""
