"""Exception types shared across the package.

Each error name matches the condition it reports; errors carry enough
context (witness pair, position, ...) to be actionable from the CLI.
"""

from __future__ import annotations


class FblError(Exception):
    """Base class for all package errors."""


class NotAPartialOrder(FblError):
    """The input relation is not reflexive, antisymmetric and transitive."""

    def __init__(self, reason: str, pair: tuple[int, int]):
        super().__init__(f"not a partial order: {reason} at pair {pair}")
        self.reason = reason
        self.pair = pair


class NotALattice(FblError):
    """Some pair of elements lacks a greatest lower / least upper bound."""

    def __init__(self, reason: str, pair: tuple[int, int]):
        super().__init__(f"not a lattice: {reason} for pair {pair}")
        self.reason = reason
        self.pair = pair


class NotAChain(FblError):
    """Operation requires a linear order."""


class NotDistributive(FblError):
    """Operation requires a distributive lattice."""


class IndexOutOfRange(FblError, IndexError):
    """A generator index does not name an element of the ambient lattice."""


class DimensionMismatch(FblError, ValueError):
    """A vector has the wrong number of coordinates."""


class BudgetExceeded(FblError):
    """Enumeration would visit more candidates than the configured cap."""

    def __init__(self, needed: int, budget: int):
        super().__init__(f"enumeration needs {needed} candidates, budget is {budget}")
        self.needed = needed
        self.budget = budget


class NonConvergence(FblError):
    """Iteration cap hit before the solver reached optimality."""


class InfeasibleFamily(FblError):
    """A weighted family violates the sum-of-absolute-values constraint."""


class InfeasibleInput(FblError):
    """An input family is not feasible on its declared domain."""


class EmptySubset(FblError):
    """A nonempty index subset was required."""


class InvalidTriple(FblError):
    """Triple indices are not strictly increasing within the chain."""


class InvalidDenseSet(FblError):
    """The candidate dense set misses a required interpolant or leap endpoint."""


class ParseError(FblError):
    """Input text failed to parse; carries 1-based line and column."""

    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column
