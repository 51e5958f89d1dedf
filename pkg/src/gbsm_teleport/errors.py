"""Exception types raised across the package."""


class GbsmError(Exception):
    """Base class for all package errors."""


class DomainError(GbsmError, ValueError):
    """An argument lies outside the domain an operation is defined on."""


class DegenerateResourceError(DomainError):
    """The resource is a product state (chi = 0); no matched basis exists."""


class ContractError(GbsmError, ValueError):
    """A numeric precondition (normalization, orthonormality) is violated."""


class StructureError(GbsmError):
    """A family does not have the carrier structure the protocol produces."""


class UndefinedBranchError(GbsmError):
    """A quantity was requested on a branch of zero probability."""


class LookupFixtureError(GbsmError, KeyError):
    """Unknown fixture or table-row label."""
