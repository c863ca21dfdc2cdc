"""Exception hierarchy shared by all pptfarm modules."""


class PptFarmError(Exception):
    """Base class for every error raised by pptfarm."""


class InvalidIndexError(PptFarmError, IndexError):
    """A multi-index component or flat index is out of range."""


class StructureError(PptFarmError, ValueError):
    """Shapes, factor spaces or block payloads do not fit together."""


class DomainError(PptFarmError, ValueError):
    """A parameter lies outside the domain of a formula or construction."""


class CapacityError(PptFarmError):
    """A dense construction would exceed the supported matrix order."""


class NumericError(PptFarmError, ArithmeticError):
    """Non-finite input or a failed eigensolve."""


class UnsupportedDecompositionError(PptFarmError, ValueError):
    """The analytic margin decomposition needs a payload proportional to identity."""
