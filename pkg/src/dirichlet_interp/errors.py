"""Exception types shared across the package."""


class ValidationError(ValueError):
    """Invalid point, arc, parameter set or sequence file."""


class InfeasibleConstructionError(RuntimeError):
    """A block or union construction cannot satisfy its constraints."""
