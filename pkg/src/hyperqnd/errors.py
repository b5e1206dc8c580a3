"""Exception types shared across the package."""


class RegisterError(ValueError):
    """Bad qubit register: duplicate, missing or mismatched labels, bad index."""


class NormalizationError(ValueError):
    """An operation that needs a normalized state received one that is not."""


class DomainError(ValueError):
    """Numeric input outside the domain where a formula or protocol is defined."""
