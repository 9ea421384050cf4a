"""Exception types raised by polycorr."""


class ShapeError(ValueError):
    """Array dimensions do not match what an operation requires."""


class DomainError(ValueError):
    """Inputs are well formed but outside the valid domain (bad grid, bad model)."""


class DegreeCapError(DomainError):
    """Requested total polynomial degree exceeds the configured cap."""

    def __init__(self, required, cap):
        self.required = required
        self.cap = cap
        super().__init__(f"total degree {required} exceeds degree cap {cap}; "
                         f"raise degree_cap to at least {required}")


class ExpmConditionError(ArithmeticError):
    """The closed-form exponential recursion is not valid for this model.

    Raised when some c_j vanishes or two of them coincide; callers should fall
    back to the dense exponential.
    """
