"""Exception types shared across the package."""


class InvalidOrderError(ValueError):
    """A polynomial or quadrature order outside the supported range."""


class DomainError(ValueError):
    """An evaluation point outside the master interval/cube."""


class DegenerateMapError(ValueError):
    """Element map with non-positive Jacobian determinant."""

    def __init__(self, detj: float, point):
        self.detj = detj
        self.point = tuple(point)
        super().__init__(
            f"element map is degenerate: det J = {detj:g} at xi = {self.point}"
        )


class SimplificationNotApplicableError(ValueError):
    """Simplified Gram backend requested for a map class it does not support."""


class NonSPDError(ValueError):
    """A matrix expected to be symmetric positive definite failed Cholesky."""
