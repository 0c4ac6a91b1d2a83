"""Exception types raised across the package."""


class CpMapsError(Exception):
    """Base class for all errors raised by :mod:`cpmaps`."""


class ShapeError(CpMapsError, ValueError):
    """Array shapes or tensor-factor dimensions do not fit together."""


class DomainError(CpMapsError, ValueError):
    """A parameter is outside the domain where the operation is defined."""


class SizeError(CpMapsError, ValueError):
    """A requested dimension exceeds the configured maximum."""


class NonHermitianError(CpMapsError, ValueError):
    """A matrix expected to be Hermitian is not, beyond tolerance."""

    def __init__(self, defect: float, message: str | None = None):
        self.defect = float(defect)
        super().__init__(message or f"matrix is not Hermitian (defect {self.defect:.3e})")


class NotCPError(CpMapsError, ValueError):
    """The map is not completely positive, so no Kraus form exists."""

    def __init__(self, min_eigenvalue: float):
        self.min_eigenvalue = float(min_eigenvalue)
        super().__init__(
            f"Choi matrix has negative eigenvalue {self.min_eigenvalue:.6e}; map is not CP"
        )
