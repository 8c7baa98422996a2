"""Exception and warning types raised by :mod:`oblique_qr`."""


class ContractViolation(ValueError):
    """Shapes or preconditions of an operation are not met."""


class NonFiniteInput(ContractViolation):
    """An input matrix contains NaN or Inf entries."""


class NotPositiveDefinite(ArithmeticError):
    """Cholesky factorization hit a non-positive pivot.

    ``pivot`` is the 1-based index of the failing leading minor.
    """

    def __init__(self, pivot, message=None):
        self.pivot = int(pivot)
        super().__init__(message or f"leading minor of order {self.pivot} is not positive definite")


class DegenerateReflector(ArithmeticError):
    """The computed Householder vector has (numerically) vanishing B-norm."""


class InitialBasisFailure(RuntimeError):
    """No B-orthonormal starting basis could be built from the leading block of B."""

    def __init__(self, pivot, message=None):
        self.pivot = int(pivot)
        super().__init__(
            message
            or (
                f"leading {self.pivot}x{self.pivot} block of B is not numerically positive definite; "
                "supply a precomputed basis instead (e.g. --init-basis file:<path>)"
            )
        )


class ZeroInput(ValueError):
    """A relative metric was requested for a zero matrix."""


class MatrixMarketError(ValueError):
    """Malformed Matrix Market file. ``line`` is 1-based (0 if unknown)."""

    def __init__(self, message, line=0, path=None):
        self.line = int(line)
        self.path = path
        where = f"{path}:" if path else ""
        where += f"line {self.line}: " if self.line else ""
        super().__init__(where + message)


class IndefinitenessWarning(RuntimeWarning):
    """A B-norm radicand came out clearly negative."""


class OrthogonalityWarning(RuntimeWarning):
    """The supplied starting basis U is noticeably non-orthonormal in the B-inner product."""
