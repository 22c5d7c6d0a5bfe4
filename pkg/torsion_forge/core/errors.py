"""
Errors Module - Exception hierarchy shared by the library and the CLI.

Every error raised on purpose derives from `TorsionForgeError` and carries the
process exit code the CLI should use for it.

Key components:
- `InputError` and its subclasses: bad geometry, bad files, inconsistent data (exit 2).
- `VerificationError`: a cross-check residual above tolerance (exit 3).
- `SolverError`: Newton non-convergence or a singular Jacobian (exit 4).

Integration:
- Raised throughout `torsion_forge.core`; mapped to exit codes in `cli/main.py`.
"""
from typing import List, Optional, Sequence


class TorsionForgeError(Exception):
    """Base class for all library errors."""

    exit_code = 1


class InputError(TorsionForgeError, ValueError):
    """The input violates a precondition."""

    exit_code = 2


class DomainError(InputError):
    """A trigonometric argument is outside its domain."""


class InvalidShapeError(InputError):
    """A tetrahedron or pants geometry does not exist."""

    def __init__(self, message: str, diagnostics: Optional[Sequence[str]] = None):
        super().__init__(message)
        self.diagnostics: List[str] = list(diagnostics or [])


class DegenerateElementError(InputError):
    """Central or parabolic element, or a vanishing geometric factor."""


class NonUnimodularError(InputError):
    """A 2x2 matrix expected in SL(2,C) has determinant away from 1."""


class InconsistentComplexError(InputError):
    """Chain complex data fails its bookkeeping checks."""


class GluingError(InputError):
    """A gluing graph violates one of its invariants."""

    def __init__(self, invariant: str, message: str):
        super().__init__(f"{invariant}: {message}")
        self.invariant = invariant


class ParseError(InputError):
    """An input document could not be read or validated."""

    def __init__(self, message: str, location: Optional[str] = None):
        super().__init__(f"{location}: {message}" if location else message)
        self.location = location


class VerificationError(TorsionForgeError):
    """Two independent computations disagree beyond tolerance."""

    exit_code = 3

    def __init__(self, message: str, residual: float = float("nan"),
                 failing_seeds: Optional[Sequence[int]] = None):
        super().__init__(message)
        self.residual = residual
        self.failing_seeds: List[int] = list(failing_seeds or [])


class SolverError(TorsionForgeError):
    """The filling equations could not be solved."""

    exit_code = 4

    def __init__(self, message: str, iterations: int = 0, residual: float = float("nan")):
        super().__init__(message)
        self.iterations = iterations
        self.residual = residual
