"""Exception types shared across the package."""

from __future__ import annotations


class InputError(ValueError):
    """Malformed or inconsistent user input (CLI exit code 2)."""


class InvalidActionError(InputError):
    """The torus action admits a nonconstant invariant monomial."""

    def __init__(self, certificate):
        self.certificate = certificate
        super().__init__(
            f"action is not valid: z^gamma is invariant for gamma={list(certificate.gamma)}"
        )


class PreconditionError(ValueError):
    pass


class NumericalError(ArithmeticError):
    """Ill-conditioned linear algebra; carries a diagnostics dict."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}
