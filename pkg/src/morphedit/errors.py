"""Shared exception types. Every error carries a stable machine-readable code."""

from __future__ import annotations


class MorphEditError(Exception):
    """Base class for all domain errors."""

    code = "error"

    def __init__(self, message: str, details: object = None):
        super().__init__(message)
        self.message = message
        self.details = details


class UnknownTokenError(MorphEditError):
    code = "unknown-token"


class InvalidEditError(MorphEditError):
    code = "invalid-edit"


class NothingToUndoError(MorphEditError):
    code = "nothing-to-undo"


class NothingToRedoError(MorphEditError):
    code = "nothing-to-redo"


class ValidationFailure(MorphEditError):
    """An annotation failed validation; details holds the violation list."""

    code = "validation-failed"

    def __init__(self, violations: list[str]):
        super().__init__("annotation validation failed", details=list(violations))
        self.violations = list(violations)


class NotFoundError(MorphEditError):
    code = "not-found"


class DuplicateNameError(MorphEditError):
    code = "duplicate-name"


class ForbiddenError(MorphEditError):
    code = "forbidden"


class UnauthorizedError(MorphEditError):
    code = "unauthorized"


class InvalidTransitionError(MorphEditError):
    code = "invalid-transition"


class VersionConflictError(MorphEditError):
    code = "version-conflict"


class SchemaError(MorphEditError):
    """Import/config file violates the documented schema; details names the field."""

    code = "schema-error"


class ProviderError(MorphEditError):
    code = "provider-error"


class MismatchedRawTextError(MorphEditError):
    code = "mismatched-raw-text"
