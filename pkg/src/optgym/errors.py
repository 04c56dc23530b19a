"""Error taxonomy shared by the client, the service runtime, and backends.

Every error carries a stable machine-readable ``code`` so that errors can
cross the wire protocol and be re-raised on the client side as the same
type.
"""

from __future__ import annotations


class OptGymError(Exception):
    """Base class for all errors raised by this package."""

    code = "internal"

    def __init__(self, message: str = ""):
        super().__init__(message or self.code)
        self.message = message or self.code


class UnknownEnvironmentError(OptGymError):
    code = "unknown-environment"


class UnknownSpaceError(OptGymError):
    code = "unknown-space"


class UnknownBenchmarkError(OptGymError):
    code = "unknown-benchmark"


class UnknownDatasetError(OptGymError):
    code = "unknown-dataset"


class UnknownPassError(OptGymError):
    code = "unknown-pass"


class MalformedProgramError(OptGymError):
    code = "malformed-program"


class BackendUnavailableError(OptGymError):
    code = "backend-unavailable"


class BackendCrashError(OptGymError):
    code = "backend-crash"


class ServiceTimeoutError(OptGymError):
    code = "timeout"


class StartTimeoutError(OptGymError):
    code = "start-timeout"


class SpawnFailureError(OptGymError):
    code = "spawn-failure"


class SessionNotFoundError(OptGymError):
    code = "session-not-found"


class SessionCapExceededError(OptGymError):
    code = "session-cap-exceeded"


class SessionExpiredError(OptGymError):
    code = "session-expired"


class OutOfRangeActionError(OptGymError):
    code = "out-of-range-action"


class DigestMismatchError(OptGymError):
    code = "digest-mismatch"

    def __init__(self, message: str = "", divergence_step: int | None = None):
        super().__init__(message)
        self.divergence_step = divergence_step


class InvalidWrapperConfigError(OptGymError):
    code = "invalid-wrapper-config"


class BudgetInvalidError(OptGymError):
    code = "budget-invalid"


class CompileError(OptGymError):
    code = "compile-error"


class CompileTimeoutError(OptGymError):
    code = "compile-timeout"


class CompilerNotFoundError(OptGymError):
    code = "compiler-not-found"


class HelpParseEmptyError(OptGymError):
    code = "help-parse-empty"


class ChecksumMismatchError(OptGymError):
    code = "checksum-mismatch"


class NetworkFailureError(OptGymError):
    code = "network-failure"


class EmptyDirectoryError(OptGymError):
    code = "empty-directory"


class UnreadableFileError(OptGymError):
    code = "unreadable-file"


_BY_CODE = {
    cls.code: cls
    for cls in list(globals().values())
    if isinstance(cls, type) and issubclass(cls, OptGymError)
}


def error_for_code(code: str, message: str = "") -> OptGymError:
    """Reconstruct the typed error for a wire-level error code."""
    cls = _BY_CODE.get(code, OptGymError)
    err = cls(message)
    err.code = code
    return err
