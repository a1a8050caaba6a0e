"""Error type shared by the store, analysis framework, CLI and service."""

from __future__ import annotations

MODULE_NOT_FOUND = "MODULE_NOT_FOUND"
UNKNOWN_FUNCTION = "UNKNOWN_FUNCTION"
UNKNOWN_ANALYSIS = "UNKNOWN_ANALYSIS"
PARSE_FAILED = "PARSE_FAILED"
IMPORT_CYCLE = "IMPORT_CYCLE"
FULL_SOURCE_MISSING = "FULL_SOURCE_MISSING"
ANALYSIS_PANIC = "ANALYSIS_PANIC"
BAD_REQUEST = "BAD_REQUEST"

CODES = frozenset(
    (
        MODULE_NOT_FOUND,
        UNKNOWN_FUNCTION,
        UNKNOWN_ANALYSIS,
        PARSE_FAILED,
        IMPORT_CYCLE,
        FULL_SOURCE_MISSING,
        ANALYSIS_PANIC,
        BAD_REQUEST,
    )
)


class ApiError(Exception):
    """Failure with a stable code from the closed set above; `detail` is an
    optional JSON-ready payload."""

    def __init__(self, code: str, message: str, detail=None):
        assert code in CODES, code
        super().__init__(message)
        self.code = code
        self.message = message
        self.detail = detail

    def doc(self) -> dict:
        out = {"code": self.code, "message": self.message}
        if self.detail is not None:
            out["detail"] = self.detail
        return out
