"""Exception types shared across the pipeline stages."""


class ScholarnetError(Exception):
    """Base class for all errors raised by this package."""


class SchemaError(ScholarnetError):
    """An interchange file or record violates its schema."""


class DimensionError(ScholarnetError, ValueError):
    """Vectors or matrices have incompatible shapes."""


class DocTopicLookupError(ScholarnetError, KeyError):
    """A publication id is missing from the document-topic table."""


class DegenerateProfileError(ScholarnetError):
    """All of a researcher's topic rows are zero; no profile can be formed."""


class TransportError(ScholarnetError):
    """A remote metadata request failed after exhausting retries."""

    def __init__(self, message: str, status: int | None = None):
        super().__init__(message)
        self.status = status


class ConfigError(ScholarnetError):
    """Pipeline configuration is invalid or inconsistent."""


class PipelineStageError(ScholarnetError):
    """A pipeline stage failed; carries the stage name and the cause."""

    def __init__(self, stage: str, cause: Exception):
        super().__init__(f"stage '{stage}' failed: {cause}")
        self.stage = stage
        self.cause = cause
