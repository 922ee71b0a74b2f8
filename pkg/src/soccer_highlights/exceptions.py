"""Exception hierarchy shared by all pipeline stages."""


class HighlightsError(Exception):
    """Base class for every error raised by this package."""


class MediaError(HighlightsError, ValueError):
    """Raw media could not be interpreted."""


class EmptyInputError(MediaError):
    pass


class TruncatedStreamError(MediaError):
    pass


class AudioFormatError(MediaError):
    pass


class DocumentError(HighlightsError, ValueError):
    """A persisted document or sidecar file is malformed."""


class IncompleteDescriptorsError(HighlightsError):
    """A shot is missing a descriptor that a filter needs."""


class ConfigError(HighlightsError, ValueError):
    pass


class StageError(HighlightsError):
    """A pipeline stage failed; carries the stage name."""

    def __init__(self, stage, cause):
        self.stage = stage
        self.cause = cause
        super().__init__(f"stage '{stage}' failed: {cause}")
