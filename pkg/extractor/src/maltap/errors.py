class MaltapError(Exception):
    """Base class for extraction failures."""


class CheckpointUnavailable(MaltapError):
    """The checkpoint cannot be loaded in the current runtime."""


class TapUnsupported(MaltapError):
    """The requested tap point is unknown or invalid for the operation."""


class AudioDecodeError(MaltapError):
    """An audio file could not be decoded."""


class RequestFileError(MaltapError):
    """The fixture request file is malformed."""
