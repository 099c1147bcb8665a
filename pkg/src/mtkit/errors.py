"""Exception types shared across pipeline stages."""


class MtkitError(Exception):
    """Base class for all toolkit errors."""


class CorpusFormatError(MtkitError):
    """A corpus, embedding, or model file violates its format contract."""


class StageError(MtkitError):
    """A pipeline stage failed at runtime (external command, I/O, contract)."""


class ManifestError(MtkitError):
    """A pipeline manifest failed validation."""
