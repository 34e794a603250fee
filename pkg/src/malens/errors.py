"""Exception hierarchy shared by every malens module.

Errors carry enough context (paths, ids, indices) to be actionable from a
batch log; the CLI maps them onto exit codes.
"""


class MalensError(Exception):
    """Base class for all toolkit errors."""


# --- interchange ---------------------------------------------------------

class InterchangeError(MalensError):
    """Base for tensor-file and manifest problems (CLI exit code 2)."""


class BadMagic(InterchangeError):
    pass


class ShapeMismatch(InterchangeError):
    pass


class VocabMismatch(InterchangeError):
    pass


class NonFinite(InterchangeError):
    pass


class ZeroFrameDuration(InterchangeError):
    pass


class MissingFile(InterchangeError):
    pass


class LanguageMismatch(InterchangeError):
    pass


class InvariantViolation(InterchangeError):
    def __init__(self, message, utterance_id=None):
        super().__init__(message)
        self.utterance_id = utterance_id


# --- neighbor ------------------------------------------------------------

class ZeroQuery(MalensError):
    """Query vector equals the embedding mean; cosine is undefined."""


class DimMismatch(MalensError):
    pass


class AllRowsDegenerate(MalensError):
    """Every mean-centred embedding row is the zero vector."""


# --- temporal alignment --------------------------------------------------

class InvertedSpan(MalensError):
    pass


class UtteranceMismatch(MalensError):
    pass


class EmptyPool(MalensError):
    pass


class IndexOutOfRange(MalensError):
    pass


# --- providers -----------------------------------------------------------

class ProviderError(MalensError):
    """Base for external-capability failures (CLI exit code 3)."""


class ProviderUnavailable(ProviderError):
    pass


class EmptyInput(ProviderError):
    pass


class UnsupportedLanguagePair(ProviderError):
    pass


class UnsupportedLanguage(ProviderError):
    pass


class CacheCorrupt(ProviderError):
    """Checksum failure in the persistent cache; treated as a miss."""


# --- verdict -------------------------------------------------------------

class NoIdentifiedTokens(MalensError):
    pass


class EmptyWordPhones(MalensError):
    pass


class InsufficientPairs(MalensError):
    pass


# --- probes --------------------------------------------------------------

class NoExamples(MalensError):
    pass


class TooFewLabels(MalensError):
    pass


class DegenerateLabels(MalensError):
    """Training set contains a single class."""


class NonFiniteLoss(MalensError):
    """Probe training diverged; lower the learning rate."""


class LengthMismatch(MalensError):
    pass


class DegenerateRanks(MalensError):
    """All values on one side are equal; Spearman undefined."""


# --- asr-eval ------------------------------------------------------------

class EmptyReference(MalensError):
    pass


# --- report --------------------------------------------------------------

class NoAssignments(MalensError):
    pass


class NoDecipherableWords(MalensError):
    pass


# --- cli -----------------------------------------------------------------

class ConfigError(MalensError):
    """Invalid or unknown run-configuration keys (CLI exit code 2)."""
