"""Exception types shared across the package.

Everything derives from AdvTextError so callers can catch the whole family;
the server maps these onto HTTP status codes in one place.
"""


class AdvTextError(Exception):
    """Base class for all package errors."""


class LockedPosition(AdvTextError):
    """A swap targeted a position that is locked against edits."""


class NotAWord(AdvTextError):
    """A word-level operation targeted a non-word token or bad position."""


class MalformedHeader(AdvTextError):
    """Embedding file header or body does not match the declared layout."""


class DimensionMismatch(AdvTextError):
    """An embedding row has the wrong number of components."""


class DuplicateWord(AdvTextError):
    """The same word appears twice in an embedding file."""


class OutOfVocabulary(AdvTextError):
    """A lookup was attempted for a word with no embedding."""


class MalformedArpa(AdvTextError):
    """An ARPA file is structurally broken (sections, markers, rows)."""


class CountMismatch(AdvTextError):
    """An ARPA section holds a different number of entries than declared."""


class EmptyList(AdvTextError, ValueError):
    """Normalization was asked for an empty candidate list."""


class QueryBudgetExhausted(AdvTextError):
    """The classifier query budget has been spent."""


class RemoteUnavailable(AdvTextError):
    """A remote endpoint could not be reached or answered with an error."""


class InvalidRemoteScore(AdvTextError):
    """A remote endpoint answered with a non-numeric or out-of-range score."""


class NoEligiblePosition(AdvTextError):
    """No word position is eligible for mutation (document unattackable)."""


class ShapeMismatch(AdvTextError):
    """Two documents disagree on token count or lock set."""


class NoEmbeddableContent(AdvTextError):
    """A document has no in-vocabulary, non-stop word to build a bag from."""


class UnknownSnapshot(AdvTextError):
    """A revert referenced a snapshot seq that does not exist."""


class InvalidConfig(AdvTextError, ValueError):
    """Attack or session configuration failed validation."""


class UnknownSession(AdvTextError):
    """A session id does not exist."""


class UnknownCorpusRecord(AdvTextError):
    """A corpus id does not exist."""


class AttackAlreadyRunning(AdvTextError):
    """A command arrived while the session is attacking."""


class EmptyCorpus(AdvTextError, ValueError):
    """The bench was started with an empty corpus."""
