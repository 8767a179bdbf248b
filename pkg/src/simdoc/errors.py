"""Named error types shared across the toolkit.

Every domain failure raises one of these; the CLI maps them to exit
code 1 (exit code 2 is reserved for usage/config problems).
"""


class SimdocError(Exception):
    """Base class for all toolkit errors."""

    @property
    def name(self) -> str:
        return type(self).__name__


class EmptyText(SimdocError):
    """Input text was empty or whitespace-only."""


class EmptyToken(SimdocError):
    """A word-level operation received an empty token."""


class NoText(SimdocError):
    """A document has no countable (non-padding) text."""


class NoReference(SimdocError):
    """A reference-based metric received an empty reference list."""


class NoSamples(SimdocError):
    """An aggregate operation received zero samples."""


class MissingComplex(SimdocError):
    """A leveled article lacks the level-0 (complex) version."""


class InvalidRating(SimdocError):
    """An expert coherence rating fell outside the 1..3 scale."""


class ModeMismatch(SimdocError):
    """Loss components do not match the configured loss mode."""


class InvalidLoss(SimdocError):
    """A loss component was negative."""


class DegenerateLabels(SimdocError):
    """Classifier training data contains a single class only."""


class BackendUnavailable(SimdocError):
    """An external backend could not be spawned or stopped responding."""


class ProtocolViolation(SimdocError):
    """An external backend broke the wire protocol."""


class ConfigError(SimdocError):
    """An experiment configuration is inconsistent or incomplete."""
