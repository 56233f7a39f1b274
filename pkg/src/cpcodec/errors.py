"""Exception hierarchy shared across the package.

Every error carries enough position information for callers to report
where a stream or model went wrong; nothing is silently truncated.
"""


class CodecError(Exception):
    """Base class for all cpcodec errors."""


class AlphabetError(CodecError):
    """A code index or value falls outside the model's alphabet."""


class CapacityError(CodecError):
    """More distinct codes than the probability precision can hold."""


class EmptyInputError(CodecError):
    """An operation that needs at least one observation received none."""


class ModelError(CodecError):
    """A probability model failed validation where a valid one is required."""


class ContractError(CodecError):
    """Caller broke an API contract (payload-length mismatch, reuse after flush)."""


class EndOfStreamError(CodecError):
    """Decoder ran out of compressed words before producing the pair."""


class ParseError(CodecError):
    """Malformed serialized bytes. ``offset`` is the failing byte position."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (offset {offset})")
        self.offset = offset


class CorruptionError(CodecError):
    """Stream content is inconsistent (bad CRC, illegal coder state)."""


class StalenessError(CodecError):
    """A checkpoint does not belong to the stream it was applied to."""
