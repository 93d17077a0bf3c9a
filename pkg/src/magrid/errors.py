"""Exception types raised by the engine.

The hierarchy distinguishes caller/model bugs (ContractError) from bad
configuration (ConfigError) and malformed external data (parse errors),
so tests and callers can react to the right category.
"""

from __future__ import annotations


class EngineError(Exception):
    """Base class for all engine errors."""


class BoundsError(EngineError):
    """A coordinate fell outside the world."""


class VocabularyError(EngineError):
    """An entity vocabulary violates its structural rules."""


class ConfigError(EngineError):
    """An environment or experiment configuration is invalid."""


class ContractError(EngineError):
    """A caller or model broke an API contract (e.g. out-of-range action)."""


class EncodingError(EngineError):
    """An observation or frame could not be encoded (unknown code/glyph)."""


class RenderError(EngineError):
    """A frame could not be rendered against its header vocabulary."""


class MapParseError(EngineError):
    """A map layout failed to parse; carries the offending position."""

    def __init__(self, message: str, row: int, col: int):
        super().__init__(f"{message} at (row={row}, col={col})")
        self.row = row
        self.col = col


class ReplayFormatError(EngineError):
    """A replay file failed to parse; carries the 1-based line number."""

    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


class ReplayVersionError(EngineError):
    """A replay file declares an unsupported format version."""


class ModelIOError(EngineError):
    """A model weight file is malformed or has the wrong magic/version."""
