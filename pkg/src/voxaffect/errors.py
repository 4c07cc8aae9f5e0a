"""Exception hierarchy shared across the package."""


class VoxAffectError(Exception):
    """Base class for all package errors."""


class AudioInputError(VoxAffectError):
    """The audio file is missing or cannot be read."""


class UnsupportedFormatError(AudioInputError):
    """The file is RIFF/WAVE but uses a codec other than PCM or IEEE float."""


class CorruptFileError(AudioInputError):
    """The container is malformed or its data chunk is truncated."""


class AudioOutputError(VoxAffectError):
    """The destination could not be written."""


class NoSpeechError(VoxAffectError):
    """No word segments were found in the signal.

    ``frame_stats`` keeps the raw per-frame measurements so callers can still
    inspect them: a list of ``(start_s, pitch_hz_or_None, spl_db)`` tuples.
    """

    def __init__(self, message="no speech segments detected", frame_stats=None):
        super().__init__(message)
        self.frame_stats = list(frame_stats or [])


class CalibrationError(VoxAffectError):
    """A baseline profile cannot be built from the given vectors."""


class DegenerateBaselineError(VoxAffectError):
    """A baseline component needed for a relative deviation is zero."""


class SpecificationError(VoxAffectError):
    """A synthesis spec or configuration violates its invariants."""
