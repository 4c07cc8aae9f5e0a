"""Vocal-parameter extraction and baseline-deviation emotion classification."""

__version__ = "0.1.0"

from ._kernels import BACKEND as KERNEL_BACKEND
from .audio_io import AudioBuffer, read_wav, write_wav
from .emotion import (
    BaselineProfile,
    DeviationVector,
    EmotionReport,
    Label,
    NormalBand,
    ThresholdConfig,
    calibrate,
    classify,
    compute_deviation,
    rule_trace,
)
from .errors import (
    AudioInputError,
    CalibrationError,
    CorruptFileError,
    DegenerateBaselineError,
    NoSpeechError,
    SpecificationError,
    UnsupportedFormatError,
    VoxAffectError,
)
from .features import (
    AnalysisConfig,
    FeatureVector,
    UtteranceAnalysis,
    analyze_utterance,
    WordSegment,
    compute_frame_spl,
    estimate_pitch_frame,
    extract_envelope,
    extract_features,
    frame_signal,
    mean_word_gap,
    measure_attack_decay,
    segment_words,
)
from .synth import UtteranceSpec, WordSpec, expected_features, synth_utterance
