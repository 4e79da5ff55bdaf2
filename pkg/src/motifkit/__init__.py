"""Corpus analysis of motif-boundary annotations for folk-song recordings.

The toolkit covers five stages that plug into each other through a JSON
Lines annotation format: interchange and validation of boundary
annotations, tolerance-based boundary evaluation, windowed structural
features (motif count and duration entropy), one-way MANOVA over those
features, and synthetic corpus generation with known structure. A
silence-based baseline segmenter turns WAV files into predicted
annotations so the whole pipeline runs on raw audio.
"""

from .annotations import (
    DEFAULT_MIN_DURATION_S,
    KNOWN_CATEGORIES,
    SOURCES,
    BoundaryRecord,
    Corpus,
    Motif,
    motifs_from_boundaries,
    parse_annotations,
    write_annotations,
)
from .calibration import null_profiles, null_rejection_rate, separation_p_values
from .errors import (
    AudioFormatError,
    MotifkitError,
    NumericalError,
    ParseError,
    ValidationError,
)
from .evaluation import (
    DEFAULT_FOLDS,
    DEFAULT_TOLERANCE_S,
    EvalMetrics,
    FoldAssignment,
    GroupSummary,
    evaluate_corpus,
    evaluate_song,
    match_boundaries,
    report_csv,
    stratified_folds,
)
from .features import (
    DEFAULT_BIN_WIDTH,
    DEFAULT_WINDOW_S,
    FeatureTable,
    WindowFeature,
    duration_entropy,
    extract_features,
    features_from_csv,
    features_to_csv,
    window_motifs,
)
from .manova import (
    FEATURE_VARS,
    GroupStats,
    ManovaReport,
    Observation,
    PosthocResult,
    holm_adjust,
    hotelling_t2,
    manova,
    manova_observations,
    omnibus_csv,
    posthoc_csv,
    rao_f,
    report_json,
    report_text,
    scatter_matrices,
    wilks_lambda,
)
from .segmenter import (
    AudioBuffer,
    SegmenterConfig,
    frame_rms,
    read_wav,
    segment_energy,
    segment_file,
)
from .special import betainc, f_survival
from .synthesis import (
    CategoryProfile,
    DiscreteDurations,
    JitterSpec,
    Log2NormalDurations,
    default_profiles,
    generate_corpus,
    generate_song,
    jitter_boundaries,
    jitter_corpus,
    read_profiles,
    write_profiles,
)

__version__ = "0.1.0"

__all__ = [
    "AudioBuffer",
    "AudioFormatError",
    "BoundaryRecord",
    "CategoryProfile",
    "Corpus",
    "DEFAULT_BIN_WIDTH",
    "DEFAULT_FOLDS",
    "DEFAULT_MIN_DURATION_S",
    "DEFAULT_TOLERANCE_S",
    "DEFAULT_WINDOW_S",
    "DiscreteDurations",
    "EvalMetrics",
    "FEATURE_VARS",
    "FeatureTable",
    "FoldAssignment",
    "GroupStats",
    "GroupSummary",
    "JitterSpec",
    "KNOWN_CATEGORIES",
    "Log2NormalDurations",
    "ManovaReport",
    "Motif",
    "MotifkitError",
    "NumericalError",
    "Observation",
    "ParseError",
    "PosthocResult",
    "SOURCES",
    "SegmenterConfig",
    "ValidationError",
    "WindowFeature",
    "betainc",
    "default_profiles",
    "duration_entropy",
    "evaluate_corpus",
    "evaluate_song",
    "extract_features",
    "f_survival",
    "features_from_csv",
    "features_to_csv",
    "frame_rms",
    "generate_corpus",
    "generate_song",
    "holm_adjust",
    "hotelling_t2",
    "jitter_boundaries",
    "jitter_corpus",
    "manova",
    "manova_observations",
    "match_boundaries",
    "motifs_from_boundaries",
    "null_profiles",
    "null_rejection_rate",
    "omnibus_csv",
    "parse_annotations",
    "posthoc_csv",
    "rao_f",
    "read_profiles",
    "read_wav",
    "report_csv",
    "report_json",
    "report_text",
    "scatter_matrices",
    "segment_energy",
    "segment_file",
    "separation_p_values",
    "stratified_folds",
    "wilks_lambda",
    "window_motifs",
    "write_annotations",
    "write_profiles",
]
