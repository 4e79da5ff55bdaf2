"""Speech-recognition adapter emitting motif-boundary annotation JSONL.

Consumes reference annotations (JSONL interchange format) plus audio and
lyrics to build training clips, fine-tunes a compact recognizer whose
output vocabulary includes quantized timestamp tokens, and writes
predicted-boundary JSONL back in the same interchange format.
"""

from .audio import SAMPLE_RATE, Clip, load_wav
from .data import TrainingClip, TrainingSet, build_training_set
from .errors import AdapterError, AudioDecodeError, DataError, MissingAudioError
from .inference import infer_boundaries
from .model import (
    REGISTRY,
    BoundaryASRModel,
    ModelSpec,
    build_model,
    greedy_decode,
    mel_filterbank,
    resolve_spec,
)
from .tokenizer import (
    EOS_ID,
    MAX_CLIP_S,
    PAD_ID,
    SOS_ID,
    TIMESTAMP_RESOLUTION_S,
    UNK_ID,
    Tokenizer,
    normalize_words,
)
from .training import (
    Checkpoint,
    FinetuneResult,
    TrainConfig,
    edit_distance,
    finetune,
    load_checkpoint,
    save_checkpoint,
    select_best,
    validation_wer,
    word_error_rate,
)

__version__ = "0.1.0"

__all__ = [
    "AdapterError",
    "AudioDecodeError",
    "BoundaryASRModel",
    "Checkpoint",
    "Clip",
    "DataError",
    "EOS_ID",
    "FinetuneResult",
    "MAX_CLIP_S",
    "MissingAudioError",
    "ModelSpec",
    "PAD_ID",
    "REGISTRY",
    "SAMPLE_RATE",
    "SOS_ID",
    "TIMESTAMP_RESOLUTION_S",
    "TrainConfig",
    "TrainingClip",
    "TrainingSet",
    "Tokenizer",
    "UNK_ID",
    "build_model",
    "build_training_set",
    "edit_distance",
    "finetune",
    "greedy_decode",
    "infer_boundaries",
    "load_checkpoint",
    "load_wav",
    "mel_filterbank",
    "normalize_words",
    "resolve_spec",
    "save_checkpoint",
    "select_best",
    "validation_wer",
    "word_error_rate",
]
