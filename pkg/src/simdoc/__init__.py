"""Document-level text simplification toolkit: deterministic text
processing, corpus builders, evaluation metrics, a coherence-gated
multi-objective loss, trainable backends and an experiment harness."""

from .textproc import (
    Document,
    Sentence,
    PAD_TOKEN,
    count_syllables,
    document_from_text,
    frame_document,
    split_sentences,
    tokenize_words,
)
from .corpus import (
    CoherenceExample,
    LeveledArticle,
    SimplificationInstance,
    build_newsela_s,
    build_newsela_sl,
    format_control_input,
    generate_synthetic_corpus,
    ingest_gcdc,
    ingest_pairs,
    read_corpus,
    write_corpus,
)
from .metrics import MetricsReport, coherence_rate, d_sari, fkgl, fre, sari
from .coherence import (
    CoherenceModel,
    extract_features,
    gradient_check_coherence,
    predict_coherence,
    train_coherence,
)
from .loss import BatchLoss, LossBreakdown, LossConfig, gating_gradient, partial_loss, total_loss
from .backend import (
    BuiltinBackend,
    ExternalBackend,
    ReadabilityClassifier,
    SubstitutionModel,
    spawn_external,
    train_step,
)
from .harness import ExperimentConfig, ExperimentResult, compare_regimes, evaluate, run_experiment

__version__ = "0.1.0"
