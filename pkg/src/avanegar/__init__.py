"""avanegar: learnersourced IPA transcription tasks for Persian poetry.

Core pieces: a phoneme inventory of binary feature vectors, a
phonologically weighted Levenshtein distance over tokenized IPA, task
generation and scoring, weighted error-rate regression, an event-sourced
corpus store and an HTTP API for collecting answers.
"""

from .analytics import (
    ItemStats,
    PILOT_ERROR_MODEL,
    RegressionModel,
    collect_item_stats,
    export_csv,
    fit_ols,
    item_error_rate,
    parse_items_csv,
    predict_error_rate,
)
from .distance import (
    CostConfig,
    EditStep,
    PwldResult,
    brute_force_pwld,
    phone_distance,
    sequence_pwld,
)
from .phonemes import (
    FeatureTable,
    InventoryError,
    Phoneme,
    PhonemeInventory,
    PhonemeSequence,
    TokenizeError,
    feature_diff_count,
    load_default_inventory,
    load_inventory,
    load_inventory_file,
    tokenize_ipa,
)
from .store import AlignedLine, CorpusStore, ResponseRecord, Session, UserProfile, WordAlignment
from .tasks import (
    ScoredResponse,
    Task,
    TaskPlan,
    build_tasks,
    classify_task,
    generate_distractors,
    score_response,
    strip_short_vowels,
    task_complexity,
    validate_completion,
)

__version__ = "0.1.0"
