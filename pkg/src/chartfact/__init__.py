"""Factual-consistency toolkit for chart captions.

Covers the full loop: linearizing chart tables, segmenting captions,
scoring sentences with a visual-entailment backend, generating hard
negative training pairs, correcting captions through a two-stage
table-then-rectify pipeline, and evaluating everything with rank,
agreement, and table-similarity metrics.
"""

from .table import (
    CELL_DELIMITER,
    ROW_DELIMITER,
    Cell,
    ChartRef,
    EmptyInputError,
    NumericValue,
    RaggedRowError,
    Table,
    TableError,
    UnencodableCellError,
    UnknownColumnError,
    numeric_column_indices,
    parse_cell_number,
    parse_linearized,
    serialize_linearized,
    single_numeric_column,
)
from .text import (
    Caption,
    LexiconError,
    MentionMatch,
    SegmentationError,
    Sentence,
    TableCellSource,
    TrendLexicon,
    TrendPair,
    TrendTermSource,
    find_trend_terms,
    find_value_mentions,
    segment_sentences,
)
from .entailment import (
    EmptyCaptionError,
    EntailmentBackend,
    EntailmentLogits,
    FactualityReport,
    PROMPT_PREFIX,
    PROMPT_SUFFIX,
    YES_NO_LOGIT,
    build_prompt,
    caption_score,
    logits_from_yes_no,
    oracle_logits,
    score_caption,
    sentence_from_prompt,
    sentence_score,
)
from .negatives import (
    DEFAULT_SPLIT_RATIO,
    SPLIT_NAMES,
    CorpusChart,
    EntailmentInstance,
    EntailmentLabel,
    GenerationConfig,
    InsufficientCorpusError,
    NegativeFamily,
    NegativeSample,
    OutOfContextProvenance,
    TrendProvenance,
    ValueLabelProvenance,
    assign_splits,
    derive_seed,
    gen_ooc_negatives,
    gen_trend_negatives,
    gen_value_label_negatives,
    generate_all,
    instance_from_record,
    read_corpus,
    write_corpus,
    write_instances,
)
from .correction import (
    CorrectionResult,
    CorrectionStatus,
    BatchOutcome,
    Chart2TablePort,
    MARKER,
    MissingMarkerError,
    NO_ERRORS_LINE,
    RectifierPort,
    TemplateError,
    batch_correct,
    correct_caption,
    default_template,
    parse_rectifier_response,
    render_rectification_prompt,
)
from .metrics import (
    DegenerateAgreementError,
    DegenerateSeriesError,
    ErrorRateReport,
    GroupErrorRates,
    MentionAnnotation,
    MentionErrorRate,
    SingleClassError,
    TableEntry,
    entry_similarity,
    error_rates,
    fleiss_kappa,
    kendall_tau,
    levenshtein,
    majority_agreement,
    mention_error_rate,
    normalized_levenshtein,
    rms_f1,
    roc_auc,
    table_entries,
)
from .dataset import (
    AnnotatedInstance,
    ErrorType,
    FACTUAL_ERROR_TYPES,
    SchemaViolationError,
    Split,
    SplitCounts,
    SplitStats,
    aggregate_annotations,
    load_chocolate_release,
    load_dataset,
    parse_error_type,
    save_dataset,
    split_for_model,
    split_stats,
)
from .backends import (
    FixtureChart2TableBackend,
    FixtureEntailmentBackend,
    FixtureRectifier,
    GoldTableBackend,
    OracleEntailmentBackend,
    RemoteChart2TableBackend,
    RemoteEntailmentBackend,
    RemoteRectifier,
    TruthfulRectifier,
    make_chart2table_backend,
    make_entail_backend,
    make_rectifier_backend,
)
from .wire import (
    BackendError,
    BackendUnavailableError,
    PROTOCOL_VERSION,
    canonical_json,
    request_hash,
)

__version__ = "0.1.0"
