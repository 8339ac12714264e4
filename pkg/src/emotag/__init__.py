"""emotag: emoji-emotion association scoring and rating-collection tooling."""

from .corpus import (
    CooccurrenceTable,
    CorpusStats,
    EmojiInventory,
    TokenStream,
    build_cooccurrence,
    ingest,
    tokenize,
    top_cooccurring,
)
from .embedding import (
    EmbeddingSpace,
    TokenNotInVocabulary,
    TrainConfig,
    Vocabulary,
    build_vocab,
    train,
)
from .errors import EmotagError, FormatError, InvalidConfig
from .evaluation import (
    NotAvailable,
    UndefinedCorrelation,
    bucket_distribution,
    evaluate,
    pearson,
    top_emojis,
)
from .lexicon import (
    EMOTIONS,
    IDENTITY_MAPPING,
    BinaryLexicon,
    Emotion,
    EmotionNotCovered,
    IntensityLexicon,
    mood_label_mapping,
)
from .ratings import (
    GoldTable,
    RatingSet,
    aggregate,
    krippendorff_alpha,
    load_ratings,
    pairwise_rater_pearson,
    rater_vs_gold_by_emotion,
)
from .scoring import (
    EmojiNotInVocabulary,
    Method,
    NoCandidateWords,
    ScoreTable,
    ScoringParams,
    score_all,
    score_binary,
    score_intensity_freq,
    score_intensity_sim,
)

__version__ = "0.1.0"

__all__ = [
    "BinaryLexicon",
    "CooccurrenceTable",
    "CorpusStats",
    "EMOTIONS",
    "EmbeddingSpace",
    "EmojiInventory",
    "EmojiNotInVocabulary",
    "EmotagError",
    "Emotion",
    "EmotionNotCovered",
    "FormatError",
    "GoldTable",
    "IDENTITY_MAPPING",
    "IntensityLexicon",
    "InvalidConfig",
    "Method",
    "NoCandidateWords",
    "NotAvailable",
    "RatingSet",
    "ScoreTable",
    "ScoringParams",
    "TokenNotInVocabulary",
    "TokenStream",
    "TrainConfig",
    "UndefinedCorrelation",
    "Vocabulary",
    "aggregate",
    "bucket_distribution",
    "build_cooccurrence",
    "build_vocab",
    "evaluate",
    "ingest",
    "krippendorff_alpha",
    "load_ratings",
    "mood_label_mapping",
    "pairwise_rater_pearson",
    "pearson",
    "rater_vs_gold_by_emotion",
    "score_all",
    "score_binary",
    "score_intensity_freq",
    "score_intensity_sim",
    "tokenize",
    "top_cooccurring",
    "top_emojis",
    "train",
]
