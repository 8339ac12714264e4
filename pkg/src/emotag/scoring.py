"""Predicted emoji-emotion association scores.

Three methods share one shape: pick the top-k lexicon words for an emotion,
then reduce. The binary method sums embedding cosines over the k most
similar lexicon words; the intensity methods average lexicon intensity
scores over the top-k words ranked either by cosine or by co-occurrence
frequency with the emoji. When fewer than k candidate words exist the
reduction runs over what is available and the cell records how many words
actually contributed.
"""

import enum
from dataclasses import dataclass

from .corpus import top_cooccurring
from .errors import EmotagError, FormatError, InvalidConfig
from .fileio import write_atomic
from .lexicon import EMOTIONS, BinaryLexicon, Emotion, EmotionNotCovered


class Method(str, enum.Enum):
    BINARY_TOPK_SUM = "binary_topk_sum"
    INTENSITY_SIM_MEAN = "intensity_sim_mean"
    INTENSITY_FREQ_MEAN = "intensity_freq_mean"


class EmojiNotInVocabulary(EmotagError):
    category = "emoji_not_in_vocabulary"

    def __init__(self, emoji):
        super().__init__(f"emoji {emoji!r} is not in the embedding vocabulary")
        self.emoji = emoji


class NoCandidateWords(EmotagError):
    category = "no_candidate_words"


@dataclass(frozen=True)
class ScoringParams:
    method: Method
    k: int = 5
    min_frequency: int = 0
    anger_source: str = "angry"

    def __post_init__(self):
        if self.k < 1:
            raise InvalidConfig(f"k must be >= 1, got {self.k}")
        if self.min_frequency < 0:
            raise InvalidConfig(f"min_frequency must be >= 0, got {self.min_frequency}")

    def label(self):
        parts = [Method(self.method).value, f"k={self.k}"]
        if self.min_frequency:
            parts.append(f"F={self.min_frequency}")
        return " ".join(parts)


@dataclass(frozen=True)
class ScoreCell:
    score: float
    used_word_count: int


def _check_k(k):
    if k < 1:
        raise InvalidConfig(f"k must be >= 1, got {k}")


def score_binary(emoji, emotion, space, lexicon, k):
    """Sum of cosines between the emoji and its top-k most similar lexicon words."""
    _check_k(k)
    if emoji not in space.vocab:
        raise EmojiNotInVocabulary(emoji)
    candidates = lexicon.words_for(emotion)
    ranked = space.nearest(emoji, candidates, k).items
    if not ranked:
        raise NoCandidateWords(
            f"no word for emotion {emotion.value!r} is in the embedding vocabulary"
        )
    return ScoreCell(
        score=sum(sim for _, sim in ranked),
        used_word_count=len(ranked),
    )


def score_intensity_sim(emoji, emotion, space, lexicon, k):
    """Mean lexicon intensity over the k words most cosine-similar to the emoji."""
    _check_k(k)
    if emoji not in space.vocab:
        raise EmojiNotInVocabulary(emoji)
    scores = lexicon.words_for(emotion)
    ranked = space.nearest(emoji, scores, k).items
    if not ranked:
        raise NoCandidateWords(
            f"no word for emotion {emotion.value!r} is in the embedding vocabulary"
        )
    return ScoreCell(
        score=sum(scores[word] for word, _ in ranked) / len(ranked),
        used_word_count=len(ranked),
    )


def score_intensity_freq(emoji, emotion, cooc, lexicon, k):
    """Mean lexicon intensity over the k words co-occurring most with the emoji."""
    _check_k(k)
    scores = lexicon.words_for(emotion)
    ranked = top_cooccurring(cooc, emoji, scores, k)
    if not ranked:
        raise NoCandidateWords(
            f"emoji {emoji!r} co-occurs with no word for emotion {emotion.value!r}"
        )
    return ScoreCell(
        score=sum(scores[word] for word in ranked) / len(ranked),
        used_word_count=len(ranked),
    )


class ScoreTable:
    """Scores per (emoji, emotion) for one method + parameter setting.

    Cells that could not be computed are kept out of ``cells`` and recorded
    in ``missing`` with the error category, so one bad emoji never poisons a
    batch.
    """

    def __init__(self, params, emotions, cells=None, missing=None):
        self.params = params
        self.emotions = tuple(emotions)
        self.cells = dict(cells or {})
        self.missing = dict(missing or {})

    def get(self, emoji, emotion):
        return self.cells.get((emoji, emotion))

    def label(self):
        return self.params.label()

    def save(self, path):
        write_atomic(path, self.to_tsv())

    def to_tsv(self):
        lines = []
        params = self.params
        for (emoji, emotion) in sorted(self.cells, key=lambda c: (c[0], c[1].value)):
            cell = self.cells[(emoji, emotion)]
            lines.append(
                f"{emoji}\t{emotion.value}\t{Method(params.method).value}\t{params.k}"
                f"\t{params.min_frequency}\t{cell.score!r}\t{cell.used_word_count}"
            )
        return "\n".join(lines) + "\n" if lines else ""


def score_all(emojis, params, lexicon, space=None, cooc=None):
    """Score every (emoji, covered emotion) cell; failures become reasons, not aborts."""
    method = Method(params.method)
    if method in (Method.BINARY_TOPK_SUM, Method.INTENSITY_SIM_MEAN) and space is None:
        raise InvalidConfig(f"method {method.value} needs an embedding space")
    if method is Method.INTENSITY_FREQ_MEAN and cooc is None:
        raise InvalidConfig(f"method {method.value} needs a co-occurrence table")
    if method is Method.BINARY_TOPK_SUM:
        if not isinstance(lexicon, BinaryLexicon):
            raise InvalidConfig("binary_topk_sum needs a binary lexicon")
        covered = EMOTIONS
    else:
        if isinstance(lexicon, BinaryLexicon):
            raise InvalidConfig(f"{method.value} needs an intensity lexicon")
        covered = tuple(e for e in EMOTIONS if e in lexicon.coverage)
    cells = {}
    missing = {}
    for emoji in emojis:
        for emotion in covered:
            try:
                if method is Method.BINARY_TOPK_SUM:
                    cell = score_binary(emoji, emotion, space, lexicon, params.k)
                elif method is Method.INTENSITY_SIM_MEAN:
                    cell = score_intensity_sim(emoji, emotion, space, lexicon, params.k)
                else:
                    cell = score_intensity_freq(emoji, emotion, cooc, lexicon, params.k)
            except (EmojiNotInVocabulary, NoCandidateWords, EmotionNotCovered) as exc:
                missing[(emoji, emotion)] = exc.category
                continue
            cells[(emoji, emotion)] = cell
    return ScoreTable(params, covered, cells, missing)


def load_score_tables(path):
    """Read a score TSV (possibly several parameter settings) back into tables.

    Rows are grouped by (method, k, F); each group's covered emotions are the
    emotions observed among its rows.
    """
    groups = {}
    with open(path, encoding="utf-8") as handle:
        for number, raw in enumerate(handle, 1):
            line = raw.rstrip("\n")
            if not line.strip() or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 7:
                raise FormatError("expected 7 tab-separated fields", path=path, line=number)
            emoji, emotion, method, k, min_freq, score, used = parts
            try:
                key = (Method(method), int(k), int(min_freq))
                cell = ScoreCell(float(score), int(used))
                emotion = Emotion(emotion)
            except ValueError as exc:
                raise FormatError(str(exc), path=path, line=number) from None
            groups.setdefault(key, {})[(emoji, emotion)] = cell
    tables = []
    for (method, k, min_freq) in sorted(groups, key=lambda g: (g[0].value, g[1], g[2])):
        cells = groups[(method, k, min_freq)]
        emotions = tuple(e for e in EMOTIONS if any(a == e for (_, a) in cells))
        params = ScoringParams(method=method, k=k, min_frequency=min_freq)
        tables.append(ScoreTable(params, emotions, cells))
    return tables
