"""Human rating data: loading, gold aggregation, and inter-rater agreement.

Ratings arrive as JSONL records ``{"rater", "emoji", "emotion", "score",
"ts"}`` with integer scores 0..4. Duplicate (rater, emoji, emotion) keys are
resolved latest-wins at load time, so raters can correct themselves by
resubmitting. Gold scores and all agreement statistics work on the ratings
rescaled to [0, 1].
"""

import datetime as dt
import json
import logging
import warnings
from dataclasses import dataclass
from statistics import fmean, pstdev

from .errors import EmotagError, FormatError
from .evaluation import UndefinedCorrelation, pearson
from .fileio import write_atomic
from .lexicon import EMOTIONS, Emotion

log = logging.getLogger(__name__)

SCALE_MAX = 4


class RatingValidationError(EmotagError):
    category = "rating_validation"


class InsufficientRatings(EmotagError):
    category = "insufficient_ratings"


@dataclass(frozen=True)
class RatingRecord:
    rater: str
    emoji: str
    emotion: Emotion
    score: int
    timestamp: dt.datetime

    @property
    def rescaled(self):
        return self.score / SCALE_MAX


def _parse_timestamp(value, where=""):
    if isinstance(value, str):
        try:
            return dt.datetime.fromisoformat(value.replace("Z", "+00:00"))
        except ValueError:
            pass
    raise RatingValidationError(f"{where}malformed timestamp {value!r}")


def validate_record(raw, where=""):
    """Turn one raw mapping into a RatingRecord, enforcing field contracts."""
    try:
        rater = raw["rater"]
        emoji = raw["emoji"]
        emotion = raw["emotion"]
        score = raw["score"]
        ts = raw["ts"]
    except (KeyError, TypeError) as exc:
        raise RatingValidationError(f"{where}missing field {exc}") from None
    if not isinstance(rater, str) or not rater:
        raise RatingValidationError(f"{where}rater must be a non-empty string")
    if not isinstance(emoji, str) or not emoji:
        raise RatingValidationError(f"{where}emoji must be a non-empty string")
    try:
        emotion = Emotion(emotion)
    except ValueError:
        raise RatingValidationError(f"{where}unknown emotion {emotion!r}") from None
    if isinstance(score, bool) or not isinstance(score, int) or not 0 <= score <= SCALE_MAX:
        raise RatingValidationError(f"{where}score must be an integer in 0..{SCALE_MAX}, got {score!r}")
    return RatingRecord(rater, emoji, emotion, score, _parse_timestamp(ts, where))


class RatingSet:
    """Validated, deduplicated ratings plus the rater and emoji rosters."""

    def __init__(self, records):
        latest = {}
        for order, record in enumerate(records):
            key = (record.rater, record.emoji, record.emotion)
            previous = latest.get(key)
            if previous is None or (record.timestamp, order) >= (previous[0].timestamp, previous[1]):
                latest[key] = (record, order)
        self.records = tuple(record for record, _ in latest.values())
        self.raters = tuple(sorted({r.rater for r in self.records}))
        self.emojis = tuple(sorted({r.emoji for r in self.records}))
        self._by_cell = {}
        self._by_rater = {}
        for record in self.records:
            self._by_cell.setdefault((record.emoji, record.emotion), {})[record.rater] = record.score
            self._by_rater.setdefault(record.rater, {})[(record.emoji, record.emotion)] = record.score

    def __len__(self):
        return len(self.records)

    def cell(self, emoji, emotion):
        """rater -> raw score map for one (emoji, emotion) pairing."""
        return dict(self._by_cell.get((emoji, emotion), {}))

    def rater_scores(self, rater):
        return dict(self._by_rater.get(rater, {}))

    def missing_cells(self, rater):
        rated = self._by_rater.get(rater, {})
        return [
            (emoji, emotion)
            for emoji in self.emojis
            for emotion in EMOTIONS
            if (emoji, emotion) not in rated
        ]

    def completeness(self):
        """Per rater, the fraction of (emoji roster x 8 emotions) cells rated."""
        total = len(self.emojis) * len(EMOTIONS)
        if total == 0:
            return {}
        return {
            rater: len(self._by_rater.get(rater, {})) / total
            for rater in self.raters
        }


def load_ratings(path):
    """Load JSONL ratings; any malformed or invalid line aborts with its number."""
    records = []
    with open(path, encoding="utf-8") as handle:
        for number, raw in enumerate(handle, 1):
            line = raw.strip()
            if not line:
                continue
            try:
                payload = json.loads(line)
            except json.JSONDecodeError as exc:
                raise FormatError(f"malformed JSON: {exc}", path=path, line=number) from None
            records.append(validate_record(payload, where=f"{path}:{number}: "))
    return RatingSet(records)


@dataclass(frozen=True)
class GoldCell:
    gold: float
    sd: float
    n_raters: int


class GoldTable:
    """Mean and population SD of rescaled ratings per (emoji, emotion)."""

    def __init__(self, cells):
        self.cells = dict(cells)

    def get(self, emoji, emotion):
        return self.cells.get((emoji, emotion))

    def emojis_for(self, emotion):
        return sorted(e for (e, a) in self.cells if a == emotion)

    def save(self, path):
        lines = []
        for (emoji, emotion) in sorted(self.cells, key=lambda k: (k[0], k[1].value)):
            cell = self.cells[(emoji, emotion)]
            lines.append(f"{emoji}\t{emotion.value}\t{cell.gold!r}\t{cell.sd!r}\t{cell.n_raters}")
        write_atomic(path, "\n".join(lines) + "\n")

    @classmethod
    def load(cls, path):
        cells = {}
        with open(path, encoding="utf-8") as handle:
            for number, raw in enumerate(handle, 1):
                line = raw.rstrip("\n")
                if not line.strip() or line.startswith("#") or line.startswith("emoji\t"):
                    continue
                parts = line.split("\t")
                if len(parts) != 5:
                    raise FormatError("expected 5 tab-separated fields", path=path, line=number)
                emoji, emotion, gold, sd, n = parts
                cells[(emoji, Emotion(emotion))] = GoldCell(float(gold), float(sd), int(n))
        return cls(cells)


def aggregate(rating_set):
    """Gold table over every rated cell: mean and population SD of score/4."""
    cells = {}
    missing = 0
    for emoji in rating_set.emojis:
        for emotion in EMOTIONS:
            scores = rating_set.cell(emoji, emotion)
            if not scores:
                missing += 1
                continue
            values = [s / SCALE_MAX for s in scores.values()]
            cells[(emoji, emotion)] = GoldCell(
                gold=fmean(values),
                sd=pstdev(values) if len(values) > 1 else 0.0,
                n_raters=len(values),
            )
    if missing:
        log.warning("aggregate: %d (emoji, emotion) cells have no ratings", missing)
    return GoldTable(cells)


@dataclass
class PairwisePearson:
    raters: tuple
    values: dict  # (rater_a, rater_b) -> r or None, both orders plus diagonal
    undefined: tuple  # pairs whose correlation is undefined

    def value(self, a, b):
        return self.values[(a, b)]


def pairwise_rater_pearson(rating_set):
    """Rater-by-rater Pearson over co-rated cells, all emotions pooled."""
    raters = rating_set.raters
    if len(raters) < 2:
        raise InsufficientRatings("need at least two raters")
    values = {}
    undefined = []
    for a in raters:
        values[(a, a)] = 1.0
    for i, a in enumerate(raters):
        scores_a = rating_set.rater_scores(a)
        for b in raters[i + 1 :]:
            scores_b = rating_set.rater_scores(b)
            shared = sorted(set(scores_a) & set(scores_b))
            r = None
            if len(shared) >= 2:
                try:
                    r = pearson([scores_a[c] for c in shared], [scores_b[c] for c in shared])
                except UndefinedCorrelation:
                    r = None
            if r is None:
                undefined.append((a, b))
            values[(a, b)] = r
            values[(b, a)] = r
    return PairwisePearson(raters=raters, values=values, undefined=tuple(undefined))


@dataclass
class EmotionAgreement:
    mean_r: float
    per_rater: dict
    excluded: tuple


def rater_vs_gold_by_emotion(rating_set, leave_one_out=False):
    """Per emotion, each rater's Pearson against the gold mean, then the rater average.

    Gold includes the rater's own contribution unless ``leave_one_out`` is
    set. Raters with a constant score vector (or too few co-rated emojis)
    are excluded from that emotion's mean and reported as such.
    """
    result = {}
    for emotion in EMOTIONS:
        per_rater = {}
        excluded = []
        for rater in rating_set.raters:
            xs, ys = [], []
            for emoji in rating_set.emojis:
                scores = rating_set.cell(emoji, emotion)
                if rater not in scores:
                    continue
                others = [s for r, s in scores.items() if r != rater]
                if leave_one_out:
                    if not others:
                        continue
                    gold = fmean(others) / SCALE_MAX
                else:
                    gold = fmean(scores.values()) / SCALE_MAX
                xs.append(scores[rater] / SCALE_MAX)
                ys.append(gold)
            if len(xs) < 2:
                excluded.append(rater)
                continue
            try:
                per_rater[rater] = pearson(xs, ys)
            except UndefinedCorrelation:
                excluded.append(rater)
        result[emotion] = EmotionAgreement(
            mean_r=fmean(per_rater.values()) if per_rater else None,
            per_rater=per_rater,
            excluded=tuple(excluded),
        )
    return result


def _pair_sum_squared(values):
    """Sum of squared differences over all ordered pairs of ``values``."""
    n = len(values)
    total = sum(values)
    total_sq = sum(v * v for v in values)
    return 2.0 * (n * total_sq - total * total)


def krippendorff_alpha(rating_set, emoji):
    """Interval Krippendorff's alpha for one emoji across its eight emotion units.

    Units are the emotions, observers the raters, values the rescaled scores.
    Uses the standard pairable-values formulation: observed disagreement
    averages squared differences within units (each unit's pairs weighted by
    1/(m_u - 1)); expected disagreement averages squared differences over all
    value pairs pooled across units. Units with fewer than two values cannot
    be paired and drop out.
    """
    units = []
    raters = set()
    for emotion in EMOTIONS:
        scores = rating_set.cell(emoji, emotion)
        if scores:
            units.append([s / SCALE_MAX for s in scores.values()])
            raters.update(scores)
    if len(units) < 2:
        raise InsufficientRatings(f"emoji {emoji!r} has ratings on fewer than two emotions")
    if len(raters) < 2:
        raise InsufficientRatings(f"emoji {emoji!r} has ratings from fewer than two raters")
    pairable = [u for u in units if len(u) >= 2]
    if not pairable:
        raise InsufficientRatings(f"emoji {emoji!r} has no unit with two pairable values")
    n = sum(len(u) for u in pairable)
    observed = sum(_pair_sum_squared(u) / (len(u) - 1) for u in pairable) / n
    pooled = [v for u in pairable for v in u]
    expected = _pair_sum_squared(pooled) / (n * (n - 1))
    if expected == 0.0:
        warnings.warn(
            f"krippendorff_alpha: all ratings identical for emoji {emoji!r}; alpha = 1.0 by convention",
            stacklevel=2,
        )
        return 1.0
    return 1.0 - observed / expected
