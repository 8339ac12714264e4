"""Compare predicted score tables against gold ratings and emit report tables."""

import math
from dataclasses import dataclass, field

from .errors import EmotagError
from .fileio import write_atomic
from .lexicon import EMOTIONS

BUCKET_EDGES = (0.25, 0.5, 0.75)
BUCKET_LABELS = ("B1", "B2", "B3", "B4")


class UndefinedCorrelation(EmotagError):
    category = "undefined_correlation"


def pearson(xs, ys):
    """Sample Pearson correlation coefficient of two equal-length sequences."""
    if len(xs) != len(ys):
        raise ValueError(f"length mismatch: {len(xs)} vs {len(ys)}")
    if len(xs) < 2:
        raise ValueError("need at least two points")
    if all(x == xs[0] for x in xs) or all(y == ys[0] for y in ys):
        raise UndefinedCorrelation("zero variance in at least one input")
    n = len(xs)
    mean_x = sum(xs) / n
    mean_y = sum(ys) / n
    sxx = sum((x - mean_x) ** 2 for x in xs)
    syy = sum((y - mean_y) ** 2 for y in ys)
    sxy = sum((x - mean_x) * (y - mean_y) for x, y in zip(xs, ys))
    return sxy / math.sqrt(sxx * syy)


@dataclass(frozen=True)
class NotAvailable:
    reason: str

    def __str__(self):
        return "N/A"


@dataclass
class ReportRow:
    """One evaluated (method, parameters) setting: per-emotion r or N/A."""

    label: str
    cells: dict
    dropped: dict = field(default_factory=dict)

    @property
    def average(self):
        """Mean over the non-N/A cells, recomputed on access."""
        values = [v for v in self.cells.values() if not isinstance(v, NotAvailable)]
        if not values:
            return None
        return sum(values) / len(values)


def evaluate(gold, scores, label=None):
    """Per-emotion Pearson between gold means and one score table.

    Emotions the scoring method does not cover are N/A("not_covered");
    emotions with fewer than two emojis shared between the tables are
    N/A("insufficient_data"). Emojis whose cells errored during scoring drop
    out pairwise, tallied in ``dropped``.
    """
    cells = {}
    dropped = {}
    for emotion in EMOTIONS:
        if emotion not in scores.emotions:
            cells[emotion] = NotAvailable("not_covered")
            continue
        gold_cells = {e: c.gold for (e, a), c in gold.cells.items() if a == emotion}
        shared = sorted(e for e in gold_cells if scores.get(e, emotion) is not None)
        dropped[emotion] = len(gold_cells) - len(shared)
        if len(shared) < 2:
            cells[emotion] = NotAvailable("insufficient_data")
            continue
        xs = [gold_cells[e] for e in shared]
        ys = [scores.get(e, emotion).score for e in shared]
        try:
            cells[emotion] = pearson(xs, ys)
        except UndefinedCorrelation:
            cells[emotion] = NotAvailable("undefined_correlation")
    return ReportRow(label=label or scores.label(), cells=cells, dropped=dropped)


@dataclass
class BucketDistribution:
    """Gold-score histogram per emotion over [0,0.25), [0.25,0.5), [0.5,0.75), [0.75,1]."""

    counts: dict  # Emotion -> (b1, b2, b3, b4)

    def total(self, emotion):
        return sum(self.counts[emotion])


def bucket_of(score):
    for i, edge in enumerate(BUCKET_EDGES):
        if score < edge:
            return i
    return 3


def bucket_distribution(gold):
    if not gold.cells:
        raise ValueError("gold table is empty")
    counts = {}
    for (_, emotion), cell in gold.cells.items():
        buckets = counts.setdefault(emotion, [0, 0, 0, 0])
        buckets[bucket_of(cell.gold)] += 1
    return BucketDistribution({e: tuple(b) for e, b in counts.items()})


def top_emojis(gold, emotion, n):
    """Top ``n`` emojis for ``emotion`` by gold score, ties by ascending key."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    scored = [(e, c.gold) for (e, a), c in gold.cells.items() if a == emotion]
    scored.sort(key=lambda ec: (-ec[1], ec[0]))
    return scored[:n]


def _format_cell(value):
    if isinstance(value, NotAvailable):
        return "N/A"
    return f"{value:.2f}"


def report_to_tsv(rows):
    header = ["setting"] + [e.value for e in EMOTIONS] + ["average"]
    lines = ["\t".join(header)]
    for row in rows:
        avg = row.average
        cells = [_format_cell(row.cells.get(e, NotAvailable("missing"))) for e in EMOTIONS]
        lines.append("\t".join([row.label] + cells + ["N/A" if avg is None else f"{avg:.2f}"]))
    return "\n".join(lines) + "\n"


def report_to_text(rows):
    """Aligned plain-text table: one row per setting, one column per emotion."""
    header = ["setting"] + [e.value for e in EMOTIONS] + ["average"]
    table = [header]
    for row in rows:
        avg = row.average
        table.append(
            [row.label]
            + [_format_cell(row.cells.get(e, NotAvailable("missing"))) for e in EMOTIONS]
            + ["N/A" if avg is None else f"{avg:.2f}"]
        )
    widths = [max(len(r[i]) for r in table) for i in range(len(header))]
    lines = []
    for r in table:
        lines.append("  ".join(cell.rjust(w) if i else cell.ljust(w) for i, (cell, w) in enumerate(zip(r, widths))))
    return "\n".join(lines) + "\n"


def buckets_to_text(distribution):
    emotions = [e for e in EMOTIONS if e in distribution.counts]
    header = ["bucket"] + [e.value for e in emotions]
    table = [header]
    for i in (3, 2, 1, 0):
        table.append([BUCKET_LABELS[i]] + [str(distribution.counts[e][i]) for e in emotions])
    widths = [max(len(r[i]) for r in table) for i in range(len(header))]
    lines = ["  ".join(cell.rjust(w) for cell, w in zip(r, widths)) for r in table]
    return "\n".join(lines) + "\n"


def write_rater_correlation_csv(path, by_emotion, pairwise=None):
    """Plot-data CSV ``emotion,rater,r`` for regenerating the agreement figures.

    Per-rater rows carry each rater's correlation with gold for one emotion;
    optional pairwise rows use emotion ``all`` and ``a|b`` rater labels.
    """
    lines = ["emotion,rater,r"]
    for emotion, agreement in by_emotion.items():
        for rater in sorted(agreement.per_rater):
            lines.append(f"{emotion.value},{rater},{agreement.per_rater[rater]!r}")
    if pairwise is not None:
        for a, b in sorted(pairwise.values):
            r = pairwise.values[(a, b)]
            if r is not None and a < b:
                lines.append(f"all,{a}|{b},{r!r}")
    write_atomic(path, "\n".join(lines) + "\n")
