import random

import pytest

from emotag import (
    EMOTIONS,
    Emotion,
    GoldTable,
    Method,
    NotAvailable,
    ScoreTable,
    ScoringParams,
    UndefinedCorrelation,
    bucket_distribution,
    evaluate,
    pearson,
    top_emojis,
)
from emotag.evaluation import (
    ReportRow,
    bucket_of,
    buckets_to_text,
    report_to_text,
    report_to_tsv,
)
from emotag.ratings import GoldCell
from emotag.scoring import ScoreCell


def gold_table(values, emotion=Emotion.JOY):
    return GoldTable({(e, emotion): GoldCell(v, 0.0, 1) for e, v in values.items()})


def score_table(values, emotion=Emotion.JOY, emotions=None):
    params = ScoringParams(method=Method.INTENSITY_SIM_MEAN, k=5)
    cells = {(e, emotion): ScoreCell(v, 5) for e, v in values.items()}
    return ScoreTable(params, emotions or (emotion,), cells)


class TestPearson:
    def test_identity(self):
        assert pearson([1.0, 2.0, 5.0], [1.0, 2.0, 5.0]) == pytest.approx(1.0)

    def test_negation(self):
        assert pearson([1.0, 2.0, 5.0], [-1.0, -2.0, -5.0]) == pytest.approx(-1.0)

    def test_oracle_value(self):
        # frozen from scipy.stats.pearsonr([1,2,3], [1,2,4])
        assert pearson([1, 2, 3], [1, 2, 4]) == pytest.approx(0.982, abs=0.001)
        assert pearson([1, 2, 3], [1, 2, 4]) == pytest.approx(0.9819805060619655, abs=1e-12)

    def test_zero_variance(self):
        with pytest.raises(UndefinedCorrelation):
            pearson([1, 1, 1], [1, 2, 3])
        with pytest.raises(UndefinedCorrelation):
            pearson([1, 2, 3], [2, 2, 2])

    def test_length_validation(self):
        with pytest.raises(ValueError):
            pearson([1, 2], [1, 2, 3])
        with pytest.raises(ValueError):
            pearson([1], [1])

    def test_matches_scipy_on_random_data(self):
        scipy_stats = pytest.importorskip("scipy.stats")
        rng = random.Random(17)
        for _ in range(50):
            n = rng.randint(3, 30)
            xs = [rng.uniform(-5, 5) for _ in range(n)]
            ys = [rng.uniform(-5, 5) for _ in range(n)]
            expected = scipy_stats.pearsonr(xs, ys)[0]
            assert pearson(xs, ys) == pytest.approx(expected, abs=1e-10)

    def test_bounded(self):
        rng = random.Random(23)
        for _ in range(50):
            n = rng.randint(2, 12)
            xs = [rng.gauss(0, 1) for _ in range(n)]
            ys = [rng.gauss(0, 1) for _ in range(n)]
            try:
                r = pearson(xs, ys)
            except UndefinedCorrelation:
                continue
            assert -1.0 - 1e-12 <= r <= 1.0 + 1e-12


class TestReportAveraging:
    def test_full_row_average(self):
        # a full-coverage row: correlations present for all eight emotions
        cells = dict(zip(EMOTIONS, [0.62, -0.03, 0.81, 0.50, 0.19, 0.57, -0.27, -0.04]))
        row = ReportRow(label="binary k=5", cells=cells)
        assert row.average == pytest.approx(0.29, abs=0.005)

    def test_partial_row_average_ignores_na(self):
        cells = {e: NotAvailable("not_covered") for e in EMOTIONS}
        for emotion, value in zip(
            (Emotion.ANGER, Emotion.FEAR, Emotion.JOY, Emotion.SADNESS), (0.70, 0.68, 0.67, 0.75)
        ):
            cells[emotion] = value
        row = ReportRow(label="freq k=150", cells=cells)
        assert row.average == pytest.approx(0.70, abs=0.005)

    def test_average_recomputed_from_cells(self):
        row = ReportRow(label="x", cells={Emotion.JOY: 0.4, Emotion.FEAR: 0.8})
        assert row.average == pytest.approx(0.6)
        row.cells[Emotion.JOY] = 0.8
        assert row.average == pytest.approx(0.8)

    def test_all_na_average_is_none(self):
        row = ReportRow(label="x", cells={e: NotAvailable("nope") for e in EMOTIONS})
        assert row.average is None


class TestEvaluate:
    def test_perfect_scores_give_unit_correlation(self):
        values = {"e1": 0.1, "e2": 0.5, "e3": 0.9}
        row = evaluate(gold_table(values), score_table(values))
        assert row.cells[Emotion.JOY] == pytest.approx(1.0)

    def test_uncovered_emotions_are_na(self):
        values = {"e1": 0.1, "e2": 0.5}
        row = evaluate(gold_table(values), score_table(values))
        assert isinstance(row.cells[Emotion.ANTICIPATION], NotAvailable)
        assert row.cells[Emotion.ANTICIPATION].reason == "not_covered"

    def test_insufficient_shared_emojis(self):
        gold = gold_table({"e1": 0.1, "e2": 0.5})
        scores = score_table({"e1": 0.3})
        row = evaluate(gold, scores)
        assert isinstance(row.cells[Emotion.JOY], NotAvailable)
        assert row.cells[Emotion.JOY].reason == "insufficient_data"

    def test_missing_emojis_dropped_pairwise_and_counted(self):
        gold = gold_table({"e1": 0.1, "e2": 0.5, "e3": 0.9, "e4": 0.2})
        scores = score_table({"e1": 0.2, "e2": 0.6, "e3": 1.0})
        row = evaluate(gold, scores)
        assert row.dropped[Emotion.JOY] == 1
        assert row.cells[Emotion.JOY] == pytest.approx(1.0)

    def test_constant_predictions_are_na(self):
        gold = gold_table({"e1": 0.1, "e2": 0.5, "e3": 0.9})
        scores = score_table({"e1": 0.4, "e2": 0.4, "e3": 0.4})
        row = evaluate(gold, scores)
        assert row.cells[Emotion.JOY].reason == "undefined_correlation"

    def test_affine_invariance_of_predictions(self):
        rng = random.Random(5)
        values = {f"e{i}": rng.random() for i in range(10)}
        gold = gold_table(values)
        base = evaluate(gold, score_table(values)).cells[Emotion.JOY]
        scaled = {e: 3.7 * v + 0.25 for e, v in values.items()}
        transformed = evaluate(gold, score_table(scaled)).cells[Emotion.JOY]
        assert transformed == pytest.approx(base, abs=1e-9)


class TestBuckets:
    def test_boundary_placement(self):
        gold = gold_table({"e1": 0.0, "e2": 0.3, "e3": 0.6, "e4": 0.9})
        dist = bucket_distribution(gold)
        assert dist.counts[Emotion.JOY] == (1, 1, 1, 1)

    def test_exact_threshold_in_upper_bucket(self):
        assert bucket_of(0.75) == 3
        assert bucket_of(0.25) == 1
        assert bucket_of(0.5) == 2
        assert bucket_of(0.0) == 0
        assert bucket_of(1.0) == 3

    def test_partition_sums_to_emoji_count(self):
        rng = random.Random(9)
        cells = {}
        for i in range(40):
            for emotion in EMOTIONS:
                cells[(f"e{i}", emotion)] = GoldCell(rng.random(), 0.0, 1)
        dist = bucket_distribution(GoldTable(cells))
        for emotion in EMOTIONS:
            assert dist.total(emotion) == 40

    def test_empty_gold_rejected(self):
        with pytest.raises(ValueError):
            bucket_distribution(GoldTable({}))


class TestTopEmojis:
    def test_simple_ranking(self):
        gold = gold_table({"e1": 1.0, "e2": 0.75})
        assert top_emojis(gold, Emotion.JOY, 1) == [("e1", 1.0)]

    def test_n_exceeding_count(self):
        gold = gold_table({"e1": 1.0, "e2": 0.75})
        assert len(top_emojis(gold, Emotion.JOY, 10)) == 2

    def test_tie_breaks_by_key(self):
        gold = gold_table({"zz": 1.0, "aa": 1.0, "mm": 0.75})
        assert top_emojis(gold, Emotion.JOY, 3) == [("aa", 1.0), ("zz", 1.0), ("mm", 0.75)]

    def test_top_three_shape(self):
        gold = gold_table({"e1": 1.0, "e2": 1.0, "e3": 0.75, "e4": 0.2}, emotion=Emotion.ANGER)
        scores = [g for _, g in top_emojis(gold, Emotion.ANGER, 3)]
        assert scores == [1.0, 1.0, 0.75]


class TestEmission:
    def test_tsv_layout(self):
        cells = {e: NotAvailable("not_covered") for e in EMOTIONS}
        cells[Emotion.JOY] = 0.5
        text = report_to_tsv([ReportRow(label="m k=5", cells=cells)])
        lines = text.splitlines()
        assert lines[0].split("\t")[0] == "setting"
        row = lines[1].split("\t")
        assert row[0] == "m k=5"
        assert row[1 + EMOTIONS.index(Emotion.JOY)] == "0.50"
        assert row[-1] == "0.50"
        assert row.count("N/A") == 7

    def test_text_table_is_aligned(self):
        cells = {e: 0.25 for e in EMOTIONS}
        text = report_to_text([ReportRow(label="x", cells=cells)])
        lines = text.splitlines()
        assert len(lines) == 2
        assert len(lines[0]) == len(lines[1])

    def test_buckets_text(self):
        gold = gold_table({"e1": 0.1, "e2": 0.8})
        text = buckets_to_text(bucket_distribution(gold))
        assert "B4" in text and "B1" in text and "joy" in text
