"""Acceptance gate: one test per criterion, each printing a pass/fail line.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the per-criterion
lines and timings. Stated runtime budgets are enforced.
"""

import functools
import random
import time

import numpy as np
import pytest
from fastapi.testclient import TestClient

from emotag import (
    EMOTIONS,
    Emotion,
    GoldTable,
    TokenStream,
    TrainConfig,
    aggregate,
    bucket_distribution,
    krippendorff_alpha,
    pairwise_rater_pearson,
    pearson,
    top_cooccurring,
    train,
)
from emotag.cli import main as cli_main
from emotag.corpus import CooccurrenceTable, build_cooccurrence
from emotag.evaluation import NotAvailable, ReportRow
from emotag.ratings import GoldCell, RatingSet, validate_record
from emotag.scoring import score_binary, score_intensity_freq, score_intensity_sim
from emotag.service import Campaign, RatingStore, create_app

from conftest import space_from_vectors
from test_scoring import binary, intensity, oracle_binary, oracle_intensity_freq, oracle_intensity_sim


def criterion(number, description, limit=None):
    def wrap(fn):
        @functools.wraps(fn)
        def run(*args, **kwargs):
            started = time.perf_counter()
            try:
                fn(*args, **kwargs)
            except BaseException:
                print(f"\n[acceptance] criterion {number} ({description}): FAIL")
                raise
            elapsed = time.perf_counter() - started
            print(f"\n[acceptance] criterion {number} ({description}): PASS ({elapsed:.2f}s)")
            if limit is not None:
                assert elapsed < limit, f"runtime {elapsed:.2f}s exceeds the {limit}s budget"
        return run
    return wrap


def rating_set(rows):
    records = [
        validate_record(
            {"rater": r, "emoji": e, "emotion": a, "score": s, "ts": f"2026-01-01T00:00:{i % 60:02d}+00:00"}
        )
        for i, (r, e, a, s) in enumerate(rows)
    ]
    return RatingSet(records)


@criterion(1, "gold aggregation arithmetic", limit=1.0)
def test_criterion_1_gold_aggregation():
    multisets = [
        ("anger", [4] * 9, 1.00, 0.00),
        ("joy", [4] * 6 + [3] * 3, 0.92, 0.12),
        ("sadness", [4] * 9, 1.00, 0.00),
        ("fear", [0, 0, 1, 1, 2, 3, 3, 4, 4], 0.50, 0.37),
        ("anticipation", [0] * 6 + [2, 3, 4], 0.25, 0.37),
    ]
    rows = []
    for emotion, scores, _, _ in multisets:
        rows.extend((f"r{i}", "e", emotion, s) for i, s in enumerate(scores))
    gold = aggregate(rating_set(rows))
    for emotion, _, mean, sd in multisets:
        cell = gold.get("e", Emotion(emotion))
        assert cell.gold == pytest.approx(mean, abs=0.005)
        assert cell.sd == pytest.approx(sd, abs=0.005)
        assert cell.n_raters == 9


@criterion(2, "report row averaging")
def test_criterion_2_report_averaging():
    full = dict(zip(EMOTIONS, [0.62, -0.03, 0.81, 0.50, 0.19, 0.57, -0.27, -0.04]))
    assert ReportRow(label="binary k=5", cells=full).average == pytest.approx(0.29, abs=0.005)
    partial = {e: NotAvailable("not_covered") for e in EMOTIONS}
    for emotion, value in zip(
        (Emotion.ANGER, Emotion.FEAR, Emotion.JOY, Emotion.SADNESS), (0.70, 0.68, 0.67, 0.75)
    ):
        partial[emotion] = value
    assert ReportRow(label="freq k=150", cells=partial).average == pytest.approx(0.70, abs=0.005)


@criterion(3, "scoring matches brute-force oracle", limit=10.0)
def test_criterion_3_scoring_oracle_equivalence():
    rng = np.random.default_rng(2024)
    instances = 0
    checks = 0
    while instances < 110:
        instances += 1
        n_words = int(rng.integers(2, 51))
        dim = int(rng.integers(2, 17))
        words = [f"w{i}" for i in range(n_words)]
        vectors = {w: rng.normal(size=dim) for w in words}
        vectors["1f602"] = rng.normal(size=dim)
        space = space_from_vectors(vectors)
        taus = {w: float(rng.random()) for w in words}
        counts = {w: int(rng.integers(0, 20)) for w in words}
        cooc = CooccurrenceTable({"1f602": {w: c for w, c in counts.items() if c > 0}}, doc_count=1)
        k = int(rng.integers(1, n_words + 5))

        got = score_binary("1f602", Emotion.JOY, space, binary(words), k)
        want, used = oracle_binary(vectors, "1f602", words, k)
        assert got.score == pytest.approx(want, abs=1e-9)
        assert got.used_word_count == used

        got = score_intensity_sim("1f602", Emotion.JOY, space, intensity(taus), k)
        want, used = oracle_intensity_sim(vectors, "1f602", taus, k)
        assert got.score == pytest.approx(want, abs=1e-9)
        assert got.used_word_count == used
        checks += 2

        if any(c > 0 for c in counts.values()):
            got = score_intensity_freq("1f602", Emotion.JOY, cooc, intensity(taus), k)
            want, used = oracle_intensity_freq(counts, taus, k)
            assert got.score == pytest.approx(want, abs=1e-9)
            assert got.used_word_count == used
            checks += 1
    assert instances >= 100 and checks >= 300


@criterion(4, "statistics oracles")
def test_criterion_4_statistics_oracles():
    assert pearson([1, 2, 3], [1, 2, 4]) == pytest.approx(0.982, abs=0.001)

    halves = rating_set(
        [("a", "e", "anger", 0), ("b", "e", "anger", 1), ("a", "e", "joy", 0), ("b", "e", "joy", 1)]
    )
    assert krippendorff_alpha(halves, "e") == -0.5  # exact

    agreement = rating_set(
        [("a", "e", "anger", 1), ("b", "e", "anger", 1), ("a", "e", "joy", 3), ("b", "e", "joy", 3)]
    )
    assert krippendorff_alpha(agreement, "e") == pytest.approx(1.0)

    rows = []
    for rater in ("a", "b", "c"):
        for emoji, score in zip("wxyz", (0, 1, 3, 4)):
            rows.append((rater, emoji, "joy", score))
    matrix = pairwise_rater_pearson(rating_set(rows))
    for a in matrix.raters:
        for b in matrix.raters:
            assert matrix.value(a, b) == pytest.approx(1.0)


def two_cluster_corpus(seed, docs=5000):
    rng = random.Random(seed)
    documents = []
    for i in range(docs):
        if i % 2 == 0:
            words = [f"a{rng.randint(0, 7)}" for _ in range(5)]
            words.insert(rng.randrange(len(words) + 1), "1f602")
        else:
            words = [f"b{rng.randint(0, 7)}" for _ in range(6)]
        documents.append(words)
    return TokenStream(documents)


@criterion(5, "embedding separation and determinism", limit=120.0)
def test_criterion_5_sgns_separation(tmp_path):
    config = TrainConfig(
        dim=16, window=2, negatives=3, epochs=1, learning_rate=0.05,
        subsample=0, min_count=1, seed=0,
    )
    separated = 0
    for seed in range(20):
        stream = two_cluster_corpus(1000 + seed)
        space = train(stream, config, seed=seed)
        mean_a = np.mean([space.cosine("1f602", f"a{i}") for i in range(8)])
        mean_b = np.mean([space.cosine("1f602", f"b{i}") for i in range(8)])
        if mean_a > mean_b:
            separated += 1
    assert separated >= 19, f"separation held in only {separated}/20 seeds"

    stream = two_cluster_corpus(77)
    first = train(stream, config, seed=7)
    second = train(stream, config, seed=7)
    assert np.array_equal(first.vectors, second.vectors)
    p1, p2 = tmp_path / "emb1.txt", tmp_path / "emb2.txt"
    first.save(p1)
    second.save(p2)
    assert p1.read_bytes() == p2.read_bytes()


@criterion(6, "invariant suites")
def test_criterion_6_invariants():
    rng = np.random.default_rng(6)

    # cosine scale invariance
    vectors = {f"t{i}": rng.normal(size=5) for i in range(8)}
    base = space_from_vectors(vectors)
    scaled = space_from_vectors({t: np.asarray(v) * 113.0 for t, v in vectors.items()})
    for a in vectors:
        for b in vectors:
            assert scaled.cosine(a, b) == pytest.approx(base.cosine(a, b), abs=1e-9)

    # top-k prefix stability
    counts = {f"w{i}": int(rng.integers(1, 9)) for i in range(12)}
    table = CooccurrenceTable({"e": counts}, doc_count=1)
    previous = []
    for k in range(1, 14):
        ranked = top_cooccurring(table, "e", set(counts), k)
        assert ranked[: len(previous)] == previous
        previous = ranked

    # bucket partition completeness
    cells = {(f"e{i}", emotion): GoldCell(float(rng.random()), 0.0, 1)
             for i in range(30) for emotion in EMOTIONS}
    distribution = bucket_distribution(GoldTable(cells))
    for emotion in EMOTIONS:
        assert distribution.total(emotion) == 30

    # Pearson affine invariance
    xs = [float(x) for x in rng.normal(size=12)]
    ys = [float(y) for y in rng.normal(size=12)]
    r = pearson(xs, ys)
    assert pearson(xs, [2.5 * y + 0.7 for y in ys]) == pytest.approx(r, abs=1e-9)

    # alpha shift invariance
    rows = [("a", "e", "anger", 0), ("b", "e", "anger", 2),
            ("a", "e", "joy", 1), ("b", "e", "joy", 1),
            ("a", "e", "fear", 3), ("b", "e", "fear", 2)]
    base_alpha = krippendorff_alpha(rating_set(rows), "e")
    shifted = krippendorff_alpha(rating_set([(r_, e, a, s + 1) for r_, e, a, s in rows]), "e")
    assert shifted == pytest.approx(base_alpha, abs=1e-12)

    # co-occurrence merge equals sequential
    tokens = ["e1", "e2", "x", "y", "z"]
    inventory_like = {"e1", "e2"}

    class _Inv:
        def __contains__(self, token):
            return token in inventory_like

    docs = [[tokens[int(rng.integers(len(tokens)))] for _ in range(int(rng.integers(2, 8)))]
            for _ in range(80)]
    whole = build_cooccurrence(TokenStream(docs), _Inv())
    merged = CooccurrenceTable.merge(
        build_cooccurrence(TokenStream(docs[i::3]), _Inv()) for i in range(3)
    )
    assert merged.doc_count == whole.doc_count
    assert {e: whole.words_for(e) for e in whole.emojis()} == {
        e: merged.words_for(e) for e in merged.emojis()
    }


@criterion(7, "end-to-end pipeline", limit=180.0)
def test_criterion_7_end_to_end(tmp_path, fixtures):
    train_flags = [
        "--dim", "12", "--window", "3", "--negatives", "3", "--epochs", "2",
        "--min-count", "1", "--subsample", "0", "--seed", "7", "--deterministic",
    ]
    emb = tmp_path / "emb.txt"
    cooc = tmp_path / "cooc.tsv"
    gold = tmp_path / "gold.tsv"
    corpus = str(fixtures / "corpus.txt")
    inventory = str(fixtures / "inventory.tsv")
    assert cli_main(["ingest", "--corpus", corpus, "--inventory", inventory,
                     "--out", str(tmp_path / "stats.json")]) == 0
    assert cli_main(["train", "--corpus", corpus, "--inventory", inventory,
                     "--out", str(emb), *train_flags]) == 0
    assert cli_main(["cooc", "--corpus", corpus, "--inventory", inventory, "--out", str(cooc)]) == 0
    assert cli_main(["aggregate", "--ratings", str(fixtures / "ratings.jsonl"), "--out", str(gold)]) == 0

    score_files = []
    jobs = [
        ("binary_topk_sum", str(fixtures / "binary_lexicon.tsv"), ["--embeddings", str(emb)]),
        ("intensity_sim_mean", str(fixtures / "affect_intensity.tsv"), ["--embeddings", str(emb)]),
        ("intensity_freq_mean", str(fixtures / "affect_intensity.tsv"), ["--cooc", str(cooc)]),
    ]
    for method, lexicon, extra in jobs:
        out = tmp_path / f"scores_{method}.tsv"
        assert cli_main(["score", "--method", method, "--lexicon", lexicon,
                         "--inventory", inventory, "-k", "5,25", "--out", str(out), *extra]) == 0
        score_files.append(out)
    combined = tmp_path / "scores.tsv"
    combined.write_text("".join(p.read_text() for p in score_files), encoding="utf-8")
    report = tmp_path / "report.tsv"
    assert cli_main(["evaluate", "--gold", str(gold), "--scores", str(combined),
                     "--out", str(report)]) == 0

    lines = report.read_text().splitlines()
    header = lines[0].split("\t")
    assert header == ["setting"] + [e.value for e in EMOTIONS] + ["average"]
    rows = [line.split("\t") for line in lines[1:]]
    assert len(rows) == 6  # 3 methods x k in {5, 25}
    uncovered = {"anticipation", "disgust", "surprise", "trust"}
    for row in rows:
        na_emotions = {header[i] for i, v in enumerate(row[1:-1], start=1) if v == "N/A"}
        if row[0].startswith("binary_topk_sum"):
            assert na_emotions == set()
        else:
            assert na_emotions == uncovered
        assert row[-1] != "N/A"


def make_service(tmp_path, n_emojis=150, n_sets=6):
    inventory = [(f"{0x1F600 + i:x}", f"emoji {i}") for i in range(n_emojis)]
    from emotag import EmojiInventory

    campaign = Campaign.create(EmojiInventory(inventory), n_sets=n_sets, seed=11)
    store = RatingStore(str(tmp_path / "ratings.jsonl"))
    return TestClient(create_app(store, campaign=campaign)), campaign, store


def full_batch(campaign, set_id, rater, scores=None):
    members = campaign.sets[set_id]
    ratings = []
    for i, emoji in enumerate(members):
        for j, emotion in enumerate(EMOTIONS):
            score = scores(i, j) if scores else 2
            ratings.append({"emoji": emoji, "emotion": emotion.value, "score": score})
    return {"rater": rater, "set_id": set_id, "ratings": ratings}


@criterion(8, "service completeness gate [secondary]")
def test_criterion_8_completeness_gate(tmp_path):
    client, campaign, store = make_service(tmp_path)
    batch = full_batch(campaign, 0, "ann")
    removed = batch["ratings"].pop(37)
    response = client.post("/api/ratings", json=batch)
    assert response.status_code == 422
    missing = response.json()["detail"]["missing"]
    assert {"emoji": removed["emoji"], "emotion": removed["emotion"]} in missing
    assert store.records() == []
    batch["ratings"].append(removed)
    assert client.post("/api/ratings", json=batch).status_code == 200


@criterion(9, "set order randomization [secondary]")
def test_criterion_9_randomization(tmp_path):
    client, campaign, _ = make_service(tmp_path)
    fetched = [client.get("/api/sets/2").json()["emojis"] for _ in range(20)]
    assert len({tuple(f) for f in fetched}) >= 19
    assert {frozenset(f) for f in fetched} == {frozenset(campaign.sets[2])}


@criterion(10, "round-trip aggregate parity [secondary]")
def test_criterion_10_round_trip_parity(tmp_path):
    client, campaign, store = make_service(tmp_path, n_emojis=12, n_sets=2)
    rng = random.Random(42)
    for rater in ("ann", "bob", "cal"):
        for set_id in (0, 1):
            batch = full_batch(campaign, set_id, rater, scores=lambda i, j: rng.randint(0, 4))
            assert client.post("/api/ratings", json=batch).status_code == 200
    live = client.get("/api/results/aggregate").json()["gold"]

    gold_out = tmp_path / "gold.tsv"
    assert cli_main(["aggregate", "--ratings", store.path, "--out", str(gold_out)]) == 0
    offline = GoldTable.load(gold_out)
    assert len(live) == len(offline.cells)
    for row in live:
        cell = offline.get(row["emoji"], Emotion(row["emotion"]))
        assert row["gold"] == cell.gold
        assert row["sd"] == cell.sd
        assert row["n"] == cell.n_raters
