"""Command-line entry point wiring the pipeline end to end.

Settings resolve in precedence order: built-in default < config file
(``key = value`` lines, ``#`` comments) < ``EMOTAG_<KEY>`` environment
variable < explicit flag. Outputs go to stdout unless ``--out`` is given,
in which case files are written atomically (temp file + rename).
"""

import argparse
import json
import os
import sys

from . import __version__
from .corpus import CooccurrenceTable, EmojiInventory, build_cooccurrence, ingest
from .embedding import EmbeddingSpace, TrainConfig, train
from .errors import EmotagError, InvalidConfig
from .evaluation import (
    bucket_distribution,
    buckets_to_text,
    evaluate,
    report_to_text,
    report_to_tsv,
    top_emojis,
    write_rater_correlation_csv,
)
from .fileio import write_atomic
from .lexicon import (
    IDENTITY_MAPPING,
    BinaryLexicon,
    Emotion,
    IntensityLexicon,
    mood_label_mapping,
)
from .ratings import (
    GoldTable,
    aggregate,
    krippendorff_alpha,
    load_ratings,
    pairwise_rater_pearson,
    rater_vs_gold_by_emotion,
)
from .scoring import Method, ScoringParams, load_score_tables, score_all


def load_config_file(path):
    settings = {}
    with open(path, encoding="utf-8") as handle:
        for number, raw in enumerate(handle, 1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise InvalidConfig(f"{path}:{number}: expected 'key = value'")
            key, value = line.split("=", 1)
            settings[key.strip().replace("-", "_")] = value.strip()
    return settings


class Settings:
    """Flag > environment > config file > default, per key."""

    def __init__(self, args):
        self.args = args
        self.config = load_config_file(args.config) if getattr(args, "config", None) else {}

    def get(self, key, default=None, cast=str, required=False):
        value = getattr(self.args, key, None)
        if value is None:
            env = os.environ.get(f"EMOTAG_{key.upper()}")
            if env is not None:
                value = env
            elif key in self.config:
                value = self.config[key]
        if value is None:
            if required and default is None:
                raise InvalidConfig(f"missing required setting '{key}'")
            return default
        if cast is bool and isinstance(value, str):
            return value.strip().lower() in ("1", "true", "yes", "on")
        return cast(value) if isinstance(value, str) else value


def _emit(text, out_path):
    if out_path:
        write_atomic(out_path, text)
    else:
        sys.stdout.write(text)


def _load_inventory(settings):
    return EmojiInventory.load(settings.get("inventory", required=True))


def _parse_k_list(value):
    try:
        ks = [int(part) for part in str(value).split(",") if part.strip()]
    except ValueError:
        raise InvalidConfig(f"bad k list {value!r}; expected comma-separated integers") from None
    if not ks:
        raise InvalidConfig("k list is empty")
    return ks


def cmd_ingest(settings):
    inventory = _load_inventory(settings)
    result = ingest(
        settings.get("corpus", required=True),
        inventory,
        fmt=settings.get("format", "auto"),
        drop_emojiless=settings.get("drop_emojiless", False, cast=bool),
    )
    _emit(json.dumps(result.stats.to_dict(), indent=2) + "\n", settings.get("out"))
    return 0


def cmd_cooc(settings):
    inventory = _load_inventory(settings)
    result = ingest(
        settings.get("corpus", required=True),
        inventory,
        fmt=settings.get("format", "auto"),
    )
    table = build_cooccurrence(result.stream, inventory)
    out = settings.get("out")
    if out:
        table.save(out)
    else:
        for emoji in table.emojis():
            by_word = table.words_for(emoji)
            for word, count in sorted(by_word.items(), key=lambda kv: (-kv[1], kv[0])):
                sys.stdout.write(f"{emoji}\t{word}\t{count}\n")
    return 0


def _train_config(settings):
    deterministic = settings.get("deterministic", False, cast=bool)
    workers = settings.get("threads", 1, cast=int)
    if deterministic:
        workers = 1
    return TrainConfig(
        dim=settings.get("dim", 100, cast=int),
        window=settings.get("window", 5, cast=int),
        negatives=settings.get("negatives", 5, cast=int),
        epochs=settings.get("epochs", 5, cast=int),
        learning_rate=settings.get("lr", 0.025, cast=float),
        subsample=settings.get("subsample", 1e-4, cast=float),
        min_count=settings.get("min_count", 5, cast=int),
        seed=settings.get("seed", 1, cast=int),
        workers=workers,
    )


def cmd_train(settings):
    inventory = _load_inventory(settings)
    result = ingest(
        settings.get("corpus", required=True),
        inventory,
        fmt=settings.get("format", "auto"),
    )
    space = train(result.stream, _train_config(settings))
    space.save(settings.get("out", required=True))
    return 0


def cmd_similar(settings):
    space = EmbeddingSpace.load(settings.get("embeddings", required=True))
    anchor = settings.get("anchor", required=True)
    candidates_path = settings.get("candidates")
    if candidates_path:
        with open(candidates_path, encoding="utf-8") as handle:
            candidates = [line.strip() for line in handle if line.strip()]
    else:
        candidates = [t for t in space.vocab.tokens if t != anchor]
    result = space.nearest(anchor, candidates, settings.get("k", 10, cast=int))
    lines = [f"{token}\t{sim!r}" for token, sim in result.items]
    lines.append(f"# skipped\t{result.skipped}")
    _emit("\n".join(lines) + "\n", settings.get("out"))
    return 0


def _load_lexicon(settings, method):
    path = settings.get("lexicon", required=True)
    if method is Method.BINARY_TOPK_SUM:
        return BinaryLexicon.load(path)
    mapping_name = settings.get("mapping", "identity")
    if mapping_name == "identity":
        mapping = IDENTITY_MAPPING
    elif mapping_name == "mood":
        mapping = mood_label_mapping(settings.get("anger_source", "angry"))
    else:
        raise InvalidConfig(f"unknown mapping {mapping_name!r} (expected 'identity' or 'mood')")
    return IntensityLexicon.load(path, mapping, settings.get("min_frequency", 0, cast=int))


def cmd_score(settings):
    method = Method(settings.get("method", required=True))
    lexicon = _load_lexicon(settings, method)
    space = None
    cooc = None
    if method in (Method.BINARY_TOPK_SUM, Method.INTENSITY_SIM_MEAN):
        space = EmbeddingSpace.load(settings.get("embeddings", required=True))
    if method is Method.INTENSITY_FREQ_MEAN:
        cooc = CooccurrenceTable.load(settings.get("cooc", required=True))
    emojis_path = settings.get("emojis")
    if emojis_path:
        with open(emojis_path, encoding="utf-8") as handle:
            emojis = [line.strip() for line in handle if line.strip()]
    else:
        emojis = _load_inventory(settings).keys()
    sections = []
    for k in _parse_k_list(settings.get("k", "5")):
        params = ScoringParams(
            method=method,
            k=k,
            min_frequency=settings.get("min_frequency", 0, cast=int),
            anger_source=settings.get("anger_source", "angry"),
        )
        table = score_all(emojis, params, lexicon, space=space, cooc=cooc)
        sections.append(table.to_tsv())
    _emit("".join(sections), settings.get("out"))
    return 0


def cmd_aggregate(settings):
    ratings = load_ratings(settings.get("ratings", required=True))
    gold = aggregate(ratings)
    out = settings.get("out")
    if out:
        gold.save(out)
    else:
        for (emoji, emotion) in sorted(gold.cells, key=lambda c: (c[0], c[1].value)):
            cell = gold.cells[(emoji, emotion)]
            sys.stdout.write(
                f"{emoji}\t{emotion.value}\t{cell.gold!r}\t{cell.sd!r}\t{cell.n_raters}\n"
            )
    return 0


def cmd_agree(settings):
    ratings = load_ratings(settings.get("ratings", required=True))
    pairwise = pairwise_rater_pearson(ratings)
    by_emotion = rater_vs_gold_by_emotion(ratings)
    out_dir = settings.get("out_dir")
    summary = []
    defined = [v for k, v in pairwise.values.items() if k[0] < k[1] and v is not None]
    if defined:
        summary.append(f"pairwise_pearson_mean\t{sum(defined) / len(defined)!r}")
    for emotion, agreement in by_emotion.items():
        mean = "NA" if agreement.mean_r is None else repr(agreement.mean_r)
        summary.append(f"mean_r_vs_gold\t{emotion.value}\t{mean}")
    alphas = {}
    for emoji in ratings.emojis:
        try:
            alphas[emoji] = krippendorff_alpha(ratings, emoji)
        except EmotagError:
            alphas[emoji] = None
    if out_dir:
        os.makedirs(out_dir, exist_ok=True)
        matrix_lines = ["rater_a\trater_b\tr"]
        for a in pairwise.raters:
            for b in pairwise.raters:
                r = pairwise.values[(a, b)]
                matrix_lines.append(f"{a}\t{b}\t{'NA' if r is None else repr(r)}")
        write_atomic(os.path.join(out_dir, "pairwise_pearson.tsv"), "\n".join(matrix_lines) + "\n")
        alpha_lines = ["emoji\talpha"]
        for emoji in sorted(alphas):
            a = alphas[emoji]
            alpha_lines.append(f"{emoji}\t{'NA' if a is None else repr(a)}")
        write_atomic(os.path.join(out_dir, "emoji_alpha.tsv"), "\n".join(alpha_lines) + "\n")
        write_rater_correlation_csv(os.path.join(out_dir, "plot_data.csv"), by_emotion, pairwise)
    sys.stdout.write("\n".join(summary) + "\n")
    return 0


def cmd_evaluate(settings):
    gold = GoldTable.load(settings.get("gold", required=True))
    tables = load_score_tables(settings.get("scores", required=True))
    if not tables:
        raise InvalidConfig("score file contains no rows")
    rows = [evaluate(gold, table) for table in tables]
    out = settings.get("out")
    text_out = settings.get("text")
    if out:
        write_atomic(out, report_to_tsv(rows))
    if text_out:
        write_atomic(text_out, report_to_text(rows))
    if not out and not text_out:
        sys.stdout.write(report_to_text(rows))
    return 0


def cmd_buckets(settings):
    gold = GoldTable.load(settings.get("gold", required=True))
    _emit(buckets_to_text(bucket_distribution(gold)), settings.get("out"))
    return 0


def cmd_top(settings):
    gold = GoldTable.load(settings.get("gold", required=True))
    emotion = Emotion(settings.get("emotion", required=True))
    ranked = top_emojis(gold, emotion, settings.get("n", 3, cast=int))
    lines = [f"{emoji}\t{score!r}" for emoji, score in ranked]
    _emit("\n".join(lines) + "\n", settings.get("out"))
    return 0


def cmd_serve(settings):
    import uvicorn

    from .service import build_service

    app = build_service(
        data_dir=settings.get("data_dir", required=True),
        inventory_path=settings.get("inventory"),
        n_sets=settings.get("sets", 6, cast=int),
        seed=settings.get("seed", 0, cast=int),
        static_dir=settings.get("static"),
        write_token=settings.get("token"),
    )
    uvicorn.run(app, host=settings.get("host", "127.0.0.1"), port=settings.get("port", 8000, cast=int))
    return 0


def build_parser():
    parser = argparse.ArgumentParser(prog="emotag", description=__doc__)
    parser.add_argument("--version", action="version", version=f"emotag {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, helptext, flags):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("--config", help="key = value settings file")
        for flag, kwargs in flags:
            p.add_argument(flag, **kwargs)
        p.set_defaults(func=func)
        return p

    corpus_flags = [
        ("--corpus", {"help": "corpus file: one document per line (text or JSONL)"}),
        ("--inventory", {"help": "emoji inventory TSV (key<TAB>name)"}),
        ("--format", {"choices": ["auto", "text", "jsonl"], "help": "corpus layout"}),
    ]
    add(
        "ingest",
        cmd_ingest,
        "tokenize a corpus and report its statistics",
        corpus_flags
        + [
            ("--drop-emojiless", {"dest": "drop_emojiless", "action": "store_const", "const": True}),
            ("--out", {"help": "stats JSON path"}),
        ],
    )
    add("cooc", cmd_cooc, "build the emoji-word co-occurrence table", corpus_flags + [("--out", {})])
    add(
        "train",
        cmd_train,
        "train skip-gram negative-sampling embeddings",
        corpus_flags
        + [
            ("--out", {"help": "embedding text file"}),
            ("--dim", {"type": int}),
            ("--window", {"type": int}),
            ("--negatives", {"type": int}),
            ("--epochs", {"type": int}),
            ("--lr", {"type": float}),
            ("--subsample", {"type": float}),
            ("--min-count", {"dest": "min_count", "type": int}),
            ("--seed", {"type": int}),
            ("--threads", {"type": int, "help": "worker threads (>1 is nondeterministic)"}),
            ("--deterministic", {"action": "store_const", "const": True, "help": "single worker, seeded"}),
        ],
    )
    add(
        "similar",
        cmd_similar,
        "rank candidates by cosine similarity to an anchor token",
        [
            ("--embeddings", {}),
            ("--anchor", {}),
            ("--k", {"type": int}),
            ("--candidates", {"help": "file with one candidate token per line"}),
            ("--out", {}),
        ],
    )
    add(
        "score",
        cmd_score,
        "predict emoji-emotion association scores",
        [
            ("--method", {"choices": [m.value for m in Method]}),
            ("--lexicon", {}),
            ("--mapping", {"choices": ["identity", "mood"]}),
            ("--anger-source", {"dest": "anger_source", "choices": ["angry", "annoyed"]}),
            ("-F", {"dest": "min_frequency", "type": int, "help": "lexicon frequency threshold"}),
            ("-k", {"dest": "k", "help": "comma-separated k values, e.g. 5,25,100"}),
            ("--embeddings", {}),
            ("--cooc", {}),
            ("--inventory", {}),
            ("--emojis", {"help": "file with one emoji key per line (defaults to inventory)"}),
            ("--out", {}),
        ],
    )
    add("aggregate", cmd_aggregate, "aggregate ratings into the gold table", [("--ratings", {}), ("--out", {})])
    add(
        "agree",
        cmd_agree,
        "inter-rater agreement statistics",
        [("--ratings", {}), ("--out-dir", {"dest": "out_dir"})],
    )
    add(
        "evaluate",
        cmd_evaluate,
        "correlate predicted scores against gold",
        [("--gold", {}), ("--scores", {}), ("--out", {}), ("--text", {})],
    )
    add("buckets", cmd_buckets, "gold-score bucket distribution", [("--gold", {}), ("--out", {})])
    add(
        "top",
        cmd_top,
        "top emojis for an emotion by gold score",
        [("--gold", {}), ("--emotion", {}), ("--n", {"type": int}), ("--out", {})],
    )
    add(
        "serve",
        cmd_serve,
        "run the annotation collection service",
        [
            ("--data-dir", {"dest": "data_dir"}),
            ("--inventory", {}),
            ("--sets", {"type": int}),
            ("--seed", {"type": int}),
            ("--host", {}),
            ("--port", {"type": int}),
            ("--static", {"help": "directory with the UI bundle served at /"}),
            ("--token", {"help": "shared secret required on write endpoints"}),
        ],
    )
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(Settings(args))
    except EmotagError as exc:
        print(f"error:{exc.category}: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error:io: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
