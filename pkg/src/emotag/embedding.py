"""Skip-gram negative-sampling embeddings over the token stream.

Words and emoji keys are ordinary vocabulary items in one space, so cosine
similarity between an emoji and a word is well defined. The trainer keeps
two matrices (input and output vectors) and exposes the input vectors as
the embedding; each (center, context) pair within the window takes one SGD
step on ``log sigmoid(u_c . v_w) + sum_n log sigmoid(-u_n . v_w)`` with
negatives drawn from the unigram distribution raised to 3/4.
"""

import threading
from collections import Counter
from dataclasses import dataclass, replace

import numpy as np

from .errors import EmotagError, InvalidConfig
from .fileio import write_atomic

PROBE_PAIRS = 256
MIN_LR_FRACTION = 1e-4
SCORE_CLAMP = 18.0  # sigmoid saturates; avoids overflow in exp


class TokenNotInVocabulary(EmotagError):
    category = "token_not_in_vocabulary"

    def __init__(self, token):
        super().__init__(f"token {token!r} is not in the vocabulary")
        self.token = token


class EmptyVocabulary(EmotagError):
    category = "empty_vocabulary"


class TrainingDataError(EmotagError):
    category = "training_data"


class Vocabulary:
    """Dense token index ordered by descending frequency, ties alphabetic."""

    def __init__(self, tokens, counts=None):
        self.tokens = tuple(tokens)
        self.counts = tuple(counts) if counts is not None else None
        self._index = {token: i for i, token in enumerate(self.tokens)}

    def __len__(self):
        return len(self.tokens)

    def __contains__(self, token):
        return token in self._index

    def index_of(self, token):
        try:
            return self._index[token]
        except KeyError:
            raise TokenNotInVocabulary(token) from None

    def count(self, token):
        return self.counts[self._index[token]]


def build_vocab(stream, min_count=1):
    """Count tokens across the stream and keep those with frequency >= min_count."""
    if min_count < 1:
        raise InvalidConfig(f"min_count must be >= 1, got {min_count}")
    counter = Counter()
    for doc in stream:
        counter.update(doc)
    kept = [(token, count) for token, count in counter.items() if count >= min_count]
    if not kept:
        raise EmptyVocabulary(f"no token reaches min_count={min_count}")
    kept.sort(key=lambda tc: (-tc[1], tc[0]))
    return Vocabulary([t for t, _ in kept], [c for _, c in kept])


@dataclass(frozen=True)
class TrainConfig:
    dim: int = 100
    window: int = 5
    negatives: int = 5
    epochs: int = 5
    learning_rate: float = 0.025
    subsample: float = 1e-4
    min_count: int = 5
    seed: int = 1
    workers: int = 1

    def validate(self):
        checks = [
            (self.dim >= 2, "dim must be >= 2"),
            (self.window >= 1, "window must be >= 1"),
            (self.negatives >= 1, "negatives must be >= 1"),
            (self.epochs >= 1, "epochs must be >= 1"),
            (self.learning_rate > 0, "learning_rate must be positive"),
            (self.subsample >= 0, "subsample must be >= 0"),
            (self.min_count >= 1, "min_count must be >= 1"),
            (self.workers >= 1, "workers must be >= 1"),
        ]
        for ok, message in checks:
            if not ok:
                raise InvalidConfig(f"{message} (got {self})")


@dataclass
class NearestResult:
    items: list  # (token, similarity), best first
    skipped: int  # candidates dropped for being out of vocabulary


class EmbeddingSpace:
    """A vocabulary plus one input vector per token."""

    def __init__(self, vocab, vectors, config=None, probe_losses=()):
        vectors = np.asarray(vectors, dtype=np.float64)
        if vectors.ndim != 2 or vectors.shape[0] != len(vocab):
            raise InvalidConfig(
                f"vector matrix shape {vectors.shape} does not match vocabulary size {len(vocab)}"
            )
        self.vocab = vocab
        self.vectors = vectors
        self.config = config
        self.probe_losses = tuple(probe_losses)
        self._norms = None

    @property
    def dim(self):
        return self.vectors.shape[1]

    def _norm(self, index):
        if self._norms is None:
            self._norms = np.linalg.norm(self.vectors, axis=1)
        return self._norms[index]

    def vector(self, token):
        return self.vectors[self.vocab.index_of(token)]

    def cosine(self, t1, t2):
        i, j = self.vocab.index_of(t1), self.vocab.index_of(t2)
        denom = self._norm(i) * self._norm(j)
        if denom == 0.0:
            return 0.0
        value = float(np.dot(self.vectors[i], self.vectors[j]) / denom)
        return max(-1.0, min(1.0, value))

    def nearest(self, anchor, candidates, k):
        """Rank in-vocabulary ``candidates`` by cosine to ``anchor``.

        Similarity descending, ties by ascending token; candidates outside
        the vocabulary are skipped and tallied in ``skipped``.
        """
        if k < 1:
            raise InvalidConfig(f"k must be >= 1, got {k}")
        self.vocab.index_of(anchor)  # anchor must be in vocabulary
        scored = []
        skipped = 0
        for token in candidates:
            if token not in self.vocab:
                skipped += 1
                continue
            scored.append((token, self.cosine(anchor, token)))
        scored.sort(key=lambda ts: (-ts[1], ts[0]))
        return NearestResult(items=scored[:k], skipped=skipped)

    def save(self, path):
        """Text format: header ``n d``, then ``token v1 .. vd`` per line."""
        lines = [f"{len(self.vocab)} {self.dim}"]
        for i, token in enumerate(self.vocab.tokens):
            values = " ".join(repr(float(x)) for x in self.vectors[i])
            lines.append(f"{token} {values}")
        write_atomic(path, "\n".join(lines) + "\n")

    @classmethod
    def load(cls, path):
        with open(path, encoding="utf-8") as handle:
            header = handle.readline().split()
            if len(header) != 2:
                raise EmotagError(f"{path}: malformed embedding header")
            n, dim = int(header[0]), int(header[1])
            tokens = []
            vectors = np.empty((n, dim), dtype=np.float64)
            for i in range(n):
                parts = handle.readline().split()
                if len(parts) != dim + 1:
                    raise EmotagError(f"{path}: malformed embedding line {i + 2}")
                tokens.append(parts[0])
                vectors[i] = [float(x) for x in parts[1:]]
        return cls(Vocabulary(tokens), vectors)


def _sigmoid(x):
    return 1.0 / (1.0 + np.exp(-np.clip(x, -SCORE_CLAMP, SCORE_CLAMP)))


def _log_sigmoid(x):
    x = np.clip(x, -SCORE_CLAMP, SCORE_CLAMP)
    return -np.log1p(np.exp(-x))


def _encode_documents(stream, vocab):
    docs = []
    for doc in stream:
        ids = [vocab.index_of(t) for t in doc if t in vocab]
        if ids:
            docs.append(np.asarray(ids, dtype=np.intp))
    return docs


def _keep_probabilities(counts, threshold):
    """Per-token keep probability sqrt(t/f) for tokens with frequency share f > t."""
    if threshold <= 0:
        return None
    fractions = counts / counts.sum()
    keep = np.ones(len(counts))
    hot = fractions > threshold
    keep[hot] = np.sqrt(threshold / fractions[hot])
    return keep


def _document_pairs(ids, window):
    centers, contexts = [], []
    m = len(ids)
    for i in range(m):
        lo = 0 if i < window else i - window
        hi = min(m, i + window + 1)
        for j in range(lo, hi):
            if j != i:
                centers.append(ids[i])
                contexts.append(ids[j])
    return centers, contexts


def _probe_batch(docs, window, negatives, noise_cdf, seed):
    """A fixed batch of (center, context, negatives) used to track the objective."""
    rng = np.random.default_rng(seed)
    centers, contexts = [], []
    for ids in docs:
        c, x = _document_pairs(ids, window)
        centers.extend(c)
        contexts.extend(x)
        if len(centers) >= PROBE_PAIRS:
            break
    centers = np.asarray(centers[:PROBE_PAIRS], dtype=np.intp)
    contexts = np.asarray(contexts[:PROBE_PAIRS], dtype=np.intp)
    negs = np.searchsorted(noise_cdf, rng.random((len(centers), negatives)))
    return centers, contexts, negs


def probe_loss(syn0, syn1, probe):
    """Average negated SGNS objective of the probe batch under current weights."""
    centers, contexts, negs = probe
    if len(centers) == 0:
        return 0.0
    v = syn0[centers]
    positive = _log_sigmoid(np.einsum("ij,ij->i", syn1[contexts], v))
    negative = _log_sigmoid(-np.einsum("ikj,ij->ik", syn1[negs], v)).sum(axis=1)
    return float(-(positive + negative).mean())


class _Progress:
    """Token positions processed so far; drives the linear learning-rate decay."""

    def __init__(self, total, lr0):
        self.total = max(1, total)
        self.lr0 = lr0
        self.min_lr = lr0 * MIN_LR_FRACTION
        self.done = 0

    def advance(self, positions):
        self.done += positions
        remaining = 1.0 - self.done / self.total
        return max(self.min_lr, self.lr0 * remaining)


def _train_document(ids, rng, syn0, syn1, noise_cdf, keep, lr, window, negatives):
    if keep is not None:
        ids = ids[rng.random(len(ids)) < keep[ids]]
    if len(ids) < 2:
        return
    centers, contexts = _document_pairs(ids, window)
    negs = np.searchsorted(noise_cdf, rng.random((len(centers), negatives)))
    for p in range(len(centers)):
        w = centers[p]
        c = contexts[p]
        sampled = negs[p]
        sampled = sampled[sampled != c]
        idx = np.empty(len(sampled) + 1, dtype=np.intp)
        idx[0] = c
        idx[1:] = sampled
        v = syn0[w]
        rows = syn1[idx]
        g = -_sigmoid(rows @ v) * lr
        g[0] += lr
        dv = g @ rows
        np.add.at(syn1, idx, g[:, None] * v)
        syn0[w] += dv


def train(stream, config=None, **overrides):
    """Train SGNS over the stream and return the input vectors as the embedding.

    With ``workers == 1`` and a fixed seed the run is fully deterministic;
    more workers shard documents across threads that update the shared
    matrices without locks, accepting run-to-run nondeterminism.
    """
    if config is None:
        config = TrainConfig()
    if overrides:
        config = replace(config, **overrides)
    config.validate()
    vocab = build_vocab(stream, config.min_count)
    docs = _encode_documents(stream, vocab)
    if not docs or max(len(d) for d in docs) < 2:
        raise TrainingDataError("corpus has no document with two in-vocabulary tokens")

    rng = np.random.default_rng(config.seed)
    n, dim = len(vocab), config.dim
    syn0 = (rng.random((n, dim)) - 0.5) / dim
    while not syn0.any(axis=1).all():  # keep the nonzero-initialization guarantee
        dead = ~syn0.any(axis=1)
        syn0[dead] = (rng.random((int(dead.sum()), dim)) - 0.5) / dim
    syn1 = np.zeros((n, dim))

    counts = np.asarray(vocab.counts, dtype=np.float64)
    noise = counts**0.75
    noise_cdf = np.cumsum(noise / noise.sum())
    keep = _keep_probabilities(counts, config.subsample)

    total_positions = sum(len(d) for d in docs) * config.epochs
    progress = _Progress(total_positions, config.learning_rate)
    probe = _probe_batch(docs, config.window, config.negatives, noise_cdf, config.seed ^ 0x5EED)

    losses = []
    if config.workers == 1:
        for _ in range(config.epochs):
            for ids in docs:
                lr = progress.advance(len(ids))
                _train_document(
                    ids, rng, syn0, syn1, noise_cdf, keep, lr, config.window, config.negatives
                )
            losses.append(probe_loss(syn0, syn1, probe))
    else:
        shards = [docs[i :: config.workers] for i in range(config.workers)]
        for epoch in range(config.epochs):
            threads = []
            for worker, shard in enumerate(shards):
                worker_rng = np.random.default_rng((config.seed, epoch, worker))
                threads.append(
                    threading.Thread(
                        target=_train_shard,
                        args=(
                            shard,
                            worker_rng,
                            syn0,
                            syn1,
                            noise_cdf,
                            keep,
                            progress,
                            config,
                        ),
                    )
                )
            for thread in threads:
                thread.start()
            for thread in threads:
                thread.join()
            losses.append(probe_loss(syn0, syn1, probe))

    return EmbeddingSpace(vocab, syn0, config=config, probe_losses=losses)


def _train_shard(shard, rng, syn0, syn1, noise_cdf, keep, progress, config):
    for ids in shard:
        lr = progress.advance(len(ids))
        _train_document(ids, rng, syn0, syn1, noise_cdf, keep, lr, config.window, config.negatives)


def cosine(space, t1, t2):
    return space.cosine(t1, t2)


def nearest(space, anchor, candidates, k):
    return space.nearest(anchor, candidates, k)
