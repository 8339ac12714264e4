"""Corpus ingestion: emoji-aware tokenization and emoji-word co-occurrence counts.

Emojis are identified by their codepoint-sequence key: lowercase hex
codepoints joined by "-" (e.g. ``1f602``, ``1f469-200d-1f4bb``). Keys are
canonical: the variation selector U+FE0F and skin-tone modifiers
U+1F3FB..U+1F3FF never appear in a key; in running text they attach to the
preceding emoji base and are folded away.
"""

import json
import re
from collections import Counter
from dataclasses import dataclass, field

from .errors import EmotagError, FormatError, InvalidConfig
from .fileio import data_lines, write_atomic

VARIATION_SELECTOR = 0xFE0F
ZWJ = 0x200D
SKIN_TONE_LO = 0x1F3FB
SKIN_TONE_HI = 0x1F3FF

_KEY_RE = re.compile(r"^[0-9a-f]+(-[0-9a-f]+)*$")


class InventoryError(EmotagError):
    category = "inventory"


def _is_modifier(cp):
    return cp == VARIATION_SELECTOR or SKIN_TONE_LO <= cp <= SKIN_TONE_HI


def parse_key(key):
    """Parse an EmojiKey into a tuple of codepoints, validating the format."""
    if not _KEY_RE.match(key):
        raise InventoryError(f"malformed emoji key {key!r}")
    cps = tuple(int(part, 16) for part in key.split("-"))
    for cp in cps:
        if cp > 0x10FFFF:
            raise InventoryError(f"emoji key {key!r} has codepoint out of range")
    return cps


def format_key(codepoints):
    return "-".join(f"{cp:x}" for cp in codepoints)


def canonical_key(key):
    """Strip U+FE0F and skin-tone modifiers from a key's codepoint sequence."""
    cps = tuple(cp for cp in parse_key(key) if not _is_modifier(cp))
    if not cps:
        raise InventoryError(f"emoji key {key!r} is empty after canonicalization")
    return format_key(cps)


class EmojiInventory:
    """The configured emoji set: canonical keys plus display names.

    Keys are canonicalized on construction; two raw keys that collide after
    modifier stripping are rejected. A trie over codepoint sequences backs
    longest-match lookup during tokenization.
    """

    def __init__(self, entries):
        self._names = {}
        self._trie = {}
        for raw_key, name in entries:
            key = canonical_key(raw_key)
            if key in self._names:
                raise InventoryError(f"duplicate emoji key {key!r} (from {raw_key!r})")
            self._names[key] = name
            node = self._trie
            for cp in parse_key(key):
                node = node.setdefault(cp, {})
            node[None] = key
        if not self._names:
            raise InventoryError("emoji inventory is empty")

    @classmethod
    def load(cls, path):
        """Read a TSV of ``key<TAB>name`` rows."""
        entries = []
        for number, line in data_lines(path):
            parts = line.split("\t")
            if len(parts) != 2:
                raise FormatError("expected 'key<TAB>name'", path=path, line=number)
            entries.append((parts[0].strip(), parts[1].strip()))
        if not entries:
            raise FormatError("inventory file has no entries", path=path)
        return cls(entries)

    def __contains__(self, key):
        return key in self._names

    def __len__(self):
        return len(self._names)

    def keys(self):
        return list(self._names)

    def name(self, key):
        return self._names[key]

    def match(self, codepoints, start):
        """Longest inventory match beginning at ``codepoints[start]``.

        Walks the key trie; U+FE0F and skin-tone modifiers after the first
        base codepoint are consumed transparently. Returns ``(key, end)`` for
        the longest match (with trailing modifiers attached) or ``None``.
        """
        node = self._trie
        best = None
        j = start
        while j < len(codepoints):
            cp = codepoints[j]
            if j > start and _is_modifier(cp):
                j += 1
                if best is not None and best[1] == j - 1:
                    best = (best[0], j)
                continue
            child = node.get(cp)
            if child is None:
                break
            node = child
            j += 1
            if None in node:
                best = (node[None], j)
        return best


def _clean_word(raw):
    word = raw.lower()
    start, end = 0, len(word)
    while start < end and not word[start].isalnum():
        start += 1
    while end > start and not word[end - 1].isalnum():
        end -= 1
    return word[start:end]


def tokenize(text, inventory):
    """Split ``text`` into word tokens and emoji-key tokens.

    Words are whitespace-delimited, lowercased, with leading/trailing
    punctuation stripped. Every inventory emoji becomes its own token even
    when glued to words or other emojis; ZWJ sequences stay whole when the
    full sequence is an inventory key and otherwise fall apart into whatever
    inventory members they contain. Emoji-like characters outside the
    inventory are treated like punctuation and disappear unless embedded in
    an alphanumeric word.
    """
    tokens = []
    for chunk in text.split():
        cps = [ord(ch) for ch in chunk]
        buffer = []
        i = 0
        while i < len(cps):
            hit = inventory.match(cps, i)
            if hit is None:
                buffer.append(cps[i])
                i += 1
                continue
            if buffer:
                word = _clean_word("".join(map(chr, buffer)))
                if word:
                    tokens.append(word)
                buffer = []
            tokens.append(hit[0])
            i = hit[1]
        if buffer:
            word = _clean_word("".join(map(chr, buffer)))
            if word:
                tokens.append(word)
    return tokens


@dataclass
class TokenStream:
    """Tokenized documents; emoji tokens are inventory keys, the rest words."""

    documents: list

    def __len__(self):
        return len(self.documents)

    def __iter__(self):
        return iter(self.documents)


@dataclass
class CorpusStats:
    documents: int = 0
    word_tokens: int = 0
    emoji_tokens: int = 0
    dropped_documents: int = 0
    emoji_document_counts: Counter = field(default_factory=Counter)
    malformed_lines: list = field(default_factory=list)

    def to_dict(self):
        return {
            "documents": self.documents,
            "word_tokens": self.word_tokens,
            "emoji_tokens": self.emoji_tokens,
            "dropped_documents": self.dropped_documents,
            "emoji_document_counts": dict(sorted(self.emoji_document_counts.items())),
            "malformed_lines": list(self.malformed_lines),
        }


@dataclass
class IngestResult:
    stream: TokenStream
    stats: CorpusStats


def _document_texts(path, fmt, stats):
    with open(path, encoding="utf-8") as handle:
        for number, raw in enumerate(handle, 1):
            line = raw.rstrip("\n")
            if fmt == "jsonl":
                if not line.strip():
                    continue
                try:
                    record = json.loads(line)
                    text = record["text"]
                except (json.JSONDecodeError, KeyError, TypeError) as exc:
                    stats.malformed_lines.append((number, str(exc)))
                    continue
                if not isinstance(text, str):
                    stats.malformed_lines.append((number, "'text' field is not a string"))
                    continue
                yield text
            else:
                yield line


def ingest(path, inventory, fmt="auto", drop_emojiless=False):
    """Tokenize a corpus file: one document per line, plain text or JSONL.

    JSONL lines must carry a ``"text"`` field; malformed lines are recorded
    with their line number in the returned stats and skipped. Documents with
    no emoji token are kept unless ``drop_emojiless`` is set.
    """
    if fmt == "auto":
        fmt = "jsonl" if str(path).endswith((".jsonl", ".json")) else "text"
    if fmt not in ("text", "jsonl"):
        raise InvalidConfig(f"unknown corpus format {fmt!r} (expected 'text' or 'jsonl')")
    stats = CorpusStats()
    documents = []
    for text in _document_texts(path, fmt, stats):
        tokens = tokenize(text, inventory)
        emoji_keys = [t for t in tokens if t in inventory]
        if drop_emojiless and not emoji_keys:
            stats.dropped_documents += 1
            continue
        documents.append(tokens)
        stats.documents += 1
        stats.emoji_tokens += len(emoji_keys)
        stats.word_tokens += len(tokens) - len(emoji_keys)
        for key in set(emoji_keys):
            stats.emoji_document_counts[key] += 1
    return IngestResult(TokenStream(documents), stats)


class CooccurrenceTable:
    """Occurrence-level emoji-word co-occurrence counts at document scope.

    An emoji appearing twice in a document counts every word token of that
    document twice; emoji-emoji pairs are never counted.
    """

    def __init__(self, counts=None, doc_count=0):
        self._counts = counts if counts is not None else {}
        self.doc_count = doc_count

    def count(self, emoji, word):
        by_word = self._counts.get(emoji)
        return by_word.get(word, 0) if by_word else 0

    def has_emoji(self, emoji):
        return emoji in self._counts

    def emojis(self):
        return sorted(self._counts)

    def words_for(self, emoji):
        return dict(self._counts.get(emoji, {}))

    def total_count(self):
        return sum(sum(c.values()) for c in self._counts.values())

    @classmethod
    def merge(cls, tables):
        """Combine partial tables from sharded counting; equals sequential output."""
        merged = {}
        docs = 0
        for table in tables:
            docs += table.doc_count
            for emoji, by_word in table._counts.items():
                target = merged.setdefault(emoji, Counter())
                target.update(by_word)
        return cls(merged, docs)

    def save(self, path):
        lines = [f"# documents\t{self.doc_count}"]
        for emoji in sorted(self._counts):
            by_word = self._counts[emoji]
            for word, count in sorted(by_word.items(), key=lambda kv: (-kv[1], kv[0])):
                lines.append(f"{emoji}\t{word}\t{count}")
        write_atomic(path, "\n".join(lines) + "\n")

    @classmethod
    def load(cls, path):
        counts = {}
        doc_count = 0
        with open(path, encoding="utf-8") as handle:
            for number, raw in enumerate(handle, 1):
                line = raw.rstrip("\n")
                if not line.strip():
                    continue
                if line.startswith("#"):
                    parts = line[1:].split("\t")
                    if len(parts) == 2 and parts[0].strip() == "documents":
                        doc_count = int(parts[1])
                    continue
                parts = line.split("\t")
                if len(parts) != 3:
                    raise FormatError("expected 'emoji<TAB>word<TAB>count'", path=path, line=number)
                emoji, word, count = parts
                counts.setdefault(emoji, Counter())[word] = int(count)
        return cls(counts, doc_count)


def build_cooccurrence(stream, inventory):
    counts = {}
    for doc in stream:
        emoji_counts = Counter(t for t in doc if t in inventory)
        if not emoji_counts:
            continue
        word_counts = Counter(t for t in doc if t not in inventory)
        if not word_counts:
            continue
        for emoji, n_emoji in emoji_counts.items():
            target = counts.setdefault(emoji, Counter())
            for word, n_word in word_counts.items():
                target[word] += n_emoji * n_word
    return CooccurrenceTable(counts, doc_count=len(stream))


def top_cooccurring(table, emoji, candidates, k):
    """Up to ``k`` candidate words ranked by co-occurrence count with ``emoji``.

    Count descending, ties broken by ascending word order; words with zero
    count never appear. An emoji absent from the table yields an empty list
    (``table.has_emoji`` distinguishes absence from no qualifying words).
    """
    if k < 1:
        raise InvalidConfig(f"k must be >= 1, got {k}")
    if not table.has_emoji(emoji):
        return []
    scored = []
    for word in candidates:
        count = table.count(emoji, word)
        if count > 0:
            scored.append((word, count))
    scored.sort(key=lambda wc: (-wc[1], wc[0]))
    return [word for word, _ in scored[:k]]
