"""Word-emotion lexicons: binary membership sets and real-valued intensity entries.

Two families are supported behind one canonical TSV layout each:

* binary:    ``word<TAB>emotion<TAB>flag(0|1)``
* intensity: ``word<TAB>label<TAB>score[<TAB>frequency]``

Intensity lexicons may use their own label inventory; an
:data:`EmotionMapping` (``source label -> Emotion``) translates it at load
time, and rows whose label falls outside the mapping are dropped. Lexicon
words are lowercased at load to line up with tokenizer output.
"""

import enum
from dataclasses import dataclass

from .errors import EmotagError, FormatError, InvalidConfig
from .fileio import data_lines, write_atomic


class Emotion(str, enum.Enum):
    ANGER = "anger"
    ANTICIPATION = "anticipation"
    DISGUST = "disgust"
    FEAR = "fear"
    JOY = "joy"
    SADNESS = "sadness"
    SURPRISE = "surprise"
    TRUST = "trust"


EMOTIONS = tuple(Emotion)

#: Identity mapping for lexicons whose labels already use the eight emotions.
IDENTITY_MAPPING = {emotion.value: emotion for emotion in Emotion}


def mood_label_mapping(anger_source="angry"):
    """Mapping for mood-style lexicons labeled angry/annoyed/afraid/happy/sad/amused.

    ``angry`` and ``annoyed`` both stand in for anger; callers pick one at a
    time so the two variants can be compared.
    """
    if anger_source not in ("angry", "annoyed"):
        raise InvalidConfig(f"anger_source must be 'angry' or 'annoyed', got {anger_source!r}")
    return {
        anger_source: Emotion.ANGER,
        "afraid": Emotion.FEAR,
        "happy": Emotion.JOY,
        "sad": Emotion.SADNESS,
        "amused": Emotion.SURPRISE,
    }


class EmotionNotCovered(EmotagError):
    category = "emotion_not_covered"

    def __init__(self, emotion):
        super().__init__(f"lexicon does not cover emotion {emotion.value!r}")
        self.emotion = emotion


def _parse_emotion(label, path, line):
    try:
        return Emotion(label)
    except ValueError:
        raise FormatError(f"unknown emotion {label!r}", path=path, line=line) from None


class BinaryLexicon:
    """Per-emotion word sets; every one of the eight emotions is covered."""

    def __init__(self, sets):
        self._sets = {emotion: frozenset(sets.get(emotion, ())) for emotion in Emotion}

    @property
    def coverage(self):
        return frozenset(Emotion)

    def words_for(self, emotion):
        """Member words for ``emotion``, lexicographically sorted."""
        if emotion not in self._sets:
            raise EmotionNotCovered(emotion)
        return tuple(sorted(self._sets[emotion]))

    def __contains__(self, pair):
        word, emotion = pair
        return word in self._sets[emotion]

    @classmethod
    def load(cls, path):
        flags = {}
        for number, line in data_lines(path):
            parts = line.split("\t")
            if len(parts) != 3:
                raise FormatError("expected 'word<TAB>emotion<TAB>flag'", path=path, line=number)
            word = parts[0].strip().lower()
            emotion = _parse_emotion(parts[1].strip(), path, number)
            if parts[2].strip() not in ("0", "1"):
                raise FormatError(f"flag must be 0 or 1, got {parts[2]!r}", path=path, line=number)
            flag = parts[2].strip() == "1"
            previous = flags.get((word, emotion))
            if previous is not None and previous != flag:
                raise FormatError(
                    f"conflicting flags for ({word!r}, {emotion.value})", path=path, line=number
                )
            flags[(word, emotion)] = flag
        sets = {}
        for (word, emotion), flag in flags.items():
            if flag:
                sets.setdefault(emotion, set()).add(word)
        return cls(sets)

    def save(self, path):
        lines = []
        for emotion in Emotion:
            for word in sorted(self._sets[emotion]):
                lines.append(f"{word}\t{emotion.value}\t1")
        write_atomic(path, "\n".join(lines) + "\n")

    def __eq__(self, other):
        return isinstance(other, BinaryLexicon) and self._sets == other._sets


@dataclass(frozen=True)
class IntensityEntry:
    word: str
    source_label: str
    score: float
    frequency: int | None = None


class IntensityLexicon:
    """Word-emotion intensity scores in [0, 1], keyed by mapped emotion.

    Coverage is the set of emotions the file's labels reach through the
    mapping, independent of any frequency filtering: an emotion whose words
    were all filtered away is still covered (and empty), while an emotion no
    label maps to raises :class:`EmotionNotCovered`.
    """

    def __init__(self, entries, mapping, coverage):
        self.entries = tuple(entries)
        self.mapping = dict(mapping)
        self._coverage = frozenset(coverage)
        self._by_emotion = {emotion: {} for emotion in self._coverage}
        seen = set()
        for entry in self.entries:
            if (entry.word, entry.source_label) in seen:
                raise InvalidConfig(
                    f"duplicate intensity entry ({entry.word!r}, {entry.source_label!r})"
                )
            seen.add((entry.word, entry.source_label))
            emotion = self.mapping[entry.source_label]
            scores = self._by_emotion[emotion]
            if entry.word in scores and scores[entry.word] != entry.score:
                raise InvalidConfig(
                    f"conflicting scores for ({entry.word!r}, {emotion.value}) via mapping"
                )
            scores[entry.word] = entry.score

    @property
    def coverage(self):
        return self._coverage

    def words_for(self, emotion):
        """Word -> score map for ``emotion``, iterating lexicographically."""
        if emotion not in self._coverage:
            raise EmotionNotCovered(emotion)
        scores = self._by_emotion[emotion]
        return {word: scores[word] for word in sorted(scores)}

    @classmethod
    def load(cls, path, mapping=None, min_frequency=0):
        """Load the canonical intensity TSV, mapping labels and filtering by frequency.

        Rows with an unmapped label are dropped; rows below ``min_frequency``
        are dropped; a score outside [0, 1] is an error, as is
        ``min_frequency > 0`` against a file without a frequency column.
        """
        if mapping is None:
            mapping = IDENTITY_MAPPING
        if min_frequency < 0:
            raise InvalidConfig(f"min_frequency must be >= 0, got {min_frequency}")
        entries = []
        coverage = set()
        for number, line in data_lines(path):
            parts = line.split("\t")
            if len(parts) not in (3, 4):
                raise FormatError(
                    "expected 'word<TAB>label<TAB>score[<TAB>frequency]'", path=path, line=number
                )
            word = parts[0].strip().lower()
            label = parts[1].strip()
            try:
                score = float(parts[2])
            except ValueError:
                raise FormatError(f"malformed score {parts[2]!r}", path=path, line=number) from None
            if not 0.0 <= score <= 1.0:
                raise FormatError(f"score {score} outside [0, 1]", path=path, line=number)
            frequency = None
            if len(parts) == 4:
                try:
                    frequency = int(parts[3])
                except ValueError:
                    raise FormatError(
                        f"malformed frequency {parts[3]!r}", path=path, line=number
                    ) from None
                if frequency < 0:
                    raise FormatError(f"negative frequency {frequency}", path=path, line=number)
            if label not in mapping:
                continue
            coverage.add(mapping[label])
            if min_frequency > 0:
                if frequency is None:
                    raise FormatError(
                        "frequency threshold requested but row has no frequency column",
                        path=path,
                        line=number,
                    )
                if frequency < min_frequency:
                    continue
            entries.append(IntensityEntry(word, label, score, frequency))
        return cls(entries, mapping, coverage)

    def save(self, path):
        lines = []
        for entry in sorted(self.entries, key=lambda e: (e.word, e.source_label)):
            row = f"{entry.word}\t{entry.source_label}\t{entry.score!r}"
            if entry.frequency is not None:
                row += f"\t{entry.frequency}"
            lines.append(row)
        write_atomic(path, "\n".join(lines) + "\n")

    def __eq__(self, other):
        return (
            isinstance(other, IntensityLexicon)
            and set(self.entries) == set(other.entries)
            and self.mapping == other.mapping
            and self._coverage == other._coverage
        )
