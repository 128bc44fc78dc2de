"""Corpus records: file I/O, statistics and balance reporting.

TSV layout (header line required, tabs and newlines inside fields rejected):

    id  source  grapheme  phoneme_r1  phoneme_r2  homograph  pronunciation

Absent optional fields are empty strings. JSONL uses the same keys with
``null`` for absent fields. Phoneme fields use the serialized
:class:`~homog2p.phoneme_repr.PhonemeString` form.
"""

from __future__ import annotations

import json
import math
from collections import Counter
from dataclasses import dataclass, field
from typing import IO, Callable, Iterable, Iterator, Mapping, Sequence

from homog2p.errors import MalformedLineError, RecordValidationError, ValidationError
from homog2p.phoneme_repr import MappingTable, PhonemeString, Repr, map_repr
from homog2p.text_norm import normalize, tokenize

SOURCES = ("human", "llm", "manatts", "commonvoice", "gptinformal", "augmented", "other")
COLUMNS = ("id", "source", "grapheme", "phoneme_r1", "phoneme_r2", "homograph", "pronunciation")


@dataclass(frozen=True)
class CorpusRecord:
    grapheme: str
    phoneme_r1: PhonemeString
    phoneme_r2: PhonemeString | None = None
    homograph: str | None = None
    pronunciation: PhonemeString | None = None
    source: str = "other"
    id: str = ""
    tokens: tuple[str, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if normalize(self.grapheme) != self.grapheme:
            raise ValidationError("grapheme is not normalized")
        toks = tuple(tokenize(self.grapheme))
        object.__setattr__(self, "tokens", toks)
        if self.source not in SOURCES:
            raise ValidationError(f"unknown source {self.source!r}")
        if not self.id or any(c in self.id for c in "\t\n\r"):
            raise ValidationError("record id must be a non-empty single-line string")
        if self.phoneme_r1.representation is not Repr.R1:
            raise ValidationError("phoneme_r1 must be in representation R1")
        if len(self.phoneme_r1.words) != len(toks):
            raise ValidationError(
                f"phoneme_r1 has {len(self.phoneme_r1.words)} word groups for {len(toks)} tokens")
        if self.phoneme_r2 is not None:
            if self.phoneme_r2.representation is not Repr.R2:
                raise ValidationError("phoneme_r2 must be in representation R2")
            if len(self.phoneme_r2.words) != len(toks):
                raise ValidationError("phoneme_r2 word groups do not align with tokens")
        if (self.homograph is None) != (self.pronunciation is None):
            raise ValidationError("homograph and pronunciation must be given together")
        if self.homograph is not None:
            if self.homograph not in toks:
                raise ValidationError(f"homograph {self.homograph!r} is not a token of the sentence")
            if len(self.pronunciation.words) != 1:
                raise ValidationError("homograph pronunciation must be a single word")

    @property
    def is_annotated(self) -> bool:
        return self.homograph is not None

    def homograph_index(self) -> int:
        return self.tokens.index(self.homograph)

    def to_json(self) -> dict:
        return {
            "id": self.id,
            "source": self.source,
            "grapheme": self.grapheme,
            "phoneme_r1": self.phoneme_r1.serialize(),
            "phoneme_r2": None if self.phoneme_r2 is None else self.phoneme_r2.serialize(),
            "homograph": self.homograph,
            "pronunciation": None if self.pronunciation is None else self.pronunciation.serialize(),
        }


def _record_from_fields(d: Mapping[str, str | None], table: MappingTable | None) -> CorpusRecord:
    def opt(key):
        v = d.get(key)
        return v if v else None

    r1 = PhonemeString.parse(d["phoneme_r1"] or "", Repr.R1)
    r2_text = opt("phoneme_r2")
    if r2_text is not None:
        r2 = PhonemeString.parse(r2_text, Repr.R2)
    elif table is not None:
        r2 = map_repr(r1, table, Repr.R2)
    else:
        r2 = None
    pron_text = opt("pronunciation")
    hom = opt("homograph")
    return CorpusRecord(
        grapheme=normalize(d["grapheme"] or ""),
        phoneme_r1=r1,
        phoneme_r2=r2,
        homograph=None if hom is None else normalize(hom),
        pronunciation=None if pron_text is None else PhonemeString.parse(pron_text, Repr.R1),
        source=d.get("source") or "other",
        id=d.get("id") or "",
    )


def iter_corpus(
    source: IO[bytes] | IO[str],
    format: str = "tsv",
    table: MappingTable | None = None,
    on_error: Callable[[RecordValidationError], None] | None = None,
) -> Iterator[CorpusRecord]:
    """Yield validated records in file order.

    Framing problems (column count, bad JSON, missing header) always raise.
    Invalid records raise :class:`RecordValidationError` unless ``on_error``
    is given, in which case they are reported to it and skipped. A missing
    ``phoneme_r2`` is derived from ``phoneme_r1`` when ``table`` is given.
    """
    if format not in ("tsv", "jsonl"):
        raise ValidationError(f"unknown corpus format {format!r}")
    header_seen = format == "jsonl"
    for lineno, raw in enumerate(source, 1):
        line = raw.decode("utf-8") if isinstance(raw, bytes) else raw
        line = line.rstrip("\r\n")
        if not line.strip():
            continue
        if format == "tsv":
            cols = line.split("\t")
            if not header_seen:
                if tuple(cols) != COLUMNS:
                    raise MalformedLineError(lineno, "missing or wrong TSV header")
                header_seen = True
                continue
            if len(cols) != len(COLUMNS):
                raise MalformedLineError(lineno, f"expected {len(COLUMNS)} columns, got {len(cols)}")
            fields = dict(zip(COLUMNS, cols))
        else:
            try:
                fields = json.loads(line)
            except ValueError as exc:
                raise MalformedLineError(lineno, f"bad JSON: {exc}") from None
            if not isinstance(fields, dict) or set(fields) - set(COLUMNS):
                raise MalformedLineError(lineno, "unexpected JSON object shape")
            if any(v is not None and not isinstance(v, str) for v in fields.values()):
                raise MalformedLineError(lineno, "field values must be strings or null")
        try:
            yield _record_from_fields(fields, table)
        except (ValidationError, KeyError) as exc:
            err = RecordValidationError(lineno, str(exc))
            if on_error is None:
                raise err from None
            on_error(err)


def read_corpus(source, format: str = "tsv", table: MappingTable | None = None, on_error=None) -> list[CorpusRecord]:
    return list(iter_corpus(source, format, table, on_error))


def read_corpus_file(path, format: str | None = None, table: MappingTable | None = None, on_error=None):
    if format is None:
        format = "jsonl" if str(path).endswith((".jsonl", ".json")) else "tsv"
    with open(path, "rb") as fh:
        return read_corpus(fh, format, table, on_error)


def _tsv_field(value: str | None) -> str:
    value = value or ""
    if any(c in value for c in "\t\n\r"):
        raise ValidationError(f"field contains a tab or newline: {value!r}")
    return value


def write_corpus(records: Iterable[CorpusRecord], stream: IO[str], format: str = "tsv") -> None:
    if format == "tsv":
        stream.write("\t".join(COLUMNS) + "\n")
        for rec in records:
            d = rec.to_json()
            stream.write("\t".join(_tsv_field(d[c]) for c in COLUMNS) + "\n")
    elif format == "jsonl":
        for rec in records:
            stream.write(json.dumps(rec.to_json(), ensure_ascii=False) + "\n")
    else:
        raise ValidationError(f"unknown corpus format {format!r}")


def write_corpus_file(records, path, format: str | None = None) -> None:
    if format is None:
        format = "jsonl" if str(path).endswith((".jsonl", ".json")) else "tsv"
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        write_corpus(records, fh, format)


@dataclass
class CorpusStats:
    sentence_count: int = 0
    vocabulary: set = field(default_factory=set)
    word_count_histogram: Counter = field(default_factory=Counter)
    pronunciation_counts: dict = field(default_factory=dict)  # homograph -> Counter[PhonemeString]
    source_counts: Counter = field(default_factory=Counter)

    @property
    def unique_word_count(self) -> int:
        return len(self.vocabulary)

    @property
    def homograph_sentence_count(self) -> int:
        return sum(sum(c.values()) for c in self.pronunciation_counts.values())

    def add(self, rec: CorpusRecord) -> None:
        self.sentence_count += 1
        self.vocabulary.update(rec.tokens)
        self.word_count_histogram[len(rec.tokens)] += 1
        self.source_counts[rec.source] += 1
        if rec.homograph is not None:
            self.pronunciation_counts.setdefault(rec.homograph, Counter())[rec.pronunciation] += 1

    def merge(self, other: "CorpusStats") -> "CorpusStats":
        counts = {h: Counter(c) for h, c in self.pronunciation_counts.items()}
        for h, c in other.pronunciation_counts.items():
            mine = counts.setdefault(h, Counter())
            for p, n in c.items():
                mine[p] += n
        return CorpusStats(
            sentence_count=self.sentence_count + other.sentence_count,
            vocabulary=self.vocabulary | other.vocabulary,
            word_count_histogram=self.word_count_histogram + other.word_count_histogram,
            pronunciation_counts=counts,
            source_counts=self.source_counts + other.source_counts,
        )

    def to_json(self) -> dict:
        return {
            "sentence_count": self.sentence_count,
            "homograph_sentence_count": self.homograph_sentence_count,
            "unique_word_count": self.unique_word_count,
            "word_count_histogram": {str(k): v for k, v in sorted(self.word_count_histogram.items())},
            "source_counts": dict(sorted(self.source_counts.items())),
            "pronunciation_counts": {
                h: dict(sorted((p.serialize(), n) for p, n in c.items()))
                for h, c in sorted(self.pronunciation_counts.items())
            },
        }


def corpus_stats(records: Iterable[CorpusRecord], inventory=None) -> CorpusStats:
    """Exact corpus counts.

    With ``inventory`` every pronunciation of every inventory homograph seen
    in the corpus gets an entry, so missing pronunciations show up as zeros.
    """
    stats = CorpusStats()
    for rec in records:
        stats.add(rec)
    if inventory is not None:
        for h, c in stats.pronunciation_counts.items():
            if h in inventory:
                for p in inventory.pronunciations(h):
                    c.setdefault(p, 0)
    return stats


@dataclass(frozen=True)
class BalanceEntry:
    ratio: float  # math.inf when some pronunciation has no samples
    counts: tuple[int, ...]
    flagged: bool


def balance_report(stats: CorpusStats) -> dict[str, BalanceEntry]:
    """Largest over smallest per-pronunciation sample count for each homograph."""
    report = {}
    for h, c in sorted(stats.pronunciation_counts.items()):
        counts = tuple(c.values())
        lo, hi = min(counts), max(counts)
        if lo == 0:
            report[h] = BalanceEntry(math.inf, counts, True)
        else:
            report[h] = BalanceEntry(hi / lo, counts, False)
    return report


def balance_to_json(report: Mapping[str, BalanceEntry]) -> dict:
    return {
        h: {"ratio": "inf" if math.isinf(e.ratio) else e.ratio, "counts": list(e.counts), "unbalanced": e.flagged}
        for h, e in report.items()
    }


def group_by_pronunciation(records: Sequence[CorpusRecord]) -> dict[tuple[str, PhonemeString], list[CorpusRecord]]:
    out: dict = {}
    for rec in records:
        if rec.homograph is not None:
            out.setdefault((rec.homograph, rec.pronunciation), []).append(rec)
    return out
